#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spacedet/annotation.hpp"

namespace spacedet {

struct Detection {
  std::string image_id;
  int class_id = 0;
  BBox bbox{};
  double score = 0.0;
  int frame_index = 0;
};

struct GroundTruthBox {
  std::string image_id;
  int class_id = 0;
  BBox bbox{};
};

/// Intersection-over-union of two boxes; symmetric, in [0,1].
double iou_box(const BBox& a, const BBox& b);

enum class MatchRule { closest_center, max_iou };

/// Single-target matching: among detections with IoU strictly greater than
/// iou_min, picks the one closest to the ground truth center (default) or the
/// one with maximal IoU. Ties go to the lowest detection index. Returns
/// nullopt when no candidate qualifies.
std::optional<Detection> match_to_gt(const std::vector<Detection>& detections,
                                     const BBox& gt, double iou_min = 0.5,
                                     MatchRule rule = MatchRule::closest_center);

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double score = 0.0;
};

/// Points of a descending-score sweep with cumulative counts at each cut.
struct PRCurve {
  std::vector<PRPoint> points;
  int n_gt = 0;
};

/// Greedy score-ordered one-to-one matching: each detection takes the
/// highest-IoU unmatched ground truth of its image and class with
/// IoU >= iou_thresh.
PRCurve pr_curve(const std::vector<Detection>& detections,
                 const std::vector<GroundTruthBox>& ground_truths,
                 double iou_thresh);

enum class ApInterp { all_points, points_101 };

/// Area under the monotone precision envelope (all_points), or the mean of
/// the envelope sampled at recalls {0, 0.01, ..., 1.00} (points_101).
/// Throws std::invalid_argument when the curve has no ground truths.
double average_precision(const PRCurve& curve,
                         ApInterp interp = ApInterp::points_101);

/// Per-pixel class maps of identical dimensions.
struct SegSample {
  int width = 0;
  int height = 0;
  std::vector<int> pred;
  std::vector<int> gt;
  std::vector<std::string> class_names;
};

struct IouReport {
  std::map<int, double> per_class;  // classes present in pred or gt
  double mean = 0.0;
};

/// Per-class |pred ∩ gt| / |pred ∪ gt|. Classes absent from both maps are
/// excluded from the mean when ignore_absent, otherwise counted as 0.
IouReport miou(const SegSample& sample, bool ignore_absent = true);

/// Entry (i, j) counts pixels with ground-truth class i predicted as class j;
/// row sums equal the ground-truth class pixel counts.
std::vector<std::vector<std::int64_t>> confusion_matrix(const SegSample& sample);

/// Mergeable per-class intersection/union partial sums so a dataset can be
/// scored in parallel and combined associatively.
class SegAccumulator {
 public:
  explicit SegAccumulator(int num_classes);

  void add(const SegSample& sample);
  void merge(const SegAccumulator& other);
  IouReport report(bool ignore_absent = true) const;
  int num_classes() const { return static_cast<int>(intersection_.size()); }

 private:
  std::vector<std::int64_t> intersection_;
  std::vector<std::int64_t> union_;
};

}  // namespace spacedet
