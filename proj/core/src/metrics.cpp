#include "spacedet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spacedet {

namespace {

void check_box(const BBox& b, const char* what) {
  if (!(b[0] < b[2]) || !(b[1] < b[3])) {
    throw std::invalid_argument(std::string(what) + ": malformed box");
  }
}

double box_area(const BBox& b) { return (b[2] - b[0]) * (b[3] - b[1]); }

int num_classes_of(const SegSample& sample) {
  int n = static_cast<int>(sample.class_names.size());
  for (const int v : sample.pred) n = std::max(n, v + 1);
  for (const int v : sample.gt) n = std::max(n, v + 1);
  return n;
}

void check_sample(const SegSample& sample) {
  if (sample.width == 0 && sample.height == 0 && sample.pred.empty() &&
      sample.gt.empty()) {
    return;  // empty sample: zero confusion matrix, no classes present
  }
  const std::size_t total =
      static_cast<std::size_t>(sample.width) * sample.height;
  if (sample.width <= 0 || sample.height <= 0) {
    throw std::invalid_argument("seg sample: empty dimensions");
  }
  if (sample.pred.size() != total || sample.gt.size() != total) {
    throw shape_error("seg sample: pred/gt size does not match dimensions");
  }
  for (const int v : sample.pred) {
    if (v < 0) throw std::invalid_argument("seg sample: negative class id");
  }
  for (const int v : sample.gt) {
    if (v < 0) throw std::invalid_argument("seg sample: negative class id");
  }
}

}  // namespace

double iou_box(const BBox& a, const BBox& b) {
  check_box(a, "iou_box");
  check_box(b, "iou_box");
  const double ix = std::min(a[2], b[2]) - std::max(a[0], b[0]);
  const double iy = std::min(a[3], b[3]) - std::max(a[1], b[1]);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (box_area(a) + box_area(b) - inter);
}

std::optional<Detection> match_to_gt(const std::vector<Detection>& detections,
                                     const BBox& gt, double iou_min,
                                     MatchRule rule) {
  check_box(gt, "match_to_gt");
  const double gcx = (gt[0] + gt[2]) / 2.0;
  const double gcy = (gt[1] + gt[3]) / 2.0;

  std::optional<std::size_t> best;
  double best_key = 0.0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double iou = iou_box(detections[i].bbox, gt);
    if (!(iou > iou_min)) continue;
    double key;
    if (rule == MatchRule::closest_center) {
      const auto& b = detections[i].bbox;
      key = std::hypot((b[0] + b[2]) / 2.0 - gcx, (b[1] + b[3]) / 2.0 - gcy);
    } else {
      key = -iou;
    }
    if (!best || key < best_key) {  // strict: ties keep the earlier index
      best = i;
      best_key = key;
    }
  }
  if (!best) return std::nullopt;
  return detections[*best];
}

PRCurve pr_curve(const std::vector<Detection>& detections,
                 const std::vector<GroundTruthBox>& ground_truths,
                 double iou_thresh) {
  for (const auto& g : ground_truths) check_box(g.bbox, "pr_curve gt");
  for (const auto& d : detections) check_box(d.bbox, "pr_curve det");

  // Stable sort keeps input order among equal scores (documented tie-break).
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  std::vector<bool> gt_used(ground_truths.size(), false);

  PRCurve curve;
  curve.n_gt = static_cast<int>(ground_truths.size());
  int tp = 0, fp = 0;
  for (const std::size_t idx : order) {
    const Detection& det = detections[idx];
    double best_iou = 0.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      if (gt_used[g]) continue;
      if (ground_truths[g].image_id != det.image_id ||
          ground_truths[g].class_id != det.class_id) {
        continue;
      }
      const double iou = iou_box(det.bbox, ground_truths[g].bbox);
      if (iou >= iou_thresh && iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0) {
      gt_used[best_gt] = true;
      ++tp;
    } else {
      ++fp;
    }
    PRPoint p;
    p.tp = tp;
    p.fp = fp;
    p.fn = curve.n_gt - tp;
    p.score = det.score;
    p.recall = curve.n_gt > 0 ? static_cast<double>(tp) / curve.n_gt : 0.0;
    p.precision = static_cast<double>(tp) / (tp + fp);
    curve.points.push_back(p);
  }
  return curve;
}

double average_precision(const PRCurve& curve, ApInterp interp) {
  if (curve.n_gt <= 0) {
    throw std::invalid_argument("average_precision: no ground truths; AP undefined");
  }

  // Monotone non-increasing precision envelope over the sweep.
  const std::size_t n = curve.points.size();
  std::vector<double> env(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    env[i] = running;
  }

  if (interp == ApInterp::all_points) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = curve.points[i].recall;
      if (r > prev_recall) {
        ap += (r - prev_recall) * env[i];
        prev_recall = r;
      }
    }
    return ap;
  }

  // points_101: mean of the envelope sampled at recall 0.00, 0.01, ..., 1.00.
  double total = 0.0;
  for (int s = 0; s <= 100; ++s) {
    const double r = s / 100.0;
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (curve.points[i].recall >= r - 1e-12) {
        p = env[i];
        break;
      }
    }
    total += p;
  }
  return total / 101.0;
}

IouReport miou(const SegSample& sample, bool ignore_absent) {
  check_sample(sample);
  SegAccumulator acc(num_classes_of(sample));
  acc.add(sample);
  return acc.report(ignore_absent);
}

std::vector<std::vector<std::int64_t>> confusion_matrix(const SegSample& sample) {
  check_sample(sample);
  const int n = num_classes_of(sample);
  std::vector<std::vector<std::int64_t>> cm(
      n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < sample.gt.size(); ++i) {
    cm[sample.gt[i]][sample.pred[i]] += 1;
  }
  return cm;
}

SegAccumulator::SegAccumulator(int num_classes)
    : intersection_(std::max(num_classes, 0), 0),
      union_(std::max(num_classes, 0), 0) {
  if (num_classes <= 0) {
    throw std::invalid_argument("SegAccumulator: need at least one class");
  }
}

void SegAccumulator::add(const SegSample& sample) {
  check_sample(sample);
  const int n = num_classes();
  for (std::size_t i = 0; i < sample.gt.size(); ++i) {
    const int p = sample.pred[i];
    const int g = sample.gt[i];
    if (p >= n || g >= n) {
      throw std::invalid_argument("SegAccumulator: class id outside accumulator range");
    }
    if (p == g) {
      intersection_[p] += 1;
      union_[p] += 1;
    } else {
      union_[p] += 1;
      union_[g] += 1;
    }
  }
}

void SegAccumulator::merge(const SegAccumulator& other) {
  if (other.num_classes() != num_classes()) {
    throw shape_error("SegAccumulator: class count mismatch in merge");
  }
  for (std::size_t c = 0; c < intersection_.size(); ++c) {
    intersection_[c] += other.intersection_[c];
    union_[c] += other.union_[c];
  }
}

IouReport SegAccumulator::report(bool ignore_absent) const {
  IouReport report;
  double sum = 0.0;
  int included = 0;
  for (std::size_t c = 0; c < union_.size(); ++c) {
    if (union_[c] > 0) {
      const double iou =
          static_cast<double>(intersection_[c]) / static_cast<double>(union_[c]);
      report.per_class[static_cast<int>(c)] = iou;
      sum += iou;
      ++included;
    } else if (!ignore_absent) {
      ++included;  // absent class counts as 0
    }
  }
  if (included == 0) {
    throw std::invalid_argument("miou: no classes present in prediction or ground truth");
  }
  report.mean = sum / included;
  return report;
}

}  // namespace spacedet
