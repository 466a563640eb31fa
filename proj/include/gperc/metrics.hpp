#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gperc/errors.hpp"

namespace gperc {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
};

struct MetricReport {
  ConfusionCounts counts;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;  // filled by roc_auc, not derive_metrics
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

// Step curve from (0,0) to (1,1), FPR non-decreasing.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Predicted positive iff score >= threshold.
inline ConfusionCounts confusion(std::span<const int> labels,
                                 std::span<const double> scores,
                                 double threshold = 0.5) {
  if (labels.size() != scores.size())
    throw DimensionError("confusion: labels and scores differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual)
      ++c.tp;
    else if (predicted && !actual)
      ++c.fp;
    else if (!predicted && actual)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

// Ratios with zero denominators are defined as 0.
inline MetricReport derive_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw DataError("derive_metrics: empty counts");
  MetricReport r;
  r.counts = c;
  const double total = static_cast<double>(c.total());
  r.accuracy = static_cast<double>(c.tp + c.tn) / total;
  r.precision = (c.tp + c.fp) > 0
                    ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                    : 0.0;
  r.recall = (c.tp + c.fn) > 0
                 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                 : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

// Threshold sweep over the distinct score values, descending. Equal scores
// are processed as one step, which makes the trapezoidal area match the
// pairwise statistic (half credit per tied pair) exactly: the area is
// accumulated in integer pair units and divided once at the end.
inline RocCurve roc_auc(std::span<const int> labels,
                        std::span<const double> scores) {
  if (labels.size() != scores.size())
    throw DimensionError("roc_auc: labels and scores differ in length");
  std::uint64_t positives = 0, negatives = 0;
  for (int y : labels) (y != 0 ? positives : negatives)++;
  if (positives == 0 || negatives == 0)
    throw DataError("roc_auc: need at least one positive and one negative label");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::uint64_t tp = 0, fp = 0;
  std::uint64_t twice_area = 0;  // in units of (pos,neg) pairs
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    std::uint64_t tp_inc = 0, fp_inc = 0;
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == s) {
      (labels[order[j]] != 0 ? tp_inc : fp_inc)++;
      ++j;
    }
    twice_area += fp_inc * (2 * tp + tp_inc);
    tp += tp_inc;
    fp += fp_inc;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives),
                            s});
    i = j;
  }
  curve.auc = static_cast<double>(twice_area) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

// Mean binary cross-entropy; predictions clamped away from {0,1} so the
// loss stays finite on saturated scores.
inline double bce_loss(std::span<const int> labels,
                       std::span<const double> scores) {
  if (labels.size() != scores.size())
    throw DimensionError("bce_loss: labels and scores differ in length");
  if (labels.empty()) throw DataError("bce_loss: empty input");
  constexpr double kEps = 1e-12;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(scores[i], kEps, 1.0 - kEps);
    sum += labels[i] != 0 ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(labels.size());
}

struct MulticlassConfusion {
  std::size_t classes = 0;
  std::vector<std::uint64_t> cells;  // row-major: cells[truth * classes + predicted]

  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return cells[truth * classes + predicted];
  }
  std::uint64_t total() const {
    return std::accumulate(cells.begin(), cells.end(), std::uint64_t{0});
  }
  double accuracy() const {
    std::uint64_t diag = 0;
    for (std::size_t c = 0; c < classes; ++c) diag += at(c, c);
    return static_cast<double>(diag) / static_cast<double>(total());
  }
};

inline MulticlassConfusion multiclass_confusion(std::span<const int> labels,
                                                std::span<const int> predictions,
                                                std::size_t classes) {
  if (labels.size() != predictions.size())
    throw DimensionError("multiclass_confusion: labels and predictions differ in length");
  if (labels.empty()) throw DataError("multiclass_confusion: empty input");
  MulticlassConfusion m;
  m.classes = classes;
  m.cells.assign(classes * classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
      throw DataError("multiclass_confusion: label out of range: " +
                      std::to_string(labels[i]));
    if (predictions[i] < 0 || static_cast<std::size_t>(predictions[i]) >= classes)
      throw DataError("multiclass_confusion: prediction out of range: " +
                      std::to_string(predictions[i]));
    ++m.cells[static_cast<std::size_t>(labels[i]) * classes +
              static_cast<std::size_t>(predictions[i])];
  }
  return m;
}

// Flat JSON object: tp, tn, fp, fn, accuracy, precision, recall, f1, auc.
inline std::string metric_report_json(const MetricReport& r) {
  std::ostringstream out;
  out << "{\"tp\":" << r.counts.tp << ",\"tn\":" << r.counts.tn
      << ",\"fp\":" << r.counts.fp << ",\"fn\":" << r.counts.fn
      << ",\"accuracy\":" << detail::format_double(r.accuracy)
      << ",\"precision\":" << detail::format_double(r.precision)
      << ",\"recall\":" << detail::format_double(r.recall)
      << ",\"f1\":" << detail::format_double(r.f1)
      << ",\"auc\":" << detail::format_double(r.auc) << "}";
  return out.str();
}

inline std::string roc_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "fpr,tpr,threshold\n";
  for (const RocPoint& p : curve.points) {
    out << detail::format_double(p.fpr) << ',' << detail::format_double(p.tpr)
        << ',' << detail::format_double(p.threshold) << '\n';
  }
  return out.str();
}

}  // namespace gperc
