#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "datared/dataset.hpp"
#include "datared/error.hpp"
#include "datared/reducers.hpp"

namespace datared {

// Directed worst-case distance from each class of `full` to the matching
// class of `reduced`: max over classes of max over full rows of the min
// distance to a reduced row of the same class. 0 iff every full row has an
// exact same-class copy in the reduced set.
//
// Scalar loops throughout: the value feeds tolerance-free comparisons in
// calibration tests, so no GEMM shortcut.
inline double epsilon_representativeness(const LabeledDataset& full,
                                         const LabeledDataset& reduced) {
  if (full.feature_count() != reduced.feature_count())
    throw ShapeError("epsilon: feature counts differ (" +
                     std::to_string(full.feature_count()) + " vs " +
                     std::to_string(reduced.feature_count()) + ")");
  if (full.class_count != reduced.class_count)
    throw ShapeError("epsilon: class counts differ");
  const Index dims = full.feature_count();
  double worst = 0.0;
  for (int k = 0; k < full.class_count; ++k) {
    const auto& full_rows = full.class_members[static_cast<std::size_t>(k)];
    if (full_rows.empty()) continue;
    const auto& reduced_rows =
        reduced.class_members[static_cast<std::size_t>(k)];
    if (reduced_rows.empty())
      throw CoverageError("epsilon: class " + std::to_string(k) +
                          " has no representative in the reduced set");
    for (const Index i : full_rows) {
      double best = std::numeric_limits<double>::infinity();
      for (const Index j : reduced_rows) {
        double d2 = 0.0;
        for (Index f = 0; f < dims; ++f) {
          const double diff = full.examples(i, f) - reduced.examples(j, f);
          d2 += diff * diff;
        }
        if (d2 < best) best = d2;
      }
      worst = std::max(worst, std::sqrt(best));
    }
  }
  return worst;
}

inline double epsilon_representativeness(const LabeledDataset& full,
                                         const ReducedDataset& reduced) {
  return epsilon_representativeness(full, reduced.data);
}

struct ConfusionMatrix {
  // counts(i, j): examples of actual class i predicted as class j.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> actual_totals;     // A_i
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> predicted_totals;  // P_j
  std::int64_t total = 0;

  int class_count() const { return static_cast<int>(counts.rows()); }
};

inline ConfusionMatrix confusion(const std::vector<int>& actual,
                                 const std::vector<int>& predicted,
                                 int class_count) {
  if (actual.size() != predicted.size())
    throw ArgumentError("confusion: actual and predicted lengths differ");
  if (class_count < 1)
    throw ArgumentError("confusion: class count must be positive");
  ConfusionMatrix cm;
  cm.counts.setZero(class_count, class_count);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const int a = actual[i];
    const int p = predicted[i];
    if (a < 0 || a >= class_count || p < 0 || p >= class_count)
      throw ArgumentError("confusion: class id out of range at position " +
                          std::to_string(i));
    ++cm.counts(a, p);
  }
  cm.actual_totals = cm.counts.rowwise().sum();
  cm.predicted_totals = cm.counts.colwise().sum().transpose();
  cm.total = static_cast<std::int64_t>(actual.size());
  return cm;
}

struct PerformanceSummary {
  double accuracy = 0.0;
  std::vector<double> precision;  // per class; 0 when the class is never predicted
  std::vector<double> recall;     // per class; 0 when the class never occurs
  std::vector<double> f1;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

inline PerformanceSummary performance_summary(const ConfusionMatrix& cm) {
  if (cm.total < 1) throw ArgumentError("performance_summary: empty matrix");
  const int c = cm.class_count();
  PerformanceSummary summary;
  summary.accuracy = static_cast<double>(cm.counts.diagonal().sum()) /
                     static_cast<double>(cm.total);
  summary.precision.resize(static_cast<std::size_t>(c));
  summary.recall.resize(static_cast<std::size_t>(c));
  summary.f1.resize(static_cast<std::size_t>(c));
  for (int k = 0; k < c; ++k) {
    const double hits = static_cast<double>(cm.counts(k, k));
    const std::int64_t predicted = cm.predicted_totals(k);
    const std::int64_t actual = cm.actual_totals(k);
    const std::size_t at = static_cast<std::size_t>(k);
    summary.precision[at] =
        predicted > 0 ? hits / static_cast<double>(predicted) : 0.0;
    summary.recall[at] = actual > 0 ? hits / static_cast<double>(actual) : 0.0;
    summary.f1[at] = predicted + actual > 0
                         ? 2.0 * hits / static_cast<double>(predicted + actual)
                         : 0.0;
    summary.macro_precision += summary.precision[at];
    summary.macro_recall += summary.recall[at];
    summary.macro_f1 += summary.f1[at];
  }
  summary.macro_precision /= static_cast<double>(c);
  summary.macro_recall /= static_cast<double>(c);
  summary.macro_f1 /= static_cast<double>(c);
  return summary;
}

struct EnergyModel {
  double watts = 0.0;
  double intensity_kg_per_kwh = 0.0;

  EnergyModel() = default;
  EnergyModel(double watts_, double intensity_)
      : watts(watts_), intensity_kg_per_kwh(intensity_) {
    if (watts < 0.0 || intensity_kg_per_kwh < 0.0)
      throw ArgumentError("energy model: power and intensity must be nonnegative");
  }
};

// kg of CO2 for a span of wall time: watts * seconds is joules, / 3.6e6
// converts to kWh, * intensity converts to mass.
inline double estimate_carbon(double elapsed_seconds, const EnergyModel& model) {
  if (elapsed_seconds < 0.0)
    throw ArgumentError("estimate_carbon: negative elapsed time");
  return model.watts * elapsed_seconds / 3.6e6 * model.intensity_kg_per_kwh;
}

template <typename F>
auto timed(F&& operation) {
  const auto start = std::chrono::steady_clock::now();
  if constexpr (std::is_void_v<std::invoke_result_t<F&&>>) {
    std::forward<F>(operation)();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  } else {
    auto value = std::forward<F>(operation)();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return std::make_pair(std::move(value), elapsed);
  }
}

}  // namespace datared
