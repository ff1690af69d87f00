#pragma once

#include <Eigen/Dense>
#include <string>

#include "datared/dataset.hpp"
#include "datared/error.hpp"

namespace datared {

// Per-feature bounds for min-max scaling.
struct ScalingParams {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  Index feature_count() const { return min.size(); }
};

inline ScalingParams fit_minmax(const Eigen::MatrixXd& examples) {
  if (examples.rows() == 0) throw ShapeError("fit_minmax: no rows");
  ScalingParams params;
  params.min = examples.colwise().minCoeff();
  params.max = examples.colwise().maxCoeff();
  return params;
}

inline ScalingParams fit_minmax(const LabeledDataset& data) {
  return fit_minmax(data.examples);
}

// Maps each feature to [0, 1] by its fitted range. A constant feature
// (max == min) maps to 0 everywhere.
inline Eigen::MatrixXd apply_minmax(const Eigen::MatrixXd& examples,
                                    const ScalingParams& params) {
  if (examples.cols() != params.feature_count())
    throw ShapeError("apply_minmax: " + std::to_string(examples.cols()) +
                     " features, params for " +
                     std::to_string(params.feature_count()));
  Eigen::MatrixXd scaled(examples.rows(), examples.cols());
  for (Index j = 0; j < examples.cols(); ++j) {
    const double range = params.max(j) - params.min(j);
    if (range > 0.0)
      scaled.col(j) = (examples.col(j).array() - params.min(j)) / range;
    else
      scaled.col(j).setZero();
  }
  return scaled;
}

inline LabeledDataset apply_minmax(const LabeledDataset& data,
                                   const ScalingParams& params) {
  return LabeledDataset::like(data, apply_minmax(data.examples, params),
                              data.labels);
}

// Maps scaled values back to the original units. Constant features recover
// their single value exactly.
inline Eigen::MatrixXd invert_minmax(const Eigen::MatrixXd& scaled,
                                     const ScalingParams& params) {
  if (scaled.cols() != params.feature_count())
    throw ShapeError("invert_minmax: " + std::to_string(scaled.cols()) +
                     " features, params for " +
                     std::to_string(params.feature_count()));
  Eigen::MatrixXd raw(scaled.rows(), scaled.cols());
  for (Index j = 0; j < scaled.cols(); ++j) {
    const double range = params.max(j) - params.min(j);
    if (range > 0.0)
      raw.col(j) = scaled.col(j).array() * range + params.min(j);
    else
      raw.col(j).setConstant(params.min(j));
  }
  return raw;
}

}  // namespace datared
