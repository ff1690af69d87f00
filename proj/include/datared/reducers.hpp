#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "datared/dataset.hpp"
#include "datared/error.hpp"
#include "datared/linalg.hpp"
#include "datared/persistence.hpp"
#include "datared/rng.hpp"

namespace datared {

enum class ReductionMethod { Srs, Prd, Clc, Rkm, Mms, Des, Phl, Nrmd, Fes };

inline const char* method_name(ReductionMethod method) {
  switch (method) {
    case ReductionMethod::Srs: return "SRS";
    case ReductionMethod::Prd: return "PRD";
    case ReductionMethod::Clc: return "CLC";
    case ReductionMethod::Rkm: return "RKM";
    case ReductionMethod::Mms: return "MMS";
    case ReductionMethod::Des: return "DES";
    case ReductionMethod::Phl: return "PHL";
    case ReductionMethod::Nrmd: return "NRMD";
    case ReductionMethod::Fes: return "FES";
  }
  throw ArgumentError("method_name: unknown method");
}

// Lowercase form used for config values and serialization keys;
// method_name is the display form.
inline std::string method_key(ReductionMethod method) {
  std::string key = method_name(method);
  for (char& c : key) c = static_cast<char>(std::tolower(c));
  return key;
}

inline ReductionMethod parse_method(const std::string& name) {
  std::string lowered = name;
  for (char& c : lowered) c = static_cast<char>(std::tolower(c));
  for (ReductionMethod method :
       {ReductionMethod::Srs, ReductionMethod::Prd, ReductionMethod::Clc,
        ReductionMethod::Rkm, ReductionMethod::Mms, ReductionMethod::Des,
        ReductionMethod::Phl, ReductionMethod::Nrmd, ReductionMethod::Fes}) {
    if (lowered == method_key(method)) return method;
  }
  throw ArgumentError("unknown reduction method '" + name +
                      "' (expected SRS, PRD, CLC, RKM, MMS, DES, PHL, NRMD or FES)");
}

enum class PhlLandmarkMode { Representative, Vital };

struct ReductionParams {
  // PRD: Gaussian kernel bandwidth; 0 means the median heuristic.
  double prd_bandwidth = 0.0;
  // DES: base sampling ratio; negative means p/2.
  double des_p_base = -1.0;
  // PHL
  double phl_delta = 0.0;
  OutliernessMode phl_outlierness = OutliernessMode::Restricted;
  PhlLandmarkMode phl_landmarks = PhlLandmarkMode::Representative;
  // NRMD
  DecompositionKind nrmd_decomposition = DecompositionKind::Svd;
  // FES
  int fes_initial_epochs = 0;
  int fes_total_epochs = 0;
};

struct ReductionRequest {
  ReductionMethod method = ReductionMethod::Srs;
  double ratio = 0.5;
  std::uint64_t seed = 0;
  ReductionParams params;
};

struct ReducedDataset {
  LabeledDataset data;
  // Original row indices in selection order; absent for CLC, whose rows are
  // synthetic centroids.
  std::optional<std::vector<Index>> selected_indices;
  std::vector<std::string> warnings;
};

// Per-epoch training driver used by FES: runs one epoch of optimization on
// the given dataset and reports per-example correctness on it afterwards.
// The implementation keeps the model, so the caller retains a handle to the
// trained state after the reduction finishes.
class EpochOracle {
 public:
  virtual ~EpochOracle() = default;
  virtual std::vector<std::uint8_t> train_epoch(const LabeledDataset& data) = 0;
};

namespace detail {

inline void check_ratio(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ArgumentError("reduction ratio must lie in [0, 1], got " +
                        std::to_string(p));
}

inline Index target_count(double p, Index n) {
  return static_cast<Index>(std::floor(p * static_cast<double>(n)));
}

inline void warn_empty_selection(std::vector<std::string>& warnings,
                                 const LabeledDataset& data, int class_id,
                                 double p) {
  warnings.push_back("class '" +
                     data.label_names[static_cast<std::size_t>(class_id)] +
                     "': target size 0 at ratio " + std::to_string(p) +
                     "; selecting nothing from it");
}

inline void warn_empty_class(std::vector<std::string>& warnings,
                             const LabeledDataset& data, int class_id) {
  warnings.push_back("class '" +
                     data.label_names[static_cast<std::size_t>(class_id)] +
                     "' has no examples; skipped");
}

inline ReducedDataset from_selection(const LabeledDataset& data,
                                     std::vector<Index> indices,
                                     std::vector<std::string> warnings) {
  ReducedDataset reduced;
  reduced.data = subset(data, indices);
  reduced.selected_indices = std::move(indices);
  reduced.warnings = std::move(warnings);
  return reduced;
}

inline Eigen::MatrixXd rows_of(const LabeledDataset& data,
                               const std::vector<Index>& rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), data.feature_count());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Index>(i)) = data.examples.row(rows[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SRS: per-class uniform sampling without replacement

inline ReducedDataset reduce_srs(const LabeledDataset& data, double p,
                                 std::uint64_t seed) {
  detail::check_ratio(p);
  std::vector<Index> selected;
  std::vector<std::string> warnings;
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Index take = detail::target_count(p, static_cast<Index>(members.size()));
    if (take == 0) {
      detail::warn_empty_selection(warnings, data, k, p);
      continue;
    }
    RngStream stream(derive_seed(seed, "srs/class/" + std::to_string(k)));
    auto picks = stream.sample_indices(members.size(),
                                       static_cast<std::size_t>(take));
    std::sort(picks.begin(), picks.end());
    for (std::size_t pos : picks) selected.push_back(members[pos]);
  }
  return detail::from_selection(data, std::move(selected), std::move(warnings));
}

// ---------------------------------------------------------------------------
// PRD: greedy prototype selection maximizing a kernel-MMD objective

inline double median_pairwise_distance(const Eigen::MatrixXd& points) {
  const Index n = points.rows();
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      distances.push_back((points.row(i) - points.row(j)).norm());
  if (distances.empty()) return 0.0;
  std::sort(distances.begin(), distances.end());
  const std::size_t m = distances.size();
  return m % 2 == 1 ? distances[m / 2]
                    : 0.5 * (distances[m / 2 - 1] + distances[m / 2]);
}

// K(x, y) = exp(-||x - y||^2 / (2 h^2))
inline Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& points,
                                  double bandwidth) {
  if (!(bandwidth > 0.0)) throw ArgumentError("rbf_kernel: bandwidth must be positive");
  const Eigen::MatrixXd d2 = squared_distance_matrix(points, points);
  return (-d2.array() / (2.0 * bandwidth * bandwidth)).exp();
}

// Greedy selection of `target` rows. Each step adds the index with the
// largest objective gradient, then re-optimizes the weights of everything
// selected so far. Returns positions into `points` in selection order;
// `objective_history`, when given, receives l(w) after each step.
inline std::vector<Index> protodash_select(
    const Eigen::MatrixXd& points, Index target, double bandwidth = 0.0,
    std::vector<double>* objective_history = nullptr) {
  const Index n = points.rows();
  if (target < 0 || target > n)
    throw ArgumentError("protodash_select: target outside [0, n]");
  if (target == 0) return {};
  if (bandwidth < 0.0)
    throw ArgumentError("protodash_select: bandwidth must be positive or 0 for auto");
  double h = bandwidth;
  if (h == 0.0) {
    h = median_pairwise_distance(points);
    if (h == 0.0) h = 1.0;  // single point or all duplicates
  }
  const Eigen::MatrixXd kernel = rbf_kernel(points, h);
  const Eigen::VectorXd mu = kernel.rowwise().mean();

  std::vector<Index> selected;
  std::vector<bool> in_set(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Index step = 0; step < target; ++step) {
    const Eigen::VectorXd grad = mu - kernel * w;
    Index pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (in_set[static_cast<std::size_t>(j)]) continue;
      if (grad(j) > best) {
        best = grad(j);
        pick = j;
      }
    }
    selected.push_back(pick);
    in_set[static_cast<std::size_t>(pick)] = true;
    w = maximize_quadratic_nonneg(mu, kernel, selected, &w);
    if (objective_history)
      objective_history->push_back(w.dot(mu) - 0.5 * w.dot(kernel * w));
  }
  return selected;
}

inline ReducedDataset reduce_prd(const LabeledDataset& data, double p,
                                 std::uint64_t seed, double bandwidth = 0.0) {
  detail::check_ratio(p);
  if (bandwidth < 0.0)
    throw ArgumentError("reduce_prd: bandwidth must be positive or 0 for auto");
  (void)seed;  // greedy selection is deterministic; seed kept for interface uniformity
  std::vector<Index> selected;
  std::vector<std::string> warnings;
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Index take = detail::target_count(p, static_cast<Index>(members.size()));
    if (take == 0) {
      detail::warn_empty_selection(warnings, data, k, p);
      continue;
    }
    const Eigen::MatrixXd points = detail::rows_of(data, members);
    for (Index pos : protodash_select(points, take, bandwidth))
      selected.push_back(members[static_cast<std::size_t>(pos)]);
  }
  return detail::from_selection(data, std::move(selected), std::move(warnings));
}

// ---------------------------------------------------------------------------
// CLC: per-class k-means centroids (synthetic rows)

inline ReducedDataset reduce_clc(const LabeledDataset& data, double p,
                                 std::uint64_t seed) {
  detail::check_ratio(p);
  std::vector<Eigen::MatrixXd> centroid_blocks;
  std::vector<int> labels;
  std::vector<std::string> warnings;
  Index total = 0;
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Index take = detail::target_count(p, static_cast<Index>(members.size()));
    if (take == 0) {
      detail::warn_empty_selection(warnings, data, k, p);
      continue;
    }
    const Eigen::MatrixXd points = detail::rows_of(data, members);
    const KMeansResult clustering =
        kmeans(points, static_cast<int>(take),
               derive_seed(seed, "clc/class/" + std::to_string(k)));
    centroid_blocks.push_back(clustering.centroids);
    for (Index c = 0; c < take; ++c) labels.push_back(k);
    total += take;
  }
  Eigen::MatrixXd examples(total, data.feature_count());
  Index row = 0;
  for (const Eigen::MatrixXd& block : centroid_blocks) {
    examples.middleRows(row, block.rows()) = block;
    row += block.rows();
  }
  ReducedDataset reduced;
  reduced.data = LabeledDataset::like(data, std::move(examples), std::move(labels));
  reduced.selected_indices = std::nullopt;
  reduced.warnings = std::move(warnings);
  return reduced;
}

// ---------------------------------------------------------------------------
// RKM: k-means over the whole set, then the nearest real examples

inline ReducedDataset reduce_rkm(const LabeledDataset& data, double p,
                                 std::uint64_t seed) {
  detail::check_ratio(p);
  const Index take = detail::target_count(p, data.size());
  std::vector<std::string> warnings;
  if (take == 0) {
    warnings.push_back("target size 0 at ratio " + std::to_string(p) +
                       "; selecting nothing");
    return detail::from_selection(data, {}, std::move(warnings));
  }
  const KMeansResult clustering =
      kmeans(data.examples, data.class_count, derive_seed(seed, "rkm"));

  // Cluster members ordered by distance to their centroid, index tie-break.
  std::vector<std::vector<std::pair<double, Index>>> ranked(
      static_cast<std::size_t>(data.class_count));
  for (Index i = 0; i < data.size(); ++i) {
    const int c = clustering.assignments[static_cast<std::size_t>(i)];
    const double d =
        (data.examples.row(i) - clustering.centroids.row(c)).squaredNorm();
    ranked[static_cast<std::size_t>(c)].push_back({d, i});
  }
  for (auto& members : ranked) std::sort(members.begin(), members.end());

  std::vector<Index> selected;
  selected.reserve(static_cast<std::size_t>(take));
  for (std::size_t rank = 0; static_cast<Index>(selected.size()) < take; ++rank) {
    bool any = false;
    for (const auto& members : ranked) {
      if (rank < members.size()) {
        any = true;
        selected.push_back(members[rank].second);
        if (static_cast<Index>(selected.size()) == take) break;
      }
    }
    if (!any) break;  // unreachable: take <= N
  }
  std::sort(selected.begin(), selected.end());
  return detail::from_selection(data, std::move(selected), std::move(warnings));
}

// ---------------------------------------------------------------------------
// MMS: per-class farthest-point (maxmin) selection

inline ReducedDataset reduce_mms(const LabeledDataset& data, double p,
                                 std::uint64_t seed) {
  detail::check_ratio(p);
  std::vector<Index> selected;
  std::vector<std::string> warnings;
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Index take = detail::target_count(p, static_cast<Index>(members.size()));
    if (take == 0) {
      detail::warn_empty_selection(warnings, data, k, p);
      continue;
    }
    const Index m = static_cast<Index>(members.size());
    const Eigen::MatrixXd points = detail::rows_of(data, members);
    RngStream stream(derive_seed(seed, "mms/class/" + std::to_string(k)));
    Index current = static_cast<Index>(
        stream.uniform_index(static_cast<std::size_t>(m)));
    std::vector<bool> in_set(static_cast<std::size_t>(m), false);
    in_set[static_cast<std::size_t>(current)] = true;
    selected.push_back(members[static_cast<std::size_t>(current)]);
    Eigen::VectorXd min_d2 =
        (points.rowwise() - points.row(current)).rowwise().squaredNorm();
    for (Index step = 1; step < take; ++step) {
      Index pick = -1;
      double best = -1.0;
      for (Index j = 0; j < m; ++j) {
        if (in_set[static_cast<std::size_t>(j)]) continue;
        if (min_d2(j) > best) {  // strict: ties keep the lowest index
          best = min_d2(j);
          pick = j;
        }
      }
      in_set[static_cast<std::size_t>(pick)] = true;
      selected.push_back(members[static_cast<std::size_t>(pick)]);
      min_d2 = min_d2.cwiseMin(
          (points.rowwise() - points.row(pick)).rowwise().squaredNorm());
    }
  }
  return detail::from_selection(data, std::move(selected), std::move(warnings));
}

// ---------------------------------------------------------------------------
// DES: distance-entropy selection on top of an SRS base

// Entropy (base 2) of the softmax of the given values. Softmax uses
// max-subtraction; zero probabilities contribute zero.
inline double softmax_entropy(const Eigen::VectorXd& values) {
  if (values.size() == 0) return 0.0;
  const double top = values.maxCoeff();
  const Eigen::ArrayXd shifted = (values.array() - top).exp();
  const Eigen::ArrayXd q = shifted / shifted.sum();
  double entropy = 0.0;
  for (Index i = 0; i < q.size(); ++i)
    if (q(i) > 0.0) entropy -= q(i) * std::log2(q(i));
  return entropy;
}

inline ReducedDataset reduce_des(const LabeledDataset& data, double p,
                                 double p_base, std::uint64_t seed) {
  detail::check_ratio(p);
  if (p_base < 0.0) p_base = 0.5 * p;
  if (p_base > p)
    throw ArgumentError("reduce_des: p_base " + std::to_string(p_base) +
                        " exceeds ratio " + std::to_string(p));
  const Index total_take = detail::target_count(p, data.size());

  ReducedDataset base =
      reduce_srs(data, p_base, derive_seed(seed, "des/base"));
  std::vector<std::string> warnings = std::move(base.warnings);
  std::vector<Index> selected = *base.selected_indices;

  // prototypes: mean of the base examples per class that has any
  std::vector<int> proto_classes;
  std::vector<Eigen::VectorXd> prototypes;
  for (int k = 0; k < data.class_count; ++k) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.feature_count());
    Index count = 0;
    for (Index idx : selected) {
      if (data.labels[static_cast<std::size_t>(idx)] == k) {
        sum += data.examples.row(idx).transpose();
        ++count;
      }
    }
    if (count > 0) {
      proto_classes.push_back(k);
      prototypes.push_back(sum / static_cast<double>(count));
    }
  }

  Index n_add = total_take - static_cast<Index>(selected.size());
  if (n_add > 0 && prototypes.empty()) {
    warnings.push_back("no base prototypes at p_base " + std::to_string(p_base) +
                       "; filling the selection uniformly at random");
    // Degenerate base: fall back to uniform choice over the pool so the size
    // contract still holds.
    std::vector<bool> in_base(static_cast<std::size_t>(data.size()), false);
    for (Index idx : selected) in_base[static_cast<std::size_t>(idx)] = true;
    std::vector<Index> pool;
    for (Index i = 0; i < data.size(); ++i)
      if (!in_base[static_cast<std::size_t>(i)]) pool.push_back(i);
    RngStream stream(derive_seed(seed, "des/fill"));
    auto picks = stream.sample_indices(pool.size(), static_cast<std::size_t>(n_add));
    std::sort(picks.begin(), picks.end());
    for (std::size_t pos : picks) selected.push_back(pool[pos]);
    return detail::from_selection(data, std::move(selected), std::move(warnings));
  }

  if (n_add > 0) {
    std::vector<bool> in_base(static_cast<std::size_t>(data.size()), false);
    for (Index idx : selected) in_base[static_cast<std::size_t>(idx)] = true;
    std::vector<std::pair<double, Index>> scored;  // (-entropy, index) for sorting
    for (Index i = 0; i < data.size(); ++i) {
      if (in_base[static_cast<std::size_t>(i)]) continue;
      Eigen::VectorXd distances(static_cast<Index>(prototypes.size()));
      for (std::size_t c = 0; c < prototypes.size(); ++c)
        distances(static_cast<Index>(c)) =
            (data.examples.row(i).transpose() - prototypes[c]).norm();
      scored.push_back({-softmax_entropy(distances), i});
    }
    std::sort(scored.begin(), scored.end());
    for (Index a = 0; a < n_add; ++a)
      selected.push_back(scored[static_cast<std::size_t>(a)].second);
  }
  return detail::from_selection(data, std::move(selected), std::move(warnings));
}

// ---------------------------------------------------------------------------
// PHL: persistent-homology landmark selection

inline ReducedDataset reduce_phl(const LabeledDataset& data, double p,
                                 double delta, OutliernessMode o_mode,
                                 PhlLandmarkMode l_mode, std::uint64_t seed) {
  detail::check_ratio(p);
  if (!(delta > 0.0))
    throw ArgumentError("reduce_phl: delta must be positive");
  std::vector<Index> selected;
  std::vector<std::string> warnings;
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Index m = static_cast<Index>(members.size());
    const Index take = detail::target_count(p, m);
    if (take == 0) {
      detail::warn_empty_selection(warnings, data, k, p);
      continue;
    }
    const Eigen::MatrixXd points = detail::rows_of(data, members);
    const Eigen::MatrixXd d2 = squared_distance_matrix(points, points);
    const double delta2 = delta * delta;

    // neighborhood membership within the class, x excluded from its own
    std::vector<std::vector<Index>> neighborhoods(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j)
        if (i != j && d2(i, j) <= delta2)
          neighborhoods[static_cast<std::size_t>(i)].push_back(j);

    std::vector<Index> super_outliers;           // positions within the class
    std::vector<std::pair<double, Index>> scored;  // (score, position)
    for (Index i = 0; i < m; ++i) {
      const auto& hood = neighborhoods[static_cast<std::size_t>(i)];
      if (static_cast<Index>(hood.size()) <= 2) {
        super_outliers.push_back(i);
        continue;
      }
      Eigen::MatrixXd hood_points(static_cast<Index>(hood.size()),
                                  points.cols());
      for (std::size_t h = 0; h < hood.size(); ++h)
        hood_points.row(static_cast<Index>(h)) = points.row(hood[h]);
      scored.push_back({ph_outlierness(hood_points, delta, o_mode), i});
    }

    if (take <= static_cast<Index>(scored.size())) {
      std::sort(scored.begin(), scored.end(),
                [&](const std::pair<double, Index>& a,
                    const std::pair<double, Index>& b) {
                  if (a.first != b.first)
                    return l_mode == PhlLandmarkMode::Representative
                               ? a.first < b.first
                               : a.first > b.first;
                  return a.second < b.second;
                });
      for (Index i = 0; i < take; ++i)
        selected.push_back(members[static_cast<std::size_t>(
            scored[static_cast<std::size_t>(i)].second)]);
    } else {
      // Not enough scored examples: drop a random subset of super-outliers
      // of size |X_k| - n_k and keep everything else (some super-outliers
      // survive by design).
      const Index drop = m - take;
      RngStream stream(derive_seed(seed, "phl/class/" + std::to_string(k)));
      auto picks = stream.sample_indices(super_outliers.size(),
                                         static_cast<std::size_t>(drop));
      std::vector<bool> removed(static_cast<std::size_t>(m), false);
      for (std::size_t pos : picks)
        removed[static_cast<std::size_t>(super_outliers[pos])] = true;
      for (Index i = 0; i < m; ++i)
        if (!removed[static_cast<std::size_t>(i)])
          selected.push_back(members[static_cast<std::size_t>(i)]);
    }
  }
  return detail::from_selection(data, std::move(selected), std::move(warnings));
}

// ---------------------------------------------------------------------------
// NRMD: decomposition-based representativeness scores

namespace detail {

// Score vector of one matrix block: decompose, L2-normalize the rows of the
// input and of the right factor, then weight the negated log of the absolute
// cosine matrix. Weights favor trailing components: 1/sigma for SVD
// (normalized), triangular ramp otherwise.
inline Eigen::VectorXd nrmd_scores(const Eigen::MatrixXd& block,
                                   DecompositionKind kind, std::uint64_t seed) {
  const Decomposition dec = decompose(block, kind, seed);
  const Index r = dec.v.rows();

  Eigen::MatrixXd a_hat = block;
  for (Index i = 0; i < a_hat.rows(); ++i) {
    const double norm = a_hat.row(i).norm();
    if (norm > 0.0) a_hat.row(i) /= norm;
  }
  Eigen::MatrixXd v_hat = dec.v;
  for (Index i = 0; i < r; ++i) {
    const double norm = v_hat.row(i).norm();
    if (norm > 0.0) v_hat.row(i) /= norm;
  }

  Eigen::VectorXd weights(r);
  if (kind == DecompositionKind::Svd) {
    Eigen::VectorXd inv(r);
    for (Index i = 0; i < r; ++i)
      inv(i) = 1.0 / std::max(dec.singular_values(i), 1e-12);
    weights = inv / inv.sum();
  } else {
    for (Index i = 0; i < r; ++i)
      weights(i) = 2.0 * static_cast<double>(i + 1) /
                   (static_cast<double>(r) * static_cast<double>(r + 1));
  }

  const Eigen::MatrixXd cosines =
      (a_hat * v_hat.transpose()).cwiseAbs().cwiseMax(1e-12);
  return (-cosines.array().log()).matrix() * weights;
}

}  // namespace detail

inline ReducedDataset reduce_nrmd(const LabeledDataset& data, double p,
                                  DecompositionKind kind, std::uint64_t seed) {
  detail::check_ratio(p);
  const Index n = data.size();
  const Index take = detail::target_count(p, n);
  std::vector<std::string> warnings;

  Eigen::VectorXd class_scores(n);
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Eigen::VectorXd scores = detail::nrmd_scores(
        detail::rows_of(data, members), kind,
        derive_seed(seed, "nrmd/class/" + std::to_string(k)));
    for (std::size_t i = 0; i < members.size(); ++i)
      class_scores(members[i]) = scores(static_cast<Index>(i));
  }

  Eigen::MatrixXd joint(n, data.feature_count() + data.class_count);
  joint.leftCols(data.feature_count()) = data.examples;
  joint.rightCols(data.class_count).setZero();
  for (Index i = 0; i < n; ++i)
    joint(i, data.feature_count() + data.labels[static_cast<std::size_t>(i)]) = 1.0;
  const Eigen::VectorXd joint_scores =
      detail::nrmd_scores(joint, kind, derive_seed(seed, "nrmd/joint"));

  const Eigen::VectorXd final_scores =
      class_scores.array() * joint_scores.array();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (final_scores(a) != final_scores(b))
      return final_scores(a) > final_scores(b);
    return a < b;
  });
  order.resize(static_cast<std::size_t>(take));
  return detail::from_selection(data, std::move(order), std::move(warnings));
}

// ---------------------------------------------------------------------------
// FES: forgetting-event selection around a two-phase training run

inline ReducedDataset reduce_fes(const LabeledDataset& data, double p,
                                 EpochOracle& trainer, int e_initial,
                                 int e_total, std::uint64_t seed) {
  detail::check_ratio(p);
  (void)seed;  // selection is fully determined by the trainer's trajectory
  if (e_initial < 1 || e_initial >= e_total)
    throw ArgumentError("reduce_fes: need 1 <= e_initial < e_total, got " +
                        std::to_string(e_initial) + "/" + std::to_string(e_total));
  const Index n = data.size();
  std::vector<std::int64_t> forget_counts(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> prev(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> ever_correct(static_cast<std::size_t>(n), 0);
  for (int epoch = 0; epoch < e_initial; ++epoch) {
    const std::vector<std::uint8_t> correct = trainer.train_epoch(data);
    if (static_cast<Index>(correct.size()) != n)
      throw ShapeError("reduce_fes: trainer returned " +
                       std::to_string(correct.size()) + " flags for " +
                       std::to_string(n) + " examples");
    for (Index i = 0; i < n; ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      if (prev[u] == 1 && correct[u] == 0) forget_counts[u]++;
      if (correct[u]) ever_correct[u] = 1;
      prev[u] = correct[u];
    }
  }

  std::vector<Index> selected;
  std::vector<std::string> warnings;
  for (int k = 0; k < data.class_count; ++k) {
    const auto& members = data.class_members[static_cast<std::size_t>(k)];
    if (members.empty()) {
      detail::warn_empty_class(warnings, data, k);
      continue;
    }
    const Index take = detail::target_count(p, static_cast<Index>(members.size()));
    if (take == 0) {
      detail::warn_empty_selection(warnings, data, k, p);
      continue;
    }
    std::vector<Index> ranked = members;
    // never-correct counts as infinitely forgotten
    const auto key = [&](Index idx) {
      const std::size_t u = static_cast<std::size_t>(idx);
      return ever_correct[u] ? forget_counts[u]
                             : std::numeric_limits<std::int64_t>::max();
    };
    std::sort(ranked.begin(), ranked.end(), [&](Index a, Index b) {
      const std::int64_t ka = key(a), kb = key(b);
      if (ka != kb) return ka > kb;
      return a < b;
    });
    ranked.resize(static_cast<std::size_t>(take));
    for (Index idx : ranked) selected.push_back(idx);
  }

  ReducedDataset reduced =
      detail::from_selection(data, std::move(selected), std::move(warnings));
  for (int epoch = e_initial; epoch < e_total; ++epoch)
    trainer.train_epoch(reduced.data);
  return reduced;
}

// ---------------------------------------------------------------------------
// dispatch

inline ReducedDataset reduce(const LabeledDataset& data,
                             const ReductionRequest& request,
                             EpochOracle* trainer = nullptr) {
  switch (request.method) {
    case ReductionMethod::Srs:
      return reduce_srs(data, request.ratio, request.seed);
    case ReductionMethod::Prd:
      return reduce_prd(data, request.ratio, request.seed,
                        request.params.prd_bandwidth);
    case ReductionMethod::Clc:
      return reduce_clc(data, request.ratio, request.seed);
    case ReductionMethod::Rkm:
      return reduce_rkm(data, request.ratio, request.seed);
    case ReductionMethod::Mms:
      return reduce_mms(data, request.ratio, request.seed);
    case ReductionMethod::Des:
      return reduce_des(data, request.ratio, request.params.des_p_base,
                        request.seed);
    case ReductionMethod::Phl:
      return reduce_phl(data, request.ratio, request.params.phl_delta,
                        request.params.phl_outlierness,
                        request.params.phl_landmarks, request.seed);
    case ReductionMethod::Nrmd:
      return reduce_nrmd(data, request.ratio,
                         request.params.nrmd_decomposition, request.seed);
    case ReductionMethod::Fes:
      if (!trainer)
        throw ArgumentError("FES requires an epoch trainer");
      return reduce_fes(data, request.ratio, *trainer,
                        request.params.fes_initial_epochs,
                        request.params.fes_total_epochs, request.seed);
  }
  throw ArgumentError("reduce: unknown method");
}

}  // namespace datared
