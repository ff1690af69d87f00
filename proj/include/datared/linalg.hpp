#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "datared/error.hpp"
#include "datared/rng.hpp"

namespace datared {

using Index = Eigen::Index;

enum class DistanceMetric { Euclidean };

inline double pairwise_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                DistanceMetric metric = DistanceMetric::Euclidean) {
  if (a.size() != b.size())
    throw ShapeError("pairwise_distance: vectors of size " +
                     std::to_string(a.size()) + " and " + std::to_string(b.size()));
  switch (metric) {
    case DistanceMetric::Euclidean:
      return (a - b).norm();
  }
  throw ArgumentError("pairwise_distance: unknown metric");
}

// Squared Euclidean distances between the rows of `a` and the rows of `b`,
// computed with one matrix product. Negative round-off is clamped to zero.
inline Eigen::MatrixXd squared_distance_matrix(const Eigen::MatrixXd& a,
                                               const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols())
    throw ShapeError("squared_distance_matrix: row width mismatch");
  const Eigen::VectorXd a2 = a.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (a * b.transpose());
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  return d2.cwiseMax(0.0);
}

inline Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& points) {
  Eigen::MatrixXd d = squared_distance_matrix(points, points).cwiseSqrt();
  d.diagonal().setZero();
  return d;
}

// ---------------------------------------------------------------------------
// k-means

struct KMeansResult {
  Eigen::MatrixXd centroids;     // k rows
  std::vector<int> assignments;  // per input row, nearest centroid id
  double inertia = 0.0;          // sum of squared distances to assigned centroid
  int iterations = 0;
  // Inertia after each assignment step; non-increasing by construction.
  std::vector<double> inertia_history;
};

namespace detail {

// Nearest centroid per row; ties go to the lowest centroid id.
inline void assign_to_centroids(const Eigen::MatrixXd& d2,
                                std::vector<int>& assignments, double& inertia) {
  inertia = 0.0;
  for (Index i = 0; i < d2.rows(); ++i) {
    int best = 0;
    double best_d = d2(i, 0);
    for (Index c = 1; c < d2.cols(); ++c) {
      if (d2(i, c) < best_d) {
        best_d = d2(i, c);
        best = static_cast<int>(c);
      }
    }
    assignments[static_cast<std::size_t>(i)] = best;
    inertia += best_d;
  }
}

}  // namespace detail

// Lloyd iterations with k-means++ seeding. Deterministic under a fixed seed:
// seeding draws come from the given stream, assignment ties break toward the
// lowest centroid id, and an emptied cluster is re-seeded at the point
// farthest from its current centroid.
inline KMeansResult kmeans(const Eigen::MatrixXd& points, int k,
                           std::uint64_t seed, int max_iters = 300,
                           double tol = 1e-6) {
  const Index n = points.rows();
  if (k < 1) throw ArgumentError("kmeans: k must be positive");
  if (static_cast<Index>(k) > n)
    throw ArgumentError("kmeans: k = " + std::to_string(k) + " exceeds " +
                        std::to_string(n) + " points");
  RngStream stream(derive_seed(seed, "kmeans"));

  // k-means++ seeding
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<Index> chosen;
  chosen.push_back(static_cast<Index>(stream.uniform_index(static_cast<std::size_t>(n))));
  centroids.row(0) = points.row(chosen[0]);
  Eigen::VectorXd nearest_d2 =
      squared_distance_matrix(points, centroids.topRows(1)).col(0);
  for (int c = 1; c < k; ++c) {
    const double total = nearest_d2.sum();
    Index pick = -1;
    if (total > 0.0) {
      double ticket = stream.next_real() * total;
      for (Index i = 0; i < n; ++i) {
        ticket -= nearest_d2(i);
        if (ticket <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
      // Weight-zero rows are duplicates of chosen centroids; skip forward to
      // the next weighted row so k distinct rows are always possible.
      while (nearest_d2(pick) == 0.0 && pick + 1 < n) ++pick;
      if (nearest_d2(pick) == 0.0)
        for (pick = 0; pick < n && nearest_d2(pick) == 0.0; ++pick) {
        }
    }
    if (pick < 0 || pick >= n) {
      // All residual distances are zero: every remaining row duplicates a
      // centroid. Fall back to the first unchosen row.
      std::vector<bool> used(static_cast<std::size_t>(n), false);
      for (Index idx : chosen) used[static_cast<std::size_t>(idx)] = true;
      pick = 0;
      while (pick < n && used[static_cast<std::size_t>(pick)]) ++pick;
      if (pick == n) pick = chosen.back();
    }
    chosen.push_back(pick);
    centroids.row(c) = points.row(pick);
    nearest_d2 = nearest_d2.cwiseMin(
        squared_distance_matrix(points, centroids.row(c)).col(0));
  }

  KMeansResult result;
  result.assignments.assign(static_cast<std::size_t>(n), 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::MatrixXd d2 = squared_distance_matrix(points, centroids);
    double inertia = 0.0;
    detail::assign_to_centroids(d2, result.assignments, inertia);
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;

    // update step
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = result.assignments[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      counts[static_cast<std::size_t>(c)]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed at the point farthest from its assigned centroid.
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          const double di = d2(i, result.assignments[static_cast<std::size_t>(i)]);
          if (di > far_d) {
            far_d = di;
            far = i;
          }
        }
        centroids.row(c) = points.row(far);
        // Claim the point so a second empty cluster picks a different one.
        d2(far, result.assignments[static_cast<std::size_t>(far)]) = -1.0;
      }
    }

    if (prev_inertia - inertia < tol) break;
    prev_inertia = inertia;
  }

  // Final assignment so centroids and labels agree on exit.
  const Eigen::MatrixXd d2 = squared_distance_matrix(points, centroids);
  detail::assign_to_centroids(d2, result.assignments, result.inertia);
  result.centroids = std::move(centroids);
  return result;
}

// ---------------------------------------------------------------------------
// matrix decompositions

enum class DecompositionKind { Svd, Nmf, Plu, Qr };

struct Decomposition {
  DecompositionKind kind = DecompositionKind::Svd;
  Eigen::MatrixXd u;  // n x r
  Eigen::MatrixXd v;  // r x d, with u * v ~= input
  // Nonincreasing singular values (SVD only; empty otherwise).
  Eigen::VectorXd singular_values;
};

struct NmfResult {
  Eigen::MatrixXd w;  // n x r, nonnegative
  Eigen::MatrixXd h;  // r x d, nonnegative
  // Frobenius residual after each multiplicative update.
  std::vector<double> residual_history;
};

// Multiplicative-update NMF (Frobenius objective). Factors are seeded
// uniformly and scaled to the input's magnitude; updates stop after
// `max_iters` rounds or when the relative residual improvement drops below
// 1e-6.
inline NmfResult nmf(const Eigen::MatrixXd& a, Index rank, std::uint64_t seed,
                     int max_iters = 500) {
  if ((a.array() < 0.0).any())
    throw ArgumentError("nmf: input must be nonnegative");
  if (rank < 1 || rank > std::min(a.rows(), a.cols()))
    throw ArgumentError("nmf: rank outside [1, min(n, d)]");
  const double eps = 1e-9;
  RngStream stream(derive_seed(seed, "nmf"));
  const double scale =
      std::sqrt(std::max(a.mean(), eps) / static_cast<double>(rank));
  NmfResult result;
  result.w.resize(a.rows(), rank);
  result.h.resize(rank, a.cols());
  for (Index i = 0; i < result.w.rows(); ++i)
    for (Index j = 0; j < rank; ++j)
      result.w(i, j) = scale * (stream.next_real() + eps);
  for (Index i = 0; i < rank; ++i)
    for (Index j = 0; j < result.h.cols(); ++j)
      result.h(i, j) = scale * (stream.next_real() + eps);

  double prev = (a - result.w * result.h).norm();
  const double denom_floor = eps;
  for (int iter = 0; iter < max_iters; ++iter) {
    result.h.array() *= (result.w.transpose() * a).array() /
                        ((result.w.transpose() * result.w) * result.h)
                            .array()
                            .max(denom_floor);
    result.w.array() *= (a * result.h.transpose()).array() /
                        (result.w * (result.h * result.h.transpose()))
                            .array()
                            .max(denom_floor);
    const double residual = (a - result.w * result.h).norm();
    result.residual_history.push_back(residual);
    if (prev - residual < 1e-6 * std::max(prev, 1.0)) break;
    prev = residual;
  }
  return result;
}

// Factors `a` as u * v (exactly for SVD/PLU/QR, approximately for NMF) with
// r = min(n, d) components. The SVD route also reports singular values,
// nonincreasing.
inline Decomposition decompose(const Eigen::MatrixXd& a, DecompositionKind kind,
                               std::uint64_t seed = 0) {
  if (a.rows() == 0 || a.cols() == 0)
    throw ShapeError("decompose: empty matrix");
  const Index r = std::min(a.rows(), a.cols());
  Decomposition out;
  out.kind = kind;
  switch (kind) {
    case DecompositionKind::Svd: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      out.singular_values = svd.singularValues();
      out.u = svd.matrixU() * svd.singularValues().asDiagonal();
      out.v = svd.matrixV().transpose();
      break;
    }
    case DecompositionKind::Nmf: {
      const NmfResult f = nmf(a, r, seed);
      out.u = f.w;
      out.v = f.h;
      break;
    }
    case DecompositionKind::Plu: {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      const Eigen::MatrixXd& packed = lu.matrixLU();
      Eigen::MatrixXd l = Eigen::MatrixXd::Identity(a.rows(), r);
      for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < std::min<Index>(i, r); ++j) l(i, j) = packed(i, j);
      Eigen::MatrixXd u_fac = Eigen::MatrixXd::Zero(r, a.cols());
      for (Index i = 0; i < r; ++i)
        for (Index j = i; j < a.cols(); ++j) u_fac(i, j) = packed(i, j);
      out.u = lu.permutationP().inverse() * l;
      out.v = u_fac * lu.permutationQ().inverse();
      break;
    }
    case DecompositionKind::Qr: {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      out.u = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), r);
      Eigen::MatrixXd r_fac = Eigen::MatrixXd::Zero(r, a.cols());
      const Eigen::MatrixXd& packed = qr.matrixQR();
      for (Index i = 0; i < r; ++i)
        for (Index j = i; j < a.cols(); ++j) r_fac(i, j) = packed(i, j);
      out.v = r_fac;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// nonnegative concave quadratic maximization

// Maximizes l(w) = w' mu - 0.5 w' K w over w >= 0, with w supported on
// `support` (entries elsewhere stay zero). Projected gradient ascent with
// fixed step 1/L, L a Gershgorin bound on K's largest eigenvalue; each step
// cannot decrease l, so the iterate sequence is monotone. Stops when the
// objective improves by less than 1e-9 or after 1000 steps.
inline Eigen::VectorXd maximize_quadratic_nonneg(
    const Eigen::VectorXd& mu, const Eigen::MatrixXd& kernel,
    const std::vector<Index>& support,
    const Eigen::VectorXd* warm_start = nullptr) {
  const Index n = mu.size();
  if (kernel.rows() != n || kernel.cols() != n)
    throw ShapeError("maximize_quadratic_nonneg: kernel must be n x n");
  if (support.empty())
    throw ArgumentError("maximize_quadratic_nonneg: empty support");
  const double scale = kernel.cwiseAbs().maxCoeff();
  if ((kernel - kernel.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(scale, 1.0))
    throw ArgumentError("maximize_quadratic_nonneg: kernel is not symmetric");
  for (Index idx : support)
    if (idx < 0 || idx >= n)
      throw ArgumentError("maximize_quadratic_nonneg: support index out of range");

  const Index m = static_cast<Index>(support.size());
  Eigen::MatrixXd k_ss(m, m);
  Eigen::VectorXd mu_s(m);
  for (Index i = 0; i < m; ++i) {
    mu_s(i) = mu(support[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < m; ++j)
      k_ss(i, j) = kernel(support[static_cast<std::size_t>(i)],
                          support[static_cast<std::size_t>(j)]);
  }

  double lipschitz = 0.0;
  for (Index i = 0; i < m; ++i)
    lipschitz = std::max(lipschitz, k_ss.row(i).cwiseAbs().sum());
  if (lipschitz <= 0.0) lipschitz = 1.0;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  if (warm_start) {
    if (warm_start->size() != n)
      throw ShapeError("maximize_quadratic_nonneg: warm start has wrong size");
    for (Index i = 0; i < m; ++i)
      w(i) = std::max(0.0, (*warm_start)(support[static_cast<std::size_t>(i)]));
  }

  const auto objective = [&](const Eigen::VectorXd& x) {
    return x.dot(mu_s) - 0.5 * x.dot(k_ss * x);
  };
  double value = objective(w);
  for (int iter = 0; iter < 1000; ++iter) {
    const Eigen::VectorXd grad = mu_s - k_ss * w;
    Eigen::VectorXd next = (w + grad / lipschitz).cwiseMax(0.0);
    const double next_value = objective(next);
    if (next_value < value) break;  // numerical floor reached
    w = std::move(next);
    if (next_value - value < 1e-9) {
      value = next_value;
      break;
    }
    value = next_value;
  }

  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < m; ++i) full(support[static_cast<std::size_t>(i)]) = w(i);
  return full;
}

}  // namespace datared
