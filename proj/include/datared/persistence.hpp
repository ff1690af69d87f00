#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "datared/error.hpp"
#include "datared/linalg.hpp"

namespace datared {

constexpr double kInfiniteDeath = std::numeric_limits<double>::infinity();

// Simplex of dimension 0..3 with sorted vertex ids; unused slots hold -1.
struct FiltrationSimplex {
  std::array<int, 4> vertices{-1, -1, -1, -1};
  int dim = 0;
  double value = 0.0;
};

// Flag filtration: simplices ordered by (value, dim, vertex tuple), so every
// face precedes its cofaces.
struct Filtration {
  std::vector<FiltrationSimplex> simplices;
  double max_scale = 0.0;
};

struct PersistenceInterval {
  double birth = 0.0;
  double death = kInfiniteDeath;
};

struct Barcode {
  // Intervals per homology dimension 0..2. Zero-length intervals dropped.
  std::array<std::vector<PersistenceInterval>, 3> dims;
};

// Raw reduction output: creator/destroyer index pairs into the filtration
// order, plus the unpaired (essential) creators. Zero-length pairs included.
struct PersistencePairing {
  std::vector<std::array<Index, 2>> pairs;
  std::vector<Index> essential;
};

// Vietoris-Rips (clique) filtration: a simplex enters when its longest edge
// does; only simplices with value <= max_scale are kept.
inline Filtration rips_filtration(const Eigen::MatrixXd& points, double max_scale,
                                  int max_dim) {
  if (points.rows() < 1) throw ArgumentError("rips_filtration: no points");
  if (max_dim < 0 || max_dim > 3)
    throw ArgumentError("rips_filtration: max_dim must be in [0, 3]");
  const int m = static_cast<int>(points.rows());
  // Scalar per-pair sums: clouds are tiny and the filtration values feed
  // exact comparisons downstream, so no GEMM shortcut here.
  Eigen::MatrixXd dist(m, m);
  for (int a = 0; a < m; ++a) {
    dist(a, a) = 0.0;
    for (int b = a + 1; b < m; ++b) {
      double sum = 0.0;
      for (Index j = 0; j < points.cols(); ++j) {
        const double diff = points(a, j) - points(b, j);
        sum += diff * diff;
      }
      dist(a, b) = dist(b, a) = std::sqrt(sum);
    }
  }

  Filtration filtration;
  filtration.max_scale = max_scale;
  auto& simplices = filtration.simplices;
  for (int v = 0; v < m; ++v)
    simplices.push_back({{v, -1, -1, -1}, 0, 0.0});

  // Neighbor lists over edges within scale keep the clique scans near-linear
  // in the number of simplices actually emitted.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  if (max_dim >= 1) {
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const double value = dist(a, b);
        if (value <= max_scale) {
          simplices.push_back({{a, b, -1, -1}, 1, value});
          adj[static_cast<std::size_t>(a)].push_back(b);
        }
      }
    }
  }
  if (max_dim >= 2) {
    for (int a = 0; a < m; ++a) {
      for (int b : adj[static_cast<std::size_t>(a)]) {
        for (int c : adj[static_cast<std::size_t>(b)]) {
          if (dist(a, c) > max_scale) continue;
          const double value = std::max({dist(a, b), dist(b, c), dist(a, c)});
          simplices.push_back({{a, b, c, -1}, 2, value});
          if (max_dim >= 3) {
            for (int d : adj[static_cast<std::size_t>(c)]) {
              if (dist(a, d) > max_scale || dist(b, d) > max_scale) continue;
              const double tet_value =
                  std::max({value, dist(a, d), dist(b, d), dist(c, d)});
              simplices.push_back({{a, b, c, d}, 3, tet_value});
            }
          }
        }
      }
    }
  }

  std::sort(simplices.begin(), simplices.end(),
            [](const FiltrationSimplex& lhs, const FiltrationSimplex& rhs) {
              if (lhs.value != rhs.value) return lhs.value < rhs.value;
              if (lhs.dim != rhs.dim) return lhs.dim < rhs.dim;
              return lhs.vertices < rhs.vertices;
            });
  return filtration;
}

namespace detail {

inline std::uint64_t simplex_key(const std::array<int, 4>& vertices) {
  std::uint64_t key = 0;
  for (int v : vertices)
    key = (key << 16) | static_cast<std::uint64_t>(v + 1);
  return key;
}

}  // namespace detail

// Standard boundary-matrix reduction over Z/2. Columns are processed in
// filtration order; a column that reduces to empty creates a class, one that
// keeps a pivot kills the class created by its pivot row.
inline PersistencePairing persistence_pairs(const Filtration& filtration) {
  const auto& simplices = filtration.simplices;
  const Index n = static_cast<Index>(simplices.size());

  std::map<std::uint64_t, Index> position;
  for (Index i = 0; i < n; ++i)
    position[detail::simplex_key(simplices[static_cast<std::size_t>(i)].vertices)] = i;

  // boundary columns as sorted index lists (Z/2 chains)
  std::vector<std::vector<Index>> columns(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const FiltrationSimplex& s = simplices[static_cast<std::size_t>(i)];
    if (s.dim == 0) continue;
    std::vector<Index>& col = columns[static_cast<std::size_t>(i)];
    for (int skip = 0; skip <= s.dim; ++skip) {
      std::array<int, 4> face{-1, -1, -1, -1};
      int w = 0;
      for (int j = 0; j <= s.dim; ++j)
        if (j != skip) face[static_cast<std::size_t>(w++)] = s.vertices[static_cast<std::size_t>(j)];
      const auto it = position.find(detail::simplex_key(face));
      if (it == position.end())
        throw ShapeError("persistence_pairs: face missing from filtration");
      col.push_back(it->second);
    }
    std::sort(col.begin(), col.end());
  }

  const auto xor_into = [](std::vector<Index>& target, const std::vector<Index>& other) {
    std::vector<Index> merged;
    merged.reserve(target.size() + other.size());
    std::set_symmetric_difference(target.begin(), target.end(), other.begin(),
                                  other.end(), std::back_inserter(merged));
    target = std::move(merged);
  };

  PersistencePairing pairing;
  std::vector<Index> pivot_owner(static_cast<std::size_t>(n), -1);
  for (Index j = 0; j < n; ++j) {
    std::vector<Index>& col = columns[static_cast<std::size_t>(j)];
    while (!col.empty()) {
      const Index low = col.back();
      const Index owner = pivot_owner[static_cast<std::size_t>(low)];
      if (owner < 0) break;
      xor_into(col, columns[static_cast<std::size_t>(owner)]);
    }
    if (!col.empty()) {
      pivot_owner[static_cast<std::size_t>(col.back())] = j;
      pairing.pairs.push_back({col.back(), j});
    }
  }

  std::vector<bool> destroyed(static_cast<std::size_t>(n), false);
  std::vector<bool> destroyer(static_cast<std::size_t>(n), false);
  for (const auto& [birth, death] : pairing.pairs) {
    destroyed[static_cast<std::size_t>(birth)] = true;
    destroyer[static_cast<std::size_t>(death)] = true;
  }
  for (Index i = 0; i < n; ++i)
    if (!destroyed[static_cast<std::size_t>(i)] && !destroyer[static_cast<std::size_t>(i)])
      pairing.essential.push_back(i);
  return pairing;
}

// Intervals per dimension 0..2. Pairs of equal birth and death value are
// dropped; essential classes get death INF.
inline Barcode barcodes(const Filtration& filtration) {
  const PersistencePairing pairing = persistence_pairs(filtration);
  Barcode barcode;
  const auto& simplices = filtration.simplices;
  for (const auto& [birth_idx, death_idx] : pairing.pairs) {
    const FiltrationSimplex& creator = simplices[static_cast<std::size_t>(birth_idx)];
    const double birth = creator.value;
    const double death = simplices[static_cast<std::size_t>(death_idx)].value;
    if (death <= birth) continue;
    if (creator.dim > 2) continue;
    barcode.dims[static_cast<std::size_t>(creator.dim)].push_back({birth, death});
  }
  for (Index idx : pairing.essential) {
    const FiltrationSimplex& creator = simplices[static_cast<std::size_t>(idx)];
    if (creator.dim > 2) continue;
    barcode.dims[static_cast<std::size_t>(creator.dim)].push_back(
        {creator.value, kInfiniteDeath});
  }
  for (auto& intervals : barcode.dims)
    std::sort(intervals.begin(), intervals.end(),
              [](const PersistenceInterval& a, const PersistenceInterval& b) {
                if (a.birth != b.birth) return a.birth < b.birth;
                return a.death < b.death;
              });
  return barcode;
}

enum class OutliernessMode { Multidimensional, Restricted };

// Longest bar in the neighborhood's barcode: over dimensions 0..2 in
// multidimensional mode, dimension 1 only in restricted mode. Deaths at INF
// are capped at delta; an empty barcode scores 0.
inline double ph_outlierness(const Eigen::MatrixXd& points, double delta,
                             OutliernessMode mode) {
  if (!(delta > 0.0)) throw ArgumentError("ph_outlierness: delta must be positive");
  const int max_dim = mode == OutliernessMode::Multidimensional ? 3 : 2;
  const Barcode barcode = barcodes(rips_filtration(points, delta, max_dim));
  double longest = 0.0;
  const int first_dim = mode == OutliernessMode::Multidimensional ? 0 : 1;
  const int last_dim = mode == OutliernessMode::Multidimensional ? 2 : 1;
  for (int dim = first_dim; dim <= last_dim; ++dim) {
    for (const PersistenceInterval& bar :
         barcode.dims[static_cast<std::size_t>(dim)]) {
      const double death = std::min(bar.death, delta);
      longest = std::max(longest, death - bar.birth);
    }
  }
  return longest;
}

}  // namespace datared
