#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "datared/persistence.hpp"
#include "datared/rng.hpp"
#include "support/persistence_oracle.hpp"

using namespace datared;

namespace {

Eigen::MatrixXd unit_square() {
  Eigen::MatrixXd points(4, 2);
  points << 0, 0, 1, 0, 1, 1, 0, 1;
  return points;
}

// Flattens a Barcode into the oracle's sorted interval list for comparison.
std::vector<testsupport::OracleInterval> flatten(const Barcode& barcode) {
  std::vector<testsupport::OracleInterval> intervals;
  for (int dim = 0; dim <= 2; ++dim)
    for (const PersistenceInterval& bar : barcode.dims[static_cast<std::size_t>(dim)])
      intervals.push_back({dim, bar.birth, bar.death});
  std::sort(intervals.begin(), intervals.end(),
            [](const testsupport::OracleInterval& a,
               const testsupport::OracleInterval& b) {
              if (a.dim != b.dim) return a.dim < b.dim;
              if (a.birth != b.birth) return a.birth < b.birth;
              return a.death < b.death;
            });
  return intervals;
}

}  // namespace

TEST(Rips, SinglePointIsOneVertex) {
  Eigen::MatrixXd point(1, 3);
  point << 1, 2, 3;
  const Filtration filtration = rips_filtration(point, 2.0, 3);
  ASSERT_EQ(filtration.simplices.size(), 1u);
  EXPECT_EQ(filtration.simplices[0].dim, 0);
  EXPECT_DOUBLE_EQ(filtration.simplices[0].value, 0.0);
}

TEST(Rips, TwoPointsMakeAnEdge) {
  Eigen::MatrixXd points(2, 1);
  points << 0, 1;
  const Filtration filtration = rips_filtration(points, 2.0, 3);
  ASSERT_EQ(filtration.simplices.size(), 3u);
  EXPECT_EQ(filtration.simplices[0].dim, 0);
  EXPECT_EQ(filtration.simplices[1].dim, 0);
  EXPECT_EQ(filtration.simplices[2].dim, 1);
  EXPECT_DOUBLE_EQ(filtration.simplices[2].value, 1.0);
}

TEST(Rips, UnitSquareCliqueCount) {
  const Filtration filtration = rips_filtration(unit_square(), 2.0, 2);
  int vertices = 0, edges_at_1 = 0, edges_at_diag = 0, triangles = 0;
  const double diag = std::sqrt(2.0);
  for (const FiltrationSimplex& s : filtration.simplices) {
    if (s.dim == 0) ++vertices;
    if (s.dim == 1 && std::abs(s.value - 1.0) < 1e-12) ++edges_at_1;
    if (s.dim == 1 && std::abs(s.value - diag) < 1e-12) ++edges_at_diag;
    if (s.dim == 2) {
      ++triangles;
      EXPECT_NEAR(s.value, diag, 1e-12);
    }
  }
  EXPECT_EQ(vertices, 4);
  EXPECT_EQ(edges_at_1, 4);
  EXPECT_EQ(edges_at_diag, 2);
  EXPECT_EQ(triangles, 4);
}

TEST(Rips, ScaleCutsLongSimplices) {
  const Filtration filtration = rips_filtration(unit_square(), 1.2, 2);
  for (const FiltrationSimplex& s : filtration.simplices)
    EXPECT_LE(s.value, 1.2);
  int edges = 0;
  for (const FiltrationSimplex& s : filtration.simplices)
    if (s.dim == 1) ++edges;
  EXPECT_EQ(edges, 4);  // diagonals excluded
}

TEST(Rips, FacesPrecedeCofacesAndValuesSorted) {
  RngStream stream(5);
  Eigen::MatrixXd points(7, 3);
  for (Index i = 0; i < 7; ++i)
    for (Index j = 0; j < 3; ++j) points(i, j) = stream.next_real();
  const Filtration filtration = rips_filtration(points, 1.5, 3);
  const auto& simplices = filtration.simplices;
  for (std::size_t i = 1; i < simplices.size(); ++i)
    EXPECT_GE(simplices[i].value, simplices[i - 1].value);
  // every face present, with value no larger
  for (const FiltrationSimplex& s : simplices) {
    if (s.dim == 0) continue;
    for (int skip = 0; skip <= s.dim; ++skip) {
      std::array<int, 4> face{-1, -1, -1, -1};
      int w = 0;
      for (int j = 0; j <= s.dim; ++j)
        if (j != skip) face[static_cast<std::size_t>(w++)] = s.vertices[static_cast<std::size_t>(j)];
      bool found = false;
      for (const FiltrationSimplex& other : simplices) {
        if (other.vertices == face) {
          found = true;
          EXPECT_LE(other.value, s.value);
          break;
        }
      }
      EXPECT_TRUE(found);
    }
  }
}

TEST(Barcodes, SinglePointHasOneEssentialClass) {
  Eigen::MatrixXd point(1, 2);
  point << 0, 0;
  const Barcode barcode = barcodes(rips_filtration(point, 1.0, 2));
  ASSERT_EQ(barcode.dims[0].size(), 1u);
  EXPECT_DOUBLE_EQ(barcode.dims[0][0].birth, 0.0);
  EXPECT_TRUE(std::isinf(barcode.dims[0][0].death));
  EXPECT_TRUE(barcode.dims[1].empty());
  EXPECT_TRUE(barcode.dims[2].empty());
}

TEST(Barcodes, EquilateralTriangle) {
  // pairwise distance 1: H0 = {[0,INF), [0,1), [0,1)}, H1 empty
  Eigen::MatrixXd points(3, 2);
  points << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
  const Barcode barcode = barcodes(rips_filtration(points, 2.0, 2));
  ASSERT_EQ(barcode.dims[0].size(), 3u);
  int essential = 0, finite = 0;
  for (const PersistenceInterval& bar : barcode.dims[0]) {
    EXPECT_DOUBLE_EQ(bar.birth, 0.0);
    if (std::isinf(bar.death)) {
      ++essential;
    } else {
      ++finite;
      EXPECT_NEAR(bar.death, 1.0, 1e-12);
    }
  }
  EXPECT_EQ(essential, 1);
  EXPECT_EQ(finite, 2);
  EXPECT_TRUE(barcode.dims[1].empty());
}

TEST(Barcodes, UnitSquareHasExactlyOneCycle) {
  const Barcode barcode = barcodes(rips_filtration(unit_square(), 2.0, 2));
  ASSERT_EQ(barcode.dims[1].size(), 1u);
  EXPECT_NEAR(barcode.dims[1][0].birth, 1.0, 1e-9);
  EXPECT_NEAR(barcode.dims[1][0].death, std::sqrt(2.0), 1e-9);
}

TEST(Barcodes, ComponentCountMatchesDistanceGraph) {
  // three clusters far apart
  Eigen::MatrixXd points(6, 2);
  points << 0, 0, 0.1, 0, 10, 0, 10.1, 0, 20, 0, 20.1, 0;
  const Barcode barcode = barcodes(rips_filtration(points, 1.0, 2));
  int essential = 0;
  for (const PersistenceInterval& bar : barcode.dims[0])
    if (std::isinf(bar.death)) ++essential;
  EXPECT_EQ(essential, 3);
}

TEST(Barcodes, MatchOracleOnRandomClouds) {
  RngStream stream(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(stream.uniform_index(5));  // 3..7 points
    Eigen::MatrixXd points(m, 2);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < 2; ++j) points(i, j) = stream.next_real() * 2.0;
    const double scale = 0.5 + stream.next_real() * 2.0;
    const Barcode barcode = barcodes(rips_filtration(points, scale, 3));
    const auto ours = flatten(barcode);
    const auto oracle = testsupport::naive_persistence(points, scale, 3);
    ASSERT_EQ(ours.size(), oracle.size()) << "trial " << trial;
    for (std::size_t i = 0; i < ours.size(); ++i) {
      EXPECT_EQ(ours[i].dim, oracle[i].dim) << "trial " << trial;
      EXPECT_EQ(ours[i].birth, oracle[i].birth) << "trial " << trial;
      EXPECT_EQ(ours[i].death, oracle[i].death) << "trial " << trial;
    }
  }
}

TEST(Barcodes, PairingCompleteness) {
  RngStream stream(47);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 4 + static_cast<int>(stream.uniform_index(5));  // 4..8 points
    Eigen::MatrixXd points(m, 3);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < 3; ++j) points(i, j) = stream.next_real();
    const Filtration filtration = rips_filtration(points, 1.1, 3);
    const PersistencePairing pairing = persistence_pairs(filtration);
    EXPECT_EQ(2 * pairing.pairs.size() + pairing.essential.size(),
              filtration.simplices.size());
  }
}

TEST(Outlierness, CollinearPointsHaveNoCycles) {
  Eigen::MatrixXd points(3, 2);
  points << 0, 0, 0.1, 0, 0.2, 0;
  EXPECT_DOUBLE_EQ(ph_outlierness(points, 3.0, OutliernessMode::Restricted), 0.0);
}

TEST(Outlierness, SquareCycleLength) {
  EXPECT_NEAR(ph_outlierness(unit_square(), 3.0, OutliernessMode::Restricted),
              std::sqrt(2.0) - 1.0, 1e-12);
}

TEST(Outlierness, EssentialComponentCappedAtDelta) {
  Eigen::MatrixXd points(2, 2);
  points << 0, 0, 100, 0;
  EXPECT_DOUBLE_EQ(
      ph_outlierness(points, 3.0, OutliernessMode::Multidimensional), 3.0);
}

TEST(Outlierness, MultidimensionalDominatesRestricted) {
  RngStream stream(61);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd points(6, 2);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 2; ++j) points(i, j) = stream.next_real();
    const double multi =
        ph_outlierness(points, 2.0, OutliernessMode::Multidimensional);
    const double restricted =
        ph_outlierness(points, 2.0, OutliernessMode::Restricted);
    EXPECT_GE(multi, restricted - 1e-15);
  }
}
