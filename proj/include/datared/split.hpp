#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "datared/dataset.hpp"
#include "datared/error.hpp"
#include "datared/rng.hpp"

namespace datared {

struct SplitSpec {
  double test_proportion = 0.25;
  std::uint64_t seed = 0;
  // Off by default: plain uniform split. On, each class contributes
  // floor(test_proportion * |class|) test rows.
  bool stratified = false;
};

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<Index> train_indices;  // rows of the source, ascending
  std::vector<Index> test_indices;
};

// Disjoint train/test partition with floor(test_proportion * N) test rows
// (per class when stratified). Both sides must end up non-empty.
inline TrainTestSplit train_test_split(const LabeledDataset& data,
                                       const SplitSpec& spec) {
  if (!(spec.test_proportion > 0.0 && spec.test_proportion < 1.0))
    throw ArgumentError("train_test_split: test_proportion must lie in (0, 1)");
  const Index n = data.size();
  RngStream stream(derive_seed(spec.seed, "split"));

  std::vector<Index> test_rows;
  if (spec.stratified) {
    for (int k = 0; k < data.class_count; ++k) {
      const auto& members = data.class_members[static_cast<std::size_t>(k)];
      const auto take = static_cast<std::size_t>(
          std::floor(spec.test_proportion * static_cast<double>(members.size())));
      const auto picks =
          stream.derived("class/" + std::to_string(k))
              .sample_indices(members.size(), take);
      for (std::size_t p : picks) test_rows.push_back(members[p]);
    }
  } else {
    const auto take = static_cast<std::size_t>(
        std::floor(spec.test_proportion * static_cast<double>(n)));
    const auto picks = stream.sample_indices(static_cast<std::size_t>(n), take);
    for (std::size_t p : picks) test_rows.push_back(static_cast<Index>(p));
  }
  std::sort(test_rows.begin(), test_rows.end());
  if (test_rows.empty())
    throw ArgumentError("train_test_split: test side would be empty");
  if (static_cast<Index>(test_rows.size()) == n)
    throw ArgumentError("train_test_split: train side would be empty");

  std::vector<Index> train_rows;
  train_rows.reserve(static_cast<std::size_t>(n) - test_rows.size());
  std::size_t next_test = 0;
  for (Index i = 0; i < n; ++i) {
    if (next_test < test_rows.size() && test_rows[next_test] == i)
      ++next_test;
    else
      train_rows.push_back(i);
  }

  TrainTestSplit split;
  split.train = subset(data, train_rows);
  split.test = subset(data, test_rows);
  split.train_indices = std::move(train_rows);
  split.test_indices = std::move(test_rows);
  return split;
}

}  // namespace datared
