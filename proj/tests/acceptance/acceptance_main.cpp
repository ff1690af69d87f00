// Release gate. Each numbered check prints one PASS/FAIL line; the process
// exits with the number of failures. Checks 1-7 and 9-11 are self-contained;
// check 8 needs the public Dry Bean CSV (DATARED_DRY_BEAN_CSV or
// data/dry_bean.csv) and reports an honest failure when it is missing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <vector>

#include <json.hpp>

#include "datared/dataset.hpp"
#include "datared/metrics.hpp"
#include "datared/nn.hpp"
#include "datared/persistence.hpp"
#include "datared/pipeline.hpp"
#include "datared/reducers.hpp"
#include "datared/rng.hpp"
#include "datared/scaling.hpp"
#include "support/oracles.hpp"
#include "support/persistence_oracle.hpp"
#include "support/synth.hpp"

namespace {

using namespace datared;
using nlohmann::json;

struct Verdict {
  bool ok = false;
  std::string note;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

// --------------------------------------------------------------------------
// 1. size contracts, every method x ratio on randomized datasets

// Scripted per-epoch feedback so FES runs without real training.
class HashOracle final : public EpochOracle {
 public:
  std::vector<std::uint8_t> train_epoch(const LabeledDataset& data) override {
    ++epoch_;
    std::vector<std::uint8_t> correct(static_cast<std::size_t>(data.size()));
    for (Index i = 0; i < data.size(); ++i) {
      const std::uint64_t h = detail::splitmix64(
          static_cast<std::uint64_t>(i) * 2654435761u + 977u * epoch_);
      correct[static_cast<std::size_t>(i)] = (h >> 17) & 1;
    }
    return correct;
  }

 private:
  std::uint64_t epoch_ = 0;
};

// Distance at which a typical point sees about `target` neighbors: the
// target/n quantile of sampled pairwise distances. Keeps PHL neighborhoods
// small whatever the dimension.
double neighbor_distance(const Eigen::MatrixXd& points, double target,
                         RngStream& stream) {
  const Index n = points.rows();
  const Index m = std::min<Index>(n, 120);
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < m; ++i) {
    const Index j =
        i + static_cast<Index>(stream.uniform_index(
                static_cast<std::size_t>(n - i)));
    std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
  }
  std::vector<double> distances;
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      distances.push_back(
          (points.row(rows[static_cast<std::size_t>(i)]) -
           points.row(rows[static_cast<std::size_t>(j)]))
              .norm());
  std::sort(distances.begin(), distances.end());
  const double q = std::min(1.0, target / static_cast<double>(n));
  const auto pick = static_cast<std::size_t>(
      q * static_cast<double>(distances.size() - 1));
  const double d = distances[pick];
  return d > 0.0 ? d : 0.1;
}

Verdict check_size_contracts() {
  const auto start = std::chrono::steady_clock::now();
  const ReductionMethod methods[] = {
      ReductionMethod::Srs, ReductionMethod::Prd, ReductionMethod::Clc,
      ReductionMethod::Rkm, ReductionMethod::Mms, ReductionMethod::Des,
      ReductionMethod::Phl, ReductionMethod::Nrmd, ReductionMethod::Fes};
  long long checked = 0;
  for (int t = 0; t < 100; ++t) {
    // Cubic ramp: mostly small datasets, and t = 99 lands exactly on 500.
    const double ramp = static_cast<double>(t) / 99.0;
    const int n = 20 + static_cast<int>(std::llround(480.0 * ramp * ramp * ramp));
    const int d = 1 + t % 10;
    const int c = 1 + t % 5;
    const LabeledDataset data =
        testsupport::uniform_dataset(n, d, c, 1000 + static_cast<std::uint64_t>(t));
    RngStream delta_stream(derive_seed(31, "acceptance/delta/" + std::to_string(t)));
    const double delta = neighbor_distance(data.examples, 10.0, delta_stream);
    for (int r = 1; r <= 9; ++r) {
      const double p = static_cast<double>(r) / 10.0;
      for (ReductionMethod method : methods) {
        ReductionRequest request;
        request.method = method;
        request.ratio = p;
        request.seed = static_cast<std::uint64_t>(97 * t + r);
        request.params.phl_delta = delta;
        request.params.fes_initial_epochs = 2;
        request.params.fes_total_epochs = 3;
        HashOracle oracle;
        const ReducedDataset reduced = reduce(data, request, &oracle);

        Index expected = 0;
        if (method == ReductionMethod::Rkm || method == ReductionMethod::Des ||
            method == ReductionMethod::Nrmd) {
          expected = static_cast<Index>(
              std::floor(p * static_cast<double>(data.size())));
        } else {
          for (const auto& members : data.class_members)
            expected += static_cast<Index>(
                std::floor(p * static_cast<double>(members.size())));
        }
        if (reduced.data.size() != expected)
          return {false, method_key(method) + " at p=" + fmt(p) + " on N=" +
                             std::to_string(n) + "/c=" + std::to_string(c) +
                             " gave " + std::to_string(reduced.data.size()) +
                             " rows, contract says " + std::to_string(expected)};
        ++checked;
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 300.0)
    return {false, std::to_string(checked) + " reductions correct but took " +
                       fmt(elapsed) + " s (budget 300 s)"};
  return {true, std::to_string(checked) + " reductions, sizes exact, " +
                    fmt(elapsed) + " s"};
}

// --------------------------------------------------------------------------
// 2. epsilon against a double-loop oracle

double double_loop_epsilon(const LabeledDataset& full,
                           const LabeledDataset& reduced) {
  double worst = 0.0;
  for (int k = 0; k < full.class_count; ++k) {
    const auto& full_rows = full.class_members[static_cast<std::size_t>(k)];
    const auto& red_rows = reduced.class_members[static_cast<std::size_t>(k)];
    if (full_rows.empty()) continue;
    for (Index i : full_rows) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j : red_rows) {
        double sum = 0.0;
        for (Index col = 0; col < full.feature_count(); ++col) {
          const double diff = full.examples(i, col) - reduced.examples(j, col);
          sum += diff * diff;
        }
        best = std::min(best, std::sqrt(sum));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

Verdict check_epsilon_oracle() {
  double max_diff = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int c = 2 + t % 3;
    std::vector<int> sizes;
    int total = 0;
    for (int k = 0; k < c; ++k) {
      sizes.push_back(10 + (7 * t + 13 * k) % 50);
      total += sizes.back();
    }
    if (total > 200) sizes.back() -= total - 200;
    const LabeledDataset full = testsupport::gaussian_blobs(
        c, sizes, 2 + t % 4, 1.0, 2000 + static_cast<std::uint64_t>(t));

    if (epsilon_representativeness(full, full) != 0.0)
      return {false, "eps(D, D) != 0 on instance " + std::to_string(t)};

    const double ratio = 0.3 + 0.1 * (t % 5);
    const ReducedDataset reduced =
        reduce_srs(full, ratio, static_cast<std::uint64_t>(t));
    const double lib = epsilon_representativeness(full, reduced.data);
    const double oracle = double_loop_epsilon(full, reduced.data);
    max_diff = std::max(max_diff, std::abs(lib - oracle));
    if (std::abs(lib - oracle) > 1e-12)
      return {false, "instance " + std::to_string(t) + ": library " +
                         fmt(lib) + " vs oracle " + fmt(oracle)};
  }
  return {true, "50 instances, eps(D,D)=0, max |library - oracle| = " +
                    fmt(max_diff)};
}

// --------------------------------------------------------------------------
// 3. persistence barcodes against naive boundary reduction

std::vector<testsupport::OracleInterval> flatten(const Barcode& barcode) {
  std::vector<testsupport::OracleInterval> intervals;
  for (int dim = 0; dim <= 2; ++dim)
    for (const PersistenceInterval& bar :
         barcode.dims[static_cast<std::size_t>(dim)])
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

Verdict check_persistence_oracle() {
  RngStream stream(derive_seed(8, "acceptance/persistence"));
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3 + static_cast<int>(stream.uniform_index(5));
    Eigen::MatrixXd points(m, 2);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < 2; ++j) points(i, j) = stream.next_real() * 2.0;
    const double scale = 0.5 + stream.next_real() * 2.0;
    const auto ours = flatten(barcodes(rips_filtration(points, scale, 3)));
    const auto oracle = testsupport::naive_persistence(points, scale, 3);
    if (ours.size() != oracle.size())
      return {false, "trial " + std::to_string(trial) + ": " +
                         std::to_string(ours.size()) + " bars vs oracle " +
                         std::to_string(oracle.size())};
    for (std::size_t i = 0; i < ours.size(); ++i)
      if (ours[i].dim != oracle[i].dim || ours[i].birth != oracle[i].birth ||
          ours[i].death != oracle[i].death)
        return {false, "trial " + std::to_string(trial) + ": bar " +
                           std::to_string(i) + " differs from the oracle"};
  }

  Eigen::MatrixXd square(4, 2);
  square << 0, 0, 1, 0, 1, 1, 0, 1;
  const Barcode barcode = barcodes(rips_filtration(square, 2.0, 2));
  const auto& h1 = barcode.dims[1];
  if (h1.size() != 1)
    return {false, "unit square: expected one H1 bar, got " +
                       std::to_string(h1.size())};
  if (std::abs(h1[0].birth - 1.0) > 1e-9 ||
      std::abs(h1[0].death - std::sqrt(2.0)) > 1e-9)
    return {false, "unit square H1 = [" + fmt(h1[0].birth) + ", " +
                       fmt(h1[0].death) + "), expected [1, sqrt(2))"};
  return {true, "100 random clouds exact, unit square H1 = [1, sqrt 2)"};
}

// --------------------------------------------------------------------------
// 4. ProtoDash greedy quality vs the exhaustive optimum

Verdict check_protodash_quality() {
  const double bound = 1.0 - 1.0 / std::exp(1.0);
  double worst_ratio = 1.0;
  for (int t = 0; t < 30; ++t) {
    RngStream stream(derive_seed(4, "acceptance/prd/" + std::to_string(t)));
    const int d = 2 + t % 3;
    Eigen::MatrixXd points(8, d);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < d; ++j) points(i, j) = stream.next_real();

    std::vector<double> history;
    const std::vector<Index> picked = protodash_select(points, 3, 1.0, &history);
    for (std::size_t s = 1; s < history.size(); ++s)
      if (history[s] < history[s - 1] - 1e-9)
        return {false, "objective decreased at step " + std::to_string(s) +
                           " of trial " + std::to_string(t)};

    const Eigen::MatrixXd kernel = rbf_kernel(points, 1.0);
    const Eigen::VectorXd mu = kernel.rowwise().mean();
    const double greedy = testsupport::active_set_qp_max(mu, kernel, picked);

    double optimum = 0.0;
    for (int a = 0; a < 8; ++a)
      for (int b = a + 1; b < 8; ++b)
        for (int c = b + 1; c < 8; ++c)
          optimum = std::max(
              optimum, testsupport::active_set_qp_max(mu, kernel, {a, b, c}));

    if (greedy < bound * optimum - 1e-12)
      return {false, "trial " + std::to_string(t) + ": greedy " + fmt(greedy) +
                         " < (1 - 1/e) x optimum " + fmt(bound * optimum)};
    if (optimum > 0.0) worst_ratio = std::min(worst_ratio, greedy / optimum);
  }
  return {true, "30 classes, worst greedy/optimum = " + fmt(worst_ratio) +
                    " (bound " + fmt(bound) + "), objective nondecreasing"};
}

// --------------------------------------------------------------------------
// 5. MLP gradients vs central finite differences

Verdict check_gradients() {
  double worst = 0.0;
  for (int loss_case = 0; loss_case < 2; ++loss_case) {
    const bool bce = loss_case == 0;
    for (int t = 0; t < 20; ++t) {
      RngStream stream(derive_seed(5, "acceptance/grad/" +
                                          std::to_string(loss_case) + "/" +
                                          std::to_string(t)));
      const int features = 2 + static_cast<int>(stream.uniform_index(4));
      const int hidden = 2 + static_cast<int>(stream.uniform_index(5));
      const int classes = bce ? 2 : 3 + static_cast<int>(stream.uniform_index(3));

      MlpConfig config;
      config.layer_dims = {features, hidden, bce ? 1 : classes};
      config.activations = {stream.next_real() < 0.5 ? Activation::Relu
                                                     : Activation::Sigmoid,
                            bce ? Activation::Sigmoid : Activation::Softmax};
      config.loss = bce ? LossKind::Bce : LossKind::WeightedCce;
      config.seed = static_cast<std::uint64_t>(100 * loss_case + t);
      Mlp model(config);

      const Index batch = 6;
      Eigen::MatrixXd x(batch, features);
      std::vector<int> labels(static_cast<std::size_t>(batch));
      for (Index i = 0; i < batch; ++i) {
        for (Index j = 0; j < features; ++j) x(i, j) = 2.0 * stream.next_real() - 1.0;
        labels[static_cast<std::size_t>(i)] =
            static_cast<int>(stream.uniform_index(static_cast<std::size_t>(classes)));
      }
      Eigen::VectorXd weights(classes);
      for (int k = 0; k < classes; ++k) weights(k) = bce ? 1.0 : 1.0 + 0.5 * k;

      const auto [loss, grad] = loss_and_gradient(model, x, labels, weights);
      (void)loss;
      const Eigen::VectorXd theta = model.parameters();
      Eigen::VectorXd fd(theta.size());
      const double h = 1e-5;
      Mlp probe = model;
      for (Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd shifted = theta;
        shifted(i) = theta(i) + h;
        probe.set_parameters(shifted);
        const double up = loss_and_gradient(probe, x, labels, weights).first;
        shifted(i) = theta(i) - h;
        probe.set_parameters(shifted);
        const double down = loss_and_gradient(probe, x, labels, weights).first;
        fd(i) = (up - down) / (2.0 * h);
      }
      const double denom = std::max({grad.norm(), fd.norm(), 1e-12});
      const double rel = (grad - fd).norm() / denom;
      worst = std::max(worst, rel);
      if (rel >= 1e-4)
        return {false, std::string(bce ? "bce" : "weighted cce") + " net " +
                           std::to_string(t) + ": relative error " + fmt(rel)};
    }
  }
  return {true, "40 networks (20 per loss), worst relative error " + fmt(worst)};
}

// --------------------------------------------------------------------------
// 6. FES forgetting counts on a scripted trajectory

// Phase-one feedback comes from a fixed table; phase two (on the reduced
// set) reports everything correct.
class TableOracle final : public EpochOracle {
 public:
  explicit TableOracle(std::vector<std::vector<std::uint8_t>> table)
      : table_(std::move(table)) {}

  std::vector<std::uint8_t> train_epoch(const LabeledDataset& data) override {
    if (next_ < table_.size() &&
        data.size() == static_cast<Index>(table_[next_].size()))
      return table_[next_++];
    return std::vector<std::uint8_t>(static_cast<std::size_t>(data.size()), 1);
  }

 private:
  std::vector<std::vector<std::uint8_t>> table_;
  std::size_t next_ = 0;
};

Verdict check_fes_trace() {
  // Three one-class examples over four counted epochs:
  //   example 0 correct throughout            -> f = 0
  //   example 1 forgotten once (epoch 2)      -> f = 1
  //   example 2 never correct                 -> f = INF
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 2.0;
  const LabeledDataset data =
      LabeledDataset::create(std::move(x), {0, 0, 0}, 1);

  {
    TableOracle oracle({{1, 1, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 0}});
    const ReducedDataset all = reduce_fes(data, 1.0, oracle, 4, 5, 0);
    const std::vector<Index> expected{2, 1, 0};  // descending f, INF first
    if (!all.selected_indices || *all.selected_indices != expected)
      return {false, "ranking differs from f = (0, 1, INF)"};
  }
  {
    TableOracle oracle({{1, 1, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 0}});
    const ReducedDataset one = reduce_fes(data, 1.0 / 3.0, oracle, 4, 5, 0);
    if (!one.selected_indices || *one.selected_indices != std::vector<Index>{2})
      return {false, "keeping one example did not pick the never-learned one"};
  }
  {
    // INF must outrank any finite count: f = (2, INF).
    Eigen::MatrixXd pair(2, 1);
    pair << 0.0, 1.0;
    const LabeledDataset two =
        LabeledDataset::create(std::move(pair), {0, 0}, 1);
    TableOracle oracle({{1, 0}, {0, 0}, {1, 0}, {0, 0}});
    const ReducedDataset half = reduce_fes(two, 0.5, oracle, 4, 5, 0);
    if (!half.selected_indices ||
        *half.selected_indices != std::vector<Index>{1})
      return {false, "f = INF did not outrank f = 2"};
  }
  return {true, "scripted trajectory reproduces f = (0, 1, INF) and INF > finite"};
}

// --------------------------------------------------------------------------
// 7. metrics arithmetic on a hand-derived confusion matrix

Verdict check_metrics_arithmetic() {
  const ConfusionMatrix cm = confusion({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
  if (cm.counts(0, 0) != 1 || cm.counts(0, 1) != 1 || cm.counts(1, 0) != 0 ||
      cm.counts(1, 1) != 2)
    return {false, "confusion tally is not [[1,1],[0,2]]"};
  const PerformanceSummary perf = performance_summary(cm);
  const struct {
    const char* name;
    double got;
    double want;
  } cases[] = {
      {"accuracy", perf.accuracy, 0.75},
      {"macro precision", perf.macro_precision, 5.0 / 6.0},
      {"macro recall", perf.macro_recall, 0.75},
      {"macro f1", perf.macro_f1, 11.0 / 15.0},
  };
  for (const auto& c : cases)
    if (std::abs(c.got - c.want) > 1e-12)
      return {false, std::string(c.name) + " = " + fmt(c.got) + ", expected " +
                         fmt(c.want)};
  return {true, "Acc 0.75, MAPre 5/6, MARec 0.75, MAF1 11/15 within 1e-12"};
}

// --------------------------------------------------------------------------
// 8. Dry Bean desk-scale run

bool file_exists(const std::string& path) {
  struct stat buffer {};
  return ::stat(path.c_str(), &buffer) == 0;
}

std::string dry_bean_path() {
  if (const char* env = std::getenv("DATARED_DRY_BEAN_CSV")) return env;
  const std::string local = std::string(DATARED_SOURCE_DIR) + "/data/dry_bean.csv";
  if (file_exists(local)) return local;
  return "data/dry_bean.csv";
}

Verdict check_dry_bean() {
  const auto start = std::chrono::steady_clock::now();
  const std::string path = dry_bean_path();
  if (!file_exists(path))
    return {false,
            "dataset not found: set DATARED_DRY_BEAN_CSV or place the public "
            "Dry Bean CSV at data/dry_bean.csv (13,611 rows, label column "
            "'Class'); this check cannot run without it"};

  ExperimentConfig config;
  config.dataset_path = path;
  config.label_column = "Class";
  config.epochs = 30;
  config.iterations = 3;
  config.seed = 1;
  config.threads = 4;
  config.methods = {{ReductionMethod::Srs, ReductionParams{}}};
  config.ratios = {0.2, 0.5, 0.8};

  const ExperimentResults results = run_experiment_from_file(config);
  if (!results.failures.empty())
    return {false, std::to_string(results.failures.size()) +
                       " cells failed; first: " + results.failures[0].message};
  const json med = median_summary(results);
  const double base_acc = med.at("srs").at("1.0").at("acc").get<double>();
  const double srs_acc = med.at("srs").at("0.5").at("acc").get<double>();
  const double t02 = med.at("srs").at("0.2").at("time").get<double>();
  const double t08 = med.at("srs").at("0.8").at("time").get<double>();
  const double t10 = med.at("srs").at("1.0").at("time").get<double>();
  const double elapsed = seconds_since(start);

  if (base_acc < 0.85)
    return {false, "baseline accuracy " + fmt(base_acc) + " < 0.85"};
  if (srs_acc < base_acc - 0.05)
    return {false, "srs at p=0.5 lost " + fmt(base_acc - srs_acc) +
                       " accuracy (allowed 0.05)"};
  if (!(t02 < t08 && t08 < t10))
    return {false, "median times not ordered: p=0.2 " + fmt(t02) + ", p=0.8 " +
                       fmt(t08) + ", baseline " + fmt(t10)};
  if (elapsed >= 1800.0)
    return {false, "run took " + fmt(elapsed) + " s (budget 1800 s)"};
  return {true, "baseline acc " + fmt(base_acc) + ", srs@0.5 acc " +
                    fmt(srs_acc) + ", times " + fmt(t02) + " < " + fmt(t08) +
                    " < " + fmt(t10) + " s, total " + fmt(elapsed) + " s"};
}

// --------------------------------------------------------------------------
// 9. MMS preserves representativeness at least as well as SRS

Verdict check_mms_dominance() {
  int wins = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const LabeledDataset data = testsupport::gaussian_blobs(
        3, {30, 25, 20}, 3, 1.0, 9000 + static_cast<std::uint64_t>(t));
    const std::uint64_t seed = static_cast<std::uint64_t>(t);
    const ReducedDataset mms = reduce_mms(data, 0.3, seed);
    const ReducedDataset srs = reduce_srs(data, 0.3, seed);
    const double eps_mms = epsilon_representativeness(data, mms.data);
    const double eps_srs = epsilon_representativeness(data, srs.data);
    if (eps_mms <= eps_srs) ++wins;
  }
  if (wins < 45)
    return {false, "mms won only " + std::to_string(wins) + "/50 trials (need 45)"};
  return {true, "eps(MMS) <= eps(SRS) in " + std::to_string(wins) + "/50 trials"};
}

// --------------------------------------------------------------------------
// 10. benchmark determinism across reruns and thread counts

json stripped_results(const LabeledDataset& data, ExperimentConfig config,
                      int threads) {
  config.threads = threads;
  json doc = results_to_json(run_experiment(data, config));
  for (auto& [iteration, methods] : doc.at("results").items())
    for (auto& [method, ratios] : methods.items())
      for (auto& [ratio, leaf] : ratios.items()) {
        leaf.erase("time");
        leaf.erase("carbon");
      }
  return json{{"results", doc.at("results")}, {"errors", doc.at("errors")}};
}

Verdict check_determinism() {
  const LabeledDataset data =
      testsupport::gaussian_blobs(2, {32, 28}, 3, 0.8, 5);

  ExperimentConfig config;
  config.dataset_path = "(in memory)";
  config.label_column = "label";
  config.hidden_dims = {8};
  config.dropout_rate = 0.2;
  config.epochs = 4;
  config.batch_size = 16;
  config.iterations = 2;
  config.seed = 77;
  config.ratios = {0.3, 0.6};
  ReductionParams phl;
  phl.phl_delta = 0.5;
  ReductionParams fes;
  fes.fes_initial_epochs = 2;
  config.methods = {{ReductionMethod::Srs, {}},  {ReductionMethod::Prd, {}},
                    {ReductionMethod::Clc, {}},  {ReductionMethod::Rkm, {}},
                    {ReductionMethod::Mms, {}},  {ReductionMethod::Des, {}},
                    {ReductionMethod::Phl, phl}, {ReductionMethod::Nrmd, {}},
                    {ReductionMethod::Fes, fes}};

  const json first = stripped_results(data, config, 1);
  const json second = stripped_results(data, config, 1);
  const json threaded = stripped_results(data, config, 4);
  if (first != second) return {false, "two single-thread runs differ"};
  if (first != threaded) return {false, "1-thread and 4-thread runs differ"};
  return {true, "9 methods x 2 ratios x 2 iterations identical across reruns "
                "and threads {1, 4}"};
}

// --------------------------------------------------------------------------
// 11. carbon model calibration

Verdict check_carbon() {
  const EnergyModel model{110.0, 0.12};
  const double kg = estimate_carbon(60.0, model);
  const double grams = kg * 1000.0;
  if (std::abs(grams - 0.22) > 1e-6)
    return {false, "60 s at 110 W / 0.12 kg per kWh gave " + fmt(grams) +
                       " g, expected 0.22 g"};
  return {true, "60 s at 110 W x 0.12 kg/kWh = " + fmt(grams) + " g"};
}

}  // namespace

int main() {
  const struct {
    int number;
    const char* title;
    std::function<Verdict()> run;
  } checks[] = {
      {1, "size contracts across methods and ratios", check_size_contracts},
      {2, "epsilon-representativeness oracle equivalence", check_epsilon_oracle},
      {3, "persistence barcode oracle equivalence", check_persistence_oracle},
      {4, "ProtoDash greedy quality bound", check_protodash_quality},
      {5, "MLP analytic gradients vs finite differences", check_gradients},
      {6, "FES forgetting-count hand trace", check_fes_trace},
      {7, "metrics arithmetic", check_metrics_arithmetic},
      {8, "Dry Bean desk-scale reproduction", check_dry_bean},
      {9, "MMS representativeness dominance", check_mms_dominance},
      {10, "benchmark determinism", check_determinism},
      {11, "carbon model calibration", check_carbon},
  };

  int failures = 0;
  for (const auto& check : checks) {
    Verdict verdict;
    try {
      verdict = check.run();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    if (!verdict.ok) ++failures;
    std::cout << (verdict.ok ? "PASS" : "FAIL") << "  [" << check.number
              << "] " << check.title;
    if (!verdict.note.empty()) std::cout << ": " << verdict.note;
    std::cout << "\n" << std::flush;
  }
  std::cout << (failures == 0 ? "all checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << "\n";
  return failures;
}
