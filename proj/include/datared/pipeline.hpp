#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "datared/dataset.hpp"
#include "datared/error.hpp"
#include "datared/metrics.hpp"
#include "datared/nn.hpp"
#include "datared/reducers.hpp"
#include "datared/rng.hpp"
#include "datared/scaling.hpp"
#include "datared/split.hpp"

namespace datared {

struct MethodSpec {
  ReductionMethod method = ReductionMethod::Srs;
  ReductionParams params;
};

struct ExperimentConfig {
  std::string dataset_path;
  std::string label_column;

  double test_proportion = 0.25;
  bool stratified_split = false;

  std::vector<int> hidden_dims = {32, 16};
  double dropout_rate = 0.2;
  double learning_rate = 1e-3;
  int epochs = 30;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::Adam;

  int iterations = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<MethodSpec> methods;
  std::vector<double> ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  // Defaults book 0.22 g of CO2 per minute of wall time.
  EnergyModel energy{110.0, 0.12};

  bool has_method(ReductionMethod method) const {
    for (const MethodSpec& spec : methods)
      if (spec.method == method) return true;
    return false;
  }

  const ReductionParams* params_for(ReductionMethod method) const {
    for (const MethodSpec& spec : methods)
      if (spec.method == method) return &spec.params;
    return nullptr;
  }

  // Every problem found, not just the first.
  std::vector<std::string> issues() const {
    std::vector<std::string> found;
    if (dataset_path.empty()) found.push_back("dataset.path: required");
    if (label_column.empty()) found.push_back("dataset.label_column: required");
    if (!(test_proportion > 0.0 && test_proportion < 1.0))
      found.push_back("split.test_proportion: must lie in (0, 1)");
    for (int dim : hidden_dims)
      if (dim < 1) found.push_back("model.hidden_dims: dims must be positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      found.push_back("model.dropout: must lie in [0, 1)");
    if (!(learning_rate > 0.0))
      found.push_back("model.learning_rate: must be positive");
    if (epochs < 1) found.push_back("model.epochs: must be at least 1");
    if (batch_size < 1) found.push_back("model.batch_size: must be positive");
    if (iterations < 1) found.push_back("run.iterations: must be at least 1");
    if (threads < 1) found.push_back("run.threads: must be at least 1");
    if (methods.empty()) found.push_back("run.methods: at least one method");
    for (std::size_t i = 0; i < methods.size(); ++i)
      for (std::size_t j = i + 1; j < methods.size(); ++j)
        if (methods[i].method == methods[j].method) {
          found.push_back(std::string("run.methods: duplicate entry '") +
                          method_name(methods[i].method) + "'");
          break;
        }
    if (ratios.empty()) found.push_back("run.ratios: at least one ratio");
    for (double ratio : ratios) {
      if (!(ratio > 0.0 && ratio < 1.0)) {
        found.push_back(ratio == 1.0
                            ? "run.ratios: 1.0 is reserved for the unreduced "
                              "baseline"
                            : "run.ratios: values must lie in (0, 1)");
        break;
      }
    }
    for (std::size_t i = 0; i < ratios.size(); ++i)
      for (std::size_t j = i + 1; j < ratios.size(); ++j)
        if (ratios[i] == ratios[j]) {
          found.push_back("run.ratios: duplicate entry " +
                          detail::format_double(ratios[i]));
          break;
        }
    if (energy.watts < 0.0) found.push_back("energy.watts: must be nonnegative");
    if (energy.intensity_kg_per_kwh < 0.0)
      found.push_back("energy.intensity: must be nonnegative");
    if (const ReductionParams* fes = params_for(ReductionMethod::Fes)) {
      if (fes->fes_initial_epochs < 1)
        found.push_back("method.fes.initial_epochs: must be at least 1");
      else if (fes->fes_initial_epochs >= epochs)
        found.push_back(
            "method.fes.initial_epochs: must be below model.epochs");
    }
    if (const ReductionParams* phl = params_for(ReductionMethod::Phl))
      if (!(phl->phl_delta > 0.0))
        found.push_back("method.phl.delta: must be positive");
    return found;
  }

  void validate() const {
    std::vector<std::string> found = issues();
    if (!found.empty()) {
      const std::string what = "invalid experiment config (" +
                               std::to_string(found.size()) + " issue(s))";
      throw ConfigError(what, std::move(found));
    }
  }
};

// One benchmark cell. Baseline rows use method "baseline" with ratio 1.0;
// the emitters copy them under every method's "1.0" key.
struct RunRecord {
  int iteration = 0;
  std::string method;
  double ratio = 1.0;

  double time_s = 0.0;
  double carbon_kg = 0.0;
  double epsilon = 0.0;
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;

  // Sub-phase spans and the reduced size, kept for consistency checks; the
  // serialized schema carries only the metric fields above.
  double reduce_s = 0.0;
  double train_s = 0.0;
  Index train_rows = 0;
};

struct CellFailure {
  int iteration = 0;
  std::string method;
  double ratio = 1.0;
  std::string message;
};

struct ExperimentResults {
  ExperimentConfig config;
  int class_count = 0;
  std::vector<RunRecord> records;
  std::vector<CellFailure> failures;
};

// "0.5" stays "0.5"; whole ratios keep one decimal so the baseline key is
// always the literal "1.0".
inline std::string ratio_key(double ratio) {
  std::string key = detail::format_double(ratio);
  if (key.find('.') == std::string::npos &&
      key.find('e') == std::string::npos)
    key += ".0";
  return key;
}

// Adapts the MLP trainer to the per-epoch protocol FES drives: one epoch of
// optimization, then inference-mode correctness on the same set.
class MlpEpochOracle final : public EpochOracle {
 public:
  MlpEpochOracle(const MlpConfig& config, Index feature_count, int class_count)
      : trainer_(config, feature_count, class_count) {}

  std::vector<std::uint8_t> train_epoch(const LabeledDataset& data) override {
    trainer_.run_epoch(data);
    return trainer_.correctness(data);
  }

  MlpTrainer& trainer() { return trainer_; }
  const MlpTrainer& trainer() const { return trainer_; }

 private:
  MlpTrainer trainer_;
};

namespace detail {

inline MlpConfig experiment_mlp_config(const ExperimentConfig& config,
                                       Index feature_count, int class_count,
                                       std::uint64_t seed) {
  MlpConfig mlp = make_classifier_config(feature_count, config.hidden_dims,
                                         class_count, config.dropout_rate);
  mlp.optimizer = config.optimizer;
  mlp.learning_rate = config.learning_rate;
  mlp.epochs = config.epochs;
  mlp.batch_size = config.batch_size;
  mlp.seed = seed;
  return mlp;
}

inline void fill_evaluation(RunRecord& record, const Mlp& model,
                            const LabeledDataset& test) {
  const std::vector<int> predicted = model.predict(test.examples);
  const PerformanceSummary summary =
      performance_summary(confusion(test.labels, predicted, test.class_count));
  record.accuracy = summary.accuracy;
  record.precision = summary.precision;
  record.recall = summary.recall;
  record.f1 = summary.f1;
  record.macro_precision = summary.macro_precision;
  record.macro_recall = summary.macro_recall;
  record.macro_f1 = summary.macro_f1;
}

inline RunRecord run_baseline_cell(const ExperimentConfig& config,
                                   int iteration,
                                   const LabeledDataset& train_set,
                                   const LabeledDataset& test_set) {
  RunRecord record;
  record.iteration = iteration;
  record.method = "baseline";
  record.ratio = 1.0;
  record.epsilon = 0.0;
  const MlpConfig mlp = experiment_mlp_config(
      config, train_set.feature_count(), train_set.class_count,
      derive_seed(config.seed,
                  "iter/" + std::to_string(iteration) + "/baseline"));
  auto [trained, span] = timed([&] { return train(train_set, mlp); });
  record.time_s = span;
  record.train_s = span;
  record.carbon_kg = estimate_carbon(span, config.energy);
  record.train_rows = train_set.size();
  fill_evaluation(record, trained.model, test_set);
  return record;
}

inline RunRecord run_reduction_cell(const ExperimentConfig& config,
                                    int iteration, const MethodSpec& spec,
                                    double ratio,
                                    const LabeledDataset& train_set,
                                    const LabeledDataset& test_set) {
  RunRecord record;
  record.iteration = iteration;
  record.method = method_key(spec.method);
  record.ratio = ratio;

  const std::uint64_t cell_seed =
      derive_seed(config.seed, "iter/" + std::to_string(iteration) + "/cell/" +
                                   record.method + "/" + ratio_key(ratio));
  ReductionRequest request;
  request.method = spec.method;
  request.ratio = ratio;
  request.seed = derive_seed(cell_seed, "reduce");
  request.params = spec.params;
  const MlpConfig mlp = experiment_mlp_config(
      config, train_set.feature_count(), train_set.class_count,
      derive_seed(cell_seed, "train"));

  if (spec.method == ReductionMethod::Fes) {
    // FES trains while it reduces, so the single span covers both phases and
    // the oracle's model is the finished one.
    request.params.fes_total_epochs = config.epochs;
    MlpEpochOracle oracle(mlp, train_set.feature_count(),
                          train_set.class_count);
    auto [reduced, span] =
        timed([&] { return reduce(train_set, request, &oracle); });
    record.time_s = span;
    record.reduce_s = span;
    record.carbon_kg = estimate_carbon(record.time_s, config.energy);
    record.epsilon = epsilon_representativeness(train_set, reduced);
    record.train_rows = reduced.data.size();
    fill_evaluation(record, oracle.trainer().model(), test_set);
    return record;
  }

  auto [reduced, reduce_span] =
      timed([&] { return reduce(train_set, request); });
  record.reduce_s = reduce_span;
  record.epsilon = epsilon_representativeness(train_set, reduced);
  record.train_rows = reduced.data.size();
  auto [trained, train_span] = timed([&] { return train(reduced.data, mlp); });
  record.train_s = train_span;
  record.time_s = reduce_span + train_span;
  record.carbon_kg = estimate_carbon(record.time_s, config.energy);
  fill_evaluation(record, trained.model, test_set);
  return record;
}

}  // namespace detail

using ProgressFn = std::function<void(const std::string&)>;

// Scales, splits per iteration, then runs the baseline and every
// (method, ratio) cell. Cells are independent: each derives its RNG streams
// from (seed, iteration, method, ratio), so results are identical for any
// thread count except the wall-clock fields. A failed cell is recorded and
// skipped, never fatal.
inline ExperimentResults run_experiment(const LabeledDataset& raw,
                                        const ExperimentConfig& config,
                                        const ProgressFn& progress = {}) {
  config.validate();
  const LabeledDataset data = apply_minmax(raw, fit_minmax(raw));

  std::vector<TrainTestSplit> splits;
  splits.reserve(static_cast<std::size_t>(config.iterations));
  for (int i = 0; i < config.iterations; ++i) {
    SplitSpec spec;
    spec.test_proportion = config.test_proportion;
    spec.stratified = config.stratified_split;
    spec.seed = derive_seed(config.seed, "iter/" + std::to_string(i) + "/split");
    splits.push_back(train_test_split(data, spec));
  }

  struct Task {
    int iteration;
    const MethodSpec* spec;  // null for the baseline
    double ratio;
  };
  std::vector<Task> tasks;
  for (int i = 0; i < config.iterations; ++i) {
    tasks.push_back({i, nullptr, 1.0});
    for (const MethodSpec& spec : config.methods)
      for (double ratio : config.ratios) tasks.push_back({i, &spec, ratio});
  }

  std::vector<std::optional<RunRecord>> slots(tasks.size());
  std::vector<std::optional<CellFailure>> failures(tasks.size());
  std::mutex progress_mutex;
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    while (true) {
      const std::size_t at = next.fetch_add(1);
      if (at >= tasks.size()) break;
      const Task& task = tasks[at];
      const LabeledDataset& train_set =
          splits[static_cast<std::size_t>(task.iteration)].train;
      const LabeledDataset& test_set =
          splits[static_cast<std::size_t>(task.iteration)].test;
      const std::string label =
          task.spec ? method_key(task.spec->method) : "baseline";
      try {
        RunRecord record =
            task.spec ? detail::run_reduction_cell(config, task.iteration,
                                                   *task.spec, task.ratio,
                                                   train_set, test_set)
                      : detail::run_baseline_cell(config, task.iteration,
                                                  train_set, test_set);
        if (progress) {
          std::ostringstream line;
          line << "iter " << task.iteration << " " << label << " "
               << ratio_key(task.ratio) << ": acc " << record.accuracy << " ("
               << record.time_s << " s)";
          const std::lock_guard<std::mutex> hold(progress_mutex);
          progress(line.str());
        }
        slots[at] = std::move(record);
      } catch (const std::exception& e) {
        failures[at] = CellFailure{task.iteration, label, task.ratio, e.what()};
        if (progress) {
          const std::lock_guard<std::mutex> hold(progress_mutex);
          progress("iter " + std::to_string(task.iteration) + " " + label +
                   " " + ratio_key(task.ratio) + ": failed: " + e.what());
        }
      }
    }
  };

  const int workers = std::min<int>(config.threads,
                                    static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers > 0 ? workers - 1 : 0));
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& thread : pool) thread.join();

  ExperimentResults results;
  results.config = config;
  results.class_count = data.class_count;
  for (std::size_t at = 0; at < tasks.size(); ++at) {
    if (slots[at]) results.records.push_back(std::move(*slots[at]));
    if (failures[at]) results.failures.push_back(std::move(*failures[at]));
  }
  return results;
}

inline ExperimentResults run_experiment_from_file(
    const ExperimentConfig& config, const ProgressFn& progress = {}) {
  config.validate();
  return run_experiment(load_csv(config.dataset_path, config.label_column),
                        config, progress);
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline nlohmann::json record_leaf(const RunRecord& record) {
  nlohmann::json leaf;
  leaf["time"] = record.time_s;
  leaf["carbon"] = record.carbon_kg;
  leaf["epsilon"] = record.epsilon;
  leaf["acc"] = record.accuracy;
  leaf["pre_k"] = record.precision;
  leaf["rec_k"] = record.recall;
  leaf["f1_k"] = record.f1;
  leaf["pre_avg"] = record.macro_precision;
  leaf["rec_avg"] = record.macro_recall;
  leaf["f1_avg"] = record.macro_f1;
  return leaf;
}

inline nlohmann::json config_json(const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["dataset"] = {{"path", config.dataset_path},
                    {"label_column", config.label_column}};
  doc["split"] = {{"test_proportion", config.test_proportion},
                  {"stratified", config.stratified_split}};
  doc["model"] = {{"hidden_dims", config.hidden_dims},
                  {"dropout", config.dropout_rate},
                  {"learning_rate", config.learning_rate},
                  {"epochs", config.epochs},
                  {"batch_size", config.batch_size},
                  {"optimizer",
                   config.optimizer == OptimizerKind::Sgd ? "sgd" : "adam"}};
  doc["run"] = {{"iterations", config.iterations},
                {"seed", config.seed},
                {"threads", config.threads},
                {"ratios", config.ratios}};
  nlohmann::json methods = nlohmann::json::object();
  for (const MethodSpec& spec : config.methods) {
    nlohmann::json params = nlohmann::json::object();
    switch (spec.method) {
      case ReductionMethod::Prd:
        params["bandwidth"] = spec.params.prd_bandwidth;
        break;
      case ReductionMethod::Des:
        params["base_ratio"] = spec.params.des_p_base;
        break;
      case ReductionMethod::Phl:
        params["delta"] = spec.params.phl_delta;
        params["outlierness"] =
            spec.params.phl_outlierness == OutliernessMode::Restricted
                ? "restricted"
                : "multi";
        params["landmarks"] =
            spec.params.phl_landmarks == PhlLandmarkMode::Representative
                ? "representative"
                : "vital";
        break;
      case ReductionMethod::Nrmd:
        switch (spec.params.nrmd_decomposition) {
          case DecompositionKind::Svd: params["decomposition"] = "svd"; break;
          case DecompositionKind::Qr: params["decomposition"] = "qr"; break;
          case DecompositionKind::Plu: params["decomposition"] = "plu"; break;
          case DecompositionKind::Nmf: params["decomposition"] = "nmf"; break;
        }
        break;
      case ReductionMethod::Fes:
        params["initial_epochs"] = spec.params.fes_initial_epochs;
        break;
      default:
        break;
    }
    methods[method_key(spec.method)] = params;
  }
  doc["methods"] = methods;
  doc["energy"] = {{"watts", config.energy.watts},
                   {"intensity", config.energy.intensity_kg_per_kwh}};
  return doc;
}

}  // namespace detail

// iteration -> method -> ratio -> metrics, with the per-iteration baseline
// copied under every method's "1.0" key.
inline nlohmann::json results_to_json(const ExperimentResults& results) {
  nlohmann::json nested = nlohmann::json::object();
  for (const RunRecord& record : results.records) {
    const std::string iter = std::to_string(record.iteration);
    const nlohmann::json leaf = detail::record_leaf(record);
    if (record.method == "baseline") {
      for (const MethodSpec& spec : results.config.methods)
        nested[iter][method_key(spec.method)]["1.0"] = leaf;
    } else {
      nested[iter][record.method][ratio_key(record.ratio)] = leaf;
    }
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const CellFailure& failure : results.failures)
    errors.push_back({{"iteration", failure.iteration},
                      {"method", failure.method},
                      {"ratio", ratio_key(failure.ratio)},
                      {"message", failure.message}});
  return nlohmann::json{{"config", detail::config_json(results.config)},
                        {"results", nested},
                        {"errors", errors}};
}

// method -> ratio -> metrics, elementwise median across iterations. An even
// count takes the mean of the two middle values. Cells with no surviving
// iteration are omitted.
inline nlohmann::json median_summary(const ExperimentResults& results) {
  const auto median_of = [](std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid]
                                  : 0.5 * (values[mid - 1] + values[mid]);
  };

  std::map<std::string, std::map<std::string, std::vector<const RunRecord*>>>
      cells;
  for (const RunRecord& record : results.records) {
    if (record.method == "baseline") {
      for (const MethodSpec& spec : results.config.methods)
        cells[method_key(spec.method)]["1.0"].push_back(&record);
    } else {
      cells[record.method][ratio_key(record.ratio)].push_back(&record);
    }
  }

  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [method, by_ratio] : cells) {
    for (const auto& [ratio, records] : by_ratio) {
      if (records.empty()) continue;
      const auto field_median = [&](auto&& get) {
        std::vector<double> values;
        values.reserve(records.size());
        for (const RunRecord* record : records) values.push_back(get(*record));
        return median_of(std::move(values));
      };
      nlohmann::json leaf;
      leaf["time"] = field_median([](const RunRecord& r) { return r.time_s; });
      leaf["carbon"] =
          field_median([](const RunRecord& r) { return r.carbon_kg; });
      leaf["epsilon"] =
          field_median([](const RunRecord& r) { return r.epsilon; });
      leaf["acc"] = field_median([](const RunRecord& r) { return r.accuracy; });
      const std::size_t classes = records.front()->precision.size();
      std::vector<double> pre_k, rec_k, f1_k;
      for (std::size_t k = 0; k < classes; ++k) {
        pre_k.push_back(field_median(
            [k](const RunRecord& r) { return r.precision[k]; }));
        rec_k.push_back(
            field_median([k](const RunRecord& r) { return r.recall[k]; }));
        f1_k.push_back(
            field_median([k](const RunRecord& r) { return r.f1[k]; }));
      }
      leaf["pre_k"] = pre_k;
      leaf["rec_k"] = rec_k;
      leaf["f1_k"] = f1_k;
      leaf["pre_avg"] =
          field_median([](const RunRecord& r) { return r.macro_precision; });
      leaf["rec_avg"] =
          field_median([](const RunRecord& r) { return r.macro_recall; });
      leaf["f1_avg"] =
          field_median([](const RunRecord& r) { return r.macro_f1; });
      doc[method][ratio] = leaf;
    }
  }
  return doc;
}

// One row per record for plotting tools; baseline rows keep the literal
// method name "baseline".
inline std::string results_to_csv(const ExperimentResults& results) {
  std::ostringstream out;
  out << "iteration,method,ratio,time,carbon,epsilon,acc,pre_avg,rec_avg,"
         "f1_avg";
  for (int k = 0; k < results.class_count; ++k) out << ",pre_" << k;
  for (int k = 0; k < results.class_count; ++k) out << ",rec_" << k;
  for (int k = 0; k < results.class_count; ++k) out << ",f1_" << k;
  out << "\n";
  for (const RunRecord& record : results.records) {
    out << record.iteration << "," << record.method << ","
        << ratio_key(record.ratio) << "," << detail::format_double(record.time_s)
        << "," << detail::format_double(record.carbon_kg) << ","
        << detail::format_double(record.epsilon) << ","
        << detail::format_double(record.accuracy) << ","
        << detail::format_double(record.macro_precision) << ","
        << detail::format_double(record.macro_recall) << ","
        << detail::format_double(record.macro_f1);
    for (const std::vector<double>* block :
         {&record.precision, &record.recall, &record.f1})
      for (const double value : *block)
        out << "," << detail::format_double(value);
    out << "\n";
  }
  return out.str();
}

}  // namespace datared
