// Command line front end. Four subcommands: reduce, epsilon, metrics and
// benchmark. Standard output carries exactly one JSON document per
// successful run; progress lines and warnings go to stderr so output stays
// pipeable. Exit codes: 0 on success, 2 for bad invocations (flags, schema
// or config problems), 1 for runtime failures.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "datared/config.hpp"
#include "datared/dataset.hpp"
#include "datared/metrics.hpp"
#include "datared/pipeline.hpp"
#include "datared/reducers.hpp"
#include "datared/scaling.hpp"

namespace {

using nlohmann::json;

// Files written by `reduce` carry a __source_index bookkeeping column; drop
// it when present so they load back as plain datasets.
datared::LabeledDataset load_dataset(const std::string& path,
                                     const std::string& label_column) {
  std::ifstream probe(path);
  std::string header_line;
  if (probe && std::getline(probe, header_line)) {
    for (const std::string& cell : datared::detail::split_csv_line(header_line))
      if (datared::detail::trim(cell) == "__source_index")
        return datared::load_csv(path, label_column, {"__source_index"});
  }
  return datared::load_csv(path, label_column);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out)
    throw datared::ArgumentError("cannot open '" + path + "' for writing");
  out << content;
}

void emit(const json& document) { std::cout << document.dump(2) << "\n"; }

struct ReduceArgs {
  std::string input;
  std::string label_column;
  std::string output;
  std::string method;
  double ratio = 0.5;
  std::uint64_t seed = 0;
  bool scale = false;
  double bandwidth = 0.0;
  double base_ratio = -1.0;
  double delta = 0.0;
  std::string outlierness = "restricted";
  std::string landmarks = "representative";
  std::string decomposition = "svd";
};

int run_reduce(const ReduceArgs& args) {
  const datared::ReductionMethod method = datared::parse_method(args.method);
  if (method == datared::ReductionMethod::Fes)
    throw datared::ArgumentError(
        "fes selects by training-time forgetting counts and needs the "
        "benchmark pipeline; use the benchmark subcommand");

  datared::ReductionRequest request;
  request.method = method;
  request.ratio = args.ratio;
  request.seed = args.seed;
  request.params.prd_bandwidth = args.bandwidth;
  request.params.des_p_base = args.base_ratio;
  request.params.phl_delta = args.delta;
  request.params.phl_outlierness = args.outlierness == "multi"
                                       ? datared::OutliernessMode::Multidimensional
                                       : datared::OutliernessMode::Restricted;
  request.params.phl_landmarks = args.landmarks == "vital"
                                     ? datared::PhlLandmarkMode::Vital
                                     : datared::PhlLandmarkMode::Representative;
  if (args.decomposition == "qr")
    request.params.nrmd_decomposition = datared::DecompositionKind::Qr;
  else if (args.decomposition == "plu")
    request.params.nrmd_decomposition = datared::DecompositionKind::Plu;
  else if (args.decomposition == "nmf")
    request.params.nrmd_decomposition = datared::DecompositionKind::Nmf;
  else
    request.params.nrmd_decomposition = datared::DecompositionKind::Svd;

  const datared::LabeledDataset raw = load_dataset(args.input, args.label_column);

  datared::ScalingParams scaling;
  datared::LabeledDataset working = raw;
  if (args.scale) {
    scaling = datared::fit_minmax(raw);
    working = datared::apply_minmax(raw, scaling);
  }

  const auto [reduced, elapsed] =
      datared::timed([&] { return datared::reduce(working, request); });
  for (const std::string& warning : reduced.warnings)
    std::cerr << "warning: " << warning << "\n";

  // The output file keeps original units. Index-backed selections copy the
  // source rows; CLC centroids are synthetic, so map them back instead.
  datared::LabeledDataset out = reduced.data;
  if (args.scale) {
    if (reduced.selected_indices)
      out = datared::subset(raw, *reduced.selected_indices);
    else
      out.examples = datared::invert_minmax(out.examples, scaling);
  }
  datared::save_csv(out, args.output, reduced.selected_indices);

  json summary = {
      {"n_in", raw.size()},
      {"n_out", out.size()},
      {"elapsed_s", elapsed},
  };
  try {
    summary["epsilon"] = datared::epsilon_representativeness(raw, out);
  } catch (const datared::CoverageError& e) {
    std::cerr << "warning: " << e.what() << "\n";
    summary["epsilon"] = nullptr;
  }
  emit(summary);
  return 0;
}

struct EpsilonArgs {
  std::string full;
  std::string reduced;
  std::string label_column;
};

// Class ids follow row order within each file, so two files can number the
// same classes differently. Rewrites `reduced` into `full`'s vocabulary.
datared::LabeledDataset align_classes(const datared::LabeledDataset& full,
                                      datared::LabeledDataset reduced) {
  std::unordered_map<std::string, int> full_ids;
  for (std::size_t k = 0; k < full.label_names.size(); ++k)
    full_ids.emplace(full.label_names[k], static_cast<int>(k));
  for (int& label : reduced.labels) {
    const std::string& text =
        reduced.label_names[static_cast<std::size_t>(label)];
    const auto it = full_ids.find(text);
    if (it == full_ids.end())
      throw datared::SchemaError("epsilon: reduced set has label '" + text +
                                 "' absent from the full set");
    label = it->second;
  }
  reduced.class_count = full.class_count;
  reduced.label_names = full.label_names;
  reduced.rebuild_class_members();
  return reduced;
}

int run_epsilon(const EpsilonArgs& args) {
  const datared::LabeledDataset full = load_dataset(args.full, args.label_column);
  const datared::LabeledDataset reduced = align_classes(
      full, load_dataset(args.reduced, args.label_column));
  emit({{"epsilon", datared::epsilon_representativeness(full, reduced)}});
  return 0;
}

struct MetricsArgs {
  std::string input;
  std::string actual_column = "actual";
  std::string predicted_column = "predicted";
};

int run_metrics(const MetricsArgs& args) {
  std::ifstream in(args.input);
  if (!in)
    throw datared::ArgumentError("cannot open pairs file '" + args.input + "'");
  std::string line;
  if (!std::getline(in, line))
    throw datared::ParseError(args.input + ": empty file");

  const std::vector<std::string> header = datared::detail::split_csv_line(line);
  int actual_col = -1;
  int predicted_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name{datared::detail::trim(header[j])};
    if (name == args.actual_column) actual_col = static_cast<int>(j);
    if (name == args.predicted_column) predicted_col = static_cast<int>(j);
  }
  if (actual_col < 0)
    throw datared::SchemaError("column '" + args.actual_column +
                               "' not present in " + args.input);
  if (predicted_col < 0)
    throw datared::SchemaError("column '" + args.predicted_column +
                               "' not present in " + args.input);

  // Class ids follow first appearance so the per-class arrays line up with
  // the emitted label list whatever the labels are called.
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> ids;
  const auto id_of = [&](const std::string& name) {
    const auto [it, inserted] =
        ids.emplace(name, static_cast<int>(labels.size()));
    if (inserted) labels.push_back(name);
    return it->second;
  };

  std::vector<int> actual;
  std::vector<int> predicted;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (datared::detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = datared::detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw datared::ParseError(args.input + ":" + std::to_string(line_no) +
                                ": expected " + std::to_string(header.size()) +
                                " cells, got " + std::to_string(cells.size()));
    actual.push_back(id_of(std::string{
        datared::detail::trim(cells[static_cast<std::size_t>(actual_col)])}));
    predicted.push_back(id_of(std::string{
        datared::detail::trim(cells[static_cast<std::size_t>(predicted_col)])}));
  }
  if (actual.empty())
    throw datared::ParseError(args.input + ": no data rows");

  const datared::ConfusionMatrix cm =
      datared::confusion(actual, predicted, static_cast<int>(labels.size()));
  const datared::PerformanceSummary perf = datared::performance_summary(cm);
  emit({
      {"labels", labels},
      {"acc", perf.accuracy},
      {"pre_k", perf.precision},
      {"rec_k", perf.recall},
      {"f1_k", perf.f1},
      {"pre_avg", perf.macro_precision},
      {"rec_avg", perf.macro_recall},
      {"f1_avg", perf.macro_f1},
  });
  return 0;
}

struct BenchmarkArgs {
  std::string config_path;
  std::string output = "results.json";
  std::string medians = "medians.json";
  std::string csv = "results.csv";
  int threads = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

int run_benchmark(const BenchmarkArgs& args) {
  std::string config_path = args.config_path;
  if (config_path.empty()) {
    if (const char* env = std::getenv("DATARED_CONFIG")) config_path = env;
  }
  if (config_path.empty())
    throw datared::ArgumentError(
        "no config file given: pass --config or set DATARED_CONFIG");

  datared::ExperimentConfig config = datared::load_config(config_path);
  if (args.threads > 0) config.threads = args.threads;
  if (args.iterations > 0) config.iterations = args.iterations;
  if (args.seed_set) config.seed = args.seed;
  config.validate();

  const datared::LabeledDataset data =
      load_dataset(config.dataset_path, config.label_column);

  datared::ProgressFn progress;
  if (!args.quiet)
    progress = [](const std::string& note) { std::cerr << note << "\n"; };

  const datared::ExperimentResults results =
      datared::run_experiment(data, config, progress);

  write_text(args.output, datared::results_to_json(results).dump(2) + "\n");
  write_text(args.medians, datared::median_summary(results).dump(2) + "\n");
  write_text(args.csv, datared::results_to_csv(results));

  emit({
      {"records", results.records.size()},
      {"failures", results.failures.size()},
      {"results", args.output},
      {"medians", args.medians},
      {"csv", args.csv},
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dataset reduction toolkit"};
  app.require_subcommand(1);

  ReduceArgs reduce_args;
  CLI::App* reduce_cmd = app.add_subcommand(
      "reduce", "Reduce a labeled CSV dataset and write the result");
  reduce_cmd->add_option("-i,--input", reduce_args.input, "input CSV file")
      ->required();
  reduce_cmd
      ->add_option("-l,--label-column", reduce_args.label_column,
                   "name of the label column")
      ->required();
  reduce_cmd->add_option("-o,--output", reduce_args.output, "output CSV file")
      ->required();
  reduce_cmd
      ->add_option("-m,--method", reduce_args.method,
                   "reduction method (fes needs the benchmark pipeline)")
      ->required()
      ->transform(CLI::IsMember(
          {"srs", "prd", "clc", "rkm", "mms", "des", "phl", "nrmd", "fes"},
          CLI::ignore_case));
  reduce_cmd
      ->add_option("-r,--ratio", reduce_args.ratio,
                   "kept fraction of each class, in [0, 1]")
      ->required();
  reduce_cmd->add_option("--seed", reduce_args.seed, "RNG seed (default 0)");
  reduce_cmd->add_flag("--scale", reduce_args.scale,
                       "min-max scale features before reducing; the output "
                       "file keeps original units");
  reduce_cmd->add_option("--bandwidth", reduce_args.bandwidth,
                         "prd: Gaussian kernel bandwidth (0 = median "
                         "heuristic)");
  reduce_cmd->add_option("--base-ratio", reduce_args.base_ratio,
                         "des: base sampling ratio (negative = half the "
                         "ratio)");
  reduce_cmd->add_option("--delta", reduce_args.delta,
                         "phl: persistence threshold, must be > 0");
  reduce_cmd
      ->add_option("--outlierness", reduce_args.outlierness,
                   "phl: outlierness flavor")
      ->transform(CLI::IsMember({"restricted", "multi"}));
  reduce_cmd
      ->add_option("--landmarks", reduce_args.landmarks,
                   "phl: landmark selection flavor")
      ->transform(CLI::IsMember({"representative", "vital"}));
  reduce_cmd
      ->add_option("--decomposition", reduce_args.decomposition,
                   "nrmd: matrix decomposition")
      ->transform(CLI::IsMember({"svd", "qr", "plu", "nmf"}));

  EpsilonArgs epsilon_args;
  CLI::App* epsilon_cmd = app.add_subcommand(
      "epsilon", "Representativeness of a reduced set against the full set");
  epsilon_cmd->add_option("--full", epsilon_args.full, "full dataset CSV")
      ->required();
  epsilon_cmd
      ->add_option("--reduced", epsilon_args.reduced, "reduced dataset CSV")
      ->required();
  epsilon_cmd
      ->add_option("-l,--label-column", epsilon_args.label_column,
                   "name of the label column")
      ->required();

  MetricsArgs metrics_args;
  CLI::App* metrics_cmd = app.add_subcommand(
      "metrics", "Classification metrics from a CSV of actual,predicted pairs");
  metrics_cmd->add_option("-i,--input", metrics_args.input, "pairs CSV file")
      ->required();
  metrics_cmd->add_option("--actual-column", metrics_args.actual_column,
                          "column holding true labels (default: actual)");
  metrics_cmd->add_option("--predicted-column", metrics_args.predicted_column,
                          "column holding predicted labels (default: "
                          "predicted)");

  BenchmarkArgs benchmark_args;
  CLI::App* benchmark_cmd = app.add_subcommand(
      "benchmark", "Run the full reduction benchmark from a config file");
  benchmark_cmd->add_option("-c,--config", benchmark_args.config_path,
                            "INI config file (default: $DATARED_CONFIG)");
  benchmark_cmd->add_option("-o,--output", benchmark_args.output,
                            "per-iteration results JSON (default: "
                            "results.json)");
  benchmark_cmd->add_option("--medians", benchmark_args.medians,
                            "median summary JSON (default: medians.json)");
  benchmark_cmd->add_option("--csv", benchmark_args.csv,
                            "flat per-record CSV (default: results.csv)");
  benchmark_cmd->add_option("-t,--threads", benchmark_args.threads,
                            "worker threads (overrides the config)");
  benchmark_cmd->add_option("--iterations", benchmark_args.iterations,
                            "iteration count (overrides the config)");
  CLI::Option* seed_opt = benchmark_cmd->add_option(
      "--seed", benchmark_args.seed, "RNG seed (overrides the config)");
  benchmark_cmd->add_flag("-q,--quiet", benchmark_args.quiet,
                          "suppress progress lines on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (reduce_cmd->parsed()) return run_reduce(reduce_args);
    if (epsilon_cmd->parsed()) return run_epsilon(epsilon_args);
    if (metrics_cmd->parsed()) return run_metrics(metrics_args);
    benchmark_args.seed_set = seed_opt->count() > 0;
    return run_benchmark(benchmark_args);
  } catch (const datared::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const std::string& issue : e.issues())
      std::cerr << "  " << issue << "\n";
    return 2;
  } catch (const datared::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const datared::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
