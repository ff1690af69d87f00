#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "datared/error.hpp"
#include "datared/pipeline.hpp"

namespace datared {

namespace detail {

inline std::optional<double> config_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<long long> config_int(const std::string& text) {
  long long value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<std::uint64_t> config_u64(const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<bool> config_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  return std::nullopt;
}

inline std::vector<std::string> config_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    item = std::string(trim(item));
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace detail

// Plain sections-and-keys text:
//
//   [dataset]
//   path = bean.csv
//   label_column = Class
//
// Full-line comments start with '#' or ';'. Unknown sections, unknown keys,
// duplicate keys, and unparsable values are all collected and reported
// together in one ConfigError.
inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::vector<std::string> issues;
  std::map<ReductionMethod, ReductionParams> method_params;
  std::vector<std::string> method_names;  // from run.methods, order kept
  bool methods_given = false;

  const std::set<std::string> known_sections = {
      "dataset",     "split",       "model",      "run",        "energy",
      "method.srs",  "method.prd",  "method.clc", "method.rkm", "method.mms",
      "method.des",  "method.phl",  "method.nrmd", "method.fes"};

  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;

  const auto complain = [&](const std::string& message) {
    issues.push_back("line " + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line(detail::trim(raw));
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        complain("unterminated section header");
        continue;
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (known_sections.count(section) == 0) {
        complain("unknown section [" + section + "]");
        section.clear();
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      complain("expected 'key = value'");
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) {
      complain("empty key");
      continue;
    }
    if (section.empty()) {
      complain("key '" + key + "' outside any section");
      continue;
    }
    if (!seen.insert({section, key}).second) {
      complain("duplicate key '" + key + "' in [" + section + "]");
      continue;
    }

    const auto bad_value = [&](const std::string& expected) {
      complain(section + "." + key + ": expected " + expected + ", got '" +
               value + "'");
    };
    const auto set_double = [&](double& into) {
      if (const auto parsed = detail::config_double(value)) into = *parsed;
      else bad_value("a number");
    };
    const auto set_int = [&](int& into) {
      if (const auto parsed = detail::config_int(value))
        into = static_cast<int>(*parsed);
      else bad_value("an integer");
    };

    if (section == "dataset") {
      if (key == "path") config.dataset_path = value;
      else if (key == "label_column") config.label_column = value;
      else complain("unknown key '" + key + "' in [dataset]");
    } else if (section == "split") {
      if (key == "test_proportion") set_double(config.test_proportion);
      else if (key == "stratified") {
        if (const auto parsed = detail::config_bool(value))
          config.stratified_split = *parsed;
        else bad_value("true or false");
      } else complain("unknown key '" + key + "' in [split]");
    } else if (section == "model") {
      if (key == "hidden_dims") {
        config.hidden_dims.clear();
        for (const std::string& item : detail::config_list(value)) {
          if (const auto parsed = detail::config_int(item))
            config.hidden_dims.push_back(static_cast<int>(*parsed));
          else bad_value("a comma-separated list of integers");
        }
      } else if (key == "dropout") set_double(config.dropout_rate);
      else if (key == "learning_rate") set_double(config.learning_rate);
      else if (key == "epochs") set_int(config.epochs);
      else if (key == "batch_size") set_int(config.batch_size);
      else if (key == "optimizer") {
        if (value == "adam") config.optimizer = OptimizerKind::Adam;
        else if (value == "sgd") config.optimizer = OptimizerKind::Sgd;
        else bad_value("adam or sgd");
      } else complain("unknown key '" + key + "' in [model]");
    } else if (section == "run") {
      if (key == "iterations") set_int(config.iterations);
      else if (key == "seed") {
        if (const auto parsed = detail::config_u64(value)) config.seed = *parsed;
        else bad_value("an unsigned integer");
      } else if (key == "threads") set_int(config.threads);
      else if (key == "methods") {
        methods_given = true;
        method_names = detail::config_list(value);
      } else if (key == "ratios") {
        config.ratios.clear();
        for (const std::string& item : detail::config_list(value)) {
          if (const auto parsed = detail::config_double(item))
            config.ratios.push_back(*parsed);
          else bad_value("a comma-separated list of numbers");
        }
      } else complain("unknown key '" + key + "' in [run]");
    } else if (section == "energy") {
      if (key == "watts") set_double(config.energy.watts);
      else if (key == "intensity") set_double(config.energy.intensity_kg_per_kwh);
      else complain("unknown key '" + key + "' in [energy]");
    } else {
      // [method.*]
      const std::string name = section.substr(std::string("method.").size());
      ReductionMethod method = ReductionMethod::Srs;
      try {
        method = parse_method(name);
      } catch (const ArgumentError&) {
        complain("unknown section [" + section + "]");
        continue;
      }
      ReductionParams& params = method_params[method];
      const auto unknown = [&] {
        complain("unknown key '" + key + "' in [" + section + "]");
      };
      switch (method) {
        case ReductionMethod::Prd:
          if (key == "bandwidth") set_double(params.prd_bandwidth);
          else unknown();
          break;
        case ReductionMethod::Des:
          if (key == "base_ratio") set_double(params.des_p_base);
          else unknown();
          break;
        case ReductionMethod::Phl:
          if (key == "delta") set_double(params.phl_delta);
          else if (key == "outlierness") {
            if (value == "restricted")
              params.phl_outlierness = OutliernessMode::Restricted;
            else if (value == "multi")
              params.phl_outlierness = OutliernessMode::Multidimensional;
            else bad_value("restricted or multi");
          } else if (key == "landmarks") {
            if (value == "representative")
              params.phl_landmarks = PhlLandmarkMode::Representative;
            else if (value == "vital")
              params.phl_landmarks = PhlLandmarkMode::Vital;
            else bad_value("representative or vital");
          } else unknown();
          break;
        case ReductionMethod::Nrmd:
          if (key == "decomposition") {
            if (value == "svd")
              params.nrmd_decomposition = DecompositionKind::Svd;
            else if (value == "qr")
              params.nrmd_decomposition = DecompositionKind::Qr;
            else if (value == "plu")
              params.nrmd_decomposition = DecompositionKind::Plu;
            else if (value == "nmf")
              params.nrmd_decomposition = DecompositionKind::Nmf;
            else bad_value("svd, qr, plu, or nmf");
          } else unknown();
          break;
        case ReductionMethod::Fes:
          if (key == "initial_epochs") set_int(params.fes_initial_epochs);
          else unknown();
          break;
        default:
          unknown();
          break;
      }
    }
  }

  if (!methods_given)
    method_names = {"srs", "prd", "clc", "rkm", "mms", "des", "phl", "nrmd",
                    "fes"};
  for (const std::string& name : method_names) {
    try {
      const ReductionMethod method = parse_method(name);
      MethodSpec spec;
      spec.method = method;
      if (const auto found = method_params.find(method);
          found != method_params.end())
        spec.params = found->second;
      if (method == ReductionMethod::Fes && spec.params.fes_initial_epochs == 0)
        spec.params.fes_initial_epochs = std::max(1, config.epochs / 2);
      config.methods.push_back(spec);
    } catch (const ArgumentError&) {
      issues.push_back("run.methods: unknown method '" + name + "'");
    }
  }

  for (std::string& issue : config.issues()) issues.push_back(std::move(issue));
  if (!issues.empty()) {
    const std::string what =
        "invalid config (" + std::to_string(issues.size()) + " issue(s))";
    throw ConfigError(what, std::move(issues));
  }
  return config;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace datared
