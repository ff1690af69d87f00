#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "datared/error.hpp"

namespace datared {

using Index = Eigen::Index;

// Labeled feature matrix with integer class ids. Class ids are assigned in
// order of first appearance in the source, so the same file always produces
// the same encoding.
struct LabeledDataset {
  Eigen::MatrixXd examples;  // one row per example
  std::vector<int> labels;   // values in [0, class_count)
  int class_count = 0;

  std::vector<std::string> label_names;    // class id -> source label text
  std::vector<std::string> feature_names;  // size feature_count()
  std::string label_column = "label";
  // Position of the label among the source columns, so a saved file keeps
  // the original column order.
  Index label_position = -1;

  // class id -> row indices; the lists partition [0, size()).
  std::vector<std::vector<Index>> class_members;

  Index size() const { return examples.rows(); }
  Index feature_count() const { return examples.cols(); }

  void rebuild_class_members() {
    class_members.assign(static_cast<std::size_t>(class_count), {});
    for (Index i = 0; i < size(); ++i) {
      class_members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]
          .push_back(i);
    }
  }

  void validate() const {
    const auto n = static_cast<std::size_t>(examples.rows());
    if (labels.size() != n)
      throw ShapeError("dataset: label count " + std::to_string(labels.size()) +
                       " does not match row count " + std::to_string(n));
    if (class_count < 1) throw ArgumentError("dataset: class_count must be positive");
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] < 0 || labels[i] >= class_count)
        throw ArgumentError("dataset: label " + std::to_string(labels[i]) +
                            " at row " + std::to_string(i) + " outside [0, " +
                            std::to_string(class_count) + ")");
    }
    if (!examples.allFinite())
      throw ArgumentError("dataset: examples contain non-finite values");
  }

  static LabeledDataset create(Eigen::MatrixXd examples, std::vector<int> labels,
                               int class_count) {
    LabeledDataset data;
    data.examples = std::move(examples);
    data.labels = std::move(labels);
    data.class_count = class_count;
    data.validate();
    data.label_names.resize(static_cast<std::size_t>(class_count));
    for (int k = 0; k < class_count; ++k)
      data.label_names[static_cast<std::size_t>(k)] = std::to_string(k);
    data.feature_names.resize(static_cast<std::size_t>(data.feature_count()));
    for (Index j = 0; j < data.feature_count(); ++j)
      data.feature_names[static_cast<std::size_t>(j)] = "f" + std::to_string(j);
    data.label_position = data.feature_count();
    data.rebuild_class_members();
    return data;
  }

  // Keeps naming metadata from `like` but replaces the contents.
  static LabeledDataset like(const LabeledDataset& base, Eigen::MatrixXd examples,
                             std::vector<int> labels) {
    LabeledDataset data;
    data.examples = std::move(examples);
    data.labels = std::move(labels);
    data.class_count = base.class_count;
    data.label_names = base.label_names;
    data.feature_names = base.feature_names;
    data.label_column = base.label_column;
    data.label_position = base.label_position;
    data.validate();
    data.rebuild_class_members();
    return data;
  }
};

// Rows of `data` at `rows`, in the given order.
inline LabeledDataset subset(const LabeledDataset& data,
                             const std::vector<Index>& rows) {
  Eigen::MatrixXd examples(static_cast<Index>(rows.size()), data.feature_count());
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= data.size())
      throw ArgumentError("subset: row index " + std::to_string(r) +
                          " outside [0, " + std::to_string(data.size()) + ")");
    examples.row(static_cast<Index>(i)) = data.examples.row(r);
    labels[i] = data.labels[static_cast<std::size_t>(r)];
  }
  return LabeledDataset::like(data, std::move(examples), std::move(labels));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.emplace_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

inline double parse_double_cell(const std::string& cell, std::size_t row,
                                const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty())
    throw ParseError("row " + std::to_string(row) + ", column '" + column +
                     "': cannot parse '" + cell + "' as a number");
  if (!std::isfinite(value))
    throw ParseError("row " + std::to_string(row) + ", column '" + column +
                     "': non-finite value '" + cell + "'");
  return value;
}

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

}  // namespace detail

// Loads a headered CSV. `label_column` must exist; columns in `drop_columns`
// are removed before feature assembly (a name that matches nothing is a
// schema error, so typos do not silently pass). Feature cells must parse as
// finite doubles; the label cell is kept as text and encoded by first
// appearance.
inline LabeledDataset load_csv(const std::string& path,
                               const std::string& label_column,
                               const std::vector<std::string>& drop_columns = {}) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open dataset file '" + path + "'");
  std::string header_line;
  if (!std::getline(in, header_line))
    throw SchemaError("dataset file '" + path + "' is empty");
  const std::vector<std::string> header = detail::split_csv_line(header_line);

  std::vector<bool> dropped(header.size(), false);
  for (const std::string& name : drop_columns) {
    bool found = false;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) {
        dropped[j] = true;
        found = true;
      }
    }
    if (!found)
      throw SchemaError("drop column '" + name + "' not present in '" + path + "'");
  }

  Index label_index = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column && !dropped[j]) {
      if (label_index >= 0)
        throw SchemaError("label column '" + label_column + "' appears twice");
      label_index = static_cast<Index>(j);
    }
  }
  if (label_index < 0)
    throw SchemaError("label column '" + label_column + "' not present in '" +
                      path + "'");

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  Index label_position = 0;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (dropped[j]) continue;
    if (static_cast<Index>(j) == label_index) {
      label_position = static_cast<Index>(feature_cols.size());
      continue;
    }
    feature_cols.push_back(j);
    feature_names.push_back(header[j]);
  }
  if (feature_cols.empty())
    throw SchemaError("no feature columns remain in '" + path + "'");

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::map<std::string, int> label_ids;
  std::string line;
  std::size_t row = 1;  // 1-based, header is row 1
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    for (std::size_t j : feature_cols)
      values.push_back(
          detail::parse_double_cell(cells[j], row, header[j]));
    const std::string& text = cells[static_cast<std::size_t>(label_index)];
    auto [it, inserted] =
        label_ids.emplace(text, static_cast<int>(label_names.size()));
    if (inserted) label_names.push_back(text);
    labels.push_back(it->second);
  }
  if (labels.empty())
    throw SchemaError("dataset file '" + path + "' has no data rows");

  const Index n = static_cast<Index>(labels.size());
  const Index d = static_cast<Index>(feature_cols.size());
  Eigen::MatrixXd examples(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j)
      examples(i, j) = values[static_cast<std::size_t>(i * d + j)];

  LabeledDataset data;
  data.examples = std::move(examples);
  data.labels = std::move(labels);
  data.class_count = static_cast<int>(label_names.size());
  data.label_names = std::move(label_names);
  data.feature_names = std::move(feature_names);
  data.label_column = label_column;
  data.label_position = label_position;
  data.validate();
  data.rebuild_class_members();
  return data;
}

// Writes the dataset back as CSV, original column order plus a trailing
// __source_index column. `source_indices` may be empty (synthetic rows, e.g.
// centroids), in which case the cell is left blank; otherwise it must have
// one entry per row.
inline void save_csv(const LabeledDataset& data, const std::string& path,
                     const std::optional<std::vector<Index>>& source_indices =
                         std::nullopt) {
  if (source_indices && static_cast<Index>(source_indices->size()) != data.size())
    throw ShapeError("save_csv: source index count does not match row count");
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open '" + path + "' for writing");

  const Index d = data.feature_count();
  const Index label_pos = (data.label_position >= 0 && data.label_position <= d)
                              ? data.label_position
                              : d;
  std::vector<std::string> columns;
  for (Index j = 0; j <= d; ++j) {
    if (j == label_pos) columns.push_back(data.label_column);
    if (j < d) columns.push_back(data.feature_names[static_cast<std::size_t>(j)]);
  }
  columns.push_back("__source_index");
  for (std::size_t j = 0; j < columns.size(); ++j)
    out << (j ? "," : "") << columns[j];
  out << "\n";

  for (Index i = 0; i < data.size(); ++i) {
    bool first = true;
    for (Index j = 0; j <= d; ++j) {
      if (j == label_pos) {
        out << (first ? "" : ",")
            << data.label_names[static_cast<std::size_t>(
                   data.labels[static_cast<std::size_t>(i)])];
        first = false;
      }
      if (j < d) {
        out << (first ? "" : ",") << detail::format_double(data.examples(i, j));
        first = false;
      }
    }
    out << ",";
    if (source_indices) out << (*source_indices)[static_cast<std::size_t>(i)];
    out << "\n";
  }
  if (!out) throw ArgumentError("write to '" + path + "' failed");
}

}  // namespace datared
