#include "pcnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pcnet/csv.hpp"
#include "pcnet/errors.hpp"

namespace pcnet {

bool Dataset::has_missing() const {
  return values.hasNaN();
}

namespace {

bool parse_cell(const std::string& cell, double* out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\r')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\r')) --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc{} && ptr == end;
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \r");
  return s.substr(b, e - b + 1);
}

bool is_missing_marker(const std::string& cell,
                       const std::vector<std::string>& markers) {
  std::string t = trimmed(cell);
  return std::find(markers.begin(), markers.end(), t) != markers.end();
}

bool column_is_integral(const Eigen::MatrixXd& values, int col,
                        std::set<double>* distinct) {
  for (int r = 0; r < values.rows(); ++r) {
    double v = values(r, col);
    if (std::isnan(v)) continue;
    if (std::abs(v - std::round(v)) > 1e-9) return false;
    distinct->insert(std::round(v));
  }
  return true;
}

}  // namespace

std::vector<VariableInfo> detect_variable_types(const Eigen::MatrixXd& values) {
  std::vector<VariableInfo> out(static_cast<std::size_t>(values.cols()));
  for (int c = 0; c < values.cols(); ++c) {
    std::set<double> distinct;
    bool integral = column_is_integral(values, c, &distinct);
    if (integral && static_cast<int>(distinct.size()) <= ordinal_level_cutoff) {
      out[static_cast<std::size_t>(c)].type = VariableType::Ordinal;
      out[static_cast<std::size_t>(c)].levels.assign(distinct.begin(),
                                                     distinct.end());
    } else {
      out[static_cast<std::size_t>(c)].type = VariableType::Continuous;
    }
  }
  return out;
}

void validate_dataset(const Dataset& dataset) {
  int n = dataset.n();
  int p = dataset.p();
  if (n < 2) throw DataError("dataset has fewer than 2 cases");
  if (p < 2) throw DataError("dataset has fewer than 2 variables");
  if (static_cast<int>(dataset.variable_names.size()) != p)
    throw DataError("variable name count does not match column count");
  if (static_cast<int>(dataset.variable_types.size()) != p)
    throw DataError("variable type count does not match column count");
  std::unordered_set<std::string> seen;
  for (const auto& name : dataset.variable_names) {
    if (name.empty()) throw DataError("empty variable name");
    if (!seen.insert(name).second)
      throw DataError("duplicate variable name: " + name);
  }
  for (int c = 0; c < p; ++c) {
    std::set<double> distinct;
    int observed = 0;
    for (int r = 0; r < n; ++r) {
      double v = dataset.values(r, c);
      if (std::isnan(v)) continue;
      ++observed;
      distinct.insert(v);
    }
    const std::string& name = dataset.variable_names[static_cast<std::size_t>(c)];
    if (observed == 0)
      throw DataError("column " + name + " has no observed values");
    if (distinct.size() < 2)
      throw DataError("column " + name + " has < 2 distinct values");
    const VariableInfo& info =
        dataset.variable_types[static_cast<std::size_t>(c)];
    if (info.is_ordinal()) {
      for (double v : distinct) {
        if (std::abs(v - std::round(v)) > 1e-9 ||
            !std::binary_search(info.levels.begin(), info.levels.end(),
                                std::round(v)))
          throw DataError("column " + name +
                          " has a value outside its declared ordinal levels");
      }
    }
  }
}

Dataset load_table(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;
    rows.push_back(split_delimited(line, options.delimiter));
  }
  if (rows.empty()) throw DataError("empty file: " + path);

  std::size_t n_cols = rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n_cols)
      throw DataError("ragged row " + std::to_string(i + 1) + " in " + path);
  }
  if (n_cols == 0) throw DataError("zero usable columns in " + path);

  // Header auto-detection: any cell in the first row that is neither numeric
  // nor a missing marker makes it a header.
  bool header;
  if (options.header.has_value()) {
    header = *options.header;
  } else {
    header = false;
    for (const auto& cell : rows.front()) {
      double v;
      if (!parse_cell(cell, &v) &&
          !is_missing_marker(cell, options.missing_markers)) {
        header = true;
        break;
      }
    }
  }

  std::vector<std::string> names;
  std::size_t first_data_row = 0;
  if (header) {
    for (const auto& cell : rows.front()) names.push_back(trimmed(cell));
    first_data_row = 1;
  } else {
    for (std::size_t c = 0; c < n_cols; ++c)
      names.push_back("V" + std::to_string(c + 1));
  }

  std::size_t n_rows = rows.size() - first_data_row;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n_rows),
                         static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto& row = rows[first_data_row + r];
    for (std::size_t c = 0; c < n_cols; ++c) {
      double v;
      if (parse_cell(row[c], &v)) {
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      } else if (is_missing_marker(row[c], options.missing_markers)) {
        values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            std::numeric_limits<double>::quiet_NaN();
      } else {
        throw DataError("non-numeric cell '" + row[c] + "' at row " +
                        std::to_string(first_data_row + r + 1) + ", column " +
                        std::to_string(c + 1) + " of " + path);
      }
    }
  }

  Dataset dataset;
  dataset.values = std::move(values);
  dataset.variable_names = std::move(names);
  dataset.variable_types = detect_variable_types(dataset.values);
  dataset.policy = options.policy;
  validate_dataset(dataset);
  if (options.policy == MissingPolicy::Listwise)
    return apply_missing_policy(dataset, MissingPolicy::Listwise);
  return dataset;
}

Dataset apply_missing_policy(const Dataset& dataset, MissingPolicy policy) {
  if (policy == MissingPolicy::Pairwise) {
    Dataset out = dataset;
    out.policy = MissingPolicy::Pairwise;
    return out;
  }
  std::vector<int> keep;
  for (int r = 0; r < dataset.n(); ++r) {
    bool complete = true;
    for (int c = 0; c < dataset.p(); ++c) {
      if (std::isnan(dataset.values(r, c))) {
        complete = false;
        break;
      }
    }
    if (complete) keep.push_back(r);
  }
  if (static_cast<int>(keep.size()) < 2)
    throw DataError("listwise deletion leaves fewer than 2 cases");
  Dataset out = subset_rows(dataset, keep);
  out.policy = MissingPolicy::Listwise;
  return out;
}

Dataset subset_rows(const Dataset& dataset, std::span<const int> rows) {
  Dataset out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), dataset.p());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.values.row(static_cast<Eigen::Index>(i)) =
        dataset.values.row(rows[i]);
  out.variable_names = dataset.variable_names;
  out.variable_types = detect_variable_types(out.values);
  out.policy = dataset.policy;
  validate_dataset(out);
  return out;
}

Dataset subset_columns(const Dataset& dataset, std::span<const int> cols) {
  Dataset out;
  out.values.resize(dataset.n(), static_cast<Eigen::Index>(cols.size()));
  out.variable_names.reserve(cols.size());
  out.variable_types.reserve(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out.values.col(static_cast<Eigen::Index>(i)) = dataset.values.col(cols[i]);
    out.variable_names.push_back(
        dataset.variable_names[static_cast<std::size_t>(cols[i])]);
    out.variable_types.push_back(
        dataset.variable_types[static_cast<std::size_t>(cols[i])]);
  }
  out.policy = dataset.policy;
  validate_dataset(out);
  return out;
}

Dataset make_dataset(const Eigen::MatrixXd& values,
                     const std::string& name_prefix) {
  Dataset out;
  out.values = values;
  for (int c = 0; c < values.cols(); ++c)
    out.variable_names.push_back(name_prefix + std::to_string(c + 1));
  out.variable_types = detect_variable_types(out.values);
  validate_dataset(out);
  return out;
}

void write_table(const Dataset& dataset, const std::string& path,
                 char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (int c = 0; c < dataset.p(); ++c) {
    if (c) out << delimiter;
    out << dataset.variable_names[static_cast<std::size_t>(c)];
  }
  out << "\n";
  for (int r = 0; r < dataset.n(); ++r) {
    for (int c = 0; c < dataset.p(); ++c) {
      if (c) out << delimiter;
      double v = dataset.values(r, c);
      if (std::isnan(v))
        out << "NA";
      else
        out << format_double(v);
    }
    out << "\n";
  }
}

}  // namespace pcnet
