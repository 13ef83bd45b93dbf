#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcnet {

enum class VariableType { Continuous, Ordinal };

struct VariableInfo {
  VariableType type = VariableType::Continuous;
  // Sorted distinct integer codes observed in the column (ordinal only).
  std::vector<double> levels;

  bool is_ordinal() const { return type == VariableType::Ordinal; }
};

enum class MissingPolicy { Pairwise, Listwise };

// A validated n x p table of observations. Missing cells are stored as NaN;
// correlation routines honor `policy` (pairwise completion vs the already
// row-deleted listwise form).
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> variable_names;
  std::vector<VariableInfo> variable_types;
  MissingPolicy policy = MissingPolicy::Pairwise;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
  bool has_missing() const;
};

struct LoadOptions {
  char delimiter = ',';             // ',' or '\t'
  std::optional<bool> header;       // unset: auto-detect
  std::vector<std::string> missing_markers = {"", "NA"};
  MissingPolicy policy = MissingPolicy::Pairwise;
};

// Parses a delimited text file into a validated Dataset. Throws DataError on
// missing files, ragged rows, non-numeric cells that are not missing markers,
// or invariant violations (fewer than 2 distinct observed values per column).
Dataset load_table(const std::string& path, const LoadOptions& options = {});

// Classifies each column: ordinal iff every observed value is an integer and
// there are at most `ordinal_level_cutoff` distinct values.
inline constexpr int ordinal_level_cutoff = 7;
std::vector<VariableInfo> detect_variable_types(const Eigen::MatrixXd& values);

// Listwise drops every case with a missing cell; pairwise only records the
// policy so correlation routines use complete pairs.
Dataset apply_missing_policy(const Dataset& dataset, MissingPolicy policy);

// Throws DataError if any Dataset invariant is violated.
void validate_dataset(const Dataset& dataset);

// Row/column subsets used by the bootstrap engines. Variable types are
// re-detected on the subset; invariant violations (e.g. a constant resampled
// column) throw DataError.
Dataset subset_rows(const Dataset& dataset, std::span<const int> rows);
Dataset subset_columns(const Dataset& dataset, std::span<const int> cols);

// Wraps a plain matrix as a continuous/auto-detected Dataset with generated
// variable names (V1..Vp).
Dataset make_dataset(const Eigen::MatrixXd& values,
                     const std::string& name_prefix = "V");

void write_table(const Dataset& dataset, const std::string& path,
                 char delimiter = ',');

}  // namespace pcnet
