#pragma once

#include <string>
#include <vector>

namespace pcnet {

// Shortest representation that round-trips the exact double value.
std::string format_double(double v);

std::vector<std::string> split_delimited(const std::string& line,
                                         char delimiter);

// Minimal delimited-table reader used for run-directory files the CLI writes
// itself (header row, no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path, char delimiter = ',');

}  // namespace pcnet
