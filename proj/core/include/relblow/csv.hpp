#pragma once

#include <string>
#include <vector>

namespace relblow {

// RFC-4180 CSV with a header row; numeric cells use round-trip precision.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add_row(const std::vector<double>& row);
  std::string str() const;
  void write_file(const std::string& path) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 when missing
};

CsvTable read_csv(const std::string& path);

}  // namespace relblow
