#include "relblow/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "relblow/errors.hpp"

namespace relblow {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void CsvWriter::add_row(const std::vector<double>& row) {
  if (row.size() != columns_.size()) throw domain_error("CsvWriter: row width mismatch");
  rows_.push_back(row);
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) os << ',';
    os << columns_[i];
  }
  os << "\r\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << fmt_double(row[i]);
    }
    os << "\r\n";
  }
  return os.str();
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("CsvWriter: cannot open " + path);
  f << str();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      table.columns = cells;
      header = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cstr : cells) {
      try {
        row.push_back(std::stod(cstr));
      } catch (const std::exception&) {
        throw config_error("read_csv: non-numeric cell '" + cstr + "' in " + path);
      }
    }
    if (row.size() != table.columns.size())
      throw config_error("read_csv: ragged row in " + path);
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw config_error("read_csv: empty file " + path);
  return table;
}

}  // namespace relblow
