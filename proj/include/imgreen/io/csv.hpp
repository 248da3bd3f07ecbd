#pragma once

// Comma-separated tables with a header row; floats are written as the
// shortest decimal that round-trips.

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "imgreen/errors.hpp"

namespace imgreen::io {

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

using Cell = std::variant<double, long long, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw Error("csv: row has " + std::to_string(row.size()) + " cells, expected " +
                                                  std::to_string(header_.size()));
    rows_.push_back(std::move(row));
  }

  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& row : rows_) {
      std::vector<std::string> cells;
      for (const Cell& c : row) {
        if (const auto* d = std::get_if<double>(&c)) {
          cells.push_back(format_double(*d));
        } else if (const auto* i = std::get_if<long long>(&c)) {
          cells.push_back(std::to_string(*i));
        } else {
          cells.push_back(std::get<std::string>(c));
        }
      }
      append_line(out, cells);
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("csv: cannot open " + path + " for writing");
    f << str();
  }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }

  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote(cells[i]);
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace imgreen::io
