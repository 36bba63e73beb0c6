#pragma once

// CSV emission and parsing. Numbers are written with 17 significant digits so
// every double round-trips exactly and files are byte-stable for a given
// input; newlines are always \n.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/simulator.hpp"

namespace hawkes {

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

inline double parse_number(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw io_error("not a number: '" + s + "'");
  return x;
}

struct csv_table {
  std::string header;  // comma-joined column names
  std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline void write_csv(const std::string& path, const csv_table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << table.header << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << "\n";
  }
  out.flush();
  if (!out) throw io_error("write failed: " + path);
}

inline csv_table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  csv_table table;
  std::string line;
  if (!std::getline(in, line)) throw io_error("missing header: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    table.rows.push_back(split_fields(line));
  }
  return table;
}

// event dump: one row per event, individual-major then chronological
inline void write_events_csv(const std::string& path, const event_log& log, int replica = 0) {
  csv_table table;
  table.header = "replica,individual,time";
  for (std::size_t i = 0; i < log.times.size(); ++i) {
    for (double t : log.times[i]) {
      table.rows.push_back(
          {std::to_string(replica), std::to_string(i), format_number(t)});
    }
  }
  write_csv(path, table);
}

// cumulative count dump, time-major
inline void write_counts_csv(const std::string& path, const counts_grid& counts) {
  csv_table table;
  table.header = "time,individual,count";
  for (std::size_t k = 0; k < counts.grid.size(); ++k) {
    for (int i = 0; i < counts.n; ++i) {
      table.rows.push_back(
          {format_number(counts.grid[k]), std::to_string(i), std::to_string(counts.at(i, k))});
    }
  }
  write_csv(path, table);
}

// inverse of write_counts_csv; insists on a complete time x individual matrix
inline counts_grid read_counts_csv(const std::string& path) {
  csv_table table = read_csv(path);
  if (table.header != "time,individual,count")
    throw io_error("unexpected counts header: " + table.header);
  counts_grid out;
  long long max_ind = -1;
  std::vector<double> times;
  for (const auto& row : table.rows) {
    if (row.size() != 3) throw io_error("counts row needs 3 fields");
    double t = parse_number(row[0]);
    long long i = std::strtoll(row[1].c_str(), nullptr, 10);
    if (times.empty() || t != times.back()) times.push_back(t);
    if (i > max_ind) max_ind = i;
  }
  if (times.empty()) throw io_error("counts file has no rows: " + path);
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw io_error("counts times must be grouped and increasing");
  out.grid = times;
  out.n = static_cast<int>(max_ind + 1);
  out.counts.assign(static_cast<std::size_t>(out.n) * out.grid.size(), -1);
  std::size_t slot = 0;
  for (const auto& row : table.rows) {
    double t = parse_number(row[0]);
    long long i = std::strtoll(row[1].c_str(), nullptr, 10);
    long long c = std::strtoll(row[2].c_str(), nullptr, 10);
    while (slot < out.grid.size() && out.grid[slot] != t) ++slot;
    if (slot >= out.grid.size()) throw io_error("counts rows are not grouped by time");
    if (i < 0 || i >= out.n || c < 0) throw io_error("counts row out of range");
    auto& cell = out.counts[static_cast<std::size_t>(i) * out.grid.size() + slot];
    if (cell != -1) throw io_error("duplicate counts row");
    cell = c;
  }
  for (auto c : out.counts)
    if (c == -1) throw io_error("counts file is not a complete matrix");
  out.mean.assign(out.grid.size(), 0.0);
  for (std::size_t k = 0; k < out.grid.size(); ++k) {
    double s = 0.0;
    for (int i = 0; i < out.n; ++i) s += static_cast<double>(out.at(i, k));
    out.mean[k] = s / out.n;
  }
  return out;
}

}  // namespace hawkes
