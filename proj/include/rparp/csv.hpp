#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rparp/errors.hpp"

// Minimal CSV support: UTF-8, '.' decimal separator, first non-comment line is
// the header, '#' lines are skipped, "NA" is the missing-value sentinel.

namespace rparp::csv {

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    std::size_t i = 0;
    while (i < f.size() && f[i] == ' ') ++i;
    f.erase(0, i);
  }
  return out;
}

inline bool is_missing(std::string_view field) { return field == "NA" || field.empty(); }

inline double parse_double(std::string_view field, long line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw parse_error("cannot parse number '" + std::string(field) + "'", line_no);
  return value;
}

// NA on missing, parse error otherwise
inline double parse_cell(std::string_view field, long line_no) {
  if (is_missing(field)) return std::numeric_limits<double>::quiet_NaN();
  return parse_double(field, line_no);
}

// Shortest round-trip decimal representation; keeps outputs byte-stable and
// exact under reload.
inline std::string format(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

struct Reader {
  explicit Reader(const std::string& path) : in(path), path_(path) {
    if (!in) throw validation_error("cannot open file: " + path);
  }

  // next non-comment line; returns false at EOF
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      fields = split(line);
      return true;
    }
    return false;
  }

  std::ifstream in;
  long line_no = 0;
  std::string path_;
};

struct Writer {
  explicit Writer(const std::string& path) : out(path) {
    if (!out) throw validation_error("cannot open file for writing: " + path);
  }

  void comment(const std::string& text) { out << "# " << text << "\n"; }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  }

  std::ofstream out;
};

}  // namespace rparp::csv
