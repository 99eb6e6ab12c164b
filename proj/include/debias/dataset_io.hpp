#pragma once

// CSV serialization of a Dataset. Header `y,x1,...,xp`, one row per
// observation, shortest round-trip decimal formatting.

#include "debias/model_core.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace debias {

class IoError : public Error {
 public:
  using Error::Error;
};

inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw IoError("cannot parse number '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
  d.check();
  os << "y";
  for (Index j = 0; j < d.cols(); ++j) os << ",x" << (j + 1);
  os << '\n';
  for (Index i = 0; i < d.rows(); ++i) {
    os << format_double(d.y(i));
    for (Index j = 0; j < d.cols(); ++j) os << ',' << format_double(d.X(i, j));
    os << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& is, const std::string& origin = "<stream>") {
  std::string line;
  if (!std::getline(is, line)) throw IoError(origin + ": empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "y")
    throw IoError(origin + ": header must be y,x1,...,xp");
  const Index p = static_cast<Index>(header.size()) - 1;

  std::vector<double> values;
  Index n = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Index>(fields.size()) != p + 1)
      throw IoError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(p + 1) +
                    " fields, got " + std::to_string(fields.size()));
    try {
      for (auto f : fields) values.push_back(parse_double(f));
    } catch (const IoError& e) {
      throw IoError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    ++n;
  }
  Dataset d;
  d.X.resize(n, p);
  d.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.y(i) = values[static_cast<std::size_t>(i * (p + 1))];
    for (Index j = 0; j < p; ++j) d.X(i, j) = values[static_cast<std::size_t>(i * (p + 1) + 1 + j)];
  }
  return d;
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_dataset_csv(in, path);
}

inline void write_dataset_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_dataset_csv(out, d);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace debias
