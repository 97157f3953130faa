#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>

#include "sdrkit/cli.hpp"
#include "sdrkit/error.hpp"

namespace sdrkit {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool read_record(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::vector<std::size_t> locate(const std::vector<std::string>& header, const std::vector<std::string>& names,
                                const std::string& path) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) index.emplace(trim(header[c]), c);
  std::vector<std::size_t> out;
  for (const auto& name : names) {
    const auto it = index.find(name);
    if (it == index.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in " + path);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

LoadedCsv load_csv(const std::string& path, const std::vector<std::string>& x_columns,
                   const std::vector<std::string>& y_columns, const std::vector<std::string>& sqrt_columns,
                   bool strict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::string line;
  if (!read_record(in, line)) throw Error(ErrorCode::IoFailure, path + " has no header row");
  const std::vector<std::string> header = split_csv_record(line);

  if (x_columns.empty() || y_columns.empty()) {
    throw Error(ErrorCode::InvalidConfig, "at least one predictor and one response column are required");
  }
  const std::set<std::string> xs(x_columns.begin(), x_columns.end());
  for (const auto& y : y_columns) {
    if (xs.count(y)) throw Error(ErrorCode::InvalidConfig, "column '" + y + "' is both predictor and response");
  }
  const auto xi = locate(header, x_columns, path);
  const auto yi = locate(header, y_columns, path);
  std::set<std::size_t> rooted;
  for (std::size_t c : locate(header, sqrt_columns, path)) rooted.insert(c);

  std::vector<std::vector<double>> xrows, yrows;
  LoadedCsv out;
  out.x_names = x_columns;
  out.y_names = y_columns;
  std::size_t record = 1;
  while (read_record(in, line)) {
    ++record;
    const auto fields = split_csv_record(line);
    auto pick = [&](const std::vector<std::size_t>& cols, std::vector<double>& dst) {
      for (std::size_t c : cols) {
        const auto v = c < fields.size() ? parse_number(fields[c]) : std::nullopt;
        if (!v) {
          if (strict) {
            throw Error(ErrorCode::NonNumericCell,
                        path + " record " + std::to_string(record) + ", column '" + trim(header[c]) + "'");
          }
          return false;
        }
        double value = *v;
        if (rooted.count(c)) {
          if (value < 0.0) {
            throw Error(ErrorCode::NegativeUnderSqrt, "negative value in sqrt-transformed column '" +
                                                          trim(header[c]) + "' at record " + std::to_string(record));
          }
          value = std::sqrt(value);
        }
        dst.push_back(value);
      }
      return true;
    };
    std::vector<double> xr, yr;
    if (!pick(xi, xr) || !pick(yi, yr)) {
      ++out.dropped_rows;
      continue;
    }
    xrows.push_back(std::move(xr));
    yrows.push_back(std::move(yr));
  }

  const auto n = static_cast<Eigen::Index>(xrows.size());
  out.data.x.resize(n, static_cast<Eigen::Index>(xi.size()));
  out.data.y.resize(n, static_cast<Eigen::Index>(yi.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < xi.size(); ++c) out.data.x(r, static_cast<Eigen::Index>(c)) = xrows[r][c];
    for (std::size_t c = 0; c < yi.size(); ++c) out.data.y(r, static_cast<Eigen::Index>(c)) = yrows[r][c];
  }
  return out;
}

Matrix read_numeric_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::string line;
  if (!read_record(in, line)) throw Error(ErrorCode::IoFailure, path + " is empty");
  const auto names = split_csv_record(line);
  if (header) *header = names;
  std::vector<std::vector<double>> rows;
  while (read_record(in, line)) {
    std::vector<double> row;
    for (const auto& f : split_csv_record(line)) {
      const auto v = parse_number(f);
      if (!v) throw Error(ErrorCode::NonNumericCell, "non-numeric cell '" + f + "' in " + path);
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::DimensionMismatch, "ragged rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

}  // namespace sdrkit
