#include "limitpost/csv.hpp"

#include <charconv>
#include <cstdio>

#include "limitpost/errors.hpp"

namespace limitpost::csv {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

NumericTable read_numeric(std::istream& in, const std::vector<std::string>& columns) {
  NumericTable table;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split(body);
    if (!header_seen) {
      bool ok = fields.size() == columns.size();
      for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fields[i] == columns[i];
      if (!ok) {
        std::string expect;
        for (const auto& c : columns) expect += (expect.empty() ? "" : ",") + c;
        throw ParseError("expected header '" + expect + "'", lineno);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != columns.size()) throw ParseError("wrong number of fields", lineno);
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto f = fields[i];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), row[i]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError("malformed number '" + std::string(f) + "'", lineno);
      }
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(lineno);
  }
  if (!header_seen) throw ParseError("empty file: missing header");
  return table;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format(values[i]);
  }
  out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ',';
    out << columns[i];
  }
  out << '\n';
}

}  // namespace limitpost::csv
