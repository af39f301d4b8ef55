#include "pathnnt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "pathnnt/errors.hpp"

namespace pathnnt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int parse_binary(const std::string& raw, std::size_t line, const std::string& column) {
  const std::string v = trim(raw);
  if (v == "0") return 0;
  if (v == "1") return 1;
  throw ParseError("line " + std::to_string(line) + ", column '" + column +
                       "': expected 0 or 1, got '" + v + "'",
                   line, column);
}

double parse_real(const std::string& raw, std::size_t line, const std::string& column) {
  const std::string v = trim(raw);
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty() || !std::isfinite(x)) {
    throw ParseError("line " + std::to_string(line) + ", column '" + column +
                         "': expected a finite real, got '" + v + "'",
                     line, column);
  }
  return x;
}

}  // namespace

Dataset parse_csv(std::istream& in, const ColumnMap& columns) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty input: missing header row", 1, "");
  }
  const auto header = split_line(line);
  auto find_column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw ParseError("header is missing column '" + name + "'", 1, name);
  };
  const std::size_t ci = find_column(columns.outcome);
  const std::size_t ca = find_column(columns.exposure);
  const std::size_t cm = find_column(columns.mediator);
  const std::size_t cl = find_column(columns.confounder);
  const std::size_t needed = std::max({ci, ca, cm, cl}) + 1;

  std::vector<ObservationRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() < needed) {
      throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                           std::to_string(needed) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no, "");
    }
    ObservationRecord r;
    r.outcome = parse_binary(fields[ci], line_no, columns.outcome);
    r.exposure = parse_binary(fields[ca], line_no, columns.exposure);
    r.mediator = parse_binary(fields[cm], line_no, columns.mediator);
    r.confounder = parse_real(fields[cl], line_no, columns.confounder);
    records.push_back(r);
  }
  return Dataset(std::move(records));
}

Dataset read_csv(const std::string& path, const ColumnMap& columns) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open input file: " + path);
  }
  return parse_csv(in, columns);
}

void write_csv(std::ostream& out, const Dataset& data, const ColumnMap& columns) {
  out << columns.outcome << ',' << columns.exposure << ',' << columns.mediator << ','
      << columns.confounder << '\n';
  char buf[64];
  for (const auto& r : data.records()) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.confounder);
    out << r.outcome << ',' << r.exposure << ',' << r.mediator << ',' << buf << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& data, const ColumnMap& columns) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open output file: " + path);
  }
  write_csv(out, data, columns);
}

}  // namespace pathnnt
