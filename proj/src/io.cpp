#include "disccore/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace disccore {

namespace {

double parse_double(std::string_view field, size_t lineno, size_t col) {
  // trim surrounding whitespace
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                            field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw parse_error(lineno, "could not parse number in column " + std::to_string(col + 1));
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

data_point csv_point(std::string_view line, size_t lineno, const input_options& options) {
  auto fields = split_csv(line);
  data_point p;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (options.label_col && *options.label_col == i) {
      double y = parse_double(fields[i], lineno, i);
      if (y != 1.0 && y != -1.0) throw parse_error(lineno, "label must be +1 or -1");
      p.label = static_cast<int>(y);
    } else {
      p.coords.push_back(parse_double(fields[i], lineno, i));
    }
  }
  return p;
}

data_point ndjson_point(const std::string& line, size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(lineno, e.what());
  }
  data_point p;
  if (!j.contains("x") || !j["x"].is_array()) {
    throw parse_error(lineno, "expected an \"x\" array");
  }
  p.coords = j["x"].get<std::vector<double>>();
  if (j.contains("y")) {
    int y = j["y"].get<int>();
    if (y != 1 && y != -1) throw parse_error(lineno, "label must be +1 or -1");
    p.label = y;
  }
  return p;
}

bool blank(const std::string& line) {
  for (char ch : line) {
    if (ch != ' ' && ch != '\t' && ch != '\r') return false;
  }
  return true;
}

}  // namespace

std::vector<data_point> read_points(std::istream& in, const function_family& family,
                                    const input_options& options) {
  std::vector<data_point> points;
  std::string line;
  size_t lineno = 0;
  bool format_known = false;
  bool ndjson = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    if (!format_known) {
      size_t first = line.find_first_not_of(" \t");
      ndjson = first != std::string::npos && line[first] == '{';
      format_known = true;
    }
    data_point raw = ndjson ? ndjson_point(line, lineno) : csv_point(line, lineno, options);
    if (raw.dim() != family.dim) {
      throw parse_error(lineno, "expected dimension " + std::to_string(family.dim) +
                                    ", got " + std::to_string(raw.dim()));
    }
    try {
      points.push_back(prepare_point(family, std::move(raw), options.policy));
    } catch (const std::invalid_argument& e) {
      throw parse_error(lineno, e.what());
    }
  }
  return points;
}

query_set read_queries(std::istream& in, size_t expected_dim) {
  query_set out;
  out.provenance = query_provenance::random_seeded;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = split_csv(line);
    if (fields.size() != expected_dim) {
      throw parse_error(lineno, "expected " + std::to_string(expected_dim) +
                                    " columns, got " + std::to_string(fields.size()));
    }
    std::vector<double> q(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) q[i] = parse_double(fields[i], lineno, i);
    out.queries.push_back(std::move(q));
  }
  return out;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace disccore
