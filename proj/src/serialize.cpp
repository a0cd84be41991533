#include "disccore/serialize.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace disccore {

namespace {

using nlohmann::json;

json family_to_json(const function_family& f) {
  return json{{"kind", family_kind_name(f.kind)},
              {"bandwidth", f.bandwidth},
              {"radius", f.radius},
              {"dim", f.dim}};
}

function_family family_from_json(const json& j) {
  function_family f;
  f.kind = family_kind_from_name(j.at("kind").get<std::string>());
  f.bandwidth = j.at("bandwidth").get<double>();
  f.radius = j.at("radius").get<double>();
  f.dim = j.at("dim").get<size_t>();
  return f;
}

json point_to_json(const data_point& p) {
  json j{{"x", p.coords}};
  if (p.label.has_value()) j["y"] = *p.label;
  return j;
}

data_point point_from_json(const json& j) {
  data_point p;
  p.coords = j.at("x").get<std::vector<double>>();
  if (j.contains("y")) p.label = j.at("y").get<int>();
  return p;
}

json engine_to_json(const sign_engine& e) {
  json j{{"kind", sign_engine_name(e.kind)}};
  if (e.kind == sign_engine_kind::exhaustive) {
    j["queries"] = e.queries.queries;
  }
  return j;
}

sign_engine engine_from_json(const json& j) {
  sign_engine e;
  e.kind = sign_engine_from_name(j.at("kind").get<std::string>());
  if (j.contains("queries")) {
    e.queries.queries = j.at("queries").get<std::vector<std::vector<double>>>();
  }
  return e;
}

json budget_to_json(const budget_params& b) {
  return json{{"m", b.m},
              {"n_tilde", b.n_tilde},
              {"hprime_offset", b.hprime_offset},
              {"regime", certificate_regime_name(b.regime)},
              {"epsilon", b.epsilon},
              {"delta", b.delta}};
}

budget_params budget_from_json(const json& j) {
  budget_params b;
  b.m = j.at("m").get<size_t>();
  b.n_tilde = j.at("n_tilde").get<size_t>();
  b.hprime_offset = j.at("hprime_offset").get<int>();
  b.regime = certificate_regime_from_name(j.at("regime").get<std::string>());
  b.epsilon = j.at("epsilon").get<double>();
  b.delta = j.at("delta").get<double>();
  return b;
}

json parse_line(const std::string& line, size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error("record " + std::to_string(lineno) + ": " + e.what());
  }
}

void check_version(const json& header) {
  int v = header.at("format_version").get<int>();
  if (v != format_version) {
    throw std::runtime_error("unsupported format_version " + std::to_string(v) +
                             " (expected " + std::to_string(format_version) + ")");
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string serialize_sketch(const compactor_stack& stack) {
  const stack_config& cfg = stack.config();
  json header{{"format_version", format_version},
              {"kind", "sketch"},
              {"family", family_to_json(cfg.family)},
              {"engine", engine_to_json(cfg.engine)},
              {"policy", stack_policy_name(cfg.policy)},
              {"budget", budget_to_json(cfg.budget)},
              {"seed", cfg.seed},
              {"n", stack.total_count()},
              {"levels", stack.levels().size()},
              {"certificate", stack.det_certificate()}};
  std::string out = header.dump();
  out.push_back('\n');
  for (const compactor& c : stack.levels()) {
    json points = json::array();
    for (const auto& p : c.buffer) points.push_back(point_to_json(p));
    json level{{"level", c.level},
               {"observed", c.observed},
               {"compactions", c.compactions},
               {"buffer", std::move(points)}};
    out += level.dump();
    out.push_back('\n');
  }
  return out;
}

compactor_stack deserialize_sketch(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw std::runtime_error("empty sketch file");
  json header = parse_line(lines[0], 1);
  check_version(header);
  if (header.at("kind").get<std::string>() != "sketch") {
    throw std::runtime_error("not a sketch file");
  }

  stack_config cfg;
  cfg.family = family_from_json(header.at("family"));
  cfg.engine = engine_from_json(header.at("engine"));
  cfg.policy = stack_policy_from_name(header.at("policy").get<std::string>());
  cfg.budget = budget_from_json(header.at("budget"));
  cfg.seed = header.at("seed").get<uint64_t>();

  size_t level_count = header.at("levels").get<size_t>();
  if (lines.size() != 1 + level_count) {
    throw std::runtime_error("sketch file level count mismatch");
  }
  std::vector<compactor> levels(level_count);
  for (size_t i = 0; i < level_count; ++i) {
    json j = parse_line(lines[1 + i], 2 + i);
    compactor& c = levels[i];
    c.level = j.at("level").get<int>();
    if (c.level != static_cast<int>(i)) throw std::runtime_error("levels out of order");
    c.observed = j.at("observed").get<uint64_t>();
    c.compactions = j.at("compactions").get<uint64_t>();
    for (const auto& pj : j.at("buffer")) c.buffer.push_back(point_from_json(pj));
  }

  return compactor_stack(std::move(cfg), std::move(levels),
                         header.at("n").get<uint64_t>(),
                         header.at("certificate").get<double>());
}

std::string serialize_coreset(const weighted_coreset& coreset) {
  json header{{"format_version", format_version},
              {"kind", "coreset"},
              {"family", family_to_json(coreset.family)},
              {"engine", sign_engine_name(coreset.engine)},
              {"n", coreset.source_size},
              {"halving_rounds", coreset.halving_rounds},
              {"certificate", coreset.certificate}};
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& wp : coreset.entries) {
    json e = point_to_json(wp.point);
    e["w"] = wp.weight;
    out += e.dump();
    out.push_back('\n');
  }
  return out;
}

weighted_coreset deserialize_coreset(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw std::runtime_error("empty coreset file");
  json header = parse_line(lines[0], 1);
  check_version(header);
  if (header.at("kind").get<std::string>() != "coreset") {
    throw std::runtime_error("not a coreset file");
  }
  weighted_coreset out;
  out.family = family_from_json(header.at("family"));
  out.engine = sign_engine_from_name(header.at("engine").get<std::string>());
  out.source_size = header.at("n").get<size_t>();
  out.halving_rounds = header.at("halving_rounds").get<int>();
  out.certificate = header.at("certificate").get<double>();
  for (size_t i = 1; i < lines.size(); ++i) {
    json j = parse_line(lines[i], 1 + i);
    weighted_point wp;
    wp.point = point_from_json(j);
    wp.weight = j.at("w").get<double>();
    out.entries.push_back(std::move(wp));
  }
  return out;
}

std::string sketch_file_kind(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw std::runtime_error("empty file");
  json header = parse_line(lines[0], 1);
  check_version(header);
  return header.at("kind").get<std::string>();
}

}  // namespace disccore
