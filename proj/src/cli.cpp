#include "disccore/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "disccore/coreset.hpp"
#include "disccore/harness.hpp"
#include "disccore/io.hpp"
#include "disccore/serialize.hpp"
#include "disccore/sketch.hpp"

namespace disccore::cli {

namespace {

struct family_flags {
  std::string kind = "gaussian";
  double bandwidth = 1.0;
  double radius = 1.0;
  size_t dim = 1;
  std::optional<size_t> label_col;
  std::string norm = "reject";
};

void add_family_flags(CLI::App* cmd, family_flags& f) {
  cmd->add_option("--family", f.kind,
                  "gaussian|laplacian|cauchy|logistic|sigmoid|covariance|quantile");
  cmd->add_option("--bandwidth", f.bandwidth, "kernel bandwidth");
  cmd->add_option("--radius", f.radius, "query radius for inner-product families");
  cmd->add_option("--dim", f.dim, "point dimension");
  cmd->add_option("--label-col", f.label_col, "CSV column holding the +/-1 label");
  cmd->add_option("--norm-policy", f.norm, "reject|rescale for over-norm points");
}

function_family resolve_family(const family_flags& f) {
  family_kind kind = family_kind_from_name(f.kind);
  function_family fam;
  fam.kind = kind;
  fam.bandwidth = f.bandwidth;
  fam.radius = f.radius;
  fam.dim = kind == family_kind::quantile_indicator ? 1 : f.dim;
  if (fam.bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be positive");
  if (fam.radius <= 0.0) throw std::invalid_argument("radius must be positive");
  return fam;
}

input_options resolve_input(const family_flags& f) {
  input_options opt;
  opt.label_col = f.label_col;
  if (f.norm == "reject") {
    opt.policy = norm_policy::reject;
  } else if (f.norm == "rescale") {
    opt.policy = norm_policy::rescale;
  } else {
    throw std::invalid_argument("norm-policy must be reject or rescale");
  }
  return opt;
}

uint64_t resolve_seed(std::optional<uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DISCCORE_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 12345;
}

sign_engine_kind default_engine(const function_family& f) {
  return f.kind == family_kind::quantile_indicator ? sign_engine_kind::sorted_quantile
                                                   : sign_engine_kind::greedy_kernel;
}

certificate_regime default_regime(sign_engine_kind engine) {
  return engine == sign_engine_kind::sorted_quantile ? certificate_regime::one_over_m
                                                     : certificate_regime::inv_sqrt_m;
}

sign_engine make_engine(sign_engine_kind kind, const function_family& family,
                        std::span<const data_point> data, size_t query_count,
                        uint64_t seed) {
  if (kind == sign_engine_kind::exhaustive) {
    return exhaustive_engine(sample_queries(family, query_count, seed, data));
  }
  sign_engine e;
  e.kind = kind;
  return e;
}

std::vector<data_point> load_points(const std::string& path, const function_family& family,
                                    const input_options& options) {
  std::string text = read_file(path);
  std::istringstream in(text);
  return read_points(in, family, options);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- build ---------------------------------------------------------------

struct build_options {
  std::string input;
  std::string out;
  family_flags family;
  std::optional<size_t> target_size;
  std::optional<double> epsilon;
  std::string engine;
  std::optional<uint64_t> seed;
  size_t oracle_queries = 256;
};

int run_build(const build_options& opt) {
  function_family family = resolve_family(opt.family);
  std::vector<data_point> points = load_points(opt.input, family, resolve_input(opt.family));

  sign_engine_kind kind =
      opt.engine.empty() ? default_engine(family) : sign_engine_from_name(opt.engine);
  size_t target;
  if (opt.target_size) {
    target = *opt.target_size;
  } else if (opt.epsilon) {
    target = coreset_size_for_epsilon(kind, *opt.epsilon);
  } else {
    throw std::invalid_argument("one of --target-size or --epsilon is required");
  }

  sign_engine engine =
      make_engine(kind, family, points, opt.oracle_queries, resolve_seed(opt.seed));
  weighted_coreset coreset = build_coreset(family, points, target, engine);
  write_file(opt.out, serialize_coreset(coreset));
  std::cerr << "n=" << coreset.source_size << " |S|=" << coreset.size()
            << " certificate=" << format_double(coreset.certificate) << "\n";
  return 0;
}

// --- stream --------------------------------------------------------------

struct stream_options {
  std::string input;
  std::string out;
  std::string resume;
  family_flags family;
  std::string policy = "det_halving";
  double epsilon = 0.1;
  double delta = 0.1;
  std::optional<uint64_t> seed;
  uint64_t n_hint = 1000000;
  double c = 1.0;
  std::string engine;
  std::string regime;
};

int run_stream(const stream_options& opt) {
  std::optional<compactor_stack> stack;
  function_family family;
  input_options in_opt;

  if (!opt.resume.empty()) {
    stack = deserialize_sketch(read_file(opt.resume));
    family = stack->config().family;
    in_opt = resolve_input(opt.family);
  } else {
    family = resolve_family(opt.family);
    in_opt = resolve_input(opt.family);
    sign_engine_kind kind =
        opt.engine.empty() ? default_engine(family) : sign_engine_from_name(opt.engine);
    certificate_regime regime = opt.regime.empty()
                                    ? default_regime(kind)
                                    : certificate_regime_from_name(opt.regime);
    stack_config cfg;
    cfg.family = family;
    cfg.policy = stack_policy_from_name(opt.policy);
    cfg.budget = budget_for(cfg.policy, regime, opt.epsilon, opt.delta, opt.n_hint, opt.c);
    cfg.seed = resolve_seed(opt.seed);
    cfg.engine = make_engine(kind, family, {}, 256, cfg.seed);
    stack.emplace(std::move(cfg));
  }

  std::string text = read_file(opt.input);
  std::istringstream in(text);
  for (data_point& p : read_points(in, family, in_opt)) {
    stack->push(std::move(p));
  }
  write_file(opt.out, serialize_sketch(*stack));
  std::cerr << "n=" << stack->total_count() << " levels=" << stack->levels().size()
            << " live=" << stack->live_items()
            << " certificate=" << format_double(stack->det_certificate()) << "\n";
  return 0;
}

// --- merge ---------------------------------------------------------------

struct merge_options {
  std::string a, b, out;
};

int run_merge(const merge_options& opt) {
  compactor_stack a = deserialize_sketch(read_file(opt.a));
  compactor_stack b = deserialize_sketch(read_file(opt.b));
  compactor_stack merged = merge(a, b);
  write_file(opt.out, serialize_sketch(merged));
  std::cerr << "n=" << merged.total_count() << " live=" << merged.live_items()
            << " certificate=" << format_double(merged.det_certificate()) << "\n";
  return 0;
}

// --- query ---------------------------------------------------------------

struct query_options {
  std::string sketch;
  std::string queries;
  size_t grid = 0;
  std::string data;
  std::string out;
  family_flags family;  // used when --data needs parsing options
};

int run_query(const query_options& opt) {
  std::string text = read_file(opt.sketch);
  weighted_coreset coreset;
  if (sketch_file_kind(text) == "sketch") {
    coreset = deserialize_sketch(text).finalize().coreset;
  } else {
    coreset = deserialize_coreset(text);
  }
  const function_family& family = coreset.family;

  query_set queries;
  if (!opt.queries.empty()) {
    std::istringstream in(read_file(opt.queries));
    queries = read_queries(in, family.dim);
  } else if (opt.grid > 0) {
    std::vector<data_point> pts;
    pts.reserve(coreset.size());
    for (const auto& wp : coreset.entries) pts.push_back(wp.point);
    bounding_box box = compute_bounding_box(pts, family.dim);
    if (is_distance_kernel(family.kind)) {
      for (size_t k = 0; k < box.dim(); ++k) {
        box.lo[k] -= 3.0 * family.bandwidth;
        box.hi[k] += 3.0 * family.bandwidth;
      }
    }
    queries = grid_queries(family, opt.grid, box);
  } else {
    throw std::invalid_argument("one of --queries or --grid is required");
  }

  std::vector<data_point> data;
  if (!opt.data.empty()) {
    input_options in_opt = resolve_input(opt.family);
    data = load_points(opt.data, family, in_opt);
  }

  std::ostringstream csv;
  csv << (data.empty() ? "index,estimate\n" : "index,estimate,exact,abs_error\n");
  for (size_t i = 0; i < queries.size(); ++i) {
    double estimate = coreset_evaluate(coreset, queries.queries[i]);
    csv << i << ',' << format_double(estimate);
    if (!data.empty()) {
      double exact = sum_evaluate(family, data, queries.queries[i]);
      csv << ',' << format_double(exact) << ',' << format_double(std::abs(exact - estimate));
    }
    csv << '\n';
  }
  if (opt.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(opt.out, csv.str());
  }
  return 0;
}

// --- oracle --------------------------------------------------------------

struct oracle_options {
  std::string input;
  std::string queries;
  size_t query_count = 256;
  std::optional<uint64_t> seed;
  std::string out;
  family_flags family;
};

int run_oracle(const oracle_options& opt) {
  function_family family = resolve_family(opt.family);
  std::vector<data_point> points = load_points(opt.input, family, resolve_input(opt.family));
  query_set queries;
  if (!opt.queries.empty()) {
    std::istringstream in(read_file(opt.queries));
    queries = read_queries(in, family.dim);
  } else {
    queries = sample_queries(family, opt.query_count, resolve_seed(opt.seed), points);
  }
  sign_assignment sa = exhaustive_signs(family, points, queries);
  nlohmann::json j{{"signs", sa.signs}, {"certificate", sa.certificate}};
  std::string body = j.dump();
  body.push_back('\n');
  if (opt.out.empty()) {
    std::cout << body;
  } else {
    write_file(opt.out, body);
  }
  return 0;
}

// --- bench ---------------------------------------------------------------

struct bench_options {
  std::string config;
};

int run_bench(const bench_options& opt) {
  nlohmann::json cfg = nlohmann::json::parse(read_file(opt.config));

  if (cfg.contains("scaling")) {
    const auto& s = cfg["scaling"];
    scaling_config sc;
    std::string kind = s.value("family", "gaussian");
    size_t dim = s.value("d", size_t{2});
    double bandwidth = s.value("bandwidth", 1.0);
    if (kind == "quantile") {
      sc.family = quantile_family();
    } else {
      sc.family = {family_kind_from_name(kind), bandwidth, 1.0, dim};
    }
    sc.m_values = s.value("m_values", std::vector<size_t>{16, 32, 64, 128, 256});
    sc.trials = s.value("trials", size_t{20});
    sc.query_count = s.value("queries", size_t{256});
    sc.seed = s.value("seed", uint64_t{1});
    sc.engines = s.value("engines", std::vector<std::string>{});
    scaling_result result = discrepancy_scaling_experiment(sc);
    std::ostringstream csv;
    write_scaling_csv(result, csv);
    write_file(s.value("out_csv", std::string("scaling.csv")), csv.str());
    for (const auto& [engine, slope] : result.slope) {
      std::cerr << "scaling " << engine << ": slope=" << format_double(slope)
                << " intercept=" << format_double(result.intercept.at(engine)) << "\n";
    }
  }

  if (cfg.contains("kde")) {
    const auto& k = cfg["kde"];
    kde_benchmark_config kc;
    kc.n = k.value("n", kc.n);
    kc.clusters = k.value("clusters", kc.clusters);
    kc.bandwidth = k.value("bandwidth", kc.bandwidth);
    kc.m = k.value("m", kc.m);
    kc.d = k.value("d", kc.d);
    kc.seeds = k.value("seeds", kc.seeds);
    kc.seed = k.value("seed", kc.seed);
    kc.query_count = k.value("queries", kc.query_count);
    kde_benchmark_result result = kde_clustered_benchmark(kc);
    write_file(k.value("out_json", std::string("kde.json")), kde_benchmark_json(result));
    std::cerr << "kde: greedy=" << format_double(result.mean_greedy_error)
              << " random=" << format_double(result.mean_random_error)
              << " wins=" << result.greedy_wins << "/" << result.trials.size() << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"discrepancy coresets and mergeable compactor sketches"};
  app.require_subcommand(1);

  build_options build;
  auto* cmd_build = app.add_subcommand("build", "build an offline coreset by halving");
  cmd_build->add_option("--input", build.input, "CSV or NDJSON points, - for stdin")->required();
  cmd_build->add_option("--out", build.out, "output coreset (NDJSON)")->required();
  add_family_flags(cmd_build, build.family);
  cmd_build->add_option("--target-size", build.target_size, "coreset size");
  cmd_build->add_option("--epsilon", build.epsilon, "additive error target");
  cmd_build->add_option("--engine", build.engine, "greedy|sorted_quantile|exhaustive");
  cmd_build->add_option("--seed", build.seed, "rng seed (env DISCCORE_SEED fallback)");
  cmd_build->add_option("--oracle-queries", build.oracle_queries,
                        "sampled query count for the exhaustive engine");

  stream_options stream;
  auto* cmd_stream = app.add_subcommand("stream", "feed a stream into a compactor stack");
  cmd_stream->add_option("--input", stream.input, "CSV or NDJSON points, - for stdin")->required();
  cmd_stream->add_option("--out", stream.out, "output sketch (NDJSON)")->required();
  add_family_flags(cmd_stream, stream.family);
  cmd_stream->add_option("--policy", stream.policy,
                         "det_halving|kll_shrinking|sample_then_sketch");
  cmd_stream->add_option("--epsilon", stream.epsilon, "additive error budget");
  cmd_stream->add_option("--delta", stream.delta, "failure probability (randomized policies)");
  cmd_stream->add_option("--seed", stream.seed, "rng seed (env DISCCORE_SEED fallback)");
  cmd_stream->add_option("--n-hint", stream.n_hint, "crude upper bound on the stream length");
  cmd_stream->add_option("--c", stream.c, "discrepancy constant of the family");
  cmd_stream->add_option("--engine", stream.engine, "greedy|sorted_quantile|exhaustive");
  cmd_stream->add_option("--regime", stream.regime, "one_over_m|inv_sqrt_m");
  cmd_stream->add_option("--resume", stream.resume, "existing sketch to continue");

  merge_options mrg;
  auto* cmd_merge = app.add_subcommand("merge", "merge two sketches");
  cmd_merge->add_option("--a", mrg.a, "first sketch")->required();
  cmd_merge->add_option("--b", mrg.b, "second sketch")->required();
  cmd_merge->add_option("--out", mrg.out, "output sketch")->required();

  query_options query;
  auto* cmd_query = app.add_subcommand("query", "evaluate a sketch or coreset");
  cmd_query->add_option("--sketch", query.sketch, "sketch or coreset file")->required();
  cmd_query->add_option("--queries", query.queries, "CSV query vectors");
  cmd_query->add_option("--grid", query.grid, "grid queries per axis (d <= 2)");
  cmd_query->add_option("--data", query.data, "original data for exact-vs-estimate columns");
  cmd_query->add_option("--out", query.out, "output CSV (default stdout)");
  add_family_flags(cmd_query, query.family);

  oracle_options oracle;
  auto* cmd_oracle = app.add_subcommand("oracle", "exhaustive signs for a small input");
  cmd_oracle->add_option("--input", oracle.input, "CSV or NDJSON points")->required();
  add_family_flags(cmd_oracle, oracle.family);
  cmd_oracle->add_option("--queries", oracle.queries, "CSV query vectors");
  cmd_oracle->add_option("--query-count", oracle.query_count, "sampled query count");
  cmd_oracle->add_option("--seed", oracle.seed, "rng seed");
  cmd_oracle->add_option("--out", oracle.out, "output JSON (default stdout)");

  bench_options bench;
  auto* cmd_bench = app.add_subcommand("bench", "run the evaluation harness");
  cmd_bench->add_option("--config", bench.config, "JSON config")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cmd_build->parsed()) return run_build(build);
    if (cmd_stream->parsed()) return run_stream(stream);
    if (cmd_merge->parsed()) return run_merge(mrg);
    if (cmd_query->parsed()) return run_query(query);
    if (cmd_oracle->parsed()) return run_oracle(oracle);
    if (cmd_bench->parsed()) return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace disccore::cli
