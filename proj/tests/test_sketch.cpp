#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "disccore/harness.hpp"
#include "disccore/rng.hpp"
#include "disccore/sketch.hpp"

using namespace disccore;

namespace {

stack_config quantile_config(stack_policy policy, size_t m, uint64_t seed = 1,
                             size_t n_tilde = 0, int hprime_offset = 0) {
  stack_config cfg;
  cfg.family = quantile_family();
  cfg.engine = quantile_engine();
  cfg.policy = policy;
  cfg.budget.m = m;
  cfg.budget.n_tilde = n_tilde;
  cfg.budget.hprime_offset = hprime_offset;
  cfg.budget.regime = certificate_regime::one_over_m;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("budget_for: pinned example, monotonicity, n_tilde arithmetic") {
  budget_params b = budget_for(stack_policy::det_halving, certificate_regime::one_over_m,
                               0.5, 0.1, 16, 1.0);
  CHECK(b.m == 17);  // ceil(4*ln(8)/0.5)

  budget_params tighter = budget_for(stack_policy::det_halving,
                                     certificate_regime::one_over_m, 0.25, 0.1, 16, 1.0);
  CHECK(tighter.m > b.m);

  budget_params sq = budget_for(stack_policy::det_halving, certificate_regime::inv_sqrt_m,
                                0.1, 0.1, 10000, 1.0);
  double l = std::log(0.01 * 10000);
  CHECK(sq.m == size_t(std::ceil(4.0 * l * l / 0.01)));

  // halving delta always adds exactly ceil(8*ln2/eps^2)
  double eps = 0.05;
  size_t step = size_t(std::ceil(8.0 * std::log(2.0) / (eps * eps)));
  for (double delta : {0.2, 0.1, 0.05, 0.02}) {
    budget_params d1 = budget_for(stack_policy::sample_then_sketch,
                                  certificate_regime::one_over_m, eps, delta, 1000, 1.0);
    budget_params d2 = budget_for(stack_policy::sample_then_sketch,
                                  certificate_regime::one_over_m, eps, delta / 2, 1000, 1.0);
    CHECK(d2.n_tilde - d1.n_tilde == step);
  }

  CHECK_THROWS_AS(budget_for(stack_policy::det_halving, certificate_regime::one_over_m,
                             0.0, 0.1, 16, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(budget_for(stack_policy::det_halving, certificate_regime::one_over_m,
                             0.5, 1.5, 16, 1.0),
                  std::invalid_argument);
}

TEST_CASE("push: first item sits in level 0") {
  compactor_stack s(quantile_config(stack_policy::det_halving, 8));
  s.push(data_point{1.0});
  CHECK(s.top_level() == 0);
  CHECK(s.live_items() == 1);
  CHECK(s.levels()[0].compactions == 0);
}

TEST_CASE("push: a full buffer of identical points compacts with zero certificate") {
  stack_config cfg;
  cfg.family = gaussian_family(1, 1.0);
  cfg.engine = greedy_engine();
  cfg.policy = stack_policy::det_halving;
  cfg.budget.m = 8;
  compactor_stack s(cfg);
  for (int i = 0; i < 8; ++i) s.push(data_point{2.5});
  CHECK(s.top_level() == 1);
  CHECK(s.levels()[1].buffer.size() <= 4);
  CHECK(s.det_certificate() <= 1e-9);  // identical points cancel pairwise
}

TEST_CASE("det stream: height bound, memory bound, per-compaction debug check") {
  const size_t m = 32;
  const size_t n = 10 * m;
  auto data = uniform_points(n, 1, 0.0, 100.0, 5);
  query_set debug = quantile_threshold_queries(data);

  stack_config cfg = quantile_config(stack_policy::det_halving, m);
  cfg.debug_queries = &debug;  // throws if any compaction exceeds its certificate
  compactor_stack s(cfg);
  for (size_t i = 0; i < n; ++i) {
    s.push(data[i]);
    CHECK(s.live_items() <= size_t(s.top_level() + 1) * m);
    int bound = int(std::floor(std::log2(double(std::max<size_t>(i + 1, m)) / double(m)))) + 1;
    CHECK(s.top_level() <= std::max(bound, 0));
  }
  CHECK(s.total_count() == n);
  // the top compactor has never produced output
  CHECK(s.levels().back().compactions == 0);
}

TEST_CASE("run_compaction: deterministic mode on an identical pair") {
  function_family g = gaussian_family(1, 1.0);
  std::vector<data_point> pair{data_point{3.0}, data_point{3.0}};
  compaction_result r =
      run_compaction(g, greedy_engine(), compactor_mode::deterministic, pair, 0);
  REQUIRE(r.emitted.size() == 1);
  CHECK(r.certificate == 0.0);
}

TEST_CASE("run_compaction: shrinking mode is seeded and reproducible") {
  std::vector<data_point> buf{data_point{1.0}, data_point{2.0}, data_point{3.0},
                              data_point{4.0}};
  auto a = run_compaction(quantile_family(), quantile_engine(), compactor_mode::shrinking,
                          buf, 0);
  auto b = run_compaction(quantile_family(), quantile_engine(), compactor_mode::shrinking,
                          buf, 0);
  CHECK(a.emitted.size() == b.emitted.size());
  CHECK(a.emitted[0] == b.emitted[0]);
  // word bit selects X+ vs X-
  auto plus = run_compaction(quantile_family(), quantile_engine(),
                             compactor_mode::shrinking, buf, 0);
  auto minus = run_compaction(quantile_family(), quantile_engine(),
                              compactor_mode::shrinking, buf, 1);
  CHECK(plus.emitted[0].coords[0] == 1.0);   // sorted-even half
  CHECK(minus.emitted[0].coords[0] == 2.0);  // sorted-odd half
}

TEST_CASE("run_compaction: reservoir picks one of the pair") {
  std::vector<data_point> pair{data_point{1.0}, data_point{2.0}};
  auto first = run_compaction(quantile_family(), quantile_engine(),
                              compactor_mode::reservoir, pair, 2);
  auto second = run_compaction(quantile_family(), quantile_engine(),
                               compactor_mode::reservoir, pair, 3);
  CHECK(first.emitted[0].coords[0] == 1.0);
  CHECK(second.emitted[0].coords[0] == 2.0);
}

TEST_CASE("randomized compaction error is zero-mean over seeds") {
  // Monte-Carlo of a single compaction at a fixed query.
  auto buf = uniform_points(16, 1, 0.0, 10.0, 99);
  std::vector<double> q{4.2};
  function_family fam = quantile_family();
  double buffer_sum = sum_evaluate(fam, buf, q);

  auto trial_error = [&](compactor_mode mode, uint64_t word,
                         std::span<const data_point> items) {
    compaction_result r = run_compaction(fam, quantile_engine(), mode, items, word);
    double emitted = 0.0;
    for (const auto& p : r.emitted) emitted += evaluate(fam, p, q);
    double exact = mode == compactor_mode::reservoir
                       ? evaluate(fam, items[0], q) + evaluate(fam, items[1], q)
                       : buffer_sum;
    return exact - 2.0 * emitted;
  };

  const int trials = 10000;
  for (compactor_mode mode : {compactor_mode::shrinking, compactor_mode::reservoir}) {
    std::span<const data_point> items =
        mode == compactor_mode::reservoir ? std::span<const data_point>(buf).subspan(0, 2)
                                          : std::span<const data_point>(buf);
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
      double e = trial_error(mode, stream_word(7, 0, uint64_t(t)), items);
      sum += e;
      sumsq += e * e;
    }
    double mean = sum / trials;
    double var = std::max(0.0, sumsq / trials - mean * mean);
    double se = std::sqrt(var / double(trials - 1));
    CHECK(std::abs(mean) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("kll_shrinking: capacities shrink geometrically below H'") {
  stack_config cfg = quantile_config(stack_policy::kll_shrinking, 24, 3, 0, 2);
  compactor_stack s(cfg);
  auto data = uniform_points(4096, 1, 0.0, 1.0, 12);
  for (const auto& p : data) {
    s.push(p);
    CHECK(s.live_items() <= s.capacity_limit());
  }
  int hp = s.randomized_boundary();
  CHECK(hp >= 1);  // deep enough stream
  size_t shrunk_total = 0;
  for (int h = 0; h <= hp; ++h) {
    size_t expect = std::max<size_t>(
        2, size_t(std::ceil(24.0 * std::pow(2.0 / 3.0, double(hp - h)))));
    CHECK(s.levels()[h].capacity == expect);
    CHECK(s.levels()[h].mode == compactor_mode::shrinking);
    shrunk_total += s.levels()[h].capacity;
  }
  CHECK(shrunk_total <= 3 * 24 + 2 * size_t(hp));
  for (int h = hp + 1; h <= s.top_level(); ++h) {
    CHECK(s.levels()[h].capacity == 24);
    CHECK(s.levels()[h].mode == compactor_mode::deterministic);
  }
}

TEST_CASE("kll_shrinking is deterministic given the seed") {
  auto data = uniform_points(2000, 1, 0.0, 1.0, 8);
  auto run = [&](uint64_t seed) {
    compactor_stack s(quantile_config(stack_policy::kll_shrinking, 16, seed, 0, 2));
    for (const auto& p : data) s.push(p);
    return s.finalize();
  };
  sketch_summary a = run(5), b = run(5), c = run(6);
  REQUIRE(a.coreset.size() == b.coreset.size());
  for (size_t i = 0; i < a.coreset.size(); ++i) {
    CHECK(a.coreset.entries[i].point == b.coreset.entries[i].point);
    CHECK(a.coreset.entries[i].weight == b.coreset.entries[i].weight);
  }
  CHECK(a.certificate == b.certificate);
  bool differs = c.coreset.size() != a.coreset.size();
  for (size_t i = 0; !differs && i < a.coreset.size(); ++i) {
    differs = !(a.coreset.entries[i].point == c.coreset.entries[i].point);
  }
  CHECK(differs);
}

TEST_CASE("sample_then_sketch: saturated levels run reservoirs") {
  stack_config cfg = quantile_config(stack_policy::sample_then_sketch, 16, 2, 100, 0);
  compactor_stack s(cfg);
  auto data = uniform_points(3000, 1, 0.0, 1.0, 9);
  for (const auto& p : data) {
    s.push(p);
    CHECK(s.live_items() <= s.capacity_limit());
  }
  REQUIRE(s.levels()[0].observed == 3000);
  CHECK(s.levels()[0].mode == compactor_mode::reservoir);
  CHECK(s.levels()[0].capacity == 2);
  // top level has seen little and stays deterministic
  CHECK(s.levels().back().mode == compactor_mode::deterministic);
}

TEST_CASE("finalize: never-compacted stack is exact") {
  compactor_stack s(quantile_config(stack_policy::det_halving, 64));
  auto data = uniform_points(20, 1, 0.0, 1.0, 3);
  for (const auto& p : data) s.push(p);
  sketch_summary sum = s.finalize();
  REQUIRE(sum.coreset.size() == 20);
  for (const auto& wp : sum.coreset.entries) CHECK(wp.weight == 1.0);
  CHECK(sum.certificate == 0.0);
  CHECK(max_rank_error(data, sum.coreset) == 0);
}

TEST_CASE("finalize: summary size bounded by the capacity budget") {
  compactor_stack s(quantile_config(stack_policy::det_halving, 32));
  auto data = uniform_points(5000, 1, 0.0, 100.0, 6);
  for (const auto& p : data) s.push(p);
  sketch_summary sum = s.finalize();
  CHECK(sum.coreset.size() <= size_t(s.top_level() + 1) * 32);
  CHECK(double(max_rank_error(data, sum.coreset)) <= sum.certificate);
  CHECK(sum.levels.size() == size_t(s.top_level() + 1));
}

TEST_CASE("finalize: gaussian det stream stays within its certificate") {
  stack_config cfg;
  cfg.family = gaussian_family(2, 1.0);
  cfg.engine = greedy_engine();
  cfg.policy = stack_policy::det_halving;
  cfg.budget.m = 64;
  cfg.budget.regime = certificate_regime::inv_sqrt_m;
  compactor_stack s(cfg);
  auto data = uniform_points(2000, 2, 0.0, 4.0, 14);
  for (const auto& p : data) s.push(p);
  sketch_summary sum = s.finalize();
  query_set qs = sample_queries(cfg.family, 300, 21, data);
  sweep_result sweep = error_sweep(cfg.family, data, sum.coreset, qs);
  CHECK(sweep.max_abs_error <= sum.certificate + 1e-9);
}

TEST_CASE("merge: identity with an empty stack") {
  auto data = uniform_points(500, 1, 0.0, 9.0, 4);
  compactor_stack s(quantile_config(stack_policy::det_halving, 16, 7));
  for (const auto& p : data) s.push(p);
  compactor_stack empty(quantile_config(stack_policy::det_halving, 16, 7));

  const std::vector<compactor_stack> merged{merge(empty, s), merge(s, empty)};
  for (const auto& m : merged) {
    CHECK(m.total_count() == 500);
    CHECK(m.det_certificate() == s.det_certificate());
    sketch_summary ms = m.finalize();
    sketch_summary ss = s.finalize();
    REQUIRE(ms.coreset.size() == ss.coreset.size());
    for (size_t i = 0; i < ms.coreset.size(); ++i) {
      CHECK(ms.coreset.entries[i].point == ss.coreset.entries[i].point);
    }
  }
}

TEST_CASE("merge: rank error within combined certificates") {
  auto left = uniform_points(2000, 1, 0.0, 50.0, 10);
  auto right = uniform_points(2000, 1, 25.0, 90.0, 11);
  compactor_stack a(quantile_config(stack_policy::det_halving, 48, 5));
  compactor_stack b(quantile_config(stack_policy::det_halving, 48, 6));
  for (const auto& p : left) a.push(p);
  for (const auto& p : right) b.push(p);

  compactor_stack merged = merge(a, b);
  CHECK(merged.total_count() == 4000);

  std::vector<data_point> both = left;
  both.insert(both.end(), right.begin(), right.end());
  sketch_summary sum = merged.finalize();
  CHECK(double(max_rank_error(both, sum.coreset)) <= sum.certificate);
  CHECK(sum.certificate >= a.det_certificate() + b.det_certificate());
}

TEST_CASE("merge: parameter mismatches are rejected") {
  compactor_stack a(quantile_config(stack_policy::det_halving, 16));
  compactor_stack b(quantile_config(stack_policy::det_halving, 32));
  CHECK_THROWS_AS(merge(a, b), std::invalid_argument);
  compactor_stack c(quantile_config(stack_policy::kll_shrinking, 16));
  CHECK_THROWS_AS(merge(a, c), std::invalid_argument);
  stack_config other = quantile_config(stack_policy::det_halving, 16);
  other.family = gaussian_family(1, 1.0);
  other.engine = greedy_engine();
  compactor_stack d(other);
  CHECK_THROWS_AS(merge(a, d), std::invalid_argument);
}

TEST_CASE("stack constructor validates the configuration") {
  stack_config cfg = quantile_config(stack_policy::det_halving, 1);
  CHECK_THROWS_AS(compactor_stack{cfg}, std::invalid_argument);

  stack_config bad_engine;
  bad_engine.family = quantile_family();
  bad_engine.engine = greedy_engine();  // quantile is not a PSD kernel
  bad_engine.budget.m = 8;
  CHECK_THROWS_AS(compactor_stack{bad_engine}, std::invalid_argument);

  stack_config big_exhaustive;
  big_exhaustive.family = quantile_family();
  big_exhaustive.engine = exhaustive_engine({});
  big_exhaustive.budget.m = 64;  // over the enumeration cap
  CHECK_THROWS_AS(compactor_stack{big_exhaustive}, std::invalid_argument);

  compactor_stack ok(quantile_config(stack_policy::det_halving, 8));
  CHECK_THROWS_AS(ok.push(data_point{{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("merge: sample_then_sketch switches saturated levels during merge") {
  // each stack alone is under the n_tilde threshold; their union is not
  stack_config cfg = quantile_config(stack_policy::sample_then_sketch, 16, 3, 900, 0);
  compactor_stack a(cfg), b(cfg);
  auto left = uniform_points(600, 1, 0.0, 1.0, 1);
  auto right = uniform_points(600, 1, 0.0, 1.0, 2);
  for (const auto& p : left) a.push(p);
  for (const auto& p : right) b.push(p);
  CHECK(a.levels()[0].mode == compactor_mode::deterministic);
  compactor_stack merged = merge(a, b);
  CHECK(merged.levels()[0].observed == 1200);
  CHECK(merged.levels()[0].mode == compactor_mode::reservoir);
  CHECK(merged.levels()[0].buffer.size() <= 1);
  CHECK(merged.live_items() <= merged.capacity_limit());
}

TEST_CASE("merge: kll stacks of different heights recompact deterministically") {
  stack_config cfg = quantile_config(stack_policy::kll_shrinking, 16, 9, 0, 2);
  compactor_stack small(cfg), big(cfg);
  auto few = uniform_points(50, 1, 0.0, 1.0, 3);
  auto many = uniform_points(3000, 1, 0.0, 1.0, 4);
  for (const auto& p : few) small.push(p);
  for (const auto& p : many) big.push(p);
  REQUIRE(big.top_level() > small.top_level());

  compactor_stack m1 = merge(small, big);
  compactor_stack m2 = merge(small, big);
  CHECK(m1.total_count() == 3050);
  CHECK(m1.live_items() <= m1.capacity_limit());
  sketch_summary s1 = m1.finalize(), s2 = m2.finalize();
  REQUIRE(s1.coreset.size() == s2.coreset.size());
  for (size_t i = 0; i < s1.coreset.size(); ++i) {
    CHECK(s1.coreset.entries[i].point == s2.coreset.entries[i].point);
  }
}
