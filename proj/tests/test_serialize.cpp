#include <doctest.h>

#include <stdexcept>

#include "disccore/harness.hpp"
#include "disccore/rng.hpp"
#include "disccore/serialize.hpp"

using namespace disccore;

namespace {

compactor_stack random_stack(uint64_t seed) {
  rng r(seed);
  stack_config cfg;
  switch (r.below(3)) {
    case 0:
      cfg.policy = stack_policy::det_halving;
      break;
    case 1:
      cfg.policy = stack_policy::kll_shrinking;
      break;
    default:
      cfg.policy = stack_policy::sample_then_sketch;
      break;
  }
  if (r.below(2) == 0) {
    cfg.family = quantile_family();
    cfg.engine = quantile_engine();
    cfg.budget.regime = certificate_regime::one_over_m;
  } else {
    cfg.family = gaussian_family(2, 0.5 + r.uniform());
    cfg.engine = greedy_engine();
    cfg.budget.regime = certificate_regime::inv_sqrt_m;
  }
  cfg.budget.m = 4 + r.below(24);
  cfg.budget.n_tilde = 50 + r.below(200);
  cfg.budget.hprime_offset = int(r.below(4));
  cfg.budget.epsilon = 0.05 + 0.2 * r.uniform();
  cfg.budget.delta = 0.05 + 0.2 * r.uniform();
  cfg.seed = r.next();

  compactor_stack s(cfg);
  size_t count = r.below(400);
  for (size_t i = 0; i < count; ++i) {
    if (cfg.family.kind == family_kind::quantile_indicator) {
      s.push(data_point{r.uniform(0.0, 100.0)});
    } else {
      s.push(data_point{{r.uniform(0.0, 4.0), r.uniform(0.0, 4.0)}});
    }
  }
  return s;
}

}  // namespace

TEST_CASE("sketch serialization round-trips byte-identically") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    compactor_stack s = random_stack(seed);
    std::string once = serialize_sketch(s);
    compactor_stack restored = deserialize_sketch(once);
    std::string twice = serialize_sketch(restored);
    REQUIRE(once == twice);
    CHECK(restored.total_count() == s.total_count());
    CHECK(restored.det_certificate() == s.det_certificate());
    CHECK(restored.live_items() == s.live_items());
  }
}

TEST_CASE("restored sketches continue exactly like the original") {
  auto data = uniform_points(3000, 1, 0.0, 10.0, 77);
  for (stack_policy policy : {stack_policy::det_halving, stack_policy::kll_shrinking,
                              stack_policy::sample_then_sketch}) {
    stack_config cfg;
    cfg.family = quantile_family();
    cfg.engine = quantile_engine();
    cfg.policy = policy;
    cfg.budget.m = 16;
    cfg.budget.n_tilde = 300;
    cfg.budget.hprime_offset = 2;
    cfg.seed = 9;

    compactor_stack full(cfg);
    for (const auto& p : data) full.push(p);

    compactor_stack half(cfg);
    for (size_t i = 0; i < data.size() / 2; ++i) half.push(data[i]);
    compactor_stack resumed = deserialize_sketch(serialize_sketch(half));
    for (size_t i = data.size() / 2; i < data.size(); ++i) resumed.push(data[i]);

    CHECK(serialize_sketch(resumed) == serialize_sketch(full));
  }
}

TEST_CASE("version and kind mismatches are rejected") {
  compactor_stack s = random_stack(3);
  std::string text = serialize_sketch(s);
  std::string bumped = text;
  size_t pos = bumped.find("\"format_version\":1");
  REQUIRE(pos != std::string::npos);
  bumped.replace(pos, 18, "\"format_version\":2");
  CHECK_THROWS(deserialize_sketch(bumped));

  weighted_coreset cs = build_coreset(quantile_family(),
                                      uniform_points(32, 1, 0.0, 1.0, 5), 8,
                                      quantile_engine());
  CHECK_THROWS(deserialize_sketch(serialize_coreset(cs)));
  CHECK_THROWS(deserialize_coreset(text));
  CHECK_THROWS(deserialize_sketch(""));
}

TEST_CASE("coreset serialization round-trips byte-identically") {
  auto pts = uniform_points(300, 2, 0.0, 3.0, 21);
  weighted_coreset cs = build_coreset(gaussian_family(2, 1.0), pts, 20, greedy_engine());
  std::string once = serialize_coreset(cs);
  weighted_coreset restored = deserialize_coreset(once);
  CHECK(serialize_coreset(restored) == once);
  CHECK(restored.source_size == cs.source_size);
  CHECK(restored.certificate == cs.certificate);
  REQUIRE(restored.size() == cs.size());
  for (size_t i = 0; i < cs.size(); ++i) {
    CHECK(restored.entries[i].point == cs.entries[i].point);
    CHECK(restored.entries[i].weight == cs.entries[i].weight);
  }

  // labels survive the trip
  weighted_coreset labeled;
  labeled.family = gaussian_family(1, 1.0);
  labeled.entries.push_back({data_point{{0.5}, -1}, 2.0});
  weighted_coreset back = deserialize_coreset(serialize_coreset(labeled));
  CHECK(back.entries[0].point.label == -1);
}

TEST_CASE("exhaustive engine queries survive sketch round-trips") {
  auto pts = uniform_points(40, 1, 0.0, 5.0, 31);
  stack_config cfg;
  cfg.family = quantile_family();
  cfg.engine = exhaustive_engine(quantile_threshold_queries(pts));
  cfg.policy = stack_policy::det_halving;
  cfg.budget.m = 10;
  compactor_stack s(cfg);
  for (const auto& p : pts) s.push(p);
  std::string once = serialize_sketch(s);
  compactor_stack restored = deserialize_sketch(once);
  CHECK(restored.config().engine.kind == sign_engine_kind::exhaustive);
  CHECK(restored.config().engine.queries.queries == cfg.engine.queries.queries);
  CHECK(serialize_sketch(restored) == once);
}

TEST_CASE("sketch_file_kind distinguishes the two formats") {
  compactor_stack s = random_stack(11);
  CHECK(sketch_file_kind(serialize_sketch(s)) == "sketch");
  weighted_coreset cs;
  cs.family = quantile_family();
  CHECK(sketch_file_kind(serialize_coreset(cs)) == "coreset");
}
