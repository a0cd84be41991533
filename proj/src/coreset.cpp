#include "disccore/coreset.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace disccore {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

halve_result halve(const function_family& family,
                   const std::vector<weighted_point>& points,
                   const sign_engine& engine) {
  if (points.empty()) return {};
  const double weight = points[0].weight;
  for (const auto& wp : points) {
    require(wp.weight == weight, "halve requires uniform input weights");
  }

  std::vector<data_point> raw;
  raw.reserve(points.size());
  for (const auto& wp : points) raw.push_back(wp.point);

  sign_assignment sa = compute_signs(family, raw, engine);

  size_t plus = 0;
  for (int s : sa.signs) plus += s > 0;
  const size_t minus = sa.signs.size() - plus;
  const int kept_sign = plus <= minus ? 1 : -1;  // tie -> +1 half

  halve_result out;
  out.kept.reserve(std::min(plus, minus));
  for (size_t i = 0; i < points.size(); ++i) {
    if (sa.signs[i] == kept_sign) {
      out.kept.push_back({points[i].point, weight * 2.0});
    }
  }
  out.certificate = sa.certificate * weight;
  return out;
}

weighted_coreset build_coreset(const function_family& family,
                               std::span<const data_point> points,
                               size_t target_size, const sign_engine& engine) {
  require(target_size >= 1, "target size must be >= 1");

  weighted_coreset out;
  out.family = family;
  out.source_size = points.size();
  out.engine = engine.kind;
  out.entries.reserve(points.size());
  for (const auto& p : points) out.entries.push_back({p, 1.0});

  compensated_sum certificate;
  while (out.entries.size() > target_size) {
    halve_result round = halve(family, out.entries, engine);
    out.entries = std::move(round.kept);
    certificate.add(round.certificate);
    ++out.halving_rounds;
  }
  out.certificate = certificate.value();
  return out;
}

size_t coreset_size_for_epsilon(sign_engine_kind engine, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
  double m = engine == sign_engine_kind::sorted_quantile ? 1.0 / epsilon
                                                         : 1.0 / (epsilon * epsilon);
  return static_cast<size_t>(std::ceil(m));
}

double coreset_evaluate(const weighted_coreset& coreset, std::span<const double> q) {
  compensated_sum acc;
  for (const auto& wp : coreset.entries) {
    acc.add(wp.weight * evaluate(coreset.family, wp.point, q));
  }
  return acc.value();
}

erm_result erm_transfer_check(const function_family& family,
                              std::span<const data_point> points,
                              const weighted_coreset& coreset,
                              const query_set& queries) {
  require(!queries.empty(), "ERM check needs a non-empty query set");

  erm_result out;
  double best_exact = std::numeric_limits<double>::infinity();
  double best_coreset = std::numeric_limits<double>::infinity();
  std::vector<double> exact(queries.size());
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    exact[qi] = sum_evaluate(family, points, queries.queries[qi]);
    if (exact[qi] < best_exact) {
      best_exact = exact[qi];
      out.exact_argmin = qi;
    }
    double approx = coreset_evaluate(coreset, queries.queries[qi]);
    if (approx < best_coreset) {
      best_coreset = approx;
      out.coreset_argmin = qi;
    }
  }

  const double n = points.empty() ? 1.0 : double(points.size());
  out.gap = (exact[out.coreset_argmin] - exact[out.exact_argmin]) / n;
  out.gap_bound = 2.0 * coreset.certificate / n;

  // Sound (gram-style) certificates must honor the ERM transfer bound;
  // exhaustive certificates are in-sample only, so no hard check there.
  if (coreset.engine != sign_engine_kind::exhaustive && out.gap > out.gap_bound + 1e-9) {
    throw std::logic_error("ERM transfer bound violated: gap " + std::to_string(out.gap) +
                           " > " + std::to_string(out.gap_bound));
  }
  return out;
}

}  // namespace disccore
