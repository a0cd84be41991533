#include "disccore/signs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace disccore {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double kernel_value(const function_family& family, const data_point& a, const data_point& b) {
  return evaluate(family, a, b.coords);
}

}  // namespace

sign_assignment greedy_kernel_signs(const function_family& family,
                                    std::span<const data_point> points,
                                    std::vector<double>* prefix_quadratic) {
  require(is_psd_kernel(family.kind), "greedy signs require a PSD kernel kind");
  require(!points.empty(), "greedy signs require at least one point");

  const size_t m = points.size();
  sign_assignment out;
  out.signs.assign(m, 1);
  out.kind = certificate_kind::gram_bound;
  if (prefix_quadratic) {
    prefix_quadratic->clear();
    prefix_quadratic->reserve(m);
  }

  // quad tracks sigma^T G_i sigma; the induction keeps it <= sum_j K(x_j,x_j).
  double quad = kernel_value(family, points[0], points[0]);
  if (prefix_quadratic) prefix_quadratic->push_back(quad);

  for (size_t i = 1; i < m; ++i) {
    compensated_sum running;  // sum_{j<i} sigma_j K(x_j, x_i)
    for (size_t j = 0; j < i; ++j) {
      running.add(out.signs[j] * kernel_value(family, points[j], points[i]));
    }
    double r = running.value();
    int sigma = r >= 0.0 ? -1 : 1;  // -sign(r), sign(0) := +1
    out.signs[i] = sigma;
    quad += kernel_value(family, points[i], points[i]) + 2.0 * sigma * r;
    if (prefix_quadratic) prefix_quadratic->push_back(quad);
  }

  out.certificate = std::sqrt(std::max(0.0, quad));
  return out;
}

sign_assignment sorted_quantile_signs(std::span<const data_point> points) {
  require(!points.empty(), "quantile signs require at least one point");
  for (const auto& p : points) require(p.dim() == 1, "quantile signs require scalar points");

  std::vector<size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return points[a].coords[0] < points[b].coords[0];
  });

  sign_assignment out;
  out.signs.assign(points.size(), 1);
  for (size_t pos = 0; pos < order.size(); ++pos) {
    out.signs[order[pos]] = (pos % 2 == 0) ? 1 : -1;
  }
  // Alternating signs in sorted order keep every threshold partial sum in
  // {0,1}; the bound 1 is exact over the whole continuum.
  out.certificate = 1.0;
  out.kind = certificate_kind::gram_bound;
  return out;
}

namespace {

// Lexicographic comparison of sign masks over indices 1..m-1 (bit set = -1);
// +1 sorts before -1, earlier indices are more significant.
bool mask_lex_less(uint32_t a, uint32_t b) {
  uint32_t diff = a ^ b;
  if (diff == 0) return false;
  uint32_t low = diff & (~diff + 1);
  return (a & low) == 0;
}

}  // namespace

sign_assignment exhaustive_signs(const function_family& family,
                                 std::span<const data_point> points,
                                 const query_set& queries) {
  const size_t m = points.size();
  require(m >= 1, "exhaustive signs require at least one point");
  require(m <= exhaustive_sign_cap,
          "exhaustive signs capped at m <= " + std::to_string(exhaustive_sign_cap));

  const size_t nq = queries.size();
  // values[q][i] = f(x_i, q); query-major for the inner scan.
  std::vector<std::vector<double>> values(nq, std::vector<double>(m));
  for (size_t qi = 0; qi < nq; ++qi) {
    for (size_t i = 0; i < m; ++i) {
      values[qi][i] = evaluate(family, points[i], queries.queries[qi]);
    }
  }

  const uint32_t total = m == 1 ? 1u : (1u << (m - 1));
  uint32_t best_mask = 0;
  double best = -1.0;
  std::vector<int> sigma(m, 1);

  for (uint32_t mask = 0; mask < total; ++mask) {
    sigma[0] = 1;
    for (size_t i = 1; i < m; ++i) sigma[i] = (mask >> (i - 1)) & 1u ? -1 : 1;
    double worst = 0.0;
    for (size_t qi = 0; qi < nq; ++qi) {
      const auto& row = values[qi];
      double s = 0.0;
      for (size_t i = 0; i < m; ++i) s += sigma[i] * row[i];
      worst = std::max(worst, std::abs(s));
      if (best >= 0.0 && worst > best) break;  // cannot beat the incumbent
    }
    if (best < 0.0 || worst < best ||
        (worst == best && mask_lex_less(mask, best_mask))) {
      best = worst;
      best_mask = mask;
    }
  }

  sign_assignment out;
  out.signs.assign(m, 1);
  for (size_t i = 1; i < m; ++i) out.signs[i] = (best_mask >> (i - 1)) & 1u ? -1 : 1;
  out.certificate = std::max(0.0, best);
  out.kind = certificate_kind::exhaustive;
  return out;
}

discrepancy_measure empirical_discrepancy(const function_family& family,
                                          std::span<const data_point> points,
                                          std::span<const int> signs,
                                          const query_set& queries) {
  require(signs.size() == points.size(), "signs/points length mismatch");
  discrepancy_measure out;
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    compensated_sum acc;
    for (size_t i = 0; i < points.size(); ++i) {
      acc.add(signs[i] * evaluate(family, points[i], queries.queries[qi]));
    }
    double v = std::abs(acc.value());
    if (v > out.max_abs) {
      out.max_abs = v;
      out.argmax = qi;
    }
  }
  out.normalized = points.empty() ? 0.0 : out.max_abs / double(points.size());
  return out;
}

double gram_certificate(const function_family& family,
                        std::span<const data_point> points,
                        std::span<const int> signs) {
  require(is_psd_kernel(family.kind), "Gram certificate requires a PSD kernel kind");
  require(signs.size() == points.size(), "signs/points length mismatch");
  compensated_sum quad;
  for (size_t i = 0; i < points.size(); ++i) {
    quad.add(kernel_value(family, points[i], points[i]));
    for (size_t j = 0; j < i; ++j) {
      quad.add(2.0 * signs[i] * signs[j] * kernel_value(family, points[j], points[i]));
    }
  }
  return std::sqrt(std::max(0.0, quad.value()));
}

std::string sign_engine_name(sign_engine_kind k) {
  switch (k) {
    case sign_engine_kind::greedy_kernel: return "greedy";
    case sign_engine_kind::sorted_quantile: return "sorted_quantile";
    case sign_engine_kind::exhaustive: return "exhaustive";
  }
  throw std::logic_error("unknown engine kind");
}

sign_engine_kind sign_engine_from_name(const std::string& name) {
  if (name == "greedy") return sign_engine_kind::greedy_kernel;
  if (name == "sorted_quantile") return sign_engine_kind::sorted_quantile;
  if (name == "exhaustive") return sign_engine_kind::exhaustive;
  throw std::invalid_argument("unknown sign engine: " + name);
}

sign_assignment compute_signs(const function_family& family,
                              std::span<const data_point> points,
                              const sign_engine& engine) {
  switch (engine.kind) {
    case sign_engine_kind::greedy_kernel:
      return greedy_kernel_signs(family, points);
    case sign_engine_kind::sorted_quantile:
      require(family.kind == family_kind::quantile_indicator,
              "sorted_quantile engine requires the quantile family");
      return sorted_quantile_signs(points);
    case sign_engine_kind::exhaustive:
      return exhaustive_signs(family, points, engine.queries);
  }
  throw std::logic_error("unknown engine kind");
}

}  // namespace disccore
