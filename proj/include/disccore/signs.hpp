#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "disccore/family.hpp"
#include "disccore/queries.hpp"

namespace disccore {

enum class certificate_kind { gram_bound, empirical, exhaustive };

// Signs sigma in {-1,+1}^m plus the bound achieved. gram_bound certificates
// upper-bound sup_q |sum_i sigma_i f(x_i,q)| over every query with
// f(q,q) <= 1; empirical/exhaustive certificates are the max over the
// query set they were measured on.
struct sign_assignment {
  std::vector<int> signs;
  double certificate = 0.0;
  certificate_kind kind = certificate_kind::empirical;
};

// Greedy balancing for PSD kernels: sigma_1 = +1, then
// sigma_i = -sign(sum_{j<i} sigma_j K(x_j,x_i)) with sign(0) := +1.
// Certificate sqrt(sigma^T G sigma) <= sqrt(m). O(m^2) kernel evaluations.
// prefix_quadratic, when given, receives sigma^T G_i sigma for each prefix.
sign_assignment greedy_kernel_signs(const function_family& family,
                                    std::span<const data_point> points,
                                    std::vector<double>* prefix_quadratic = nullptr);

// Scalar values sorted ascending, +1 at even sorted positions, -1 at odd;
// signs reported in input order. Certificate 1 holds over the whole
// threshold continuum. Ties keep input order.
sign_assignment sorted_quantile_signs(std::span<const data_point> points);

inline constexpr size_t exhaustive_sign_cap = 20;

// Brute-force minimizer of max_q |sum sigma_i f(x_i,q)| over the supplied
// queries, sigma_1 pinned to +1. Certificate ties break toward the
// lexicographically smallest sigma (+1 before -1).
sign_assignment exhaustive_signs(const function_family& family,
                                 std::span<const data_point> points,
                                 const query_set& queries);

struct discrepancy_measure {
  double max_abs = 0.0;    // max_q |sum sigma_i f(x_i,q)|
  double normalized = 0.0; // max_abs / m
  size_t argmax = 0;
};

discrepancy_measure empirical_discrepancy(const function_family& family,
                                          std::span<const data_point> points,
                                          std::span<const int> signs,
                                          const query_set& queries);

// sqrt(max(0, sigma^T G sigma)) for G_jk = K(x_j,x_k).
double gram_certificate(const function_family& family,
                        std::span<const data_point> points,
                        std::span<const int> signs);

// Engine selector shared by the coreset builder and the compactor stack.
enum class sign_engine_kind { greedy_kernel, sorted_quantile, exhaustive };

struct sign_engine {
  sign_engine_kind kind = sign_engine_kind::greedy_kernel;
  query_set queries;  // exhaustive only

  bool operator==(const sign_engine&) const = default;
};

inline sign_engine greedy_engine() { return {sign_engine_kind::greedy_kernel, {}}; }
inline sign_engine quantile_engine() { return {sign_engine_kind::sorted_quantile, {}}; }
inline sign_engine exhaustive_engine(query_set q) {
  return {sign_engine_kind::exhaustive, std::move(q)};
}

std::string sign_engine_name(sign_engine_kind k);
sign_engine_kind sign_engine_from_name(const std::string& name);

// Dispatch; validates engine/family compatibility.
sign_assignment compute_signs(const function_family& family,
                              std::span<const data_point> points,
                              const sign_engine& engine);

}  // namespace disccore
