#pragma once

#include <span>
#include <vector>

#include "disccore/family.hpp"
#include "disccore/point.hpp"
#include "disccore/queries.hpp"
#include "disccore/signs.hpp"

namespace disccore {

// Small weighted subset evaluating F~(q) = sum_i w_i f(x_i,q). With pure
// halving every weight is 2^halving_rounds and |F~(q) - F(q)| <= certificate
// for every query the certificate kind covers.
struct weighted_coreset {
  std::vector<weighted_point> entries;
  size_t source_size = 0;
  function_family family;
  int halving_rounds = 0;
  double certificate = 0.0;
  sign_engine_kind engine = sign_engine_kind::greedy_kernel;

  size_t size() const { return entries.size(); }
};

struct halve_result {
  std::vector<weighted_point> kept;  // the smaller half, weights doubled
  double certificate = 0.0;          // engine certificate x common input weight
};

// One halving round. Input weights must be uniform. Keeps whichever sign
// half is smaller (tie -> the +1 half) with doubled weights.
halve_result halve(const function_family& family,
                   const std::vector<weighted_point>& points,
                   const sign_engine& engine);

// Iterated halving until the entry count is <= target_size. target >= n
// returns the input at unit weight with certificate 0.
weighted_coreset build_coreset(const function_family& family,
                               std::span<const data_point> points,
                               size_t target_size, const sign_engine& engine);

// Fact-based eps -> m mapping: 1/eps for 1/m-certificate engines,
// 1/eps^2 for sqrt(m)-certificate engines.
size_t coreset_size_for_epsilon(sign_engine_kind engine, double epsilon);

double coreset_evaluate(const weighted_coreset& coreset, std::span<const double> q);

struct erm_result {
  size_t exact_argmin = 0;    // argmin over queries of F
  size_t coreset_argmin = 0;  // argmin over queries of F~
  double gap = 0.0;           // (F(q~) - F(q*)) / n, >= 0
  double gap_bound = 0.0;     // 2 * certificate / n
};

// Finite ERM transfer check: minimizes both F and F~ over the query set.
// For gram-certified coresets the gap must not exceed gap_bound; violation
// throws (it would mean an unsound certificate).
erm_result erm_transfer_check(const function_family& family,
                              std::span<const data_point> points,
                              const weighted_coreset& coreset,
                              const query_set& queries);

}  // namespace disccore
