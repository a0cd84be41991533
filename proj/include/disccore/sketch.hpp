#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "disccore/coreset.hpp"
#include "disccore/family.hpp"
#include "disccore/point.hpp"
#include "disccore/signs.hpp"

namespace disccore {

enum class stack_policy { det_halving, kll_shrinking, sample_then_sketch };
enum class certificate_regime { one_over_m, inv_sqrt_m };
enum class compactor_mode { deterministic, shrinking, reservoir };

std::string stack_policy_name(stack_policy p);
stack_policy stack_policy_from_name(const std::string& name);
std::string certificate_regime_name(certificate_regime r);
certificate_regime certificate_regime_from_name(const std::string& name);

// Concrete parameters behind the asymptotic budgets. Constants are fixed
// here and validated by the end-to-end suites:
//   one_over_m:  m = ceil(4c  * ln(max(2, eps  *n/c  )) / eps  )
//   inv_sqrt_m:  m = ceil(4c^2* ln^2(max(2, eps^2*n/c^2)) / eps^2)
//   n_tilde = ceil(8*ln2/eps^2) * ceil(log2(2/delta))
//   hprime_offset = ceil(log2(log2(max(4, n_hint/delta))))
struct budget_params {
  size_t m = 2;
  size_t n_tilde = 0;
  int hprime_offset = 0;
  certificate_regime regime = certificate_regime::one_over_m;
  double epsilon = 0.0;
  double delta = 0.0;

  bool operator==(const budget_params&) const = default;
};

budget_params budget_for(stack_policy policy, certificate_regime regime,
                         double epsilon, double delta, uint64_t n_hint, double c);

// Leveled buffer. Items at level h carry weight 2^h (implied). The
// compaction counter doubles as the rng stream index for this level.
struct compactor {
  int level = 0;
  compactor_mode mode = compactor_mode::deterministic;
  size_t capacity = 2;
  std::vector<data_point> buffer;
  uint64_t observed = 0;
  uint64_t compactions = 0;
};

struct stack_config {
  function_family family;
  sign_engine engine;
  stack_policy policy = stack_policy::det_halving;
  budget_params budget;
  uint64_t seed = 0;
  // When set, every deterministic compaction verifies |E(q)| <= certificate
  // over these queries and throws on violation.
  const query_set* debug_queries = nullptr;
};

struct compaction_result {
  std::vector<data_point> emitted;
  std::vector<int> signs;  // empty in reservoir mode
  double certificate = 0.0;
};

// One compaction of a buffer, standalone (the stack calls this).
// deterministic: engine signs, smaller half emitted (tie -> +1 half).
// shrinking: engine signs, X+ or X- emitted by the low bit of rng_word.
// reservoir: buffer of two, one emitted by the low bit.
compaction_result run_compaction(const function_family& family, const sign_engine& engine,
                                 compactor_mode mode, std::span<const data_point> buffer,
                                 uint64_t rng_word);

struct level_stats {
  int level = 0;
  compactor_mode mode = compactor_mode::deterministic;
  size_t capacity = 0;
  size_t buffered = 0;
  uint64_t observed = 0;
  uint64_t compactions = 0;
};

// Finalized sketch: all residual buffer contents at their level weights.
// certificate covers the deterministic compactions; randomized policies are
// additionally budgeted for (epsilon, delta) per fixed query.
struct sketch_summary {
  weighted_coreset coreset;
  std::vector<level_stats> levels;
  double certificate = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

class compactor_stack {
 public:
  explicit compactor_stack(stack_config config);

  // Restores a deserialized stack; capacities and modes are recomputed
  // from the policy and the restored counters.
  compactor_stack(stack_config config, std::vector<compactor> levels, uint64_t total,
                  double det_certificate);

  void push(data_point x);

  uint64_t total_count() const { return total_; }
  int top_level() const { return static_cast<int>(levels_.size()) - 1; }
  int randomized_boundary() const;  // H' (kll_shrinking); INT_MIN-ish otherwise
  size_t live_items() const;
  size_t capacity_limit() const;  // sum of current level capacities
  double det_certificate() const { return det_certificate_; }
  std::span<const compactor> levels() const { return levels_; }
  const stack_config& config() const { return config_; }

  sketch_summary finalize() const;

  friend compactor_stack merge(const compactor_stack& a, const compactor_stack& b);

 private:
  void insert(size_t level, data_point x);
  void compact_level(size_t level);
  void grow_top_if_outputting(size_t level);
  void apply_layout();
  void enforce_capacities();
  size_t capacity_for(size_t level) const;
  compactor_mode mode_for(size_t level) const;

  stack_config config_;
  std::vector<compactor> levels_;
  uint64_t total_ = 0;
  double det_certificate_ = 0.0;
};

compactor_stack merge(const compactor_stack& a, const compactor_stack& b);

}  // namespace disccore
