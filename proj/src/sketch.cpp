#include "disccore/sketch.hpp"

#include <cmath>
#include <stdexcept>

#include "disccore/rng.hpp"

namespace disccore {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string stack_policy_name(stack_policy p) {
  switch (p) {
    case stack_policy::det_halving: return "det_halving";
    case stack_policy::kll_shrinking: return "kll_shrinking";
    case stack_policy::sample_then_sketch: return "sample_then_sketch";
  }
  throw std::logic_error("unknown policy");
}

stack_policy stack_policy_from_name(const std::string& name) {
  if (name == "det_halving") return stack_policy::det_halving;
  if (name == "kll_shrinking") return stack_policy::kll_shrinking;
  if (name == "sample_then_sketch") return stack_policy::sample_then_sketch;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string certificate_regime_name(certificate_regime r) {
  return r == certificate_regime::one_over_m ? "one_over_m" : "inv_sqrt_m";
}

certificate_regime certificate_regime_from_name(const std::string& name) {
  if (name == "one_over_m") return certificate_regime::one_over_m;
  if (name == "inv_sqrt_m") return certificate_regime::inv_sqrt_m;
  throw std::invalid_argument("unknown certificate regime: " + name);
}

budget_params budget_for(stack_policy policy, certificate_regime regime,
                         double epsilon, double delta, uint64_t n_hint, double c) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
  require(delta > 0.0 && delta < 1.0, "delta must be in (0,1)");
  require(n_hint >= 1, "n_hint must be >= 1");
  require(c > 0.0, "c must be positive");
  (void)policy;

  budget_params b;
  b.regime = regime;
  b.epsilon = epsilon;
  b.delta = delta;

  const double n = static_cast<double>(n_hint);
  if (regime == certificate_regime::one_over_m) {
    double arg = std::max(2.0, epsilon * n / c);
    b.m = static_cast<size_t>(std::ceil(4.0 * c * std::log(arg) / epsilon));
  } else {
    double arg = std::max(2.0, epsilon * epsilon * n / (c * c));
    double l = std::log(arg);
    b.m = static_cast<size_t>(std::ceil(4.0 * c * c * l * l / (epsilon * epsilon)));
  }
  b.m = std::max<size_t>(b.m, 2);

  // Factored so that halving delta always adds exactly ceil(8*ln2/eps^2).
  double per_doubling = std::ceil(8.0 * std::log(2.0) / (epsilon * epsilon));
  double doublings = std::ceil(std::log2(2.0 / delta));
  b.n_tilde = static_cast<size_t>(per_doubling) * static_cast<size_t>(doublings);

  b.hprime_offset =
      static_cast<int>(std::ceil(std::log2(std::log2(std::max(4.0, n / delta)))));
  return b;
}

compaction_result run_compaction(const function_family& family, const sign_engine& engine,
                                 compactor_mode mode, std::span<const data_point> buffer,
                                 uint64_t rng_word) {
  compaction_result out;
  if (buffer.empty()) return out;

  if (mode == compactor_mode::reservoir) {
    require(buffer.size() == 2, "reservoir compaction expects a pair");
    out.emitted.push_back(buffer[rng_word & 1u]);
    return out;
  }

  sign_assignment sa = compute_signs(family, buffer, engine);
  out.signs = sa.signs;
  out.certificate = sa.certificate;

  int kept;
  if (mode == compactor_mode::deterministic) {
    size_t plus = 0;
    for (int s : sa.signs) plus += s > 0;
    kept = plus <= buffer.size() - plus ? 1 : -1;  // tie -> +1 half
  } else {
    kept = (rng_word & 1u) ? -1 : 1;  // X+ or X- with equal probability
  }
  for (size_t i = 0; i < buffer.size(); ++i) {
    if (sa.signs[i] == kept) out.emitted.push_back(buffer[i]);
  }
  return out;
}

compactor_stack::compactor_stack(stack_config config) : config_(std::move(config)) {
  require(config_.budget.m >= 2, "buffer budget must be >= 2");
  if (config_.engine.kind == sign_engine_kind::greedy_kernel) {
    require(is_psd_kernel(config_.family.kind),
            "greedy engine requires a PSD kernel family");
  }
  if (config_.engine.kind == sign_engine_kind::sorted_quantile) {
    require(config_.family.kind == family_kind::quantile_indicator,
            "sorted_quantile engine requires the quantile family");
  }
  if (config_.engine.kind == sign_engine_kind::exhaustive) {
    require(config_.budget.m <= exhaustive_sign_cap,
            "exhaustive engine caps the buffer budget at 20");
  }
  levels_.push_back(compactor{});
  apply_layout();
}

compactor_stack::compactor_stack(stack_config config, std::vector<compactor> levels,
                                 uint64_t total, double det_certificate)
    : compactor_stack(std::move(config)) {
  if (!levels.empty()) levels_ = std::move(levels);
  for (size_t h = 0; h < levels_.size(); ++h) levels_[h].level = static_cast<int>(h);
  total_ = total;
  det_certificate_ = det_certificate;
  apply_layout();
}

int compactor_stack::randomized_boundary() const {
  return top_level() - config_.budget.hprime_offset;
}

size_t compactor_stack::capacity_for(size_t level) const {
  const budget_params& b = config_.budget;
  switch (config_.policy) {
    case stack_policy::det_halving:
      return b.m;
    case stack_policy::kll_shrinking: {
      int hp = randomized_boundary();
      if (static_cast<int>(level) <= hp) {
        double v = std::ceil(static_cast<double>(b.m) *
                             std::pow(2.0 / 3.0, static_cast<double>(hp - static_cast<int>(level))));
        return std::max<size_t>(2, static_cast<size_t>(v));
      }
      return b.m;
    }
    case stack_policy::sample_then_sketch:
      return levels_[level].observed > b.n_tilde ? 2 : b.m;
  }
  throw std::logic_error("unknown policy");
}

compactor_mode compactor_stack::mode_for(size_t level) const {
  switch (config_.policy) {
    case stack_policy::det_halving:
      return compactor_mode::deterministic;
    case stack_policy::kll_shrinking:
      return static_cast<int>(level) <= randomized_boundary() ? compactor_mode::shrinking
                                                              : compactor_mode::deterministic;
    case stack_policy::sample_then_sketch:
      return levels_[level].observed > config_.budget.n_tilde ? compactor_mode::reservoir
                                                              : compactor_mode::deterministic;
  }
  throw std::logic_error("unknown policy");
}

void compactor_stack::apply_layout() {
  for (size_t h = 0; h < levels_.size(); ++h) {
    levels_[h].level = static_cast<int>(h);
    levels_[h].mode = mode_for(h);
    levels_[h].capacity = capacity_for(h);
  }
}

void compactor_stack::push(data_point x) {
  require(x.dim() == config_.family.dim, "point dimension mismatch");
  insert(0, std::move(x));
  total_ += 1;
}

void compactor_stack::insert(size_t level, data_point x) {
  levels_[level].buffer.push_back(std::move(x));
  levels_[level].observed += 1;
  if (config_.policy == stack_policy::sample_then_sketch &&
      levels_[level].mode == compactor_mode::deterministic &&
      levels_[level].observed > config_.budget.n_tilde) {
    // Past the sampling threshold this level degenerates to a pair buffer.
    levels_[level].mode = compactor_mode::reservoir;
    levels_[level].capacity = 2;
  }
  if (levels_[level].buffer.size() >= levels_[level].capacity) {
    compact_level(level);
  }
}

void compactor_stack::compact_level(size_t level) {
  if (levels_[level].mode == compactor_mode::reservoir) {
    while (levels_[level].buffer.size() >= 2) {
      uint64_t word = stream_word(config_.seed, level, levels_[level].compactions);
      levels_[level].compactions += 1;
      data_point chosen = levels_[level].buffer[word & 1u];
      levels_[level].buffer.erase(levels_[level].buffer.begin(),
                                  levels_[level].buffer.begin() + 2);
      grow_top_if_outputting(level);
      insert(level + 1, std::move(chosen));
    }
    return;
  }

  std::vector<data_point> buf = std::move(levels_[level].buffer);
  levels_[level].buffer.clear();
  const compactor_mode mode = levels_[level].mode;
  uint64_t word = stream_word(config_.seed, level, levels_[level].compactions);
  levels_[level].compactions += 1;

  compaction_result r = run_compaction(config_.family, config_.engine, mode, buf, word);

  if (mode == compactor_mode::deterministic) {
    det_certificate_ += std::ldexp(r.certificate, static_cast<int>(level));
    if (config_.debug_queries != nullptr) {
      for (const auto& q : config_.debug_queries->queries) {
        compensated_sum e;
        for (size_t i = 0; i < buf.size(); ++i) {
          e.add(r.signs[i] * evaluate(config_.family, buf[i], q));
        }
        if (std::abs(e.value()) > r.certificate + 1e-9) {
          throw std::logic_error("compaction error exceeds its certificate");
        }
      }
    }
  }

  if (!r.emitted.empty()) {
    grow_top_if_outputting(level);
    for (auto& item : r.emitted) insert(level + 1, std::move(item));
  }
}

void compactor_stack::grow_top_if_outputting(size_t level) {
  if (level + 1 < levels_.size()) return;
  levels_.push_back(compactor{});
  apply_layout();
  if (config_.policy == stack_policy::kll_shrinking) {
    // H' moved up: shrunk levels may now hold more than they are allowed.
    enforce_capacities();
  }
}

void compactor_stack::enforce_capacities() {
  bool again = true;
  while (again) {
    again = false;
    for (size_t h = 0; h < levels_.size(); ++h) {
      if (levels_[h].buffer.size() >= levels_[h].capacity) {
        compact_level(h);
        again = true;
        break;
      }
    }
  }
}

size_t compactor_stack::live_items() const {
  size_t total = 0;
  for (const auto& c : levels_) total += c.buffer.size();
  return total;
}

size_t compactor_stack::capacity_limit() const {
  size_t total = 0;
  for (const auto& c : levels_) total += c.capacity;
  return total;
}

sketch_summary compactor_stack::finalize() const {
  sketch_summary out;
  out.coreset.family = config_.family;
  out.coreset.source_size = total_;
  out.coreset.engine = config_.engine.kind;
  out.coreset.certificate = det_certificate_;
  out.certificate = det_certificate_;
  out.epsilon = config_.budget.epsilon;
  out.delta = config_.budget.delta;
  for (size_t h = 0; h < levels_.size(); ++h) {
    const compactor& c = levels_[h];
    double weight = std::ldexp(1.0, static_cast<int>(h));
    for (const auto& item : c.buffer) {
      out.coreset.entries.push_back({item, weight});
    }
    out.levels.push_back({static_cast<int>(h), c.mode, c.capacity, c.buffer.size(),
                          c.observed, c.compactions});
  }
  return out;
}

compactor_stack merge(const compactor_stack& a, const compactor_stack& b) {
  require(a.config_.family == b.config_.family, "merge: family mismatch");
  require(a.config_.engine == b.config_.engine, "merge: engine mismatch");
  require(a.config_.policy == b.config_.policy, "merge: policy mismatch");
  require(a.config_.budget == b.config_.budget, "merge: budget mismatch");

  compactor_stack out = a;
  out.total_ += b.total_;
  out.det_certificate_ += b.det_certificate_;
  while (out.levels_.size() < b.levels_.size()) {
    out.levels_.push_back(compactor{});
  }
  for (size_t h = 0; h < b.levels_.size(); ++h) {
    compactor& dst = out.levels_[h];
    const compactor& src = b.levels_[h];
    dst.buffer.insert(dst.buffer.end(), src.buffer.begin(), src.buffer.end());
    dst.observed += src.observed;
    dst.compactions += src.compactions;
  }
  out.apply_layout();
  out.enforce_capacities();
  return out;
}

}  // namespace disccore
