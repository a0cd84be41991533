#include "disccore/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "disccore/rng.hpp"

namespace disccore {

sweep_result error_sweep(const function_family& family, std::span<const data_point> points,
                         const weighted_coreset& coreset, const query_set& queries) {
  sweep_result out;
  out.per_query.reserve(queries.size());
  compensated_sum total;
  for (const auto& q : queries.queries) {
    double exact = sum_evaluate(family, points, q);
    double approx = coreset_evaluate(coreset, q);
    double err = std::abs(exact - approx);
    out.per_query.push_back(err);
    out.max_abs_error = std::max(out.max_abs_error, err);
    total.add(err);
  }
  if (!queries.empty()) out.mean_abs_error = total.value() / double(queries.size());
  return out;
}

long long max_rank_error(std::span<const data_point> data, const weighted_coreset& coreset) {
  std::vector<double> xs;
  xs.reserve(data.size());
  for (const auto& p : data) {
    if (p.dim() != 1) throw std::invalid_argument("rank error needs scalar data");
    xs.push_back(p.coords[0]);
  }
  std::sort(xs.begin(), xs.end());

  std::vector<std::pair<double, long long>> sketch;
  sketch.reserve(coreset.size());
  for (const auto& wp : coreset.entries) {
    double w = wp.weight;
    long long iw = static_cast<long long>(std::llround(w));
    if (std::abs(w - double(iw)) > 1e-9) {
      throw std::invalid_argument("rank error needs integral weights");
    }
    sketch.emplace_back(wp.point.coords[0], iw);
  }
  std::sort(sketch.begin(), sketch.end());

  // Both rank functions are steps jumping at their values; the max over all
  // thresholds is attained just above each distinct combined value.
  long long best = 0;
  long long exact = 0, approx = 0;
  size_t i = 0, j = 0;
  while (i < xs.size() || j < sketch.size()) {
    double v = i < xs.size() ? xs[i] : sketch[j].first;
    if (j < sketch.size()) v = std::min(v, sketch[j].first);
    while (i < xs.size() && xs[i] == v) {
      ++exact;
      ++i;
    }
    while (j < sketch.size() && sketch[j].first == v) {
      approx += sketch[j].second;
      ++j;
    }
    best = std::max(best, std::llabs(exact - approx));
  }
  return best;
}

std::vector<data_point> uniform_points(size_t n, size_t d, double lo, double hi,
                                       uint64_t seed) {
  rng r(mix64(seed + 0xa001u));
  std::vector<data_point> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> c(d);
    for (auto& v : c) v = r.uniform(lo, hi);
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<data_point> normal_points(size_t n, size_t d, uint64_t seed) {
  rng r(mix64(seed + 0xa002u));
  std::vector<data_point> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> c(d);
    for (auto& v : c) v = r.normal();
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<data_point> unit_ball_points(size_t n, size_t d, uint64_t seed) {
  rng r(mix64(seed + 0xa003u));
  std::vector<data_point> out;
  out.reserve(n);
  while (out.size() < n) {
    std::vector<double> c(d);
    double norm2 = 0.0;
    for (auto& v : c) {
      v = r.normal();
      norm2 += v * v;
    }
    double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    double radius = std::pow(r.uniform(), 1.0 / double(d));
    for (auto& v : c) v *= radius / norm;
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<data_point> gaussian_mixture(size_t n, size_t d, size_t clusters,
                                         double center_spread, double cluster_sigma,
                                         uint64_t seed) {
  if (clusters == 0) throw std::invalid_argument("need at least one cluster");
  rng r(mix64(seed + 0xa004u));
  std::vector<std::vector<double>> centers(clusters, std::vector<double>(d));
  for (auto& c : centers) {
    for (auto& v : c) v = r.uniform(0.0, center_spread);
  }
  std::vector<data_point> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& c = centers[r.below(clusters)];
    std::vector<double> x(d);
    for (size_t k = 0; k < d; ++k) x[k] = c[k] + cluster_sigma * r.normal();
    out.emplace_back(std::move(x));
  }
  return out;
}

std::vector<int> random_signs(size_t m, uint64_t seed) {
  rng r(mix64(seed + 0xa005u));
  std::vector<int> signs(m, 1);
  for (size_t i = 1; i < m; ++i) signs[i] = (r.next() & 1u) ? 1 : -1;
  return signs;
}

std::pair<double, double> fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit needs >= 2 matching samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

scaling_result discrepancy_scaling_experiment(const scaling_config& config) {
  const function_family& family = config.family;
  const bool quantile = family.kind == family_kind::quantile_indicator;

  std::vector<std::string> engines = config.engines;
  if (engines.empty()) {
    engines = quantile ? std::vector<std::string>{"sorted_quantile", "exhaustive", "random"}
                       : std::vector<std::string>{"greedy", "random"};
  }

  // One query set shared by every cell, built over the data envelope.
  size_t m_max = *std::max_element(config.m_values.begin(), config.m_values.end());
  std::vector<data_point> envelope =
      quantile ? uniform_points(m_max, 1, 0.0, config.data_spread, config.seed)
               : uniform_points(m_max, family.dim, 0.0, config.data_spread, config.seed);
  query_set queries = sample_queries(family, config.query_count, config.seed, envelope);

  scaling_result out;
  std::map<std::string, std::vector<double>> ms, means;

  for (const std::string& engine : engines) {
    for (size_t m : config.m_values) {
      if (engine == "exhaustive" && m > exhaustive_sign_cap) continue;
      double sum = 0.0, sumsq = 0.0;
      for (size_t t = 0; t < config.trials; ++t) {
        uint64_t cell_seed = mix64(config.seed + 1315423911u * (m + 1) + t);
        std::vector<data_point> data =
            quantile ? uniform_points(m, 1, 0.0, config.data_spread, cell_seed)
                     : uniform_points(m, family.dim, 0.0, config.data_spread, cell_seed);
        std::vector<int> signs;
        if (engine == "greedy") {
          signs = greedy_kernel_signs(family, data).signs;
        } else if (engine == "sorted_quantile") {
          signs = sorted_quantile_signs(data).signs;
        } else if (engine == "exhaustive") {
          signs = exhaustive_signs(family, data, queries).signs;
        } else if (engine == "random") {
          signs = random_signs(m, cell_seed);
        } else {
          throw std::invalid_argument("unknown experiment engine: " + engine);
        }
        double disc = empirical_discrepancy(family, data, signs, queries).normalized;
        sum += disc;
        sumsq += disc * disc;
      }
      double mean = sum / double(config.trials);
      double var = std::max(0.0, sumsq / double(config.trials) - mean * mean);
      double se = config.trials > 1 ? std::sqrt(var / double(config.trials - 1)) : 0.0;
      out.rows.push_back({engine, m, family.dim, config.trials, mean, se});
      ms[engine].push_back(double(m));
      means[engine].push_back(mean);
    }
  }

  for (const auto& [engine, xs] : ms) {
    if (xs.size() >= 2) {
      auto [slope, intercept] = fit_loglog(xs, means[engine]);
      out.slope[engine] = slope;
      out.intercept[engine] = intercept;
    }
  }
  return out;
}

void write_scaling_csv(const scaling_result& result, std::ostream& out) {
  out << "engine,m,d,trials,mean_disc,stderr\n";
  for (const auto& row : result.rows) {
    out << row.engine << ',' << row.m << ',' << row.d << ',' << row.trials << ','
        << row.mean_disc << ',' << row.std_error << '\n';
  }
}

kde_benchmark_result kde_clustered_benchmark(const kde_benchmark_config& config) {
  kde_benchmark_result out;
  out.config = config;
  function_family family = gaussian_family(config.d, config.bandwidth);

  for (size_t t = 0; t < config.seeds; ++t) {
    uint64_t seed = config.seed + t;
    std::vector<data_point> data = gaussian_mixture(
        config.n, config.d, config.clusters, config.center_spread, config.cluster_sigma, seed);
    query_set queries = sample_queries(family, config.query_count, mix64(seed + 77u), data);

    weighted_coreset greedy = build_coreset(family, data, config.m, greedy_engine());
    sweep_result greedy_sweep = error_sweep(family, data, greedy, queries);

    // Uniform random sample of the same size, weights n/m.
    rng r(mix64(seed + 0x5bd1u));
    std::vector<size_t> index(data.size());
    for (size_t i = 0; i < index.size(); ++i) index[i] = i;
    size_t m = std::min(config.m, data.size());
    for (size_t i = 0; i < m; ++i) {
      size_t j = i + static_cast<size_t>(r.below(index.size() - i));
      std::swap(index[i], index[j]);
    }
    weighted_coreset sampled;
    sampled.family = family;
    sampled.source_size = data.size();
    for (size_t i = 0; i < m; ++i) {
      sampled.entries.push_back({data[index[i]], double(data.size()) / double(m)});
    }
    sweep_result random_sweep = error_sweep(family, data, sampled, queries);

    out.trials.push_back({seed, greedy_sweep.max_abs_error, greedy.certificate,
                          random_sweep.max_abs_error});
    out.mean_greedy_error += greedy_sweep.max_abs_error;
    out.mean_random_error += random_sweep.max_abs_error;
    if (greedy_sweep.max_abs_error < random_sweep.max_abs_error) ++out.greedy_wins;
  }
  if (!out.trials.empty()) {
    out.mean_greedy_error /= double(out.trials.size());
    out.mean_random_error /= double(out.trials.size());
  }
  return out;
}

std::string kde_benchmark_json(const kde_benchmark_result& result) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"seed", t.seed},
                      {"greedy_max_error", t.greedy_max_error},
                      {"greedy_certificate", t.greedy_certificate},
                      {"random_max_error", t.random_max_error}});
  }
  nlohmann::json j{{"config",
                    {{"n", result.config.n},
                     {"clusters", result.config.clusters},
                     {"bandwidth", result.config.bandwidth},
                     {"m", result.config.m},
                     {"d", result.config.d},
                     {"seeds", result.config.seeds},
                     {"seed", result.config.seed},
                     {"query_count", result.config.query_count}}},
                   {"trials", std::move(trials)},
                   {"mean_greedy_error", result.mean_greedy_error},
                   {"mean_random_error", result.mean_random_error},
                   {"greedy_wins", result.greedy_wins}};
  return j.dump(2);
}

}  // namespace disccore
