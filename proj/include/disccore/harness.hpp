#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "disccore/coreset.hpp"
#include "disccore/family.hpp"
#include "disccore/queries.hpp"

namespace disccore {

struct sweep_result {
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  std::vector<double> per_query;
};

// |F(q) - F~(q)| over the query set; F via compensated exact summation.
sweep_result error_sweep(const function_family& family, std::span<const data_point> points,
                         const weighted_coreset& coreset, const query_set& queries);

// Exact max over all scalar thresholds of |rank(q) - estimated rank(q)|,
// integer arithmetic. Coreset weights must be integral (they are powers of
// two for halving/sketch outputs).
long long max_rank_error(std::span<const data_point> data, const weighted_coreset& coreset);

// --- scaling experiment -------------------------------------------------

struct scaling_config {
  function_family family;
  std::vector<size_t> m_values;
  size_t trials = 20;
  size_t query_count = 256;
  uint64_t seed = 1;
  // engines: "greedy", "sorted_quantile", "exhaustive", "random"
  std::vector<std::string> engines;
  double data_spread = 4.0;  // kernel data drawn uniform in [0, spread]^d
};

struct scaling_row {
  std::string engine;
  size_t m = 0;
  size_t d = 0;
  size_t trials = 0;
  double mean_disc = 0.0;  // mean over trials of max|E(q)|/m
  double std_error = 0.0;
};

struct scaling_result {
  std::vector<scaling_row> rows;
  std::map<std::string, double> slope;      // log-log fit of mean_disc vs m
  std::map<std::string, double> intercept;  // at log m = 0
};

scaling_result discrepancy_scaling_experiment(const scaling_config& config);
void write_scaling_csv(const scaling_result& result, std::ostream& out);

// --- clustered KDE benchmark --------------------------------------------

struct kde_benchmark_config {
  size_t n = 10000;
  size_t clusters = 10;
  double bandwidth = 1.0;
  size_t m = 100;
  size_t d = 2;
  size_t seeds = 20;
  uint64_t seed = 1;
  size_t query_count = 512;
  double center_spread = 10.0;
  double cluster_sigma = 0.5;
};

struct kde_trial {
  uint64_t seed = 0;
  double greedy_max_error = 0.0;
  double greedy_certificate = 0.0;
  double random_max_error = 0.0;  // uniform-sample coreset of the same size
};

struct kde_benchmark_result {
  kde_benchmark_config config;
  std::vector<kde_trial> trials;
  double mean_greedy_error = 0.0;
  double mean_random_error = 0.0;
  size_t greedy_wins = 0;
};

kde_benchmark_result kde_clustered_benchmark(const kde_benchmark_config& config);
std::string kde_benchmark_json(const kde_benchmark_result& result);

// --- data generators (seeded, deterministic) ----------------------------

std::vector<data_point> uniform_points(size_t n, size_t d, double lo, double hi,
                                       uint64_t seed);
std::vector<data_point> normal_points(size_t n, size_t d, uint64_t seed);
std::vector<data_point> unit_ball_points(size_t n, size_t d, uint64_t seed);
std::vector<data_point> gaussian_mixture(size_t n, size_t d, size_t clusters,
                                         double center_spread, double cluster_sigma,
                                         uint64_t seed);

// Random +/-1 signs (sigma_1 = +1), the sampling baseline for experiments.
std::vector<int> random_signs(size_t m, uint64_t seed);

// Least-squares slope/intercept of log(y) against log(x).
std::pair<double, double> fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace disccore
