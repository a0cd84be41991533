#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "disccore/family.hpp"
#include "disccore/point.hpp"

namespace disccore {

enum class query_provenance { grid, random_seeded, data_points };

struct query_set {
  std::vector<std::vector<double>> queries;
  query_provenance provenance = query_provenance::random_seeded;

  size_t size() const { return queries.size(); }
  bool empty() const { return queries.empty(); }

  bool operator==(const query_set&) const = default;
};

// Finite surrogate for the sup over the query space. Deterministic given
// (family, count, seed, data). For kernel kinds: a mix of data positions,
// uniform draws from the bounding box inflated by 3*bandwidth, and grid
// points when d <= 2. For inner-product kinds: uniform directions at norms
// in (0, radius]. For quantile: uniform thresholds over the data range.
query_set sample_queries(const function_family& family, size_t count, uint64_t seed,
                         std::span<const data_point> data = {});

// All m+1 threshold intervals of a scalar set, one representative each;
// max over these equals the sup over the whole threshold continuum.
query_set quantile_threshold_queries(std::span<const data_point> points);

// per_axis^d lattice over the box (d <= 2).
query_set grid_queries(const function_family& family, size_t per_axis,
                       const bounding_box& box);

}  // namespace disccore
