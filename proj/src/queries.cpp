#include "disccore/queries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "disccore/rng.hpp"

namespace disccore {

bounding_box compute_bounding_box(std::span<const data_point> points, size_t dim) {
  bounding_box box;
  box.lo.assign(dim, -1.0);
  box.hi.assign(dim, 1.0);
  if (points.empty()) return box;
  for (size_t k = 0; k < dim; ++k) {
    box.lo[k] = points[0].coords[k];
    box.hi[k] = points[0].coords[k];
  }
  for (const auto& p : points) {
    for (size_t k = 0; k < dim; ++k) {
      box.lo[k] = std::min(box.lo[k], p.coords[k]);
      box.hi[k] = std::max(box.hi[k], p.coords[k]);
    }
  }
  return box;
}

namespace {

std::vector<double> box_uniform(rng& r, const bounding_box& box) {
  std::vector<double> q(box.dim());
  for (size_t k = 0; k < box.dim(); ++k) q[k] = r.uniform(box.lo[k], box.hi[k]);
  return q;
}

bounding_box inflate(const bounding_box& box, double margin) {
  bounding_box out = box;
  for (size_t k = 0; k < out.dim(); ++k) {
    out.lo[k] -= margin;
    out.hi[k] += margin;
  }
  return out;
}

std::vector<double> direction_at_norm(rng& r, size_t dim, double target) {
  std::vector<double> q(dim);
  double n = 0.0;
  do {
    n = 0.0;
    for (size_t k = 0; k < dim; ++k) {
      q[k] = r.normal();
      n += q[k] * q[k];
    }
    n = std::sqrt(n);
  } while (n == 0.0);
  for (size_t k = 0; k < dim; ++k) q[k] *= target / n;
  return q;
}

}  // namespace

query_set sample_queries(const function_family& family, size_t count, uint64_t seed,
                         std::span<const data_point> data) {
  if (count < 1) throw std::invalid_argument("query count must be >= 1");
  query_set out;
  out.provenance = query_provenance::random_seeded;
  out.queries.reserve(count);
  rng r(mix64(seed + 0x71c9u));

  if (family.kind == family_kind::quantile_indicator) {
    bounding_box box = compute_bounding_box(data, 1);
    for (size_t i = 0; i < count; ++i) {
      out.queries.push_back({r.uniform(box.lo[0], box.hi[0])});
    }
    return out;
  }

  if (is_inner_product(family.kind)) {
    for (size_t i = 0; i < count; ++i) {
      double radius = family.radius * (1.0 - r.uniform());  // (0, R]
      out.queries.push_back(direction_at_norm(r, family.dim, radius));
    }
    return out;
  }

  // Distance kernels: data positions / inflated-box uniforms / grid points.
  bounding_box box = compute_bounding_box(data, family.dim);
  bounding_box wide = inflate(box, 3.0 * family.bandwidth);
  size_t grid_axis = 0;
  std::vector<double> grid_step(family.dim, 0.0);
  if (family.dim <= 2) {
    grid_axis = family.dim == 1 ? count : static_cast<size_t>(std::ceil(std::sqrt(double(count))));
    grid_axis = std::max<size_t>(grid_axis, 2);
    for (size_t k = 0; k < family.dim; ++k) {
      grid_step[k] = (wide.hi[k] - wide.lo[k]) / double(grid_axis - 1);
    }
  }
  size_t grid_used = 0;
  for (size_t i = 0; i < count; ++i) {
    switch (i % 3) {
      case 0:
        if (!data.empty()) {
          out.queries.push_back(data[(i / 3) % data.size()].coords);
          break;
        }
        [[fallthrough]];
      case 1:
        out.queries.push_back(box_uniform(r, wide));
        break;
      default:
        if (family.dim <= 2) {
          size_t g = grid_used++;
          std::vector<double> q(family.dim);
          q[0] = wide.lo[0] + grid_step[0] * double(g % grid_axis);
          if (family.dim == 2) q[1] = wide.lo[1] + grid_step[1] * double((g / grid_axis) % grid_axis);
          out.queries.push_back(std::move(q));
        } else {
          out.queries.push_back(box_uniform(r, wide));
        }
        break;
    }
  }
  return out;
}

query_set quantile_threshold_queries(std::span<const data_point> points) {
  std::vector<double> vals;
  vals.reserve(points.size());
  for (const auto& p : points) {
    if (p.dim() != 1) throw std::invalid_argument("quantile thresholds need scalar points");
    vals.push_back(p.coords[0]);
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());

  query_set out;
  out.provenance = query_provenance::grid;
  if (vals.empty()) {
    out.queries.push_back({0.0});
    return out;
  }
  out.queries.push_back({vals.front() - 1.0});
  for (size_t i = 0; i + 1 < vals.size(); ++i) {
    out.queries.push_back({vals[i] + (vals[i + 1] - vals[i]) / 2.0});
  }
  out.queries.push_back({vals.back() + 1.0});
  return out;
}

query_set grid_queries(const function_family& family, size_t per_axis,
                       const bounding_box& box) {
  if (family.dim > 2) throw std::invalid_argument("grid queries require d <= 2");
  if (per_axis < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  query_set out;
  out.provenance = query_provenance::grid;
  std::vector<double> step(family.dim);
  for (size_t k = 0; k < family.dim; ++k) {
    step[k] = (box.hi[k] - box.lo[k]) / double(per_axis - 1);
  }
  if (family.dim == 1) {
    for (size_t i = 0; i < per_axis; ++i) {
      out.queries.push_back({box.lo[0] + step[0] * double(i)});
    }
  } else {
    for (size_t i = 0; i < per_axis; ++i) {
      for (size_t j = 0; j < per_axis; ++j) {
        out.queries.push_back({box.lo[0] + step[0] * double(i), box.lo[1] + step[1] * double(j)});
      }
    }
  }
  return out;
}

}  // namespace disccore
