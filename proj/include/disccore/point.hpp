#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace disccore {

// A stream/input element: d coordinates plus an optional +/-1 label.
struct data_point {
  std::vector<double> coords;
  std::optional<int> label;

  data_point() = default;
  explicit data_point(std::vector<double> c) : coords(std::move(c)) {}
  data_point(std::vector<double> c, int y) : coords(std::move(c)), label(y) {}
  explicit data_point(double scalar) : coords{scalar} {}

  size_t dim() const { return coords.size(); }

  bool operator==(const data_point&) const = default;
};

struct weighted_point {
  data_point point;
  double weight = 1.0;
};

struct bounding_box {
  std::vector<double> lo;
  std::vector<double> hi;

  size_t dim() const { return lo.size(); }
};

// Axis-aligned box of the data; [-1,1]^d when the set is empty.
bounding_box compute_bounding_box(std::span<const data_point> points, size_t dim);

}  // namespace disccore
