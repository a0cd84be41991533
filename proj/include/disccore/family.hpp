#pragma once

#include <cmath>
#include <span>
#include <string>

#include "disccore/point.hpp"

namespace disccore {

enum class family_kind {
  gaussian_kernel,
  laplacian_kernel,
  cauchy_kernel,
  logistic_loss,
  sigmoid_loss,
  covariance,
  quantile_indicator,
};

// Descriptor of f(x,q): kernel kind + bandwidth, or loss kind + query radius.
struct function_family {
  family_kind kind = family_kind::gaussian_kernel;
  double bandwidth = 1.0;  // kernel kinds only
  double radius = 1.0;     // inner-product kinds only
  size_t dim = 1;

  bool operator==(const function_family&) const = default;
};

// Distance-based kernels: f in [0,1], f(x,x) = 1, positive semi-definite.
bool is_distance_kernel(family_kind k);
// Kinds admitting a feature map with K(x,x) <= 1; valid inputs for the
// greedy sign algorithm and the Gram certificate.
bool is_psd_kernel(family_kind k);
// Kinds evaluated through <x,q>; points constrained to the unit ball,
// queries to norm <= radius.
bool is_inner_product(family_kind k);

function_family gaussian_family(size_t dim, double bandwidth);
function_family laplacian_family(size_t dim, double bandwidth);
function_family cauchy_family(size_t dim, double bandwidth);
function_family logistic_family(size_t dim, double radius = 1.0);
function_family sigmoid_family(size_t dim, double radius = 1.0);
function_family covariance_family(size_t dim, double radius = 1.0);
function_family quantile_family();

std::string family_kind_name(family_kind k);
family_kind family_kind_from_name(const std::string& name);

// exp with the argument clamped to +/-700.
inline double exp_clamped(double t) {
  if (t > 700.0) t = 700.0;
  if (t < -700.0) t = -700.0;
  return std::exp(t);
}

// Neumaier compensated summation.
class compensated_sum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// f(x,q). Labels fold in as x <- y*x for the loss kinds. Throws on
// dimension mismatch or a query outside the family's domain.
double evaluate(const function_family& family, std::span<const double> x,
                std::span<const double> q, int label = 1);
double evaluate(const function_family& family, const data_point& x,
                std::span<const double> q);

// F(q) = sum_i f(x_i,q), compensated. Empty input gives 0.
double sum_evaluate(const function_family& family, std::span<const data_point> points,
                    std::span<const double> q);

enum class norm_policy { reject, rescale };

// Ingestion step: folds the label for loss kinds and enforces the unit-ball
// constraint for inner-product kinds (reject throws, rescale projects).
data_point prepare_point(const function_family& family, data_point p, norm_policy policy);

}  // namespace disccore
