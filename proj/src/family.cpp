#include "disccore/family.hpp"

#include <cmath>
#include <stdexcept>

namespace disccore {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double squared_distance(std::span<const double> x, std::span<const double> q) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - q[i];
    s += d * d;
  }
  return s;
}

double dot(std::span<const double> x, std::span<const double> q) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * q[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

constexpr double domain_tol = 1e-9;

}  // namespace

bool is_distance_kernel(family_kind k) {
  return k == family_kind::gaussian_kernel || k == family_kind::laplacian_kernel ||
         k == family_kind::cauchy_kernel;
}

bool is_psd_kernel(family_kind k) {
  // covariance is <x,q>^2 = <x ox x, q ox q>: PSD with K(x,x) = |x|^4 <= 1
  // under the unit-ball ingestion constraint.
  return is_distance_kernel(k) || k == family_kind::covariance;
}

bool is_inner_product(family_kind k) {
  return k == family_kind::logistic_loss || k == family_kind::sigmoid_loss ||
         k == family_kind::covariance;
}

namespace {
function_family make_kernel(family_kind k, size_t dim, double bandwidth) {
  require(dim >= 1, "dimension must be positive");
  require(bandwidth > 0.0, "bandwidth must be positive");
  return {k, bandwidth, 1.0, dim};
}
function_family make_ip(family_kind k, size_t dim, double radius) {
  require(dim >= 1, "dimension must be positive");
  require(radius > 0.0, "radius must be positive");
  return {k, 1.0, radius, dim};
}
}  // namespace

function_family gaussian_family(size_t dim, double bandwidth) {
  return make_kernel(family_kind::gaussian_kernel, dim, bandwidth);
}
function_family laplacian_family(size_t dim, double bandwidth) {
  return make_kernel(family_kind::laplacian_kernel, dim, bandwidth);
}
function_family cauchy_family(size_t dim, double bandwidth) {
  return make_kernel(family_kind::cauchy_kernel, dim, bandwidth);
}
function_family logistic_family(size_t dim, double radius) {
  return make_ip(family_kind::logistic_loss, dim, radius);
}
function_family sigmoid_family(size_t dim, double radius) {
  return make_ip(family_kind::sigmoid_loss, dim, radius);
}
function_family covariance_family(size_t dim, double radius) {
  return make_ip(family_kind::covariance, dim, radius);
}
function_family quantile_family() {
  return {family_kind::quantile_indicator, 1.0, 1.0, 1};
}

std::string family_kind_name(family_kind k) {
  switch (k) {
    case family_kind::gaussian_kernel: return "gaussian";
    case family_kind::laplacian_kernel: return "laplacian";
    case family_kind::cauchy_kernel: return "cauchy";
    case family_kind::logistic_loss: return "logistic";
    case family_kind::sigmoid_loss: return "sigmoid";
    case family_kind::covariance: return "covariance";
    case family_kind::quantile_indicator: return "quantile";
  }
  throw std::logic_error("unknown family kind");
}

family_kind family_kind_from_name(const std::string& name) {
  if (name == "gaussian") return family_kind::gaussian_kernel;
  if (name == "laplacian") return family_kind::laplacian_kernel;
  if (name == "cauchy") return family_kind::cauchy_kernel;
  if (name == "logistic") return family_kind::logistic_loss;
  if (name == "sigmoid") return family_kind::sigmoid_loss;
  if (name == "covariance") return family_kind::covariance;
  if (name == "quantile") return family_kind::quantile_indicator;
  throw std::invalid_argument("unknown family kind: " + name);
}

double evaluate(const function_family& family, std::span<const double> x,
                std::span<const double> q, int label) {
  require(x.size() == family.dim, "point dimension mismatch");
  require(q.size() == family.dim, "query dimension mismatch");

  switch (family.kind) {
    case family_kind::gaussian_kernel: {
      double r2 = squared_distance(x, q);
      return exp_clamped(-r2 / (family.bandwidth * family.bandwidth));
    }
    case family_kind::laplacian_kernel: {
      double r = std::sqrt(squared_distance(x, q));
      return exp_clamped(-r / family.bandwidth);
    }
    case family_kind::cauchy_kernel: {
      double r2 = squared_distance(x, q);
      return 1.0 / (1.0 + r2 / (family.bandwidth * family.bandwidth));
    }
    case family_kind::logistic_loss: {
      require(norm(q) <= family.radius + domain_tol, "query norm exceeds radius");
      double t = label * dot(x, q);
      // log(1 + exp(t)) without overflow
      return t > 0.0 ? t + std::log1p(exp_clamped(-t)) : std::log1p(exp_clamped(t));
    }
    case family_kind::sigmoid_loss: {
      require(norm(q) <= family.radius + domain_tol, "query norm exceeds radius");
      double t = label * dot(x, q);
      return 1.0 / (1.0 + exp_clamped(t));
    }
    case family_kind::covariance: {
      require(norm(q) <= family.radius + domain_tol, "query norm exceeds radius");
      double t = dot(x, q);
      return t * t;
    }
    case family_kind::quantile_indicator:
      return q[0] > x[0] ? 1.0 : 0.0;
  }
  throw std::logic_error("unknown family kind");
}

double evaluate(const function_family& family, const data_point& x,
                std::span<const double> q) {
  return evaluate(family, x.coords, q, x.label.value_or(1));
}

double sum_evaluate(const function_family& family, std::span<const data_point> points,
                    std::span<const double> q) {
  compensated_sum acc;
  for (const auto& p : points) acc.add(evaluate(family, p, q));
  return acc.value();
}

data_point prepare_point(const function_family& family, data_point p, norm_policy policy) {
  require(p.dim() == family.dim, "point dimension mismatch");
  for (double c : p.coords) require(std::isfinite(c), "non-finite coordinate");

  if (family.kind == family_kind::logistic_loss || family.kind == family_kind::sigmoid_loss) {
    if (p.label.has_value()) {
      int y = *p.label;
      require(y == 1 || y == -1, "label must be +1 or -1");
      if (y == -1) {
        for (double& c : p.coords) c = -c;
      }
      p.label.reset();
    }
  }
  if (is_inner_product(family.kind)) {
    double n = norm(p.coords);
    if (n > 1.0 + domain_tol) {
      if (policy == norm_policy::reject) {
        throw std::invalid_argument("point norm exceeds 1 for inner-product family");
      }
      for (double& c : p.coords) c /= n;
    }
  }
  return p;
}

}  // namespace disccore
