#include "condex/univariate.hpp"

#include <algorithm>
#include <cmath>

#include "condex/errors.hpp"
#include "condex/margins.hpp"

namespace condex {

UnivariateModel gaussian_model() {
  UnivariateModel m;
  m.name = "gaussian";
  m.cdf = margins::normal_cdf;
  m.sf = margins::normal_sf;
  m.pdf = [](double v) { return std::exp(margins::normal_log_pdf(v)); };
  m.upper_quantile = [](double q) { return -margins::normal_quantile(q); };
  m.hazard_inverse = margins::mills_ratio;
  m.xi_limit = 0.0;
  return m;
}

UnivariateModel exponential_model() {
  UnivariateModel m;
  m.name = "exponential";
  m.cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  m.sf = [](double x) { return x <= 0.0 ? 1.0 : std::exp(-x); };
  m.pdf = [](double x) { return x < 0.0 ? 0.0 : std::exp(-x); };
  m.upper_quantile = [](double q) { return -std::log(q); };
  m.xi_limit = 0.0;
  return m;
}

double reciprocal_hazard(const UnivariateModel& model, double x) {
  if (model.hazard_inverse) return model.hazard_inverse(x);
  const double f = model.pdf(x);
  if (!(f > 0.0)) throw DomainError("reciprocal_hazard: zero density");
  return model.sf(x) / f;
}

double reciprocal_hazard_derivative(const UnivariateModel& model, double x) {
  const double h = std::max(1e-6, 1e-6 * std::abs(x));
  auto central = [&](double step) {
    return (reciprocal_hazard(model, x + step) - reciprocal_hazard(model, x - step)) / (2.0 * step);
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double norming_location(const UnivariateModel& model, double n) {
  if (!(n >= 2.0) || !std::isfinite(n)) throw DomainError("univariate: n must be at least 2");
  double b;
  try {
    b = model.upper_quantile(1.0 / n);
  } catch (const std::exception& e) {
    throw RangeError(std::string("univariate: quantile inversion failed: ") + e.what());
  }
  if (!std::isfinite(b)) throw RangeError("univariate: quantile inversion failed");
  return b;
}

double norming_scale(const UnivariateModel& model, double n) {
  return reciprocal_hazard(model, norming_location(model, n));
}

double xi_n(const UnivariateModel& model, double n) {
  return reciprocal_hazard_derivative(model, norming_location(model, n));
}

double gev_cdf(double x, double xi) {
  if (std::isnan(x) || std::isnan(xi)) throw DomainError("gev_cdf: NaN argument");
  if (std::abs(xi) < 1e-8) return std::exp(-std::exp(-x));
  const double t = 1.0 + xi * x;
  if (t <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log(t) / xi));
}

GevErrors penultimate_gev_error(const UnivariateModel& model, double n, double x) {
  const double b = norming_location(model, n);
  const double a = reciprocal_hazard(model, b);
  const double xi = reciprocal_hazard_derivative(model, b);
  const double fn = std::exp(n * std::log1p(-model.sf(a * x + b)));
  return {std::abs(fn - gev_cdf(x, model.xi_limit)), std::abs(fn - gev_cdf(x, xi)), xi};
}

}  // namespace condex
