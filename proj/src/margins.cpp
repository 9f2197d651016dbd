#include "condex/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "condex/errors.hpp"

namespace condex::margins {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))
constexpr double kSqrt1_2 = 0.70710678118654752440;

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

// Mills ratio by backward evaluation of the Laplace continued fraction
//   R(v) = 1 / (v + 1 / (v + 2 / (v + 3 / (v + ...)))),
// accurate to machine precision for v >= 30 with 40 terms.
double mills_continued_fraction(double v) {
  double tail = v;
  for (int k = 40; k >= 1; --k) tail = v + k / tail;
  return 1.0 / tail;
}

constexpr double kContinuedFractionFrom = 30.0;

}  // namespace

double laplace_cdf(double x) {
  require_finite(x, "laplace_cdf");
  return x >= 0.0 ? 1.0 - 0.5 * std::exp(-x) : 0.5 * std::exp(x);
}

double laplace_sf(double x) {
  require_finite(x, "laplace_sf");
  return x >= 0.0 ? 0.5 * std::exp(-x) : 1.0 - 0.5 * std::exp(x);
}

double laplace_log_cdf(double x) {
  require_finite(x, "laplace_log_cdf");
  return x < 0.0 ? x - kLn2 : std::log1p(-0.5 * std::exp(-x));
}

double laplace_log_sf(double x) {
  require_finite(x, "laplace_log_sf");
  return x >= 0.0 ? -x - kLn2 : std::log1p(-0.5 * std::exp(x));
}

double laplace_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("laplace_quantile: probability must lie in (0, 1)");
  }
  return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

double laplace_quantile_from_log_cdf(double log_p) {
  if (!(log_p < 0.0) || std::isnan(log_p)) {
    throw DomainError("laplace_quantile_from_log_cdf: log probability must be negative");
  }
  if (log_p < -kLn2) return kLn2 + log_p;
  return -kLn2 - std::log(-std::expm1(log_p));
}

double laplace_quantile_from_log_sf(double log_q) {
  return -laplace_quantile_from_log_cdf(log_q);
}

double log_neg_log_laplace_cdf(double x) {
  require_finite(x, "log_neg_log_laplace_cdf");
  if (x < 0.0) return std::log(kLn2 - x);
  const double log_q = -x - kLn2;  // log{1 - F_L(x)}
  if (log_q < -18.0) {
    // -log(1 - q) = q + q^2/2 + ..., q < 1.6e-8
    return log_q + 0.5 * std::exp(log_q);
  }
  return std::log(-std::log1p(-std::exp(log_q)));
}

double log_neg_log_laplace_sf(double x) { return log_neg_log_laplace_cdf(-x); }

double normal_cdf(double v) { return 0.5 * std::erfc(-v * kSqrt1_2); }

double normal_sf(double v) { return 0.5 * std::erfc(v * kSqrt1_2); }

double normal_log_pdf(double v) { return -0.5 * v * v - kLogSqrt2Pi; }

double normal_log_sf(double v) {
  if (std::isnan(v)) throw DomainError("normal_log_sf: NaN argument");
  if (v > kContinuedFractionFrom) {
    return normal_log_pdf(v) + std::log(mills_continued_fraction(v));
  }
  if (v >= 0.0) return std::log(0.5 * std::erfc(v * kSqrt1_2));
  return std::log1p(-0.5 * std::erfc(-v * kSqrt1_2));
}

double normal_log_cdf(double v) { return normal_log_sf(-v); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double mills_ratio(double v) {
  if (v > kContinuedFractionFrom) return mills_continued_fraction(v);
  return std::exp(normal_log_sf(v) - normal_log_pdf(v));
}

double gauss_to_laplace(double v) {
  require_finite(v, "gauss_to_laplace");
  if (v >= 0.0) return -kLn2 - normal_log_sf(v);
  return kLn2 + normal_log_sf(-v);
}

double laplace_to_gauss_expansion(double x) {
  if (!(x > 0.0)) throw DomainError("laplace_to_gauss_expansion: x must be positive");
  const double root = std::sqrt(2.0 * x);
  return root + (2.0 * kLn2 - std::log(2.0 * x) - std::log(2.0 * std::numbers::pi)) /
                    (2.0 * root);
}

double laplace_to_gauss(double x) {
  require_finite(x, "laplace_to_gauss");
  if (x < 0.0) return -laplace_to_gauss(-x);
  if (x == 0.0) return 0.0;

  const double target = -x - kLn2;  // log{1 - Phi(v)}
  double v;
  if (x < 690.0) {
    v = boost::math::quantile(
        boost::math::complement(boost::math::normal_distribution<double>(), std::exp(target)));
  } else {
    v = laplace_to_gauss_expansion(x);
  }
  // Newton on log{1 - Phi(v)} = target; the derivative is -1 / mills_ratio(v).
  for (int iter = 0; iter < 50; ++iter) {
    const double step = (normal_log_sf(v) - target) * mills_ratio(v);
    v += step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(v))) break;
  }
  return v;
}

double return_period_years(double x, double n_per_year) {
  require_finite(x, "return_period_years");
  if (x < 0.0) {
    throw DomainError("return_period_years: return periods are defined for x >= 0");
  }
  if (!(n_per_year > 0.0) || !std::isfinite(n_per_year)) {
    throw DomainError("return_period_years: n_per_year must be positive");
  }
  return std::exp(x + kLn2) / n_per_year;
}

ReturnPeriod return_period(double x, double n_per_year) {
  return ReturnPeriod{return_period_years(x, n_per_year), n_per_year};
}

double return_level(double years, double n_per_year) {
  if (!(n_per_year > 0.0) || !(years > 0.0)) {
    throw DomainError("return_level: years and n_per_year must be positive");
  }
  const double observations = years * n_per_year;
  if (observations < 2.0) {
    throw DomainError("return_level: fewer than two observations per return period");
  }
  return std::log(0.5 * observations);
}

}  // namespace condex::margins
