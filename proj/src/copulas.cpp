#include "condex/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "condex/errors.hpp"
#include "condex/margins.hpp"
#include "condex/rng.hpp"

namespace condex {
namespace {

using margins::kLn2;

constexpr double kSearchBound = 750.0;

double softplus(double a) {
  if (a == -std::numeric_limits<double>::infinity()) return 0.0;
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Both logistic families reduce to the same kernel. With s = -log G(x) and
// t = -log G(y), where G is the Laplace cdf (logistic) or survival function
// (inverted logistic), the conditional probability P satisfies
//   -log P = s {(1 + r)^gamma - 1} + (1 - gamma) log(1 + r),
//   r = (t / s)^{1/gamma}.
double logistic_kernel(double gamma, double log_s, double log_t) {
  const double log1p_r = softplus((log_t - log_s) / gamma);
  const double power = gamma * log1p_r;
  const double scaled = power > 30.0 ? std::exp(log_s + power) - std::exp(log_s)
                                     : std::exp(log_s) * std::expm1(power);
  return scaled + (1.0 - gamma) * log1p_r;
}

double gaussian_standardized(double rho, double x, double y) {
  const double v = margins::laplace_to_gauss(x);
  const double w = margins::laplace_to_gauss(y);
  return (w - rho * v) / std::sqrt(1.0 - rho * rho);
}

double checked_probability(double p, const char* what) {
  if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
    throw NumericalError(std::string(what) + ": probability " + std::to_string(p) +
                         " outside [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw DomainError(std::string(what) + ": non-finite argument");
}

// Laplace value whose cdf (for cdf_scale) or survival function equals
// exp(-t), with t = exp(log_t).
double laplace_from_log_neg_log(double log_t, bool cdf_scale) {
  const double t = std::exp(log_t);
  double x;
  if (t > kLn2) {
    x = kLn2 - t;
  } else {
    const double log_complement = t < 1e-10 ? log_t - 0.5 * t : std::log(-std::expm1(-t));
    x = -kLn2 - log_complement;
  }
  return cdf_scale ? x : -x;
}

// log of a positive stable variate with Laplace transform exp(-s^alpha),
// by the Chambers-Mallows-Stuck (Kanter) representation.
double log_positive_stable(double alpha, RandomStream& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  if (alpha == 1.0) return 0.0;
  return std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
         (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
}

LaplacePair draw_pair(const CopulaSpec& copula, RandomStream& rng) {
  if (copula.family == Family::Gaussian) {
    const double rho = copula.param;
    const double v = rng.normal();
    const double w = rho * v + std::sqrt(1.0 - rho * rho) * rng.normal();
    return {margins::gauss_to_laplace(v), margins::gauss_to_laplace(w)};
  }
  // Logistic copula: U_i = exp{-(E_i / S)^gamma}.
  const double gamma = copula.param;
  const double log_s = log_positive_stable(gamma, rng);
  const double log_t1 = gamma * (std::log(rng.exponential()) - log_s);
  const double log_t2 = gamma * (std::log(rng.exponential()) - log_s);
  const bool cdf_scale = copula.family == Family::Logistic;
  return {laplace_from_log_neg_log(log_t1, cdf_scale),
          laplace_from_log_neg_log(log_t2, cdf_scale)};
}

template <class Fill>
void fill_blocks(std::size_t n, unsigned workers, Fill&& fill) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  parallel_for(blocks, workers, [&](std::size_t block) {
    const std::size_t begin = block * kBlockSize;
    const std::size_t end = std::min(n, begin + kBlockSize);
    fill(block, begin, end);
  });
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::Gaussian:
      return "gaussian";
    case Family::InvertedLogistic:
      return "invlogistic";
    case Family::Logistic:
      return "logistic";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "invlogistic" || name == "inverted-logistic" || name == "invlog") {
    return Family::InvertedLogistic;
  }
  if (name == "logistic") return Family::Logistic;
  throw DomainError("unknown copula family '" + std::string(name) + "'");
}

CopulaSpec CopulaSpec::gaussian(double rho) {
  CopulaSpec spec{Family::Gaussian, rho};
  spec.validate();
  return spec;
}

CopulaSpec CopulaSpec::inverted_logistic(double gamma) {
  CopulaSpec spec{Family::InvertedLogistic, gamma};
  spec.validate();
  return spec;
}

CopulaSpec CopulaSpec::logistic(double gamma) {
  CopulaSpec spec{Family::Logistic, gamma};
  spec.validate();
  return spec;
}

void CopulaSpec::validate() const {
  switch (family) {
    case Family::Gaussian:
      if (!(param > -1.0 && param < 1.0)) {
        throw DomainError("gaussian copula: rho must lie in (-1, 1)");
      }
      return;
    case Family::InvertedLogistic:
      if (!(param > 0.0 && param <= 1.0)) {
        throw DomainError("inverted logistic copula: gamma must lie in (0, 1]");
      }
      return;
    case Family::Logistic:
      if (!(param > 0.0 && param < 1.0)) {
        throw DomainError("logistic copula: gamma must lie in (0, 1)");
      }
      return;
  }
}

LaplaceSample sample(const CopulaSpec& copula, std::size_t n, std::uint64_t seed,
                     unsigned workers) {
  copula.validate();
  if (n == 0) throw DomainError("sample: n must be at least 1");
  LaplaceSample out;
  out.pairs.resize(n);
  out.copula = copula;
  out.seed = seed;
  fill_blocks(n, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    RandomStream rng(seed, block);
    for (std::size_t i = begin; i < end; ++i) out.pairs[i] = draw_pair(copula, rng);
  });
  return out;
}

double cond_log_sf(const CopulaSpec& copula, double x, double y) {
  copula.validate();
  require_finite(x, "cond_log_sf");
  if (std::isnan(y)) throw DomainError("cond_log_sf: NaN argument");
  if (y == std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  if (y == -std::numeric_limits<double>::infinity()) return 0.0;
  switch (copula.family) {
    case Family::Gaussian:
      return margins::normal_log_sf(gaussian_standardized(copula.param, x, y));
    case Family::InvertedLogistic:
      return -logistic_kernel(copula.param, margins::log_neg_log_laplace_sf(x),
                              margins::log_neg_log_laplace_sf(y));
    case Family::Logistic: {
      const double k = logistic_kernel(copula.param, margins::log_neg_log_laplace_cdf(x),
                                       margins::log_neg_log_laplace_cdf(y));
      return std::log(-std::expm1(-k));
    }
  }
  return 0.0;
}

double cond_cdf(const CopulaSpec& copula, double x, double y) {
  copula.validate();
  require_finite(x, "cond_cdf");
  if (std::isnan(y)) throw DomainError("cond_cdf: NaN argument");
  if (y == std::numeric_limits<double>::infinity()) return 1.0;
  if (y == -std::numeric_limits<double>::infinity()) return 0.0;
  double p = 0.0;
  switch (copula.family) {
    case Family::Gaussian:
      p = margins::normal_cdf(gaussian_standardized(copula.param, x, y));
      break;
    case Family::InvertedLogistic:
      p = -std::expm1(-logistic_kernel(copula.param, margins::log_neg_log_laplace_sf(x),
                                       margins::log_neg_log_laplace_sf(y)));
      break;
    case Family::Logistic:
      p = std::exp(-logistic_kernel(copula.param, margins::log_neg_log_laplace_cdf(x),
                                    margins::log_neg_log_laplace_cdf(y)));
      break;
  }
  return checked_probability(p, "cond_cdf");
}

double cond_quantile(const CopulaSpec& copula, double x, double p) {
  copula.validate();
  require_finite(x, "cond_quantile");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("cond_quantile: p must lie in (0, 1)");

  if (copula.family == Family::Gaussian) {
    const double rho = copula.param;
    const double w = rho * margins::laplace_to_gauss(x) +
                     std::sqrt(1.0 - rho * rho) * margins::normal_quantile(p);
    return margins::gauss_to_laplace(w);
  }

  // Increasing in y with its root at the quantile. Upper quantiles are solved
  // on the log-survival scale to keep relative accuracy in the far tail.
  const bool upper = p > 0.5;
  const double log_q = std::log1p(-p);
  auto f = [&](double y) {
    return upper ? log_q - cond_log_sf(copula, x, y) : cond_cdf(copula, x, y) - p;
  };

  double lo = -1.0;
  double hi = 1.0;
  double f_lo = f(lo);
  double f_hi = f(hi);
  for (double step = 2.0; f_lo > 0.0; step *= 2.0) {
    if (lo <= -kSearchBound) throw RangeError("cond_quantile: lower bracket not found");
    hi = lo;
    f_hi = f_lo;
    lo = std::max(-kSearchBound, lo - step);
    f_lo = f(lo);
  }
  for (double step = 2.0; f_hi < 0.0; step *= 2.0) {
    if (hi >= kSearchBound) throw RangeError("cond_quantile: upper bracket not found");
    lo = hi;
    f_lo = f_hi;
    hi = std::min(kSearchBound, hi + step);
    f_hi = f(hi);
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (a + b);
}

std::vector<double> sample_conditional(const CopulaSpec& copula, double x, std::size_t n,
                                       std::uint64_t seed, unsigned workers) {
  copula.validate();
  std::vector<double> draws(n);
  fill_blocks(n, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    RandomStream rng(seed, block);
    for (std::size_t i = begin; i < end; ++i) {
      draws[i] = cond_quantile(copula, x, rng.uniform());
    }
  });
  return draws;
}

double joint_survival(const CopulaSpec& copula, double x, double y) {
  copula.validate();
  require_finite(x, "joint_survival");
  require_finite(y, "joint_survival");
  const double gamma = copula.param;
  switch (copula.family) {
    case Family::InvertedLogistic: {
      const double log_v = gamma * log_add_exp(margins::log_neg_log_laplace_sf(x) / gamma,
                                               margins::log_neg_log_laplace_sf(y) / gamma);
      return std::exp(-std::exp(log_v));
    }
    case Family::Logistic: {
      const double log_v = gamma * log_add_exp(margins::log_neg_log_laplace_cdf(x) / gamma,
                                               margins::log_neg_log_laplace_cdf(y) / gamma);
      const double p = margins::laplace_sf(x) + margins::laplace_sf(y) +
                       std::expm1(-std::exp(log_v));
      return checked_probability(p, "joint_survival");
    }
    case Family::Gaussian: {
      const double rho = gamma;
      const double v = margins::laplace_to_gauss(x);
      const double w = margins::laplace_to_gauss(y);
      const double scale = std::sqrt(1.0 - rho * rho);
      auto integrand = [&](double s) {
        return std::exp(margins::normal_log_pdf(s) +
                        margins::normal_log_sf((w - rho * s) / scale));
      };
      const double p = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          integrand, v, std::numeric_limits<double>::infinity(), 15, 1e-13);
      return checked_probability(p, "joint_survival");
    }
  }
  return 0.0;
}

DependenceMeasures chi_and_chibar(const CopulaSpec& copula) {
  copula.validate();
  switch (copula.family) {
    case Family::Gaussian:
      return {0.0, copula.param};
    case Family::InvertedLogistic:
      return {0.0, std::exp2(1.0 - copula.param) - 1.0};
    case Family::Logistic:
      return {2.0 - std::exp2(copula.param), 1.0};
  }
  return {0.0, 0.0};
}

double empirical_chi(const LaplaceSample& sample, double p) {
  const double u = margins::laplace_quantile(p);
  std::size_t above_x = 0;
  std::size_t above_both = 0;
  for (const auto& pair : sample.pairs) {
    if (pair.x > u) {
      ++above_x;
      if (pair.y > u) ++above_both;
    }
  }
  if (above_x == 0) throw InsufficientDataError("empirical_chi: no exceedances", 0);
  return static_cast<double>(above_both) / static_cast<double>(above_x);
}

}  // namespace condex
