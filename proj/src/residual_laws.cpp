#include "condex/residual_laws.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "condex/errors.hpp"
#include "condex/margins.hpp"

namespace condex {
namespace {

using margins::kLn2;

constexpr double kTwoThirds = 2.0 / 3.0;

bool is_two_thirds(double gamma) { return std::abs(gamma - kTwoThirds) < 1e-12; }

void check_rho(double rho, const char* what) {
  if (!(rho > -1.0 && rho < 1.0) || rho == 0.0) {
    throw DomainError(std::string(what) + ": rho must lie in (-1, 1) and be non-zero");
  }
}

void check_gaussian_level(double x, const char* what) {
  if (!(x > 1.0) || !std::isfinite(x)) throw DomainError(std::string(what) + ": x must exceed 1");
}

void check_hx_args(double gamma, double x) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("invlog_Hx: gamma must lie in (0, 1)");
  }
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("invlog_Hx: x must be positive");
}

double h_sd(double rho) { return std::sqrt(2.0 * rho * rho * (1.0 - rho * rho)); }

double hx1_sd(double rho, double x) {
  return h_sd(rho) * (1.0 + std::log(x) / (2.0 * std::sqrt(2.0 * rho * rho * x)));
}

double hx2_mean(double rho, double x) { return -std::log(rho) / std::sqrt(2.0 * rho * rho * x); }

double hx2_sd(double rho, double x) {
  const double factor =
      1.0 + (std::log(x) + 2.0 * std::log(rho)) / (2.0 * std::sqrt(2.0 * rho * rho * x));
  if (!(factor > 0.0)) throw DomainError("gaussian_Hx2: non-positive scale at this (rho, x)");
  return h_sd(rho) * factor;
}

// Coefficient of the x^{3 gamma - 3} correction for gamma in (2/3, 1).
double big_gamma_coefficient(double gamma) {
  return kLn2 * kLn2 / (6.0 * gamma * gamma) * (1.0 - gamma) *
         (6.0 * gamma + (1.0 - 8.0 * gamma) * kLn2);
}

double two_thirds_coefficient(double x) {
  return kLn2 * kLn2 / (8.0 * x) * (4.0 - 13.0 * kLn2 / 3.0);
}

double exponent_derivative(double gamma, double x, double z) {
  if (gamma < kTwoThirds && !is_two_thirds(gamma)) {
    return std::pow(z, 1.0 / gamma - 1.0) * (1.0 + (1.0 - gamma) * (1.0 - kLn2) / (gamma * x)) -
           (1.0 - gamma) / x * std::pow(z, 2.0 / gamma - 1.0);
  }
  if (is_two_thirds(gamma)) {
    return std::sqrt(z) * (1.0 + (1.0 - kLn2) / (2.0 * x)) - z * z / (3.0 * x) +
           1.5 * two_thirds_coefficient(x) * std::pow(z, -2.5);
  }
  return std::pow(z, 1.0 / gamma - 1.0) - big_gamma_coefficient(gamma) *
                                              std::pow(x, 3.0 * gamma - 3.0) *
                                              (1.0 / gamma - 3.0) * std::pow(z, 1.0 / gamma - 4.0);
}

// Root of f, which changes sign once near `guess` > 0, by geometric bracket
// expansion and TOMS 748.
template <class F>
double positive_root(F f, double guess) {
  const double f_guess = f(guess);
  if (f_guess == 0.0) return guess;
  for (double factor = 1.25; factor < 1e6; factor *= 1.25) {
    for (double z : {guess / factor, guess * factor}) {
      const double fz = f(z);
      if ((fz > 0.0) == (f_guess > 0.0)) continue;
      const bool below = z < guess;
      boost::uintmax_t max_iter = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          f, below ? z : guess, below ? guess : z, below ? fz : f_guess, below ? f_guess : fz,
          boost::math::tools::eps_tolerance<double>(52), max_iter);
      return 0.5 * (a + b);
    }
  }
  throw RangeError("invlog_support: endpoint root not bracketed");
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

const char* to_string(LawKind kind) {
  switch (kind) {
    case LawKind::GaussianH:
      return "gaussian_H";
    case LawKind::GaussianHx1:
      return "gaussian_Hx1";
    case LawKind::GaussianHx2:
      return "gaussian_Hx2";
    case LawKind::InvLogH:
      return "invlog_H";
    case LawKind::InvLogHx:
      return "invlog_Hx";
    case LawKind::Empirical:
      return "empirical";
  }
  return "unknown";
}

double gaussian_H(double rho, double z) {
  check_rho(rho, "gaussian_H");
  return margins::normal_cdf(z / h_sd(rho));
}

double gaussian_Hx1(double rho, double x, double z) {
  check_rho(rho, "gaussian_Hx1");
  check_gaussian_level(x, "gaussian_Hx1");
  return margins::normal_cdf(z / hx1_sd(rho, x));
}

double gaussian_Hx2(double rho, double x, double z) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("gaussian_Hx2: rho must lie in (0, 1)");
  check_gaussian_level(x, "gaussian_Hx2");
  return margins::normal_cdf((z - hx2_mean(rho, x)) / hx2_sd(rho, x));
}

double invlog_H(double gamma, double z) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("invlog_H: gamma must lie in (0, 1]");
  if (std::isnan(z)) throw DomainError("invlog_H: NaN argument");
  if (z <= 0.0) return 0.0;
  return -std::expm1(-gamma * std::pow(z, 1.0 / gamma));
}

double invlog_Hx_exponent(double gamma, double x, double z) {
  check_hx_args(gamma, x);
  if (std::isnan(z)) throw DomainError("invlog_Hx: NaN argument");
  const double inv = 1.0 / gamma;
  if (gamma < kTwoThirds && !is_two_thirds(gamma)) {
    if (z <= 0.0) return 0.0;
    const double zp = std::pow(z, inv);
    return gamma * zp + (1.0 - gamma) * (1.0 - kLn2) / x * zp -
           gamma * (1.0 - gamma) / (2.0 * x) * zp * zp;
  }
  if (z <= 0.0) return -std::numeric_limits<double>::infinity();
  if (is_two_thirds(gamma)) {
    const double z15 = z * std::sqrt(z);
    return kTwoThirds * z15 + (1.0 - kLn2) / (3.0 * x) * z15 - z15 * z15 / (9.0 * x) -
           two_thirds_coefficient(x) / z15;
  }
  return gamma * std::pow(z, inv) -
         big_gamma_coefficient(gamma) * std::pow(x, 3.0 * gamma - 3.0) * std::pow(z, inv - 3.0);
}

Support invlog_support(double gamma, double x, EndpointMode mode) {
  check_hx_args(gamma, x);
  Support s;
  if (gamma < kTwoThirds && !is_two_thirds(gamma)) {
    s.lo = 0.0;
    s.hi = std::pow(x / (1.0 - gamma) + (1.0 - kLn2) / gamma, gamma);
  } else if (is_two_thirds(gamma)) {
    s.lo = std::cbrt(12.0 - 13.0 * kLn2) * std::pow(kLn2 / 4.0, kTwoThirds) / std::cbrt(x);
    s.hi = std::cbrt(9.0) * std::pow(x, kTwoThirds);
  } else {
    s.lo = std::pow(kLn2, kTwoThirds) / gamma *
           std::cbrt((1.0 - gamma) / 6.0 * (6.0 * gamma + (1.0 - 8.0 * gamma) * kLn2)) *
           std::pow(x, gamma - 1.0);
  }
  if (mode == EndpointMode::Refined) {
    if (s.lo > 0.0) {
      s.lo = positive_root([&](double z) { return invlog_Hx_exponent(gamma, x, z); }, s.lo);
    }
    if (std::isfinite(s.hi)) {
      s.hi = positive_root([&](double z) { return exponent_derivative(gamma, x, z); }, s.hi);
    }
  }
  return s;
}

double invlog_Hx(double gamma, double x, double z, EndpointMode mode) {
  return ResidualLaw::invlog_Hx(gamma, x, mode).cdf(z);
}

double invlog_endpoint_mass(double gamma, double x) {
  check_hx_args(gamma, x);
  if (is_two_thirds(gamma)) return std::exp(-x);
  if (gamma < kTwoThirds) return std::exp(-gamma * x / (2.0 - 2.0 * gamma));
  return 0.0;
}

double invlog_endpoint_mass_exact(double gamma, double x, EndpointMode mode) {
  const Support s = invlog_support(gamma, x, mode);
  if (!std::isfinite(s.hi)) return 0.0;
  return std::exp(-invlog_Hx_exponent(gamma, x, s.hi));
}

ResidualLaw ResidualLaw::gaussian_H(double rho) {
  check_rho(rho, "gaussian_H");
  ResidualLaw law(LawKind::GaussianH, rho, std::nullopt);
  law.sd_ = h_sd(rho);
  return law;
}

ResidualLaw ResidualLaw::gaussian_Hx1(double rho, double x) {
  check_rho(rho, "gaussian_Hx1");
  check_gaussian_level(x, "gaussian_Hx1");
  ResidualLaw law(LawKind::GaussianHx1, rho, x);
  law.sd_ = hx1_sd(rho, x);
  return law;
}

ResidualLaw ResidualLaw::gaussian_Hx2(double rho, double x) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("gaussian_Hx2: rho must lie in (0, 1)");
  check_gaussian_level(x, "gaussian_Hx2");
  ResidualLaw law(LawKind::GaussianHx2, rho, x);
  law.mean_ = hx2_mean(rho, x);
  law.sd_ = hx2_sd(rho, x);
  return law;
}

ResidualLaw ResidualLaw::invlog_H(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("invlog_H: gamma must lie in (0, 1]");
  ResidualLaw law(LawKind::InvLogH, gamma, std::nullopt);
  law.support_.lo = 0.0;
  return law;
}

ResidualLaw ResidualLaw::invlog_Hx(double gamma, double x, EndpointMode mode) {
  ResidualLaw law(LawKind::InvLogHx, gamma, x);
  law.support_ = invlog_support(gamma, x, mode);
  law.endpoint_mode_ = mode;
  return law;
}

ResidualLaw ResidualLaw::empirical(std::vector<double> atoms) {
  if (atoms.empty()) throw InsufficientDataError("empirical law: no atoms", 0);
  for (double a : atoms) {
    if (!std::isfinite(a)) throw DomainError("empirical law: non-finite atom");
  }
  std::sort(atoms.begin(), atoms.end());
  ResidualLaw law(LawKind::Empirical, 0.0, std::nullopt);
  law.support_ = {atoms.front(), atoms.back()};
  law.atoms_ = std::move(atoms);
  return law;
}

CdfValue ResidualLaw::evaluate(double z) const {
  if (std::isnan(z)) throw DomainError("residual law: NaN argument");
  switch (kind_) {
    case LawKind::GaussianH:
    case LawKind::GaussianHx1:
    case LawKind::GaussianHx2:
      return {margins::normal_cdf((z - mean_) / sd_), false};
    case LawKind::InvLogH:
      return {condex::invlog_H(param_, z), false};
    case LawKind::InvLogHx: {
      const double x = *x_level_;
      if (z <= support_.lo) return {0.0, z < support_.lo};
      const bool above = z > support_.hi;
      const double e = invlog_Hx_exponent(param_, x, above ? support_.hi : z);
      return {clamp_probability(-std::expm1(-e)), above};
    }
    case LawKind::Empirical: {
      const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), z);
      return {static_cast<double>(it - atoms_.begin()) / static_cast<double>(atoms_.size()),
              false};
    }
  }
  return {0.0, false};
}

double ResidualLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("residual law quantile: p must lie in (0, 1)");
  switch (kind_) {
    case LawKind::GaussianH:
    case LawKind::GaussianHx1:
    case LawKind::GaussianHx2:
      return mean_ + sd_ * margins::normal_quantile(p);
    case LawKind::InvLogH:
      return std::pow(-std::log1p(-p) / param_, param_);
    case LawKind::Empirical: {
      const auto n = static_cast<double>(atoms_.size());
      const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(p * n) - 1.0));
      return atoms_[std::min(idx, atoms_.size() - 1)];
    }
    case LawKind::InvLogHx:
      break;
  }
  double lo = support_.lo;
  double hi = support_.hi;
  if (std::isfinite(hi)) {
    if (cdf(hi) <= p) return hi;
  } else {
    hi = std::max(1.0, 2.0 * lo);
    while (cdf(hi) < p) {
      hi *= 2.0;
      if (hi > 1e300) throw RangeError("residual law quantile: bracket not found");
    }
  }
  auto f = [&](double z) { return cdf(z) - p; };
  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (a + b);
}

CdfFunction ResidualLaw::as_function() const {
  return [law = *this](double z) { return law.cdf(z); };
}

double sup_distance(const CdfFunction& f, const CdfFunction& g, const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("sup_distance: empty grid");
  double d = 0.0;
  for (double z : grid) d = std::max(d, std::abs(f(z) - g(z)));
  return d;
}

double sup_distance(const ResidualLaw& a, const ResidualLaw& b, const std::vector<double>& grid) {
  return sup_distance(a.as_function(), b.as_function(), grid);
}

double sup_distance_adaptive(const CdfFunction& f, const CdfFunction& g, double lo, double hi,
                             const std::vector<double>& breakpoints, double tol) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw DomainError("sup_distance: empty or unbounded range");
  }
  std::vector<double> fixed;
  const double width = hi - lo;
  for (int k = 1; k <= 15; ++k) {
    for (double m : {1.0, 3.0}) {
      const double off = m * width * std::pow(10.0, -k);
      fixed.push_back(lo + off);
      fixed.push_back(hi - off);
    }
  }
  fixed.push_back(lo);
  fixed.push_back(hi);
  for (double z : breakpoints) {
    if (z >= lo && z <= hi) {
      fixed.push_back(z);
      fixed.push_back(std::nextafter(z, -std::numeric_limits<double>::infinity()));
      fixed.push_back(std::nextafter(z, std::numeric_limits<double>::infinity()));
    }
  }
  const double base = sup_distance(f, g, fixed);

  double previous = -1.0;
  for (std::size_t n = 512; n <= (std::size_t{1} << 19); n *= 2) {
    double d = base;
    for (std::size_t i = 0; i <= n; ++i) {
      const double z = lo + width * static_cast<double>(i) / static_cast<double>(n);
      d = std::max(d, std::abs(f(z) - g(z)));
    }
    if (previous >= 0.0 && std::abs(d - previous) < tol) return d;
    previous = d;
  }
  return previous;
}

double sup_distance(const ResidualLaw& a, const ResidualLaw& b) {
  const double lo = std::min(a.quantile(1e-6), b.quantile(1e-6));
  const double hi = std::max(a.quantile(1.0 - 1e-6), b.quantile(1.0 - 1e-6));
  std::vector<double> breakpoints;
  for (const ResidualLaw* law : {&a, &b}) {
    const Support s = law->support();
    if (std::isfinite(s.lo)) breakpoints.push_back(s.lo);
    if (std::isfinite(s.hi)) breakpoints.push_back(s.hi);
    if (law->kind() == LawKind::Empirical) {
      for (double q = 0.0; q <= 1.0; q += 1.0 / 4096.0) {
        if (q > 0.0 && q < 1.0) breakpoints.push_back(law->quantile(q));
      }
    }
  }
  if (!(lo < hi)) return std::abs(a.cdf(lo) - b.cdf(lo));
  return sup_distance_adaptive(a.as_function(), b.as_function(), lo, hi, breakpoints);
}

}  // namespace condex
