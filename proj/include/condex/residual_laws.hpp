#pragma once

// Limit laws H and finite-level laws H_x of the normalised residual
// Z = {Y - a(X)} / b(X), their supports, and sup-distances between CDFs.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace condex {

using CdfFunction = std::function<double(double)>;

enum class LawKind { GaussianH, GaussianHx1, GaussianHx2, InvLogH, InvLogHx, Empirical };

const char* to_string(LawKind kind);

struct Support {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct CdfValue {
  double p;
  // True when z fell outside the finite support and the boundary value was
  // returned.
  bool clamped;
};

enum class EndpointMode {
  // Closed-form first-order endpoint expansions.
  FirstOrder,
  // Numerical roots: lower endpoint where the exponent vanishes, upper
  // endpoint where the density changes sign.
  Refined,
};

// Scalar forms.
double gaussian_H(double rho, double z);
double gaussian_Hx1(double rho, double x, double z);
double gaussian_Hx2(double rho, double x, double z);
double invlog_H(double gamma, double z);
double invlog_Hx(double gamma, double x, double z, EndpointMode mode = EndpointMode::FirstOrder);

// -log{1 - H_x(z)} for the inverted logistic, without clamping.
double invlog_Hx_exponent(double gamma, double x, double z);

Support invlog_support(double gamma, double x, EndpointMode mode = EndpointMode::FirstOrder);

// Asymptotic endpoint deficiency 1 - H_x(z_x^H): exp{-gamma x/(2 - 2 gamma)}
// for gamma < 2/3, exp(-x) for gamma = 2/3, and 0 when the support is
// unbounded above.
double invlog_endpoint_mass(double gamma, double x);
// The same deficiency evaluated from the exponent at the upper endpoint.
double invlog_endpoint_mass_exact(double gamma, double x,
                                  EndpointMode mode = EndpointMode::FirstOrder);

class ResidualLaw {
 public:
  static ResidualLaw gaussian_H(double rho);
  static ResidualLaw gaussian_Hx1(double rho, double x);
  static ResidualLaw gaussian_Hx2(double rho, double x);
  static ResidualLaw invlog_H(double gamma);
  static ResidualLaw invlog_Hx(double gamma, double x,
                               EndpointMode mode = EndpointMode::FirstOrder);
  // Empirical CDF of the given atoms (used for the logistic limit law).
  static ResidualLaw empirical(std::vector<double> atoms);

  LawKind kind() const { return kind_; }
  double param() const { return param_; }
  std::optional<double> x_level() const { return x_level_; }
  Support support() const { return support_; }

  CdfValue evaluate(double z) const;
  double cdf(double z) const { return evaluate(z).p; }
  // Smallest z with cdf(z) >= p; the upper endpoint when the law is
  // defective and p exceeds its total mass.
  double quantile(double p) const;

  CdfFunction as_function() const;

 private:
  ResidualLaw(LawKind kind, double param, std::optional<double> x)
      : kind_(kind), param_(param), x_level_(x) {}

  LawKind kind_;
  double param_;
  std::optional<double> x_level_;
  Support support_;
  EndpointMode endpoint_mode_ = EndpointMode::FirstOrder;
  double mean_ = 0.0;
  double sd_ = 1.0;
  std::vector<double> atoms_;
};

// max |F(z) - G(z)| over the given grid.
double sup_distance(const CdfFunction& f, const CdfFunction& g, const std::vector<double>& grid);
double sup_distance(const ResidualLaw& a, const ResidualLaw& b, const std::vector<double>& grid);

// Adaptive sup-distance on [lo, hi]: a linear grid plus log-spaced points
// towards both ends and the given breakpoints, doubled until successive
// values differ by less than tol.
double sup_distance_adaptive(const CdfFunction& f, const CdfFunction& g, double lo, double hi,
                             const std::vector<double>& breakpoints = {}, double tol = 1e-4);

// Adaptive sup-distance over the union of both laws' [1e-6, 1 - 1e-6]
// quantile ranges, with support endpoints as breakpoints.
double sup_distance(const ResidualLaw& a, const ResidualLaw& b);

}  // namespace condex
