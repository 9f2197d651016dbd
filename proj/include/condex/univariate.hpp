#pragma once

// Univariate penultimate extreme value approximations: reciprocal hazard,
// the penultimate shape xi_n = h'(b_n), and GEV approximation errors of the
// distribution of the maximum of n draws.

#include <functional>
#include <string>

namespace condex {

struct UnivariateModel {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> sf;
  std::function<double(double)> pdf;
  // x with sf(x) = q.
  std::function<double(double)> upper_quantile;
  // Optional tail-accurate {1 - F(x)} / f(x); sf / pdf is used when empty.
  std::function<double(double)> hazard_inverse;
  // Limiting shape of the domain of attraction.
  double xi_limit = 0.0;
};

UnivariateModel gaussian_model();
UnivariateModel exponential_model();

// h(x) = {1 - F(x)} / f(x).
double reciprocal_hazard(const UnivariateModel& model, double x);
// Central difference with step max(1e-6, 1e-6 |x|) and one Richardson step.
double reciprocal_hazard_derivative(const UnivariateModel& model, double x);

// b_n with F(b_n) = 1 - 1/n, and a_n = h(b_n).
double norming_location(const UnivariateModel& model, double n);
double norming_scale(const UnivariateModel& model, double n);

double xi_n(const UnivariateModel& model, double n);

// exp{-(1 + xi x)_+^{-1/xi}}, with the Gumbel form for |xi| < 1e-8.
double gev_cdf(double x, double xi);

struct GevErrors {
  double err_ultimate;
  double err_penultimate;
  double xi_n;
};

// |F^n(a_n x + b_n) - G_xi(x)| for the limiting xi and for xi_n.
GevErrors penultimate_gev_error(const UnivariateModel& model, double n, double x);

}  // namespace condex
