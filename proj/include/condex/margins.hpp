#pragma once

// Marginal transforms between the uniform, standard Gaussian and standard
// Laplace scales. Everything that can underflow is computed in log space so
// Laplace quantiles up to |x| = 700 stay finite.

#include <numbers>

namespace condex::margins {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kDaysPerYear = 365.25;

// Standard Laplace distribution.
double laplace_cdf(double x);
double laplace_sf(double x);
double laplace_log_cdf(double x);
double laplace_log_sf(double x);
double laplace_quantile(double p);

// Quantile from log F_L(x) (resp. log{1 - F_L(x)}), exact in both tails.
double laplace_quantile_from_log_cdf(double log_p);
double laplace_quantile_from_log_sf(double log_q);

// log{-log F_L(x)} and log{-log(1 - F_L(x))}, finite for every finite x.
double log_neg_log_laplace_cdf(double x);
double log_neg_log_laplace_sf(double x);

// Standard normal distribution, tail-accurate.
double normal_cdf(double v);
double normal_sf(double v);
double normal_log_cdf(double v);
double normal_log_sf(double v);
double normal_log_pdf(double v);
double normal_quantile(double p);
// Mills ratio {1 - Phi(v)} / phi(v).
double mills_ratio(double v);

double gauss_to_laplace(double v);
double laplace_to_gauss(double x);

// Two-term large-x expansion of laplace_to_gauss:
//   v = sqrt(2x) + {2 log 2 - log(2x) - log(2 pi)} / (2 sqrt(2x)).
double laplace_to_gauss_expansion(double x);

struct ReturnPeriod {
  double years;
  double n_per_year = kDaysPerYear;
};

double return_period_years(double x, double n_per_year = kDaysPerYear);
ReturnPeriod return_period(double x, double n_per_year = kDaysPerYear);
// Laplace level whose return period is `years`.
double return_level(double years, double n_per_year = kDaysPerYear);

}  // namespace condex::margins
