#pragma once

// Convergence diagnostics for the conditional extremes approximations:
// distances between the exact law of the normalised residual at level x and
// the limit law H or the finite-level law H_x, the data behind the two
// figures, and log-rate regressions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "condex/copulas.hpp"
#include "condex/normings.hpp"
#include "condex/residual_laws.hpp"

namespace condex {

enum class Metric {
  // Ultimate norming against H.
  UltimateDist,
  // Penultimate norming against H.
  PenultimateDist,
  // Penultimate norming against H_x.
  RemainderSup,
};

const char* to_string(Metric metric);

enum class DistanceMode {
  // Sup-distance between the exact conditional CDF and the law.
  Analytic,
  // KS statistic of exact conditional draws against the law.
  MonteCarlo,
};

struct ConvergenceRow {
  CopulaSpec copula;
  NormingOrder norming;
  double x;
  double quantile;
  // Return period in observations, 1 / Pr(X > x).
  double n;
  double return_period_years;
  Metric metric;
  double value;
  std::size_t n_mc;
  // 1% KS critical value for the Monte Carlo size; 0 in analytic mode.
  double half_width;
};

struct ConvergenceConfig {
  DistanceMode mode = DistanceMode::MonteCarlo;
  std::size_t n_mc = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  // Restrict the sup over z to [Q_H(p_lo), Q_H(p_hi)].
  std::optional<std::pair<double, double>> window;
  // Conditioning level whose exact conditional law stands in for the
  // logistic limit H.
  double logistic_reference_x = 50.0;
  std::vector<Metric> metrics = {Metric::UltimateDist, Metric::PenultimateDist,
                                 Metric::RemainderSup};
};

// (y - a(x)) / b(x) for draws of Y given X = x.
std::vector<double> normalized_residuals(const std::vector<double>& y, double x,
                                         const NormingPair& norming);

// (y - a(x)) / b(x) over pairs with x in [x_lo, x_hi).
std::vector<double> normalized_residuals(const LaplaceSample& sample, const NormingPair& norming,
                                         double x_lo, double x_hi);

std::vector<double> exact_normalized_residuals(const CopulaSpec& copula,
                                               const NormingPair& norming, double x,
                                               std::size_t n, std::uint64_t seed,
                                               unsigned workers = 0);

// Exact CDF of Z = (Y - a(x)) / b(x) given X = x.
CdfFunction exact_residual_cdf(const CopulaSpec& copula, const NormingPair& norming, double x);

// sup |F_n(z) - F(z)| restricted to z in [lo, hi].
double windowed_ks(std::vector<double> sample, const CdfFunction& cdf, double lo, double hi);
double windowed_two_sample_ks(std::vector<double> a, std::vector<double> b, double lo, double hi);

std::vector<ConvergenceRow> convergence_table(const CopulaSpec& copula,
                                              const std::vector<double>& x_grid,
                                              const ConvergenceConfig& config);

enum class RateModel {
  // log value ~ log log n
  LogNPower,
  // log value ~ log{log log n / sqrt(log n)}
  LogLogOverSqrtLog,
};

struct RateFit {
  double exponent;
  double intercept;
  double r_squared;
  std::size_t n_points;
};

RateFit rate_summary(const std::vector<ConvergenceRow>& rows, RateModel model);

struct Fig1Row {
  double u;
  double quantile;
  double return_years;
  double alpha0;
  double alpha1;
  double beta0;
  double beta1;
};

std::vector<Fig1Row> fig1_data(double rho, const std::vector<double>& quantiles,
                               double n_per_year = 365.25);

struct Fig2Row {
  double gamma;
  double x;
  double z;
  double H;
  double Hx;
};

std::vector<Fig2Row> fig2_data(const std::vector<double>& gammas,
                               const std::vector<double>& quantiles,
                               const std::vector<double>& z_grid);

struct Fig2Sup {
  double gamma;
  double x;
  double sup;
};

// max over z of |Hx - H| for each (gamma, x) block, in row order.
std::vector<Fig2Sup> fig2_sup(const std::vector<Fig2Row>& rows);

}  // namespace condex
