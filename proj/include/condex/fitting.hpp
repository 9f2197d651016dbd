#pragma once

// Pseudo-likelihood fitting of the conditional extremes model
//   Y = a(X) + b(X) (mu + sigma eps),  eps ~ N(0, 1),  X > u,
// with ultimate norming a(x) = alpha x, b(x) = x^beta, or the penultimate
// family a(x) = (alpha + delta_a x^{-gamma_a}) x,
// b(x) = x^{beta + delta_b x^{-gamma_b}}.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condex/copulas.hpp"

namespace condex {

enum class FitModel { Ultimate, Penultimate };

const char* to_string(FitModel model);
FitModel parse_fit_model(const std::string& name);

struct OptimizerConfig {
  std::size_t max_iter = 2000;
  double tol = 1e-8;
  std::size_t restarts = 5;
};

struct FitConfig {
  double threshold_quantile = 0.95;
  double gamma_a = 1.0;
  double gamma_b = 1.0;
  FitModel model = FitModel::Ultimate;
  OptimizerConfig optimizer;
  // Seeds the random restart points.
  std::uint64_t seed = 0;
  // Constant multiplier on b(x). The maximised likelihood does not depend
  // on it; sigma and mu absorb it.
  double b_scale = 1.0;
};

struct FitResult {
  FitModel model = FitModel::Ultimate;
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
  std::optional<double> delta_a;
  std::optional<double> delta_b;
  double loglik = 0.0;
  double threshold = 0.0;
  std::size_t n_exceed = 0;
  bool converged = false;
  // Standard errors in the order alpha, beta, mu, sigma[, delta_a, delta_b],
  // from the inverse numerical observed information.
  std::optional<std::vector<double>> std_errors;
  std::size_t evaluations = 0;
  // gamma_b = 0 makes beta and delta_b enter b(x) only through their sum.
  bool scale_degenerate = false;

  // alpha, beta, mu, sigma[, delta_a, delta_b]
  std::vector<double> natural_parameters() const;
};

// Throws InsufficientDataError below 50 exceedances.
FitResult ht_fit(const LaplaceSample& sample, const FitConfig& config);

// Full Gaussian pseudo-log-likelihood at the given natural parameters.
double pseudo_loglik(const LaplaceSample& sample, const FitConfig& config, FitModel model,
                     const std::vector<double>& natural);

struct ModelComparison {
  double delta_loglik;
  double aic_ultimate;
  double aic_penultimate;
  FitModel preferred;
};

ModelComparison model_compare(const FitResult& fit_u, const FitResult& fit_p);

// (y - a(x)) / b(x) at the fitted norming, for the exceedances of the fit.
std::vector<double> residual_extract(const LaplaceSample& sample, const FitResult& fit,
                                     const FitConfig& config);

std::string to_json(const FitResult& fit, const std::string& run_header = "");

}  // namespace condex
