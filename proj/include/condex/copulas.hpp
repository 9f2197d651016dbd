#pragma once

// Bivariate dependence structures on the Laplace scale: exact samplers, exact
// conditional laws of Y given X = x, and the dependence summaries chi and
// chi-bar.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace condex {

enum class Family { Gaussian, InvertedLogistic, Logistic };

std::string to_string(Family family);
Family parse_family(std::string_view name);

/// A dependence family with its parameter: the correlation rho for the
/// Gaussian copula, the logistic dependence parameter gamma otherwise.
struct CopulaSpec {
  Family family = Family::Gaussian;
  double param = 0.0;

  static CopulaSpec gaussian(double rho);
  static CopulaSpec inverted_logistic(double gamma);
  static CopulaSpec logistic(double gamma);

  /// Throws DomainError unless rho is in (-1, 1), gamma is in (0, 1] for the
  /// inverted logistic, or gamma is in (0, 1) for the logistic.
  void validate() const;
};

struct LaplacePair {
  double x;
  double y;
};

struct LaplaceSample {
  std::vector<LaplacePair> pairs;
  // Absent for external or synthetic data.
  std::optional<CopulaSpec> copula;
  std::uint64_t seed = 0;

  std::size_t size() const { return pairs.size(); }
};

/// n i.i.d. pairs with Laplace margins. Deterministic in (copula, n, seed)
/// and independent of the worker count.
LaplaceSample sample(const CopulaSpec& copula, std::size_t n, std::uint64_t seed,
                     unsigned workers = 0);

/// Pr(Y <= y | X = x).
double cond_cdf(const CopulaSpec& copula, double x, double y);
/// log Pr(Y > y | X = x), accurate when the survival probability is tiny.
double cond_log_sf(const CopulaSpec& copula, double x, double y);

/// y with cond_cdf(x, y) = p to within 1e-10. Throws RangeError when the
/// root is not bracketed inside [-750, 750].
double cond_quantile(const CopulaSpec& copula, double x, double p);

/// n exact draws from Y | X = x by inversion of uniforms.
std::vector<double> sample_conditional(const CopulaSpec& copula, double x, std::size_t n,
                                       std::uint64_t seed, unsigned workers = 0);

/// Pr(X > x, Y > y). Closed form for the logistic families, one-dimensional
/// quadrature for the Gaussian.
double joint_survival(const CopulaSpec& copula, double x, double y);

struct DependenceMeasures {
  double chi;
  double chibar;
};

DependenceMeasures chi_and_chibar(const CopulaSpec& copula);

/// Empirical Pr{F(Y) > p | F(X) > p} on the Laplace scale.
double empirical_chi(const LaplaceSample& sample, double p);

}  // namespace condex
