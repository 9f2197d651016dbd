#pragma once

// Location and scale norming functions a(x), b(x) for the conditional
// extremes model on the Laplace scale.

#include <optional>

#include "condex/copulas.hpp"

namespace condex {

enum class NormingOrder { Ultimate, Penultimate, Parametric };

const char* to_string(NormingOrder order);

// Parameters of a norming pair. For the copula-derived orders alpha and beta
// are the limits a(x)/x -> alpha and log b(x)/log x -> beta; the delta/gamma
// fields and u are used only by the parametric family
//   a(x) = (alpha + delta_a x^{-gamma_a}) x,
//   log b(x) = (beta + delta_b x^{-gamma_b}) log x,   x >= u.
struct NormingParams {
  double alpha = 0.0;
  double beta = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
  double gamma_a = 1.0;
  double gamma_b = 1.0;
  double u = 1.0;
};

class NormingPair {
 public:
  static NormingPair ultimate(const CopulaSpec& copula);
  static NormingPair penultimate(const CopulaSpec& copula);
  static NormingPair parametric(const NormingParams& params);

  // Copula orders are defined for x > 1, the parametric family for x >= u.
  double a(double x) const;
  double b(double x) const;

  NormingOrder order() const { return order_; }
  const NormingParams& params() const { return params_; }
  const std::optional<CopulaSpec>& copula() const { return copula_; }

 private:
  NormingPair(NormingOrder order, NormingParams params, std::optional<CopulaSpec> copula)
      : order_(order), params_(params), copula_(copula) {}

  void check_domain(double x) const;

  NormingOrder order_;
  NormingParams params_;
  std::optional<CopulaSpec> copula_;
};

inline NormingPair ultimate_norming(const CopulaSpec& copula) {
  return NormingPair::ultimate(copula);
}
inline NormingPair penultimate_norming(const CopulaSpec& copula) {
  return NormingPair::penultimate(copula);
}
inline NormingPair parametric_norming(const NormingParams& params) {
  return NormingPair::parametric(params);
}

// Second-order Gaussian approximations to a_1(u)/u and log b_1(u)/log u.
double alpha1(double rho, double u);
double beta1(double u);

}  // namespace condex
