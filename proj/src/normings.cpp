#include "condex/normings.hpp"

#include <cmath>
#include <string>

#include "condex/errors.hpp"
#include "condex/margins.hpp"

namespace condex {
namespace {

double signed_square(double rho) { return rho < 0.0 ? -rho * rho : rho * rho; }

NormingParams limit_params(const CopulaSpec& copula) {
  NormingParams p;
  switch (copula.family) {
    case Family::Gaussian:
      p.alpha = signed_square(copula.param);
      p.beta = copula.param == 0.0 ? 0.0 : 0.5;
      break;
    case Family::InvertedLogistic:
      p.alpha = 0.0;
      p.beta = 1.0 - copula.param;
      break;
    case Family::Logistic:
      p.alpha = 1.0;
      p.beta = 0.0;
      break;
  }
  return p;
}

}  // namespace

const char* to_string(NormingOrder order) {
  switch (order) {
    case NormingOrder::Ultimate:
      return "ultimate";
    case NormingOrder::Penultimate:
      return "penultimate";
    case NormingOrder::Parametric:
      return "parametric";
  }
  return "unknown";
}

NormingPair NormingPair::ultimate(const CopulaSpec& copula) {
  copula.validate();
  return NormingPair(NormingOrder::Ultimate, limit_params(copula), copula);
}

NormingPair NormingPair::penultimate(const CopulaSpec& copula) {
  copula.validate();
  return NormingPair(NormingOrder::Penultimate, limit_params(copula), copula);
}

NormingPair NormingPair::parametric(const NormingParams& params) {
  if (!(params.alpha >= -1.0 && params.alpha <= 1.0)) {
    throw DomainError("parametric_norming: alpha must lie in [-1, 1]");
  }
  if (!(params.beta < 1.0)) throw DomainError("parametric_norming: beta must be below 1");
  if (!(params.gamma_a > 0.0)) throw DomainError("parametric_norming: gamma_a must be positive");
  if (!(params.gamma_b >= 0.0)) throw DomainError("parametric_norming: gamma_b must be >= 0");
  if (!(params.u > 1.0)) throw DomainError("parametric_norming: threshold u must exceed 1");
  if (!std::isfinite(params.delta_a) || !std::isfinite(params.delta_b)) {
    throw DomainError("parametric_norming: non-finite delta");
  }
  return NormingPair(NormingOrder::Parametric, params, std::nullopt);
}

void NormingPair::check_domain(double x) const {
  if (std::isnan(x) || !std::isfinite(x)) throw DomainError("norming: non-finite x");
  if (order_ == NormingOrder::Parametric) {
    if (x < params_.u) throw DomainError("norming: parametric family evaluated below u");
  } else if (!(x > 1.0)) {
    throw DomainError("norming: x must exceed 1");
  }
}

double NormingPair::a(double x) const {
  check_domain(x);
  if (order_ == NormingOrder::Parametric) {
    return (params_.alpha + params_.delta_a * std::pow(x, -params_.gamma_a)) * x;
  }
  const double rho_or_gamma = copula_->param;
  switch (copula_->family) {
    case Family::Gaussian: {
      const double a0 = params_.alpha * x;
      if (order_ == NormingOrder::Ultimate) return a0;
      return a0 + 0.5 * (1.0 - rho_or_gamma * rho_or_gamma) * std::log(x);
    }
    case Family::InvertedLogistic:
      return order_ == NormingOrder::Ultimate ? 0.0 : -margins::kLn2;
    case Family::Logistic:
      return x;
  }
  return 0.0;
}

double NormingPair::b(double x) const {
  check_domain(x);
  if (order_ == NormingOrder::Parametric) {
    return std::pow(x, params_.beta + params_.delta_b * std::pow(x, -params_.gamma_b));
  }
  const double rho_or_gamma = copula_->param;
  switch (copula_->family) {
    case Family::Gaussian: {
      const double root =
          order_ == NormingOrder::Ultimate ? std::sqrt(x) : std::pow(x, 0.5 - 0.25 / x);
      // rho = 0 uses b(x) = 1 + rho x^{1/2}, which is identically 1.
      return rho_or_gamma == 0.0 ? 1.0 : root;
    }
    case Family::InvertedLogistic:
      return std::pow(x, 1.0 - rho_or_gamma);
    case Family::Logistic:
      return 1.0;
  }
  return 1.0;
}

double alpha1(double rho, double u) {
  if (!(rho > -1.0 && rho < 1.0) || rho == 0.0) {
    throw DomainError("alpha1: rho must lie in (-1, 1) and be non-zero");
  }
  if (!(u > 1.0)) throw DomainError("alpha1: u must exceed 1");
  return signed_square(rho) + (1.0 - rho * rho) * std::log(u) / (2.0 * u);
}

double beta1(double u) {
  if (!(u > 1.0)) throw DomainError("beta1: u must exceed 1");
  return 0.5 - 1.0 / (4.0 * u);
}

}  // namespace condex
