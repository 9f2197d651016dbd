#include "condex/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "condex/errors.hpp"
#include "condex/margins.hpp"
#include "condex/rng.hpp"
#include "json.hpp"

namespace condex {
namespace {

constexpr std::size_t kMinExceedances = 50;
constexpr double kBetaMax = 1.0 - 1e-6;
constexpr double kPenalty = 1e100;

struct Exceedances {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> log_x;
  std::vector<double> x_pow_a;  // x^{-gamma_a}
  std::vector<double> x_pow_b;  // x^{-gamma_b}
  double log_b_scale = 0.0;
  double threshold = 0.0;

  std::size_t size() const { return x.size(); }
};

Exceedances select(const LaplaceSample& sample, const FitConfig& config) {
  if (!(config.threshold_quantile > 0.5 && config.threshold_quantile < 1.0)) {
    throw DomainError("ht_fit: threshold quantile must lie in (0.5, 1)");
  }
  if (!(config.gamma_a > 0.0) || !(config.gamma_b >= 0.0)) {
    throw DomainError("ht_fit: gamma_a must be positive and gamma_b non-negative");
  }
  if (!(config.b_scale > 0.0) || !std::isfinite(config.b_scale)) {
    throw DomainError("ht_fit: b_scale must be positive");
  }
  Exceedances e;
  e.threshold = margins::laplace_quantile(config.threshold_quantile);
  e.log_b_scale = std::log(config.b_scale);
  for (const auto& p : sample.pairs) {
    if (!(p.x > e.threshold)) continue;
    e.x.push_back(p.x);
    e.y.push_back(p.y);
    e.log_x.push_back(std::log(p.x));
    e.x_pow_a.push_back(std::pow(p.x, -config.gamma_a));
    e.x_pow_b.push_back(std::pow(p.x, -config.gamma_b));
  }
  if (e.size() < kMinExceedances) {
    throw InsufficientDataError("ht_fit: fewer than 50 exceedances", e.size());
  }
  return e;
}

struct Norming {
  double alpha;
  double beta;
  double delta_a;
  double delta_b;
};

double location(const Exceedances& e, const Norming& n, std::size_t i) {
  return (n.alpha + n.delta_a * e.x_pow_a[i]) * e.x[i];
}

double log_scale(const Exceedances& e, const Norming& n, std::size_t i) {
  return e.log_b_scale + (n.beta + n.delta_b * e.x_pow_b[i]) * e.log_x[i];
}

// Negative log-likelihood with mu and sigma at their closed-form maxima.
double profile_nll(const Exceedances& e, const Norming& n, double* mu_out = nullptr,
                   double* sigma_out = nullptr) {
  const auto count = static_cast<double>(e.size());
  double sum_log_b = 0.0;
  double mean = 0.0;
  std::vector<double> r(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double lb = log_scale(e, n, i);
    sum_log_b += lb;
    r[i] = (e.y[i] - location(e, n, i)) * std::exp(-lb);
    mean += r[i];
  }
  mean /= count;
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= count;
  if (mu_out) *mu_out = mean;
  if (sigma_out) *sigma_out = std::sqrt(var);
  const double nll =
      sum_log_b + 0.5 * count * (std::log(2.0 * std::numbers::pi * var) + 1.0);
  return std::isfinite(nll) ? nll : kPenalty;
}

double full_nll(const Exceedances& e, const Norming& n, double mu, double sigma) {
  if (!(sigma > 0.0)) return kPenalty;
  const auto count = static_cast<double>(e.size());
  double total = count * (std::log(sigma) + 0.5 * std::log(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double lb = log_scale(e, n, i);
    const double z = ((e.y[i] - location(e, n, i)) * std::exp(-lb) - mu) / sigma;
    total += lb + 0.5 * z * z;
  }
  return total;
}

// Unconstrained coordinates: alpha = tanh t0, beta = kBetaMax - exp t1,
// then delta_a, delta_b as they are.
Norming from_theta(const std::vector<double>& t, bool penultimate) {
  return {std::tanh(t[0]), kBetaMax - std::exp(t[1]), penultimate ? t[2] : 0.0,
          penultimate ? t[3] : 0.0};
}

std::vector<double> to_theta(const Norming& n, bool penultimate) {
  std::vector<double> t = {std::atanh(std::clamp(n.alpha, -0.999999, 0.999999)),
                           std::log(kBetaMax - n.beta)};
  if (penultimate) {
    t.push_back(n.delta_a);
    t.push_back(n.delta_b);
  }
  return t;
}

struct Objective {
  const Exceedances* data;
  bool penultimate;
  std::size_t evaluations = 0;

  double operator()(const std::vector<double>& t) {
    ++evaluations;
    return profile_nll(*data, from_theta(t, penultimate));
  }
};

double gsl_objective(const gsl_vector* v, void* params) {
  auto* obj = static_cast<Objective*>(params);
  std::vector<double> t(v->size);
  for (std::size_t i = 0; i < v->size; ++i) t[i] = gsl_vector_get(v, i);
  return (*obj)(t);
}

struct SimplexResult {
  std::vector<double> theta;
  double value;
  bool converged;
};

SimplexResult nelder_mead(Objective& obj, const std::vector<double>& start,
                          const OptimizerConfig& opt) {
  const std::size_t dim = start.size();
  gsl_multimin_function fn{&gsl_objective, dim, &obj};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(dim),
                                                            &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(dim),
                                                               &gsl_vector_free);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x.get(), i, start[i]);
    gsl_vector_set(step.get(), i, 0.3);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim),
      &gsl_multimin_fminimizer_free);
  bool converged = false;
  if (gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get()) == GSL_SUCCESS) {
    for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
      if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), opt.tol) == GSL_SUCCESS) {
        converged = true;
        break;
      }
    }
  }
  SimplexResult out{std::vector<double>(dim), s->fval, converged};
  for (std::size_t i = 0; i < dim; ++i) out.theta[i] = gsl_vector_get(s->x, i);
  return out;
}

Eigen::VectorXd numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& p, double rel_step) {
  Eigen::VectorXd g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(p[i]));
    std::vector<double> up = p;
    std::vector<double> dn = p;
    up[i] += h;
    dn[i] -= h;
    g[static_cast<Eigen::Index>(i)] = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd numeric_hessian(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& p, double rel_step) {
  const auto dim = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd hess(dim, dim);
  std::vector<double> h(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) h[i] = rel_step * std::max(1.0, std::abs(p[i]));
  const double f0 = f(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i; j < p.size(); ++j) {
      double value;
      if (i == j) {
        std::vector<double> up = p;
        std::vector<double> dn = p;
        up[i] += h[i];
        dn[i] -= h[i];
        value = (f(up) - 2.0 * f0 + f(dn)) / (h[i] * h[i]);
      } else {
        auto eval = [&](double si, double sj) {
          std::vector<double> q = p;
          q[i] += si * h[i];
          q[j] += sj * h[j];
          return f(q);
        };
        value = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h[i] * h[j]);
      }
      hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
  }
  return hess;
}

// Damped Newton steps on the profile objective from the simplex optimum.
std::vector<double> newton_polish(Objective& obj, std::vector<double> theta, double& value) {
  auto f = [&](const std::vector<double>& t) { return obj(t); };
  for (int iter = 0; iter < 20; ++iter) {
    const Eigen::VectorXd g = numeric_gradient(f, theta, 1e-6);
    const Eigen::MatrixXd hess = numeric_hessian(f, theta, 1e-4);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) break;
    const Eigen::VectorXd step = ldlt.solve(-g);
    if (!step.allFinite()) break;
    bool improved = false;
    for (double scale = 1.0; scale > 1e-6; scale *= 0.5) {
      std::vector<double> trial = theta;
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] += scale * step[static_cast<Eigen::Index>(i)];
      }
      const double v = f(trial);
      if (v <= value) {
        improved = v < value;
        theta = trial;
        value = v;
        break;
      }
    }
    if (!improved || step.norm() < 1e-10) break;
  }
  return theta;
}

Norming norming_of(const FitResult& fit) {
  return {fit.alpha, fit.beta, fit.delta_a.value_or(0.0), fit.delta_b.value_or(0.0)};
}

double full_nll_natural(const Exceedances& e, FitModel model, const std::vector<double>& p) {
  const bool pen = model == FitModel::Penultimate;
  const Norming n{p[0], p[1], pen ? p[4] : 0.0, pen ? p[5] : 0.0};
  return full_nll(e, n, p[2], p[3]);
}

void quiet_gsl() {
  static const bool done = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)done;
}

}  // namespace

const char* to_string(FitModel model) {
  return model == FitModel::Ultimate ? "ultimate" : "penultimate";
}

FitModel parse_fit_model(const std::string& name) {
  if (name == "ultimate") return FitModel::Ultimate;
  if (name == "penultimate") return FitModel::Penultimate;
  throw DomainError("unknown fit model '" + name + "'");
}

std::vector<double> FitResult::natural_parameters() const {
  std::vector<double> p = {alpha, beta, mu, sigma};
  if (model == FitModel::Penultimate) {
    p.push_back(delta_a.value_or(0.0));
    p.push_back(delta_b.value_or(0.0));
  }
  return p;
}

FitResult ht_fit(const LaplaceSample& sample, const FitConfig& config) {
  quiet_gsl();
  const Exceedances e = select(sample, config);
  const bool pen = config.model == FitModel::Penultimate;
  Objective obj{&e, pen};

  std::vector<std::vector<double>> starts;
  starts.push_back(to_theta({0.0, 0.5, 0.0, 0.0}, pen));
  RandomStream rng(config.seed, 0);
  const std::size_t n_starts = std::max<std::size_t>(1, config.optimizer.restarts);
  while (starts.size() < n_starts) {
    const Norming n{-0.9 + 1.85 * rng.uniform(), -0.5 + 1.4 * rng.uniform(), 0.5 * rng.normal(),
                    0.25 * rng.normal()};
    starts.push_back(to_theta(n, pen));
  }

  SimplexResult best{{}, kPenalty * 10.0, false};
  for (const auto& start : starts) {
    SimplexResult r = nelder_mead(obj, start, config.optimizer);
    if (r.value < best.value) best = std::move(r);
  }
  double value = best.value;
  const std::vector<double> theta = newton_polish(obj, best.theta, value);

  FitResult fit;
  fit.model = config.model;
  const Norming n = from_theta(theta, pen);
  fit.alpha = n.alpha;
  fit.beta = n.beta;
  profile_nll(e, n, &fit.mu, &fit.sigma);
  if (pen) {
    fit.delta_a = n.delta_a;
    fit.delta_b = n.delta_b;
  }
  fit.loglik = -value;
  fit.threshold = e.threshold;
  fit.n_exceed = e.size();
  fit.converged = best.converged && value < kPenalty && std::isfinite(fit.loglik);
  fit.evaluations = obj.evaluations;
  fit.scale_degenerate = pen && config.gamma_b == 0.0;

  if (fit.converged) {
    const std::vector<double> natural = fit.natural_parameters();
    const Eigen::MatrixXd info = numeric_hessian(
        [&](const std::vector<double>& p) { return full_nll_natural(e, fit.model, p); }, natural,
        1e-4);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      const Eigen::MatrixXd cov =
          ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
      std::vector<double> se(natural.size());
      bool ok = true;
      for (std::size_t i = 0; i < se.size(); ++i) {
        const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        ok = ok && v > 0.0 && std::isfinite(v);
        se[i] = std::sqrt(std::max(v, 0.0));
      }
      if (ok) fit.std_errors = std::move(se);
    }
  }
  return fit;
}

double pseudo_loglik(const LaplaceSample& sample, const FitConfig& config, FitModel model,
                     const std::vector<double>& natural) {
  const std::size_t expected = model == FitModel::Penultimate ? 6 : 4;
  if (natural.size() != expected) throw DomainError("pseudo_loglik: wrong parameter count");
  return -full_nll_natural(select(sample, config), model, natural);
}

ModelComparison model_compare(const FitResult& fit_u, const FitResult& fit_p) {
  if (fit_u.n_exceed != fit_p.n_exceed) {
    throw DomainError("model_compare: fits use different exceedance sets");
  }
  const double k_u = static_cast<double>(fit_u.natural_parameters().size());
  const double k_p = static_cast<double>(fit_p.natural_parameters().size());
  ModelComparison c;
  c.delta_loglik = fit_p.loglik - fit_u.loglik;
  c.aic_ultimate = 2.0 * k_u - 2.0 * fit_u.loglik;
  c.aic_penultimate = 2.0 * k_p - 2.0 * fit_p.loglik;
  c.preferred = c.aic_penultimate < c.aic_ultimate ? fit_p.model : fit_u.model;
  return c;
}

std::vector<double> residual_extract(const LaplaceSample& sample, const FitResult& fit,
                                     const FitConfig& config) {
  FitConfig cfg = config;
  cfg.model = fit.model;
  const Exceedances e = select(sample, cfg);
  const Norming n = norming_of(fit);
  std::vector<double> z(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    z[i] = (e.y[i] - location(e, n, i)) * std::exp(-log_scale(e, n, i));
  }
  return z;
}

std::string to_json(const FitResult& fit, const std::string& run_header) {
  nlohmann::ordered_json j;
  if (!run_header.empty()) j["run"] = run_header;
  j["model"] = to_string(fit.model);
  j["alpha"] = fit.alpha;
  j["beta"] = fit.beta;
  j["mu"] = fit.mu;
  j["sigma"] = fit.sigma;
  j["delta_a"] = fit.delta_a ? nlohmann::ordered_json(*fit.delta_a) : nlohmann::ordered_json();
  j["delta_b"] = fit.delta_b ? nlohmann::ordered_json(*fit.delta_b) : nlohmann::ordered_json();
  j["loglik"] = fit.loglik;
  j["threshold"] = fit.threshold;
  j["n_exceed"] = fit.n_exceed;
  j["converged"] = fit.converged;
  j["stderr"] = fit.std_errors ? nlohmann::ordered_json(*fit.std_errors) : nlohmann::ordered_json();
  j["evaluations"] = fit.evaluations;
  j["scale_degenerate"] = fit.scale_degenerate;
  return j.dump(2);
}

}  // namespace condex
