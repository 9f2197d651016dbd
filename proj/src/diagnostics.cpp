#include "condex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "condex/errors.hpp"
#include "condex/ks.hpp"
#include "condex/margins.hpp"
#include "condex/rng.hpp"

namespace condex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailProbability = 1e-6;
constexpr std::uint64_t kReferenceStream = 0xfeedULL << 32;

// A CDF with its quantile function and the points where it may jump.
struct LawView {
  CdfFunction cdf;
  std::function<double(double)> quantile;
  std::vector<double> breakpoints;
};

LawView view_of(const ResidualLaw& law) {
  LawView v;
  v.cdf = law.as_function();
  v.quantile = [law](double p) { return law.quantile(p); };
  const Support s = law.support();
  if (std::isfinite(s.lo)) v.breakpoints.push_back(s.lo);
  if (std::isfinite(s.hi)) v.breakpoints.push_back(s.hi);
  return v;
}

LawView exact_view(const CopulaSpec& copula, const NormingPair& norming, double x) {
  const double a = norming.a(x);
  const double b = norming.b(x);
  LawView v;
  v.cdf = exact_residual_cdf(copula, norming, x);
  v.quantile = [copula, x, a, b](double p) { return (cond_quantile(copula, x, p) - a) / b; };
  return v;
}

ResidualLaw limit_law(const CopulaSpec& copula) {
  switch (copula.family) {
    case Family::Gaussian:
      return ResidualLaw::gaussian_H(copula.param);
    case Family::InvertedLogistic:
      return ResidualLaw::invlog_H(copula.param);
    case Family::Logistic:
      break;
  }
  throw DomainError("limit_law: the logistic limit is represented by a reference level");
}

ResidualLaw finite_level_law(const CopulaSpec& copula, double x) {
  switch (copula.family) {
    case Family::Gaussian:
      return ResidualLaw::gaussian_Hx1(copula.param, x);
    case Family::InvertedLogistic:
      return ResidualLaw::invlog_Hx(copula.param, x);
    case Family::Logistic:
      break;
  }
  throw DomainError("finite_level_law: the logistic H_x coincides with H");
}

NormingPair norming_for(const CopulaSpec& copula, Metric metric) {
  return metric == Metric::UltimateDist ? NormingPair::ultimate(copula)
                                        : NormingPair::penultimate(copula);
}

void check_grid(const std::vector<double>& x_grid) {
  if (x_grid.empty()) throw DomainError("convergence_table: empty x grid");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 1.0) || !std::isfinite(x_grid[i])) {
      throw DomainError("convergence_table: grid values must exceed 1");
    }
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
      throw DomainError("convergence_table: grid must be increasing");
    }
  }
}

}  // namespace

const char* to_string(Metric metric) {
  switch (metric) {
    case Metric::UltimateDist:
      return "UltimateDist";
    case Metric::PenultimateDist:
      return "PenultimateDist";
    case Metric::RemainderSup:
      return "RemainderSup";
  }
  return "unknown";
}

std::vector<double> normalized_residuals(const std::vector<double>& y, double x,
                                         const NormingPair& norming) {
  if (y.empty()) throw InsufficientDataError("normalized_residuals: empty window", 0);
  const double a = norming.a(x);
  const double b = norming.b(x);
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - a) / b;
  return z;
}

std::vector<double> normalized_residuals(const LaplaceSample& sample, const NormingPair& norming,
                                         double x_lo, double x_hi) {
  std::vector<double> z;
  for (const auto& p : sample.pairs) {
    if (p.x >= x_lo && p.x < x_hi) z.push_back((p.y - norming.a(p.x)) / norming.b(p.x));
  }
  if (z.empty()) throw InsufficientDataError("normalized_residuals: empty window", 0);
  return z;
}

std::vector<double> exact_normalized_residuals(const CopulaSpec& copula,
                                               const NormingPair& norming, double x,
                                               std::size_t n, std::uint64_t seed,
                                               unsigned workers) {
  return normalized_residuals(sample_conditional(copula, x, n, seed, workers), x, norming);
}

CdfFunction exact_residual_cdf(const CopulaSpec& copula, const NormingPair& norming, double x) {
  const double a = norming.a(x);
  const double b = norming.b(x);
  return [copula, x, a, b](double z) { return cond_cdf(copula, x, a + b * z); };
}

double windowed_ks(std::vector<double> sample, const CdfFunction& cdf, double lo, double hi) {
  if (sample.empty()) throw InsufficientDataError("windowed_ks: empty sample", 0);
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (double edge : {lo, hi}) {
    if (std::isfinite(edge)) {
      const auto below = std::upper_bound(sample.begin(), sample.end(), edge) - sample.begin();
      d = std::max(d, std::abs(static_cast<double>(below) / n - cdf(edge)));
    }
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double z = sample[i];
    if (z < lo || z > hi) continue;
    const double f = cdf(z);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double windowed_two_sample_ks(std::vector<double> a, std::vector<double> b, double lo,
                              double hi) {
  if (a.empty() || b.empty()) throw InsufficientDataError("windowed_two_sample_ks: empty", 0);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  auto gap_at = [&](double z) {
    const auto ia = std::upper_bound(a.begin(), a.end(), z) - a.begin();
    const auto ib = std::upper_bound(b.begin(), b.end(), z) - b.begin();
    return std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb);
  };
  double d = 0.0;
  if (std::isfinite(lo)) d = gap_at(lo);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    const double z = j == b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
    while (i < a.size() && a[i] <= z) ++i;
    while (j < b.size() && b[j] <= z) ++j;
    if (z < lo || z > hi) continue;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<ConvergenceRow> convergence_table(const CopulaSpec& copula,
                                              const std::vector<double>& x_grid,
                                              const ConvergenceConfig& config) {
  copula.validate();
  check_grid(x_grid);
  if (config.metrics.empty()) throw DomainError("convergence_table: no metrics requested");
  if (config.window) {
    const auto [p_lo, p_hi] = *config.window;
    if (!(p_lo > 0.0 && p_lo < p_hi && p_hi < 1.0)) {
      throw DomainError("convergence_table: window must satisfy 0 < p_lo < p_hi < 1");
    }
  }
  const bool analytic = config.mode == DistanceMode::Analytic;
  if (!analytic && config.n_mc == 0) throw DomainError("convergence_table: n_mc must be positive");
  const bool logistic = copula.family == Family::Logistic;

  // Limit law H, and for the logistic the Monte Carlo reference sample.
  std::vector<double> reference_draws;
  LawView limit;
  if (logistic) {
    const double x_ref = config.logistic_reference_x;
    const NormingPair ult = NormingPair::ultimate(copula);
    if (analytic) {
      limit = exact_view(copula, ult, x_ref);
    } else {
      reference_draws = exact_normalized_residuals(copula, ult, x_ref, config.n_mc,
                                                   derive_seed(config.seed, kReferenceStream),
                                                   config.workers);
      limit = view_of(ResidualLaw::empirical(reference_draws));
    }
  } else {
    limit = view_of(limit_law(copula));
  }

  double window_lo = -kInf;
  double window_hi = kInf;
  if (config.window) {
    window_lo = limit.quantile(config.window->first);
    window_hi = limit.quantile(config.window->second);
  }

  const std::size_t n_metrics = config.metrics.size();
  std::vector<ConvergenceRow> rows(x_grid.size() * n_metrics);

  auto fill_row = [&](std::size_t xi, std::size_t mi, double value) {
    const double x = x_grid[xi];
    ConvergenceRow& row = rows[xi * n_metrics + mi];
    row.copula = copula;
    row.metric = config.metrics[mi];
    row.norming = row.metric == Metric::UltimateDist ? NormingOrder::Ultimate
                                                     : NormingOrder::Penultimate;
    row.x = x;
    row.quantile = margins::laplace_cdf(x);
    row.n = 1.0 / margins::laplace_sf(x);
    row.return_period_years = margins::return_period_years(x);
    row.value = value;
    row.n_mc = analytic ? 0 : config.n_mc;
    row.half_width = 0.0;
    if (!analytic) {
      row.half_width = logistic ? ks::two_sample_critical_value(config.n_mc, config.n_mc)
                                : ks::critical_value(config.n_mc);
    }
  };

  auto target_law = [&](Metric metric, double x) {
    if (metric != Metric::RemainderSup || logistic) return limit;
    return view_of(finite_level_law(copula, x));
  };

  if (analytic) {
    parallel_for(rows.size(), config.workers, [&](std::size_t cell) {
      const std::size_t xi = cell / n_metrics;
      const std::size_t mi = cell % n_metrics;
      const double x = x_grid[xi];
      const Metric metric = config.metrics[mi];
      const LawView exact = exact_view(copula, norming_for(copula, metric), x);
      const LawView law = target_law(metric, x);
      double lo = window_lo;
      double hi = window_hi;
      if (!config.window) {
        lo = std::min(exact.quantile(kTailProbability), law.quantile(kTailProbability));
        hi = std::max(exact.quantile(1.0 - kTailProbability),
                      law.quantile(1.0 - kTailProbability));
      }
      fill_row(xi, mi, sup_distance_adaptive(exact.cdf, law.cdf, lo, hi, law.breakpoints));
    });
    return rows;
  }

  for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
    const double x = x_grid[xi];
    const std::vector<double> y =
        sample_conditional(copula, x, config.n_mc, derive_seed(config.seed, xi), config.workers);
    for (std::size_t mi = 0; mi < n_metrics; ++mi) {
      const Metric metric = config.metrics[mi];
      std::vector<double> z = normalized_residuals(y, x, norming_for(copula, metric));
      const double value =
          logistic ? windowed_two_sample_ks(std::move(z), reference_draws, window_lo, window_hi)
                   : windowed_ks(std::move(z), target_law(metric, x).cdf, window_lo, window_hi);
      fill_row(xi, mi, value);
    }
  }
  return rows;
}

RateFit rate_summary(const std::vector<ConvergenceRow>& rows, RateModel model) {
  if (rows.size() < 4) throw FitError("rate_summary: need at least 4 rows");
  double n_min = kInf;
  double n_max = 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : rows) {
    if (!(row.value > 0.0) || !(row.n > std::exp(1.0))) {
      throw FitError("rate_summary: values must be positive and n above e");
    }
    n_min = std::min(n_min, row.n);
    n_max = std::max(n_max, row.n);
    const double log_n = std::log(row.n);
    xs.push_back(model == RateModel::LogNPower ? std::log(log_n)
                                               : std::log(std::log(log_n) / std::sqrt(log_n)));
    ys.push_back(std::log(row.value));
  }
  if (n_max < 100.0 * n_min) throw FitError("rate_summary: n must span at least two decades");

  const auto k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / k;
    my += ys[i] / k;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("rate_summary: degenerate regressor spread");
  const double slope = sxy / sxx;
  const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2, xs.size()};
}

std::vector<Fig1Row> fig1_data(double rho, const std::vector<double>& quantiles,
                               double n_per_year) {
  std::vector<Fig1Row> rows;
  rows.reserve(quantiles.size());
  for (double q : quantiles) {
    if (!(q >= 0.9 && q < 1.0)) throw DomainError("fig1: quantiles must lie in [0.9, 1)");
    const double u = margins::laplace_quantile(q);
    rows.push_back({u, q, margins::return_period_years(u, n_per_year),
                    rho < 0.0 ? -rho * rho : rho * rho, alpha1(rho, u), 0.5, beta1(u)});
  }
  return rows;
}

std::vector<Fig2Row> fig2_data(const std::vector<double>& gammas,
                               const std::vector<double>& quantiles,
                               const std::vector<double>& z_grid) {
  if (z_grid.empty()) throw DomainError("fig2: empty z grid");
  std::vector<Fig2Row> rows;
  rows.reserve(gammas.size() * quantiles.size() * z_grid.size());
  for (double gamma : gammas) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("fig2: gamma must lie in (0, 1)");
    const ResidualLaw h = ResidualLaw::invlog_H(gamma);
    for (double q : quantiles) {
      const double x = margins::laplace_quantile(q);
      const ResidualLaw hx = ResidualLaw::invlog_Hx(gamma, x);
      for (double z : z_grid) rows.push_back({gamma, x, z, h.cdf(z), hx.cdf(z)});
    }
  }
  return rows;
}

std::vector<Fig2Sup> fig2_sup(const std::vector<Fig2Row>& rows) {
  std::vector<Fig2Sup> out;
  for (const auto& row : rows) {
    if (out.empty() || out.back().gamma != row.gamma || out.back().x != row.x) {
      out.push_back({row.gamma, row.x, 0.0});
    }
    out.back().sup = std::max(out.back().sup, std::abs(row.Hx - row.H));
  }
  return out;
}

}  // namespace condex
