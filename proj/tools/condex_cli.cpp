// condex command-line tool: simulation, evaluation of conditional laws and
// normings, fitting, and the figure/convergence study recipes.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "condex/copulas.hpp"
#include "condex/csv_io.hpp"
#include "condex/diagnostics.hpp"
#include "condex/errors.hpp"
#include "condex/fitting.hpp"
#include "condex/grid.hpp"
#include "condex/margins.hpp"
#include "condex/normings.hpp"
#include "condex/residual_laws.hpp"
#include "condex/univariate.hpp"
#include "json.hpp"

namespace {

using condex::io::format_double;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
};

struct CopulaArgs {
  std::string family = "gaussian";
  std::optional<std::string> rho;
  std::optional<std::string> gamma;

  condex::CopulaSpec resolve() const {
    condex::CopulaSpec spec;
    try {
      spec.family = condex::parse_family(family);
    } catch (const condex::DomainError& e) {
      throw CLI::ValidationError("--family", e.what());
    }
    const auto& value = spec.family == condex::Family::Gaussian ? rho : gamma;
    if (!value) {
      throw CLI::ValidationError(spec.family == condex::Family::Gaussian
                                     ? "--rho is required for the gaussian family"
                                     : "--gamma is required for the logistic families");
    }
    try {
      spec.param = condex::grid::parse_number(*value);
      spec.validate();
    } catch (const condex::DomainError& e) {
      throw CLI::ValidationError(e.what());
    }
    return spec;
  }
};

void add_common(CLI::App* cmd, Common& c, bool random) {
  if (random) {
    cmd->add_option("--seed", c.seed, "Master random seed")->capture_default_str();
    cmd->add_option("--workers", c.workers,
                    "Worker threads (0: CONDEX_WORKERS or all cores); does not change output")
        ->capture_default_str();
  }
  cmd->add_option("--out", c.out, "Output file (default: standard output)");
}

void add_copula(CLI::App* cmd, CopulaArgs& c) {
  cmd->add_option("--family", c.family, "gaussian, invlogistic or logistic")
      ->capture_default_str();
  cmd->add_option("--rho", c.rho, "Gaussian correlation in (-1, 1)");
  cmd->add_option("--gamma", c.gamma, "Logistic dependence parameter in (0, 1]; fractions such as 1/3 allowed");
}

// Flags as given, minus --out and --workers, which do not affect content.
std::string flag_string(int argc, char** argv) {
  std::string flags;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" || arg == "--workers") {
      ++i;
      continue;
    }
    if (arg.rfind("--out=", 0) == 0 || arg.rfind("--workers=", 0) == 0) continue;
    if (!flags.empty()) flags += ' ';
    flags += arg;
  }
  return flags;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

template <class F>
std::vector<double> parse_grid(const std::string& flag, const std::string& text, F parser) {
  try {
    return parser(text);
  } catch (const condex::DomainError& e) {
    throw CLI::ValidationError(flag, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"condex: conditional extremes with penultimate normings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", condex::io::kVersion);

  // simulate
  Common sim_c;
  CopulaArgs sim_cop;
  std::size_t sim_n = 0;
  auto* sim = app.add_subcommand("simulate", "Draw (x, y) pairs with Laplace margins");
  add_copula(sim, sim_cop);
  sim->add_option("--n", sim_n, "Number of pairs")->required()->check(CLI::PositiveNumber);
  add_common(sim, sim_c, true);

  // cond-cdf
  Common cc_c;
  CopulaArgs cc_cop;
  std::string cc_x;
  std::string cc_y;
  auto* cc = app.add_subcommand("cond-cdf", "Exact Pr(Y <= y | X = x) on a grid");
  add_copula(cc, cc_cop);
  cc->add_option("--x", cc_x, "Conditioning values (list or a:b:K)")->required();
  cc->add_option("--y", cc_y, "Response values (list or a:b:K)")->required();
  add_common(cc, cc_c, false);

  // normings
  Common nm_c;
  CopulaArgs nm_cop;
  std::string nm_x = "2:20:10";
  auto* nm = app.add_subcommand("normings", "Ultimate and penultimate a(x), b(x)");
  add_copula(nm, nm_cop);
  nm->add_option("--x", nm_x, "Values of x > 1 (list or a:b:K[log])")->capture_default_str();
  add_common(nm, nm_c, false);

  // hx
  Common hx_c;
  CopulaArgs hx_cop;
  std::optional<double> hx_x;
  std::optional<double> hx_q;
  std::string hx_z = "0:6:61";
  int hx_order = 1;
  bool hx_refined = false;
  auto* hx = app.add_subcommand("hx", "Limit law H and finite-level law H_x on a z grid");
  add_copula(hx, hx_cop);
  hx->add_option("--x", hx_x, "Conditioning level on the Laplace scale");
  hx->add_option("--quantile", hx_q, "Conditioning level as a Laplace quantile");
  hx->add_option("--z", hx_z, "Residual grid (list or a:b:K)")->capture_default_str();
  hx->add_option("--order", hx_order, "Gaussian H_x order, 1 or 2")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  hx->add_flag("--refined", hx_refined, "Inverted logistic: numerical support endpoints");
  add_common(hx, hx_c, false);

  // fit
  Common fit_c;
  std::string fit_in;
  std::string fit_margins = "laplace";
  std::string fit_model = "ultimate";
  condex::FitConfig fit_cfg;
  auto* fit = app.add_subcommand("fit", "Pseudo-likelihood fit of the conditional model");
  fit->add_option("--in", fit_in, "Input CSV with columns x,y")->required();
  fit->add_option("--margins", fit_margins, "Input scale: laplace or uniform")
      ->check(CLI::IsMember({"laplace", "uniform"}))
      ->capture_default_str();
  fit->add_option("--model", fit_model, "ultimate, penultimate or both")
      ->check(CLI::IsMember({"ultimate", "penultimate", "both"}))
      ->capture_default_str();
  fit->add_option("--threshold", fit_cfg.threshold_quantile, "Threshold quantile of X")
      ->capture_default_str();
  fit->add_option("--gamma-a", fit_cfg.gamma_a, "Location correction exponent")
      ->capture_default_str();
  fit->add_option("--gamma-b", fit_cfg.gamma_b, "Scale correction exponent")
      ->capture_default_str();
  fit->add_option("--max-iter", fit_cfg.optimizer.max_iter, "Simplex iterations per start")
      ->capture_default_str();
  fit->add_option("--tol", fit_cfg.optimizer.tol, "Simplex size tolerance")->capture_default_str();
  fit->add_option("--restarts", fit_cfg.optimizer.restarts, "Number of optimizer starts")
      ->capture_default_str();
  add_common(fit, fit_c, true);

  // fig1
  Common f1_c;
  double f1_rho = 0.5;
  std::string f1_q = "0.975:0.99998:40log";
  double f1_npy = condex::margins::kDaysPerYear;
  auto* fig1 = app.add_subcommand("fig1", "Second-order Gaussian alpha and beta curves");
  fig1->add_option("--rho", f1_rho, "Gaussian correlation")->capture_default_str();
  fig1->add_option("--quantiles", f1_q, "Quantile grid in [0.9, 1)")->capture_default_str();
  fig1->add_option("--n-per-year", f1_npy, "Observations per year")->capture_default_str();
  add_common(fig1, f1_c, false);

  // fig2
  Common f2_c;
  std::string f2_g = "1/3,2/3,3/4";
  std::string f2_q = "0.8,0.9,0.95,0.99";
  std::string f2_z = "0:8:801";
  auto* fig2 = app.add_subcommand("fig2", "Inverted logistic H and H_x curves");
  fig2->add_option("--gammas", f2_g, "Values of gamma in (0, 1)")->capture_default_str();
  fig2->add_option("--quantiles", f2_q, "Conditioning quantiles")->capture_default_str();
  fig2->add_option("--z", f2_z, "Residual grid")->capture_default_str();
  add_common(fig2, f2_c, false);

  // converge
  Common cv_c;
  CopulaArgs cv_cop;
  std::string cv_q = "0.9:0.9999:5log";
  std::string cv_mode = "mc";
  std::size_t cv_nmc = 100000;
  std::string cv_window;
  double cv_ref = 50.0;
  std::string cv_rate;
  auto* cv = app.add_subcommand("converge", "Distances to H and H_x across conditioning levels");
  add_copula(cv, cv_cop);
  cv->add_option("--quantiles", cv_q, "Quantile grid of the conditioning level")
      ->capture_default_str();
  cv->add_option("--mode", cv_mode, "mc (KS of exact draws) or analytic (exact sup-distance)")
      ->check(CLI::IsMember({"mc", "analytic"}))
      ->capture_default_str();
  cv->add_option("--n-mc", cv_nmc, "Monte Carlo draws per level")->capture_default_str();
  cv->add_option("--window", cv_window, "Restrict z to H-quantiles p_lo,p_hi");
  cv->add_option("--reference-x", cv_ref, "Logistic: level standing in for the limit")
      ->capture_default_str();
  cv->add_option("--rate", cv_rate, "Append rate fits per metric: power or composite")
      ->check(CLI::IsMember({"power", "composite"}));
  add_common(cv, cv_c, true);

  // uni-penult
  Common up_c;
  std::string up_ns = "1e2,1e3,1e4,1e6,1e8";
  double up_x = 1.0;
  std::string up_model = "gaussian";
  auto* up = app.add_subcommand("uni-penult", "Penultimate GEV shape and errors for maxima");
  up->add_option("--ns", up_ns, "Block sizes n >= 2")->capture_default_str();
  up->add_option("--x", up_x, "Normalised level for the error columns")->capture_default_str();
  up->add_option("--model", up_model, "gaussian or exponential")
      ->check(CLI::IsMember({"gaussian", "exponential"}))
      ->capture_default_str();
  add_common(up, up_c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string flags = flag_string(argc, argv);
  std::ostringstream out;
  condex::io::CsvWriter csv(out);

  try {
    if (sim->parsed()) {
      const auto spec = sim_cop.resolve();
      const auto sample = condex::sample(spec, sim_n, sim_c.seed, sim_c.workers);
      out << condex::io::run_header("simulate", flags, sim_c.seed) << '\n';
      condex::io::write_pairs(out, sample);
      emit(sim_c.out, out.str());
      if (!sim_c.out.empty()) {
        emit(sim_c.out + ".meta.json", condex::io::sample_metadata_json(sample));
      }
    } else if (cc->parsed()) {
      const auto spec = cc_cop.resolve();
      const auto xs = parse_grid("--x", cc_x, condex::grid::parse_value_grid);
      const auto ys = parse_grid("--y", cc_y, condex::grid::parse_value_grid);
      csv.comment(condex::io::run_header("cond-cdf", flags, 0));
      csv.header({"x", "y", "cdf", "log_sf"});
      for (double x : xs) {
        for (double y : ys) {
          csv.row(std::vector<double>{x, y, condex::cond_cdf(spec, x, y),
                                      condex::cond_log_sf(spec, x, y)});
        }
      }
      emit(cc_c.out, out.str());
    } else if (nm->parsed()) {
      const auto spec = nm_cop.resolve();
      const auto xs = parse_grid("--x", nm_x, condex::grid::parse_value_grid);
      const auto ult = condex::ultimate_norming(spec);
      const auto pen = condex::penultimate_norming(spec);
      csv.comment(condex::io::run_header("normings", flags, 0));
      csv.header({"x", "a0", "b0", "a1", "b1"});
      for (double x : xs) csv.row(std::vector<double>{x, ult.a(x), ult.b(x), pen.a(x), pen.b(x)});
      emit(nm_c.out, out.str());
    } else if (hx->parsed()) {
      const auto spec = hx_cop.resolve();
      if (spec.family == condex::Family::Logistic) {
        throw CLI::ValidationError("--family", "hx has no closed form for the logistic family");
      }
      if (hx_x.has_value() == hx_q.has_value()) {
        throw CLI::ValidationError("exactly one of --x and --quantile is required");
      }
      const double x = hx_x ? *hx_x : condex::margins::laplace_quantile(*hx_q);
      const auto zs = parse_grid("--z", hx_z, condex::grid::parse_value_grid);
      std::optional<condex::ResidualLaw> h;
      std::optional<condex::ResidualLaw> hxl;
      if (spec.family == condex::Family::Gaussian) {
        h = condex::ResidualLaw::gaussian_H(spec.param);
        hxl = hx_order == 1 ? condex::ResidualLaw::gaussian_Hx1(spec.param, x)
                            : condex::ResidualLaw::gaussian_Hx2(spec.param, x);
      } else {
        h = condex::ResidualLaw::invlog_H(spec.param);
        hxl = condex::ResidualLaw::invlog_Hx(
            spec.param, x,
            hx_refined ? condex::EndpointMode::Refined : condex::EndpointMode::FirstOrder);
      }
      csv.comment(condex::io::run_header("hx", flags, 0));
      csv.header({"z", "H", "Hx"});
      for (double z : zs) csv.row(std::vector<double>{z, h->cdf(z), hxl->cdf(z)});
      emit(hx_c.out, out.str());
    } else if (fit->parsed()) {
      std::ifstream in(fit_in);
      if (!in) throw std::runtime_error("cannot open '" + fit_in + "'");
      const auto sample = condex::io::read_pairs(in, fit_margins == "uniform");
      fit_cfg.seed = fit_c.seed;
      const std::string header = condex::io::run_header("fit", flags, fit_c.seed);
      if (fit_model == "both") {
        fit_cfg.model = condex::FitModel::Ultimate;
        const auto fu = condex::ht_fit(sample, fit_cfg);
        fit_cfg.model = condex::FitModel::Penultimate;
        const auto fp = condex::ht_fit(sample, fit_cfg);
        const auto cmp = condex::model_compare(fu, fp);
        nlohmann::ordered_json j;
        j["run"] = header;
        j["ultimate"] = nlohmann::ordered_json::parse(condex::to_json(fu));
        j["penultimate"] = nlohmann::ordered_json::parse(condex::to_json(fp));
        j["comparison"] = {{"delta_loglik", cmp.delta_loglik},
                           {"aic_ultimate", cmp.aic_ultimate},
                           {"aic_penultimate", cmp.aic_penultimate},
                           {"preferred", condex::to_string(cmp.preferred)}};
        out << j.dump(2) << '\n';
      } else {
        fit_cfg.model = condex::parse_fit_model(fit_model);
        out << condex::to_json(condex::ht_fit(sample, fit_cfg), header) << '\n';
      }
      emit(fit_c.out, out.str());
    } else if (fig1->parsed()) {
      const auto qs = parse_grid("--quantiles", f1_q, condex::grid::parse_quantile_grid);
      csv.comment(condex::io::run_header("fig1", flags, 0));
      csv.header({"u", "quantile", "return_years", "alpha0", "alpha1", "beta0", "beta1"});
      for (const auto& r : condex::fig1_data(f1_rho, qs, f1_npy)) {
        csv.row(std::vector<double>{r.u, r.quantile, r.return_years, r.alpha0, r.alpha1, r.beta0,
                                    r.beta1});
      }
      emit(f1_c.out, out.str());
    } else if (fig2->parsed()) {
      const auto gs = parse_grid("--gammas", f2_g, condex::grid::parse_list);
      const auto qs = parse_grid("--quantiles", f2_q, condex::grid::parse_quantile_grid);
      const auto zs = parse_grid("--z", f2_z, condex::grid::parse_value_grid);
      csv.comment(condex::io::run_header("fig2", flags, 0));
      csv.header({"gamma", "x", "z", "H", "Hx"});
      for (const auto& r : condex::fig2_data(gs, qs, zs)) {
        csv.row(std::vector<double>{r.gamma, r.x, r.z, r.H, r.Hx});
      }
      emit(f2_c.out, out.str());
    } else if (cv->parsed()) {
      const auto spec = cv_cop.resolve();
      const auto qs = parse_grid("--quantiles", cv_q, condex::grid::parse_quantile_grid);
      condex::ConvergenceConfig cfg;
      cfg.mode = cv_mode == "analytic" ? condex::DistanceMode::Analytic
                                       : condex::DistanceMode::MonteCarlo;
      cfg.n_mc = cv_nmc;
      cfg.seed = cv_c.seed;
      cfg.workers = cv_c.workers;
      cfg.logistic_reference_x = cv_ref;
      if (!cv_window.empty()) {
        const auto w = parse_grid("--window", cv_window, condex::grid::parse_list);
        if (w.size() != 2) throw CLI::ValidationError("--window", "expected p_lo,p_hi");
        cfg.window = std::make_pair(w[0], w[1]);
      }
      std::vector<double> xs;
      for (double q : qs) xs.push_back(condex::margins::laplace_quantile(q));
      const auto rows = condex::convergence_table(spec, xs, cfg);
      csv.comment(condex::io::run_header("converge", flags, cv_c.seed));
      csv.header({"family", "param", "norming", "x", "quantile", "n", "metric", "value", "n_mc",
                  "half_width"});
      for (const auto& r : rows) {
        csv.row({condex::to_string(r.copula.family), format_double(r.copula.param),
                 condex::to_string(r.norming), format_double(r.x), format_double(r.quantile),
                 format_double(r.n), condex::to_string(r.metric), format_double(r.value),
                 std::to_string(r.n_mc), format_double(r.half_width)});
      }
      if (!cv_rate.empty()) {
        const auto model = cv_rate == "power" ? condex::RateModel::LogNPower
                                              : condex::RateModel::LogLogOverSqrtLog;
        for (auto metric : cfg.metrics) {
          std::vector<condex::ConvergenceRow> subset;
          for (const auto& r : rows) {
            if (r.metric == metric) subset.push_back(r);
          }
          const auto rf = condex::rate_summary(subset, model);
          csv.comment("rate " + std::string(condex::to_string(metric)) + " model=" + cv_rate +
                      " exponent=" + format_double(rf.exponent) +
                      " r_squared=" + format_double(rf.r_squared));
        }
      }
      emit(cv_c.out, out.str());
    } else if (up->parsed()) {
      const auto ns = parse_grid("--ns", up_ns, condex::grid::parse_value_grid);
      const auto model =
          up_model == "gaussian" ? condex::gaussian_model() : condex::exponential_model();
      csv.comment(condex::io::run_header("uni-penult", flags, 0));
      csv.header({"n", "xi_n", "err_ultimate", "err_penultimate"});
      for (double n : ns) {
        const auto e = condex::penultimate_gev_error(model, n, up_x);
        csv.row(std::vector<double>{n, e.xi_n, e.err_ultimate, e.err_penultimate});
      }
      emit(up_c.out, out.str());
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
