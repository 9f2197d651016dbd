#include <cmath>
#include <vector>

#include "condex/copulas.hpp"
#include "condex/diagnostics.hpp"
#include "condex/errors.hpp"
#include "condex/ks.hpp"
#include "condex/margins.hpp"
#include "condex/normings.hpp"
#include "condex/residual_laws.hpp"
#include "doctest.h"

using namespace condex;

TEST_SUITE("residual_laws") {
  TEST_CASE("gaussian limit and first-order laws") {
    CHECK(gaussian_H(0.5, 0.0) == 0.5);
    // Variance 2 rho^2 (1 - rho^2) = 0.375.
    CHECK(gaussian_H(0.5, std::sqrt(0.375)) == doctest::Approx(margins::normal_cdf(1.0)));
    const double x = 3.91202;
    const double inflation = std::pow(1.0 + std::log(x) / (2.0 * std::sqrt(0.5 * x)), 2.0);
    CHECK(inflation == doctest::Approx(2.21325).epsilon(1e-4));
    const double var = 0.375 * inflation;
    CHECK(var == doctest::Approx(0.82997).epsilon(1e-4));
    CHECK(var > 0.375);
    CHECK(gaussian_Hx1(0.5, x, std::sqrt(var)) == doctest::Approx(margins::normal_cdf(1.0)));
    CHECK_THROWS_AS(gaussian_Hx2(-0.5, x, 0.0), DomainError);
    CHECK_THROWS_AS(gaussian_Hx1(0.5, 1.0, 0.0), DomainError);
  }

  TEST_CASE("gaussian second-order law") {
    const double rho = 0.5;
    const double x = 10.0;
    const double s = std::sqrt(2.0 * rho * rho * x);
    const double mean = -std::log(rho) / s;
    const double sd = std::sqrt(0.375) * (1.0 + (std::log(x) + 2.0 * std::log(rho)) / (2.0 * s));
    CHECK(gaussian_Hx2(rho, x, mean) == doctest::Approx(0.5));
    CHECK(gaussian_Hx2(rho, x, mean + sd) == doctest::Approx(margins::normal_cdf(1.0)));
  }

  TEST_CASE("inverted logistic limit") {
    CHECK(invlog_H(0.5, 1.0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
    CHECK(invlog_H(0.5, 0.0) == 0.0);
    CHECK(invlog_H(0.5, -1.0) == 0.0);
    CHECK(invlog_H(1.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  }

  TEST_CASE("inverted logistic finite-level law, gamma below 2/3") {
    const double gamma = 1.0 / 3.0;
    const double x = 3.91202;
    const double l2 = std::log(2.0);
    const double exponent = gamma + (1.0 - gamma) * (1.0 - l2) / x - gamma * (1.0 - gamma) / (2.0 * x);
    CHECK(exponent == doctest::Approx(0.357228).epsilon(1e-5));
    CHECK(invlog_Hx(gamma, x, 1.0) == doctest::Approx(1.0 - std::exp(-exponent)).epsilon(1e-13));
    CHECK(std::abs(invlog_Hx(gamma, x, 1.0) - 0.30039) < 1e-5);
    CHECK(invlog_Hx(gamma, x, 0.0) == 0.0);

    const auto s = invlog_support(gamma, x);
    CHECK(s.lo == 0.0);
    CHECK(s.hi == doctest::Approx(std::cbrt(x / (1.0 - gamma) + (1.0 - l2) / gamma)).epsilon(1e-14));
    const auto law = ResidualLaw::invlog_Hx(gamma, x);
    const auto beyond = law.evaluate(s.hi + 0.5);
    CHECK(beyond.clamped);
    CHECK(beyond.p == doctest::Approx(law.cdf(s.hi)));
    CHECK(beyond.p < 1.0);
    CHECK_FALSE(law.evaluate(1.0).clamped);
  }

  TEST_CASE("density changes sign at the upper endpoint") {
    for (double gamma : {0.2, 1.0 / 3.0, 0.5, 0.6}) {
      for (double x : {3.0, 10.0, 40.0}) {
        const double hi = invlog_support(gamma, x).hi;
        const double h = 1e-6 * hi;
        auto e = [&](double z) { return invlog_Hx_exponent(gamma, x, z); };
        CHECK(e(hi - h) < e(hi));
        CHECK(e(hi + h) < e(hi));
        // Nonnegative density across the support.
        double prev = -1.0;
        for (int i = 0; i <= 1000; ++i) {
          const double v = e(hi * i / 1000.0);
          CHECK(v >= prev - 1e-12);
          prev = v;
        }
      }
    }
  }

  TEST_CASE("support at gamma = 2/3 and above") {
    const auto s = invlog_support(2.0 / 3.0, 10.0);
    CHECK(s.hi == doctest::Approx(std::cbrt(9.0) * std::pow(10.0, 2.0 / 3.0)).epsilon(1e-12));
    const double l2 = std::log(2.0);
    CHECK(s.lo == doctest::Approx(std::cbrt(12.0 - 13.0 * l2) * std::pow(l2 / 4.0, 2.0 / 3.0) *
                                  std::pow(10.0, -1.0 / 3.0)));

    const double g = 0.75;
    const auto big = invlog_support(g, 10.0);
    CHECK(std::isinf(big.hi));
    const double lo = std::pow(l2, 2.0 / 3.0) / g *
                      std::cbrt((1.0 - g) / 6.0 * (6.0 * g + (1.0 - 8.0 * g) * l2)) *
                      std::pow(10.0, g - 1.0);
    CHECK(big.lo == doctest::Approx(lo).epsilon(1e-12));
    CHECK(invlog_endpoint_mass(g, 10.0) == 0.0);
  }

  TEST_CASE("refined endpoints are roots of the exponent and its slope") {
    const double x = 10.0;
    const auto r = invlog_support(1.0 / 3.0, x, EndpointMode::Refined);
    CHECK(r.hi == doctest::Approx(invlog_support(1.0 / 3.0, x).hi).epsilon(1e-10));
    const auto big = invlog_support(0.75, x, EndpointMode::Refined);
    CHECK(std::abs(invlog_Hx_exponent(0.75, x, big.lo)) < 1e-12);
    CHECK(big.lo == doctest::Approx(invlog_support(0.75, x).lo).epsilon(0.05));
  }

  TEST_CASE("endpoint mass follows its asymptotic rate") {
    const double gamma = 1.0 / 3.0;
    for (double x : {10.0, 20.0, 40.0}) {
      const double ratio =
          std::log(invlog_endpoint_mass_exact(gamma, x)) / (-gamma * x / (2.0 - 2.0 * gamma));
      CHECK(ratio >= 0.85);
      CHECK(ratio <= 1.15);
    }
    CHECK(invlog_endpoint_mass(gamma, 10.0) == doctest::Approx(std::exp(-10.0 / 4.0)));
    CHECK(invlog_endpoint_mass(2.0 / 3.0, 10.0) == doctest::Approx(std::exp(-10.0)));
  }

  TEST_CASE("finite-level laws tend to the limit") {
    for (double gamma : {1.0 / 3.0, 2.0 / 3.0, 0.75}) {
      for (double z : {0.5, 1.0, 1.5}) {
        CHECK(invlog_Hx(gamma, 1e7, z) == doctest::Approx(invlog_H(gamma, z)).epsilon(1e-4));
      }
    }
    CHECK(gaussian_Hx1(0.5, 1e12, 0.3) == doctest::Approx(gaussian_H(0.5, 0.3)).epsilon(1e-4));
  }

  TEST_CASE("all laws are nondecreasing") {
    const std::vector<ResidualLaw> laws = {
        ResidualLaw::gaussian_H(0.5),          ResidualLaw::gaussian_Hx1(0.3, 4.0),
        ResidualLaw::gaussian_Hx2(0.8, 6.0),   ResidualLaw::invlog_H(0.4),
        ResidualLaw::invlog_Hx(0.25, 5.0),     ResidualLaw::invlog_Hx(2.0 / 3.0, 5.0),
        ResidualLaw::invlog_Hx(0.8, 5.0),      ResidualLaw::empirical({0.3, -1.0, 2.0})};
    for (const auto& law : laws) {
      double prev = 0.0;
      for (int i = 0; i <= 10000; ++i) {
        const double p = law.cdf(-10.0 + 20.0 * i / 10000.0);
        REQUIRE(p >= prev);
        REQUIRE(p <= 1.0);
        prev = p;
      }
    }
  }

  TEST_CASE("quantiles") {
    const auto h = ResidualLaw::gaussian_H(0.5);
    CHECK(h.quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(h.cdf(h.quantile(0.9)) == doctest::Approx(0.9).epsilon(1e-9));
    const auto hx = ResidualLaw::invlog_Hx(1.0 / 3.0, 3.91202);
    CHECK(hx.quantile(0.999) == doctest::Approx(hx.support().hi));
    const auto e = ResidualLaw::empirical({3.0, 1.0, 2.0, 4.0});
    CHECK(e.cdf(2.0) == 0.5);
    CHECK(e.quantile(0.5) == 2.0);
  }

  TEST_CASE("sup distances") {
    const auto h = ResidualLaw::gaussian_H(0.5);
    CHECK(sup_distance(h, h) == 0.0);
    const double x = margins::laplace_quantile(0.99);
    const auto hx = ResidualLaw::gaussian_Hx1(0.5, x);
    std::vector<double> dense;
    for (int i = 0; i < 1000000; ++i) dense.push_back(-6.0 + 12.0 * i / 999999.0);
    const double brute = sup_distance(hx, h, dense);
    CHECK(sup_distance(hx, h) == doctest::Approx(brute).epsilon(1e-4));
    CHECK_THROWS_AS(sup_distance(hx, h, std::vector<double>{}), DomainError);
  }

  TEST_CASE("second-order gaussian law tends to the limit") {
    for (double z : {-0.8, 0.1, 0.9}) {
      CHECK(gaussian_Hx2(0.5, 1e12, z) == doctest::Approx(gaussian_H(0.5, z)).epsilon(1e-4));
    }
  }

  // For gamma > 2/3 the x^{3 gamma - 3} correction moves H_x away from the
  // exact law, so the comparison is made below 2/3 only.
  TEST_CASE("inverted logistic draws normalised at second order are closer to H_x in the bulk") {
    const double x = margins::laplace_quantile(0.9999);
    for (double gamma : {1.0 / 3.0, 0.5}) {
      const auto spec = CopulaSpec::inverted_logistic(gamma);
      const auto z = exact_normalized_residuals(spec, penultimate_norming(spec), x, 100000, 21);
      const auto h = ResidualLaw::invlog_H(gamma);
      const double lo = h.quantile(0.25);
      const double hi = h.quantile(0.75);
      const double d = windowed_ks(z, ResidualLaw::invlog_Hx(gamma, x).as_function(), lo, hi);
      const double d_limit = windowed_ks(z, h.as_function(), lo, hi);
      CHECK(d < d_limit);
    }
  }

  // Known to fail: at the 0.99 level the neglected higher-order terms exceed
  // the 1% KS band at n = 1e5. Reported by doctest as an expected failure.
  TEST_CASE("normalised exact draws lie in the 1% KS band of H_x" * doctest::should_fail()) {
    const double x = margins::laplace_quantile(0.99);
    const double crit = ks::critical_value(100000);
    for (double rho : {0.3, 0.5, 0.8}) {
      const auto spec = CopulaSpec::gaussian(rho);
      const auto z = exact_normalized_residuals(spec, penultimate_norming(spec), x, 100000, 31);
      const double d = ks::statistic(z, ResidualLaw::gaussian_Hx1(rho, x).as_function());
      CHECK_MESSAGE(d < crit, "gaussian rho=" << rho << " KS=" << d);
    }
    for (double gamma : {1.0 / 3.0, 2.0 / 3.0, 0.75}) {
      const auto spec = CopulaSpec::inverted_logistic(gamma);
      const auto z = exact_normalized_residuals(spec, penultimate_norming(spec), x, 100000, 37);
      const double d = ks::statistic(z, ResidualLaw::invlog_Hx(gamma, x).as_function());
      CHECK_MESSAGE(d < crit, "invlogistic gamma=" << gamma << " KS=" << d);
    }
  }
}
