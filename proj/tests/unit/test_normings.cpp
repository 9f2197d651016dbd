#include <cmath>
#include <vector>

#include "condex/copulas.hpp"
#include "condex/errors.hpp"
#include "condex/normings.hpp"
#include "doctest.h"

using namespace condex;

TEST_SUITE("normings") {
  TEST_CASE("ultimate normings") {
    const auto g = ultimate_norming(CopulaSpec::gaussian(-0.5));
    CHECK(g.a(9.0) == doctest::Approx(-0.25 * 9.0));
    CHECK(g.b(9.0) == doctest::Approx(3.0));
    const auto il = ultimate_norming(CopulaSpec::inverted_logistic(0.25));
    CHECK(il.a(16.0) == 0.0);
    CHECK(il.b(16.0) == doctest::Approx(8.0));
    for (double gamma : {0.2, 0.9}) {
      const auto lg = ultimate_norming(CopulaSpec::logistic(gamma));
      CHECK(lg.a(7.5) == 7.5);
      CHECK(lg.b(7.5) == 1.0);
    }
  }

  TEST_CASE("penultimate normings") {
    const double rho = 0.5;
    const auto pen = penultimate_norming(CopulaSpec::gaussian(rho));
    const auto ult = ultimate_norming(CopulaSpec::gaussian(rho));
    for (double x = 1.5; x < 200.0; x *= 1.7) {
      CHECK(pen.a(x) == doctest::Approx(0.25 * x + 0.375 * std::log(x)));
      CHECK(pen.b(x) == doctest::Approx(std::pow(x, 0.5 - 0.25 / x)));
      CHECK(pen.a(x) >= ult.a(x));
      CHECK(pen.b(x) <= ult.b(x));
    }
    const auto il = penultimate_norming(CopulaSpec::inverted_logistic(1.0 / 3.0));
    CHECK(il.a(5.0) == doctest::Approx(-std::log(2.0)));
    CHECK(il.b(5.0) == doctest::Approx(std::pow(5.0, 2.0 / 3.0)));
  }

  TEST_CASE("penultimate normings converge to the ultimate parameters") {
    for (const auto& spec : {CopulaSpec::gaussian(0.5), CopulaSpec::gaussian(-0.7),
                             CopulaSpec::inverted_logistic(0.4), CopulaSpec::logistic(0.5)}) {
      const auto ult = ultimate_norming(spec);
      const auto pen = penultimate_norming(spec);
      const double alpha = ult.a(10.0) / 10.0;
      const double beta = std::log(ult.b(10.0)) / std::log(10.0);
      double prev = INFINITY;
      for (double u : {2.0, 10.0, 100.0, 1e3, 1e4}) {
        double worst = 0.0;
        for (double x = u; x <= 1e6; x *= 1.2) {
          worst = std::max(worst, std::abs(pen.a(x) / x - alpha));
          worst = std::max(worst, std::abs(std::log(pen.b(x)) / std::log(x) - beta));
        }
        CHECK(worst <= prev);
        prev = worst;
      }
    }
  }

  TEST_CASE("gaussian rho = 0") {
    const auto n = penultimate_norming(CopulaSpec::gaussian(0.0));
    CHECK(n.b(4.0) == 1.0);
    CHECK(n.a(4.0) == doctest::Approx(0.5 * std::log(4.0)));
    CHECK_THROWS_AS(alpha1(0.0, 3.0), DomainError);
  }

  TEST_CASE("second-order parameters") {
    const double u = 3.91202;
    CHECK(alpha1(0.5, u) == doctest::Approx(0.25 + 0.75 * std::log(u) / (2.0 * u)).epsilon(1e-14));
    CHECK(std::abs(alpha1(0.5, u) - 0.38076) <= 1e-5);
    CHECK(std::abs(beta1(u) - 0.43610) <= 1e-5);
    const double u975 = -std::log(0.05);
    CHECK(alpha1(0.5, u975) == doctest::Approx(0.25 + 0.75 * std::log(u975) / (2.0 * u975)));
    CHECK(std::abs(alpha1(0.5, u975) - 0.38731) <= 1e-4);
    CHECK(alpha1(-0.5, u) == doctest::Approx(-0.25 + 0.75 * std::log(u) / (2.0 * u)));
    CHECK_THROWS_AS(beta1(1.0), DomainError);
  }

  TEST_CASE("parametric family nests the ultimate family") {
    NormingParams p;
    p.alpha = 0.25;
    p.beta = 0.5;
    p.u = 2.0;
    const auto par = parametric_norming(p);
    const auto ult = ultimate_norming(CopulaSpec::gaussian(0.5));
    for (double x = 2.0; x < 1e4; x *= 1.9) {
      CHECK(par.a(x) == doctest::Approx(ult.a(x)).epsilon(1e-15));
      CHECK(par.b(x) == doctest::Approx(ult.b(x)).epsilon(1e-15));
    }
  }

  TEST_CASE("parametric family contains the inverted logistic penultimate location") {
    NormingParams p;
    p.alpha = 0.0;
    p.beta = 2.0 / 3.0;
    p.delta_a = -std::log(2.0);
    p.gamma_a = 1.0;
    p.u = 1.5;
    const auto par = parametric_norming(p);
    const auto pen = penultimate_norming(CopulaSpec::inverted_logistic(1.0 / 3.0));
    for (double x : {1.5, 4.0, 40.0}) {
      CHECK(par.a(x) == doctest::Approx(pen.a(x)));
      CHECK(par.b(x) == doctest::Approx(pen.b(x)));
    }
  }

  TEST_CASE("domain checks") {
    const auto n = ultimate_norming(CopulaSpec::gaussian(0.5));
    CHECK_THROWS_AS(n.a(1.0), DomainError);
    CHECK_THROWS_AS(n.b(0.5), DomainError);
    NormingParams p;
    p.u = 3.0;
    CHECK_THROWS_AS(parametric_norming(p).a(2.0), DomainError);
    p.beta = 1.0;
    CHECK_THROWS_AS(parametric_norming(p), DomainError);
    p.beta = 0.5;
    p.alpha = 1.5;
    CHECK_THROWS_AS(parametric_norming(p), DomainError);
  }
}
