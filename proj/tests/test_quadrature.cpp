#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"

#include "bridgekit/quadrature.hpp"

using namespace bridgekit;

TEST_CASE("five-point Gauss-Legendre nodes and weights") {
  const auto r = gauss_legendre(5);
  const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  REQUIRE(r.nodes.size() == 5);
  CHECK(r.nodes[0] == doctest::Approx(-b).epsilon(1e-14));
  CHECK(r.nodes[1] == doctest::Approx(-a).epsilon(1e-14));
  CHECK(std::abs(r.nodes[2]) <= 1e-15);
  CHECK(r.weights[0] == doctest::Approx(wb).epsilon(1e-14));
  CHECK(r.weights[1] == doctest::Approx(wa).epsilon(1e-14));
  CHECK(r.weights[2] == doctest::Approx(128.0 / 225.0).epsilon(1e-14));
}

TEST_CASE("n-point rules integrate polynomials of degree 2n - 1 exactly") {
  for (int n : {2, 8, 16, 20}) {
    const auto r = gauss_legendre(n);
    for (int d = 0; d < 2 * n; ++d) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        sum += r.weights[i] * std::pow(r.nodes[i], d);
      }
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(sum - exact) <= 1e-13);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("adaptive integration") {
  const auto root = [](double x) { return std::sqrt(x); };
  CHECK(integrate_adaptive(root, 0.0, 1.0, 10) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(integrate_adaptive(root, 1.0, 0.0, 10) == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(integrate_adaptive(root, 0.3, 0.3, 10) == 0.0);
  const auto osc = [](double x) { return std::cos(40.0 * x); };
  CHECK(integrate_adaptive(osc, 0.0, std::numbers::pi / 3.0, 16, 1e-13) ==
        doctest::Approx(std::sin(40.0 * std::numbers::pi / 3.0) / 40.0).epsilon(1e-11));
}

TEST_CASE("non-convergence is reported") {
  const auto spike = [](double x) { return 1.0 / x; };
  CHECK_THROWS_AS(integrate_adaptive(spike, 0.0, 1.0, 4, 1e-12, 8), std::runtime_error);
}
