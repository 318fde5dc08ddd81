#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "bridgekit/expint.hpp"
#include "bridgekit/quadrature.hpp"

using namespace bridgekit;

namespace {

// mpmath.ei at 40 digits.
struct Reference {
  double x;
  double ei;
};
constexpr Reference kReference[] = {
    {-1e-3, -6.3315393641361493112},
    {-1.0, -0.21938393439552027368},
    {-2.0, -0.048900510708061119567},
    {-4.0, -0.0037793524098489064789},
    {-4.5, -0.0020734007547146144329},
    {-20.0, -9.8355252906498816904e-11},
};

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("Ei matches high-precision reference values") {
  for (const auto &r : kReference) {
    CAPTURE(r.x);
    CHECK(rel_err(expint_ei(r.x), r.ei) <= 1e-10);
  }
}

TEST_CASE("Ei matches the quadrature oracle across both regimes") {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = -std::exp(std::log(1e-3) +
                               (std::log(20.0) - std::log(1e-3)) * i / 99.0);
    worst = std::max(worst, rel_err(expint_ei(x), expint_ei_quadrature(x)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("quadrature oracle reproduces the reference values") {
  for (const auto &r : kReference) {
    CAPTURE(r.x);
    CHECK(rel_err(expint_ei_quadrature(r.x), r.ei) <= 1e-10);
  }
}

TEST_CASE("Ei is continuous across the series / continued-fraction switch") {
  const double below = expint_ei(-4.0 - 1e-12);
  const double above = expint_ei(-4.0 + 1e-12);
  CHECK(std::abs(below - above) <= 1e-14);
}

// Ei'(x) = e^x / x < 0, so Ei falls from 0- at -inf toward -inf at 0-.
TEST_CASE("Ei is decreasing on the negative axis") {
  double prev = expint_ei(-40.0);
  for (double x = -39.9; x < -1e-4; x += 0.05) {
    const double cur = expint_ei(x);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("Ei rejects the singular point and positive arguments") {
  CHECK_THROWS_WITH_AS(expint_ei(0.0), doctest::Contains("singular argument"),
                       std::domain_error);
  CHECK_THROWS_AS(expint_ei(0.5), std::domain_error);
  CHECK_THROWS_AS(expint_ei(std::nan("")), std::domain_error);
}

TEST_CASE("x Ei(c x) has limit zero at x = 0") {
  const double c = -2.0 * std::log(3.0);
  CHECK(x_times_expint_ei(0.0, c) == 0.0);
  CHECK(x_times_expint_ei(1e-9, c) == 0.0);
  // Just above the cutoff the product is already tiny.
  CHECK(std::abs(x_times_expint_ei(1e-7, c)) < 1e-5);
  CHECK(x_times_expint_ei(0.3, c) ==
        doctest::Approx(0.3 * expint_ei(0.3 * c)).epsilon(1e-15));
}
