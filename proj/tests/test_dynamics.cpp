#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "bridgekit/dynamics.hpp"
#include "bridgekit/quadrature.hpp"

using namespace bridgekit;

namespace {

std::vector<Schedule> schedules() {
  return {make_schedule(ScheduleKind::OUVE, {{"gamma", 1.5}, {"c", 0.4}, {"k", 2.6}}),
          make_schedule(ScheduleKind::BBED, {{"c", 0.4}, {"k", 2.6}}),
          make_schedule(ScheduleKind::SBVE, {{"c", 0.4}, {"k", 2.6}}),
          make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.3}}),
          make_schedule(ScheduleKind::OT_CFM, {{"sigma_min", 0.05}, {"sigma_max", 0.5}})};
}

CVector scalar(Complex v) { return CVector::Constant(1, v); }

struct Point {
  CVector x, s, y;
  double t;
};

Point random_point(std::mt19937_64 &gen, Eigen::Index n = 3) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  Point p{CVector(n), CVector(n), CVector(n), unit(gen)};
  for (Eigen::Index i = 0; i < n; ++i) {
    p.x[i] = {normal(gen), normal(gen)};
    p.s[i] = {normal(gen), normal(gen)};
    p.y[i] = {normal(gen), normal(gen)};
  }
  return p;
}

double rel(const CVector &a, const CVector &b) {
  return (a - b).cwiseAbs().maxCoeff() /
         std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
}

} // namespace

TEST_CASE("marginal of SB-CFM") {
  const auto sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
  const auto m = marginal(sched, scalar(1.0), scalar(0.0), 0.25);
  CHECK(m.mean[0].real() == doctest::Approx(0.75));
  CHECK(m.sigma == doctest::Approx(std::sqrt(0.1875)));
  const auto clean = marginal(sched, scalar({1.0, 2.0}), scalar(5.0), 0.0);
  CHECK(clean.mean[0] == Complex(1.0, 2.0));
  CHECK(clean.sigma == 0.0);
  CHECK_THROWS_AS(marginal(sched, CVector::Zero(2), CVector::Zero(3), 0.5),
                  std::invalid_argument);
}

TEST_CASE("SBVE marginal matches quadrature of rho^2") {
  const auto sched = make_schedule(ScheduleKind::SBVE, {{"c", 0.4}, {"k", 2.6}});
  const auto g_sq = [](double t) { return 0.4 * std::pow(2.6, 2.0 * t); };
  const double rho = integrate_adaptive(g_sq, 0.0, 0.5, 20, 1e-14);
  const double rho_end = integrate_adaptive(g_sq, 0.0, 1.0, 20, 1e-14);
  const auto m = marginal(sched, scalar(2.0), scalar(-1.0), 0.5);
  const double a = (rho_end - rho) / rho_end;
  CHECK(m.mean[0].real() == doctest::Approx(2.0 * a - (1.0 - a)).epsilon(1e-10));
  CHECK(m.sigma == doctest::Approx(std::sqrt(a * rho)).epsilon(1e-10));
}

TEST_CASE("score") {
  const auto sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
  const CVector s = scalar(1.0);
  const CVector y = scalar(0.0);
  const CVector mu = marginal(sched, s, y, 0.5).mean;
  CHECK(score(sched, mu, s, y, 0.5).norm() == 0.0);
  CHECK(score(sched, (mu.array() + 1.0).matrix().eval(), s, y, 0.5)[0].real() ==
        doctest::Approx(-4.0));
  CHECK_THROWS_WITH_AS(score(sched, mu, s, y, 0.0),
                       doctest::Contains("degenerate marginal"), std::domain_error);
}

TEST_CASE("ode field examples") {
  const auto sb = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
  const CVector f = ode_field(sb, scalar(0.7), scalar(1.0), scalar(0.0), 0.5);
  CHECK(f[0].real() == doctest::Approx(-1.0).epsilon(1e-14));
  const auto ot = make_schedule(ScheduleKind::OT_CFM, {{"sigma_min", 0.3}, {"sigma_max", 0.3}});
  std::mt19937_64 gen(11);
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(gen);
    CHECK(rel(ode_field(ot, p.x, p.s, p.y, p.t), p.s - p.y) <= 1e-14);
  }
}

TEST_CASE("ode field matches finite differences of the mean and sigma") {
  std::mt19937_64 gen(3);
  constexpr double h = 1e-6;
  for (const auto &sched : schedules()) {
    CAPTURE(to_string(sched.kind()));
    for (int i = 0; i < 50; ++i) {
      const Point p = random_point(gen);
      const auto lo = marginal(sched, p.s, p.y, p.t - h);
      const auto hi = marginal(sched, p.s, p.y, p.t + h);
      const auto mid = marginal(sched, p.s, p.y, p.t);
      const CVector dmu = (hi.mean - lo.mean) / (2.0 * h);
      const double dsigma = (hi.sigma - lo.sigma) / (2.0 * h);
      const CVector expected = (dsigma / mid.sigma) * (p.x - mid.mean) + dmu;
      CHECK(rel(ode_field(sched, p.x, p.s, p.y, p.t), expected) <= 1e-6);
    }
  }
}

TEST_CASE("zero diffusion reduces both SDE drifts to the ODE field") {
  std::mt19937_64 gen(5);
  for (const auto &sched : schedules()) {
    CAPTURE(to_string(sched.kind()));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Point p = random_point(gen, 1);
      const CVector ode = ode_field(sched, p.x, p.s, p.y, p.t);
      worst = std::max({worst,
                        rel(sde_drift(sched, p.x, p.s, p.y, p.t, 0.0,
                                      DriftDirection::forward), ode),
                        rel(sde_drift(sched, p.x, p.s, p.y, p.t, 0.0,
                                      DriftDirection::backward), ode)});
    }
    CHECK(worst <= 1e-12);
  }
}

// The backward drift is the forward drift minus g^2 times the score, so
// the two average to the ODE field.
TEST_CASE("forward and backward drifts differ by g^2 times the score") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> g_dist(0.1, 2.0);
  for (const auto &sched : schedules()) {
    CAPTURE(to_string(sched.kind()));
    for (int i = 0; i < 100; ++i) {
      const Point p = random_point(gen);
      const double g = g_dist(gen);
      const CVector fwd = sde_drift(sched, p.x, p.s, p.y, p.t, g, DriftDirection::forward);
      const CVector bwd = sde_drift(sched, p.x, p.s, p.y, p.t, g, DriftDirection::backward);
      const CVector sc = score(sched, p.x, p.s, p.y, p.t);
      CHECK(rel(bwd - fwd, (-g * g) * sc) <= 1e-10);
      CHECK(rel(0.5 * (fwd + bwd), ode_field(sched, p.x, p.s, p.y, p.t)) <= 1e-12);
    }
  }
}

TEST_CASE("drifts are affine with the advertised triple") {
  std::mt19937_64 gen(13);
  const CVector one = scalar(1.0);
  const CVector zero = scalar(0.0);
  for (const auto &sched : schedules()) {
    for (auto dir : {DriftDirection::forward, DriftDirection::backward, DriftDirection::ode}) {
      const double t = 0.37;
      const double g = dir == DriftDirection::ode ? 0.0 : 0.8;
      const DriftSpec d = drift_spec(sched, t, g, dir);
      const auto eval = [&](const CVector &x, const CVector &s, const CVector &y) {
        return sde_drift(sched, x, s, y, t, g, dir)[0].real();
      };
      CHECK(std::abs(eval(one, zero, zero) - d.state_coeff) <= 1e-14 * std::max(1.0, std::abs(d.state_coeff)));
      CHECK(std::abs(eval(zero, one, zero) - d.s_coeff) <= 1e-14 * std::max(1.0, std::abs(d.s_coeff)));
      CHECK(std::abs(eval(zero, zero, one) - d.y_coeff) <= 1e-14 * std::max(1.0, std::abs(d.y_coeff)));
      CHECK(d.g == g);
      CHECK(d.direction == dir);
    }
    const DriftSpec ode = drift_spec(sched, 0.37, 0.0, DriftDirection::ode);
    const auto p = eval_coefficients(sched, 0.37);
    CHECK(ode.state_coeff == doctest::Approx(p.dsigma / p.sigma).epsilon(1e-14));
  }
}

TEST_CASE("with g = g~ the SB forward drift forgets the clean signal") {
  for (const auto &sched :
       {make_schedule(ScheduleKind::SBVE, {{"c", 0.4}, {"k", 2.6}}),
        make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}})}) {
    for (double t : {0.05, 0.3, 0.6, 0.95}) {
      const double g = std::sqrt(aux_gtilde_sq(sched, t));
      const DriftSpec d = drift_spec(sched, t, g, DriftDirection::forward);
      CHECK(std::abs(d.s_coeff) <= 1e-12);
    }
  }
}

TEST_CASE("operations dividing by sigma reject Dirac endpoints") {
  const auto sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
  CHECK_THROWS_AS(interior_coefficients(sched, 0.0), std::domain_error);
  CHECK_THROWS_AS(interior_coefficients(sched, 1.0 - 1e-13), std::domain_error);
  CHECK_NOTHROW(interior_coefficients(sched, 1e-10));
  CHECK_THROWS_AS(ode_field(sched, scalar(0.0), scalar(1.0), scalar(0.0), 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(ode_field(sched, CVector::Zero(2), scalar(1.0), scalar(0.0), 0.5),
                  std::invalid_argument);
}

TEST_CASE("real vectors go through the same templates") {
  const auto sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
  RVector x(2), s(2), y(2);
  x << 0.7, 0.1;
  s << 1.0, 2.0;
  y << 0.0, -1.0;
  const RVector f = ode_field(sched, x, s, y, 0.5);
  CHECK(f[0] == doctest::Approx(-1.0));
}
