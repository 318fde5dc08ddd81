#include "bridgekit/dynamics.hpp"

#include <string>

namespace bridgekit {

PathCoefficients interior_coefficients(const Schedule &sched, double t) {
  if (sched.is_dirac_endpoint(0.0) && t < kDiracGuard) {
    throw std::domain_error("t = " + std::to_string(t) +
                            " is at the Dirac endpoint t = 0");
  }
  if (sched.is_dirac_endpoint(1.0) && t > 1.0 - kDiracGuard) {
    throw std::domain_error("t = " + std::to_string(t) +
                            " is at the Dirac endpoint t = 1");
  }
  const auto p = eval_coefficients(sched, t);
  if (!(p.sigma > 0.0)) {
    throw std::domain_error("degenerate marginal (sigma = 0) at t = " +
                            std::to_string(t));
  }
  return p;
}

DriftSpec drift_spec(const PathCoefficients &p, double g,
                     DriftDirection direction) {
  if (!(g >= 0.0)) {
    throw std::invalid_argument("diffusion coefficient must be >= 0");
  }
  if (!(p.sigma > 0.0)) {
    throw std::domain_error("drift_spec: degenerate marginal (sigma = 0)");
  }
  const double log_rate = p.dsigma / p.sigma;
  const double correction = g * g / (2.0 * p.variance);
  double kappa = log_rate;
  switch (direction) {
  case DriftDirection::forward:
    kappa -= correction;
    break;
  case DriftDirection::backward:
    kappa += correction;
    break;
  case DriftDirection::ode:
    break;
  }
  DriftSpec d;
  d.state_coeff = kappa;
  d.s_coeff = p.da - p.a * kappa;
  d.y_coeff = p.db - p.b * kappa;
  d.g = direction == DriftDirection::ode ? 0.0 : g;
  d.direction = direction;
  return d;
}

DriftSpec drift_spec(const Schedule &sched, double t, double g,
                     DriftDirection direction) {
  return drift_spec(interior_coefficients(sched, t), g, direction);
}

} // namespace bridgekit
