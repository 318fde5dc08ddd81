#pragma once

#include <cmath>
#include <stdexcept>

#include "bridgekit/schedule.hpp"
#include "bridgekit/types.hpp"

namespace bridgekit {

/// Operations that divide by sigma_t reject t this close to a Dirac endpoint.
inline constexpr double kDiracGuard = 1e-12;

enum class DriftDirection { forward, backward, ode };

/*
 * Affine drift  state_coeff * x + s_coeff * s + y_coeff * y  together with
 * the diffusion coefficient g it was built for.
 *
 * With kappa = sigma'/sigma -/+ g^2 / (2 sigma^2) (forward/backward, 0 for
 * ode), the triple is (kappa, a' - a kappa, b' - b kappa).
 */
struct DriftSpec {
  double state_coeff = 0.0;
  double s_coeff = 0.0;
  double y_coeff = 0.0;
  double g = 0.0;
  DriftDirection direction = DriftDirection::ode;
};

template <typename Scalar>
struct GaussianMarginal {
  Vector<Scalar> mean;
  double sigma = 0.0;
};

/// Throws std::domain_error when sigma_t vanishes or t is within
/// kDiracGuard of a Dirac endpoint.
PathCoefficients interior_coefficients(const Schedule &sched, double t);

DriftSpec drift_spec(const PathCoefficients &p, double g,
                     DriftDirection direction);
DriftSpec drift_spec(const Schedule &sched, double t, double g,
                     DriftDirection direction);

template <typename Scalar, typename DX, typename DS, typename DY>
Vector<Scalar> apply_drift(const DriftSpec &d, const Eigen::MatrixBase<DX> &x,
                           const Eigen::MatrixBase<DS> &s,
                           const Eigen::MatrixBase<DY> &y) {
  return d.state_coeff * x + d.s_coeff * s + d.y_coeff * y;
}

namespace detail {
template <typename DA, typename DB>
void require_same_length(const Eigen::MatrixBase<DA> &a,
                         const Eigen::MatrixBase<DB> &b, const char *what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}
} // namespace detail

/// p_t(x | s, y) = N(a_t s + b_t y, sigma_t^2 I).
template <typename DS, typename DY>
GaussianMarginal<typename DS::Scalar>
marginal(const Schedule &sched, const Eigen::MatrixBase<DS> &s,
         const Eigen::MatrixBase<DY> &y, double t) {
  detail::require_same_length(s, y, "marginal");
  const auto p = eval_coefficients(sched, t);
  return {p.a * s + p.b * y, p.sigma};
}

/// -(x - mu_t) / sigma_t^2.
template <typename DX, typename DS, typename DY>
Vector<typename DX::Scalar> score(const Schedule &sched,
                                  const Eigen::MatrixBase<DX> &x,
                                  const Eigen::MatrixBase<DS> &s,
                                  const Eigen::MatrixBase<DY> &y, double t) {
  detail::require_same_length(x, s, "score");
  detail::require_same_length(s, y, "score");
  const auto p = eval_coefficients(sched, t);
  if (!(p.sigma > 0.0)) {
    throw std::domain_error("score: degenerate marginal (sigma = 0)");
  }
  return -(x - (p.a * s + p.b * y)) / p.variance;
}

/// Probability-flow field (sigma'/sigma) x + (a' - a sigma'/sigma) s +
/// (b' - b sigma'/sigma) y.
template <typename DX, typename DS, typename DY>
Vector<typename DX::Scalar> ode_field(const Schedule &sched,
                                      const Eigen::MatrixBase<DX> &x,
                                      const Eigen::MatrixBase<DS> &s,
                                      const Eigen::MatrixBase<DY> &y,
                                      double t) {
  detail::require_same_length(x, s, "ode_field");
  detail::require_same_length(s, y, "ode_field");
  return apply_drift<typename DX::Scalar>(
      drift_spec(sched, t, 0.0, DriftDirection::ode), x, s, y);
}

/// Forward or backward SDE drift for diffusion coefficient g; g = 0 gives
/// ode_field in either direction.
template <typename DX, typename DS, typename DY>
Vector<typename DX::Scalar>
sde_drift(const Schedule &sched, const Eigen::MatrixBase<DX> &x,
          const Eigen::MatrixBase<DS> &s, const Eigen::MatrixBase<DY> &y,
          double t, double g, DriftDirection direction) {
  detail::require_same_length(x, s, "sde_drift");
  detail::require_same_length(s, y, "sde_drift");
  return apply_drift<typename DX::Scalar>(drift_spec(sched, t, g, direction),
                                          x, s, y);
}

} // namespace bridgekit
