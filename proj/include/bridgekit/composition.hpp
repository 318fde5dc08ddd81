#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bridgekit/sampler.hpp"
#include "bridgekit/schedule.hpp"
#include "bridgekit/types.hpp"

namespace bridgekit {

/*
 * Decomposition of the final ODE sample
 *
 *   x_{t_0} = sum_n w_n s_hat_{t_n} + w_y y .
 *
 * Indexing is reverse-time: w[0] (w_1) weights the prediction made at t_1,
 * i.e. the LAST model call; w[N-1] (w_N) weights the first call at t_N.
 */
struct WeightProfile {
  std::vector<double> w;
  double w_y = 0.0;

  double sum() const;
};

/*
 * Unrolls x_{k+1} = xi_k x_k + eta_k s_hat_k + zeta_k y starting from
 * x = y. Coefficients are in the order the steps are taken (first step,
 * leaving t_N, first). Throws std::invalid_argument on an empty list.
 */
WeightProfile weights_from_coeffs(std::span<const StepCoefficients> coeffs);

/*
 * Closed-form SB weights on an ascending grid t_0 < ... < t_N:
 *
 *   w_n = alpha_0 rho_0 rho_bar_0 / rho_N^2 (rho_bar_{n-1}/rho_{n-1}
 *                                            - rho_bar_n/rho_n)
 *   w_y = alpha_0 rho_0^2 / (alpha_N rho_N^2)
 *
 * with rho_bar_t^2 = rho_1^2 - rho_t^2. Agrees with the recursion when
 * t_N = 1. Takes rho^2 (not rho) so that w_y is exact for SB-CFM.
 * Throws std::domain_error when rho_0 = 0.
 */
WeightProfile weights_closed_form_sb(const TimeGrid &grid,
                                     const std::function<double(double)> &alpha,
                                     const std::function<double(double)> &rho_sq);

/// Same, reading alpha and rho^2 off an SB-family schedule.
WeightProfile weights_closed_form_sb(const Schedule &sched,
                                     const TimeGrid &grid);

/// sum_n w_n predictions[n] + w_y y, predictions ordered like profile.w.
template <typename Scalar>
Vector<Scalar> compose_output(const WeightProfile &profile,
                              std::span<const Vector<Scalar>> predictions,
                              const Vector<Scalar> &y) {
  if (predictions.size() != profile.w.size()) {
    throw std::invalid_argument("compose_output: expected " +
                                std::to_string(profile.w.size()) +
                                " predictions, got " +
                                std::to_string(predictions.size()));
  }
  Vector<Scalar> out = profile.w_y * y;
  for (std::size_t n = 0; n < predictions.size(); ++n) {
    if (predictions[n].size() != y.size()) {
      throw std::invalid_argument("compose_output: length mismatch");
    }
    out += profile.w[n] * predictions[n];
  }
  return out;
}

/// Model-call time of each weight: t_n for w_n.
std::vector<double> weight_times(const TimeGrid &grid);

/// step_index,t,weight rows (n = 1..N) then "y,,w_y". LF endings,
/// shortest round-trip floats.
std::string weights_to_csv(const WeightProfile &profile, const TimeGrid &grid);

/// Self-contained SVG line chart of the same numbers.
std::string weights_to_svg(const WeightProfile &profile, const TimeGrid &grid);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

} // namespace bridgekit
