#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bridgekit/dynamics.hpp"
#include "bridgekit/rng.hpp"
#include "bridgekit/schedule.hpp"
#include "bridgekit/types.hpp"

namespace bridgekit {

/// Clean-end times closer to 0 than this are rejected for clean_at_t0
/// schedules (the drift is singular there).
inline constexpr double kMinCleanTime = 1e-6;

enum class Spacing { uniform };
enum class Traversal { reverse, forward };
enum class StepMethod { euler_ode, euler_maruyama, exponential };

/*
 * Time grid t_0 < t_1 < ... < t_N. Reverse traversal walks t_N -> t_0
 * (clean end at t = 0), forward traversal walks t_0 -> t_N.
 */
struct TimeGrid {
  std::vector<double> points;
  Traversal traversal = Traversal::reverse;

  std::size_t steps() const { return points.size() - 1; }
  double start() const {
    return traversal == Traversal::reverse ? points.back() : points.front();
  }
  double stop() const {
    return traversal == Traversal::reverse ? points.front() : points.back();
  }
  /// Time at which step k (0-based, in traversal order) begins / ends.
  double step_from(std::size_t k) const;
  double step_to(std::size_t k) const;
};

TimeGrid make_grid(double t_start, double t_end, int steps,
                   Spacing spacing = Spacing::uniform,
                   Traversal traversal = Traversal::reverse);

/// Uniform grid on [t0, tN] traversed in the schedule's sampling direction.
TimeGrid sampling_grid(const Schedule &sched, int steps, double t0 = 1e-4,
                       double tN = 1.0);

/// x_t = xi x_r + eta s_hat + zeta y.
struct StepCoefficients {
  double xi = 1.0;
  double eta = 0.0;
  double zeta = 0.0;
};

/*
 * First-order exponential-integrator coefficients for a step r -> t.
 *
 * Closed forms exist for the SB family (alpha, rho, rho_bar form) and for
 * OT_CFM; OUVE and BBED throw std::domain_error("no closed-form
 * integrator"). When r is a Dirac endpoint the sigma_r -> 0 limit map
 * (0, a_t, b_t) is returned.
 */
StepCoefficients expint_coeffs(const Schedule &sched, double t, double r);

/// Affine coefficients of one step of the given deterministic method
/// (euler_ode or exponential), in traversal order.
std::vector<StepCoefficients> grid_step_coefficients(const Schedule &sched,
                                                     const TimeGrid &grid,
                                                     StepMethod method);

template <typename Scalar>
using PredictorFn = std::function<Vector<Scalar>(
    const Vector<Scalar> &x, const Vector<Scalar> &y, double t)>;

/// Data-prediction oracle: (x_t, y, t) -> estimate of the clean signal.
using Predictor = PredictorFn<Complex>;

template <typename Scalar>
struct SampleTrace {
  std::vector<Vector<Scalar>> states;      // x at every grid time visited
  std::vector<Vector<Scalar>> predictions; // in call order (first call first)
  Vector<Scalar> final;
  std::uint64_t seed = 0;

  /// Predictions reordered to match WeightProfile indexing (w_1 weights the
  /// last call).
  std::vector<Vector<Scalar>> weight_ordered_predictions() const {
    return {predictions.rbegin(), predictions.rend()};
  }
};

struct SamplerConfig {
  StepMethod method = StepMethod::exponential;
  double g = 0.0;
  bool record = false;
  /// Add N(0, sigma_{t_start}^2) to the initial state (only matters when
  /// the noisy end is not a Dirac point, e.g. OUVE).
  bool init_noise = false;
};

/*
 * One discrete update from r to t.
 *
 * euler_ode / exponential require g = 0. euler_maruyama uses the backward
 * drift when t < r and the forward drift otherwise, adding
 * g sqrt|t - r| N(0, I). At a Dirac start the state is pinned to the mean,
 * so the Euler methods use the mean velocity a'_r s_hat + b'_r y there.
 */
template <typename Scalar>
Vector<Scalar> step(StepMethod method, const Schedule &sched,
                    const Vector<Scalar> &x_r, const Vector<Scalar> &s_hat,
                    const Vector<Scalar> &y, double r, double t, double g,
                    Philox4x32 &rng);

/*
 * Runs the sampler from x = y at the grid start to the grid stop, calling
 * the predictor once per step.
 *
 * Throws std::invalid_argument if the grid traversal disagrees with the
 * schedule direction or the predictor returns a wrong-length vector, and
 * std::runtime_error (naming the step) if the state becomes non-finite.
 */
template <typename Scalar>
SampleTrace<Scalar> sample(const Schedule &sched, const Vector<Scalar> &y,
                           const PredictorFn<Scalar> &predictor,
                           const TimeGrid &grid, const SamplerConfig &config,
                           Philox4x32 &rng);

std::string to_string(StepMethod method);
StepMethod parse_step_method(std::string_view name);

} // namespace bridgekit
