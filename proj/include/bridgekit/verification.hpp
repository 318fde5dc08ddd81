#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bridgekit/sampler.hpp"
#include "bridgekit/schedule.hpp"
#include "bridgekit/types.hpp"

namespace bridgekit {

/// Empirical vs expected marginal of simulated forward-SDE trajectories.
/// empirical_std pools every real degree of freedom (real and imaginary
/// parts of each component).
struct MarginalStats {
  double t = 0.0;
  CVector empirical_mean;
  double empirical_std = 0.0;
  CVector expected_mean;
  double expected_std = 0.0;
  std::size_t n_trajectories = 0;
};

/*
 * Euler-Maruyama simulation of the forward SDE with g_t = g_scale * g~_t,
 * started at the clean Dirac endpoint x_0 = s.
 *
 * dt is the largest step. Because the drift grows like 1/t next to the
 * Dirac endpoint, steps there are additionally capped at 1% of the elapsed
 * time (geometric grading down to a first step of 1e-11); checkpoints are hit exactly.
 * Trajectory i draws from Philox stream (seed, i), so results do not depend
 * on the thread count. Threads default to BRIDGEKIT_THREADS or the hardware
 * concurrency.
 */
std::vector<MarginalStats>
mc_forward_marginals(const Schedule &sched, const CVector &s, const CVector &y,
                     double g_scale, const std::vector<double> &checkpoints,
                     std::size_t n_trajectories, double dt, std::uint64_t seed,
                     int threads = 0);

/// Mean within mean_sigmas * sigma_t / sqrt(M) on every real degree of
/// freedom and std within std_rel of sigma_t.
bool marginal_within_tolerance(const MarginalStats &stats,
                               double mean_sigmas = 5.0, double std_rel = 0.05);

enum class EquivalenceFamily { OUVE, BBED, SB, OTCFM_EULER };

struct EquivalenceReport {
  EquivalenceFamily family = EquivalenceFamily::SB;
  /// Largest |unified - original| over the draws, relative to the magnitude
  /// of the drift terms at that point (absolute for OTCFM_EULER).
  double max_residual = 0.0;
  std::size_t points_tested = 0;
};

/*
 * Compares the unified-framework probability-flow field (ode_field) against
 * each model's original drift, written independently:
 *
 *   OUVE  gamma (y - x) - 1/2 c k^{2t} score
 *   BBED  (y - x)/(1 - t) - 1/2 c k^{2t} score
 *   SB    -1/2 g^2 (x - y)/rho_bar^2 + 1/2 g^2 (x - s)/rho^2   (alpha = 1)
 *
 * at random scalar (x, s, y, t) and random schedule parameters; SB
 * alternates SBVE and SB-CFM.
 */
EquivalenceReport drift_equivalence_residual(EquivalenceFamily family,
                                             std::size_t n_points,
                                             std::uint64_t seed);

/// xi = sigma_t / sigma_r and the two forcing integrals
/// sigma_t int_r^t m/sigma, sigma_t int_r^t n/sigma by adaptive quadrature.
StepCoefficients coeff_quadrature_oracle(const Schedule &sched, double t,
                                         double r, int n_nodes = 20);

/// Max |exponential step - Euler step| for OT-CFM over random steps.
EquivalenceReport otcfm_equivalence_residual(double sigma_min,
                                             double sigma_max,
                                             std::size_t n_steps,
                                             std::uint64_t seed = 0);

struct CheckResult {
  std::string check;
  nlohmann::ordered_json residual_or_stats;
  double tolerance = 0.0;
  bool pass = false;
};

/// Every certification check, in a fixed order.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed);

nlohmann::ordered_json to_json(const CheckResult &result);
nlohmann::ordered_json to_json(const MarginalStats &stats);
std::string to_string(EquivalenceFamily family);

/// BRIDGEKIT_THREADS if set and positive, else hardware concurrency.
int thread_budget();

} // namespace bridgekit
