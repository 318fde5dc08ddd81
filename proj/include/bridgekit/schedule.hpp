#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

namespace bridgekit {

enum class ScheduleKind { OUVE, BBED, SB_GENERAL, SBVE, OT_CFM, SB_CFM };

/// Which end of [0, 1] carries the clean signal. Sampling runs from the
/// noisy end toward the clean end, so this also fixes the time direction.
enum class Direction { clean_at_t0, clean_at_t1 };

/*
 * Path coefficients of the Gaussian marginal N(a s + b y, sigma^2 I) and
 * their time derivatives.
 *
 * sigma is always a standard deviation. variance/dvariance are carried
 * alongside because they stay finite at the Dirac endpoints where
 * dsigma = dvariance / (2 sigma) diverges; there dsigma is +-inf.
 */
struct PathCoefficients {
  double a = 0.0;
  double b = 0.0;
  double sigma = 0.0;
  double da = 0.0;
  double db = 0.0;
  double dsigma = 0.0;
  double variance = 0.0;
  double dvariance = 0.0;
};

/// User-supplied Schroedinger-bridge ingredients: alpha_t = exp(int f) and
/// rho_t^2 = int_0^t g^2 alpha^-2, each with its time derivative.
struct SbFunctions {
  std::function<double(double)> alpha;
  std::function<double(double)> dalpha;
  std::function<double(double)> rho_sq;
  std::function<double(double)> drho_sq;
};

/// Evaluated SB-family quantities at one time.
struct SbTerms {
  double alpha = 1.0;
  double dalpha = 0.0;
  double alpha_end = 1.0;  // alpha_1
  double rho_sq = 0.0;
  double rho_bar_sq = 0.0; // rho_1^2 - rho_t^2
  double drho_sq = 0.0;
  double rho_end_sq = 0.0; // rho_1^2
};

class Schedule {
 public:
  ScheduleKind kind() const { return kind_; }
  Direction direction() const { return direction_; }
  const std::map<std::string, double> &params() const { return params_; }

  /// Throws std::out_of_range when the parameter does not belong to the kind.
  double param(const std::string &name) const;

  bool is_sb_family() const {
    return kind_ == ScheduleKind::SBVE || kind_ == ScheduleKind::SB_CFM ||
           kind_ == ScheduleKind::SB_GENERAL;
  }

  /// True when the marginal collapses to a point at t (sigma_t = 0 exactly
  /// at that endpoint by construction of the kind).
  bool is_dirac_endpoint(double t) const;

  /// alpha, rho^2 and friends; only for SB-family kinds.
  SbTerms sb_terms(double t) const;

  const SbFunctions *sb_functions() const { return sb_.get(); }

 private:
  friend Schedule make_schedule(ScheduleKind, std::map<std::string, double>);
  friend Schedule make_sb_general(SbFunctions);

  ScheduleKind kind_ = ScheduleKind::SB_CFM;
  Direction direction_ = Direction::clean_at_t0;
  std::map<std::string, double> params_;
  std::shared_ptr<const SbFunctions> sb_;
};

/*
 * Builds a validated schedule. Required parameters per kind:
 *
 *   OUVE    gamma, c, k      (k > 1)
 *   BBED    c, k             (k > 1)
 *   SBVE    c, k             (k > 1)
 *   OT_CFM  sigma_min, sigma_max
 *   SB_CFM  sigma
 *
 * Every parameter must be finite and strictly positive; there are no
 * defaults. SB_GENERAL has no named parameters, see make_sb_general.
 */
Schedule make_schedule(ScheduleKind kind, std::map<std::string, double> params);

/// General SB schedule from caller-provided alpha and rho^2.
Schedule make_sb_general(SbFunctions functions);

/// Coefficients at t in [0, 1]; throws std::domain_error outside.
PathCoefficients eval_coefficients(const Schedule &sched, double t);

/*
 * Auxiliary squared diffusion g~_t^2 that removes sigma' from the drifts:
 *
 *   OUVE       (sigma^2)' + 2 gamma sigma^2
 *   BBED       (sigma^2)' + 2 sigma^2 / (1 - t)
 *   SB family  alpha^2 (rho^2)'
 *
 * Throws std::domain_error at t = 1 for BBED and for OT_CFM, which has no
 * associated auxiliary diffusion.
 */
double aux_gtilde_sq(const Schedule &sched, double t);

std::string to_string(ScheduleKind kind);
std::string to_string(Direction direction);

/// Accepts "sb_cfm", "sb-cfm", "SB_CFM", ... Throws std::invalid_argument.
ScheduleKind parse_schedule_kind(std::string_view name);

/// {"kind": "...", "params": {...}}. SB_GENERAL cannot be serialized.
nlohmann::ordered_json schedule_to_json(const Schedule &sched);
Schedule schedule_from_json(const nlohmann::json &j);

} // namespace bridgekit
