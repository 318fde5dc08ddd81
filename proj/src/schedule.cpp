#include "bridgekit/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "bridgekit/expint.hpp"

namespace bridgekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> required_params(ScheduleKind kind) {
  switch (kind) {
  case ScheduleKind::OUVE:
    return {"gamma", "c", "k"};
  case ScheduleKind::BBED:
  case ScheduleKind::SBVE:
    return {"c", "k"};
  case ScheduleKind::OT_CFM:
    return {"sigma_min", "sigma_max"};
  case ScheduleKind::SB_CFM:
    return {"sigma"};
  case ScheduleKind::SB_GENERAL:
    return {};
  }
  return {};
}

double derivative_of_std(double sigma, double dvariance) {
  if (sigma > 0.0) {
    return dvariance / (2.0 * sigma);
  }
  if (dvariance == 0.0) {
    return 0.0;
  }
  return std::copysign(kInf, dvariance);
}

PathCoefficients finish(double a, double b, double da, double db,
                        double variance, double dvariance) {
  PathCoefficients out;
  out.a = a;
  out.b = b;
  out.da = da;
  out.db = db;
  out.variance = std::max(variance, 0.0);
  out.dvariance = dvariance;
  out.sigma = std::sqrt(out.variance);
  out.dsigma = derivative_of_std(out.sigma, dvariance);
  return out;
}

PathCoefficients eval_ouve(const Schedule &sched, double t) {
  const double gamma = sched.param("gamma");
  const double c = sched.param("c");
  const double log_k = std::log(sched.param("k"));
  const double decay = std::exp(-gamma * t);
  const double denom = 2.0 * (gamma + log_k);
  // c (k^{2t} - e^{-2 gamma t}) / (2 (gamma + log k))
  const double variance =
      c * decay * decay * std::expm1(2.0 * t * (log_k + gamma)) / denom;
  const double dvariance =
      c * (log_k * std::exp(2.0 * t * log_k) + gamma * decay * decay) /
      (gamma + log_k);
  return finish(decay, -std::expm1(-gamma * t), -gamma * decay, gamma * decay,
                variance, dvariance);
}

PathCoefficients eval_bbed(const Schedule &sched, double t) {
  const double c = sched.param("c");
  const double k = sched.param("k");
  const double log_k = std::log(k);
  const double s = 1.0 - t;
  // (1 - t) Ei[2 (t - 1) log k], with its t -> 1 limit of 0.
  const double tail = x_times_expint_ei(s, -2.0 * log_k);
  const double ei_end = expint_ei(-2.0 * log_k);
  const double scale = 2.0 * k * k * log_k;
  const double e_t = std::expm1(2.0 * t * log_k) + t + scale * (tail - s * ei_end);
  const double variance = c * s * e_t;
  const double dvariance =
      c * (1.0 - 2.0 * t - std::expm1(2.0 * t * log_k) +
           2.0 * scale * (s * ei_end - tail));
  return finish(s, t, -1.0, 1.0, variance, dvariance);
}

PathCoefficients eval_sb(const SbTerms &sb) {
  const double r1 = sb.rho_end_sq;
  const double a = sb.alpha * sb.rho_bar_sq / r1;
  const double b = sb.alpha / sb.alpha_end * sb.rho_sq / r1;
  const double variance = sb.alpha * sb.alpha * sb.rho_bar_sq * sb.rho_sq / r1;
  const double da = (sb.dalpha * sb.rho_bar_sq - sb.alpha * sb.drho_sq) / r1;
  const double db =
      (sb.dalpha * sb.rho_sq + sb.alpha * sb.drho_sq) / (sb.alpha_end * r1);
  const double dvariance =
      (2.0 * sb.alpha * sb.dalpha * sb.rho_bar_sq * sb.rho_sq +
       sb.alpha * sb.alpha * (sb.rho_bar_sq - sb.rho_sq) * sb.drho_sq) /
      r1;
  return finish(a, b, da, db, variance, dvariance);
}

PathCoefficients eval_sb_cfm(const Schedule &sched, double t) {
  const double sigma_sq = sched.param("sigma") * sched.param("sigma");
  return finish(1.0 - t, t, -1.0, 1.0, sigma_sq * t * (1.0 - t),
                sigma_sq * (1.0 - 2.0 * t));
}

PathCoefficients eval_ot_cfm(const Schedule &sched, double t) {
  const double lo = sched.param("sigma_min");
  const double hi = sched.param("sigma_max");
  PathCoefficients out;
  out.a = t;
  out.b = 1.0 - t;
  out.da = 1.0;
  out.db = -1.0;
  out.sigma = (1.0 - t) * hi + t * lo;
  out.dsigma = lo - hi;
  out.variance = out.sigma * out.sigma;
  out.dvariance = 2.0 * out.sigma * out.dsigma;
  return out;
}

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("time " + std::to_string(t) +
                            " outside [0, 1]");
  }
}

std::string normalize_kind_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char ch : name) {
    out.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(
                                        static_cast<unsigned char>(ch))));
  }
  return out;
}

} // namespace

double Schedule::param(const std::string &name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) {
    throw std::out_of_range("schedule " + to_string(kind_) +
                            " has no parameter " + name);
  }
  return it->second;
}

bool Schedule::is_dirac_endpoint(double t) const {
  switch (kind_) {
  case ScheduleKind::OUVE:
    return t == 0.0;
  case ScheduleKind::OT_CFM:
    return false;
  default:
    return t == 0.0 || t == 1.0;
  }
}

SbTerms Schedule::sb_terms(double t) const {
  SbTerms sb;
  switch (kind_) {
  case ScheduleKind::SBVE: {
    const double c = param("c");
    const double log_k = std::log(param("k"));
    const double grow = std::exp(2.0 * t * log_k);
    sb.rho_sq = c * std::expm1(2.0 * t * log_k) / (2.0 * log_k);
    sb.rho_bar_sq = c * grow * std::expm1(2.0 * (1.0 - t) * log_k) /
                    (2.0 * log_k);
    sb.rho_end_sq = c * std::expm1(2.0 * log_k) / (2.0 * log_k);
    sb.drho_sq = c * grow;
    return sb;
  }
  case ScheduleKind::SB_CFM: {
    const double sigma_sq = param("sigma") * param("sigma");
    sb.rho_sq = sigma_sq * t;
    sb.rho_bar_sq = sigma_sq * (1.0 - t);
    sb.rho_end_sq = sigma_sq;
    sb.drho_sq = sigma_sq;
    return sb;
  }
  case ScheduleKind::SB_GENERAL: {
    sb.alpha = sb_->alpha(t);
    sb.dalpha = sb_->dalpha(t);
    sb.alpha_end = sb_->alpha(1.0);
    sb.rho_sq = sb_->rho_sq(t);
    sb.rho_end_sq = sb_->rho_sq(1.0);
    sb.rho_bar_sq = sb.rho_end_sq - sb.rho_sq;
    sb.drho_sq = sb_->drho_sq(t);
    return sb;
  }
  default:
    throw std::logic_error("sb_terms: " + to_string(kind_) +
                           " is not a Schroedinger-bridge schedule");
  }
}

Schedule make_schedule(ScheduleKind kind, std::map<std::string, double> params) {
  if (kind == ScheduleKind::SB_GENERAL) {
    throw std::invalid_argument(
        "sb_general needs alpha/rho functions; use make_sb_general");
  }
  const auto required = required_params(kind);
  const std::set<std::string> allowed(required.begin(), required.end());
  for (const auto &[name, value] : params) {
    if (!allowed.count(name)) {
      throw std::invalid_argument("unknown parameter " + name + " for " +
                                  to_string(kind));
    }
  }
  for (const auto &name : required) {
    const auto it = params.find(name);
    if (it == params.end()) {
      throw std::invalid_argument("missing parameter " + name + " for " +
                                  to_string(kind));
    }
    if (!std::isfinite(it->second) || it->second <= 0.0) {
      throw std::invalid_argument("non-positive parameter " + name);
    }
  }
  if (allowed.count("k") && params.at("k") <= 1.0) {
    throw std::invalid_argument("parameter k must exceed 1 for " +
                                to_string(kind));
  }

  Schedule sched;
  sched.kind_ = kind;
  sched.direction_ = kind == ScheduleKind::OT_CFM ? Direction::clean_at_t1
                                                  : Direction::clean_at_t0;
  sched.params_ = std::move(params);
  return sched;
}

Schedule make_sb_general(SbFunctions functions) {
  if (!functions.alpha || !functions.dalpha || !functions.rho_sq ||
      !functions.drho_sq) {
    throw std::invalid_argument("sb_general: all four functions are required");
  }
  if (!(functions.rho_sq(1.0) > 0.0) || !(functions.alpha(1.0) > 0.0)) {
    throw std::invalid_argument(
        "sb_general: rho_1^2 and alpha_1 must be positive");
  }
  Schedule sched;
  sched.kind_ = ScheduleKind::SB_GENERAL;
  sched.direction_ = Direction::clean_at_t0;
  sched.sb_ = std::make_shared<const SbFunctions>(std::move(functions));
  return sched;
}

PathCoefficients eval_coefficients(const Schedule &sched, double t) {
  check_time(t);
  switch (sched.kind()) {
  case ScheduleKind::OUVE:
    return eval_ouve(sched, t);
  case ScheduleKind::BBED:
    return eval_bbed(sched, t);
  case ScheduleKind::SB_CFM:
    return eval_sb_cfm(sched, t);
  case ScheduleKind::OT_CFM:
    return eval_ot_cfm(sched, t);
  case ScheduleKind::SBVE:
  case ScheduleKind::SB_GENERAL:
    return eval_sb(sched.sb_terms(t));
  }
  throw std::logic_error("eval_coefficients: unhandled kind");
}

double aux_gtilde_sq(const Schedule &sched, double t) {
  check_time(t);
  switch (sched.kind()) {
  case ScheduleKind::OUVE: {
    const auto p = eval_coefficients(sched, t);
    return p.dvariance + 2.0 * sched.param("gamma") * p.variance;
  }
  case ScheduleKind::BBED: {
    if (t >= 1.0) {
      throw std::domain_error("aux_gtilde_sq: BBED is singular at t = 1");
    }
    const auto p = eval_coefficients(sched, t);
    return p.dvariance + 2.0 * p.variance / (1.0 - t);
  }
  case ScheduleKind::SBVE:
  case ScheduleKind::SB_CFM:
  case ScheduleKind::SB_GENERAL: {
    const auto sb = sched.sb_terms(t);
    return sb.alpha * sb.alpha * sb.drho_sq;
  }
  case ScheduleKind::OT_CFM:
    break;
  }
  throw std::domain_error("aux_gtilde_sq: no auxiliary diffusion for " +
                          to_string(sched.kind()));
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
  case ScheduleKind::OUVE:
    return "ouve";
  case ScheduleKind::BBED:
    return "bbed";
  case ScheduleKind::SB_GENERAL:
    return "sb_general";
  case ScheduleKind::SBVE:
    return "sbve";
  case ScheduleKind::OT_CFM:
    return "ot_cfm";
  case ScheduleKind::SB_CFM:
    return "sb_cfm";
  }
  return "unknown";
}

std::string to_string(Direction direction) {
  return direction == Direction::clean_at_t0 ? "clean_at_t0" : "clean_at_t1";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  const std::string key = normalize_kind_name(name);
  for (auto kind : {ScheduleKind::OUVE, ScheduleKind::BBED,
                    ScheduleKind::SB_GENERAL, ScheduleKind::SBVE,
                    ScheduleKind::OT_CFM, ScheduleKind::SB_CFM}) {
    if (to_string(kind) == key) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown schedule kind '" + std::string(name) +
                              "'");
}

nlohmann::ordered_json schedule_to_json(const Schedule &sched) {
  if (sched.kind() == ScheduleKind::SB_GENERAL) {
    throw std::invalid_argument("sb_general schedules are not serializable");
  }
  nlohmann::ordered_json j;
  j["kind"] = to_string(sched.kind());
  j["params"] = nlohmann::ordered_json::object();
  for (const auto &[name, value] : sched.params()) {
    j["params"][name] = value;
  }
  return j;
}

Schedule schedule_from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("schedule JSON needs a string \"kind\"");
  }
  std::map<std::string, double> params;
  if (j.contains("params")) {
    const auto &p = j.at("params");
    if (!p.is_object()) {
      throw std::invalid_argument("schedule JSON \"params\" must be an object");
    }
    for (const auto &[name, value] : p.items()) {
      if (!value.is_number()) {
        throw std::invalid_argument("schedule parameter " + name +
                                    " is not a number");
      }
      params[name] = value.get<double>();
    }
  }
  return make_schedule(parse_schedule_kind(j.at("kind").get<std::string>()),
                       std::move(params));
}

} // namespace bridgekit
