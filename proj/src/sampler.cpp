#include "bridgekit/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace bridgekit {

namespace {

bool near_dirac(const Schedule &sched, double r) {
  return (sched.is_dirac_endpoint(0.0) && r < kDiracGuard) ||
         (sched.is_dirac_endpoint(1.0) && r > 1.0 - kDiracGuard);
}

StepCoefficients sb_coeffs(const Schedule &sched, double t, double r) {
  const SbTerms at = sched.sb_terms(t);
  const SbTerms from = sched.sb_terms(r);
  const double rho_t = std::sqrt(std::max(at.rho_sq, 0.0));
  const double rho_bar_t = std::sqrt(std::max(at.rho_bar_sq, 0.0));
  const double rho_r = std::sqrt(from.rho_sq);
  const double rho_bar_r = std::sqrt(from.rho_bar_sq);
  const double r1 = at.rho_end_sq;

  StepCoefficients c;
  c.xi = at.alpha * rho_t * rho_bar_t / (from.alpha * rho_r * rho_bar_r);
  c.eta = at.alpha / r1 *
          (at.rho_bar_sq - rho_bar_r * rho_t * rho_bar_t / rho_r);
  c.zeta = at.alpha / (at.alpha_end * r1) *
           (at.rho_sq - rho_r * rho_t * rho_bar_t / rho_bar_r);
  return c;
}

StepCoefficients ot_cfm_coeffs(const Schedule &sched, double t, double r) {
  const double lo = sched.param("sigma_min");
  const double hi = sched.param("sigma_max");
  const double sigma_r = (1.0 - r) * hi + r * lo;
  const double sigma_t = (1.0 - t) * hi + t * lo;
  return {sigma_t / sigma_r, hi * (t - r) / sigma_r, -lo * (t - r) / sigma_r};
}

void check_times(double r, double t) {
  if (!(r >= 0.0 && r <= 1.0 && t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("step times must lie in [0, 1]");
  }
}

} // namespace

double TimeGrid::step_from(std::size_t k) const {
  return traversal == Traversal::reverse ? points[points.size() - 1 - k]
                                         : points[k];
}

double TimeGrid::step_to(std::size_t k) const {
  return traversal == Traversal::reverse ? points[points.size() - 2 - k]
                                         : points[k + 1];
}

TimeGrid make_grid(double t_start, double t_end, int steps, Spacing spacing,
                   Traversal traversal) {
  if (steps < 1) {
    throw std::invalid_argument("grid needs at least one step");
  }
  if (!(t_start >= 0.0 && t_start <= 1.0 && t_end >= 0.0 && t_end <= 1.0)) {
    throw std::invalid_argument("grid endpoints must lie in [0, 1]");
  }
  if (!(t_start < t_end)) {
    throw std::invalid_argument("grid endpoints must satisfy t_start < t_end");
  }
  TimeGrid grid;
  grid.traversal = traversal;
  grid.points.resize(static_cast<std::size_t>(steps) + 1);
  switch (spacing) {
  case Spacing::uniform: {
    const double width = t_end - t_start;
    for (int n = 0; n <= steps; ++n) {
      grid.points[n] = t_start + n * width / steps;
    }
    break;
  }
  }
  grid.points.back() = t_end;
  for (std::size_t n = 1; n < grid.points.size(); ++n) {
    if (!(grid.points[n] > grid.points[n - 1])) {
      throw std::invalid_argument("grid is not strictly increasing");
    }
  }
  return grid;
}

TimeGrid sampling_grid(const Schedule &sched, int steps, double t0,
                       double tN) {
  return make_grid(t0, tN, steps, Spacing::uniform,
                   sched.direction() == Direction::clean_at_t0
                       ? Traversal::reverse
                       : Traversal::forward);
}

StepCoefficients expint_coeffs(const Schedule &sched, double t, double r) {
  check_times(r, t);
  switch (sched.kind()) {
  case ScheduleKind::OUVE:
  case ScheduleKind::BBED:
    throw std::domain_error("no closed-form integrator for " +
                            to_string(sched.kind()) +
                            "; use an Euler method");
  default:
    break;
  }
  if (t == r) {
    return {1.0, 0.0, 0.0};
  }
  if (near_dirac(sched, r)) {
    const auto p = eval_coefficients(sched, t);
    return {0.0, p.a, p.b};
  }
  if (sched.kind() == ScheduleKind::OT_CFM) {
    return ot_cfm_coeffs(sched, t, r);
  }
  return sb_coeffs(sched, t, r);
}

std::vector<StepCoefficients> grid_step_coefficients(const Schedule &sched,
                                                     const TimeGrid &grid,
                                                     StepMethod method) {
  std::vector<StepCoefficients> out;
  out.reserve(grid.steps());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double r = grid.step_from(k);
    const double t = grid.step_to(k);
    switch (method) {
    case StepMethod::exponential:
      out.push_back(expint_coeffs(sched, t, r));
      break;
    case StepMethod::euler_ode: {
      const double h = t - r;
      if (near_dirac(sched, r)) {
        const auto p = eval_coefficients(sched, r);
        out.push_back({1.0, h * p.da, h * p.db});
      } else {
        const auto d = drift_spec(sched, r, 0.0, DriftDirection::ode);
        out.push_back({1.0 + h * d.state_coeff, h * d.s_coeff, h * d.y_coeff});
      }
      break;
    }
    case StepMethod::euler_maruyama:
      throw std::invalid_argument(
          "euler_maruyama steps are stochastic; no affine coefficients");
    }
  }
  return out;
}

template <typename Scalar>
Vector<Scalar> step(StepMethod method, const Schedule &sched,
                    const Vector<Scalar> &x_r, const Vector<Scalar> &s_hat,
                    const Vector<Scalar> &y, double r, double t, double g,
                    Philox4x32 &rng) {
  detail::require_same_length(x_r, s_hat, "step");
  detail::require_same_length(x_r, y, "step");
  check_times(r, t);
  if (method != StepMethod::euler_maruyama && g != 0.0) {
    throw std::invalid_argument(to_string(method) +
                                " is deterministic; g must be 0");
  }
  if (!(g >= 0.0)) {
    throw std::invalid_argument("diffusion coefficient must be >= 0");
  }

  if (method == StepMethod::exponential) {
    const auto c = expint_coeffs(sched, t, r);
    return c.xi * x_r + c.eta * s_hat + c.zeta * y;
  }

  const double h = t - r;
  Vector<Scalar> drift;
  if (near_dirac(sched, r)) {
    const auto p = eval_coefficients(sched, r);
    drift = p.da * s_hat + p.db * y;
  } else {
    DriftDirection direction = DriftDirection::ode;
    if (method == StepMethod::euler_maruyama) {
      direction = t < r ? DriftDirection::backward : DriftDirection::forward;
    }
    drift = apply_drift<Scalar>(drift_spec(sched, r, g, direction), x_r,
                                s_hat, y);
  }
  Vector<Scalar> x_t = x_r + h * drift;
  if (method == StepMethod::euler_maruyama && g > 0.0) {
    StandardNormal<Scalar> normal;
    const double scale = g * std::sqrt(std::abs(h));
    for (Eigen::Index i = 0; i < x_t.size(); ++i) {
      x_t[i] += scale * normal(rng);
    }
  }
  return x_t;
}

template <typename Scalar>
SampleTrace<Scalar> sample(const Schedule &sched, const Vector<Scalar> &y,
                           const PredictorFn<Scalar> &predictor,
                           const TimeGrid &grid, const SamplerConfig &config,
                           Philox4x32 &rng) {
  if (!predictor) {
    throw std::invalid_argument("sample: empty predictor");
  }
  if (grid.points.size() < 2) {
    throw std::invalid_argument("sample: grid needs at least one step");
  }
  const Traversal expected = sched.direction() == Direction::clean_at_t0
                                 ? Traversal::reverse
                                 : Traversal::forward;
  if (grid.traversal != expected) {
    throw std::invalid_argument(
        "sample: grid traversal does not match the schedule direction");
  }
  if (sched.direction() == Direction::clean_at_t0 &&
      grid.points.front() < kMinCleanTime) {
    throw std::invalid_argument("sample: t_0 must be at least 1e-6");
  }

  SampleTrace<Scalar> trace;
  trace.seed = rng.seed();
  Vector<Scalar> x = y;
  if (config.init_noise) {
    const double sigma = eval_coefficients(sched, grid.start()).sigma;
    StandardNormal<Scalar> normal;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] += sigma * normal(rng);
    }
  }
  if (config.record) {
    trace.states.push_back(x);
  }

  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double r = grid.step_from(k);
    const double t = grid.step_to(k);
    Vector<Scalar> s_hat = predictor(x, y, r);
    if (s_hat.size() != y.size()) {
      throw std::invalid_argument(
          "sample: predictor returned length " + std::to_string(s_hat.size()) +
          ", expected " + std::to_string(y.size()) + " at step " +
          std::to_string(k + 1));
    }
    x = step<Scalar>(config.method, sched, x, s_hat, y, r, t, config.g, rng);
    if (!x.allFinite()) {
      throw std::runtime_error("sample: non-finite state at step " +
                               std::to_string(k + 1) + " (t = " +
                               std::to_string(t) + ")");
    }
    if (config.record) {
      trace.predictions.push_back(std::move(s_hat));
      trace.states.push_back(x);
    }
  }
  trace.final = std::move(x);
  return trace;
}

std::string to_string(StepMethod method) {
  switch (method) {
  case StepMethod::euler_ode:
    return "euler_ode";
  case StepMethod::euler_maruyama:
    return "euler_maruyama";
  case StepMethod::exponential:
    return "exponential";
  }
  return "unknown";
}

StepMethod parse_step_method(std::string_view name) {
  std::string key;
  for (char ch : name) {
    key.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(
                                        static_cast<unsigned char>(ch))));
  }
  for (auto m : {StepMethod::euler_ode, StepMethod::euler_maruyama,
                 StepMethod::exponential}) {
    if (to_string(m) == key) {
      return m;
    }
  }
  throw std::invalid_argument("unknown step method '" + std::string(name) +
                              "'");
}

#define BRIDGEKIT_INSTANTIATE_SAMPLER(Scalar)                                  \
  template Vector<Scalar> step<Scalar>(                                        \
      StepMethod, const Schedule &, const Vector<Scalar> &,                    \
      const Vector<Scalar> &, const Vector<Scalar> &, double, double, double,  \
      Philox4x32 &);                                                           \
  template SampleTrace<Scalar> sample<Scalar>(                                 \
      const Schedule &, const Vector<Scalar> &, const PredictorFn<Scalar> &,   \
      const TimeGrid &, const SamplerConfig &, Philox4x32 &);

BRIDGEKIT_INSTANTIATE_SAMPLER(double)
BRIDGEKIT_INSTANTIATE_SAMPLER(Complex)

#undef BRIDGEKIT_INSTANTIATE_SAMPLER

} // namespace bridgekit
