#include "bridgekit/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "bridgekit/composition.hpp"
#include "bridgekit/dynamics.hpp"
#include "bridgekit/expint.hpp"
#include "bridgekit/quadrature.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {
namespace {

// Length of the first step out of the Dirac point (kept above the interior
// guard), and the cap on any step relative to the elapsed time.
constexpr double kFirstStep = 10.0 * kDiracGuard;
constexpr double kGrading = 0.01;
constexpr std::size_t kChunk = 256;

struct MeshStep {
  double h = 0.0;
  double kappa = 0.0;
  double noise = 0.0; // g sqrt(h)
  CVector forcing;    // (m s + n y)
  int checkpoint = -1; // index of the checkpoint reached at the end, if any
};

// times must be sorted and unique; mesh steps ending on times[i] carry i.
std::vector<MeshStep> build_mesh(const Schedule &sched, const CVector &s,
                                 const CVector &y, double g_scale,
                                 const std::vector<double> &times, double dt) {
  std::vector<MeshStep> mesh;
  double t = 0.0;
  std::size_t next = 0;
  while (next < times.size()) {
    double h = t == 0.0 ? std::min(dt, kFirstStep) : std::min(dt, kGrading * t);
    int hit = -1;
    if (t + h >= times[next] * (1.0 - 1e-12)) {
      h = times[next] - t;
      hit = static_cast<int>(next);
    }

    MeshStep st;
    st.h = h;
    const double g = g_scale * std::sqrt(aux_gtilde_sq(sched, t));
    if (t == 0.0) {
      // The state is still pinned to s; only the mean velocity survives.
      const PathCoefficients p = eval_coefficients(sched, 0.0);
      st.forcing = p.da * s + p.db * y;
    } else {
      const DriftSpec d = drift_spec(sched, t, g, DriftDirection::forward);
      st.kappa = d.state_coeff;
      st.forcing = d.s_coeff * s + d.y_coeff * y;
    }
    st.noise = g * std::sqrt(h);
    st.checkpoint = hit;
    mesh.push_back(std::move(st));

    if (hit >= 0) {
      t = times[next++];
    } else {
      t += h;
    }
  }
  return mesh;
}

double uniform(std::mt19937_64 &gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

// |unified - original| over the size of the terms that produced it.
double relative_residual(double unified, double original, double scale) {
  return std::abs(unified - original) / std::max(scale, 1e-300);
}

double sb_rho_sq(const Schedule &sched, double t) {
  if (sched.kind() == ScheduleKind::SBVE) {
    const double c = sched.param("c");
    const double k = sched.param("k");
    return c * (std::pow(k, 2.0 * t) - 1.0) / (2.0 * std::log(k));
  }
  const double sigma = sched.param("sigma");
  return sigma * sigma * t;
}

double sb_g_sq(const Schedule &sched, double t) {
  if (sched.kind() == ScheduleKind::SBVE) {
    return sched.param("c") * std::pow(sched.param("k"), 2.0 * t);
  }
  const double sigma = sched.param("sigma");
  return sigma * sigma;
}

nlohmann::ordered_json complex_to_json(const CVector &v) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back({v[i].real(), v[i].imag()});
  }
  return arr;
}

} // namespace

int thread_budget() {
  if (const char *env = std::getenv("BRIDGEKIT_THREADS")) {
    char *end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) {
      return static_cast<int>(std::min<long>(n, 1024));
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<MarginalStats>
mc_forward_marginals(const Schedule &sched, const CVector &s, const CVector &y,
                     double g_scale, const std::vector<double> &checkpoints,
                     std::size_t n_trajectories, double dt, std::uint64_t seed,
                     int threads) {
  detail::require_same_length(s, y, "mc_forward_marginals");
  if (n_trajectories < 100) {
    throw std::invalid_argument("mc_forward_marginals: need at least 100 "
                                "trajectories");
  }
  if (!(dt > 0.0 && dt <= 1e-2)) {
    throw std::invalid_argument("mc_forward_marginals: dt must be in (0, 1e-2]");
  }
  if (!(g_scale >= 0.0) || !std::isfinite(g_scale)) {
    throw std::invalid_argument("mc_forward_marginals: g_scale must be >= 0");
  }
  if (sched.direction() != Direction::clean_at_t0 ||
      !sched.is_dirac_endpoint(0.0)) {
    throw std::invalid_argument("mc_forward_marginals: needs a schedule with a "
                                "clean Dirac endpoint at t = 0");
  }
  if (checkpoints.empty()) {
    throw std::invalid_argument("mc_forward_marginals: no checkpoints");
  }
  for (double t : checkpoints) {
    if (!(t > 0.0 && t < 1.0) || sched.is_dirac_endpoint(t)) {
      throw std::domain_error("mc_forward_marginals: checkpoint " +
                              std::to_string(t) + " is at a singular endpoint");
    }
  }

  std::vector<double> times = checkpoints;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto mesh = build_mesh(sched, s, y, g_scale, times, dt);
  const Eigen::Index dim = s.size();
  const std::size_t n_cp = checkpoints.size();
  const auto M = static_cast<Eigen::Index>(n_trajectories);

  // samples[c] is dim x M; filled column by column, reduced afterwards in a
  // fixed order so the result does not depend on scheduling.
  std::vector<Eigen::MatrixXcd> samples(times.size(),
                                        Eigen::MatrixXcd(dim, M));

  auto run_trajectory = [&](std::size_t i) {
    Philox4x32 rng(seed, i);
    StandardNormal<Complex> normal;
    CVector x = s;
    for (const MeshStep &st : mesh) {
      x += st.h * (st.kappa * x + st.forcing);
      if (st.noise > 0.0) {
        for (Eigen::Index j = 0; j < dim; ++j) {
          x[j] += st.noise * normal(rng);
        }
      }
      if (st.checkpoint >= 0) {
        samples[st.checkpoint].col(static_cast<Eigen::Index>(i)) = x;
      }
    }
  };

  const std::size_t n_chunks = (n_trajectories + kChunk - 1) / kChunk;
  const int budget = threads > 0 ? threads : thread_budget();
  const auto n_workers = static_cast<std::size_t>(
      std::clamp<std::size_t>(budget, 1, n_chunks));
  std::atomic<std::size_t> next_chunk{0};
  auto worker = [&] {
    for (std::size_t c = next_chunk++; c < n_chunks; c = next_chunk++) {
      const std::size_t end = std::min(n_trajectories, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        run_trajectory(i);
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto &th : pool) {
      th.join();
    }
  }

  std::vector<MarginalStats> out;
  out.reserve(n_cp);
  for (std::size_t c = 0; c < n_cp; ++c) {
    const auto where = std::lower_bound(times.begin(), times.end(),
                                        checkpoints[c]) - times.begin();
    const Eigen::MatrixXcd &X = samples[where];
    CVector mean = CVector::Zero(dim);
    for (Eigen::Index i = 0; i < M; ++i) {
      mean += X.col(i);
    }
    mean /= static_cast<double>(M);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < M; ++i) {
      ss += (X.col(i) - mean).squaredNorm();
    }
    const auto m = marginal(sched, s, y, checkpoints[c]);
    MarginalStats st;
    st.t = checkpoints[c];
    st.empirical_mean = mean;
    st.empirical_std =
        std::sqrt(ss / (2.0 * static_cast<double>(dim) * (M - 1)));
    st.expected_mean = m.mean;
    st.expected_std = m.sigma;
    st.n_trajectories = n_trajectories;
    out.push_back(std::move(st));
  }
  return out;
}

bool marginal_within_tolerance(const MarginalStats &stats, double mean_sigmas,
                               double std_rel) {
  const double bound = mean_sigmas * stats.expected_std /
                       std::sqrt(static_cast<double>(stats.n_trajectories));
  for (Eigen::Index j = 0; j < stats.empirical_mean.size(); ++j) {
    const Complex d = stats.empirical_mean[j] - stats.expected_mean[j];
    if (!(std::abs(d.real()) <= bound) || !(std::abs(d.imag()) <= bound)) {
      return false;
    }
  }
  return std::abs(stats.empirical_std - stats.expected_std) <=
         std_rel * stats.expected_std;
}

EquivalenceReport drift_equivalence_residual(EquivalenceFamily family,
                                             std::size_t n_points,
                                             std::uint64_t seed) {
  if (n_points < 1) {
    throw std::invalid_argument("drift_equivalence_residual: n_points >= 1");
  }
  if (family == EquivalenceFamily::OTCFM_EULER) {
    return otcfm_equivalence_residual(0.05, 0.5, n_points, seed);
  }
  std::mt19937_64 gen(seed);
  EquivalenceReport report;
  report.family = family;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = uniform(gen, 0.01, 0.99);
    const double x = uniform(gen, -3.0, 3.0);
    const double s = uniform(gen, -3.0, 3.0);
    const double y = uniform(gen, -3.0, 3.0);

    Schedule sched;
    double original = 0.0;
    double original_scale = 0.0;
    switch (family) {
    case EquivalenceFamily::OUVE: {
      const double gamma = uniform(gen, 0.5, 2.0);
      const double c = uniform(gen, 0.05, 1.0);
      const double k = uniform(gen, 1.5, 20.0);
      sched = make_schedule(ScheduleKind::OUVE,
                            {{"gamma", gamma}, {"c", c}, {"k", k}});
      const double e = std::exp(-gamma * t);
      const double mu = e * s + (1.0 - e) * y;
      const double var = c * (std::pow(k, 2.0 * t) - e * e) /
                         (2.0 * (gamma + std::log(k)));
      const double g_sq = c * std::pow(k, 2.0 * t);
      const double sc = -(x - mu) / var;
      original = gamma * (y - x) - 0.5 * g_sq * sc;
      original_scale = gamma * std::abs(y - x) + 0.5 * g_sq * std::abs(sc);
      break;
    }
    case EquivalenceFamily::BBED: {
      const double c = uniform(gen, 0.05, 1.0);
      const double k = uniform(gen, 1.5, 20.0);
      sched = make_schedule(ScheduleKind::BBED, {{"c", c}, {"k", k}});
      const double mu = (1.0 - t) * s + t * y;
      const double var = eval_coefficients(sched, t).variance;
      const double g_sq = c * std::pow(k, 2.0 * t);
      const double sc = -(x - mu) / var;
      original = (y - x) / (1.0 - t) - 0.5 * g_sq * sc;
      original_scale = std::abs(y - x) / (1.0 - t) + 0.5 * g_sq * std::abs(sc);
      break;
    }
    case EquivalenceFamily::SB: {
      if (i % 2 == 0) {
        sched = make_schedule(ScheduleKind::SBVE,
                              {{"c", uniform(gen, 0.05, 1.0)},
                               {"k", uniform(gen, 1.5, 20.0)}});
      } else {
        sched = make_schedule(ScheduleKind::SB_CFM,
                              {{"sigma", uniform(gen, 0.1, 3.0)}});
      }
      const double rho_sq = sb_rho_sq(sched, t);
      const double rho_bar_sq = sb_rho_sq(sched, 1.0) - rho_sq;
      const double g_sq = sb_g_sq(sched, t);
      const double to_y = -0.5 * g_sq * (x - y) / rho_bar_sq;
      const double to_s = 0.5 * g_sq * (x - s) / rho_sq;
      original = to_y + to_s;
      original_scale = std::abs(to_y) + std::abs(to_s);
      break;
    }
    case EquivalenceFamily::OTCFM_EULER:
      break;
    }

    const DriftSpec d = drift_spec(sched, t, 0.0, DriftDirection::ode);
    const double unified = d.state_coeff * x + d.s_coeff * s + d.y_coeff * y;
    const double scale =
        std::max(std::abs(d.state_coeff * x) + std::abs(d.s_coeff * s) +
                     std::abs(d.y_coeff * y),
                 original_scale);
    report.max_residual = std::max(report.max_residual,
                                   relative_residual(unified, original, scale));
    ++report.points_tested;
  }
  return report;
}

StepCoefficients coeff_quadrature_oracle(const Schedule &sched, double t,
                                         double r, int n_nodes) {
  if (n_nodes < 16) {
    throw std::invalid_argument("coeff_quadrature_oracle: n_nodes >= 16");
  }
  if (t == r) {
    return {1.0, 0.0, 0.0};
  }
  const PathCoefficients pt = interior_coefficients(sched, t);
  const PathCoefficients pr = interior_coefficients(sched, r);
  (void)pr;
  const auto m_over_sigma = [&sched](double tau) {
    const PathCoefficients p = eval_coefficients(sched, tau);
    const double log_rate = p.dsigma / p.sigma;
    return (p.da - p.a * log_rate) / p.sigma;
  };
  const auto n_over_sigma = [&sched](double tau) {
    const PathCoefficients p = eval_coefficients(sched, tau);
    const double log_rate = p.dsigma / p.sigma;
    return (p.db - p.b * log_rate) / p.sigma;
  };
  constexpr double tol = 1e-10;
  StepCoefficients out;
  out.xi = pt.sigma / pr.sigma;
  out.eta = pt.sigma * integrate_adaptive(m_over_sigma, r, t, n_nodes, tol);
  out.zeta = pt.sigma * integrate_adaptive(n_over_sigma, r, t, n_nodes, tol);
  return out;
}

EquivalenceReport otcfm_equivalence_residual(double sigma_min,
                                             double sigma_max,
                                             std::size_t n_steps,
                                             std::uint64_t seed) {
  const Schedule sched = make_schedule(
      ScheduleKind::OT_CFM, {{"sigma_min", sigma_min}, {"sigma_max", sigma_max}});
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Philox4x32 unused;
  EquivalenceReport report;
  report.family = EquivalenceFamily::OTCFM_EULER;
  constexpr Eigen::Index dim = 4;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double r = uniform(gen, 0.0, 1.0);
    const double t = uniform(gen, 0.0, 1.0);
    CVector x(dim), s(dim), y(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      x[j] = {normal(gen), normal(gen)};
      s[j] = {normal(gen), normal(gen)};
      y[j] = {normal(gen), normal(gen)};
    }
    const CVector expo =
        step<Complex>(StepMethod::exponential, sched, x, s, y, r, t, 0.0, unused);
    const CVector euler =
        step<Complex>(StepMethod::euler_ode, sched, x, s, y, r, t, 0.0, unused);
    report.max_residual =
        std::max(report.max_residual, (expo - euler).cwiseAbs().maxCoeff());
    ++report.points_tested;
  }
  return report;
}

std::string to_string(EquivalenceFamily family) {
  switch (family) {
  case EquivalenceFamily::OUVE:
    return "ouve";
  case EquivalenceFamily::BBED:
    return "bbed";
  case EquivalenceFamily::SB:
    return "sb";
  case EquivalenceFamily::OTCFM_EULER:
    return "otcfm_euler";
  }
  return "unknown";
}

nlohmann::ordered_json to_json(const MarginalStats &stats) {
  nlohmann::ordered_json j;
  j["t"] = stats.t;
  j["empirical_mean"] = complex_to_json(stats.empirical_mean);
  j["expected_mean"] = complex_to_json(stats.expected_mean);
  j["empirical_std"] = stats.empirical_std;
  j["expected_std"] = stats.expected_std;
  j["n_trajectories"] = stats.n_trajectories;
  return j;
}

nlohmann::ordered_json to_json(const CheckResult &result) {
  nlohmann::ordered_json j;
  j["check"] = result.check;
  j["residual_or_stats"] = result.residual_or_stats;
  j["tolerance"] = result.tolerance;
  j["pass"] = result.pass;
  return j;
}

namespace {

CheckResult residual_check(std::string name, double residual, double tol) {
  return {std::move(name), residual, tol, residual <= tol};
}

double max_relative_error(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;

  {
    double worst = 0.0;
    const double lo = std::log(1e-3);
    const double hi = std::log(20.0);
    for (int i = 0; i < 100; ++i) {
      const double x = -std::exp(lo + (hi - lo) * i / 99.0);
      worst = std::max(worst,
                       max_relative_error(expint_ei(x), expint_ei_quadrature(x)));
    }
    out.push_back(residual_check("ei_vs_quadrature", worst, 1e-9));
  }

  for (auto family : {EquivalenceFamily::OUVE, EquivalenceFamily::BBED,
                      EquivalenceFamily::SB}) {
    const auto rep = drift_equivalence_residual(family, 1000, seed);
    out.push_back(residual_check("drift_equivalence_" + to_string(family),
                                 rep.max_residual, 1e-10));
  }
  out.push_back(residual_check(
      "otcfm_exponential_vs_euler",
      otcfm_equivalence_residual(0.05, 0.5, 1000, seed).max_residual, 1e-12));

  {
    const std::vector<Schedule> scheds = {
        make_schedule(ScheduleKind::SBVE, {{"c", 0.4}, {"k", 2.6}}),
        make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}})};
    std::mt19937_64 gen(seed);
    for (const Schedule &sched : scheds) {
      double worst = 0.0;
      for (int i = 0; i < 50; ++i) {
        double t = uniform(gen, 0.01, 0.99);
        double r = uniform(gen, 0.01, 0.99);
        if (t > r) {
          std::swap(t, r);
        }
        const auto exact = expint_coeffs(sched, t, r);
        const auto quad = coeff_quadrature_oracle(sched, t, r);
        worst = std::max({worst, max_relative_error(exact.xi, quad.xi),
                          max_relative_error(exact.eta, quad.eta),
                          max_relative_error(exact.zeta, quad.zeta)});
      }
      out.push_back(residual_check(
          "coeff_quadrature_" + to_string(sched.kind()), worst, 1e-8));
    }
  }

  {
    const Schedule sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
    CVector s(2), y(2);
    s << Complex(1.0, 0.5), Complex(-0.5, 0.0);
    y << Complex(0.0, -1.0), Complex(2.0, 0.25);
    int which = 0;
    for (double g_scale : {0.5, 1.0}) {
      const auto stats = mc_forward_marginals(sched, s, y, g_scale,
                                              {0.25, 0.5, 0.75}, 20000, 1e-3,
                                              seed + 1000 * ++which);
      bool pass = true;
      nlohmann::ordered_json detail = nlohmann::ordered_json::array();
      for (const auto &st : stats) {
        pass = pass && marginal_within_tolerance(st);
        detail.push_back(to_json(st));
      }
      out.push_back({"mc_marginals_g_scale_" + format_double(g_scale), detail,
                     0.05, pass});
    }
  }

  {
    const Schedule sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
    const TimeGrid grid = sampling_grid(sched, 10);
    const auto closed = weights_closed_form_sb(sched, grid);
    const auto coeffs =
        grid_step_coefficients(sched, grid, StepMethod::exponential);
    const auto rec = weights_from_coeffs(coeffs);
    out.push_back(residual_check("weights_wy_closed_form",
                                 std::abs(closed.w_y - 1e-4) / 1e-4, 1e-12));
    out.push_back(residual_check("weights_wy_recursion",
                                 std::abs(rec.w_y - closed.w_y), 1e-10));
    double worst = 0.0;
    for (std::size_t n = 0; n < closed.w.size(); ++n) {
      worst = std::max(worst, std::abs(closed.w[n] - rec.w[n]));
    }
    out.push_back(residual_check("weights_closed_form_vs_recursion", worst,
                                 1e-10));
    out.push_back({"weights_last_call_share", closed.w.front(), 0.95,
                   closed.w.front() >= 0.95});
  }

  {
    const std::vector<Schedule> scheds = {
        make_schedule(ScheduleKind::SBVE, {{"c", 0.4}, {"k", 2.6}}),
        make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}})};
    double worst = 0.0;
    for (const Schedule &sched : scheds) {
      for (int n : {1, 2, 5, 10, 64}) {
        const auto grid = sampling_grid(sched, n);
        const auto rec = weights_from_coeffs(
            grid_step_coefficients(sched, grid, StepMethod::exponential));
        const auto clean = sched.sb_terms(grid.points.front());
        const auto noisy = sched.sb_terms(grid.points.back());
        const double telescoped =
            clean.alpha * (1.0 - clean.rho_sq / noisy.rho_sq);
        worst = std::max({worst, std::abs(rec.sum() + rec.w_y - 1.0),
                          std::abs(rec.sum() - telescoped)});
      }
    }
    out.push_back(residual_check("weights_unit_sum", worst, 1e-9));
  }

  {
    const Schedule sched = make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}});
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    CVector s(8), y(8);
    for (Eigen::Index j = 0; j < 8; ++j) {
      s[j] = {normal(gen), normal(gen)};
      y[j] = {normal(gen), normal(gen)};
    }
    const Predictor oracle = [&s](const CVector &, const CVector &, double) {
      return s;
    };
    double worst = 0.0;
    for (int n : {1, 5, 10}) {
      Philox4x32 rng(seed);
      const auto grid = sampling_grid(sched, n);
      const auto trace = sample<Complex>(sched, y, oracle, grid, {}, rng);
      const CVector expected = (1.0 - grid.points.front()) * s +
                               grid.points.front() * y;
      worst = std::max(worst, (trace.final - expected).cwiseAbs().maxCoeff());
    }
    out.push_back(residual_check("oracle_predictor_exactness", worst, 1e-9));
  }

  return out;
}

} // namespace bridgekit
