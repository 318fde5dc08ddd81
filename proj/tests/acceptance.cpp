// Acceptance run: one PASS/FAIL line per criterion, tolerances and runtime
// limits pinned below. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bridgekit/composition.hpp"
#include "bridgekit/expint.hpp"
#include "bridgekit/metrics.hpp"
#include "bridgekit/predictors.hpp"
#include "bridgekit/quadrature.hpp"
#include "bridgekit/sampler.hpp"
#include "bridgekit/signal.hpp"
#include "bridgekit/stft.hpp"
#include "bridgekit/verification.hpp"

using namespace bridgekit;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char *name;
  double limit_s;
  std::function<Outcome()> body;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Schedule sb_cfm() { return make_schedule(ScheduleKind::SB_CFM, {{"sigma", 1.0}}); }
Schedule sbve() { return make_schedule(ScheduleKind::SBVE, {{"c", 0.4}, {"k", 2.6}}); }

WeightProfile recursion(const Schedule &sched, const TimeGrid &grid) {
  return weights_from_coeffs(grid_step_coefficients(sched, grid, StepMethod::exponential));
}

CVector random_cvector(std::mt19937_64 &gen, Eigen::Index n) {
  std::normal_distribution<double> normal;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = {normal(gen), normal(gen)};
  }
  return v;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

Outcome wy_reproduction() {
  const auto grid = make_grid(1e-4, 1.0, 10);
  const auto closed = weights_closed_form_sb(sb_cfm(), grid);
  const auto rec = recursion(sb_cfm(), grid);
  const double e_closed = std::abs(closed.w_y - 1e-4) / 1e-4;
  const double e_rec = std::abs(rec.w_y - closed.w_y);
  return {e_closed <= 1e-12 && e_rec <= 1e-10,
          "closed w_y=" + format_double(closed.w_y) + " rel err " + fmt("%.2e", e_closed) +
              ", recursion diff " + fmt("%.2e", e_rec)};
}

Outcome unit_sum() {
  double worst_sum = 0.0, worst_tel = 0.0;
  for (const auto &sched : {sb_cfm(), sbve()}) {
    for (int n : {1, 2, 5, 10, 64}) {
      const auto grid = sampling_grid(sched, n);
      const auto w = recursion(sched, grid);
      const auto clean = sched.sb_terms(grid.points.front());
      const auto noisy = sched.sb_terms(grid.points.back());
      worst_sum = std::max(worst_sum, std::abs(w.sum() + w.w_y - 1.0));
      worst_tel = std::max(worst_tel, std::abs(w.sum() - clean.alpha *
                                                             (1.0 - clean.rho_sq / noisy.rho_sq)));
    }
  }
  return {worst_sum <= 1e-9 && worst_tel <= 1e-9,
          "max |sum - 1| " + fmt("%.2e", worst_sum) + ", max telescoping err " +
              fmt("%.2e", worst_tel)};
}

Outcome last_step_dominance() {
  const auto grid = make_grid(1e-4, 1.0, 10);
  const auto closed = weights_closed_form_sb(sb_cfm(), grid);
  const auto rec = recursion(sb_cfm(), grid);
  double worst = 0.0;
  for (std::size_t n = 0; n < closed.w.size(); ++n) {
    worst = std::max(worst, std::abs(closed.w[n] - rec.w[n]));
  }
  std::string violations;
  for (std::size_t n = 0; n + 1 < closed.w.size(); ++n) {
    if (!(closed.w[n] > closed.w[n + 1])) {
      violations += " w_" + std::to_string(n + 1) + "=" + fmt("%.6g", closed.w[n]) +
                    " <= w_" + std::to_string(n + 2) + "=" + fmt("%.6g", closed.w[n + 1]) + ";";
    }
  }
  const bool dominant = closed.w[0] >= 0.95;
  const bool oracle = worst <= 1e-10;
  return {dominant && oracle && violations.empty(),
          "w_1=" + fmt("%.6f", closed.w[0]) + (dominant ? " (>= 0.95)" : " (< 0.95)") +
              ", recursion diff " + fmt("%.2e", worst) + ", strict decrease " +
              (violations.empty() ? "holds" : "violated:" + violations)};
}

Outcome drift_equivalences() {
  std::string detail;
  bool pass = true;
  for (auto f : {EquivalenceFamily::OUVE, EquivalenceFamily::BBED, EquivalenceFamily::SB}) {
    const auto rep = drift_equivalence_residual(f, 1000, 2024);
    pass = pass && rep.points_tested == 1000 && rep.max_residual <= 1e-10;
    detail += to_string(f) + " " + fmt("%.2e", rep.max_residual) + " ";
  }
  return {pass, detail + "(relative, 1000 points each)"};
}

Outcome otcfm_identity() {
  const auto rep = otcfm_equivalence_residual(0.05, 0.5, 1000, 2024);
  return {rep.max_residual <= 1e-12, "max |exp - euler| " + fmt("%.2e", rep.max_residual)};
}

Outcome coefficient_oracle() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  std::string detail;
  bool pass = true;
  for (const auto &sched : {sbve(), sb_cfm()}) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      double t = unit(gen), r = unit(gen);
      if (t > r) {
        std::swap(t, r);
      }
      const auto e = expint_coeffs(sched, t, r);
      const auto q = coeff_quadrature_oracle(sched, t, r);
      worst = std::max({worst, rel_err(e.xi, q.xi), rel_err(e.eta, q.eta),
                        rel_err(e.zeta, q.zeta)});
    }
    pass = pass && worst <= 1e-8;
    detail += to_string(sched.kind()) + " " + fmt("%.2e", worst) + " ";
  }
  return {pass, detail + "(max relative, 50 pairs each)"};
}

Outcome fokker_planck() {
  CVector s(2), y(2);
  s << Complex(1.0, 0.5), Complex(-0.5, 0.0);
  y << Complex(0.0, -1.0), Complex(2.0, 0.25);
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 101;
  for (double g : {0.5, 1.0}) {
    const auto stats =
        mc_forward_marginals(sb_cfm(), s, y, g, {0.25, 0.5, 0.75}, 20000, 1e-3, seed++);
    double worst_mean = 0.0, worst_std = 0.0;
    for (const auto &st : stats) {
      pass = pass && marginal_within_tolerance(st, 5.0, 0.05);
      const double bound = st.expected_std / std::sqrt(20000.0);
      for (Eigen::Index j = 0; j < st.empirical_mean.size(); ++j) {
        const Complex d = st.empirical_mean[j] - st.expected_mean[j];
        worst_mean = std::max({worst_mean, std::abs(d.real()) / bound, std::abs(d.imag()) / bound});
      }
      worst_std = std::max(worst_std, std::abs(st.empirical_std / st.expected_std - 1.0));
    }
    detail += "g_scale " + fmt("%.1f", g) + ": mean dev " + fmt("%.2f", worst_mean) +
              " sigma/sqrt(M), std dev " + fmt("%.2f", 100.0 * worst_std) + "%; ";
  }
  return {pass, detail};
}

Outcome oracle_exactness() {
  std::mt19937_64 gen(7);
  const CVector s = random_cvector(gen, 16), y = random_cvector(gen, 16);
  const Predictor oracle = [&s](const CVector &, const CVector &, double) { return s; };
  double worst = 0.0;
  for (int n : {1, 5, 10}) {
    Philox4x32 rng(1);
    const auto trace = sample<Complex>(sb_cfm(), y, oracle, make_grid(1e-4, 1.0, n), {}, rng);
    worst = std::max(worst, (trace.final - ((1.0 - 1e-4) * s + 1e-4 * y)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max deviation " + fmt("%.2e", worst)};
}

Outcome recomposition() {
  std::mt19937_64 gen(8);
  const CVector s = random_cvector(gen, 16), y = random_cvector(gen, 16);
  const CVector shift = random_cvector(gen, 16);
  const std::vector<Predictor> predictors = {
      [&](const CVector &, const CVector &, double) { return s; },
      [&](const CVector &x, const CVector &yy, double t) {
        return (0.6 * x + 0.3 * yy + t * shift).eval();
      },
      [&](const CVector &x, const CVector &, double t) {
        return (x.array() * std::cos(5.0 * t) + s.array() * t).matrix().eval();
      }};
  double worst = 0.0;
  const auto grid = make_grid(1e-4, 1.0, 10);
  const auto weights = weights_closed_form_sb(sb_cfm(), grid);
  for (const auto &p : predictors) {
    Philox4x32 rng(2);
    SamplerConfig cfg;
    cfg.record = true;
    const auto trace = sample<Complex>(sb_cfm(), y, p, grid, cfg, rng);
    const CVector out = compose_output<Complex>(weights, trace.weight_ordered_predictions(), y);
    worst = std::max(worst, (out - trace.final).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max deviation over 3 predictors " + fmt("%.2e", worst)};
}

Outcome ei_accuracy() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = -std::exp(std::log(1e-3) + (std::log(20.0) - std::log(1e-3)) * i / 99.0);
    worst = std::max(worst, rel_err(expint_ei(x), expint_ei_quadrature(x)));
  }
  return {worst <= 1e-9, "max relative error " + fmt("%.2e", worst)};
}

Outcome stft_round_trip() {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal;
  RVector x(16000);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = normal(gen);
  }
  const auto spec = stft(x);
  const double err = (istft(spec) - x).norm() / x.norm();
  const bool config = spec.config.window_length == 512 && spec.config.hop == 256 &&
                      spec.config.n_fft == 512 && spec.window == "sqrt_hann";
  return {err <= 1e-10 && config, "relative error " + fmt("%.2e", err) +
                                      " (512 window, 256 hop, 512 FFT, sqrt-Hann)"};
}

Outcome si_snr_properties() {
  std::mt19937_64 gen(10);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  const auto draw = [&](Eigen::Index n) {
    RVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = normal(gen);
    }
    return v;
  };
  double worst_scale = 0.0;
  for (int i = 0; i < 100; ++i) {
    const RVector x = draw(1000);
    const RVector est = x + 0.5 * draw(1000);
    worst_scale = std::max(worst_scale,
                           std::abs(si_snr_db(scale(gen) * est, x) - si_snr_db(est, x)));
  }
  const RVector x = draw(1000);
  RVector n = draw(1000);
  n -= (n.dot(x) / x.squaredNorm()) * x;
  n *= std::sqrt(x.squaredNorm() / 100.0) / n.norm();
  const double ortho = std::abs(si_snr_db(x + n, x) - 20.0);
  return {worst_scale <= 1e-9 && ortho <= 1e-6, "scale invariance " + fmt("%.2e", worst_scale) +
                                                    " dB, orthogonal case off by " +
                                                    fmt("%.2e", ortho) + " dB"};
}

Outcome toy_enhancement() {
  int improved = 0;
  double smallest_gain = INFINITY;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthSpec spec;
    spec.snr_db = 0.0;
    const auto pair = synth_pair(spec, 1000 + seed);
    const auto predictor = make_predictor(PredictorKind::wiener, {}, pair);
    Philox4x32 rng(seed);
    const auto trace = sample<Complex>(sb_cfm(), to_complex(pair.y), predictor,
                                       make_grid(1e-4, 1.0, 5), {}, rng);
    const double in = si_snr_db(pair.y, pair.s);
    const double out = si_snr_db(real_part(trace.final), pair.s);
    improved += out > in;
    smallest_gain = std::min(smallest_gain, out - in);
  }
  return {improved == 20, std::to_string(improved) + "/20 pairs improved, smallest gain " +
                              fmt("%.2f", smallest_gain) + " dB"};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "w_y reproduction", 1.0, wy_reproduction},
      {2, "weight unit sum", 1.0, unit_sum},
      {3, "last-step dominance", 1.0, last_step_dominance},
      {4, "drift equivalences", 5.0, drift_equivalences},
      {5, "OT-CFM integrator identity", 1.0, otcfm_identity},
      {6, "coefficient oracle agreement", 10.0, coefficient_oracle},
      {7, "Fokker-Planck marginal invariance", 60.0, fokker_planck},
      {8, "oracle-predictor exactness", 1.0, oracle_exactness},
      {9, "recomposition identity", 1.0, recomposition},
      {10, "Ei accuracy", 5.0, ei_accuracy},
      {11, "STFT round trip", 1.0, stft_round_trip},
      {12, "SI-SNR properties", 1.0, si_snr_properties},
      {13, "toy enhancement improvement", 30.0, toy_enhancement},
  };

  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s [%.3f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), elapsed, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
