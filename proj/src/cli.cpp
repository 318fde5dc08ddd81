#include "bridgekit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "bridgekit/composition.hpp"
#include "bridgekit/metrics.hpp"
#include "bridgekit/predictors.hpp"
#include "bridgekit/sampler.hpp"
#include "bridgekit/schedule.hpp"
#include "bridgekit/signal.hpp"
#include "bridgekit/verification.hpp"
#include "bridgekit/wav.hpp"

namespace bridgekit {
namespace {

using ordered_json = nlohmann::ordered_json;

// Thrown for bad user input that only shows up after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScheduleOptions {
  std::string kind;
  std::string json;
  std::optional<double> sigma, c, k, gamma, sigma_min, sigma_max;

  void attach(CLI::App *app) {
    app->add_option("--schedule", kind,
                    "ouve | bbed | sbve | ot-cfm | sb-cfm");
    app->add_option("--schedule-json", json,
                    "schedule as a JSON file or inline JSON object");
    app->add_option("--sigma", sigma, "SB-CFM sigma");
    app->add_option("--c", c, "VE diffusion scale c");
    app->add_option("--k", k, "VE diffusion base k (> 1)");
    app->add_option("--gamma", gamma, "OUVE stiffness");
    app->add_option("--sigma-min", sigma_min, "OT-CFM sigma at the clean end");
    app->add_option("--sigma-max", sigma_max, "OT-CFM sigma at the noisy end");
  }

  Schedule build(const char *fallback_kind = nullptr) const {
    if (!json.empty()) {
      if (!kind.empty()) {
        throw UsageError("give either --schedule or --schedule-json");
      }
      std::string text = json;
      if (!text.empty() && text.front() != '{') {
        std::ifstream in(text);
        if (!in) {
          throw UsageError("cannot read schedule file " + text);
        }
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
      }
      try {
        return schedule_from_json(nlohmann::json::parse(text));
      } catch (const nlohmann::json::exception &e) {
        throw UsageError(std::string("bad schedule JSON: ") + e.what());
      }
    }
    std::string name = kind;
    std::map<std::string, double> params;
    if (name.empty()) {
      if (!fallback_kind) {
        throw UsageError("--schedule is required");
      }
      name = fallback_kind;
      params["sigma"] = 1.0;
    }
    const std::pair<const char *, const std::optional<double> *> all[] = {
        {"sigma", &sigma},         {"c", &c},
        {"k", &k},                 {"gamma", &gamma},
        {"sigma_min", &sigma_min}, {"sigma_max", &sigma_max}};
    for (const auto &[key, value] : all) {
      if (value->has_value()) {
        params[key] = **value;
      }
    }
    return make_schedule(parse_schedule_kind(name), params);
  }
};

struct GridOptions {
  double t0 = 1e-4;
  double tN = 1.0;
  int steps = 5;

  void attach(CLI::App *app) {
    app->add_option("--t0", t0, "clean-end time")->capture_default_str();
    app->add_option("--tN", tN, "noisy-end time")->capture_default_str();
    app->add_option("--steps", steps, "number of sampler steps")
        ->capture_default_str();
  }

  TimeGrid build(const Schedule &sched) const {
    if (sched.direction() == Direction::clean_at_t0) {
      return sampling_grid(sched, steps, t0, tN);
    }
    // Clean end at t = 1: sample forward from 1 - tN up to 1 - t0.
    return sampling_grid(sched, steps, 1.0 - tN, 1.0 - t0);
  }
};

void write_text(const std::string &path, const std::string &text,
                std::ostream &out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot write " + path);
  }
  file << text;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (double v : values) {
    row += (first ? "" : ",") + format_double(v);
    first = false;
  }
  return row + "\n";
}

int cmd_schedule_dump(const ScheduleOptions &so, int points,
                      const std::string &format, const std::string &output,
                      std::ostream &out) {
  const Schedule sched = so.build();
  if (points < 2) {
    throw UsageError("--points must be at least 2");
  }
  std::vector<PathCoefficients> rows;
  std::vector<double> times;
  for (int i = 0; i < points; ++i) {
    const double t = i == points - 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    times.push_back(t);
    rows.push_back(eval_coefficients(sched, t));
  }
  if (format == "json") {
    ordered_json j;
    j["schedule"] = schedule_to_json(sched);
    j["direction"] = to_string(sched.direction());
    auto arr = ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto &p = rows[i];
      ordered_json r;
      r["t"] = times[i];
      r["a"] = p.a;
      r["b"] = p.b;
      r["sigma"] = p.sigma;
      r["da"] = p.da;
      r["db"] = p.db;
      // +-inf at Dirac endpoints has no JSON spelling; emit null.
      r["dsigma"] = std::isfinite(p.dsigma) ? ordered_json(p.dsigma)
                                            : ordered_json(nullptr);
      arr.push_back(r);
    }
    j["points"] = arr;
    write_text(output, j.dump(2) + "\n", out);
    return 0;
  }
  std::string csv = "t,a,b,sigma,da,db,dsigma\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &p = rows[i];
    csv += csv_row({times[i], p.a, p.b, p.sigma, p.da, p.db, p.dsigma});
  }
  write_text(output, csv, out);
  return 0;
}

WeightProfile profile_for(const Schedule &sched, const TimeGrid &grid,
                          StepMethod method) {
  if (method == StepMethod::exponential && sched.is_sb_family() &&
      grid.points.front() > 0.0) {
    return weights_closed_form_sb(sched, grid);
  }
  return weights_from_coeffs(grid_step_coefficients(sched, grid, method));
}

int cmd_weights(const ScheduleOptions &so, const GridOptions &go,
                const std::string &method_name, const std::string &output,
                const std::string &svg, std::ostream &out) {
  const Schedule sched = so.build();
  const TimeGrid grid = go.build(sched);
  const StepMethod method = parse_step_method(method_name);
  if (method == StepMethod::euler_maruyama) {
    throw UsageError("weights are defined for deterministic methods only");
  }
  const WeightProfile profile = profile_for(sched, grid, method);
  write_text(output, weights_to_csv(profile, grid), out);
  if (!svg.empty()) {
    write_text(svg, weights_to_svg(profile, grid), out);
  }
  return 0;
}

struct PairOptions {
  std::string clean;
  std::string noisy;
  double snr_db = 0.0;
  double duration = 1.0;
  std::string noise = "white";
  int tones = 5;

  void attach(CLI::App *app) {
    app->add_option("--clean", clean, "clean reference WAV (float32 mono)");
    app->add_option("--noisy", noisy, "noisy input WAV (float32 mono)");
    app->add_option("--snr", snr_db, "synthetic pair SNR in dB")
        ->capture_default_str();
    app->add_option("--duration", duration, "synthetic pair length in seconds")
        ->capture_default_str();
    app->add_option("--noise", noise, "white | pink")->capture_default_str();
    app->add_option("--tones", tones, "sinusoids in the synthetic clean signal")
        ->capture_default_str();
  }

  PairedSignal build(std::uint64_t seed) const {
    if (clean.empty() != noisy.empty()) {
      throw UsageError("--clean and --noisy go together");
    }
    if (!clean.empty()) {
      const WavData s = read_wav(clean);
      const WavData y = read_wav(noisy);
      if (s.samples.size() != y.samples.size() ||
          s.sample_rate != y.sample_rate) {
        throw UsageError("clean and noisy WAVs differ in length or rate");
      }
      PairedSignal pair;
      pair.s = s.samples;
      pair.y = y.samples;
      pair.sample_rate = s.sample_rate;
      pair.snr_db = mixing_snr_db(pair.s, pair.y);
      return pair;
    }
    SynthSpec spec;
    spec.snr_db = snr_db;
    spec.duration_s = duration;
    spec.noise_kind = parse_noise_kind(noise);
    spec.n_tones = tones;
    return synth_pair(spec, seed);
  }
};

ordered_json enhance_one(const Schedule &sched, const TimeGrid &grid,
                         const PairedSignal &pair, PredictorKind kind,
                         const PredictorParams &params,
                         const SamplerConfig &config, std::uint64_t seed,
                         RVector &enhanced) {
  const Predictor predictor = make_predictor(kind, params, pair);
  Philox4x32 rng(seed, 1);
  const auto trace =
      sample<Complex>(sched, to_complex(pair.y), predictor, grid, config, rng);
  enhanced = real_part(trace.final);
  ordered_json j;
  j["seed"] = seed;
  j["input_snr_db"] = pair.snr_db;
  j["input_si_snr_db"] = si_snr_db(pair.y, pair.s);
  j["output_si_snr_db"] = si_snr_db(enhanced, pair.s);
  const LossBreakdown loss = total_loss(enhanced, pair.s);
  j["loss"] = {{"sisnr_term", loss.sisnr_term},
               {"mag_term", loss.mag_term},
               {"ri_term", loss.ri_term},
               {"total", loss.total}};
  return j;
}

int cmd_sample(const ScheduleOptions &so, const GridOptions &go,
               const PairOptions &po, const std::string &method_name, double g,
               std::optional<std::uint64_t> seed, const std::string &predictor,
               double beta, bool init_noise, const std::string &output,
               std::ostream &out) {
  const Schedule sched = so.build();
  const TimeGrid grid = go.build(sched);
  SamplerConfig config;
  config.method = parse_step_method(method_name);
  config.g = g;
  config.init_noise = init_noise;
  const bool stochastic = config.method == StepMethod::euler_maruyama ||
                          init_noise || po.clean.empty();
  if (stochastic && !seed) {
    throw UsageError("--seed is required for this command");
  }
  const std::uint64_t s = seed.value_or(0);
  const PairedSignal pair = po.build(s);
  PredictorParams params;
  params.beta = beta;
  RVector enhanced;
  ordered_json j;
  j["schedule"] = schedule_to_json(sched);
  j["method"] = to_string(config.method);
  j["steps"] = grid.steps();
  j["result"] = enhance_one(sched, grid, pair, parse_predictor_kind(predictor),
                            params, config, s, enhanced);
  if (!output.empty()) {
    write_wav(output, enhanced, static_cast<int>(pair.sample_rate));
  }
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::string &output,
               std::ostream &out) {
  const auto results = run_verification_suite(seed);
  ordered_json report = ordered_json::array();
  bool all = true;
  for (const auto &r : results) {
    report.push_back(to_json(r));
    all = all && r.pass;
  }
  write_text(output, report.dump(2) + "\n", out);
  return all ? 0 : 1;
}

int cmd_demo(const ScheduleOptions &so, const GridOptions &go,
             const PairOptions &po, std::uint64_t seed, int pairs,
             const std::string &predictor, double beta,
             const std::string &output_dir, std::ostream &out) {
  if (pairs < 1) {
    throw UsageError("--pairs must be at least 1");
  }
  const Schedule sched = so.build("sb_cfm");
  const TimeGrid grid = go.build(sched);
  PredictorParams params;
  params.beta = beta;
  const PredictorKind kind = parse_predictor_kind(predictor);
  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);
  }
  for (int i = 0; i < pairs; ++i) {
    const std::uint64_t pair_seed = seed + static_cast<std::uint64_t>(i);
    const PairedSignal pair = po.build(pair_seed);
    RVector enhanced;
    const auto j = enhance_one(sched, grid, pair, kind, params, {}, pair_seed,
                               enhanced);
    out << "pair " << i << ": input SI-SNR "
        << format_double(j["input_si_snr_db"].get<double>())
        << " dB, output SI-SNR "
        << format_double(j["output_si_snr_db"].get<double>()) << " dB\n";
    if (!output_dir.empty()) {
      const auto dir = std::filesystem::path(output_dir);
      const std::string stem = "pair" + std::to_string(i);
      const int rate = static_cast<int>(pair.sample_rate);
      write_wav(dir / (stem + "_clean.wav"), pair.s, rate);
      write_wav(dir / (stem + "_noisy.wav"), pair.y, rate);
      write_wav(dir / (stem + "_enhanced.wav"), enhanced, rate);
      std::ofstream(dir / (stem + ".json")) << j.dump(2) << "\n";
    }
  }
  return 0;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Gaussian bridge schedules, samplers and weight analysis",
               "bridgekit"};
  app.require_subcommand(1);

  ScheduleOptions so;
  GridOptions go;
  PairOptions po;
  std::string output, svg, format = "csv", method = "exponential";
  std::string predictor = "wiener", output_dir;
  int points = 11;
  int pairs = 1;
  double g = 0.0;
  double beta = 0.5;
  bool init_noise = false;
  bool all = false;
  std::optional<std::uint64_t> seed;

  auto *dump = app.add_subcommand("schedule-dump",
                                  "tabulate a, b, sigma and derivatives");
  so.attach(dump);
  dump->add_option("--points", points, "number of time points")
      ->capture_default_str();
  dump->add_option("--format", format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  dump->add_option("-o,--output", output, "output file (default stdout)");

  auto *samp = app.add_subcommand("sample", "run a sampler on one pair");
  so.attach(samp);
  go.attach(samp);
  po.attach(samp);
  samp->add_option("--method", method,
                   "exponential | euler_ode | euler_maruyama")
      ->capture_default_str();
  samp->add_option("--g", g, "diffusion coefficient for euler_maruyama");
  samp->add_option("--seed", seed, "RNG seed");
  samp->add_option("--predictor", predictor, "oracle | blend | wiener")
      ->capture_default_str();
  samp->add_option("--beta", beta, "blend weight on the clean reference")
      ->capture_default_str();
  samp->add_flag("--init-noise", init_noise,
                 "add N(0, sigma^2) at the start (OUVE)");
  samp->add_option("-o,--output", output, "enhanced WAV output");

  auto *wts = app.add_subcommand("weights", "weights of each model call");
  so.attach(wts);
  go.attach(wts);
  wts->add_option("--method", method, "exponential | euler_ode")
      ->capture_default_str();
  wts->add_option("-o,--output", output, "CSV output (default stdout)");
  wts->add_option("--svg", svg, "also write an SVG chart");

  auto *ver = app.add_subcommand("verify", "run the verification suite");
  ver->add_flag("--all", all, "run every check")->required();
  ver->add_option("--seed", seed, "RNG seed")->required();
  ver->add_option("-o,--output", output, "JSON report (default stdout)");

  auto *demo = app.add_subcommand("demo", "toy enhancement on synthetic pairs");
  so.attach(demo);
  go.attach(demo);
  po.attach(demo);
  demo->add_option("--seed", seed, "RNG seed")->required();
  demo->add_option("--pairs", pairs, "number of pairs")->capture_default_str();
  demo->add_option("--predictor", predictor, "oracle | blend | wiener")
      ->capture_default_str();
  demo->add_option("--beta", beta, "blend weight on the clean reference")
      ->capture_default_str();
  demo->add_option("--output-dir", output_dir, "write WAV and JSON per pair");

  std::vector<std::string> tokens{"bridgekit"};
  tokens.insert(tokens.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &t : tokens) {
    argv.push_back(t.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (dump->parsed()) {
      return cmd_schedule_dump(so, points, format, output, out);
    }
    if (samp->parsed()) {
      return cmd_sample(so, go, po, method, g, seed, predictor, beta,
                        init_noise, output, out);
    }
    if (wts->parsed()) {
      return cmd_weights(so, go, method, output, svg, out);
    }
    if (ver->parsed()) {
      return cmd_verify(*seed, output, out);
    }
    if (demo->parsed()) {
      return cmd_demo(so, go, po, *seed, pairs, predictor, beta, output_dir,
                      out);
    }
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

} // namespace bridgekit
