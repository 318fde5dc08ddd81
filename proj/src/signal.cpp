#include "bridgekit/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "bridgekit/rng.hpp"

namespace bridgekit {
namespace {

RVector white(Eigen::Index n, Philox4x32 &rng) {
  std::normal_distribution<double> normal;
  RVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = normal(rng);
  }
  return out;
}

// Shapes white noise to a 1/f power spectrum; DC is removed.
RVector pink(Eigen::Index n, Philox4x32 &rng) {
  const RVector w = white(n, rng);
  std::vector<double> time(w.data(), w.data() + n);
  std::vector<Complex> freq;
  Eigen::FFT<double> fft;
  fft.fwd(freq, time);
  freq[0] = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    const Eigen::Index f = std::min(k, n - k);
    freq[static_cast<std::size_t>(k)] /= std::sqrt(static_cast<double>(f));
  }
  std::vector<Complex> shaped;
  fft.inv(shaped, freq);
  RVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = shaped[static_cast<std::size_t>(i)].real();
  }
  return out;
}

} // namespace

double mixing_snr_db(const RVector &s, const RVector &y) {
  if (s.size() != y.size()) {
    throw std::invalid_argument("mixing_snr_db: length mismatch");
  }
  return 10.0 * std::log10(s.squaredNorm() / (y - s).squaredNorm());
}

PairedSignal synth_pair(const SynthSpec &spec, std::uint64_t seed) {
  if (!std::isfinite(spec.snr_db)) {
    throw std::invalid_argument("synth_pair: snr_db must be finite");
  }
  if (!(spec.sample_rate > 0.0) || !(spec.duration_s > 0.0)) {
    throw std::invalid_argument("synth_pair: zero-length signal");
  }
  if (spec.n_tones < 1) {
    throw std::invalid_argument("synth_pair: need at least one tone");
  }
  const auto n =
      static_cast<Eigen::Index>(std::llround(spec.duration_s * spec.sample_rate));
  if (n < 256) {
    throw std::invalid_argument("synth_pair: signal shorter than 256 samples");
  }

  Philox4x32 rng(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double f_hi = spec.sample_rate / 4.0;
  RVector s = RVector::Zero(n);
  for (int k = 0; k < spec.n_tones; ++k) {
    const double freq = 80.0 + (f_hi - 80.0) * unit(rng);
    const double amp = 0.5 + 0.5 * unit(rng);
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      s[i] += amp * std::sin(2.0 * std::numbers::pi * freq * i / spec.sample_rate +
                             phase);
    }
  }
  s /= std::sqrt(s.squaredNorm() / static_cast<double>(n));

  RVector noise = spec.noise_kind == NoiseKind::white ? white(n, rng)
                                                      : pink(n, rng);
  const double gain = std::sqrt(s.squaredNorm() / noise.squaredNorm() *
                                std::pow(10.0, -spec.snr_db / 10.0));
  noise *= gain;

  PairedSignal out;
  out.s = s;
  out.y = s + noise;
  out.sample_rate = spec.sample_rate;
  out.snr_db = mixing_snr_db(out.s, out.y);
  return out;
}

CVector to_complex(const RVector &x) { return x.cast<Complex>(); }

RVector real_part(const CVector &x) { return x.real(); }

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::white ? "white" : "pink";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "white") {
    return NoiseKind::white;
  }
  if (name == "pink") {
    return NoiseKind::pink;
  }
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

} // namespace bridgekit
