#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bridgekit/types.hpp"

namespace bridgekit {

enum class NoiseKind { white, pink };

struct SynthSpec {
  int n_tones = 5;
  double duration_s = 1.0;
  double sample_rate = 16000.0;
  double snr_db = 0.0;
  NoiseKind noise_kind = NoiseKind::white;
};

/// Clean/noisy waveform pair; snr_db is the mixing SNR actually achieved.
struct PairedSignal {
  RVector s;
  RVector y;
  double sample_rate = 16000.0;
  double snr_db = 0.0;
};

/*
 * Clean signal: sum of n_tones sinusoids with random frequency (80 Hz up to
 * a quarter of the sample rate), amplitude and phase, scaled to unit RMS.
 * Noise is white Gaussian or 1/f-shaped (pink) and scaled to hit snr_db.
 * All randomness comes from Philox stream (seed, 0).
 */
PairedSignal synth_pair(const SynthSpec &spec, std::uint64_t seed);

/// 10 log10(||s||^2 / ||y - s||^2).
double mixing_snr_db(const RVector &s, const RVector &y);

CVector to_complex(const RVector &x);
RVector real_part(const CVector &x);

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

} // namespace bridgekit
