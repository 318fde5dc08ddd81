#pragma once

#include <array>

#include "bridgekit/stft.hpp"
#include "bridgekit/types.hpp"

namespace bridgekit {

/// The error energy in the SI-SNR ratio is floored at this fraction of the
/// target energy, capping the ratio at 1e8 (80 dB) without disturbing
/// scale invariance.
inline constexpr double kRatioGuard = 1e-8;
/// Floor for |X|^0.7 in the real/imaginary loss.
inline constexpr double kCompressionFloor = 1e-8;
inline constexpr double kMagnitudeExponent = 0.3;

/*
 * ||x_t||^2 / ||x_hat - x_t||^2 with x_t = <x_hat, x> x / ||x||^2.
 * Returns 0 when x_hat is orthogonal to x (including x_hat = 0).
 * Throws std::invalid_argument for a zero reference or length mismatch.
 */
double si_snr_ratio(const RVector &x_hat, const RVector &x);

/// 10 log10 of si_snr_ratio, in dB.
double si_snr_db(const RVector &x_hat, const RVector &x);

/// Negative SI-SNR loss, -log10(ratio) (no factor 10).
double sisnr_loss(const RVector &x_hat, const RVector &x);

/// Mean over bins of (|X_hat|^0.3 - |X|^0.3)^2.
double magnitude_loss(const Spectrogram &X_hat, const Spectrogram &X);

/// Mean over bins of the squared difference of X_r / |X|^0.7, plus the
/// same for the imaginary part.
double ri_loss(const Spectrogram &X_hat, const Spectrogram &X);

struct LossBreakdown {
  double sisnr_term = 0.0;
  double mag_term = 0.0;
  double ri_term = 0.0;
  double total = 0.0;
  std::array<double, 3> lambdas{};
};

inline constexpr std::array<double, 3> kDefaultLossWeights{0.01, 0.7, 0.3};

LossBreakdown total_loss(const RVector &x_hat, const RVector &x,
                         const std::array<double, 3> &lambdas =
                             kDefaultLossWeights,
                         const StftConfig &config = {});

} // namespace bridgekit
