#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "bridgekit/types.hpp"

namespace bridgekit {

/// 32 ms at 16 kHz with 50% overlap; periodic sqrt-Hann on both sides.
struct StftConfig {
  int window_length = 512;
  int hop = 256;
  int n_fft = 512;
};

/*
 * bins is F x L (F = n_fft/2 + 1 one-sided frequencies, L frames).
 * The signal is zero-padded by window_length - hop on the left and enough
 * on the right that every original sample is covered by full overlap, so
 * istft reconstructs the whole signal rather than just an interior part.
 */
struct Spectrogram {
  Eigen::MatrixXcd bins;
  StftConfig config;
  std::size_t signal_length = 0;
  std::string window = "sqrt_hann";
};

/// Periodic sqrt-Hann window of length n.
RVector sqrt_hann(int n);

/// Throws std::invalid_argument for inputs shorter than one window or an
/// inconsistent config.
Spectrogram stft(const RVector &x, const StftConfig &config = {});
RVector istft(const Spectrogram &spec);

} // namespace bridgekit
