#include "bridgekit/stft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace bridgekit {
namespace {

void check_config(const StftConfig &c) {
  if (c.window_length <= 0 || c.hop <= 0 || c.hop > c.window_length ||
      c.n_fft < c.window_length || c.n_fft % 2 != 0) {
    throw std::invalid_argument("stft: invalid configuration");
  }
}

int left_pad(const StftConfig &c) { return c.window_length - c.hop; }

int frame_count(const StftConfig &c, std::size_t n) {
  const auto total = static_cast<std::size_t>(2 * left_pad(c)) + n;
  const auto hop = static_cast<std::size_t>(c.hop);
  const std::size_t rounded = (total + hop - 1) / hop * hop;
  return static_cast<int>(
      (rounded - static_cast<std::size_t>(c.window_length)) / hop + 1);
}

} // namespace

RVector sqrt_hann(int n) {
  RVector w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = std::sin(std::numbers::pi * i / n);
  }
  return w;
}

Spectrogram stft(const RVector &x, const StftConfig &config) {
  check_config(config);
  if (x.size() < config.window_length) {
    throw std::invalid_argument("stft: input shorter than one window (" +
                                std::to_string(x.size()) + " < " +
                                std::to_string(config.window_length) + ")");
  }
  const int frames = frame_count(config, static_cast<std::size_t>(x.size()));
  const int pad = left_pad(config);
  const int bins = config.n_fft / 2 + 1;
  const RVector w = sqrt_hann(config.window_length);

  Spectrogram spec;
  spec.config = config;
  spec.signal_length = static_cast<std::size_t>(x.size());
  spec.bins.resize(bins, frames);

  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(config.n_fft));
  std::vector<Complex> out;
  for (int l = 0; l < frames; ++l) {
    std::fill(frame.begin(), frame.end(), 0.0);
    for (int i = 0; i < config.window_length; ++i) {
      const long idx = static_cast<long>(l) * config.hop + i - pad;
      if (idx >= 0 && idx < x.size()) {
        frame[static_cast<std::size_t>(i)] = w[i] * x[idx];
      }
    }
    fft.fwd(out, frame);
    for (int f = 0; f < bins; ++f) {
      spec.bins(f, l) = out[static_cast<std::size_t>(f)];
    }
  }
  return spec;
}

RVector istft(const Spectrogram &spec) {
  const StftConfig &c = spec.config;
  check_config(c);
  const int bins = c.n_fft / 2 + 1;
  if (spec.bins.rows() != bins ||
      spec.bins.cols() != frame_count(c, spec.signal_length)) {
    throw std::invalid_argument("istft: spectrogram shape does not match "
                                "its configuration");
  }
  const auto n = static_cast<Eigen::Index>(spec.signal_length);
  const int pad = left_pad(c);
  const RVector w = sqrt_hann(c.window_length);
  RVector acc = RVector::Zero(n);
  RVector norm = RVector::Zero(n);

  Eigen::FFT<double> fft;
  std::vector<Complex> full(static_cast<std::size_t>(c.n_fft));
  std::vector<Complex> frame;
  for (Eigen::Index l = 0; l < spec.bins.cols(); ++l) {
    for (int f = 0; f < bins; ++f) {
      full[static_cast<std::size_t>(f)] = spec.bins(f, l);
    }
    for (int f = bins; f < c.n_fft; ++f) {
      full[static_cast<std::size_t>(f)] = std::conj(spec.bins(c.n_fft - f, l));
    }
    fft.inv(frame, full);
    for (int i = 0; i < c.window_length; ++i) {
      const Eigen::Index idx = l * c.hop + i - pad;
      if (idx >= 0 && idx < n) {
        acc[idx] += w[i] * frame[static_cast<std::size_t>(i)].real();
        norm[idx] += w[i] * w[i];
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    acc[i] = norm[i] > 1e-12 ? acc[i] / norm[i] : 0.0;
  }
  return acc;
}

} // namespace bridgekit
