#include "bridgekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bridgekit {
namespace {

void check_pair(const RVector &a, const RVector &b, const char *what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch");
  }
}

void check_shapes(const Spectrogram &a, const Spectrogram &b) {
  if (a.bins.rows() != b.bins.rows() || a.bins.cols() != b.bins.cols()) {
    throw std::invalid_argument("spectrogram shape mismatch");
  }
}

double compressed_scale(const Complex &z) {
  return std::max(std::pow(std::abs(z), 1.0 - kMagnitudeExponent),
                  kCompressionFloor);
}

} // namespace

double si_snr_ratio(const RVector &x_hat, const RVector &x) {
  check_pair(x_hat, x, "si_snr");
  const double ref = x.squaredNorm();
  if (!(ref > 0.0)) {
    throw std::invalid_argument("si_snr: zero reference");
  }
  const RVector target = (x_hat.dot(x) / ref) * x;
  const double signal = target.squaredNorm();
  if (signal == 0.0) {
    return 0.0;
  }
  const double noise = (x_hat - target).squaredNorm();
  return signal / std::max(noise, kRatioGuard * signal);
}

double si_snr_db(const RVector &x_hat, const RVector &x) {
  return 10.0 * std::log10(si_snr_ratio(x_hat, x));
}

double sisnr_loss(const RVector &x_hat, const RVector &x) {
  return -std::log10(si_snr_ratio(x_hat, x));
}

double magnitude_loss(const Spectrogram &X_hat, const Spectrogram &X) {
  check_shapes(X_hat, X);
  const Eigen::ArrayXXd a = X_hat.bins.array().abs().pow(kMagnitudeExponent);
  const Eigen::ArrayXXd b = X.bins.array().abs().pow(kMagnitudeExponent);
  return (a - b).square().mean();
}

double ri_loss(const Spectrogram &X_hat, const Spectrogram &X) {
  check_shapes(X_hat, X);
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index l = 0; l < X.bins.cols(); ++l) {
    for (Eigen::Index f = 0; f < X.bins.rows(); ++f) {
      const Complex p = X_hat.bins(f, l) / compressed_scale(X_hat.bins(f, l));
      const Complex q = X.bins(f, l) / compressed_scale(X.bins(f, l));
      re += (p.real() - q.real()) * (p.real() - q.real());
      im += (p.imag() - q.imag()) * (p.imag() - q.imag());
    }
  }
  const auto count = static_cast<double>(X.bins.size());
  return re / count + im / count;
}

LossBreakdown total_loss(const RVector &x_hat, const RVector &x,
                         const std::array<double, 3> &lambdas,
                         const StftConfig &config) {
  check_pair(x_hat, x, "total_loss");
  const Spectrogram X_hat = stft(x_hat, config);
  const Spectrogram X = stft(x, config);
  LossBreakdown out;
  out.lambdas = lambdas;
  out.sisnr_term = sisnr_loss(x_hat, x);
  out.mag_term = magnitude_loss(X_hat, X);
  out.ri_term = ri_loss(X_hat, X);
  out.total = lambdas[0] * out.sisnr_term + lambdas[1] * out.mag_term +
              lambdas[2] * out.ri_term;
  return out;
}

} // namespace bridgekit
