#include "bridgekit/predictors.hpp"

#include <stdexcept>

namespace bridgekit {
namespace {

RVector wiener_estimate(const PairedSignal &ref, const StftConfig &config) {
  const Spectrogram S = stft(ref.s, config);
  Spectrogram Y = stft(ref.y, config);
  for (Eigen::Index l = 0; l < Y.bins.cols(); ++l) {
    for (Eigen::Index f = 0; f < Y.bins.rows(); ++f) {
      const double ps = std::norm(S.bins(f, l));
      const double pn = std::norm(Y.bins(f, l) - S.bins(f, l));
      const double gain = ps + pn > 0.0 ? ps / (ps + pn) : 1.0;
      Y.bins(f, l) *= gain;
    }
  }
  return istft(Y);
}

} // namespace

Predictor make_predictor(PredictorKind kind, const PredictorParams &params,
                         const PairedSignal &reference) {
  if (reference.s.size() != reference.y.size()) {
    throw std::invalid_argument("make_predictor: reference length mismatch");
  }
  CVector estimate;
  switch (kind) {
  case PredictorKind::oracle:
    estimate = to_complex(reference.s);
    break;
  case PredictorKind::blend:
    if (!(params.beta >= 0.0 && params.beta <= 1.0)) {
      throw std::invalid_argument("make_predictor: beta must lie in [0, 1]");
    }
    break;
  case PredictorKind::wiener:
    estimate = to_complex(wiener_estimate(reference, params.stft));
    break;
  }
  const Eigen::Index n = reference.s.size();
  if (kind == PredictorKind::blend) {
    const double beta = params.beta;
    const CVector s = to_complex(reference.s);
    return [beta, s, n](const CVector &x, const CVector &y, double) -> CVector {
      if (x.size() != n || y.size() != n) {
        throw std::invalid_argument("predictor: input length mismatch");
      }
      return beta * s + (1.0 - beta) * y;
    };
  }
  return [estimate, n](const CVector &x, const CVector &, double) -> CVector {
    if (x.size() != n) {
      throw std::invalid_argument("predictor: input length mismatch");
    }
    return estimate;
  };
}

std::string to_string(PredictorKind kind) {
  switch (kind) {
  case PredictorKind::oracle:
    return "oracle";
  case PredictorKind::blend:
    return "blend";
  case PredictorKind::wiener:
    return "wiener";
  }
  return "unknown";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  if (name == "oracle") {
    return PredictorKind::oracle;
  }
  if (name == "blend") {
    return PredictorKind::blend;
  }
  if (name == "wiener") {
    return PredictorKind::wiener;
  }
  throw std::invalid_argument("unknown predictor kind '" + std::string(name) +
                              "'");
}

} // namespace bridgekit
