#pragma once

#include <string>
#include <string_view>

#include "bridgekit/sampler.hpp"
#include "bridgekit/signal.hpp"
#include "bridgekit/stft.hpp"

namespace bridgekit {

enum class PredictorKind { oracle, blend, wiener };

struct PredictorParams {
  double beta = 0.5; // blend weight on the clean reference
  StftConfig stft;   // wiener only
};

/*
 * Stand-ins for a trained data-prediction network.
 *
 *   oracle  returns the clean reference s
 *   blend   beta s + (1 - beta) y
 *   wiener  applies the per-bin gain |S|^2 / (|S|^2 + |Y - S|^2) to the
 *           reference noisy spectrogram and inverts (computed once)
 *
 * The state x_t is ignored by all three. Inputs whose length differs from
 * the reference are rejected.
 */
Predictor make_predictor(PredictorKind kind, const PredictorParams &params,
                         const PairedSignal &reference);

std::string to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view name);

} // namespace bridgekit
