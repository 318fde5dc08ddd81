#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bridgekit/types.hpp"

namespace bridgekit {

struct WavData {
  RVector samples;
  int sample_rate = 16000;
};

/// Mono 32-bit IEEE float, little-endian RIFF.
void write_wav(const std::filesystem::path &path, const RVector &samples,
               int sample_rate);

/// Reads mono 32-bit float WAV files as written by write_wav; skips
/// unknown chunks. Throws std::runtime_error on anything else.
WavData read_wav(const std::filesystem::path &path);

/// One column per signal, header row of names, shortest round-trip floats.
std::string columns_to_csv(const std::vector<std::string> &names,
                           const std::vector<RVector> &columns);

} // namespace bridgekit
