#include "bridgekit/wav.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bridgekit/composition.hpp"

namespace bridgekit {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

template <typename T>
void put(std::ostream &out, T value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T get(std::istream &in) {
  T value{};
  if (!in.read(reinterpret_cast<char *>(&value), sizeof(T))) {
    throw std::runtime_error("read_wav: truncated file");
  }
  return value;
}

} // namespace

void write_wav(const std::filesystem::path &path, const RVector &samples,
               int sample_rate) {
  if (sample_rate <= 0) {
    throw std::invalid_argument("write_wav: sample rate must be positive");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_wav: cannot open " + path.string());
  }
  const auto n = static_cast<std::uint32_t>(samples.size());
  const std::uint32_t data_bytes = n * 4;
  out.write("RIFF", 4);
  put<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, 3); // IEEE float
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate) * 4);
  put<std::uint16_t>(out, 4);
  put<std::uint16_t>(out, 32);
  out.write("data", 4);
  put<std::uint32_t>(out, data_bytes);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    put<float>(out, static_cast<float>(samples[i]));
  }
  if (!out) {
    throw std::runtime_error("write_wav: write failed for " + path.string());
  }
}

WavData read_wav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_wav: cannot open " + path.string());
  }
  std::array<char, 4> tag{};
  auto read_tag = [&] {
    if (!in.read(tag.data(), 4)) {
      throw std::runtime_error("read_wav: truncated file");
    }
    return std::string(tag.data(), 4);
  };
  if (read_tag() != "RIFF") {
    throw std::runtime_error("read_wav: not a RIFF file");
  }
  get<std::uint32_t>(in);
  if (read_tag() != "WAVE") {
    throw std::runtime_error("read_wav: not a WAVE file");
  }

  bool have_fmt = false;
  WavData out;
  while (true) {
    const std::string id = read_tag();
    const auto size = get<std::uint32_t>(in);
    if (id == "fmt ") {
      const auto format = get<std::uint16_t>(in);
      const auto channels = get<std::uint16_t>(in);
      out.sample_rate = static_cast<int>(get<std::uint32_t>(in));
      get<std::uint32_t>(in);
      get<std::uint16_t>(in);
      const auto bits = get<std::uint16_t>(in);
      if (format != 3 || channels != 1 || bits != 32) {
        throw std::runtime_error("read_wav: only mono 32-bit float is supported");
      }
      in.seekg(size - 16 + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) {
        throw std::runtime_error("read_wav: data chunk before fmt chunk");
      }
      const std::uint32_t n = size / 4;
      out.samples.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        out.samples[i] = get<float>(in);
      }
      return out;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
}

std::string columns_to_csv(const std::vector<std::string> &names,
                           const std::vector<RVector> &columns) {
  if (names.size() != columns.size() || columns.empty()) {
    throw std::invalid_argument("columns_to_csv: names and columns disagree");
  }
  const Eigen::Index rows = columns.front().size();
  for (const auto &c : columns) {
    if (c.size() != rows) {
      throw std::invalid_argument("columns_to_csv: ragged columns");
    }
  }
  std::ostringstream out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << (j ? "," : "") << names[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out << (j ? "," : "") << format_double(columns[j][i]);
    }
    out << '\n';
  }
  return out.str();
}

} // namespace bridgekit
