#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbrnn/channel.hpp"

namespace sbrnn {

/// Gray-labelled PAM transmitter with root-raised-cosine shaping.
struct PamConfig {
  int order = 2;
  std::vector<double> levels{0.0, kDriveMax};
  double rolloff = 0.25;
  int samples_per_symbol = 2;  ///< N_s at the DAC/ADC rate
  double dac_rate = 84e9;
  int span_symbols = 16;       ///< RRC truncated to +-span symbols

  static PamConfig pam2();
  static PamConfig pam4();

  int bits_per_symbol() const;
  double symbol_rate() const { return dac_rate / samples_per_symbol; }
  void validate() const;
};

/// Bits (MSB first per symbol) to level indices via the Gray code.
std::vector<int> gray_map(std::span<const std::uint8_t> bits, int order);
std::vector<std::uint8_t> gray_demap(std::span<const int> symbols, int order);
/// Gray codeword carried by level index s.
inline std::uint32_t gray_codeword(int s) { return static_cast<std::uint32_t>(s ^ (s >> 1)); }

/// RRC taps at `sps` samples per symbol over +-span symbols, scaled so the
/// taps sum to `sps` (a constant symbol stream reproduces its level on
/// average over one symbol period).
std::vector<double> rrc_taps(double rolloff, int sps, int span);

/// Zero-stuffs level indices to `sps` and filters with the RRC. Output has
/// symbols.size() * sps samples; symbol k is centred on sample k * sps.
std::vector<double> shape_symbols(std::span<const int> symbols, const PamConfig& cfg, int sps);

/// Gray map + shaping at the DAC rate.
Waveform pam_modulate(std::span<const std::uint8_t> bits, const PamConfig& cfg);

}  // namespace sbrnn
