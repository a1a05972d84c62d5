#include "sbrnn/pam.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sbrnn/error.hpp"

namespace sbrnn {

PamConfig PamConfig::pam2() { return {}; }

PamConfig PamConfig::pam4() {
  PamConfig c;
  c.order = 4;
  c.levels = {0.0, std::numbers::pi / 12.0, std::numbers::pi / 6.0, kDriveMax};
  c.dac_rate = 42e9;
  return c;
}

int PamConfig::bits_per_symbol() const { return std::countr_zero(static_cast<unsigned>(order)); }

void PamConfig::validate() const {
  require(order >= 2 && std::has_single_bit(static_cast<unsigned>(order)), "PAM order must be a power of two");
  require(static_cast<int>(levels.size()) == order, "PAM level count must equal the order");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    require(levels[i] >= 0.0 && levels[i] <= kDriveMax * (1 + 1e-12), "PAM levels must lie in [0, pi/4]");
    if (i > 0) require(levels[i] > levels[i - 1], "PAM levels must be strictly increasing");
  }
  require(rolloff > 0.0 && rolloff <= 1.0, "RRC roll-off must be in (0, 1]");
  require(samples_per_symbol >= 1, "samples per symbol must be >= 1");
  require(dac_rate > 0.0, "dac_rate must be positive");
  require(span_symbols >= 1, "RRC span must be >= 1 symbol");
}

std::vector<int> gray_map(std::span<const std::uint8_t> bits, int order) {
  const int b = std::countr_zero(static_cast<unsigned>(order));
  require(b >= 1 && bits.size() % static_cast<std::size_t>(b) == 0, "bit count must be a multiple of log2(order)");
  // Inverse Gray: level index whose Gray codeword equals the bit group.
  std::vector<int> inverse(static_cast<std::size_t>(order));
  for (int s = 0; s < order; ++s) inverse[gray_codeword(s)] = s;
  std::vector<int> out(bits.size() / static_cast<std::size_t>(b));
  for (std::size_t k = 0; k < out.size(); ++k) {
    unsigned word = 0;
    for (int j = 0; j < b; ++j) word = (word << 1) | (bits[k * static_cast<std::size_t>(b) + static_cast<std::size_t>(j)] & 1u);
    out[k] = inverse[word];
  }
  return out;
}

std::vector<std::uint8_t> gray_demap(std::span<const int> symbols, int order) {
  const int b = std::countr_zero(static_cast<unsigned>(order));
  std::vector<std::uint8_t> out;
  out.reserve(symbols.size() * static_cast<std::size_t>(b));
  for (int s : symbols) {
    require(s >= 0 && s < order, "symbol index out of range");
    const auto word = gray_codeword(s);
    for (int j = b - 1; j >= 0; --j) out.push_back(static_cast<std::uint8_t>((word >> j) & 1u));
  }
  return out;
}

std::vector<double> rrc_taps(double rolloff, int sps, int span) {
  require(rolloff > 0.0 && rolloff <= 1.0, "RRC roll-off must be in (0, 1]");
  require(sps >= 1 && span >= 1, "RRC: sps and span must be >= 1");
  const double pi = std::numbers::pi;
  const double b = rolloff;
  const int half = span * sps;
  std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) / sps;  // in symbol periods
    double h = 0.0;
    if (i == 0) {
      h = 1.0 - b + 4.0 * b / pi;
    } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-12) {
      h = b / std::sqrt(2.0) * ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
    } else {
      h = (std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b))) /
          (pi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t)));
    }
    taps[static_cast<std::size_t>(i + half)] = h;
  }
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (auto& h : taps) h *= sps / sum;
  return taps;
}

std::vector<double> shape_symbols(std::span<const int> symbols, const PamConfig& cfg, int sps) {
  cfg.validate();
  const auto taps = rrc_taps(cfg.rolloff, sps, cfg.span_symbols);
  const int half = cfg.span_symbols * sps;
  const std::size_t len = symbols.size() * static_cast<std::size_t>(sps);
  std::vector<double> out(len, 0.0);
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    require(symbols[k] >= 0 && symbols[k] < cfg.order, "symbol index out of range");
    const double level = cfg.levels[static_cast<std::size_t>(symbols[k])];
    if (level == 0.0) continue;
    const auto centre = static_cast<long long>(k) * sps;
    for (int j = -half; j <= half; ++j) {
      const long long idx = centre + j;
      if (idx < 0 || idx >= static_cast<long long>(len)) continue;
      out[static_cast<std::size_t>(idx)] += level * taps[static_cast<std::size_t>(j + half)];
    }
  }
  return out;
}

Waveform pam_modulate(std::span<const std::uint8_t> bits, const PamConfig& cfg) {
  cfg.validate();
  const auto symbols = gray_map(bits, cfg.order);
  return {shape_symbols(symbols, cfg, cfg.samples_per_symbol), cfg.dac_rate};
}

}  // namespace sbrnn
