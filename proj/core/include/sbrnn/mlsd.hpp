#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbrnn/channel.hpp"
#include "sbrnn/pam.hpp"

namespace sbrnn {

/// Expected sqrt(y) for every (state, centre symbol, sample phase).
///
/// A state sigma_k holds mu/2 symbols before and mu/2 after x_k, so the pair
/// (sigma_k, x_k) is the window x_{k-mu/2} .. x_{k+mu/2}. Windows are indexed
/// as base-M numbers with the oldest symbol most significant.
struct NuTable {
  int order = 2;
  int memory = 0;               ///< mu, even
  int samples_per_symbol = 2;   ///< N_s
  std::vector<double> means;    ///< windows() x N_s, row-major
  std::vector<std::uint64_t> counts;
  std::vector<double> sum_sq_dev;  ///< Welford accumulators (not serialized)

  NuTable() = default;
  NuTable(int order, int memory, int samples_per_symbol);

  std::size_t windows() const { return counts.size(); }
  std::size_t states() const { return windows() / static_cast<std::size_t>(order); }
  double coverage() const;
  double variance(std::size_t window, int phase) const;
  double mean(std::size_t window, int phase) const {
    return means[window * static_cast<std::size_t>(samples_per_symbol) + static_cast<std::size_t>(phase)];
  }
  /// Window index of (sigma, x); sigma lists mu/2 pre-cursor then mu/2 post-cursor symbols.
  std::size_t window_index(std::span<const int> sigma, int x) const;

  void accumulate(std::size_t window, std::span<const double> sqrt_samples);
  /// Merges partial sums from an independent chunk.
  void merge(const NuTable& other);
};

/// Number of trellis states M^mu, which equals 2^eta for eta = mu log2 M.
std::size_t trellis_states(int order, int memory);

/// Square-root branch metric sum_l (sqrt(y_l) - nu_l)^2; negative samples
/// are clamped to 0, unobserved windows give +infinity.
double branch_metric(std::span<const double> y, std::size_t window, const NuTable& table);
double branch_metric(std::span<const double> y, std::span<const int> sigma, int x, const NuTable& table);

/// Viterbi detection of N symbols from N * N_s samples. `preamble` and
/// `postamble` are the mu/2 known symbols before and after the block.
std::vector<int> viterbi_detect(std::span<const double> y, const NuTable& table, std::span<const int> preamble,
                                std::span<const int> postamble);

/// Sequence metric of a full candidate (preamble + symbols + postamble).
double sequence_metric(std::span<const double> y, const NuTable& table, std::span<const int> preamble,
                       std::span<const int> symbols, std::span<const int> postamble);

/// PAM transmitter + IM/DD channel + N_s-rate sampling at the receiver.
class PamLink {
 public:
  PamLink(PamConfig pam, ChannelConfig channel);

  const PamConfig& pam() const { return pam_; }
  const Channel& channel() const { return channel_; }

  /// Received samples, N_s per symbol, sampled at offsets l / N_s of the
  /// symbol period on the transmit grid.
  std::vector<double> transmit(std::span<const int> symbols, std::uint64_t noise_seed) const;

  /// Symbols at each end of a transmitted chunk that are not used.
  int edge_symbols() const;

 private:
  PamConfig pam_;
  Channel channel_;
};

/// Builds the table from a random symbol stream of `train_symbols` usable positions.
NuTable estimate_nu(const PamLink& link, int memory, std::size_t train_symbols, std::uint64_t seed,
                    std::size_t chunk_symbols = 1 << 15);

struct MlsdResult {
  std::size_t symbols = 0;
  std::size_t symbol_errors = 0;
  std::size_t bits = 0;
  std::size_t bit_errors = 0;

  double ser() const { return symbols ? static_cast<double>(symbol_errors) / static_cast<double>(symbols) : 0.0; }
  double ber() const { return bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
};

/// Random Gray-mapped test symbols detected in frames of `frame_symbols`,
/// each framed by mu/2 known symbols on both sides.
MlsdResult mlsd_ber(const PamLink& link, const NuTable& table, std::size_t test_symbols, std::uint64_t seed,
                    std::size_t frame_symbols = 1024, std::size_t chunk_symbols = 1 << 15);

/// Text serialization: header line "nu_table <M> <mu> <N_s>", then one line
/// per window with N_s means and the observation count.
std::string format_nu_table(const NuTable& table);
NuTable parse_nu_table(const std::string& text);

}  // namespace sbrnn
