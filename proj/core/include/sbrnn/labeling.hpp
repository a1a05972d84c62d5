#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbrnn {

/// Maps message m (0-based) to a B-bit codeword.
struct BitLabeling {
  int bits = 0;
  std::vector<std::uint32_t> codewords;

  int messages() const { return static_cast<int>(codewords.size()); }
  bool is_bijection() const;
  void swap(int i, int j) { std::swap(codewords.at(static_cast<std::size_t>(i)), codewords.at(static_cast<std::size_t>(j))); }

  /// Binary-reflected Gray code applied to the message index.
  static BitLabeling gray(int messages);
  static BitLabeling random(int messages, std::uint64_t seed);

  bool operator==(const BitLabeling&) const = default;
};

int hamming(std::uint32_t a, std::uint32_t b);

/// Row-stochastic estimate of P(decided | sent).
struct ConfusionMatrix {
  Eigen::MatrixXd probs;               ///< M x M, row = sent message
  std::vector<bool> unobserved_rows;   ///< rows with no observation (set uniform)

  int messages() const { return static_cast<int>(probs.rows()); }
};

ConfusionMatrix estimate_confusion(std::span<const int> labels, std::span<const int> decisions, int messages);

/// Expected BER under a uniform message prior.
double expected_ber(const BitLabeling& labeling, const ConfusionMatrix& confusion);

/// Symbol error probability divided by B (one bit error per symbol error).
double ber_lower_bound(const ConfusionMatrix& confusion, int bits);

struct TabuResult {
  BitLabeling start;
  BitLabeling best;
  double start_cost = 0.0;
  double best_cost = 0.0;
  std::vector<double> best_cost_trace;  ///< best cost after each iteration
};

/// Tabu search over pairwise codeword swaps, starting from a random bijection.
TabuResult tabu_search(const ConfusionMatrix& confusion, std::uint64_t seed, int iterations = 1000,
                       std::size_t list_size = 256);
TabuResult tabu_search(const ConfusionMatrix& confusion, BitLabeling start, int iterations = 1000,
                       std::size_t list_size = 256);

/// One B-bit string (MSB first) per line, in message order.
std::string format_labeling(const BitLabeling& labeling);
BitLabeling parse_labeling(const std::string& text);

}  // namespace sbrnn
