#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbrnn/autoencoder.hpp"
#include "sbrnn/channel.hpp"
#include "sbrnn/labeling.hpp"
#include "sbrnn/rng.hpp"

namespace sbrnn {

/// Receiver outputs of every window over a received sequence.
/// by_offset[q].col(t) is the estimate of block t + q made by the window
/// starting at block t, for t in [0, T).
struct ProbabilityTensor {
  int window = 1;
  StepMatrices by_offset;

  Eigen::Index length() const { return by_offset.empty() ? 0 : by_offset[0].cols(); }
  Eigen::Index messages() const { return by_offset.empty() ? 0 : by_offset[0].rows(); }
  /// Estimate of block i made k slots earlier (window start i - k).
  auto estimate(Eigen::Index i, int k) const { return by_offset[static_cast<std::size_t>(k)].col(i - k); }
};

Vector uniform_weights(int window);
/// Throws if a is not on the probability simplex (tolerance 1e-10).
void validate_weights(const Vector& a, int window);

/// Decodes all windows [t, t + W) for t in [0, T) from zero states.
/// `blocks` is n x (T + W - 1).
ProbabilityTensor collect_probabilities(const RxParams& rx, const Matrix& blocks, int window);

/// Final probability vectors p_0..p_{T-1} (M x T): uniform average of the
/// available estimates for the first W - 1 blocks, weighted combination of
/// all W estimates afterwards.
Matrix combine(const ProbabilityTensor& tensor, const Vector& weights);

/// collect_probabilities followed by combine.
Matrix slide(const RxParams& rx, const Matrix& blocks, int window, const Vector& weights);

/// Average cross entropy of the weighted combination over blocks W-1..T-1.
double average_cross_entropy(const ProbabilityTensor& tensor, std::span<const int> labels, const Vector& weights);

struct WeightFit {
  Vector weights;
  double cost = 0.0;
  double uniform_cost = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes the average cross entropy over the simplex by projected
/// gradient descent with backtracking, starting from uniform weights.
WeightFit optimize_weights(const ProbabilityTensor& tensor, std::span<const int> labels,
                           int max_iterations = 100000, double tolerance = 1e-9);

/// Row i holds the probability each of the W estimates assigns to the true
/// label of fully estimated block W-1+i. Rows from several sequences may be
/// stacked before fitting.
Matrix label_probabilities(const ProbabilityTensor& tensor, std::span<const int> labels);
WeightFit optimize_weights(const Matrix& label_probs, int max_iterations = 100000, double tolerance = 1e-9);

/// Euclidean projection onto {a >= 0, sum a = 1}.
Vector project_to_simplex(const Vector& v);

/// Argmax per column, ties to the lowest index.
std::vector<int> decide(const Matrix& finals);

double bler(std::span<const int> labels, const Matrix& finals);
double ber(std::span<const int> labels, const Matrix& finals, const BitLabeling& labeling);
double ber_from_decisions(std::span<const int> labels, std::span<const int> decisions, const BitLabeling& labeling);

/// Transmitter -> channel for one message sequence, returns received blocks n x len.
Matrix transmit(const TransceiverParams& params, const Channel& channel, std::span<const int> messages,
                std::uint64_t noise_seed);

/// Generates `count` test sequences of T + W - 1 messages each, transmits them,
/// slides with `weights`, and returns decisions and labels concatenated over
/// the fully estimated positions.
struct Evaluation {
  std::vector<int> labels;
  std::vector<int> decisions;
  double bler = 0.0;
};
Evaluation evaluate(const TransceiverParams& params, const Channel& channel, int window, const Vector& weights,
                    int sequences, int length, std::uint64_t seed,
                    RngFamily family = RngFamily::tausworthe);

}  // namespace sbrnn
