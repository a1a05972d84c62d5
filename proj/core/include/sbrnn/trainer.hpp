#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sbrnn/adam.hpp"
#include "sbrnn/autoencoder.hpp"
#include "sbrnn/channel.hpp"
#include "sbrnn/rng.hpp"

namespace sbrnn {

struct TrainConfig {
  int sequences = 250;               ///< Z, parallel training sequences
  long long train_length = 1000000;  ///< T_train, messages per sequence
  int step_blocks = 10;              ///< V, messages per sequence per step
  int reinit_period = 100;           ///< steps between state resets
  long long max_iters = 100000;
  AdamConfig adam{};
  std::uint64_t seed_train = 1;      ///< Mersenne-twister data + channel noise
  std::uint64_t seed_test = 2;       ///< Tausworthe validation data
  std::uint64_t seed_init = 3;       ///< parameter initialization
  long long validation_period = 1000;  ///< 0 disables validation
  int validation_window = 10;
  int validation_length = 2000;
  long long checkpoint_period = 0;     ///< 0 disables periodic checkpoints

  void validate() const;
};

/// Z x V message indices for one optimization step.
struct Batch {
  std::vector<std::vector<int>> messages;

  int sequences() const { return static_cast<int>(messages.size()); }
  int steps() const { return messages.empty() ? 0 : static_cast<int>(messages[0].size()); }
};

/// BRNN outputs carried from one step to the next (detached from gradients).
struct CarriedStates {
  Matrix tx_forward, tx_backward, rx_forward, rx_backward;

  static CarriedStates zeros(const AutoencoderDims& dims, int sequences);
};

/// Cross entropy -log(p[target]) with a 1e-30 floor.
double cross_entropy(int target, const Vector& p);

/// Sequence-major interleaving of Z x V blocks into one channel stream.
std::vector<double> interleave(const StepMatrices& blocks);
StepMatrices deinterleave(std::span<const double> stream, int samples, int sequences, int steps);

struct LossAndGradient {
  double loss = 0.0;
  TransceiverParams gradient;
  CarriedStates next;
  std::size_t clamped = 0;
};

/// Mini-batch loss and its gradient for a fixed noise realization.
LossAndGradient loss_and_gradient(const TransceiverParams& params, const Batch& batch, const Channel& channel,
                                  const NoiseRealization& noise, const CarriedStates& states);

/// Forward-only mini-batch loss (finite-difference checks).
double batch_loss(const TransceiverParams& params, const Batch& batch, const Channel& channel,
                  const NoiseRealization& noise, const CarriedStates& states);

/// Length of the channel stream for a batch.
std::size_t stream_length(const AutoencoderDims& dims, const Batch& batch);

/// One Adam step on a freshly sampled noise realization. Updates `states`
/// with the detached final states. Throws NumericError on non-finite values.
double train_step(TransceiverParams& params, const Batch& batch, const Channel& channel, Adam& optimizer,
                  CarriedStates& states, std::uint64_t noise_seed);

struct TrainLogRow {
  long long step = 0;
  double loss = 0.0;
  std::optional<double> validation_bler;
};

struct TrainResult {
  TransceiverParams params;  ///< after the last step
  TransceiverParams best;    ///< lowest validation BLER (final params if no validation ran)
  std::optional<double> best_bler;
  std::vector<TrainLogRow> log;
};

using CheckpointCallback = std::function<void(long long step, const TransceiverParams&)>;

TrainResult train(const TrainConfig& cfg, const Channel& channel, TransceiverParams init,
                  const CheckpointCallback& on_checkpoint = {});
TrainResult train(const TrainConfig& cfg, const Channel& channel, const AutoencoderDims& dims,
                  const CheckpointCallback& on_checkpoint = {});

/// Loss trace as CSV: step,loss,validation_bler
std::string format_train_log(const std::vector<TrainLogRow>& log);

}  // namespace sbrnn
