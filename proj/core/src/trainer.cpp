#include "sbrnn/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "sbrnn/error.hpp"
#include "sbrnn/estimator.hpp"
#include "sbrnn/text.hpp"

namespace sbrnn {

namespace {

constexpr double kLogFloor = 1e-30;

struct ForwardPass {
  TxTrace tx;
  ChannelPass channel;
  RxTrace rx;
  double loss = 0.0;
};

ForwardPass run_forward(const TransceiverParams& params, const Batch& batch, const Channel& channel,
                        const NoiseRealization& noise, const CarriedStates& states) {
  const int m = params.dims.messages;
  const int n = params.dims.samples;
  const int z = batch.sequences();
  const int v = batch.steps();
  require(z >= 1 && v >= 1, "empty training batch");

  ForwardPass f;
  f.tx = tx_forward(one_hot_steps(batch.messages, m), params.tx, states.tx_forward, states.tx_backward);
  const auto stream = interleave(f.tx.blocks);
  f.channel = channel.forward(stream, noise);
  f.rx = rx_forward(deinterleave(f.channel.received.samples, n, z, v), params.rx, states.rx_forward,
                    states.rx_backward);
  double total = 0.0;
  for (int t = 0; t < v; ++t)
    for (int b = 0; b < z; ++b)
      total += cross_entropy(batch.messages[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)],
                             f.rx.probabilities[static_cast<std::size_t>(t)].col(b));
  f.loss = total / (static_cast<double>(z) * v);
  return f;
}

bool all_finite(TransceiverParams& p) {
  for (const auto& a : parameter_arrays(p))
    if (!a.map().allFinite()) return false;
  return true;
}

}  // namespace

void TrainConfig::validate() const {
  require(sequences >= 1, "Z must be >= 1");
  require(train_length >= 1, "T_train must be >= 1");
  require(step_blocks >= 1, "V must be >= 1");
  require(reinit_period >= 1, "reinit_period must be >= 1");
  require(max_iters >= 0, "max_iters must be >= 0");
  require(static_cast<long double>(step_blocks) * max_iters <= static_cast<long double>(train_length),
          "V * max_iters exceeds T_train");
  require(validation_period >= 0, "validation_period must be >= 0");
  require(validation_window >= 1 && validation_length >= 1, "validation window/length must be >= 1");
  require(adam.learning_rate >= 0 && adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1 &&
              adam.epsilon > 0,
          "invalid Adam hyperparameters");
}

CarriedStates CarriedStates::zeros(const AutoencoderDims& dims, int sequences) {
  const Eigen::Index n = dims.samples;
  const Eigen::Index m2 = 2 * dims.messages;
  return {Matrix::Zero(n, sequences), Matrix::Zero(n, sequences), Matrix::Zero(m2, sequences),
          Matrix::Zero(m2, sequences)};
}

double cross_entropy(int target, const Vector& p) {
  require(target >= 0 && target < p.size(), "cross_entropy: target out of range");
  return -std::log(std::max(p(target), kLogFloor));
}

std::vector<double> interleave(const StepMatrices& blocks) {
  if (blocks.empty()) return {};
  const auto n = blocks[0].rows();
  const auto z = blocks[0].cols();
  const auto v = static_cast<Eigen::Index>(blocks.size());
  std::vector<double> stream(static_cast<std::size_t>(n * z * v));
  for (Eigen::Index i = 0; i < z; ++i)
    for (Eigen::Index t = 0; t < v; ++t)
      Eigen::Map<Vector>(stream.data() + (i * v + t) * n, n) = blocks[static_cast<std::size_t>(t)].col(i);
  return stream;
}

StepMatrices deinterleave(std::span<const double> stream, int samples, int sequences, int steps) {
  require(stream.size() == static_cast<std::size_t>(samples) * sequences * steps, "deinterleave: length mismatch");
  StepMatrices out(static_cast<std::size_t>(steps), Matrix(samples, sequences));
  for (int i = 0; i < sequences; ++i)
    for (int t = 0; t < steps; ++t)
      out[static_cast<std::size_t>(t)].col(i) =
          Eigen::Map<const Vector>(stream.data() + (static_cast<std::size_t>(i) * steps + t) * samples, samples);
  return out;
}

std::size_t stream_length(const AutoencoderDims& dims, const Batch& batch) {
  return static_cast<std::size_t>(dims.samples) * batch.sequences() * batch.steps();
}

double batch_loss(const TransceiverParams& params, const Batch& batch, const Channel& channel,
                  const NoiseRealization& noise, const CarriedStates& states) {
  return run_forward(params, batch, channel, noise, states).loss;
}

LossAndGradient loss_and_gradient(const TransceiverParams& params, const Batch& batch, const Channel& channel,
                                  const NoiseRealization& noise, const CarriedStates& states) {
  const int n = params.dims.samples;
  const int z = batch.sequences();
  const int v = batch.steps();
  const auto f = run_forward(params, batch, channel, noise, states);

  LossAndGradient out;
  out.loss = f.loss;
  out.clamped = f.channel.clamped;
  out.gradient = TransceiverParams::zeros(params.dims);

  // Softmax + cross entropy: d/dlogits = (p - onehot) / |batch|.
  const double scale = 1.0 / (static_cast<double>(z) * v);
  StepMatrices grad_logits(static_cast<std::size_t>(v));
  for (int t = 0; t < v; ++t) {
    Matrix g = f.rx.probabilities[static_cast<std::size_t>(t)];
    for (int b = 0; b < z; ++b) g(batch.messages[static_cast<std::size_t>(b)][static_cast<std::size_t>(t)], b) -= 1.0;
    grad_logits[static_cast<std::size_t>(t)] = g * scale;
  }

  StepMatrices grad_received;
  rx_backward(f.rx, params.rx, states.rx_forward, states.rx_backward, grad_logits, out.gradient.rx, &grad_received);
  const auto grad_tx_stream = channel.backward(f.channel, interleave(grad_received));
  tx_backward(f.tx, params.tx, states.tx_forward, states.tx_backward, deinterleave(grad_tx_stream, n, z, v),
              out.gradient.tx);

  out.next.tx_forward = f.tx.brnn.forward.back();
  out.next.tx_backward = f.tx.brnn.backward.front();
  out.next.rx_forward = f.rx.brnn.forward.back();
  out.next.rx_backward = f.rx.brnn.backward.front();
  return out;
}

double train_step(TransceiverParams& params, const Batch& batch, const Channel& channel, Adam& optimizer,
                  CarriedStates& states, std::uint64_t noise_seed) {
  const auto noise = channel.sample_noise(stream_length(params.dims, batch), noise_seed);
  auto lg = loss_and_gradient(params, batch, channel, noise, states);
  if (!std::isfinite(lg.loss) || !all_finite(lg.gradient))
    throw NumericError("non-finite loss or gradient (loss = " + format_double(lg.loss) + ")");
  const auto p = parameter_arrays(params);
  const auto g = parameter_arrays(lg.gradient);
  optimizer.step(p, g);
  states = std::move(lg.next);
  return lg.loss;
}

TrainResult train(const TrainConfig& cfg, const Channel& channel, const AutoencoderDims& dims,
                  const CheckpointCallback& on_checkpoint) {
  return train(cfg, channel, TransceiverParams::glorot(dims, cfg.seed_init), on_checkpoint);
}

TrainResult train(const TrainConfig& cfg, const Channel& channel, TransceiverParams init,
                  const CheckpointCallback& on_checkpoint) {
  cfg.validate();
  init.validate();
  const auto& dims = init.dims;
  TrainResult result;
  result.params = std::move(init);
  result.best = result.params;

  Adam optimizer(cfg.adam);
  std::vector<MessageSource> sources;
  sources.reserve(static_cast<std::size_t>(cfg.sequences));
  for (int i = 0; i < cfg.sequences; ++i)
    sources.emplace_back(dims.messages, RngFamily::mersenne_twister,
                         derive_seed(cfg.seed_train, "train-messages", static_cast<std::uint64_t>(i)));

  Batch batch;
  batch.messages.assign(static_cast<std::size_t>(cfg.sequences), std::vector<int>(static_cast<std::size_t>(cfg.step_blocks)));
  CarriedStates states = CarriedStates::zeros(dims, cfg.sequences);

  for (long long step = 0; step < cfg.max_iters; ++step) {
    if (step % cfg.reinit_period == 0) states = CarriedStates::zeros(dims, cfg.sequences);
    for (std::size_t i = 0; i < sources.size(); ++i)
      sources[i].fill(batch.messages[i], static_cast<std::size_t>(cfg.step_blocks));
    TrainLogRow row;
    row.step = step + 1;
    row.loss = train_step(result.params, batch, channel, optimizer, states,
                          derive_seed(cfg.seed_train, "train-noise", static_cast<std::uint64_t>(step)));
    const bool last = step + 1 == cfg.max_iters;
    if (cfg.validation_period > 0 && ((step + 1) % cfg.validation_period == 0 || last)) {
      const auto ev = evaluate(result.params, channel, cfg.validation_window, uniform_weights(cfg.validation_window),
                               1, cfg.validation_length, derive_seed(cfg.seed_test, "validation"));
      row.validation_bler = ev.bler;
      if (!result.best_bler || ev.bler < *result.best_bler) {
        result.best_bler = ev.bler;
        result.best = result.params;
      }
    }
    result.log.push_back(row);
    if (on_checkpoint && cfg.checkpoint_period > 0 && (step + 1) % cfg.checkpoint_period == 0)
      on_checkpoint(step + 1, result.params);
  }
  if (!result.best_bler) result.best = result.params;
  return result;
}

std::string format_train_log(const std::vector<TrainLogRow>& log) {
  std::string out = "step,loss,validation_bler\n";
  for (const auto& r : log) {
    out += std::to_string(r.step) + "," + format_double(r.loss) + ",";
    if (r.validation_bler) out += format_double(*r.validation_bler);
    out += "\n";
  }
  return out;
}

}  // namespace sbrnn
