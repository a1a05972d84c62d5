#include "sbrnn/autoencoder.hpp"

#include <bit>
#include <cmath>

#include <boost/random/uniform_real_distribution.hpp>

#include "sbrnn/channel.hpp"
#include "sbrnn/error.hpp"
#include "sbrnn/rng.hpp"

namespace sbrnn {

namespace {

Matrix activate(const Matrix& z, Activation act) {
  return act == Activation::relu ? relu(z) : clipping_activation(z);
}

// Derivative of the activation, evaluated at the pre-activation.
Matrix activation_slope(const Matrix& z, Activation act) {
  if (act == Activation::relu) return (z.array() > 0.0).cast<double>().matrix();
  return ((z.array() > 0.0) && (z.array() < kDriveMax)).cast<double>().matrix();
}

Matrix cell_pre(const Cell& c, const Matrix& x, const Matrix& h) {
  const auto in = c.input_dim();
  const auto out = c.output_dim();
  Matrix z = c.weight.leftCols(in) * x;
  z.noalias() += c.weight.rightCols(out) * h;
  z.colwise() += c.bias;
  return z;
}

void glorot_fill(Matrix& m, Rng& rng) {
  const double scale = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  boost::random::uniform_real_distribution<double> dist(-scale, scale);
  // Row-major fill order keeps initialization independent of storage order.
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
}

void check_cell(const Cell& c, Eigen::Index in, Eigen::Index out, const std::string& what) {
  require(c.weight.rows() == out && c.weight.cols() == in + out && c.bias.size() == out,
          what + ": parameter dimensions do not match the autoencoder dims");
}

}  // namespace

int AutoencoderDims::bits() const { return std::countr_zero(static_cast<unsigned>(messages)); }

void AutoencoderDims::validate() const {
  require(messages >= 2 && std::has_single_bit(static_cast<unsigned>(messages)),
          "M must be a power of two >= 2");
  require(samples >= 1, "n must be >= 1");
}

Matrix clipping_activation(const Matrix& x) {
  return x.array().max(0.0).min(kDriveMax).matrix();
}

Matrix relu(const Matrix& x) { return x.array().max(0.0).matrix(); }

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double mx = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - mx).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

Vector softmax(const Vector& logits) {
  const Matrix m = softmax(Matrix(logits));
  return m.col(0);
}

Cell Cell::zeros(Eigen::Index in, Eigen::Index out) {
  return {Matrix::Zero(out, in + out), Vector::Zero(out)};
}

TransceiverParams TransceiverParams::zeros(const AutoencoderDims& dims) {
  dims.validate();
  const Eigen::Index m = dims.messages;
  const Eigen::Index n = dims.samples;
  TransceiverParams p;
  p.dims = dims;
  p.tx.forward = Cell::zeros(m, n);
  p.tx.backward = Cell::zeros(m, n);
  p.rx.forward = Cell::zeros(n, 2 * m);
  p.rx.backward = Cell::zeros(n, 2 * m);
  p.rx.softmax_weight = Matrix::Zero(m, 4 * m);
  p.rx.softmax_bias = Vector::Zero(m);
  return p;
}

TransceiverParams TransceiverParams::glorot(const AutoencoderDims& dims, std::uint64_t seed) {
  auto p = zeros(dims);
  Rng rng(derive_seed(seed, "glorot-init"));
  glorot_fill(p.tx.forward.weight, rng);
  glorot_fill(p.tx.backward.weight, rng);
  glorot_fill(p.rx.forward.weight, rng);
  glorot_fill(p.rx.backward.weight, rng);
  glorot_fill(p.rx.softmax_weight, rng);
  return p;
}

void TransceiverParams::validate() const {
  dims.validate();
  const Eigen::Index m = dims.messages;
  const Eigen::Index n = dims.samples;
  check_cell(tx.forward, m, n, "tx.forward");
  check_cell(tx.backward, m, n, "tx.backward");
  check_cell(rx.forward, n, 2 * m, "rx.forward");
  check_cell(rx.backward, n, 2 * m, "rx.backward");
  require(rx.softmax_weight.rows() == m && rx.softmax_weight.cols() == 4 * m && rx.softmax_bias.size() == m,
          "rx.softmax: parameter dimensions do not match the autoencoder dims");
}

std::vector<ArrayRef> parameter_arrays(TransceiverParams& p) {
  auto mat = [](std::string name, Matrix& m) { return ArrayRef{std::move(name), m.data(), m.rows(), m.cols()}; };
  auto vec = [](std::string name, Vector& v) { return ArrayRef{std::move(name), v.data(), v.size(), 1}; };
  return {
      mat("tx.forward.weight", p.tx.forward.weight),   vec("tx.forward.bias", p.tx.forward.bias),
      mat("tx.backward.weight", p.tx.backward.weight), vec("tx.backward.bias", p.tx.backward.bias),
      mat("rx.forward.weight", p.rx.forward.weight),   vec("rx.forward.bias", p.rx.forward.bias),
      mat("rx.backward.weight", p.rx.backward.weight), vec("rx.backward.bias", p.rx.backward.bias),
      mat("rx.softmax.weight", p.rx.softmax_weight),   vec("rx.softmax.bias", p.rx.softmax_bias),
  };
}

BrnnTrace brnn_pass(const StepMatrices& inputs, const Cell& fwd, const Cell& bwd, Activation act,
                    const Matrix& init_forward, const Matrix& init_backward) {
  const std::size_t steps = inputs.size();
  for (const auto& x : inputs)
    require(x.rows() == fwd.input_dim() && x.rows() == bwd.input_dim(), "brnn_pass: input dimension mismatch");
  require(init_forward.rows() == fwd.output_dim() && init_backward.rows() == bwd.output_dim(),
          "brnn_pass: initial state dimension mismatch");
  BrnnTrace t;
  t.forward.resize(steps);
  t.backward.resize(steps);
  t.forward_pre.resize(steps);
  t.backward_pre.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const Matrix& prev = i == 0 ? init_forward : t.forward[i - 1];
    t.forward_pre[i] = cell_pre(fwd, inputs[i], prev);
    t.forward[i] = activate(t.forward_pre[i], act);
  }
  for (std::size_t k = steps; k-- > 0;) {
    const Matrix& next = k + 1 == steps ? init_backward : t.backward[k + 1];
    t.backward_pre[k] = cell_pre(bwd, inputs[k], next);
    t.backward[k] = activate(t.backward_pre[k], act);
  }
  return t;
}

void brnn_backward(const StepMatrices& inputs, const BrnnTrace& trace, const Cell& fwd, const Cell& bwd,
                   Activation act, const Matrix& init_forward, const Matrix& init_backward,
                   const StepMatrices& grad_forward_states, const StepMatrices& grad_backward_states,
                   Cell& grad_fwd, Cell& grad_bwd, StepMatrices* grad_inputs) {
  const std::size_t steps = inputs.size();
  if (steps == 0) return;
  const auto in = fwd.input_dim();
  const auto out_f = fwd.output_dim();
  const auto out_b = bwd.output_dim();
  if (grad_inputs != nullptr) {
    grad_inputs->assign(steps, Matrix::Zero(in, inputs[0].cols()));
  }

  Matrix carry = Matrix::Zero(out_f, inputs[0].cols());
  for (std::size_t k = steps; k-- > 0;) {
    const Matrix dh = grad_forward_states[k] + carry;
    const Matrix dz = dh.cwiseProduct(activation_slope(trace.forward_pre[k], act));
    const Matrix& prev = k == 0 ? init_forward : trace.forward[k - 1];
    grad_fwd.weight.leftCols(in).noalias() += dz * inputs[k].transpose();
    grad_fwd.weight.rightCols(out_f).noalias() += dz * prev.transpose();
    grad_fwd.bias += dz.rowwise().sum();
    if (grad_inputs != nullptr) (*grad_inputs)[k].noalias() += fwd.weight.leftCols(in).transpose() * dz;
    carry.noalias() = fwd.weight.rightCols(out_f).transpose() * dz;
  }

  carry = Matrix::Zero(out_b, inputs[0].cols());
  for (std::size_t i = 0; i < steps; ++i) {
    const Matrix dh = grad_backward_states[i] + carry;
    const Matrix dz = dh.cwiseProduct(activation_slope(trace.backward_pre[i], act));
    const Matrix& next = i + 1 == steps ? init_backward : trace.backward[i + 1];
    grad_bwd.weight.leftCols(in).noalias() += dz * inputs[i].transpose();
    grad_bwd.weight.rightCols(out_b).noalias() += dz * next.transpose();
    grad_bwd.bias += dz.rowwise().sum();
    if (grad_inputs != nullptr) (*grad_inputs)[i].noalias() += bwd.weight.leftCols(in).transpose() * dz;
    carry.noalias() = bwd.weight.rightCols(out_b).transpose() * dz;
  }
}

StepMatrices one_hot_steps(const std::vector<std::vector<int>>& messages, int alphabet) {
  require(!messages.empty(), "one_hot_steps: empty batch");
  const std::size_t steps = messages[0].size();
  const auto batch = static_cast<Eigen::Index>(messages.size());
  StepMatrices out(steps, Matrix::Zero(alphabet, batch));
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& seq = messages[static_cast<std::size_t>(b)];
    require(seq.size() == steps, "one_hot_steps: ragged batch");
    for (std::size_t t = 0; t < steps; ++t) {
      require(seq[t] >= 0 && seq[t] < alphabet, "message index out of range");
      out[t](seq[t], b) = 1.0;
    }
  }
  return out;
}

TxTrace tx_forward(StepMatrices one_hot, const TxParams& p, const Matrix& init_forward,
                   const Matrix& init_backward) {
  TxTrace t;
  t.inputs = std::move(one_hot);
  t.brnn = brnn_pass(t.inputs, p.forward, p.backward, Activation::clip, init_forward, init_backward);
  t.blocks.resize(t.inputs.size());
  for (std::size_t i = 0; i < t.inputs.size(); ++i) t.blocks[i] = 0.5 * (t.brnn.forward[i] + t.brnn.backward[i]);
  return t;
}

void tx_backward(const TxTrace& trace, const TxParams& p, const Matrix& init_forward,
                 const Matrix& init_backward, const StepMatrices& grad_blocks, TxParams& grad) {
  StepMatrices half(grad_blocks.size());
  for (std::size_t i = 0; i < grad_blocks.size(); ++i) half[i] = 0.5 * grad_blocks[i];
  brnn_backward(trace.inputs, trace.brnn, p.forward, p.backward, Activation::clip, init_forward, init_backward,
                half, half, grad.forward, grad.backward, nullptr);
}

RxTrace rx_forward(StepMatrices received, const RxParams& p, const Matrix& init_forward,
                   const Matrix& init_backward) {
  RxTrace t;
  t.inputs = std::move(received);
  t.brnn = brnn_pass(t.inputs, p.forward, p.backward, Activation::relu, init_forward, init_backward);
  const auto m2 = p.forward.output_dim();
  t.probabilities.resize(t.inputs.size());
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    Matrix logits = p.softmax_weight.leftCols(m2) * t.brnn.forward[i];
    logits.noalias() += p.softmax_weight.rightCols(m2) * t.brnn.backward[i];
    logits.colwise() += p.softmax_bias;
    t.probabilities[i] = softmax(logits);
  }
  return t;
}

void rx_backward(const RxTrace& trace, const RxParams& p, const Matrix& init_forward, const Matrix& init_backward,
                 const StepMatrices& grad_logits, RxParams& grad, StepMatrices* grad_received) {
  const auto m2 = p.forward.output_dim();
  const std::size_t steps = trace.inputs.size();
  StepMatrices gf(steps), gb(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const Matrix& dl = grad_logits[i];
    grad.softmax_weight.leftCols(m2).noalias() += dl * trace.brnn.forward[i].transpose();
    grad.softmax_weight.rightCols(m2).noalias() += dl * trace.brnn.backward[i].transpose();
    grad.softmax_bias += dl.rowwise().sum();
    gf[i].noalias() = p.softmax_weight.leftCols(m2).transpose() * dl;
    gb[i].noalias() = p.softmax_weight.rightCols(m2).transpose() * dl;
  }
  brnn_backward(trace.inputs, trace.brnn, p.forward, p.backward, Activation::relu, init_forward, init_backward, gf,
                gb, grad.forward, grad.backward, grad_received);
}

Matrix tx_encode(std::span<const int> messages, const TxParams& p) {
  const auto m = p.forward.input_dim();
  const auto n = p.forward.output_dim();
  const auto steps = static_cast<Eigen::Index>(messages.size());
  StepMatrices one_hot(messages.size(), Matrix::Zero(m, 1));
  for (std::size_t t = 0; t < messages.size(); ++t) {
    require(messages[t] >= 0 && messages[t] < m, "message index out of range");
    one_hot[t](messages[t], 0) = 1.0;
  }
  const auto trace = tx_forward(std::move(one_hot), p, Matrix::Zero(n, 1), Matrix::Zero(n, 1));
  Matrix out(n, steps);
  for (Eigen::Index t = 0; t < steps; ++t) out.col(t) = trace.blocks[static_cast<std::size_t>(t)];
  return out;
}

Matrix rx_decode(const Matrix& window, const RxParams& p) {
  const auto m2 = p.forward.output_dim();
  require(window.rows() == p.forward.input_dim(), "rx_decode: block length mismatch");
  StepMatrices steps(static_cast<std::size_t>(window.cols()));
  for (Eigen::Index t = 0; t < window.cols(); ++t) steps[static_cast<std::size_t>(t)] = window.col(t);
  const auto trace = rx_forward(std::move(steps), p, Matrix::Zero(m2, 1), Matrix::Zero(m2, 1));
  Matrix out(p.softmax_weight.rows(), window.cols());
  for (Eigen::Index t = 0; t < window.cols(); ++t) out.col(t) = trace.probabilities[static_cast<std::size_t>(t)];
  return out;
}

}  // namespace sbrnn
