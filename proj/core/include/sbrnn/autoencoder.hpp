#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbrnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One matrix per time step, columns are independent sequences (batch).
using StepMatrices = std::vector<Matrix>;

struct AutoencoderDims {
  int messages = 64;  ///< M, must be a power of two
  int samples = 48;   ///< n, samples per transmitted block

  int bits() const;
  void validate() const;
  bool operator==(const AutoencoderDims&) const = default;
};

enum class Activation { relu, clip };

/// ReLU(x) - ReLU(x - pi/4), elementwise.
Matrix clipping_activation(const Matrix& x);
Matrix relu(const Matrix& x);
/// Column-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);
Vector softmax(const Vector& logits);

/// Concatenation cell h_t = act(W [x_t; h_{t-1}] + b).
struct Cell {
  Matrix weight;  ///< out x (in + out)
  Vector bias;    ///< out

  Eigen::Index output_dim() const { return weight.rows(); }
  Eigen::Index input_dim() const { return weight.cols() - weight.rows(); }
  static Cell zeros(Eigen::Index in, Eigen::Index out);
};

struct TxParams {
  Cell forward;   ///< n x (M + n)
  Cell backward;
};

struct RxParams {
  Cell forward;   ///< 2M x (n + 2M)
  Cell backward;
  Matrix softmax_weight;  ///< M x 4M
  Vector softmax_bias;    ///< M
};

struct TransceiverParams {
  AutoencoderDims dims;
  TxParams tx;
  RxParams rx;

  static TransceiverParams zeros(const AutoencoderDims& dims);
  /// Glorot-uniform weights, zero biases.
  static TransceiverParams glorot(const AutoencoderDims& dims, std::uint64_t seed);

  void validate() const;
};

/// Mutable view of one named parameter array (row-major order is only a
/// serialization concern; `data` is Eigen's column-major storage).
struct ArrayRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Map<Matrix> map() const { return {data, rows, cols}; }
};

/// All trainable arrays in a fixed order.
std::vector<ArrayRef> parameter_arrays(TransceiverParams& params);

struct BrnnTrace {
  StepMatrices forward;       ///< forward-direction states h_t
  StepMatrices backward;      ///< backward-direction states
  StepMatrices forward_pre;   ///< pre-activations
  StepMatrices backward_pre;
};

/// Runs both directions. `init_forward` seeds h_{-1}, `init_backward` seeds
/// the state after the last step; both are out x batch.
BrnnTrace brnn_pass(const StepMatrices& inputs, const Cell& fwd, const Cell& bwd, Activation act,
                    const Matrix& init_forward, const Matrix& init_backward);

/// Reverse-mode pass through brnn_pass. Accumulates into `grad_fwd`/`grad_bwd`
/// and, when `grad_inputs` is non-null, writes d(loss)/d(inputs).
void brnn_backward(const StepMatrices& inputs, const BrnnTrace& trace, const Cell& fwd, const Cell& bwd,
                   Activation act, const Matrix& init_forward, const Matrix& init_backward,
                   const StepMatrices& grad_forward_states, const StepMatrices& grad_backward_states,
                   Cell& grad_fwd, Cell& grad_bwd, StepMatrices* grad_inputs);

/// One-hot matrices for a batch: steps[t](m, b) = 1 iff messages[b][t] == m.
StepMatrices one_hot_steps(const std::vector<std::vector<int>>& messages, int alphabet);

struct TxTrace {
  StepMatrices inputs;
  BrnnTrace brnn;
  StepMatrices blocks;  ///< merged outputs, n x batch
};

TxTrace tx_forward(StepMatrices one_hot, const TxParams& p, const Matrix& init_forward,
                   const Matrix& init_backward);
void tx_backward(const TxTrace& trace, const TxParams& p, const Matrix& init_forward,
                 const Matrix& init_backward, const StepMatrices& grad_blocks, TxParams& grad);

struct RxTrace {
  StepMatrices inputs;
  BrnnTrace brnn;
  StepMatrices probabilities;  ///< M x batch
};

RxTrace rx_forward(StepMatrices received, const RxParams& p, const Matrix& init_forward,
                   const Matrix& init_backward);
/// `grad_logits` is d(loss)/d(softmax input) per step.
void rx_backward(const RxTrace& trace, const RxParams& p, const Matrix& init_forward, const Matrix& init_backward,
                 const StepMatrices& grad_logits, RxParams& grad, StepMatrices* grad_received);

/// Encodes one message sequence (indices in [0, M)) from zero states.
/// Returns n x T, one column per block, every sample in [0, pi/4].
Matrix tx_encode(std::span<const int> messages, const TxParams& p);

/// Decodes one window of received blocks (n x W) from zero states.
/// Returns M x W probability vectors.
Matrix rx_decode(const Matrix& window, const RxParams& p);

}  // namespace sbrnn
