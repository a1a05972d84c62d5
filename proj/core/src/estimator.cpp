#include "sbrnn/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sbrnn/error.hpp"
#include "sbrnn/rng.hpp"

namespace sbrnn {

namespace {

constexpr double kLogFloor = 1e-30;
constexpr Eigen::Index kWindowChunk = 2048;

double mean_neg_log(const Matrix& p, const Vector& a) {
  const Vector mix = p * a;
  double s = 0.0;
  for (Eigen::Index i = 0; i < mix.size(); ++i) s -= std::log(std::max(mix(i), kLogFloor));
  return s / static_cast<double>(mix.size());
}

Vector mean_neg_log_grad(const Matrix& p, const Vector& a) {
  const Vector mix = (p * a).cwiseMax(kLogFloor);
  return -(p.transpose() * mix.cwiseInverse()) / static_cast<double>(p.rows());
}

}  // namespace

Matrix label_probabilities(const ProbabilityTensor& tensor, std::span<const int> labels) {
  const int w = tensor.window;
  const Eigen::Index t_len = tensor.length();
  require(static_cast<Eigen::Index>(labels.size()) >= t_len, "label count smaller than the estimated length");
  require(t_len >= w, "sequence too short for the window");
  Matrix p(t_len - w + 1, w);
  for (Eigen::Index i = w - 1; i < t_len; ++i)
    for (int q = 0; q < w; ++q) p(i - w + 1, q) = tensor.estimate(i, q)(labels[static_cast<std::size_t>(i)]);
  return p;
}

Vector uniform_weights(int window) {
  require(window >= 1, "window must be >= 1");
  return Vector::Constant(window, 1.0 / window);
}

void validate_weights(const Vector& a, int window) {
  require(a.size() == window, "weight vector length does not match the window");
  require((a.array() >= 0.0).all(), "weights must be non-negative");
  require(std::abs(a.sum() - 1.0) <= 1e-10, "weights must sum to one");
}

ProbabilityTensor collect_probabilities(const RxParams& rx, const Matrix& blocks, int window) {
  require(window >= 1, "window must be >= 1");
  const Eigen::Index t_len = blocks.cols() - window + 1;
  require(t_len >= 1, "fewer received blocks than the window length");
  const auto m2 = rx.forward.output_dim();
  ProbabilityTensor tensor;
  tensor.window = window;
  tensor.by_offset.assign(static_cast<std::size_t>(window), Matrix(rx.softmax_weight.rows(), t_len));
  // Windows are independent; batch them as columns, in chunks to bound memory.
  for (Eigen::Index start = 0; start < t_len; start += kWindowChunk) {
    const Eigen::Index cols = std::min(kWindowChunk, t_len - start);
    StepMatrices steps(static_cast<std::size_t>(window));
    for (int q = 0; q < window; ++q) steps[static_cast<std::size_t>(q)] = blocks.middleCols(start + q, cols);
    const auto trace = rx_forward(std::move(steps), rx, Matrix::Zero(m2, cols), Matrix::Zero(m2, cols));
    for (int q = 0; q < window; ++q)
      tensor.by_offset[static_cast<std::size_t>(q)].middleCols(start, cols) =
          trace.probabilities[static_cast<std::size_t>(q)];
  }
  return tensor;
}

Matrix combine(const ProbabilityTensor& tensor, const Vector& weights) {
  const int w = tensor.window;
  validate_weights(weights, w);
  const Eigen::Index t_len = tensor.length();
  Matrix finals = Matrix::Zero(tensor.messages(), t_len);
  for (Eigen::Index i = 0; i < t_len; ++i) {
    if (i < w - 1) {
      // Edge rule: only i + 1 estimates exist, weighted equally.
      for (Eigen::Index k = 0; k <= i; ++k) finals.col(i) += tensor.estimate(i, static_cast<int>(k));
      finals.col(i) /= static_cast<double>(i + 1);
    } else {
      for (int k = 0; k < w; ++k) finals.col(i) += weights(k) * tensor.estimate(i, k);
    }
  }
  return finals;
}

Matrix slide(const RxParams& rx, const Matrix& blocks, int window, const Vector& weights) {
  return combine(collect_probabilities(rx, blocks, window), weights);
}

double average_cross_entropy(const ProbabilityTensor& tensor, std::span<const int> labels, const Vector& weights) {
  return mean_neg_log(label_probabilities(tensor, labels), weights);
}

Vector project_to_simplex(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

WeightFit optimize_weights(const ProbabilityTensor& tensor, std::span<const int> labels, int max_iterations,
                           double tolerance) {
  return optimize_weights(label_probabilities(tensor, labels), max_iterations, tolerance);
}

WeightFit optimize_weights(const Matrix& p, int max_iterations, double tolerance) {
  require(p.rows() >= 1 && p.cols() >= 1, "optimize_weights: empty probability matrix");
  const auto w = static_cast<int>(p.cols());
  WeightFit fit;
  fit.weights = uniform_weights(w);
  fit.uniform_cost = mean_neg_log(p, fit.weights);
  fit.cost = fit.uniform_cost;
  if (w == 1) {
    fit.converged = true;
    return fit;
  }

  Vector a = fit.weights;
  double cost = fit.cost;
  double step = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector g = mean_neg_log_grad(p, a);
    if ((a - project_to_simplex(a - g)).norm() < tolerance) {
      fit.converged = true;
      break;
    }
    // Backtracking on the projected step (sufficient decrease condition).
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vector cand = project_to_simplex(a - step * g);
      const Vector d = cand - a;
      const double cand_cost = mean_neg_log(p, cand);
      if (cand_cost <= cost + g.dot(d) + d.squaredNorm() / (2.0 * step)) {
        accepted = cand_cost <= cost;
        if (accepted) {
          a = cand;
          cost = cand_cost;
        }
        break;
      }
      step *= 0.5;
    }
    fit.iterations = it + 1;
    if (!accepted) {
      fit.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e6);
  }
  // Uniform is feasible; never return anything worse.
  if (cost <= fit.uniform_cost) {
    fit.weights = a;
    fit.cost = cost;
  }
  return fit;
}

std::vector<int> decide(const Matrix& finals) {
  std::vector<int> out(static_cast<std::size_t>(finals.cols()));
  for (Eigen::Index c = 0; c < finals.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < finals.rows(); ++r)
      if (finals(r, c) > finals(best, c)) best = r;
    out[static_cast<std::size_t>(c)] = static_cast<int>(best);
  }
  return out;
}

double bler(std::span<const int> labels, const Matrix& finals) {
  require(finals.cols() > 0, "bler: no fully estimated blocks");
  require(static_cast<Eigen::Index>(labels.size()) == finals.cols(), "bler: length mismatch");
  const auto d = decide(finals);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < d.size(); ++i) errors += d[i] != labels[i];
  return static_cast<double>(errors) / static_cast<double>(d.size());
}

double ber_from_decisions(std::span<const int> labels, std::span<const int> decisions, const BitLabeling& labeling) {
  require(!labels.empty(), "ber: no fully estimated blocks");
  require(labels.size() == decisions.size(), "ber: length mismatch");
  require(labeling.is_bijection(), "ber: labeling is not a bijection");
  std::size_t bit_errors = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    bit_errors += static_cast<std::size_t>(hamming(labeling.codewords.at(static_cast<std::size_t>(labels[i])),
                                                   labeling.codewords.at(static_cast<std::size_t>(decisions[i]))));
  return static_cast<double>(bit_errors) / (static_cast<double>(labels.size()) * labeling.bits);
}

double ber(std::span<const int> labels, const Matrix& finals, const BitLabeling& labeling) {
  require(static_cast<Eigen::Index>(labels.size()) == finals.cols(), "ber: length mismatch");
  const auto d = decide(finals);
  return ber_from_decisions(labels, d, labeling);
}

Matrix transmit(const TransceiverParams& params, const Channel& channel, std::span<const int> messages,
                std::uint64_t noise_seed) {
  const Matrix tx = tx_encode(messages, params.tx);
  const auto n = tx.rows();
  const auto [rx, noise] = channel.forward(std::span<const double>(tx.data(), static_cast<std::size_t>(tx.size())),
                                           noise_seed);
  return Eigen::Map<const Matrix>(rx.samples.data(), n, tx.cols());
}

Evaluation evaluate(const TransceiverParams& params, const Channel& channel, int window, const Vector& weights,
                    int sequences, int length, std::uint64_t seed, RngFamily family) {
  require(sequences >= 1 && length >= 1, "evaluate: need at least one sequence of positive length");
  Evaluation ev;
  for (int s = 0; s < sequences; ++s) {
    const auto msgs = generate_messages(static_cast<std::size_t>(length + window - 1), params.dims.messages,
                                        family, derive_seed(seed, "test-messages", static_cast<std::uint64_t>(s)));
    const Matrix blocks = transmit(params, channel, msgs, derive_seed(seed, "test-noise", static_cast<std::uint64_t>(s)));
    const auto d = decide(slide(params.rx, blocks, window, weights));
    ev.labels.insert(ev.labels.end(), msgs.begin(), msgs.begin() + length);
    ev.decisions.insert(ev.decisions.end(), d.begin(), d.end());
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < ev.labels.size(); ++i) errors += ev.labels[i] != ev.decisions[i];
  ev.bler = static_cast<double>(errors) / static_cast<double>(ev.labels.size());
  return ev;
}

}  // namespace sbrnn
