#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sbrnn/autoencoder.hpp"
#include "sbrnn/error.hpp"
#include "sbrnn/rng.hpp"

using namespace sbrnn;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * (static_cast<double>(rng() >> 11) / 9007199254740992.0 - 0.5);
  return m;
}

Cell random_cell(Eigen::Index in, Eigen::Index out, std::uint64_t seed) {
  Cell c;
  c.weight = random_matrix(out, in + out, seed, 1.5);
  c.bias = random_matrix(out, 1, seed + 1, 0.5);
  return c;
}

}  // namespace

TEST(Activations, ClippingActivationLimitsRange) {
  Matrix x(1, 5);
  x << -1.0, 0.0, 0.3, std::numbers::pi / 4, 2.0;
  const Matrix y = clipping_activation(x);
  EXPECT_DOUBLE_EQ(y(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(y(0, 2), 0.3);
  EXPECT_DOUBLE_EQ(y(0, 3), std::numbers::pi / 4);
  EXPECT_DOUBLE_EQ(y(0, 4), std::numbers::pi / 4);
}

TEST(Activations, SoftmaxIsStableAndNormalized) {
  Vector l(3);
  l << 1000.0, 1000.0, -1000.0;
  const Vector p = softmax(l);
  EXPECT_NEAR(p(0), 0.5, 1e-15);
  EXPECT_NEAR(p(2), 0.0, 1e-15);
  const Matrix pm = softmax(random_matrix(8, 5, 3, 20.0));
  for (Eigen::Index c = 0; c < 5; ++c) EXPECT_NEAR(pm.col(c).sum(), 1.0, 1e-14);
}

TEST(Params, GlorotBoundsAndZeroBiases) {
  const AutoencoderDims d{16, 8};
  const auto p = TransceiverParams::glorot(d, 1);
  p.validate();
  const double tx_bound = std::sqrt(6.0 / (8 + 24));
  EXPECT_LE(p.tx.forward.weight.cwiseAbs().maxCoeff(), tx_bound);
  EXPECT_GT(p.tx.forward.weight.cwiseAbs().maxCoeff(), 0.5 * tx_bound);
  EXPECT_TRUE(p.tx.forward.bias.isZero());
  EXPECT_TRUE(p.rx.softmax_bias.isZero());
  EXPECT_EQ(p.rx.softmax_weight.rows(), 16);
  EXPECT_EQ(p.rx.softmax_weight.cols(), 64);
  EXPECT_EQ(p.rx.forward.weight.rows(), 32);
  EXPECT_EQ(p.rx.forward.weight.cols(), 8 + 32);
  const auto q = TransceiverParams::glorot(d, 1);
  EXPECT_TRUE(p.tx.backward.weight == q.tx.backward.weight);
  EXPECT_FALSE(p.tx.backward.weight == TransceiverParams::glorot(d, 2).tx.backward.weight);
}

TEST(Params, DimsMustBePowerOfTwo) {
  EXPECT_THROW((AutoencoderDims{48, 4}.validate()), ConfigError);
  EXPECT_EQ((AutoencoderDims{64, 48}.bits()), 6);
}

TEST(Params, ArraysListedInFixedOrder) {
  auto p = TransceiverParams::zeros({4, 4});
  const auto a = parameter_arrays(p);
  ASSERT_EQ(a.size(), 10u);
  EXPECT_EQ(a[0].name, "tx.forward.weight");
  EXPECT_EQ(a[9].name, "rx.softmax.bias");
  EXPECT_EQ(a[8].rows, 4);
  EXPECT_EQ(a[8].cols, 16);
}

TEST(Transmitter, OutputsStayInDriveRange) {
  const auto p = TransceiverParams::glorot({16, 12}, 4);
  const std::vector<int> msgs{0, 3, 15, 7, 7, 1, 9};
  const Matrix x = tx_encode(msgs, p.tx);
  EXPECT_EQ(x.rows(), 12);
  EXPECT_EQ(x.cols(), 7);
  EXPECT_GE(x.minCoeff(), 0.0);
  EXPECT_LE(x.maxCoeff(), std::numbers::pi / 4);
}

TEST(Transmitter, MergeAveragesDirections) {
  const auto p = TransceiverParams::glorot({8, 6}, 5);
  const std::vector<std::vector<int>> msgs{{1, 2, 3, 4}};
  const auto one_hot = one_hot_steps(msgs, 8);
  const Matrix z = Matrix::Zero(6, 1);
  const auto trace = tx_forward(one_hot, p.tx, z, z);
  const auto brnn = brnn_pass(one_hot, p.tx.forward, p.tx.backward, Activation::clip, z, z);
  for (std::size_t t = 0; t < 4; ++t)
    EXPECT_TRUE(trace.blocks[t].isApprox(0.5 * (brnn.forward[t] + brnn.backward[t]), 1e-15));
}

TEST(Transmitter, BackwardDirectionSeesFuture) {
  const auto p = TransceiverParams::glorot({8, 6}, 6);
  const Matrix a = tx_encode(std::vector<int>{1, 2, 3}, p.tx);
  const Matrix b = tx_encode(std::vector<int>{1, 2, 5}, p.tx);
  EXPECT_FALSE(a.col(0).isApprox(b.col(0)));
}

TEST(Receiver, DecodeGivesDistributions) {
  const auto p = TransceiverParams::glorot({16, 8}, 7);
  const Matrix probs = rx_decode(random_matrix(8, 5, 8), p.rx);
  EXPECT_EQ(probs.rows(), 16);
  EXPECT_EQ(probs.cols(), 5);
  for (Eigen::Index c = 0; c < 5; ++c) EXPECT_NEAR(probs.col(c).sum(), 1.0, 1e-12);
  EXPECT_GE(probs.minCoeff(), 0.0);
}

TEST(Receiver, BatchedColumnsAreIndependent) {
  const auto p = TransceiverParams::glorot({8, 4}, 9);
  StepMatrices steps;
  for (int t = 0; t < 3; ++t) steps.push_back(random_matrix(4, 2, 10 + t));
  const Matrix z = Matrix::Zero(16, 2);
  const auto both = rx_forward(steps, p.rx, z, z);
  Matrix window(4, 3);
  for (int t = 0; t < 3; ++t) window.col(t) = steps[static_cast<std::size_t>(t)].col(1);
  const Matrix single = rx_decode(window, p.rx);
  for (int t = 0; t < 3; ++t) EXPECT_TRUE(both.probabilities[static_cast<std::size_t>(t)].col(1).isApprox(single.col(t), 1e-14));
}

// Finite-difference check of brnn_backward for both activations.
class BrnnGradient : public ::testing::TestWithParam<Activation> {};

TEST_P(BrnnGradient, MatchesCentralDifferences) {
  const Activation act = GetParam();
  const Eigen::Index in = 3, out = 4, batch = 2;
  const std::size_t steps = 4;
  Cell fwd = random_cell(in, out, 1), bwd = random_cell(in, out, 3);
  if (act == Activation::clip) {
    // Keep pre-activations near the middle of the linear region.
    fwd.bias.array() += 0.4;
    bwd.bias.array() += 0.4;
  }
  StepMatrices x;
  for (std::size_t t = 0; t < steps; ++t) x.push_back(random_matrix(in, batch, 10 + t));
  const Matrix init_f = random_matrix(out, batch, 20, 0.5), init_b = random_matrix(out, batch, 21, 0.5);
  StepMatrices cf, cb;
  for (std::size_t t = 0; t < steps; ++t) {
    cf.push_back(random_matrix(out, batch, 30 + t));
    cb.push_back(random_matrix(out, batch, 40 + t));
  }
  auto objective = [&](const Cell& f, const Cell& b, const StepMatrices& xs) {
    const auto tr = brnn_pass(xs, f, b, act, init_f, init_b);
    double s = 0.0;
    for (std::size_t t = 0; t < steps; ++t) s += (cf[t].cwiseProduct(tr.forward[t])).sum() + (cb[t].cwiseProduct(tr.backward[t])).sum();
    return s;
  };
  const auto trace = brnn_pass(x, fwd, bwd, act, init_f, init_b);
  Cell gf = Cell::zeros(in, out), gb = Cell::zeros(in, out);
  StepMatrices gx;
  brnn_backward(x, trace, fwd, bwd, act, init_f, init_b, cf, cb, gf, gb, &gx);

  const double h = 1e-6;
  for (Eigen::Index i = 0; i < fwd.weight.size(); i += 3) {
    Cell p = fwd, m = fwd;
    p.weight.data()[i] += h;
    m.weight.data()[i] -= h;
    EXPECT_NEAR((objective(p, bwd, x) - objective(m, bwd, x)) / (2 * h), gf.weight.data()[i], 1e-7);
  }
  for (Eigen::Index i = 0; i < bwd.bias.size(); ++i) {
    Cell p = bwd, m = bwd;
    p.bias(i) += h;
    m.bias(i) -= h;
    EXPECT_NEAR((objective(fwd, p, x) - objective(fwd, m, x)) / (2 * h), gb.bias(i), 1e-7);
  }
  for (std::size_t t = 0; t < steps; ++t) {
    auto p = x, m = x;
    p[t](1, 0) += h;
    m[t](1, 0) -= h;
    EXPECT_NEAR((objective(fwd, bwd, p) - objective(fwd, bwd, m)) / (2 * h), gx[t](1, 0), 1e-7);
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, BrnnGradient, ::testing::Values(Activation::relu, Activation::clip));
