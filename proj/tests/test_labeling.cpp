#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "sbrnn/error.hpp"
#include "sbrnn/labeling.hpp"
#include "sbrnn/rng.hpp"

using namespace sbrnn;

namespace {

ConfusionMatrix random_confusion(int m, std::uint64_t seed) {
  Rng rng(seed);
  ConfusionMatrix c;
  c.probs = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) c.probs(i, j) = static_cast<double>(rng() % 100) * (i == j ? 10.0 : 1.0);
    c.probs.row(i) /= c.probs.row(i).sum();
  }
  c.unobserved_rows.assign(static_cast<std::size_t>(m), false);
  return c;
}

}  // namespace

TEST(Labeling, GrayNeighboursDifferInOneBit) {
  const auto g = BitLabeling::gray(16);
  EXPECT_EQ(g.bits, 4);
  EXPECT_TRUE(g.is_bijection());
  for (int m = 0; m + 1 < 16; ++m) EXPECT_EQ(hamming(g.codewords[m], g.codewords[m + 1]), 1);
  EXPECT_EQ(g.codewords[2], 3u);
}

TEST(Labeling, RandomIsSeededBijection) {
  const auto a = BitLabeling::random(64, 1);
  EXPECT_TRUE(a.is_bijection());
  EXPECT_EQ(a, BitLabeling::random(64, 1));
  EXPECT_NE(a, BitLabeling::random(64, 2));
}

TEST(Confusion, RowsNormalizedAndUnobservedUniform) {
  const std::vector<int> labels{0, 0, 1, 1, 1, 0};
  const std::vector<int> decisions{0, 1, 1, 1, 0, 0};
  const auto c = estimate_confusion(labels, decisions, 4);
  EXPECT_DOUBLE_EQ(c.probs(0, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.probs(1, 0), 1.0 / 3.0);
  EXPECT_TRUE(c.unobserved_rows[2]);
  EXPECT_DOUBLE_EQ(c.probs(3, 2), 0.25);
}

TEST(ExpectedBer, MatchesEmpiricalCount) {
  const std::vector<int> labels{0, 1, 2, 3, 0, 1, 2, 3};
  const std::vector<int> decisions{0, 2, 2, 0, 0, 1, 1, 3};
  const auto c = estimate_confusion(labels, decisions, 4);
  const auto g = BitLabeling::gray(4);
  int bit_errors = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) bit_errors += hamming(g.codewords[labels[i]], g.codewords[decisions[i]]);
  // Balanced labels, so the uniform-prior expectation equals the count.
  EXPECT_DOUBLE_EQ(expected_ber(g, c), bit_errors / 16.0);
  EXPECT_DOUBLE_EQ(ber_lower_bound(c, 2), 3.0 / 16.0);
  EXPECT_LE(ber_lower_bound(c, 2), expected_ber(g, c));
}

TEST(Tabu, NeverWorseThanStartAndTraceMonotone) {
  const auto c = random_confusion(16, 3);
  const auto r = tabu_search(c, 4, 200);
  EXPECT_LE(r.best_cost, r.start_cost);
  EXPECT_TRUE(r.best.is_bijection());
  EXPECT_NEAR(r.best_cost, expected_ber(r.best, c), 1e-15);
  ASSERT_EQ(r.best_cost_trace.size(), 200u);
  for (std::size_t i = 1; i < r.best_cost_trace.size(); ++i) EXPECT_LE(r.best_cost_trace[i], r.best_cost_trace[i - 1]);
}

TEST(Tabu, ReachesExhaustiveOptimumForEightMessages) {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const auto c = random_confusion(8, seed);
    BitLabeling l{3, {0, 1, 2, 3, 4, 5, 6, 7}};
    double best = 1e300;
    do best = std::min(best, expected_ber(l, c));
    while (std::next_permutation(l.codewords.begin(), l.codewords.end()));
    const auto r = tabu_search(c, seed, 1000);
    EXPECT_NEAR(r.best_cost, best, 1e-12) << "seed " << seed;
  }
}

TEST(Tabu, RejectsNonBijectiveStart) {
  const auto c = random_confusion(4, 1);
  EXPECT_THROW(tabu_search(c, BitLabeling{2, {0, 0, 1, 2}}), ConfigError);
}

TEST(Labeling, TextRoundTrip) {
  const auto a = BitLabeling::random(32, 9);
  const auto text = format_labeling(a);
  EXPECT_EQ(text.substr(0, 6), [&] {
    std::string s;
    for (int b = 4; b >= 0; --b) s += ((a.codewords[0] >> b) & 1u) ? '1' : '0';
    return s + "\n";
  }());
  EXPECT_EQ(parse_labeling(text), a);
  EXPECT_THROW(parse_labeling("01\n1\n"), ConfigError);
}
