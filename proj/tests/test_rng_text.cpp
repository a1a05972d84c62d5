#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sbrnn/error.hpp"
#include "sbrnn/fft.hpp"
#include "sbrnn/rng.hpp"
#include "sbrnn/text.hpp"

using namespace sbrnn;

TEST(Rng, DeriveSeedSeparatesTagsAndIndices) {
  EXPECT_EQ(derive_seed(1, "a", 0), derive_seed(1, "a", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
}

TEST(Rng, FamiliesProduceDifferentStreams) {
  const auto mt = generate_messages(100, 64, RngFamily::mersenne_twister, 5);
  const auto taus = generate_messages(100, 64, RngFamily::tausworthe, 5);
  EXPECT_NE(mt, taus);
  for (int m : mt) EXPECT_TRUE(m >= 0 && m < 64);
  for (int m : taus) EXPECT_TRUE(m >= 0 && m < 64);
}

TEST(Rng, PiecewiseDrawEqualsSingleDraw) {
  MessageSource a(16, RngFamily::tausworthe, 9);
  std::vector<int> first, second;
  a.fill(first, 7);
  a.fill(second, 13);
  first.insert(first.end(), second.begin(), second.end());
  EXPECT_EQ(first, generate_messages(20, 16, RngFamily::tausworthe, 9));
}

TEST(Rng, MessagesAreRoughlyUniform) {
  const auto m = generate_messages(64000, 64, RngFamily::mersenne_twister, 3);
  std::vector<int> hist(64);
  for (int v : m) ++hist[static_cast<std::size_t>(v)];
  for (int c : hist) EXPECT_NEAR(c, 1000, 150);
}

TEST(Rng, ParsesFamilyNames) {
  EXPECT_EQ(parse_rng_family("mt"), RngFamily::mersenne_twister);
  EXPECT_EQ(parse_rng_family("tausworthe"), RngFamily::tausworthe);
  EXPECT_THROW(parse_rng_family("lcg"), ConfigError);
}

TEST(Text, DoubleRoundTripsExactly) {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0), -2.5e-7})
    EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  EXPECT_EQ(parse_double(format_double(std::numeric_limits<double>::infinity())),
            std::numeric_limits<double>::infinity());
}

TEST(Text, RejectsGarbage) {
  EXPECT_THROW(parse_double("1.5x"), ConfigError);
  EXPECT_THROW(parse_integer("12.0"), ConfigError);
  EXPECT_EQ(parse_integer(" 42 "), 42);
}

TEST(Text, SplitKeepsEmptyFields) {
  const auto f = split("a,,b,", ',');
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[3], "");
}

TEST(Fft, MatchesNaiveDft) {
  const std::size_t n = 30;
  std::vector<fft::cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = {std::sin(0.3 * i), std::cos(1.1 * i * i)};
  auto y = x;
  fft::forward(y);
  for (std::size_t k = 0; k < n; ++k) {
    fft::cplx acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * std::polar(1.0, -2.0 * M_PI * double(k * j) / double(n));
    EXPECT_NEAR(std::abs(acc - y[k]), 0.0, 1e-11);
  }
  fft::inverse(y);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(std::abs(y[i] - x[i]), 0.0, 1e-13);
}

TEST(Fft, GoodSizeIsSevenSmooth) {
  for (std::size_t n : {1u, 11u, 97u, 1000u, 1031u}) {
    auto g = fft::good_size(n);
    EXPECT_GE(g, n);
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (g % p == 0) g /= p;
    EXPECT_EQ(g, 1u);
  }
  EXPECT_EQ(fft::good_size(11), 12u);
}

TEST(Fft, BinOmegaIsSigned) {
  const double fs = 8.0;
  EXPECT_DOUBLE_EQ(fft::bin_omega(1, 8, fs), 2 * M_PI);
  EXPECT_DOUBLE_EQ(fft::bin_omega(7, 8, fs), -2 * M_PI);
  EXPECT_DOUBLE_EQ(fft::bin_omega(4, 8, fs), 2 * M_PI * 4);
}
