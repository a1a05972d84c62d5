#include <gtest/gtest.h>

#include "sbrnn/complexity.hpp"
#include "sbrnn/error.hpp"

using namespace sbrnn;

TEST(Flops, TransmitterPerBit) {
  // 2 n (2 (M + n) + 1) / log2 M
  EXPECT_DOUBLE_EQ(flops_sbrnn_tx(64, 48), 2.0 * 48 * (2 * (64 + 48) + 1) / 6);
  EXPECT_DOUBLE_EQ(flops_sbrnn_tx(2, 1), 14.0);
}

TEST(Flops, ReceiverPerBit) {
  EXPECT_DOUBLE_EQ(flops_sbrnn_rx(64, 48, 10), 10.0 * (24 * 4096 + 8 * 64 * 48 + 5 * 64 + 2) / 6);
  EXPECT_DOUBLE_EQ(flops_sbrnn_rx(64, 48, 10), 1232020.0 / 6.0);
  EXPECT_DOUBLE_EQ(flops_sbrnn_rx(64, 48, 0), 0.0);
  EXPECT_THROW(flops_sbrnn_rx(48, 8, 2), ConfigError);
}

TEST(Flops, ReceiverLinearInWindow) {
  for (int w = 1; w < 12; ++w) EXPECT_DOUBLE_EQ(flops_sbrnn_rx(16, 8, w), w * flops_sbrnn_rx(16, 8, 1));
}

TEST(Flops, MlsdPerBit) {
  EXPECT_DOUBLE_EQ(flops_mlsd(2, 12), 9.0 * 8192);
  EXPECT_DOUBLE_EQ(flops_mlsd(2, 12), 73728.0);
  EXPECT_DOUBLE_EQ(flops_mlsd(4, 6), 9.0 * 16384 / 2);
  EXPECT_DOUBLE_EQ(flops_mlsd(2, 2, 4), 17.0 * 8);
}

TEST(Flops, MlsdGrowsByOrderPerMemoryStep) {
  for (int mu = 0; mu < 10; mu += 2) EXPECT_DOUBLE_EQ(flops_mlsd(4, mu + 1), 4.0 * flops_mlsd(4, mu));
}

TEST(Flops, ReportCollectsAll) {
  const auto r = FlopsReport::compute(64, 48, 10, 2, 12, 2);
  EXPECT_DOUBLE_EQ(r.sbrnn_tx, 3600.0);
  EXPECT_DOUBLE_EQ(r.sbrnn_rx, 1232020.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.mlsd, 73728.0);
}
