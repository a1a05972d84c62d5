#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "sbrnn/channel.hpp"
#include "sbrnn/error.hpp"

using namespace sbrnn;
using cplx = std::complex<double>;

namespace {

constexpr double kRate = 336e9;

double energy(const std::vector<cplx>& x) {
  double e = 0.0;
  for (const auto& v : x) e += std::norm(v);
  return e;
}

std::vector<double> random_drive(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = kDriveMax * (0.05 + 0.9 * (static_cast<double>(rng() >> 11) / 9007199254740992.0));
  return x;
}

ChannelConfig quiet(double km) {
  ChannelConfig c;
  c.distance_km = km;
  c.noise = NoiseSwitches::none();
  return c;
}

}  // namespace

TEST(Lowpass, DcPassesUnchanged) {
  Waveform w{std::vector<double>(256, 0.37), kRate};
  const auto out = lowpass_filter(w, 32e9);
  for (double v : out.samples) EXPECT_NEAR(v, 0.37, 1e-14);
}

TEST(Lowpass, SinusoidAtTwiceBandwidthIsRemoved) {
  // 64 GHz at 336 GSa/s completes an integer number of cycles in 2100 samples.
  const double b = 32e9;
  Waveform w{std::vector<double>(2100), kRate};
  for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = std::sin(2 * std::numbers::pi * 2 * b * i / kRate);
  const auto out = lowpass_filter(w, b);
  const double pin = std::inner_product(w.samples.begin(), w.samples.end(), w.samples.begin(), 0.0);
  const double pout = std::inner_product(out.samples.begin(), out.samples.end(), out.samples.begin(), 0.0);
  EXPECT_LT(pout, 1e-6 * pin);
}

TEST(Lowpass, InBandSinusoidPasses) {
  Waveform w{std::vector<double>(2100), kRate};
  for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = std::cos(2 * std::numbers::pi * 16e9 * i / kRate);
  const auto out = lowpass_filter(w, 32e9);
  for (std::size_t i = 0; i < w.samples.size(); ++i) EXPECT_NEAR(out.samples[i], w.samples[i], 1e-12);
}

TEST(Lowpass, NyquistBandwidthIsIdentity) {
  Waveform w{random_drive(301, 4), kRate};
  const auto out = lowpass_filter(w, kRate / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) EXPECT_NEAR(out.samples[i], w.samples[i], 1e-14);
}

TEST(Lowpass, BandwidthAboveNyquistIsRejected) {
  Waveform w{std::vector<double>(8, 1.0), kRate};
  EXPECT_THROW(lowpass_filter(w, 0.51 * kRate), ConfigError);
}

TEST(Lowpass, IsLinear) {
  const auto x = random_drive(500, 1), y = random_drive(500, 2);
  const double a = 0.7, b = -1.9;
  std::vector<double> mix(500);
  for (std::size_t i = 0; i < 500; ++i) mix[i] = a * x[i] + b * y[i];
  const auto fx = lowpass_filter({x, kRate}, 32e9).samples;
  const auto fy = lowpass_filter({y, kRate}, 32e9).samples;
  const auto fm = lowpass_filter({mix, kRate}, 32e9).samples;
  for (std::size_t i = 0; i < 500; ++i) EXPECT_NEAR(fm[i], a * fx[i] + b * fy[i], 1e-9 * (std::abs(fm[i]) + 1));
}

TEST(Quantizer, StepFollowsResolution) {
  EXPECT_DOUBLE_EQ(quantizer_step(6, std::numbers::pi / 4), (std::numbers::pi / 4) / 64);
  EXPECT_DOUBLE_EQ(quantizer_step(1, 2.0), 1.0);
}

TEST(Quantizer, NoiseIsBoundedAndCentred) {
  const double step = quantizer_step(6, kDriveMax);
  Rng rng(11);
  const auto n = uniform_quantization_noise(1000000, step, rng);
  double mean = 0.0;
  for (double v : n) {
    ASSERT_LE(std::abs(v), step / 2);
    mean += v;
  }
  mean /= static_cast<double>(n.size());
  EXPECT_LT(std::abs(mean), step / 200);
}

TEST(Quantizer, HighResolutionApproachesInput) {
  Rng rng(3);
  Waveform w{random_drive(100, 5), kRate};
  const auto out = quantize_noise(w, 40, kDriveMax, rng);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(out.samples[i], w.samples[i], 1e-12);
}

TEST(Quantizer, EmptyWaveformStaysEmpty) {
  Rng rng(3);
  EXPECT_TRUE(quantize_noise(Waveform{{}, kRate}, 6, kDriveMax, rng).samples.empty());
}

TEST(Mzm, SineTransferAndClamping) {
  std::size_t clamped = 0;
  const auto f = mzm_modulate(Waveform{{0.0, kDriveMax, 0.3, -0.1, 1.0}, kRate}, ModulatorModel::sine, &clamped);
  EXPECT_EQ(f.samples[0], cplx(0.0));
  EXPECT_NEAR(f.samples[1].real(), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_NEAR(f.samples[2].real(), std::sin(0.3), 1e-15);
  EXPECT_EQ(f.samples[3], cplx(0.0));
  EXPECT_NEAR(f.samples[4].real(), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_EQ(clamped, 2u);
}

TEST(Mzm, MonotonicOverDriveRange) {
  std::vector<double> d(200);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = kDriveMax * i / 199.0;
  const auto f = mzm_modulate(Waveform{d, kRate});
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GT(f.samples[i].real(), f.samples[i - 1].real());
}

TEST(Fiber, Beta2FromDispersionParameter) {
  // D [ps/(nm km)] -> s/m^2 is a factor 1e-6.
  const double c = 299792458.0, lambda = 1550e-9, d = 17e-6;
  ChannelConfig cfg;
  EXPECT_NEAR(cfg.beta2(), -d * lambda * lambda / (2 * std::numbers::pi * c), 1e-40);
  EXPECT_NEAR(cfg.beta2() * 1e27, -21.68, 0.01);  // about -21.7 ps^2/km
}

TEST(Fiber, ZeroLengthIsIdentity) {
  OpticalField f{{}, kRate};
  for (double v : random_drive(64, 8)) f.samples.emplace_back(v, -0.5 * v);
  auto cfg = quiet(0.0);
  const auto out = propagate_fiber(f, cfg);
  ASSERT_EQ(out.samples.size(), f.samples.size());
  for (std::size_t i = 0; i < f.samples.size(); ++i) EXPECT_NEAR(std::abs(out.samples[i] - f.samples[i]), 0.0, 1e-15);
}

TEST(Fiber, DispersionConservesEnergy) {
  auto cfg = quiet(60.0);
  cfg.attenuation_db_km = 0.0;
  OpticalField f{{}, kRate};
  for (double v : random_drive(700, 9)) f.samples.emplace_back(std::sin(v));
  const auto out = propagate_fiber(f, cfg);
  EXPECT_GE(out.samples.size(), f.samples.size() + 2 * fiber_guard(cfg));
  EXPECT_NEAR(energy(out.samples) / energy(f.samples), 1.0, 1e-9);
}

TEST(Fiber, HundredKilometresLoseTwentyDecibels) {
  auto cfg = quiet(100.0);
  OpticalField f{{}, kRate};
  for (double v : random_drive(300, 10)) f.samples.emplace_back(std::sin(v));
  const auto out = propagate_fiber(f, cfg);
  EXPECT_NEAR(energy(out.samples) / energy(f.samples), 1e-2, 1e-11);
  EXPECT_DOUBLE_EQ(cfg.amplitude_loss(), 0.1);
}

TEST(Fiber, IsLinear) {
  auto cfg = quiet(30.0);
  OpticalField x{{}, kRate}, y{{}, kRate}, m{{}, kRate};
  const auto a = random_drive(200, 1), b = random_drive(200, 2);
  const cplx ca(0.3, -1.2), cb(-2.0, 0.5);
  for (std::size_t i = 0; i < 200; ++i) {
    x.samples.emplace_back(a[i]);
    y.samples.emplace_back(0.0, b[i]);
    m.samples.push_back(ca * x.samples[i] + cb * y.samples[i]);
  }
  const auto fx = propagate_fiber(x, cfg).samples, fy = propagate_fiber(y, cfg).samples;
  const auto fm = propagate_fiber(m, cfg).samples;
  for (std::size_t i = 0; i < fm.size(); ++i) EXPECT_NEAR(std::abs(fm[i] - (ca * fx[i] + cb * fy[i])), 0.0, 1e-9);
}

TEST(Fiber, GaussianPulseMatchesClosedForm) {
  // A Gaussian field exp(-t^2 / 2 T0^2) through exp(i beta2 L w^2 / 2) stays
  // Gaussian: T0 / sqrt(q) exp(-t^2 / 2 q) with q = T0^2 - i beta2 L.
  auto cfg = quiet(20.0);
  cfg.attenuation_db_km = 0.0;
  const double t0 = 20e-12;
  const std::size_t n = 1024;
  const double centre = 0.5 * (n - 1);
  OpticalField f{std::vector<cplx>(n), kRate};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (i - centre) / kRate;
    f.samples[i] = std::exp(-t * t / (2 * t0 * t0));
  }
  const auto out = propagate_fiber(f, cfg);
  const std::size_t g = fiber_guard(cfg);
  const cplx q(t0 * t0, -cfg.beta2() * cfg.distance_km * 1e3);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (i - centre) / kRate;
    const cplx expect = t0 / std::sqrt(q) * std::exp(-t * t / (2.0 * q));
    worst = std::max(worst, std::abs(out.samples[g + i] - expect));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Photodetector, SquareLaw) {
  const auto out = photodetect(OpticalField{{cplx(0.5, 0), cplx(0, 0), cplx(0.3, 0.4)}, kRate});
  EXPECT_DOUBLE_EQ(out.samples[0], 0.25);
  EXPECT_DOUBLE_EQ(out.samples[1], 0.0);
  EXPECT_NEAR(out.samples[2], 0.25, 1e-16);
  const cplx rot = std::polar(1.0, 1.234);
  const auto rotated = photodetect(OpticalField{{cplx(0.3, 0.4) * rot}, kRate});
  EXPECT_NEAR(rotated.samples[0], out.samples[2], 1e-15);
}

TEST(Channel, BackToBackNoiselessIsSineSquared) {
  auto cfg = quiet(0.0);
  cfg.lpf_bandwidth = cfg.simulation_rate() / 2;
  const Channel ch(cfg);
  const auto tx = random_drive(400, 12);
  const auto [rx, noise] = ch.forward(tx, 1);
  for (std::size_t i = 0; i < tx.size(); ++i) EXPECT_NEAR(rx.samples[i], std::pow(std::sin(tx[i]), 2), 1e-14);
}

TEST(Channel, ZeroInputNoiselessGivesZero) {
  const Channel ch(quiet(40.0));
  const auto [rx, noise] = ch.forward(std::vector<double>(480, 0.0), 1);
  for (double v : rx.samples) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Channel, FixedSeedIsBitIdentical) {
  ChannelConfig cfg;
  cfg.distance_km = 30;
  const Channel ch(cfg);
  const auto tx = random_drive(960, 13);
  const auto a = ch.forward(tx, 77).first.samples;
  const auto b = ch.forward(tx, 77).first.samples;
  EXPECT_EQ(a, b);
  EXPECT_NE(a, ch.forward(tx, 78).first.samples);
}

TEST(Channel, NoiseRealizationRespectsBounds) {
  ChannelConfig cfg;
  cfg.distance_km = 10;
  const Channel ch(cfg);
  const auto noise = ch.sample_noise(1000000, 5);
  for (double v : noise.dac) ASSERT_LE(std::abs(v), noise.dac_step / 2);
  for (double v : noise.adc) ASSERT_LE(std::abs(v), noise.adc_step / 2);
  EXPECT_DOUBLE_EQ(noise.dac_step, kDriveMax / 64);
  double s = 0.0, s2 = 0.0;
  for (double v : noise.receiver) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(noise.receiver.size());
  const double var = s2 / n - (s / n) * (s / n);
  EXPECT_NEAR(var / cfg.noise_variance(), 1.0, 0.05);
}

TEST(Channel, AdcRangeCoversNoiselessSignal) {
  const Channel ch(quiet(50.0));
  EXPECT_GT(ch.adc_high(), ch.adc_low());
  const auto [rx, noise] = ch.forward(random_drive(4800, 14), 0);
  for (double v : rx.samples) {
    EXPECT_GE(v, ch.adc_low() - 0.05 * (ch.adc_high() - ch.adc_low()));
    EXPECT_LE(v, ch.adc_high() + 0.05 * (ch.adc_high() - ch.adc_low()));
  }
}

TEST(Channel, DisabledSwitchesDrawNothing) {
  const Channel ch(quiet(10.0));
  const auto noise = ch.sample_noise(100, 1);
  EXPECT_TRUE(noise.dac.empty() && noise.receiver.empty() && noise.adc.empty());
}

TEST(Channel, PassthroughIsIdentity) {
  ChannelConfig cfg;
  cfg.passthrough = true;
  const Channel ch(cfg);
  const std::vector<double> tx{1.0, -2.0, 3.5};
  EXPECT_EQ(ch.forward(tx, 1).first.samples, tx);
  const auto pass = ch.forward(tx, ch.sample_noise(3, 1));
  EXPECT_EQ(ch.backward(pass, tx), tx);
}

class ChannelGradient : public ::testing::TestWithParam<double> {};

TEST_P(ChannelGradient, MatchesCentralDifferences) {
  ChannelConfig cfg;
  cfg.distance_km = GetParam();
  const Channel ch(cfg);
  const std::size_t n = 192;
  const auto tx = random_drive(n, 21);
  const auto noise = ch.sample_noise(n, 22);
  std::vector<double> w(n);
  Rng rng(23);
  for (auto& v : w) v = static_cast<double>(rng() >> 11) / 9007199254740992.0 - 0.5;
  auto objective = [&](const std::vector<double>& x) {
    const auto y = ch.forward(x, noise).received.samples;
    return std::inner_product(y.begin(), y.end(), w.begin(), 0.0);
  };
  const auto grad = ch.backward(ch.forward(tx, noise), w);
  const double h = 1e-6;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; i += 7) {
    auto xp = tx, xm = tx;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (objective(xp) - objective(xm)) / (2 * h);
    num = std::max(num, std::abs(fd - grad[i]));
    den = std::max(den, std::abs(fd));
  }
  EXPECT_LT(num / den, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Distances, ChannelGradient, ::testing::Values(0.0, 20.0, 80.0));
