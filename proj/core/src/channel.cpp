#include "sbrnn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "sbrnn/error.hpp"
#include "sbrnn/fft.hpp"

namespace sbrnn {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr std::size_t kAdcCalibrationLength = 1 << 14;

using cplx = std::complex<double>;

// Dispersion as one frequency-domain multiplication over the zero-padded
// sequence. `sign` = -1 applies the conjugate (adjoint) response. The whole
// transform window is returned; the input starts at offset `guard`.
std::vector<cplx> disperse(std::span<const cplx> in, std::size_t guard, double rate, double beta2_l,
                           double amplitude, double sign) {
  const std::size_t len = in.size() + 2 * guard;
  const std::size_t n = fft::good_size(len);
  std::vector<cplx> buf(n, cplx{0.0, 0.0});
  std::copy(in.begin(), in.end(), buf.begin() + static_cast<std::ptrdiff_t>(guard));
  if (beta2_l != 0.0) {
    fft::forward(buf);
    for (std::size_t k = 0; k < n; ++k) {
      const double w = fft::bin_omega(k, n, rate);
      buf[k] *= std::polar(1.0, sign * 0.5 * beta2_l * w * w);
    }
    fft::inverse(buf);
  } else {
    buf.resize(len);
  }
  if (amplitude != 1.0)
    for (auto& v : buf) v *= amplitude;
  return buf;
}

double mzm_slope(double drive, ModulatorModel model) {
  if (model == ModulatorModel::identity) return 1.0;
  if (drive < 0.0 || drive > kDriveMax) return 0.0;
  return std::cos(drive);
}

}  // namespace

double ChannelConfig::beta2() const {
  const double d_si = dispersion_ps_nm_km * 1e-6;  // ps/(nm km) -> s/m^2
  return -d_si * wavelength * wavelength / (2.0 * std::numbers::pi * kSpeedOfLight);
}

double ChannelConfig::amplitude_loss() const {
  return std::pow(10.0, -attenuation_db_km * distance_km / 20.0);
}

void ChannelConfig::validate() const {
  require(dac_rate > 0, "dac_rate must be positive");
  require(oversampling >= 1, "oversampling must be >= 1");
  require(lpf_bandwidth > 0, "lpf_bandwidth must be positive");
  require(2.0 * lpf_bandwidth <= simulation_rate() * (1.0 + 1e-12),
          "lpf_bandwidth exceeds the Nyquist frequency of the simulation rate");
  require(enob >= 1, "enob must be >= 1");
  require(dispersion_ps_nm_km >= 0, "dispersion must be non-negative");
  require(attenuation_db_km >= 0, "attenuation must be non-negative");
  require(distance_km >= 0, "distance must be non-negative");
  require(wavelength > 0, "wavelength must be positive");
  require(rx_noise_power > 0, "rx_noise_power must be positive");
  require(noise_reference_power > 0, "noise_reference_power must be positive");
}

void lowpass_inplace(std::span<double> samples, double rate, double bandwidth) {
  require(rate > 0 && bandwidth > 0, "lowpass: rate and bandwidth must be positive");
  require(2.0 * bandwidth <= rate * (1.0 + 1e-12), "lowpass: bandwidth exceeds Nyquist");
  const std::size_t n = samples.size();
  if (n == 0) return;
  std::vector<cplx> buf(samples.begin(), samples.end());
  fft::forward(buf);
  const double wmax = 2.0 * std::numbers::pi * bandwidth * (1.0 + 1e-12);
  bool touched = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(fft::bin_omega(k, n, rate)) > wmax) {
      buf[k] = 0.0;
      touched = true;
    }
  }
  if (!touched) return;
  fft::inverse(buf);
  for (std::size_t i = 0; i < n; ++i) samples[i] = buf[i].real();
}

Waveform lowpass_filter(const Waveform& w, double bandwidth) {
  Waveform out = w;
  lowpass_inplace(out.samples, w.rate, bandwidth);
  return out;
}

double quantizer_step(int enob, double full_scale) {
  require(enob >= 1, "enob must be >= 1");
  return full_scale / std::ldexp(1.0, enob);
}

std::vector<double> uniform_quantization_noise(std::size_t count, double step, Rng& rng) {
  boost::random::uniform_real_distribution<double> dist(-0.5 * step, 0.5 * step);
  std::vector<double> out(count);
  for (auto& v : out) v = dist(rng);
  return out;
}

Waveform quantize_noise(const Waveform& w, int enob, double full_scale, Rng& rng) {
  const auto noise = uniform_quantization_noise(w.samples.size(), quantizer_step(enob, full_scale), rng);
  Waveform out = w;
  for (std::size_t i = 0; i < noise.size(); ++i) out.samples[i] += noise[i];
  return out;
}

OpticalField mzm_modulate(const Waveform& drive, ModulatorModel model, std::size_t* clamped) {
  OpticalField out;
  out.rate = drive.rate;
  out.samples.resize(drive.samples.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < drive.samples.size(); ++i) {
    double d = drive.samples[i];
    if (model == ModulatorModel::sine) {
      if (d < 0.0 || d > kDriveMax) {
        ++count;
        d = std::clamp(d, 0.0, kDriveMax);
      }
      out.samples[i] = std::sin(d);
    } else {
      out.samples[i] = d;
    }
  }
  if (clamped != nullptr) *clamped += count;
  return out;
}

std::size_t fiber_guard(const ChannelConfig& cfg) {
  if (cfg.distance_km == 0.0 || cfg.dispersion_ps_nm_km == 0.0) return 0;
  const double rate = cfg.simulation_rate();
  // Largest group delay within the simulated band, in samples.
  const double memory = std::abs(cfg.beta2()) * cfg.distance_km * 1e3 * std::numbers::pi * rate * rate;
  return 4 * static_cast<std::size_t>(std::ceil(memory));
}

OpticalField propagate_fiber(const OpticalField& field, const ChannelConfig& cfg) {
  require(cfg.distance_km >= 0, "distance must be non-negative");
  OpticalField out;
  out.rate = field.rate;
  out.samples = disperse(field.samples, fiber_guard(cfg), field.rate, cfg.beta2() * cfg.distance_km * 1e3,
                         cfg.amplitude_loss(), 1.0);
  return out;
}

Waveform photodetect(const OpticalField& field) {
  Waveform out;
  out.rate = field.rate;
  out.samples.resize(field.samples.size());
  for (std::size_t i = 0; i < field.samples.size(); ++i) out.samples[i] = std::norm(field.samples[i]);
  return out;
}

Channel::Channel(ChannelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.passthrough) return;
  // ADC full scale from a noiseless run of a random drive covering [0, pi/4].
  Rng rng(derive_seed(0x5eed, "adc-calibration"));
  boost::random::uniform_real_distribution<double> dist(0.0, kDriveMax);
  std::vector<double> probe(kAdcCalibrationLength);
  for (auto& v : probe) v = dist(rng);
  const auto pass = run(probe, nullptr);
  const auto [lo, hi] = std::minmax_element(pass.received.samples.begin(), pass.received.samples.end());
  adc_low_ = *lo;
  adc_high_ = *hi;
  if (!(adc_high_ > adc_low_)) adc_high_ = adc_low_ + 1.0;
}

NoiseRealization Channel::sample_noise(std::size_t length, std::uint64_t seed) const {
  NoiseRealization noise;
  noise.seed = seed;
  noise.dac_step = quantizer_step(cfg_.enob, kDriveMax);
  noise.adc_step = quantizer_step(cfg_.enob, adc_high_ - adc_low_);
  if (cfg_.passthrough) return noise;
  Rng rng(seed);
  if (cfg_.noise.dac) noise.dac = uniform_quantization_noise(length, noise.dac_step, rng);
  if (cfg_.noise.receiver) {
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(cfg_.noise_variance()));
    noise.receiver.resize(length);
    for (auto& v : noise.receiver) v = gauss(rng);
  }
  if (cfg_.noise.adc) noise.adc = uniform_quantization_noise(length, noise.adc_step, rng);
  return noise;
}

ChannelPass Channel::forward(std::span<const double> tx, const NoiseRealization& noise) const {
  return run(tx, &noise);
}

std::pair<Waveform, NoiseRealization> Channel::forward(std::span<const double> tx, std::uint64_t seed) const {
  auto noise = sample_noise(tx.size(), seed);
  auto pass = run(tx, &noise);
  return {std::move(pass.received), std::move(noise)};
}

ChannelPass Channel::run(std::span<const double> tx, const NoiseRealization* noise) const {
  const double fs = rate();
  const std::size_t n = tx.size();
  auto add = [n](std::vector<double>& dst, const std::vector<double>* src) {
    if (src == nullptr || src->empty()) return;
    require(src->size() == n, "noise realization length does not match the waveform");
    for (std::size_t i = 0; i < n; ++i) dst[i] += (*src)[i];
  };

  ChannelPass pass;
  pass.received.rate = fs;
  if (cfg_.passthrough) {
    pass.received.samples.assign(tx.begin(), tx.end());
    return pass;
  }

  pass.drive.assign(tx.begin(), tx.end());
  if (cfg_.include_tx_lpf) lowpass_inplace(pass.drive, fs, cfg_.lpf_bandwidth);
  add(pass.drive, noise ? &noise->dac : nullptr);

  const auto field = mzm_modulate(Waveform{pass.drive, fs}, cfg_.modulator, &pass.clamped);
  const std::size_t guard = fiber_guard(cfg_);
  auto padded = disperse(field.samples, guard, fs, cfg_.beta2() * cfg_.distance_km * 1e3,
                         cfg_.amplitude_loss(), 1.0);
  pass.rx_field.assign(padded.begin() + static_cast<std::ptrdiff_t>(guard),
                       padded.begin() + static_cast<std::ptrdiff_t>(guard + n));

  auto& y = pass.received.samples;
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::norm(pass.rx_field[i]);
  add(y, noise ? &noise->receiver : nullptr);
  if (cfg_.include_rx_lpf) lowpass_inplace(y, fs, cfg_.lpf_bandwidth);
  add(y, noise ? &noise->adc : nullptr);
  return pass;
}

std::vector<double> Channel::backward(const ChannelPass& pass, std::span<const double> grad_received) const {
  const std::size_t n = grad_received.size();
  if (cfg_.passthrough) return {grad_received.begin(), grad_received.end()};
  require(n == pass.rx_field.size(), "gradient length does not match the channel pass");
  const double fs = rate();

  // Brick-wall filters are real and even in frequency, hence self-adjoint.
  std::vector<double> g(grad_received.begin(), grad_received.end());
  if (cfg_.include_rx_lpf) lowpass_inplace(g, fs, cfg_.lpf_bandwidth);

  std::vector<cplx> gfield(n);
  for (std::size_t i = 0; i < n; ++i) gfield[i] = 2.0 * pass.rx_field[i] * g[i];

  const std::size_t guard = fiber_guard(cfg_);
  auto gpad = disperse(gfield, guard, fs, cfg_.beta2() * cfg_.distance_km * 1e3, cfg_.amplitude_loss(), -1.0);

  std::vector<double> gdrive(n);
  for (std::size_t i = 0; i < n; ++i)
    gdrive[i] = gpad[guard + i].real() * mzm_slope(pass.drive[i], cfg_.modulator);
  if (cfg_.include_tx_lpf) lowpass_inplace(gdrive, fs, cfg_.lpf_bandwidth);
  return gdrive;
}

}  // namespace sbrnn
