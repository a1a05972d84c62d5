#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "sbrnn/rng.hpp"

namespace sbrnn {

/// Upper end of the modulator drive range; the transmitter clipping
/// activation maps into [0, kDriveMax].
inline constexpr double kDriveMax = std::numbers::pi / 4.0;

/// Real-valued sampled signal (electrical domain).
struct Waveform {
  std::vector<double> samples;
  double rate = 1.0;  ///< samples per second
};

/// Complex optical field envelope.
struct OpticalField {
  std::vector<std::complex<double>> samples;
  double rate = 1.0;
};

enum class ModulatorModel { sine, identity };

struct NoiseSwitches {
  bool dac = true;
  bool receiver = true;
  bool adc = true;

  static NoiseSwitches none() { return {false, false, false}; }
};

/// Parameters of the IM/DD link (84 GSa/s DAC by default).
struct ChannelConfig {
  double dac_rate = 84e9;          ///< Sa/s
  int oversampling = 4;            ///< simulation rate = dac_rate * oversampling
  double lpf_bandwidth = 32e9;     ///< Hz, brick-wall at Tx and Rx
  int enob = 6;                    ///< DAC/ADC effective number of bits
  double dispersion_ps_nm_km = 17.0;
  double attenuation_db_km = 0.2;
  double distance_km = 0.0;
  double wavelength = 1550e-9;     ///< m, used for the D -> beta2 conversion
  double rx_noise_power = 0.245e-3;  ///< W, receiver Gaussian noise power
  /// Power (W) that maps to a normalized value of 1. The receiver noise
  /// variance in simulation units is rx_noise_power / noise_reference_power.
  double noise_reference_power = 1.0;
  bool include_tx_lpf = true;
  bool include_rx_lpf = true;
  NoiseSwitches noise{};
  ModulatorModel modulator = ModulatorModel::sine;
  /// Replace the whole link by y = x (toy training setups).
  bool passthrough = false;

  double simulation_rate() const { return dac_rate * oversampling; }
  /// Group-velocity dispersion in s^2/m.
  double beta2() const;
  /// Amplitude factor 10^(-alpha L / 20).
  double amplitude_loss() const;
  double noise_variance() const { return rx_noise_power / noise_reference_power; }
  void validate() const;
};

/// Additive noise drawn for one channel use. Fixing it makes the channel a
/// deterministic, differentiable map of the transmit waveform.
struct NoiseRealization {
  std::vector<double> dac;
  std::vector<double> receiver;
  std::vector<double> adc;
  double dac_step = 0.0;
  double adc_step = 0.0;
  std::uint64_t seed = 0;
};

// Individual stages. All are pure functions of their inputs.

/// Circular brick-wall low-pass: keeps DFT bins with |f| <= bandwidth.
Waveform lowpass_filter(const Waveform& w, double bandwidth);
void lowpass_inplace(std::span<double> samples, double rate, double bandwidth);

/// Quantizer step for the given resolution over a full-scale range.
double quantizer_step(int enob, double full_scale);
/// i.i.d. uniform noise on [-step/2, step/2].
std::vector<double> uniform_quantization_noise(std::size_t count, double step, Rng& rng);
/// w + uniform quantization noise; the gradient w.r.t. w is the identity.
Waveform quantize_noise(const Waveform& w, int enob, double full_scale, Rng& rng);

/// Electrical drive to optical field. Drive values outside [0, pi/4] are
/// clamped for the sine model; `clamped` (optional) counts them.
OpticalField mzm_modulate(const Waveform& drive, ModulatorModel model = ModulatorModel::sine,
                          std::size_t* clamped = nullptr);

/// Guard length (samples per side) used around the field before dispersion.
std::size_t fiber_guard(const ChannelConfig& cfg);

/// Chromatic dispersion plus attenuation. The returned field is the whole
/// zero-padded transform window: the input span starts at offset
/// fiber_guard(cfg), with at least as many padding samples after it.
OpticalField propagate_fiber(const OpticalField& field, const ChannelConfig& cfg);

/// Square-law detection |E|^2.
Waveform photodetect(const OpticalField& field);

/// Result of a forward pass, retaining what the backward pass needs.
struct ChannelPass {
  Waveform received;
  std::vector<double> drive;                    ///< Tx LPF output + DAC noise
  std::vector<std::complex<double>> rx_field;   ///< field after the fiber (cropped)
  std::size_t clamped = 0;
};

/// The complete link: Tx LPF -> DAC noise -> MZM -> fiber -> photodiode ->
/// receiver noise -> Rx LPF -> ADC noise.
class Channel {
 public:
  explicit Channel(ChannelConfig cfg);

  const ChannelConfig& config() const { return cfg_; }
  double rate() const { return cfg_.simulation_rate(); }

  /// ADC full-scale range, measured once on a noiseless calibration signal.
  double adc_low() const { return adc_low_; }
  double adc_high() const { return adc_high_; }

  NoiseRealization sample_noise(std::size_t length, std::uint64_t seed) const;

  ChannelPass forward(std::span<const double> tx, const NoiseRealization& noise) const;

  /// Forward with freshly sampled noise.
  std::pair<Waveform, NoiseRealization> forward(std::span<const double> tx, std::uint64_t seed) const;

  /// Vector-Jacobian product: gradient w.r.t. tx given the gradient w.r.t.
  /// the received samples of `pass`.
  std::vector<double> backward(const ChannelPass& pass, std::span<const double> grad_received) const;

 private:
  ChannelPass run(std::span<const double> tx, const NoiseRealization* noise) const;

  ChannelConfig cfg_;
  double adc_low_ = 0.0;
  double adc_high_ = 1.0;
};

}  // namespace sbrnn
