#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbrnn/autoencoder.hpp"
#include "sbrnn/channel.hpp"
#include "sbrnn/pam.hpp"
#include "sbrnn/trainer.hpp"

namespace sbrnn {

enum class SystemKind { sbrnn, pam2_mlsd, pam4_mlsd };

SystemKind parse_system(const std::string& s);
std::string to_string(SystemKind s);

struct EstimatorSettings {
  std::vector<int> windows{2, 10};
  bool optimize_weights = true;
  int fit_sequences = 10;    ///< Mersenne-twister sequences for weight and labeling fits
  int fit_length = 10000;
  int max_iterations = 100000;
  double tolerance = 1e-9;
};

struct LabelingSettings {
  int iterations = 1000;
  int tabu_list = 256;
};

struct MlsdSettings {
  int pam2_memory = 12;
  int pam4_memory = 6;
  int samples_per_symbol = 2;
  double rolloff = 0.25;
  int span_symbols = 16;
  double pam2_dac_rate = 84e9;
  double pam4_dac_rate = 42e9;
  double pam2_rx_noise_power = 0.245e-3;
  double pam4_rx_noise_power = 0.127e-3;
  long long train_symbols = 10000000;
  long long test_symbols = 100000;
  int frame_symbols = 1024;
  bool rx_lpf = true;
};

struct ExperimentConfig {
  ChannelConfig channel{};
  AutoencoderDims dims{};
  TrainConfig train{};
  EstimatorSettings estimator{};
  LabelingSettings labeling{};
  MlsdSettings mlsd{};

  std::vector<SystemKind> systems{SystemKind::sbrnn, SystemKind::pam2_mlsd, SystemKind::pam4_mlsd};
  std::vector<double> distances{20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::uint64_t seed = 7;       ///< evaluation data and noise
  int test_sequences = 250;
  int test_length = 10000;
  bool train_missing = false;   ///< train an SBRNN when no checkpoint exists
  std::string checkpoint_dir = "checkpoints";
  std::string output_dir = "results";
  std::optional<double> hd_fec_threshold;

  void validate() const;

  /// Channel for a given system and distance.
  ChannelConfig channel_for(SystemKind system, double distance_km) const;
  PamConfig pam_for(SystemKind system) const;
  int memory_for(SystemKind system) const;
};

/// eta = W log2 M for the SBRNN, mu log2 M_pam for MLSD.
int eta_sbrnn(const AutoencoderDims& dims, int window);
int eta_mlsd(int order, int memory);

/// Reads an INI file with sections [channel] [autoencoder] [train] [estimator]
/// [labeling] [mlsd] [experiment]. Missing keys keep their defaults; unknown
/// keys are an error.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// Every key in a fixed order; parse_config(canonical_text(c)) reproduces c.
std::string canonical_text(const ExperimentConfig& cfg);

/// 16 hex digits of the FNV-1a hash of every setting except the output and
/// checkpoint directories.
std::string config_hash(const ExperimentConfig& cfg);

/// Hash over the settings a trained SBRNN depends on at one distance.
std::string model_hash(const ExperimentConfig& cfg, double distance_km);

}  // namespace sbrnn
