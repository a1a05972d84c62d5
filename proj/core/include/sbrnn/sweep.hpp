#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbrnn/config.hpp"
#include "sbrnn/estimator.hpp"
#include "sbrnn/labeling.hpp"
#include "sbrnn/mlsd.hpp"
#include "sbrnn/results.hpp"

namespace sbrnn {

using LogFn = std::function<void(const std::string&)>;

std::string checkpoint_path(const ExperimentConfig& cfg, double distance_km);
std::string nu_table_path(const ExperimentConfig& cfg, SystemKind system, double distance_km);
std::string results_path(const ExperimentConfig& cfg, const std::string& extension);

/// Loads the checkpoint for this distance, or trains and saves one when
/// cfg.train_missing is set. Throws ConfigError otherwise.
TransceiverParams obtain_model(const ExperimentConfig& cfg, double distance_km, const LogFn& log = {});

/// Weight and labeling fits on a Mersenne-twister fit set for window W.
struct SbrnnFit {
  int window = 1;
  WeightFit weights;
  BitLabeling gray;
  BitLabeling random;
  TabuResult uniform_labeling;    ///< tabu result on decisions with uniform weights
  TabuResult optimized_labeling;  ///< tabu result on decisions with optimized weights
};

SbrnnFit fit_sbrnn(const ExperimentConfig& cfg, const TransceiverParams& params, const Channel& channel, int window);

/// Rows for every (weights, labeling) variant at one distance and window.
std::vector<ResultRow> evaluate_sbrnn(const ExperimentConfig& cfg, const TransceiverParams& params,
                                      double distance_km, int window, const LogFn& log = {});

/// Loads or estimates the nu table, then measures BER on the test symbols.
ResultRow evaluate_mlsd(const ExperimentConfig& cfg, SystemKind system, double distance_km, const LogFn& log = {});
NuTable obtain_nu_table(const ExperimentConfig& cfg, SystemKind system, double distance_km, const LogFn& log = {});

/// All systems x distances, rows sorted.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const LogFn& log = {});

}  // namespace sbrnn
