#pragma once

#include <span>
#include <vector>

#include "sbrnn/autoencoder.hpp"

namespace sbrnn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected first and second moments.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  /// Applies one update; `params` and `grads` must list arrays of identical
  /// shapes in identical order on every call.
  void step(std::span<const ArrayRef> params, std::span<const ArrayRef> grads);

  long long iterations() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  long long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace sbrnn
