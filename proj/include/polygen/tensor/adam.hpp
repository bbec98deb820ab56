#pragma once

#include <cstdint>
#include <vector>

#include "polygen/tensor/tensor.hpp"

namespace polygen {

struct AdamConfig {
  float lr = 2e-4f;
  float beta1 = 0.5f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// Adam with bias correction. Each parameter keeps its own moment buffers and
// step counter; a parameter whose gradient contains non-finite values is
// skipped for that step and counted in nan_rejections().
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig cfg = {});

  void step();

  std::int64_t nan_rejections() const { return nan_rejections_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  struct Slot {
    std::vector<float> m;
    std::vector<float> v;
    std::int64_t t = 0;
  };
  std::vector<Tensor> params_;
  std::vector<Slot> slots_;
  AdamConfig cfg_;
  std::int64_t nan_rejections_ = 0;
};

}  // namespace polygen
