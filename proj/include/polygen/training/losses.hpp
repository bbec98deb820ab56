#pragma once

#include "polygen/models/generator.hpp"
#include "polygen/tensor/ops.hpp"

namespace polygen {

// Count of patch scores that had to be pulled away from exactly 0 or 1.
struct ClampStats {
  std::int64_t clamped = 0;
};

constexpr float kScoreEps = 1e-7f;

// -mean(log d_real) - mean(log(1 - d_fake)); the discriminator ascends the
// adversarial objective by minimizing this.
Tensor d_loss(const Tensor& d_real, const Tensor& d_fake, ClampStats* stats = nullptr);

// Non-saturating generator objective: -mean(log d_fake).
Tensor g_gan_loss(const Tensor& d_fake, ClampStats* stats = nullptr);

struct ReconWeights {
  float s4 = 1.0f;
  float s2 = 1.0f;
  float s1 = 1.0f;
};

struct ReconLosses {
  Tensor l2_s4;  // mean squared error at S/4
  Tensor l1_s2;  // mean absolute error at S/2
  Tensor l1_s1;  // mean absolute error at S
  Tensor total;  // weighted sum
};

// The target is downscaled to each head extent by area averaging.
ReconLosses recon_loss(const MultiScaleOutput& outputs, const Tensor& target,
                       const ReconWeights& weights = {});

// gan + lambda * recon
Tensor total_g_loss(const Tensor& gan, const Tensor& recon, float lambda);

}  // namespace polygen
