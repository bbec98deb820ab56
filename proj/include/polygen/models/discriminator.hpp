#pragma once

#include <vector>

#include "polygen/models/config.hpp"
#include "polygen/models/layers.hpp"

namespace polygen {

// Patch discriminator over (conditioned image, candidate image) pairs:
// stride-2 3x3 convolutions with doubling channels, instance norm + ELU,
// then a 1x1 convolution and sigmoid producing a grid of real/fake scores.
class PatchDiscriminator {
 public:
  PatchDiscriminator(const GeneratorConfig& cfg, Rng& rng);

  // Scores strictly in (0,1), shape (N, 1, S/2^stages, S/2^stages).
  Tensor forward(const Tensor& conditioned, const Tensor& candidate) const;

  std::vector<NamedTensor>& params() { return reg_.params; }
  const std::vector<NamedTensor>& params() const { return reg_.params; }
  const std::vector<LayerDesc>& layer_descs() const { return reg_.layers; }
  int patch_extent() const { return cfg_.disc_patch_extent(); }

 private:
  struct Stage {
    Conv2dLayer down;
    InstanceNormLayer norm;
    bool has_norm = true;
  };

  GeneratorConfig cfg_;
  ParamRegistry reg_;
  std::vector<Stage> stages_;
  Conv2dLayer head_;
};

}  // namespace polygen
