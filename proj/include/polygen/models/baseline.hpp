#pragma once

#include <vector>

#include "polygen/models/config.hpp"
#include "polygen/models/layers.hpp"

namespace polygen {

// Conventional U-net baseline: log2(S) stride-2 encoder stages down to a 1x1
// bottleneck, a symmetric decoder built on transposed convolutions, skip
// concatenations, and a single tanh image head.
class BaselineUnet {
 public:
  BaselineUnet(const GeneratorConfig& cfg, Rng& rng);

  Tensor forward(const Tensor& x) const;

  std::vector<NamedTensor>& params() { return reg_.params; }
  const std::vector<NamedTensor>& params() const { return reg_.params; }
  const std::vector<LayerDesc>& layer_descs() const { return reg_.layers; }
  int stages() const { return stages_; }
  int bottleneck_extent() const { return 1; }

 private:
  struct EncoderStage {
    Conv2dLayer down;
    InstanceNormLayer norm;
    bool has_norm = true;
  };
  struct DecoderStage {
    TransposedConv2dLayer up;
    InstanceNormLayer norm;
    bool has_skip = false;
  };

  GeneratorConfig cfg_;
  int stages_ = 0;
  ParamRegistry reg_;
  std::vector<EncoderStage> encoder_;
  std::vector<DecoderStage> decoder_;
  Conv2dLayer head_;
};

}  // namespace polygen
