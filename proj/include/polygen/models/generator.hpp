#pragma once

#include <vector>

#include "polygen/models/config.hpp"
#include "polygen/models/layers.hpp"

namespace polygen {

// Generator output images at extents S/4, S/2 and S, each in [-1, 1].
struct MultiScaleOutput {
  Tensor s4;
  Tensor s2;
  Tensor s1;
};

// Modified U-net generator: every encoder block runs parallel 3x3
// convolutions at each configured dilation rate, concatenates them
// channel-wise, fixes the channel count with a 1x1 convolution and contracts
// with a stride-2 convolution. The decoder upsamples by nearest resize +
// convolution (or transposed convolution, per config), concatenates the
// matching encoder skip, and branches a 1x1+tanh image head at S/4, S/2, S.
// Instance norm + ELU follow every convolution; dropout 0.5 sits in every
// encoder block except the first and stays active at inference, acting as
// the noise source z.
class GeneratorNet {
 public:
  GeneratorNet(const GeneratorConfig& cfg, Rng& rng);

  MultiScaleOutput forward(const Tensor& x, Rng& dropout_rng) const;

  std::vector<NamedTensor>& params() { return reg_.params; }
  const std::vector<NamedTensor>& params() const { return reg_.params; }
  const std::vector<LayerDesc>& layer_descs() const { return reg_.layers; }
  const GeneratorConfig& config() const { return cfg_; }
  // Encoder extents after each block, recorded at construction.
  const std::vector<int>& extent_trace() const { return extent_trace_; }

 private:
  struct EncoderBlock {
    std::vector<Conv2dLayer> dilated;
    std::vector<InstanceNormLayer> dilated_norm;
    Conv2dLayer fuse;
    InstanceNormLayer fuse_norm;
    Conv2dLayer down;
    InstanceNormLayer down_norm;
    bool dropout = false;
  };
  struct DecoderBlock {
    Conv2dLayer up_conv;           // resize_conv mode
    TransposedConv2dLayer up_tconv;  // transposed_conv mode
    InstanceNormLayer up_norm;
    Conv2dLayer fuse;
    InstanceNormLayer fuse_norm;
    bool has_head = false;
    Conv2dLayer head;
    int out_extent = 0;
  };

  GeneratorConfig cfg_;
  ParamRegistry reg_;
  std::vector<EncoderBlock> encoder_;
  std::vector<DecoderBlock> decoder_;
  std::vector<int> extent_trace_;
};

}  // namespace polygen
