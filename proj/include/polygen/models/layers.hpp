#pragma once

#include <string>
#include <vector>

#include "polygen/core/rng.hpp"
#include "polygen/tensor/ops.hpp"
#include "polygen/tensor/tensor.hpp"

namespace polygen {

struct LayerDesc {
  std::string name;
  std::string kind;
  std::string shape;
  std::int64_t param_count = 0;
};

// Collects named parameters and layer descriptors while a network is built.
struct ParamRegistry {
  std::vector<NamedTensor> params;
  std::vector<LayerDesc> layers;

  Tensor add(const std::string& name, Shape shape, std::vector<float> init);
  void describe(const std::string& name, const std::string& kind,
                const std::string& shape, std::int64_t count);
};

struct Conv2dLayer {
  Tensor weight;
  Tensor bias;
  ConvSpec spec;

  Tensor operator()(const Tensor& x) const { return conv2d(x, weight, bias, spec); }
};

struct TransposedConv2dLayer {
  Tensor weight;
  Tensor bias;
  int stride = 2;
  int pad = 1;
  int output_pad = 1;

  Tensor operator()(const Tensor& x) const {
    return transposed_conv2d(x, weight, bias, stride, pad, output_pad);
  }
};

struct InstanceNormLayer {
  Tensor gamma;
  Tensor beta;

  Tensor operator()(const Tensor& x) const { return instance_norm(x, gamma, beta); }
};

// Weights are drawn N(0, 0.02) with zero biases; affine norm parameters start
// at identity.
Conv2dLayer make_conv(ParamRegistry& reg, const std::string& name, int in_ch,
                      int out_ch, int kernel, int stride, int dilation, int pad,
                      Rng& rng, float weight_std = 0.02f);

TransposedConv2dLayer make_tconv(ParamRegistry& reg, const std::string& name,
                                 int in_ch, int out_ch, int kernel, int stride,
                                 int pad, int output_pad, Rng& rng,
                                 float weight_std = 0.02f);

InstanceNormLayer make_norm(ParamRegistry& reg, const std::string& name, int channels);

}  // namespace polygen
