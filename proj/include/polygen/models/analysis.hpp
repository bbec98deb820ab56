#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polygen/models/config.hpp"
#include "polygen/models/layers.hpp"

namespace polygen {

// Exact sum of parameter element counts.
std::int64_t count_params(const std::vector<NamedTensor>& params);

struct ParamReport {
  std::string network;
  std::vector<LayerDesc> layers;
  std::int64_t total = 0;
};

ParamReport make_param_report(const std::string& network,
                              const std::vector<LayerDesc>& layers);

// CSV with one row per layer (network,layer,kind,shape,params) plus a TOTAL
// row per network.
void write_param_csv(const std::string& path, const std::vector<ParamReport>& reports);

// Decoder-only probe used by the checkerboard diagnostic: `blocks` stages of
// x2 upsampling from input_extent, constant channel width, biases zero.
struct DecoderProbeConfig {
  UpsampleMode mode = UpsampleMode::kResizeConv;
  int blocks = 3;
  int channels = 8;
  int input_extent = 8;
};

// Feeds a constant image through freshly initialized decoders and measures
// the mean variance inside each 2x2 phase tile of the output interior
// (borders touched by padding are excluded). Phase-dependent upsampling
// (transposed convolution) scores high; resize+convolution scores zero.
double checkerboard_metric(const DecoderProbeConfig& cfg, int trials,
                           std::uint64_t seed);
std::vector<double> checkerboard_metric_per_trial(const DecoderProbeConfig& cfg,
                                                  int trials, std::uint64_t seed);

inline int effective_kernel_extent(int kernel, int dilation) {
  return kernel + (kernel - 1) * (dilation - 1);
}

// Input-referred receptive-field extent after each encoder block (parallel
// dilated convolutions, 1x1 fuse, stride-2 downsample).
std::vector<int> receptive_field(const GeneratorConfig& cfg);

}  // namespace polygen
