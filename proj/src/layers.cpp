#include "polygen/models/layers.hpp"

namespace polygen {

Tensor ParamRegistry::add(const std::string& name, Shape shape,
                          std::vector<float> init) {
  Tensor t = Tensor::from_data(shape, std::move(init), /*requires_grad=*/true);
  t.set_name(name);
  params.push_back({name, t});
  return t;
}

void ParamRegistry::describe(const std::string& name, const std::string& kind,
                             const std::string& shape, std::int64_t count) {
  layers.push_back({name, kind, shape, count});
}

Conv2dLayer make_conv(ParamRegistry& reg, const std::string& name, int in_ch,
                      int out_ch, int kernel, int stride, int dilation, int pad,
                      Rng& rng, float weight_std) {
  const Shape ws{out_ch, in_ch, kernel, kernel};
  std::vector<float> w(static_cast<std::size_t>(ws.numel()));
  for (auto& v : w) v = static_cast<float>(rng.normal(0.0, weight_std));
  Conv2dLayer layer;
  layer.weight = reg.add(name + ".weight", ws, std::move(w));
  layer.bias = reg.add(name + ".bias", {1, out_ch, 1, 1},
                       std::vector<float>(out_ch, 0.0f));
  layer.spec = ConvSpec{kernel, kernel, stride, dilation, pad};
  reg.describe(name, "conv2d",
               std::to_string(out_ch) + "x" + std::to_string(in_ch) + "x" +
                   std::to_string(kernel) + "x" + std::to_string(kernel) +
                   (dilation > 1 ? " d" + std::to_string(dilation) : "") +
                   (stride > 1 ? " s" + std::to_string(stride) : ""),
               ws.numel() + out_ch);
  return layer;
}

TransposedConv2dLayer make_tconv(ParamRegistry& reg, const std::string& name,
                                 int in_ch, int out_ch, int kernel, int stride,
                                 int pad, int output_pad, Rng& rng,
                                 float weight_std) {
  const Shape ws{in_ch, out_ch, kernel, kernel};
  std::vector<float> w(static_cast<std::size_t>(ws.numel()));
  for (auto& v : w) v = static_cast<float>(rng.normal(0.0, weight_std));
  TransposedConv2dLayer layer;
  layer.weight = reg.add(name + ".weight", ws, std::move(w));
  layer.bias = reg.add(name + ".bias", {1, out_ch, 1, 1},
                       std::vector<float>(out_ch, 0.0f));
  layer.stride = stride;
  layer.pad = pad;
  layer.output_pad = output_pad;
  reg.describe(name, "transposed_conv2d",
               std::to_string(in_ch) + "x" + std::to_string(out_ch) + "x" +
                   std::to_string(kernel) + "x" + std::to_string(kernel) + " s" +
                   std::to_string(stride),
               ws.numel() + out_ch);
  return layer;
}

InstanceNormLayer make_norm(ParamRegistry& reg, const std::string& name,
                            int channels) {
  InstanceNormLayer layer;
  layer.gamma = reg.add(name + ".gamma", {1, channels, 1, 1},
                        std::vector<float>(channels, 1.0f));
  layer.beta = reg.add(name + ".beta", {1, channels, 1, 1},
                       std::vector<float>(channels, 0.0f));
  reg.describe(name, "instance_norm", std::to_string(channels),
               2 * static_cast<std::int64_t>(channels));
  return layer;
}

}  // namespace polygen
