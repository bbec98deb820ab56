#include "polygen/models/analysis.hpp"

#include <cmath>
#include <fstream>

#include "polygen/core/error.hpp"
#include "polygen/core/rng.hpp"
#include "polygen/tensor/ops.hpp"

namespace polygen {

std::int64_t count_params(const std::vector<NamedTensor>& params) {
  std::int64_t total = 0;
  for (const auto& p : params) total += p.tensor.numel();
  return total;
}

ParamReport make_param_report(const std::string& network,
                              const std::vector<LayerDesc>& layers) {
  ParamReport r;
  r.network = network;
  r.layers = layers;
  for (const auto& l : layers) r.total += l.param_count;
  return r;
}

void write_param_csv(const std::string& path, const std::vector<ParamReport>& reports) {
  std::ofstream f(path);
  if (!f) throw DataError("analysis: cannot write " + path);
  f << "network,layer,kind,shape,params\n";
  for (const auto& r : reports) {
    for (const auto& l : r.layers)
      f << r.network << "," << l.name << "," << l.kind << "," << l.shape << ","
        << l.param_count << "\n";
    f << r.network << ",TOTAL,,," << r.total << "\n";
  }
}

namespace {

struct ProbeLayer {
  Tensor weight;
  Tensor bias;
};

// He-style magnitude-preserving init keeps the phase contrast well above
// numerical noise regardless of depth.
ProbeLayer init_probe_layer(int in_ch, int out_ch, int k, Rng& rng, bool transposed) {
  const float std_dev = std::sqrt(2.0f / static_cast<float>(in_ch * k * k));
  Shape ws = transposed ? Shape{in_ch, out_ch, k, k} : Shape{out_ch, in_ch, k, k};
  std::vector<float> w(static_cast<std::size_t>(ws.numel()));
  for (auto& v : w) v = static_cast<float>(rng.normal(0.0, std_dev));
  return {Tensor::from_data(ws, std::move(w)),
          Tensor::zeros({1, out_ch, 1, 1})};
}

}  // namespace

std::vector<double> checkerboard_metric_per_trial(const DecoderProbeConfig& cfg,
                                                  int trials, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(trials);
  const bool transposed = cfg.mode == UpsampleMode::kTransposedConv;

  // Width of the border contaminated by zero padding, accumulated through
  // the upsampling chain.
  int border = 0;
  for (int b = 0; b < cfg.blocks; ++b) border = 2 * border + 2;

  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, "checkerboard", static_cast<std::uint64_t>(t)));
    std::vector<ProbeLayer> layers;
    for (int b = 0; b < cfg.blocks; ++b)
      layers.push_back(init_probe_layer(cfg.channels, cfg.channels, 3, rng, transposed));

    Tensor h = Tensor::full({1, cfg.channels, cfg.input_extent, cfg.input_extent}, 1.0f);
    for (const ProbeLayer& l : layers) {
      if (transposed)
        h = transposed_conv2d(h, l.weight, l.bias, 2, 1, 1);
      else
        h = conv2d(nearest_resize(h, 2), l.weight, l.bias,
                   {.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = 1, .pad = 1});
    }

    const Shape& s = h.shape();
    int start = border;
    if (start % 2 != 0) ++start;  // keep tiles aligned to the 2x2 phase grid
    const int stop_h = s.h - border;
    const int stop_w = s.w - border;
    double acc = 0.0;
    std::int64_t tiles = 0;
    for (int c = 0; c < s.c; ++c)
      for (int y = start; y + 1 < stop_h; y += 2)
        for (int x = start; x + 1 < stop_w; x += 2) {
          const double v00 = h.at(0, c, y, x);
          const double v01 = h.at(0, c, y, x + 1);
          const double v10 = h.at(0, c, y + 1, x);
          const double v11 = h.at(0, c, y + 1, x + 1);
          const double mean = (v00 + v01 + v10 + v11) / 4.0;
          const double var = ((v00 - mean) * (v00 - mean) + (v01 - mean) * (v01 - mean) +
                              (v10 - mean) * (v10 - mean) + (v11 - mean) * (v11 - mean)) /
                             4.0;
          acc += var;
          ++tiles;
        }
    out.push_back(tiles > 0 ? acc / static_cast<double>(tiles) : 0.0);
  }
  return out;
}

double checkerboard_metric(const DecoderProbeConfig& cfg, int trials,
                           std::uint64_t seed) {
  const std::vector<double> per_trial = checkerboard_metric_per_trial(cfg, trials, seed);
  double acc = 0.0;
  for (double v : per_trial) acc += v;
  return per_trial.empty() ? 0.0 : acc / static_cast<double>(per_trial.size());
}

std::vector<int> receptive_field(const GeneratorConfig& cfg) {
  cfg.validate();
  int max_dilation = 1;
  for (int d : cfg.dilations) max_dilation = std::max(max_dilation, d);
  const int k_eff = effective_kernel_extent(3, max_dilation);

  std::vector<int> rf_per_block;
  int rf = 1;
  int jump = 1;
  for (int b = 0; b < cfg.blocks; ++b) {
    rf += (k_eff - 1) * jump;  // parallel dilated convolutions (widest wins)
    // 1x1 fuse adds nothing.
    rf += (3 - 1) * jump;  // stride-2 3x3 downsample
    jump *= 2;
    rf_per_block.push_back(rf);
  }
  return rf_per_block;
}

}  // namespace polygen
