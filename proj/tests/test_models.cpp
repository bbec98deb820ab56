#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "polygen/models/analysis.hpp"
#include "polygen/models/baseline.hpp"
#include "polygen/models/discriminator.hpp"
#include "polygen/models/generator.hpp"
#include "polygen/tensor/ops.hpp"

using namespace polygen;

namespace {

GeneratorConfig desk_config() {
  GeneratorConfig cfg;
  cfg.extent = 64;
  cfg.base_width = 16;
  cfg.blocks = 3;
  cfg.dilations = {1, 2, 4};
  return cfg;
}

GeneratorConfig paper_scale_config() {
  GeneratorConfig cfg;
  cfg.extent = 256;
  cfg.base_width = 64;
  cfg.blocks = 3;
  cfg.dilations = {1, 2, 4};
  return cfg;
}

// Impulse-support measurement: all-ones single-channel convolutions repeat
// the encoder geometry (parallel dilated 3x3s summed, then a stride-2 3x3),
// and the input-gradient support of one central output unit is the
// receptive field.
int measured_rf(const GeneratorConfig& cfg, int upto_block, int input_extent) {
  Tensor x = Tensor::zeros({1, 1, input_extent, input_extent}, /*requires_grad=*/true);
  Tensor ones3 = Tensor::full({1, 1, 3, 3}, 1.0f);
  Tensor b0 = Tensor::zeros({1, 1, 1, 1});
  Tensor h = x;
  for (int b = 1; b <= upto_block; ++b) {
    Tensor acc;
    for (int d : cfg.dilations) {
      Tensor branch = conv2d(h, ones3, b0,
                             {.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = d, .pad = d});
      acc = acc.defined() ? add(acc, branch) : branch;
    }
    h = conv2d(acc, ones3, b0,
               {.kernel_h = 3, .kernel_w = 3, .stride = 2, .dilation = 1, .pad = 1});
  }
  const Shape& s = h.shape();
  // Select the central unit through a one-hot projection.
  Tensor sel = Tensor::zeros(s);
  sel.at(0, 0, s.h / 2, s.w / 2) = 1.0f;
  x.zero_grad();
  backward(sum_all(mul(h, sel)));

  int rmin = input_extent, rmax = -1, cmin = input_extent, cmax = -1;
  for (int r = 0; r < input_extent; ++r)
    for (int c = 0; c < input_extent; ++c)
      if (x.grad()[static_cast<std::size_t>(r) * input_extent + c] != 0.0f) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
  REQUIRE(rmax >= 0);
  CHECK(rmax - rmin == cmax - cmin);  // square field
  return rmax - rmin + 1;
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("config: invalid settings rejected with the violated invariant") {
  GeneratorConfig cfg = desk_config();
  cfg.extent = 48;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("power of two"),
                       std::invalid_argument);
  cfg = desk_config();
  cfg.blocks = 5;  // bottleneck 2 < 4
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("bottleneck"),
                       std::invalid_argument);
  cfg = desk_config();
  cfg.dilations = {};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("dilation"),
                       std::invalid_argument);
  cfg = desk_config();
  cfg.disc_stages = 5;  // patch grid 2x2 < 4x4
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("generator: S=256 B=3 bottlenecks at 32x32 (construction trace)") {
  GeneratorConfig cfg = paper_scale_config();
  CHECK(cfg.bottleneck_extent() == 32);
  Rng rng(50);
  GeneratorNet gen(cfg, rng);
  const auto& trace = gen.extent_trace();
  REQUIRE(trace.size() == 3);
  CHECK(trace[0] == 128);
  CHECK(trace[1] == 64);
  CHECK(trace[2] == 32);
}

TEST_CASE("baseline: S=256 has 8 stages to 1x1; S=64 has 6") {
  Rng rng(51);
  BaselineUnet big(paper_scale_config(), rng);
  CHECK(big.stages() == 8);
  CHECK(big.bottleneck_extent() == 1);
  BaselineUnet desk(desk_config(), rng);
  CHECK(desk.stages() == 6);
}

TEST_CASE("generator: desk forward emits finite tanh heads at 16/32/64") {
  GeneratorConfig cfg = desk_config();
  Rng rng(52);
  GeneratorNet gen(cfg, rng);
  Tensor x = Tensor::full({1, 1, 64, 64}, -1.0f);
  for (int i = 0; i < 64; ++i) x.at(0, 0, 32, i) = 1.0f;
  Rng drop(53);
  MultiScaleOutput out = gen.forward(x, drop);
  REQUIRE(out.s4.shape() == Shape{1, 1, 16, 16});
  REQUIRE(out.s2.shape() == Shape{1, 1, 32, 32});
  REQUIRE(out.s1.shape() == Shape{1, 1, 64, 64});
  for (const Tensor* t : {&out.s4, &out.s2, &out.s1}) {
    CHECK(all_finite(t->values()));
    for (float v : t->values()) {
      CHECK(v >= -1.0f);
      CHECK(v <= 1.0f);
    }
  }

  Tensor bad = Tensor::zeros({1, 1, 32, 32});
  CHECK_THROWS_AS(gen.forward(bad, drop), std::invalid_argument);
}

TEST_CASE("baseline: forward shape round-trips to SxS") {
  GeneratorConfig cfg = desk_config();
  Rng rng(54);
  BaselineUnet net(cfg, rng);
  Tensor x = Tensor::full({1, 1, 64, 64}, 0.25f);
  Tensor y = net.forward(x);
  CHECK(y.shape() == Shape{1, 1, 64, 64});
  CHECK(all_finite(y.values()));
}

TEST_CASE("discriminator: desk config gives an 8x8 patch grid in (0,1)") {
  GeneratorConfig cfg = desk_config();
  Rng rng(55);
  PatchDiscriminator disc(cfg, rng);
  CHECK(disc.patch_extent() == 8);
  Tensor cond = Tensor::full({1, 1, 64, 64}, 1.0f);
  Tensor cand = Tensor::full({1, 1, 64, 64}, -0.5f);
  Tensor scores = disc.forward(cond, cand);
  REQUIRE(scores.shape() == Shape{1, 1, 8, 8});
  for (float v : scores.values()) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }

  // Zeroed parameters leave every patch at sigmoid(0) = 0.5.
  for (auto& p : disc.params())
    std::fill(p.tensor.values().begin(), p.tensor.values().end(), 0.0f);
  Tensor mid = disc.forward(cond, cand);
  for (float v : mid.values()) CHECK(v == 0.5f);
}

TEST_CASE("count_params: closed-form check on a single conv layer") {
  ParamRegistry reg;
  Rng rng(56);
  make_conv(reg, "probe", 2, 4, 3, 1, 1, 1, rng);
  CHECK(count_params(reg.params) == 3 * 3 * 2 * 4 + 4);
  CHECK(make_param_report("probe", reg.layers).total == 76);
}

TEST_CASE("count_params: independent of dilation rates") {
  Rng rng(57);
  GeneratorConfig a = desk_config();
  GeneratorConfig b = desk_config();
  b.dilations = {1, 1, 1};
  GeneratorConfig c = desk_config();
  c.dilations = {8, 8, 8};
  const std::int64_t ca = count_params(GeneratorNet(a, rng).params());
  const std::int64_t cb = count_params(GeneratorNet(b, rng).params());
  const std::int64_t cc = count_params(GeneratorNet(c, rng).params());
  CHECK(ca == cb);
  CHECK(ca == cc);
}

TEST_CASE("count_params: dilated generator is smaller than the baseline U-net") {
  Rng rng(58);
  for (GeneratorConfig cfg : {desk_config(), paper_scale_config()}) {
    GeneratorNet gen(cfg, rng);
    BaselineUnet base(cfg, rng);
    const std::int64_t g = count_params(gen.params());
    const std::int64_t u = count_params(base.params());
    CAPTURE(cfg.extent);
    CHECK(g < u);
    // Layer descriptors agree with the actual parameter tensors.
    CHECK(make_param_report("g", gen.layer_descs()).total == g);
    CHECK(make_param_report("u", base.layer_descs()).total == u);
  }
}

TEST_CASE("count_params: paper-scale ratio lands near the reported 0.524") {
  Rng rng(59);
  GeneratorConfig cfg = paper_scale_config();
  const std::int64_t g = count_params(GeneratorNet(cfg, rng).params());
  const std::int64_t u = count_params(BaselineUnet(cfg, rng).params());
  const double ratio = static_cast<double>(g) / static_cast<double>(u);
  CAPTURE(g);
  CAPTURE(u);
  CHECK(ratio > 0.40);
  CHECK(ratio < 0.65);
}

TEST_CASE("checkerboard: transposed decoding shows phase variance, resize does not") {
  DecoderProbeConfig resize{UpsampleMode::kResizeConv, 3, 8, 8};
  DecoderProbeConfig transposed{UpsampleMode::kTransposedConv, 3, 8, 8};
  const auto r = checkerboard_metric_per_trial(resize, 8, 123);
  const auto t = checkerboard_metric_per_trial(transposed, 8, 123);
  REQUIRE(r.size() == 8);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r[i] < 1e-10);
    CHECK(t[i] > 1e-4);
    CHECK(t[i] > r[i]);  // strict per-seed ordering
  }
  CHECK(checkerboard_metric(resize, 8, 123) < 1e-10);
  CHECK(checkerboard_metric(transposed, 8, 123) > 1e-4);

  // Zero upsampling blocks: the constant input passes through untouched.
  DecoderProbeConfig identity{UpsampleMode::kResizeConv, 0, 4, 8};
  CHECK(checkerboard_metric(identity, 4, 3) == 0.0);
}

TEST_CASE("receptive field: closed form matches impulse-support measurement") {
  CHECK(effective_kernel_extent(3, 1) == 3);
  CHECK(effective_kernel_extent(3, 4) == 9);

  GeneratorConfig cfg = desk_config();
  const std::vector<int> analytic = receptive_field(cfg);
  REQUIRE(analytic.size() == 3);
  // {1,2,4} dilations: widest branch has effective extent 9, then a stride-2
  // 3x3; jumps double per block.
  CHECK(analytic[0] == 11);
  CHECK(analytic[1] == 31);
  CHECK(analytic[2] == 71);

  CHECK(measured_rf(cfg, 1, 41) == analytic[0]);
  CHECK(measured_rf(cfg, 2, 81) == analytic[1]);
  CHECK(measured_rf(cfg, 3, 161) == analytic[2]);

  GeneratorConfig single = desk_config();
  single.dilations = {1};
  const std::vector<int> rf1 = receptive_field(single);
  CHECK(rf1[0] == 5);  // 3x3 then stride-2 3x3
  CHECK(measured_rf(single, 1, 31) == 5);
}

TEST_SUITE_END();
