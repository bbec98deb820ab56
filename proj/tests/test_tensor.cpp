#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "oracles.hpp"
#include "polygen/core/rng.hpp"
#include "polygen/tensor/adam.hpp"
#include "polygen/tensor/ops.hpp"
#include "polygen/tensor/tensor.hpp"

using namespace polygen;

namespace {

double dot(const std::vector<float>& a, const std::vector<float>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

bool bitwise_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

bool elementwise_equal(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("tensor");

TEST_CASE("conv2d: identity kernel reproduces the input") {
  Rng rng(11);
  Tensor x = oracle::rand_tensor({1, 1, 6, 6}, rng, -2.0f, 2.0f);
  Tensor w = Tensor::zeros({1, 1, 3, 3});
  w.at(0, 0, 1, 1) = 1.0f;
  Tensor b = Tensor::zeros({1, 1, 1, 1});
  Tensor y = conv2d(x, w, b, {.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = 1, .pad = 1});
  CHECK(y.shape() == x.shape());
  CHECK(elementwise_equal(y.values(), x.values()));
}

TEST_CASE("conv2d: dilation 1 matches the nested-loop reference exactly") {
  Rng rng(12);
  Tensor x = oracle::rand_tensor({2, 3, 8, 8}, rng, -1.0f, 1.0f);
  Tensor w = oracle::rand_tensor({4, 3, 3, 3}, rng, -1.0f, 1.0f);
  Tensor b = oracle::rand_tensor({1, 4, 1, 1}, rng, -1.0f, 1.0f);
  for (int stride : {1, 2}) {
    for (int pad : {0, 1, 2}) {
      ConvSpec spec{.kernel_h = 3, .kernel_w = 3, .stride = stride, .dilation = 1, .pad = pad};
      Tensor got = conv2d(x, w, b, spec);
      Tensor want = oracle::conv2d_ref(x, w, b, spec);
      CHECK(got.shape() == want.shape());
      CHECK(elementwise_equal(got.values(), want.values()));
    }
  }
}

TEST_CASE("conv2d: dilation-2 impulse response covers a 5x5 footprint") {
  Tensor x = Tensor::zeros({1, 1, 9, 9});
  x.at(0, 0, 4, 4) = 1.0f;
  Tensor w = Tensor::full({1, 1, 3, 3}, 1.0f);
  Tensor b = Tensor::zeros({1, 1, 1, 1});
  ConvSpec spec{.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = 2, .pad = 2};
  Tensor y = conv2d(x, w, b, spec);
  REQUIRE(y.shape() == Shape{1, 1, 9, 9});

  Tensor want = oracle::conv2d_ref(x, w, b, spec);
  CHECK(elementwise_equal(y.values(), want.values()));

  int nonzero = 0;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      const bool on = y.at(0, 0, r, c) != 0.0f;
      if (on) ++nonzero;
      const bool tap = std::abs(r - 4) % 2 == 0 && std::abs(c - 4) % 2 == 0 &&
                       std::abs(r - 4) <= 2 && std::abs(c - 4) <= 2;
      CHECK(on == tap);
    }
  CHECK(nonzero == 9);
}

TEST_CASE("conv2d: dilated output equals dilation-1 with a zero-padded kernel, exactly") {
  Rng rng(13);
  Tensor x = oracle::rand_tensor({1, 2, 10, 10}, rng, -1.0f, 1.0f);
  Tensor b = oracle::rand_tensor({1, 3, 1, 1}, rng, -0.5f, 0.5f);
  for (int d : {2, 3, 4}) {
    Tensor w = oracle::rand_tensor({3, 2, 3, 3}, rng, -1.0f, 1.0f);
    const int eff = 3 + 2 * (d - 1);
    Tensor w_padded = Tensor::zeros({3, 2, eff, eff});
    for (int oc = 0; oc < 3; ++oc)
      for (int ic = 0; ic < 2; ++ic)
        for (int ky = 0; ky < 3; ++ky)
          for (int kx = 0; kx < 3; ++kx)
            w_padded.at(oc, ic, ky * d, kx * d) = w.at(oc, ic, ky, kx);
    ConvSpec dilated{.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = d, .pad = d};
    ConvSpec plain{.kernel_h = eff, .kernel_w = eff, .stride = 1, .dilation = 1, .pad = d};
    Tensor yd = conv2d(x, w, b, dilated);
    Tensor yp = conv2d(x, w_padded, b, plain);
    REQUIRE(yd.shape() == yp.shape());
    CHECK(elementwise_equal(yd.values(), yp.values()));
  }
}

TEST_CASE("conv2d: shape mismatches name the offending dimension") {
  Tensor x = Tensor::zeros({1, 3, 8, 8});
  Tensor w = Tensor::zeros({4, 2, 3, 3});
  Tensor b = Tensor::zeros({1, 4, 1, 1});
  CHECK_THROWS_WITH_AS(conv2d(x, w, b, {.kernel_h = 3, .kernel_w = 3}),
                       doctest::Contains("channel"), std::invalid_argument);
  Tensor w_ok = Tensor::zeros({4, 3, 3, 3});
  CHECK_THROWS_WITH_AS(
      conv2d(x, w_ok, b, {.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = 5, .pad = 0}),
      doctest::Contains("height"), std::invalid_argument);
}

TEST_CASE("transposed_conv2d: stride-1 1x1 unit kernel is the identity") {
  Rng rng(14);
  Tensor x = oracle::rand_tensor({1, 1, 5, 7}, rng, -1.0f, 1.0f);
  Tensor w = Tensor::full({1, 1, 1, 1}, 1.0f);
  Tensor b = Tensor::zeros({1, 1, 1, 1});
  Tensor y = transposed_conv2d(x, w, b, 1);
  CHECK(y.shape() == x.shape());
  CHECK(elementwise_equal(y.values(), x.values()));
}

TEST_CASE("transposed_conv2d: stride-2 all-ones kernel reproduces overlap counts") {
  const int in = 4, k = 3, stride = 2;
  Tensor x = Tensor::full({1, 1, in, in}, 1.0f);
  Tensor w = Tensor::full({1, 1, k, k}, 1.0f);
  Tensor b = Tensor::zeros({1, 1, 1, 1});
  Tensor y = transposed_conv2d(x, w, b, stride);
  const int out = (in - 1) * stride + k;
  REQUIRE(y.shape() == Shape{1, 1, out, out});

  const std::vector<int> axis = oracle::transposed_overlap_counts(in, k, stride, 0, out);
  for (int r = 0; r < out; ++r)
    for (int c = 0; c < out; ++c)
      CHECK(y.at(0, 0, r, c) == static_cast<float>(axis[r] * axis[c]));

  // Interior takes exactly the {1,2,2,4} repeating pattern.
  for (int r = k - 1; r < out - (k - 1); ++r)
    for (int c = k - 1; c < out - (k - 1); ++c) {
      const int expect = (r % 2 == 0 ? 2 : 1) * (c % 2 == 0 ? 2 : 1);
      CHECK(y.at(0, 0, r, c) == static_cast<float>(expect));
    }
}

TEST_CASE("transposed_conv2d: invalid stride rejected") {
  Tensor x = Tensor::zeros({1, 1, 4, 4});
  Tensor w = Tensor::zeros({1, 1, 3, 3});
  Tensor b = Tensor::zeros({1, 1, 1, 1});
  CHECK_THROWS_AS(transposed_conv2d(x, w, b, 0), std::invalid_argument);
  Tensor w_bad = Tensor::zeros({2, 1, 3, 3});
  CHECK_THROWS_AS(transposed_conv2d(x, w_bad, b, 1), std::invalid_argument);
}

TEST_CASE("adjoint property: <conv(a), b> == <a, conv_T(b)>") {
  Rng rng(15);
  for (int trial = 0; trial < 8; ++trial) {
    const int stride = 1 + static_cast<int>(rng.uniform_int(2));
    const int pad = static_cast<int>(rng.uniform_int(2));
    const int k = 3;
    const int in = 7 + static_cast<int>(rng.uniform_int(4));
    // Pick extents that divide evenly so the adjoint needs no output padding.
    const int eff_in = in - ((in + 2 * pad - k) % stride);
    Tensor a = oracle::rand_tensor({1, 2, eff_in, eff_in}, rng, -1.0f, 1.0f);
    Tensor w = oracle::rand_tensor({3, 2, k, k}, rng, -1.0f, 1.0f);
    Tensor zero_out = Tensor::zeros({1, 3, 1, 1});
    Tensor zero_in = Tensor::zeros({1, 2, 1, 1});
    ConvSpec spec{.kernel_h = k, .kernel_w = k, .stride = stride, .dilation = 1, .pad = pad};
    Tensor ka = conv2d(a, w, zero_out, spec);
    Tensor bt = oracle::rand_tensor(ka.shape(), rng, -1.0f, 1.0f);
    Tensor kt_b = transposed_conv2d(bt, w, zero_in, stride, pad);
    REQUIRE(kt_b.shape() == a.shape());
    const double lhs = dot(ka.values(), bt.values());
    const double rhs = dot(a.values(), kt_b.values());
    CHECK(std::fabs(lhs - rhs) < 1e-4 * std::max(1.0, std::fabs(lhs)));
  }
}

TEST_CASE("nearest_resize: block replication and identity") {
  Tensor c = Tensor::full({1, 2, 3, 3}, 0.7f);
  Tensor cr = nearest_resize(c, 2);
  CHECK(cr.shape() == Shape{1, 2, 6, 6});
  for (float v : cr.values()) CHECK(v == 0.7f);

  Tensor t = Tensor::from_data({1, 1, 2, 2}, {1, 2, 3, 4});
  Tensor tr = nearest_resize(t, 2);
  const std::vector<float> want = {1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
  CHECK(tr.values() == want);

  Tensor same = nearest_resize(t, 1);
  CHECK(elementwise_equal(same.values(), t.values()));

  CHECK_THROWS_AS(nearest_resize(t, 0), std::invalid_argument);
}

TEST_CASE("instance_norm: constant channel collapses to beta") {
  Tensor x = Tensor::full({1, 2, 4, 4}, 3.5f);
  Tensor gamma = Tensor::full({1, 2, 1, 1}, 1.0f);
  Tensor beta = Tensor::zeros({1, 2, 1, 1});
  Tensor y = instance_norm(x, gamma, beta);
  for (float v : y.values()) CHECK(v == doctest::Approx(0.0f).epsilon(1e-6));

  Tensor gamma0 = Tensor::zeros({1, 2, 1, 1});
  Tensor beta2 = Tensor::from_data({1, 2, 1, 1}, {0.25f, -1.5f});
  Rng rng(16);
  Tensor xr = oracle::rand_tensor({1, 2, 4, 4}, rng, -1.0f, 1.0f);
  Tensor y2 = instance_norm(xr, gamma0, beta2);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 16; ++i)
      CHECK(y2.at(0, c, i / 4, i % 4) == beta2.values()[c]);
}

TEST_CASE("instance_norm: normalized statistics on random input") {
  Rng rng(17);
  Tensor x = oracle::rand_tensor({1, 1, 16, 16}, rng, -3.0f, 5.0f);
  Tensor gamma = Tensor::full({1, 1, 1, 1}, 1.0f);
  Tensor beta = Tensor::zeros({1, 1, 1, 1});
  Tensor y = instance_norm(x, gamma, beta);
  double mean = 0.0;
  for (float v : y.values()) mean += v;
  mean /= 256.0;
  double var = 0.0;
  for (float v : y.values()) var += (v - mean) * (v - mean);
  var /= 256.0;
  CHECK(std::fabs(mean) < 1e-5);
  CHECK(std::fabs(var - 1.0) < 1e-3);
}

TEST_CASE("elu: reference values") {
  Tensor x = Tensor::from_data({1, 1, 1, 3}, {0.0f, 1.0f, -1.0f});
  Tensor y = elu(x, 1.0f);
  CHECK(y.values()[0] == 0.0f);
  CHECK(y.values()[1] == 1.0f);
  CHECK(y.values()[2] == doctest::Approx(-0.6321206).epsilon(1e-5));
}

TEST_CASE("dropout: rate 0 identity; rate 0.5 statistics; seeded determinism") {
  Rng rng0(18);
  Tensor x = Tensor::full({1, 1, 100, 100}, 1.0f);
  Tensor y0 = dropout(x, 0.0f, rng0, true);
  CHECK(elementwise_equal(y0.values(), x.values()));

  Rng rng1(19);
  Tensor y1 = dropout(x, 0.5f, rng1, true);
  int zeros = 0;
  for (float v : y1.values()) {
    if (v == 0.0f)
      ++zeros;
    else
      CHECK(v == 2.0f);
  }
  const double frac = zeros / 10000.0;
  CHECK(frac > 0.47);
  CHECK(frac < 0.53);

  Rng rng2(19);
  Tensor y2 = dropout(x, 0.5f, rng2, true);
  CHECK(bitwise_equal(y1.values(), y2.values()));

  Rng rng3(20);
  CHECK_THROWS_AS(dropout(x, 1.0f, rng3, true), std::invalid_argument);

  Tensor y4 = dropout(x, 0.5f, rng3, false);
  CHECK(elementwise_equal(y4.values(), x.values()));
}

TEST_CASE("concat_channels: slices recoverable, extent mismatch rejected") {
  Rng rng(21);
  Tensor a = oracle::rand_tensor({2, 2, 3, 3}, rng, -1.0f, 1.0f);
  Tensor b = oracle::rand_tensor({2, 3, 3, 3}, rng, -1.0f, 1.0f);
  const Tensor only[] = {a};
  Tensor same = concat_channels(only);
  CHECK(elementwise_equal(same.values(), a.values()));

  Tensor y = concat_channels(a, b);
  REQUIRE(y.shape() == Shape{2, 5, 3, 3});
  for (int n = 0; n < 2; ++n) {
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 9; ++i)
        CHECK(y.at(n, c, i / 3, i % 3) == a.at(n, c, i / 3, i % 3));
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 9; ++i)
        CHECK(y.at(n, 2 + c, i / 3, i % 3) == b.at(n, c, i / 3, i % 3));
  }

  Tensor bad = Tensor::zeros({2, 1, 4, 3});
  CHECK_THROWS_AS(concat_channels(a, bad), std::invalid_argument);
}

TEST_CASE("backward: sum(w*x) gives grad(w) == x exactly") {
  Rng rng(22);
  Tensor x = oracle::rand_tensor({1, 2, 3, 3}, rng, -2.0f, 2.0f);
  Tensor w = oracle::rand_tensor({1, 2, 3, 3}, rng, -1.0f, 1.0f, true);
  Tensor loss = sum_all(mul(w, x));
  backward(loss);
  CHECK(elementwise_equal(w.grad(), x.values()));
}

TEST_CASE("backward: rejects non-scalar loss; repeated calls accumulate") {
  Tensor w = Tensor::full({1, 1, 2, 2}, 1.0f, true);
  Tensor y = affine(w, 2.0f);
  CHECK_THROWS_AS(backward(y), std::invalid_argument);

  Tensor loss = sum_all(y);
  backward(loss);
  backward(loss);
  for (float g : w.grad()) CHECK(g == 4.0f);
}

// Central finite differences, h = 1e-3, relative error < 1e-2 in 32-bit
// arithmetic, on random tensors no larger than 4x4x4x4.
TEST_CASE("gradient check: every differentiable op") {
  Rng rng(23);

  SUBCASE("conv2d incl. stride and dilation") {
    Tensor x = oracle::rand_tensor({2, 2, 4, 4}, rng, -1.0f, 1.0f, true);
    Tensor w = oracle::rand_tensor({3, 2, 3, 3}, rng, -0.7f, 0.7f, true);
    Tensor b = oracle::rand_tensor({1, 3, 1, 1}, rng, -0.5f, 0.5f, true);
    for (ConvSpec spec : {ConvSpec{3, 3, 1, 1, 1}, ConvSpec{3, 3, 2, 1, 1},
                          ConvSpec{3, 3, 1, 2, 2}}) {
      auto res = oracle::check_gradients(
          [&] { return sum_all(tanh_op(conv2d(x, w, b, spec))); }, {x, w, b});
      CAPTURE(spec.stride);
      CAPTURE(spec.dilation);
      CAPTURE(res.worst_rel);
      CHECK(res.ok);
    }
  }

  SUBCASE("transposed_conv2d") {
    Tensor x = oracle::rand_tensor({1, 3, 4, 4}, rng, -1.0f, 1.0f, true);
    Tensor w = oracle::rand_tensor({3, 2, 3, 3}, rng, -0.7f, 0.7f, true);
    Tensor b = oracle::rand_tensor({1, 2, 1, 1}, rng, -0.5f, 0.5f, true);
    for (int stride : {1, 2}) {
      auto res = oracle::check_gradients(
          [&] { return sum_all(tanh_op(transposed_conv2d(x, w, b, stride, 1, stride - 1))); },
          {x, w, b});
      CAPTURE(stride);
      CAPTURE(res.worst_rel);
      CHECK(res.ok);
    }
  }

  SUBCASE("instance_norm") {
    Tensor x = oracle::rand_tensor({2, 3, 4, 4}, rng, -1.0f, 1.0f, true);
    Tensor gamma = oracle::rand_tensor({1, 3, 1, 1}, rng, 0.5f, 1.5f, true);
    Tensor beta = oracle::rand_tensor({1, 3, 1, 1}, rng, -0.5f, 0.5f, true);
    Tensor proj = oracle::rand_tensor({2, 3, 4, 4}, rng, 0.5f, 1.5f);
    auto res = oracle::check_gradients(
        [&] { return mean_all(mul(instance_norm(x, gamma, beta), proj)); },
        {x, gamma, beta});
    CAPTURE(res.worst_rel);
    CHECK(res.ok);
  }

  SUBCASE("elementwise and structural ops") {
    Tensor x = oracle::rand_tensor({1, 2, 4, 4}, rng, -1.5f, 1.5f, true);
    Tensor y = oracle::rand_tensor({1, 2, 4, 4}, rng, -1.5f, 1.5f, true);
    Tensor proj = oracle::rand_tensor({1, 4, 4, 4}, rng, 0.5f, 1.5f);
    Tensor proj_half = oracle::rand_tensor({1, 2, 4, 4}, rng, 0.5f, 1.5f);
    Tensor proj_up = oracle::rand_tensor({1, 2, 8, 8}, rng, 0.5f, 1.5f);
    Tensor proj_down = oracle::rand_tensor({1, 2, 2, 2}, rng, 0.5f, 1.5f);

    auto check = [&](const char* what, std::function<Tensor()> builder,
                     std::vector<Tensor> wrts) {
      auto res = oracle::check_gradients(builder, std::move(wrts));
      CAPTURE(what);
      CAPTURE(res.worst_rel);
      CHECK(res.ok);
    };

    check("add/mul/affine", [&] { return mean_all(mul(add(x, affine(y, 0.5f, 0.1f)), proj_half)); }, {x, y});
    check("sub", [&] { return mean_all(mul(sub(x, y), proj_half)); }, {x, y});
    check("elu", [&] { return mean_all(mul(elu(x, 1.0f), proj_half)); }, {x});
    check("tanh", [&] { return mean_all(mul(tanh_op(x), proj_half)); }, {x});
    check("sigmoid+log", [&] { return mean_all(log_op(clamp(sigmoid(x), 1e-7f, 1.0f - 1e-7f))); }, {x});
    check("abs", [&] { return mean_all(mul(abs_op(x), proj_half)); }, {x});
    check("concat", [&] { return mean_all(mul(concat_channels(x, y), proj)); }, {x, y});
    check("nearest_resize", [&] { return mean_all(mul(nearest_resize(x, 2), proj_up)); }, {x});
    check("avg_downsample", [&] { return mean_all(mul(avg_downsample(x, 2), proj_down)); }, {x});
    check("clamp", [&] { return mean_all(mul(clamp(x, -1.0f, 1.0f), proj_half)); }, {x});

    auto dropped = [&] {
      Rng drop_rng(77);
      return mean_all(mul(dropout(x, 0.4f, drop_rng, true), proj_half));
    };
    check("dropout", dropped, {x});
  }

  SUBCASE("composed conv -> instance_norm -> elu -> L1") {
    Tensor x = oracle::rand_tensor({1, 2, 4, 4}, rng, -1.0f, 1.0f, true);
    Tensor w = oracle::rand_tensor({2, 2, 3, 3}, rng, -0.7f, 0.7f, true);
    Tensor b = oracle::rand_tensor({1, 2, 1, 1}, rng, -0.2f, 0.2f, true);
    Tensor gamma = oracle::rand_tensor({1, 2, 1, 1}, rng, 0.8f, 1.2f, true);
    Tensor beta = oracle::rand_tensor({1, 2, 1, 1}, rng, -0.2f, 0.2f, true);
    Tensor target = oracle::rand_tensor({1, 2, 4, 4}, rng, -1.0f, 1.0f);
    auto res = oracle::check_gradients(
        [&] {
          Tensor h = conv2d(x, w, b, {.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = 1, .pad = 1});
          Tensor n = instance_norm(h, gamma, beta);
          Tensor a = elu(n, 1.0f);
          return mean_all(abs_op(sub(a, target)));
        },
        {x, w, b, gamma, beta});
    CAPTURE(res.worst_rel);
    CHECK(res.ok);
  }
}

TEST_CASE("determinism: identical seeds and inputs reproduce ops bit for bit") {
  Rng rng(24);
  Tensor x = oracle::rand_tensor({1, 2, 8, 8}, rng, -1.0f, 1.0f);
  Tensor w = oracle::rand_tensor({2, 2, 3, 3}, rng, -1.0f, 1.0f);
  Tensor b = oracle::rand_tensor({1, 2, 1, 1}, rng, -1.0f, 1.0f);
  ConvSpec spec{.kernel_h = 3, .kernel_w = 3, .stride = 1, .dilation = 2, .pad = 2};
  Tensor y1 = conv2d(x, w, b, spec);
  Tensor y2 = conv2d(x, w, b, spec);
  CHECK(bitwise_equal(y1.values(), y2.values()));

  Rng ra(99), rb(99);
  Tensor d1 = dropout(x, 0.3f, ra, true);
  Tensor d2 = dropout(x, 0.3f, rb, true);
  CHECK(bitwise_equal(d1.values(), d2.values()));
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Tensor w = Tensor::full({1, 1, 2, 2}, 1.25f, true);
  w.zero_grad();
  Adam opt({w});
  const std::vector<float> before = w.values();
  opt.step();
  CHECK(elementwise_equal(w.values(), before));
}

TEST_CASE("adam: first step moves by about -lr * sign(g)") {
  Tensor w = Tensor::from_data({1, 1, 1, 2}, {0.0f, 0.0f}, true);
  w.zero_grad();
  w.node()->grad[0] = 0.37f;
  w.node()->grad[1] = -2.1f;
  AdamConfig cfg;
  Adam opt({w}, cfg);
  opt.step();
  CHECK(std::fabs(-w.values()[0] / cfg.lr - 1.0f) < 0.01f);
  CHECK(std::fabs(w.values()[1] / cfg.lr - 1.0f) < 0.01f);
}

TEST_CASE("adam: minimizes (w-3)^2 from 0 within 2000 steps") {
  Tensor w = Tensor::full({1, 1, 1, 1}, 0.0f, true);
  AdamConfig cfg;
  cfg.lr = 0.01f;
  Adam opt({w}, cfg);
  for (int step = 0; step < 2000; ++step) {
    w.zero_grad();
    Tensor d = affine(w, 1.0f, -3.0f);
    Tensor loss = mean_all(mul(d, d));
    backward(loss);
    opt.step();
  }
  CHECK(std::fabs(w.values()[0] - 3.0f) < 0.05f);
}

TEST_CASE("adam: non-finite gradient rejects the update and is flagged") {
  Tensor w = Tensor::full({1, 1, 1, 1}, 1.0f, true);
  w.zero_grad();
  w.node()->grad[0] = std::numeric_limits<float>::quiet_NaN();
  Adam opt({w});
  opt.step();
  CHECK(w.values()[0] == 1.0f);
  CHECK(opt.nan_rejections() == 1);
}

TEST_SUITE_END();
