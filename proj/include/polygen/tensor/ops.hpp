#pragma once

#include <span>

#include "polygen/core/rng.hpp"
#include "polygen/tensor/tensor.hpp"

namespace polygen {

// 2-D convolution geometry. `dilation` spaces kernel taps `dilation` pixels
// apart; the effective kernel extent is k + (k-1)*(dilation-1).
struct ConvSpec {
  int kernel_h = 3;
  int kernel_w = 3;
  int stride = 1;
  int dilation = 1;
  int pad = 0;  // same zero padding on all four sides

  int effective_kh() const { return kernel_h + (kernel_h - 1) * (dilation - 1); }
  int effective_kw() const { return kernel_w + (kernel_w - 1) * (dilation - 1); }
  int out_extent(int in, int eff_k) const {
    return (in + 2 * pad - eff_k) / stride + 1;
  }
};

// input (N, Cin, H, W) * weight (Cout, Cin, kh, kw) + bias (1, Cout, 1, 1).
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias,
              const ConvSpec& spec);

// Adjoint of conv2d: maps (N, Cout, Ho, Wo) back to (N, Cin, H, W) using a
// weight laid out exactly as conv2d's (Cout, Cin, kh, kw). With stride s,
// pad p and output_pad op the output extent is (in-1)*s + k - 2p + op.
Tensor transposed_conv2d(const Tensor& input, const Tensor& weight,
                         const Tensor& bias, int stride, int pad = 0,
                         int output_pad = 0);

// Each pixel replicated into a factor x factor block.
Tensor nearest_resize(const Tensor& input, int factor);

// Nearest-neighbor resample to arbitrary extents (used by jitter).
Tensor nearest_resize_to(const Tensor& input, int out_h, int out_w);

// Area-averaging downsample by an integer factor (extents must divide).
Tensor avg_downsample(const Tensor& input, int factor);

// Per-sample, per-channel standardization with learned affine parameters
// gamma, beta shaped (1, C, 1, 1).
Tensor instance_norm(const Tensor& input, const Tensor& gamma,
                     const Tensor& beta, float eps = 1e-5f);

Tensor elu(const Tensor& input, float alpha = 1.0f);

// Inverted dropout: in training mode each element is zeroed with probability
// `rate` and survivors are scaled by 1/(1-rate); identity otherwise.
Tensor dropout(const Tensor& input, float rate, Rng& rng, bool training);

Tensor concat_channels(std::span<const Tensor> parts);
inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const Tensor parts[] = {a, b};
  return concat_channels(parts);
}

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// y = scale * x + shift, elementwise.
Tensor affine(const Tensor& x, float scale, float shift = 0.0f);

Tensor tanh_op(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor log_op(const Tensor& x);
Tensor abs_op(const Tensor& x);

// Clamp to [lo, hi]; gradient passes only through unclamped elements. When
// `clamped_count` is given it receives the number of elements that hit a
// bound.
Tensor clamp(const Tensor& x, float lo, float hi,
             std::int64_t* clamped_count = nullptr);

Tensor mean_all(const Tensor& x);
Tensor sum_all(const Tensor& x);

}  // namespace polygen
