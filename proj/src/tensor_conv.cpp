#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "polygen/tensor/ops.hpp"

namespace polygen {

namespace {

constexpr int kColTile = 1024;

// C (M x N) += A (M x K) * B (K x N), all row-major. Column tiling keeps the
// streamed B panel resident in L2.
void gemm_nn(int M, int N, int K, const float* A, const float* B, float* C) {
  for (int j0 = 0; j0 < N; j0 += kColTile) {
    const int j1 = std::min(j0 + kColTile, N);
    for (int i = 0; i < M; ++i) {
      float* c = C + static_cast<std::int64_t>(i) * N;
      const float* a = A + static_cast<std::int64_t>(i) * K;
      for (int k = 0; k < K; ++k) {
        const float ak = a[k];
        const float* b = B + static_cast<std::int64_t>(k) * N;
        for (int j = j0; j < j1; ++j) c[j] += ak * b[j];
      }
    }
  }
}

// C (M x N) += A (M x K) * B^T where B is (N x K).
void gemm_nt(int M, int N, int K, const float* A, const float* B, float* C) {
  for (int i = 0; i < M; ++i) {
    const float* a = A + static_cast<std::int64_t>(i) * K;
    float* c = C + static_cast<std::int64_t>(i) * N;
    for (int j = 0; j < N; ++j) {
      const float* b = B + static_cast<std::int64_t>(j) * K;
      float acc = 0.0f;
      for (int k = 0; k < K; ++k) acc += a[k] * b[k];
      c[j] += acc;
    }
  }
}

// C (M x N) += A^T * B where A is (K x M), B is (K x N).
void gemm_tn(int M, int N, int K, const float* A, const float* B, float* C) {
  for (int j0 = 0; j0 < N; j0 += kColTile) {
    const int j1 = std::min(j0 + kColTile, N);
    for (int k = 0; k < K; ++k) {
      const float* a = A + static_cast<std::int64_t>(k) * M;
      const float* b = B + static_cast<std::int64_t>(k) * N;
      for (int i = 0; i < M; ++i) {
        const float ai = a[i];
        float* c = C + static_cast<std::int64_t>(i) * N;
        for (int j = j0; j < j1; ++j) c[j] += ai * b[j];
      }
    }
  }
}

// Gathers conv patches of `plane` (C, ph, pw) into col (C*kh*kw, oh*ow).
// Row order is (c, ky, kx); out-of-bounds taps read zero.
void im2col(const float* plane, int C, int ph, int pw, int kh, int kw, int stride,
            int dil, int pad, int oh, int ow, float* col) {
  const std::int64_t n_pos = static_cast<std::int64_t>(oh) * ow;
  std::int64_t row = 0;
  for (int c = 0; c < C; ++c) {
    const float* src = plane + static_cast<std::int64_t>(c) * ph * pw;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx, ++row) {
        float* dst = col + row * n_pos;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky * dil - pad;
          if (iy < 0 || iy >= ph) {
            std::memset(dst + static_cast<std::int64_t>(oy) * ow, 0,
                        sizeof(float) * ow);
            continue;
          }
          const float* src_row = src + static_cast<std::int64_t>(iy) * pw;
          float* dst_row = dst + static_cast<std::int64_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx * dil - pad;
            dst_row[ox] = (ix >= 0 && ix < pw) ? src_row[ix] : 0.0f;
          }
        }
      }
    }
  }
}

// Scatter-add inverse of im2col.
void col2im(const float* col, int C, int ph, int pw, int kh, int kw, int stride,
            int dil, int pad, int oh, int ow, float* plane) {
  const std::int64_t n_pos = static_cast<std::int64_t>(oh) * ow;
  std::int64_t row = 0;
  for (int c = 0; c < C; ++c) {
    float* dst = plane + static_cast<std::int64_t>(c) * ph * pw;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx, ++row) {
        const float* src = col + row * n_pos;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky * dil - pad;
          if (iy < 0 || iy >= ph) continue;
          float* dst_row = dst + static_cast<std::int64_t>(iy) * pw;
          const float* src_row = src + static_cast<std::int64_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx * dil - pad;
            if (ix >= 0 && ix < pw) dst_row[ix] += src_row[ox];
          }
        }
      }
    }
  }
}

std::vector<float>& scratch_col() {
  thread_local std::vector<float> buf;
  return buf;
}

Tensor make_result(Shape s, std::vector<float> value, std::vector<Tensor> parents,
                   std::function<void(TensorNode&)> bw) {
  auto node = std::make_shared<TensorNode>();
  node->shape = s;
  node->value = std::move(value);
  bool rg = false;
  for (const auto& p : parents) rg = rg || p.requires_grad();
  node->requires_grad = rg;
  if (rg) {
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node());
    node->backward_fn = std::move(bw);
  }
  return Tensor(std::move(node));
}

void check_conv_spec(const ConvSpec& spec) {
  if (spec.kernel_h < 1 || spec.kernel_w < 1)
    throw std::invalid_argument("conv2d: kernel extents must be positive");
  if (spec.stride < 1)
    throw std::invalid_argument("conv2d: stride must be positive, got " +
                                std::to_string(spec.stride));
  if (spec.dilation < 1)
    throw std::invalid_argument("conv2d: dilation must be positive, got " +
                                std::to_string(spec.dilation));
  if (spec.pad < 0)
    throw std::invalid_argument("conv2d: padding must be non-negative");
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias,
              const ConvSpec& spec) {
  check_conv_spec(spec);
  const Shape& is = input.shape();
  const Shape& ws = weight.shape();  // (Cout, Cin, kh, kw)
  const Shape& bs = bias.shape();
  if (ws.h != spec.kernel_h || ws.w != spec.kernel_w)
    throw std::invalid_argument("conv2d: weight kernel extents " + ws.str() +
                                " do not match spec " + std::to_string(spec.kernel_h) +
                                "x" + std::to_string(spec.kernel_w));
  if (is.c != ws.c)
    throw std::invalid_argument("conv2d: input channel extent " +
                                std::to_string(is.c) +
                                " does not match weight input-channel extent " +
                                std::to_string(ws.c));
  if (bs.c != ws.n || bs.n != 1 || bs.h != 1 || bs.w != 1)
    throw std::invalid_argument("conv2d: bias shape " + bs.str() + " must be (1," +
                                std::to_string(ws.n) + ",1,1)");
  const int eff_kh = spec.effective_kh();
  const int eff_kw = spec.effective_kw();
  if (eff_kh > is.h + 2 * spec.pad)
    throw std::invalid_argument("conv2d: effective kernel height " +
                                std::to_string(eff_kh) +
                                " exceeds padded input height " +
                                std::to_string(is.h + 2 * spec.pad));
  if (eff_kw > is.w + 2 * spec.pad)
    throw std::invalid_argument("conv2d: effective kernel width " +
                                std::to_string(eff_kw) +
                                " exceeds padded input width " +
                                std::to_string(is.w + 2 * spec.pad));

  const int oh = spec.out_extent(is.h, eff_kh);
  const int ow = spec.out_extent(is.w, eff_kw);
  const int cout = ws.n;
  const int K = ws.c * ws.h * ws.w;
  const std::int64_t n_pos = static_cast<std::int64_t>(oh) * ow;
  Shape os{is.n, cout, oh, ow};
  std::vector<float> out(static_cast<std::size_t>(os.numel()), 0.0f);

  auto& col = scratch_col();
  col.resize(static_cast<std::size_t>(K) * n_pos);
  for (int n = 0; n < is.n; ++n) {
    const float* in_plane = input.values().data() + static_cast<std::int64_t>(n) * is.c * is.h * is.w;
    im2col(in_plane, is.c, is.h, is.w, spec.kernel_h, spec.kernel_w, spec.stride,
           spec.dilation, spec.pad, oh, ow, col.data());
    float* out_mat = out.data() + static_cast<std::int64_t>(n) * cout * n_pos;
    gemm_nn(cout, static_cast<int>(n_pos), K, weight.values().data(), col.data(),
            out_mat);
    for (int oc = 0; oc < cout; ++oc) {
      const float b = bias.values()[oc];
      float* row = out_mat + static_cast<std::int64_t>(oc) * n_pos;
      for (std::int64_t i = 0; i < n_pos; ++i) row[i] += b;
    }
  }

  return make_result(
      os, std::move(out), {input, weight, bias}, [spec, oh, ow, K](TensorNode& self) {
        auto& px = self.parents[0];
        auto& pw = self.parents[1];
        auto& pb = self.parents[2];
        const Shape& is2 = px->shape;
        const Shape& ws2 = pw->shape;
        const std::int64_t n_pos = static_cast<std::int64_t>(oh) * ow;
        auto& col = scratch_col();
        col.resize(static_cast<std::size_t>(K) * n_pos);
        std::vector<float> dcol;
        if (px->requires_grad) dcol.resize(static_cast<std::size_t>(K) * n_pos);
        for (int n = 0; n < is2.n; ++n) {
          const float* g_mat = self.grad.data() + static_cast<std::int64_t>(n) * ws2.n * n_pos;
          if (px->requires_grad || pw->requires_grad) {
            const float* in_plane =
                px->value.data() + static_cast<std::int64_t>(n) * is2.c * is2.h * is2.w;
            im2col(in_plane, is2.c, is2.h, is2.w, spec.kernel_h, spec.kernel_w,
                   spec.stride, spec.dilation, spec.pad, oh, ow, col.data());
          }
          if (pw->requires_grad)
            gemm_nt(ws2.n, K, static_cast<int>(n_pos), g_mat, col.data(),
                    pw->grad.data());
          if (pb->requires_grad) {
            for (int oc = 0; oc < ws2.n; ++oc) {
              double acc = 0.0;
              const float* row = g_mat + static_cast<std::int64_t>(oc) * n_pos;
              for (std::int64_t i = 0; i < n_pos; ++i) acc += row[i];
              pb->grad[oc] += static_cast<float>(acc);
            }
          }
          if (px->requires_grad) {
            std::fill(dcol.begin(), dcol.end(), 0.0f);
            gemm_tn(K, static_cast<int>(n_pos), ws2.n, pw->value.data(), g_mat,
                    dcol.data());
            float* dx_plane =
                px->grad.data() + static_cast<std::int64_t>(n) * is2.c * is2.h * is2.w;
            col2im(dcol.data(), is2.c, is2.h, is2.w, spec.kernel_h, spec.kernel_w,
                   spec.stride, spec.dilation, spec.pad, oh, ow, dx_plane);
          }
        }
      });
}

Tensor transposed_conv2d(const Tensor& input, const Tensor& weight,
                         const Tensor& bias, int stride, int pad, int output_pad) {
  if (stride < 1)
    throw std::invalid_argument("transposed_conv2d: stride must be positive, got " +
                                std::to_string(stride));
  if (pad < 0 || output_pad < 0 || output_pad >= stride)
    throw std::invalid_argument(
        "transposed_conv2d: require pad >= 0 and 0 <= output_pad < stride");
  const Shape& is = input.shape();
  const Shape& ws = weight.shape();  // (A, B, kh, kw): maps A channels -> B
  const Shape& bs = bias.shape();
  if (is.c != ws.n)
    throw std::invalid_argument("transposed_conv2d: input channel extent " +
                                std::to_string(is.c) +
                                " does not match weight first extent " +
                                std::to_string(ws.n));
  if (bs.c != ws.c || bs.n != 1 || bs.h != 1 || bs.w != 1)
    throw std::invalid_argument("transposed_conv2d: bias shape " + bs.str() +
                                " must be (1," + std::to_string(ws.c) + ",1,1)");
  const int oh = (is.h - 1) * stride + ws.h - 2 * pad + output_pad;
  const int ow = (is.w - 1) * stride + ws.w - 2 * pad + output_pad;
  if (oh < 1 || ow < 1)
    throw std::invalid_argument("transposed_conv2d: non-positive output extent");

  const int a_ch = ws.n;
  const int b_ch = ws.c;
  const int K = b_ch * ws.h * ws.w;
  const std::int64_t n_pos = static_cast<std::int64_t>(is.h) * is.w;
  Shape os{is.n, b_ch, oh, ow};
  std::vector<float> out(static_cast<std::size_t>(os.numel()), 0.0f);

  std::vector<float> colbuf(static_cast<std::size_t>(K) * n_pos);
  for (int n = 0; n < is.n; ++n) {
    const float* x_mat = input.values().data() + static_cast<std::int64_t>(n) * a_ch * n_pos;
    std::fill(colbuf.begin(), colbuf.end(), 0.0f);
    gemm_tn(K, static_cast<int>(n_pos), a_ch, weight.values().data(), x_mat,
            colbuf.data());
    float* out_plane = out.data() + static_cast<std::int64_t>(n) * b_ch * oh * ow;
    col2im(colbuf.data(), b_ch, oh, ow, ws.h, ws.w, stride, 1, pad, is.h, is.w,
           out_plane);
    for (int c = 0; c < b_ch; ++c) {
      const float b = bias.values()[c];
      float* row = out_plane + static_cast<std::int64_t>(c) * oh * ow;
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(oh) * ow; ++i) row[i] += b;
    }
  }

  const int kh = ws.h, kw = ws.w;
  return make_result(
      os, std::move(out), {input, weight, bias},
      [stride, pad, kh, kw, K, oh, ow](TensorNode& self) {
        auto& px = self.parents[0];
        auto& pw = self.parents[1];
        auto& pb = self.parents[2];
        const Shape& is2 = px->shape;
        const Shape& ws2 = pw->shape;
        const int a_ch = ws2.n;
        const int b_ch = ws2.c;
        const std::int64_t n_pos = static_cast<std::int64_t>(is2.h) * is2.w;
        auto& col = scratch_col();
        col.resize(static_cast<std::size_t>(K) * n_pos);
        for (int n = 0; n < is2.n; ++n) {
          const float* g_plane =
              self.grad.data() + static_cast<std::int64_t>(n) * b_ch * oh * ow;
          if (px->requires_grad || pw->requires_grad) {
            // Patches of the output-gradient, viewed through the adjoint conv.
            im2col(g_plane, b_ch, oh, ow, kh, kw, stride, 1, pad, is2.h, is2.w,
                   col.data());
          }
          if (px->requires_grad) {
            float* dx_mat = px->grad.data() + static_cast<std::int64_t>(n) * a_ch * n_pos;
            gemm_nn(a_ch, static_cast<int>(n_pos), K, pw->value.data(), col.data(),
                    dx_mat);
          }
          if (pw->requires_grad) {
            const float* x_mat =
                px->value.data() + static_cast<std::int64_t>(n) * a_ch * n_pos;
            gemm_nt(a_ch, K, static_cast<int>(n_pos), x_mat, col.data(),
                    pw->grad.data());
          }
          if (pb->requires_grad) {
            for (int c = 0; c < b_ch; ++c) {
              double acc = 0.0;
              const float* row = g_plane + static_cast<std::int64_t>(c) * oh * ow;
              for (std::int64_t i = 0; i < static_cast<std::int64_t>(oh) * ow; ++i)
                acc += row[i];
              pb->grad[c] += static_cast<float>(acc);
            }
          }
        }
      });
}

}  // namespace polygen
