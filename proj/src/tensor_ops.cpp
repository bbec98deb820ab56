#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "polygen/tensor/ops.hpp"

namespace polygen {

namespace {

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

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  const Shape& x = a.shape();
  const Shape& y = b.shape();
  const char* dim = nullptr;
  if (x.n != y.n) dim = "batch";
  else if (x.c != y.c) dim = "channel";
  else if (x.h != y.h) dim = "height";
  else if (x.w != y.w) dim = "width";
  if (dim)
    throw std::invalid_argument(std::string(op) + ": " + dim +
                                " extent mismatch, " + x.str() + " vs " + y.str());
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<float> out(a.values());
  const auto& bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](TensorNode& self) {
    for (int side = 0; side < 2; ++side) {
      auto& p = self.parents[side];
      if (!p->requires_grad) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<float> out(a.values());
  const auto& bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i];
    if (pb->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] -= self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<float> out(a.values());
  const auto& bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](TensorNode& self) {
    auto& pa = self.parents[0];
    auto& pb = self.parents[1];
    if (pa->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        pa->grad[i] += self.grad[i] * pb->value[i];
    if (pb->requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        pb->grad[i] += self.grad[i] * pa->value[i];
  });
}

Tensor affine(const Tensor& x, float scale, float shift) {
  std::vector<float> out(x.values());
  for (float& v : out) v = scale * v + shift;
  return make_result(x.shape(), std::move(out), {x}, [scale](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += scale * self.grad[i];
  });
}

Tensor tanh_op(const Tensor& x) {
  std::vector<float> out(x.values());
  for (float& v : out) v = std::tanh(v);
  return make_result(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const float y = self.value[i];
      p->grad[i] += self.grad[i] * (1.0f - y * y);
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<float> out(x.values());
  for (float& v : out) v = 1.0f / (1.0f + std::exp(-v));
  return make_result(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const float y = self.value[i];
      p->grad[i] += self.grad[i] * y * (1.0f - y);
    }
  });
}

Tensor log_op(const Tensor& x) {
  std::vector<float> out(x.values());
  for (float& v : out) v = std::log(v);
  return make_result(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] / p->value[i];
  });
}

Tensor abs_op(const Tensor& x) {
  std::vector<float> out(x.values());
  for (float& v : out) v = std::fabs(v);
  return make_result(x.shape(), std::move(out), {x}, [](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const float v = p->value[i];
      const float s = v > 0.0f ? 1.0f : (v < 0.0f ? -1.0f : 0.0f);
      p->grad[i] += self.grad[i] * s;
    }
  });
}

Tensor clamp(const Tensor& x, float lo, float hi, std::int64_t* clamped_count) {
  std::vector<float> out(x.values());
  std::int64_t clamped = 0;
  for (float& v : out) {
    if (v < lo) {
      v = lo;
      ++clamped;
    } else if (v > hi) {
      v = hi;
      ++clamped;
    }
  }
  if (clamped_count) *clamped_count += clamped;
  return make_result(x.shape(), std::move(out), {x}, [lo, hi](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const float v = p->value[i];
      if (v > lo && v < hi) p->grad[i] += self.grad[i];
    }
  });
}

Tensor elu(const Tensor& x, float alpha) {
  if (!(alpha > 0.0f))
    throw std::invalid_argument("elu: alpha must be positive");
  std::vector<float> out(x.values());
  for (float& v : out)
    if (v < 0.0f) v = alpha * (std::exp(v) - 1.0f);
  return make_result(x.shape(), std::move(out), {x}, [alpha](TensorNode& self) {
    auto& p = self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const float y = self.value[i];
      p->grad[i] += self.grad[i] * (y >= 0.0f ? 1.0f : y + alpha);
    }
  });
}

Tensor dropout(const Tensor& x, float rate, Rng& rng, bool training) {
  if (rate < 0.0f || rate >= 1.0f)
    throw std::invalid_argument("dropout: rate must be in [0, 1), got " +
                                std::to_string(rate));
  if (!training || rate == 0.0f) {
    std::vector<float> out(x.values());
    return make_result(x.shape(), std::move(out), {x}, [](TensorNode& self) {
      auto& p = self.parents[0];
      for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    });
  }
  const float keep_scale = 1.0f / (1.0f - rate);
  std::vector<std::uint8_t> mask(x.values().size());
  std::vector<float> out(x.values());
  for (std::size_t i = 0; i < out.size(); ++i) {
    mask[i] = rng.bernoulli(rate) ? 0 : 1;
    out[i] = mask[i] ? out[i] * keep_scale : 0.0f;
  }
  return make_result(x.shape(), std::move(out), {x},
                     [mask = std::move(mask), keep_scale](TensorNode& self) {
                       auto& p = self.parents[0];
                       for (std::size_t i = 0; i < self.grad.size(); ++i)
                         if (mask[i]) p->grad[i] += self.grad[i] * keep_scale;
                     });
}

Tensor concat_channels(std::span<const Tensor> parts) {
  if (parts.empty())
    throw std::invalid_argument("concat_channels: no inputs");
  const Shape& first = parts[0].shape();
  int total_c = 0;
  for (const Tensor& p : parts) {
    const Shape& s = p.shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w)
      throw std::invalid_argument(
          "concat_channels: batch/spatial extent mismatch, " + first.str() +
          " vs " + s.str());
    total_c += s.c;
  }
  Shape out_shape{first.n, total_c, first.h, first.w};
  std::vector<float> out(static_cast<std::size_t>(out_shape.numel()));
  const std::int64_t plane = static_cast<std::int64_t>(first.h) * first.w;
  std::int64_t c_off = 0;
  for (const Tensor& p : parts) {
    const Shape& s = p.shape();
    for (int n = 0; n < s.n; ++n) {
      const float* src = p.values().data() + static_cast<std::int64_t>(n) * s.c * plane;
      float* dst = out.data() + (static_cast<std::int64_t>(n) * total_c + c_off) * plane;
      std::copy(src, src + static_cast<std::int64_t>(s.c) * plane, dst);
    }
    c_off += s.c;
  }
  std::vector<Tensor> parents(parts.begin(), parts.end());
  return make_result(out_shape, std::move(out), std::move(parents),
                     [plane, total_c](TensorNode& self) {
                       std::int64_t off = 0;
                       for (auto& p : self.parents) {
                         const Shape& s = p->shape;
                         if (p->requires_grad) {
                           for (int n = 0; n < s.n; ++n) {
                             const float* g = self.grad.data() +
                                              (static_cast<std::int64_t>(n) * total_c + off) * plane;
                             float* pg = p->grad.data() +
                                         static_cast<std::int64_t>(n) * s.c * plane;
                             for (std::int64_t i = 0; i < s.c * plane; ++i) pg[i] += g[i];
                           }
                         }
                         off += s.c;
                       }
                     });
}

Tensor nearest_resize(const Tensor& input, int factor) {
  if (factor < 1)
    throw std::invalid_argument("nearest_resize: factor must be >= 1, got " +
                                std::to_string(factor));
  const Shape& s = input.shape();
  Shape os{s.n, s.c, s.h * factor, s.w * factor};
  std::vector<float> out(static_cast<std::size_t>(os.numel()));
  const float* in = input.values().data();
  float* o = out.data();
  for (int nc = 0; nc < s.n * s.c; ++nc) {
    const float* ip = in + static_cast<std::int64_t>(nc) * s.h * s.w;
    float* op = o + static_cast<std::int64_t>(nc) * os.h * os.w;
    for (int y = 0; y < os.h; ++y) {
      const float* row = ip + static_cast<std::int64_t>(y / factor) * s.w;
      for (int x = 0; x < os.w; ++x) op[static_cast<std::int64_t>(y) * os.w + x] = row[x / factor];
    }
  }
  return make_result(os, std::move(out), {input}, [factor](TensorNode& self) {
    auto& p = self.parents[0];
    const Shape& is = p->shape;
    const Shape& os2 = self.shape;
    for (int nc = 0; nc < is.n * is.c; ++nc) {
      float* pg = p->grad.data() + static_cast<std::int64_t>(nc) * is.h * is.w;
      const float* g = self.grad.data() + static_cast<std::int64_t>(nc) * os2.h * os2.w;
      for (int y = 0; y < os2.h; ++y)
        for (int x = 0; x < os2.w; ++x)
          pg[static_cast<std::int64_t>(y / factor) * is.w + x / factor] +=
              g[static_cast<std::int64_t>(y) * os2.w + x];
    }
  });
}

Tensor nearest_resize_to(const Tensor& input, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1)
    throw std::invalid_argument("nearest_resize_to: output extents must be positive");
  const Shape& s = input.shape();
  Shape os{s.n, s.c, out_h, out_w};
  std::vector<int> src_y(out_h), src_x(out_w);
  for (int y = 0; y < out_h; ++y)
    src_y[y] = std::min(s.h - 1, static_cast<int>((y + 0.5) * s.h / out_h));
  for (int x = 0; x < out_w; ++x)
    src_x[x] = std::min(s.w - 1, static_cast<int>((x + 0.5) * s.w / out_w));
  std::vector<float> out(static_cast<std::size_t>(os.numel()));
  for (int nc = 0; nc < s.n * s.c; ++nc) {
    const float* ip = input.values().data() + static_cast<std::int64_t>(nc) * s.h * s.w;
    float* op = out.data() + static_cast<std::int64_t>(nc) * out_h * out_w;
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x)
        op[static_cast<std::int64_t>(y) * out_w + x] = ip[static_cast<std::int64_t>(src_y[y]) * s.w + src_x[x]];
  }
  return make_result(os, std::move(out), {input},
                     [src_y = std::move(src_y), src_x = std::move(src_x)](TensorNode& self) {
                       auto& p = self.parents[0];
                       const Shape& is = p->shape;
                       const Shape& os2 = self.shape;
                       for (int nc = 0; nc < is.n * is.c; ++nc) {
                         float* pg = p->grad.data() + static_cast<std::int64_t>(nc) * is.h * is.w;
                         const float* g = self.grad.data() + static_cast<std::int64_t>(nc) * os2.h * os2.w;
                         for (int y = 0; y < os2.h; ++y)
                           for (int x = 0; x < os2.w; ++x)
                             pg[static_cast<std::int64_t>(src_y[y]) * is.w + src_x[x]] +=
                                 g[static_cast<std::int64_t>(y) * os2.w + x];
                       }
                     });
}

Tensor avg_downsample(const Tensor& input, int factor) {
  if (factor < 1)
    throw std::invalid_argument("avg_downsample: factor must be >= 1");
  const Shape& s = input.shape();
  if (s.h % factor != 0 || s.w % factor != 0)
    throw std::invalid_argument("avg_downsample: extents " + s.str() +
                                " not divisible by factor " + std::to_string(factor));
  Shape os{s.n, s.c, s.h / factor, s.w / factor};
  const float inv = 1.0f / static_cast<float>(factor * factor);
  std::vector<float> out(static_cast<std::size_t>(os.numel()));
  for (int nc = 0; nc < s.n * s.c; ++nc) {
    const float* ip = input.values().data() + static_cast<std::int64_t>(nc) * s.h * s.w;
    float* op = out.data() + static_cast<std::int64_t>(nc) * os.h * os.w;
    for (int y = 0; y < os.h; ++y)
      for (int x = 0; x < os.w; ++x) {
        float acc = 0.0f;
        for (int dy = 0; dy < factor; ++dy)
          for (int dx = 0; dx < factor; ++dx)
            acc += ip[static_cast<std::int64_t>(y * factor + dy) * s.w + x * factor + dx];
        op[static_cast<std::int64_t>(y) * os.w + x] = acc * inv;
      }
  }
  return make_result(os, std::move(out), {input}, [factor, inv](TensorNode& self) {
    auto& p = self.parents[0];
    const Shape& is = p->shape;
    const Shape& os2 = self.shape;
    for (int nc = 0; nc < is.n * is.c; ++nc) {
      float* pg = p->grad.data() + static_cast<std::int64_t>(nc) * is.h * is.w;
      const float* g = self.grad.data() + static_cast<std::int64_t>(nc) * os2.h * os2.w;
      for (int y = 0; y < os2.h; ++y)
        for (int x = 0; x < os2.w; ++x) {
          const float gv = g[static_cast<std::int64_t>(y) * os2.w + x] * inv;
          for (int dy = 0; dy < factor; ++dy)
            for (int dx = 0; dx < factor; ++dx)
              pg[static_cast<std::int64_t>(y * factor + dy) * is.w + x * factor + dx] += gv;
        }
    }
  });
}

Tensor instance_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                     float eps) {
  const Shape& s = input.shape();
  const Shape& gs = gamma.shape();
  const Shape& bs = beta.shape();
  if (gs.c != s.c || gs.n != 1 || gs.h != 1 || gs.w != 1)
    throw std::invalid_argument("instance_norm: gamma shape " + gs.str() +
                                " must be (1," + std::to_string(s.c) + ",1,1)");
  if (bs.c != s.c || bs.n != 1 || bs.h != 1 || bs.w != 1)
    throw std::invalid_argument("instance_norm: beta shape " + bs.str() +
                                " must be (1," + std::to_string(s.c) + ",1,1)");
  if (s.h * s.w < 1)
    throw std::invalid_argument("instance_norm: spatial size must be >= 1");

  const std::int64_t plane = static_cast<std::int64_t>(s.h) * s.w;
  std::vector<float> out(static_cast<std::size_t>(s.numel()));
  // Per (sample, channel) statistics, cached for the backward pass.
  std::vector<float> means(static_cast<std::size_t>(s.n) * s.c);
  std::vector<float> inv_stds(static_cast<std::size_t>(s.n) * s.c);
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const float* ip = input.values().data() + (static_cast<std::int64_t>(n) * s.c + c) * plane;
      double sum = 0.0;
      for (std::int64_t i = 0; i < plane; ++i) sum += ip[i];
      const double mean = sum / static_cast<double>(plane);
      double var = 0.0;
      for (std::int64_t i = 0; i < plane; ++i) {
        const double d = ip[i] - mean;
        var += d * d;
      }
      var /= static_cast<double>(plane);
      const double inv = 1.0 / std::sqrt(var + eps);
      means[static_cast<std::size_t>(n) * s.c + c] = static_cast<float>(mean);
      inv_stds[static_cast<std::size_t>(n) * s.c + c] = static_cast<float>(inv);
      const float g = gamma.values()[c];
      const float b = beta.values()[c];
      float* op = out.data() + (static_cast<std::int64_t>(n) * s.c + c) * plane;
      for (std::int64_t i = 0; i < plane; ++i)
        op[i] = static_cast<float>((ip[i] - mean) * inv) * g + b;
    }
  }
  return make_result(
      s, std::move(out), {input, gamma, beta},
      [means = std::move(means), inv_stds = std::move(inv_stds), plane](TensorNode& self) {
        auto& px = self.parents[0];
        auto& pg = self.parents[1];
        auto& pb = self.parents[2];
        const Shape& is = px->shape;
        for (int n = 0; n < is.n; ++n) {
          for (int c = 0; c < is.c; ++c) {
            const std::size_t nc = static_cast<std::size_t>(n) * is.c + c;
            const float mean = means[nc];
            const float inv = inv_stds[nc];
            const float g = pg->value[c];
            const float* x = px->value.data() + (static_cast<std::int64_t>(n) * is.c + c) * plane;
            const float* dy = self.grad.data() + (static_cast<std::int64_t>(n) * is.c + c) * plane;
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (std::int64_t i = 0; i < plane; ++i) {
              const float xhat = (x[i] - mean) * inv;
              sum_dy += dy[i];
              sum_dy_xhat += static_cast<double>(dy[i]) * xhat;
            }
            if (pb->requires_grad) pb->grad[c] += static_cast<float>(sum_dy);
            if (pg->requires_grad) pg->grad[c] += static_cast<float>(sum_dy_xhat);
            if (px->requires_grad) {
              const float mean_dy = static_cast<float>(sum_dy / static_cast<double>(plane));
              const float mean_dy_xhat =
                  static_cast<float>(sum_dy_xhat / static_cast<double>(plane));
              float* dx = px->grad.data() + (static_cast<std::int64_t>(n) * is.c + c) * plane;
              for (std::int64_t i = 0; i < plane; ++i) {
                const float xhat = (x[i] - mean) * inv;
                dx[i] += g * inv * (dy[i] - mean_dy - xhat * mean_dy_xhat);
              }
            }
          }
        }
      });
}

Tensor mean_all(const Tensor& x) {
  double sum = 0.0;
  for (float v : x.values()) sum += v;
  const double inv_n = 1.0 / static_cast<double>(x.numel());
  std::vector<float> out{static_cast<float>(sum * inv_n)};
  return make_result(Shape{1, 1, 1, 1}, std::move(out), {x}, [inv_n](TensorNode& self) {
    auto& p = self.parents[0];
    const float g = static_cast<float>(self.grad[0] * inv_n);
    for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += g;
  });
}

Tensor sum_all(const Tensor& x) {
  double sum = 0.0;
  for (float v : x.values()) sum += v;
  std::vector<float> out{static_cast<float>(sum)};
  return make_result(Shape{1, 1, 1, 1}, std::move(out), {x}, [](TensorNode& self) {
    auto& p = self.parents[0];
    const float g = self.grad[0];
    for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += g;
  });
}

}  // namespace polygen
