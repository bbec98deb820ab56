#include "polygen/training/losses.hpp"

#include <stdexcept>

namespace polygen {

namespace {

Tensor neg_mean_log(const Tensor& scores, ClampStats* stats) {
  std::int64_t clamped = 0;
  Tensor safe = clamp(scores, kScoreEps, 1.0f - kScoreEps, &clamped);
  if (stats) stats->clamped += clamped;
  return affine(mean_all(log_op(safe)), -1.0f);
}

}  // namespace

Tensor d_loss(const Tensor& d_real, const Tensor& d_fake, ClampStats* stats) {
  Tensor real_term = neg_mean_log(d_real, stats);
  // log(1 - d) via the same clamped path.
  std::int64_t clamped = 0;
  Tensor safe_fake = clamp(d_fake, kScoreEps, 1.0f - kScoreEps, &clamped);
  if (stats) stats->clamped += clamped;
  Tensor fake_term = affine(mean_all(log_op(affine(safe_fake, -1.0f, 1.0f))), -1.0f);
  return add(real_term, fake_term);
}

Tensor g_gan_loss(const Tensor& d_fake, ClampStats* stats) {
  return neg_mean_log(d_fake, stats);
}

ReconLosses recon_loss(const MultiScaleOutput& outputs, const Tensor& target,
                       const ReconWeights& weights) {
  if (!outputs.s4.defined() || !outputs.s2.defined() || !outputs.s1.defined())
    throw std::invalid_argument("recon_loss: missing multi-scale outputs");
  const Shape& ts = target.shape();
  const Shape& fs = outputs.s1.shape();
  if (ts.h != fs.h || ts.w != fs.w || ts.c != fs.c)
    throw std::invalid_argument("recon_loss: target extent " + ts.str() +
                                " does not match full-scale output " + fs.str());
  auto down_factor = [&](const Tensor& out) {
    const int f = ts.h / out.shape().h;
    if (f * out.shape().h != ts.h)
      throw std::invalid_argument("recon_loss: head extent does not divide target");
    return f;
  };

  ReconLosses r;
  {
    Tensor t4 = avg_downsample(target, down_factor(outputs.s4));
    Tensor d = sub(outputs.s4, t4);
    r.l2_s4 = mean_all(mul(d, d));
  }
  {
    Tensor t2 = avg_downsample(target, down_factor(outputs.s2));
    r.l1_s2 = mean_all(abs_op(sub(outputs.s2, t2)));
  }
  r.l1_s1 = mean_all(abs_op(sub(outputs.s1, target)));
  r.total = add(add(affine(r.l2_s4, weights.s4), affine(r.l1_s2, weights.s2)),
                affine(r.l1_s1, weights.s1));
  return r;
}

Tensor total_g_loss(const Tensor& gan, const Tensor& recon, float lambda) {
  if (lambda < 0.0f) throw std::invalid_argument("total_g_loss: lambda must be >= 0");
  return add(gan, affine(recon, lambda));
}

}  // namespace polygen
