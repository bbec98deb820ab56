#include "polygen/tensor/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace polygen {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  slots_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const std::size_t n = params_[i].values().size();
    slots_[i].m.assign(n, 0.0f);
    slots_[i].v.assign(n, 0.0f);
  }
}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    Slot& s = slots_[i];
    const auto& node = p.node();
    if (node->grad.empty()) continue;  // never touched by backward
    if (node->grad.size() != node->value.size())
      throw std::invalid_argument("adam: gradient shape mismatch for " + node->name);
    if (!all_finite(node->grad)) {
      ++nan_rejections_;
      continue;
    }
    s.t += 1;
    const double bc1 = 1.0 - std::pow(static_cast<double>(cfg_.beta1), static_cast<double>(s.t));
    const double bc2 = 1.0 - std::pow(static_cast<double>(cfg_.beta2), static_cast<double>(s.t));
    float* w = node->value.data();
    const float* g = node->grad.data();
    for (std::size_t k = 0; k < node->value.size(); ++k) {
      s.m[k] = cfg_.beta1 * s.m[k] + (1.0f - cfg_.beta1) * g[k];
      s.v[k] = cfg_.beta2 * s.v[k] + (1.0f - cfg_.beta2) * g[k] * g[k];
      const float mhat = static_cast<float>(s.m[k] / bc1);
      const float vhat = static_cast<float>(s.v[k] / bc2);
      w[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace polygen
