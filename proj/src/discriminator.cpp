#include "polygen/models/discriminator.hpp"

#include <stdexcept>

namespace polygen {

PatchDiscriminator::PatchDiscriminator(const GeneratorConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  cfg_.validate();
  int in_ch = cfg_.in_channels + cfg_.out_channels;
  for (int s = 1; s <= cfg_.disc_stages; ++s) {
    const int width = std::min(cfg_.base_width << (s - 1), cfg_.cap());
    const std::string name = "d/stage" + std::to_string(s);
    Stage stage;
    stage.down = make_conv(reg_, name, in_ch, width, 3, 2, 1, 1, rng);
    stage.has_norm = s > 1;
    if (stage.has_norm) stage.norm = make_norm(reg_, name + "/norm", width);
    stages_.push_back(std::move(stage));
    in_ch = width;
  }
  head_ = make_conv(reg_, "d/head", in_ch, 1, 1, 1, 1, 0, rng);
}

Tensor PatchDiscriminator::forward(const Tensor& conditioned,
                                   const Tensor& candidate) const {
  const Shape& cs = conditioned.shape();
  const Shape& ys = candidate.shape();
  if (cs.h != cfg_.extent || cs.w != cfg_.extent)
    throw std::invalid_argument("discriminator: conditioned shape " + cs.str() +
                                " does not match configured extent");
  if (ys.h != cfg_.extent || ys.w != cfg_.extent)
    throw std::invalid_argument("discriminator: candidate shape " + ys.str() +
                                " does not match configured extent");
  Tensor h = concat_channels(conditioned, candidate);
  for (const Stage& stage : stages_) {
    h = stage.down(h);
    if (stage.has_norm) h = stage.norm(h);
    h = elu(h);
  }
  return sigmoid(head_(h));
}

}  // namespace polygen
