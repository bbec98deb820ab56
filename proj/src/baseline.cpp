#include "polygen/models/baseline.hpp"

#include <stdexcept>

namespace polygen {

BaselineUnet::BaselineUnet(const GeneratorConfig& cfg, Rng& rng) : cfg_(cfg) {
  if (cfg_.extent < 2 || (cfg_.extent & (cfg_.extent - 1)) != 0)
    throw std::invalid_argument("baseline: extent must be a power of two");
  stages_ = 0;
  for (int e = cfg_.extent; e > 1; e /= 2) ++stages_;

  auto width = [&](int stage) {  // stage in [1, stages]
    return std::min(cfg_.base_width << (stage - 1), cfg_.cap());
  };

  int in_ch = cfg_.in_channels;
  for (int b = 1; b <= stages_; ++b) {
    const std::string name = "u/enc" + std::to_string(b);
    EncoderStage stage;
    stage.down = make_conv(reg_, name, in_ch, width(b), 3, 2, 1, 1, rng);
    // Instance statistics are undefined on a 1x1 map; the innermost stage
    // and the raw-input stage run without norm.
    stage.has_norm = b != 1 && (cfg_.extent >> b) > 1;
    if (stage.has_norm) stage.norm = make_norm(reg_, name + "/norm", width(b));
    encoder_.push_back(std::move(stage));
    in_ch = width(b);
  }

  for (int j = 1; j <= stages_; ++j) {
    const int w = j < stages_ ? width(stages_ - j) : cfg_.base_width;
    const std::string name = "u/dec" + std::to_string(j);
    DecoderStage stage;
    stage.up = make_tconv(reg_, name, in_ch, w, 3, 2, 1, 1, rng);
    stage.norm = make_norm(reg_, name + "/norm", w);
    stage.has_skip = j < stages_;
    decoder_.push_back(std::move(stage));
    // Next stage consumes the upsampled features concatenated with the
    // matching encoder output.
    in_ch = stage.has_skip ? w + width(stages_ - j) : w;
  }
  head_ = make_conv(reg_, "u/head", in_ch, cfg_.out_channels, 1, 1, 1, 0, rng);
}

Tensor BaselineUnet::forward(const Tensor& x) const {
  const Shape& s = x.shape();
  if (s.c != cfg_.in_channels || s.h != cfg_.extent || s.w != cfg_.extent)
    throw std::invalid_argument("baseline: input shape " + s.str() +
                                " does not match configured extent");
  std::vector<Tensor> enc_out;
  Tensor h = x;
  for (const EncoderStage& stage : encoder_) {
    h = stage.down(h);
    if (stage.has_norm) h = stage.norm(h);
    h = elu(h);
    enc_out.push_back(h);
  }
  for (int j = 1; j <= stages_; ++j) {
    const DecoderStage& stage = decoder_[j - 1];
    h = elu(stage.norm(stage.up(h)));
    if (stage.has_skip) h = concat_channels(h, enc_out[stages_ - j - 1]);
  }
  return tanh_op(head_(h));
}

}  // namespace polygen
