#include "polygen/models/generator.hpp"

#include <stdexcept>

namespace polygen {

GeneratorNet::GeneratorNet(const GeneratorConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  const int B = cfg_.blocks;

  int in_ch = cfg_.in_channels;
  int extent = cfg_.extent;
  for (int b = 1; b <= B; ++b) {
    const int width = cfg_.encoder_width(b);
    EncoderBlock block;
    for (std::size_t di = 0; di < cfg_.dilations.size(); ++di) {
      const int d = cfg_.dilations[di];
      const std::string name = "g/enc" + std::to_string(b) + "/dil" + std::to_string(d);
      block.dilated.push_back(make_conv(reg_, name, in_ch, width, 3, 1, d, d, rng));
      block.dilated_norm.push_back(make_norm(reg_, name + "/norm", width));
    }
    const std::string base = "g/enc" + std::to_string(b);
    const int cat_ch = width * static_cast<int>(cfg_.dilations.size());
    block.fuse = make_conv(reg_, base + "/fuse1x1", cat_ch, width, 1, 1, 1, 0, rng);
    block.fuse_norm = make_norm(reg_, base + "/fuse1x1/norm", width);
    block.down = make_conv(reg_, base + "/down", width, width, 3, 2, 1, 1, rng);
    block.down_norm = make_norm(reg_, base + "/down/norm", width);
    block.dropout = b > 1;
    encoder_.push_back(std::move(block));
    in_ch = width;
    extent /= 2;
    extent_trace_.push_back(extent);
  }

  for (int j = 1; j <= B; ++j) {
    const int width = cfg_.decoder_width(j);
    const int out_extent = cfg_.extent >> (B - j);
    const std::string base = "g/dec" + std::to_string(j);
    DecoderBlock block;
    if (cfg_.upsample == UpsampleMode::kResizeConv) {
      block.up_conv = make_conv(reg_, base + "/up", in_ch, width, 3, 1, 1, 1, rng);
    } else {
      block.up_tconv = make_tconv(reg_, base + "/up", in_ch, width, 3, 2, 1, 1, rng);
    }
    block.up_norm = make_norm(reg_, base + "/up/norm", width);
    const int skip_ch = cfg_.encoder_width(B - j + 1);
    block.fuse = make_conv(reg_, base + "/fuse", width + skip_ch, width, 3, 1, 1, 1, rng);
    block.fuse_norm = make_norm(reg_, base + "/fuse/norm", width);
    block.out_extent = out_extent;
    block.has_head = out_extent == cfg_.extent / 4 || out_extent == cfg_.extent / 2 ||
                     out_extent == cfg_.extent;
    if (block.has_head)
      block.head = make_conv(reg_, base + "/head", width, cfg_.out_channels, 1, 1, 1, 0, rng);
    decoder_.push_back(std::move(block));
    in_ch = width;
  }
}

MultiScaleOutput GeneratorNet::forward(const Tensor& x, Rng& dropout_rng) const {
  const Shape& s = x.shape();
  if (s.c != cfg_.in_channels || s.h != cfg_.extent || s.w != cfg_.extent)
    throw std::invalid_argument("generator: input shape " + s.str() +
                                " does not match configured extent " +
                                std::to_string(cfg_.extent) + " and channels " +
                                std::to_string(cfg_.in_channels));

  std::vector<Tensor> skips;
  Tensor h = x;
  for (const EncoderBlock& block : encoder_) {
    std::vector<Tensor> branches;
    branches.reserve(block.dilated.size());
    for (std::size_t i = 0; i < block.dilated.size(); ++i)
      branches.push_back(elu(block.dilated_norm[i](block.dilated[i](h))));
    Tensor cat = concat_channels(branches);
    Tensor fused = elu(block.fuse_norm(block.fuse(cat)));
    skips.push_back(fused);
    h = elu(block.down_norm(block.down(fused)));
    if (block.dropout) h = dropout(h, cfg_.dropout_rate, dropout_rng, true);
  }

  MultiScaleOutput out;
  const int B = cfg_.blocks;
  for (int j = 1; j <= B; ++j) {
    const DecoderBlock& block = decoder_[j - 1];
    Tensor up = cfg_.upsample == UpsampleMode::kResizeConv
                    ? block.up_conv(nearest_resize(h, 2))
                    : block.up_tconv(h);
    up = elu(block.up_norm(up));
    Tensor cat = concat_channels(up, skips[B - j]);
    h = elu(block.fuse_norm(block.fuse(cat)));
    if (block.has_head) {
      Tensor img = tanh_op(block.head(h));
      if (block.out_extent == cfg_.extent / 4)
        out.s4 = img;
      else if (block.out_extent == cfg_.extent / 2)
        out.s2 = img;
      else
        out.s1 = img;
    }
  }
  return out;
}

}  // namespace polygen
