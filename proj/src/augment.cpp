#include "polygen/augment/augment.hpp"

#include <cmath>
#include <stdexcept>

#include "polygen/core/error.hpp"

namespace polygen {

namespace {

template <typename Img>
Img rot90_impl(const Img& in) {
  Img out;
  out.width = in.height;
  out.height = in.width;
  out.pixels.resize(in.pixels.size());
  // (y, x) -> (height' - 1 - x', ...): counter-clockwise quarter turn.
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      out.pixels[static_cast<std::size_t>(in.width - 1 - x) * out.width + y] =
          in.pixels[static_cast<std::size_t>(y) * in.width + x];
  return out;
}

template <typename Img>
Img flip_h_impl(const Img& in) {
  Img out = in;
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      out.pixels[static_cast<std::size_t>(y) * in.width + (in.width - 1 - x)] =
          in.pixels[static_cast<std::size_t>(y) * in.width + x];
  return out;
}

template <typename Img>
Img flip_v_impl(const Img& in) {
  Img out = in;
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      out.pixels[static_cast<std::size_t>(in.height - 1 - y) * in.width + x] =
          in.pixels[static_cast<std::size_t>(y) * in.width + x];
  return out;
}

std::string zoom_tag(double z) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "zoom%.2f", z);
  return buf;
}

}  // namespace

GrayImage rot90(const GrayImage& img) { return rot90_impl(img); }
BinaryMask rot90(const BinaryMask& mask) { return rot90_impl(mask); }
GrayImage flip_h(const GrayImage& img) { return flip_h_impl(img); }
BinaryMask flip_h(const BinaryMask& mask) { return flip_h_impl(mask); }
GrayImage flip_v(const GrayImage& img) { return flip_v_impl(img); }
BinaryMask flip_v(const BinaryMask& mask) { return flip_v_impl(mask); }

GrayImage zoom_out(const GrayImage& img, double factor) {
  if (factor == 1.0) return img;
  TransformParams p;
  p.scale = factor;
  return warp_image(img, p);
}

BinaryMask zoom_out(const BinaryMask& mask, double factor) {
  if (factor == 1.0) return mask;
  TransformParams p;
  p.scale = factor;
  return warp_mask(mask, p);
}

TransformParams sample_params(Rng& rng, const ParamRanges& ranges, int width,
                              int height) {
  if (ranges.rotation_min_deg > ranges.rotation_max_deg ||
      ranges.scale_min > ranges.scale_max || ranges.translate_frac < 0.0 ||
      ranges.corner_frac < 0.0)
    throw std::invalid_argument("sample_params: empty range");
  if (!(ranges.scale_min > 0.0))
    throw std::invalid_argument("sample_params: scale range must be positive");

  TransformParams p;
  p.rotation_deg = rng.uniform(ranges.rotation_min_deg, ranges.rotation_max_deg);
  p.scale = rng.uniform(ranges.scale_min, ranges.scale_max);
  const double tx = ranges.translate_frac * width;
  const double ty = ranges.translate_frac * height;
  p.translate_x = rng.uniform(-tx, tx);
  p.translate_y = rng.uniform(-ty, ty);
  const double cxj = ranges.corner_frac * width;
  const double cyj = ranges.corner_frac * height;
  for (auto& corner : p.corner_shift) {
    corner[0] = rng.uniform(-cxj, cxj);
    corner[1] = rng.uniform(-cyj, cyj);
  }
  return p;
}

bool validate_mask(const BinaryMask& mask, double min_area_fraction, int margin) {
  const std::int64_t area = mask.area();
  if (area == 0) return false;
  const double canvas = static_cast<double>(mask.width) * mask.height;
  if (static_cast<double>(area) < min_area_fraction * canvas) return false;
  int min_x = mask.width, max_x = -1, min_y = mask.height, max_y = -1;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(y, x)) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
  return min_x >= margin && min_y >= margin && max_x <= mask.width - 1 - margin &&
         max_y <= mask.height - 1 - margin;
}

BinaryMask synth_mask(const std::vector<BinaryMask>& pool, Rng& rng,
                      const ParamRanges& ranges, int max_attempts) {
  if (pool.empty()) throw std::invalid_argument("synth_mask: empty mask pool");
  const std::size_t source = rng.uniform_int(pool.size());
  const BinaryMask& base = pool[source];
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const TransformParams params = sample_params(rng, ranges, base.width, base.height);
    BinaryMask warped = warp_mask(base, params);
    if (validate_mask(warped)) return warped;
  }
  throw DataError("synth_mask: no valid mask from source " + std::to_string(source) +
                  " after " + std::to_string(max_attempts) + " attempts");
}

std::vector<AugmentedPair> augment_pair(const ImageMaskPair& pair,
                                        const AugmentationRecipe& recipe) {
  if (pair.image.width != pair.mask.width || pair.image.height != pair.mask.height)
    throw std::invalid_argument("augment: image and mask extents differ");

  struct Variant {
    const char* tag;
    GrayImage image;
    BinaryMask mask;
  };
  std::vector<Variant> variants;
  variants.push_back({"orig", pair.image, pair.mask});
  {
    GrayImage i90 = rot90(pair.image);
    BinaryMask m90 = rot90(pair.mask);
    GrayImage i180 = rot90(i90);
    BinaryMask m180 = rot90(m90);
    variants.push_back({"rot90", i90, m90});
    variants.push_back({"rot180", i180, m180});
    variants.push_back({"rot270", rot90(i180), rot90(m180)});
  }
  variants.push_back({"fliph", flip_h(pair.image), flip_h(pair.mask)});
  variants.push_back({"flipv", flip_v(pair.image), flip_v(pair.mask)});

  std::vector<AugmentedPair> out;
  out.reserve(recipe.variants_per_pair());
  for (const Variant& v : variants)
    for (double z : recipe.zooms)
      out.push_back({zoom_out(v.image, z), zoom_out(v.mask, z),
                     std::string(v.tag) + "+" + zoom_tag(z)});
  return out;
}

std::vector<AugmentedPair> augment_dataset(const std::vector<ImageMaskPair>& pairs,
                                           const AugmentationRecipe& recipe) {
  std::vector<AugmentedPair> out;
  out.reserve(pairs.size() * recipe.variants_per_pair());
  for (const ImageMaskPair& p : pairs) {
    std::vector<AugmentedPair> expanded = augment_pair(p, recipe);
    for (auto& e : expanded) out.push_back(std::move(e));
  }
  return out;
}

}  // namespace polygen
