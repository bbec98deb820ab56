#pragma once

#include <string>
#include <vector>

#include "polygen/augment/warp.hpp"
#include "polygen/core/rng.hpp"
#include "polygen/imaging/image.hpp"

namespace polygen {

// Sampling ranges for the randomized mask transforms. Translation and corner
// jitter are fractions of the canvas extent.
struct ParamRanges {
  double rotation_min_deg = -180.0;
  double rotation_max_deg = 180.0;
  double scale_min = 0.7;
  double scale_max = 1.3;
  double translate_frac = 0.25;
  double corner_frac = 0.10;
};

TransformParams sample_params(Rng& rng, const ParamRanges& ranges, int width,
                              int height);

// A synthetic mask is usable when it keeps at least `min_area_fraction` of
// the canvas and its bounding box stays `margin` pixels away from every
// border.
bool validate_mask(const BinaryMask& mask, double min_area_fraction = 0.005,
                   int margin = 2);

// Picks a pool mask uniformly and warps it with freshly sampled parameters
// until validate_mask accepts, up to `max_attempts` tries.
BinaryMask synth_mask(const std::vector<BinaryMask>& pool, Rng& rng,
                      const ParamRanges& ranges = {}, int max_attempts = 20);

// Deterministic dataset expansion: identity, three rotations and two flips,
// each at every zoom-out factor (content scaled down onto a zero-padded
// canvas). Masks ride along with nearest-neighbour sampling, images with
// bilinear.
struct AugmentationRecipe {
  std::vector<double> zooms = {1.0, 0.9, 0.8};

  std::size_t variants_per_pair() const { return 6 * zooms.size(); }
};

struct ImageMaskPair {
  GrayImage image;
  BinaryMask mask;
};

struct AugmentedPair {
  GrayImage image;
  BinaryMask mask;
  std::string transform_tag;
};

std::vector<AugmentedPair> augment_pair(const ImageMaskPair& pair,
                                        const AugmentationRecipe& recipe);
std::vector<AugmentedPair> augment_dataset(const std::vector<ImageMaskPair>& pairs,
                                           const AugmentationRecipe& recipe);

// Exact index-permutation transforms shared by the recipe and its tests.
GrayImage rot90(const GrayImage& img);   // counter-clockwise quarter turn
BinaryMask rot90(const BinaryMask& mask);
GrayImage flip_h(const GrayImage& img);
BinaryMask flip_h(const BinaryMask& mask);
GrayImage flip_v(const GrayImage& img);
BinaryMask flip_v(const BinaryMask& mask);
GrayImage zoom_out(const GrayImage& img, double factor);
BinaryMask zoom_out(const BinaryMask& mask, double factor);

}  // namespace polygen
