#pragma once

#include <utility>

#include "polygen/imaging/canny.hpp"
#include "polygen/imaging/image.hpp"

namespace polygen {

// Conditioned input: the polyp region rendered solid over the edge map. For
// binary inputs this equals the pixelwise union of edges and mask.
ConditionedImage combine(const BinaryMask& edges, const BinaryMask& polyp_mask);

struct TrainingImagePair {
  ConditionedImage conditioned;
  GrayImage target;
};

// (combine(canny(frame), mask), frame)
TrainingImagePair make_training_pair(const GrayImage& frame,
                                     const BinaryMask& polyp_mask,
                                     const CannyParams& params = {});

}  // namespace polygen
