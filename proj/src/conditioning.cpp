#include "polygen/imaging/conditioning.hpp"

#include <stdexcept>

namespace polygen {

ConditionedImage combine(const BinaryMask& edges, const BinaryMask& polyp_mask) {
  if (edges.width != polyp_mask.width || edges.height != polyp_mask.height)
    throw std::invalid_argument(
        "combine: extent mismatch, edges " + std::to_string(edges.width) + "x" +
        std::to_string(edges.height) + " vs mask " + std::to_string(polyp_mask.width) +
        "x" + std::to_string(polyp_mask.height));
  ConditionedImage out;
  out.width = edges.width;
  out.height = edges.height;
  out.pixels.resize(edges.pixels.size());
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] = polyp_mask.pixels[i] ? 1 : edges.pixels[i];
  return out;
}

TrainingImagePair make_training_pair(const GrayImage& frame,
                                     const BinaryMask& polyp_mask,
                                     const CannyParams& params) {
  if (frame.width != polyp_mask.width || frame.height != polyp_mask.height)
    throw std::invalid_argument("make_training_pair: frame and mask extents differ");
  return {combine(canny_rel(frame, params), polyp_mask), frame};
}

}  // namespace polygen
