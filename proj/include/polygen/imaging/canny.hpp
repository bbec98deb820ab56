#pragma once

#include "polygen/imaging/image.hpp"

namespace polygen {

struct CannyParams {
  double sigma = 1.4;
  // Hysteresis thresholds as fractions of the maximum gradient magnitude.
  double low_frac = 0.1;
  double high_frac = 0.3;
};

GrayImage to_grayscale(const RgbImage& rgb);

// Classic four-stage pipeline: Gaussian smoothing, Sobel gradients,
// non-maximum suppression along the quantized gradient direction, and
// double-threshold hysteresis with 8-connected weak-to-strong linking.
// `low` and `high` are absolute gradient-magnitude thresholds, low < high.
BinaryMask canny(const GrayImage& image, double sigma, double low, double high);

// Same pipeline with thresholds taken relative to the image's maximum
// gradient magnitude.
BinaryMask canny_rel(const GrayImage& image, const CannyParams& params = {});

}  // namespace polygen
