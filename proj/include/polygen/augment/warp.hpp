#pragma once

#include <array>
#include <cstdint>

#include "polygen/imaging/image.hpp"

namespace polygen {

// Randomized geometric transform: rotation/scale about the canvas centre,
// translation, and a perspective component given by the displacement of the
// four canvas corners (TL, TR, BR, BL order).
struct TransformParams {
  double rotation_deg = 0.0;
  double scale = 1.0;
  double translate_x = 0.0;
  double translate_y = 0.0;
  std::array<std::array<double, 2>, 4> corner_shift{};
  std::uint64_t seed = 0;
};

struct Mat3 {
  // row-major 3x3
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  Mat3 operator*(const Mat3& o) const;
  double det() const;
  Mat3 inverse() const;  // throws std::invalid_argument when singular
  void apply(double x, double y, double& ox, double& oy) const;
};

// All component transforms composed into one homography (source -> dest),
// so the warp resamples exactly once.
Mat3 compose_transform(const TransformParams& p, int width, int height);

// Inverse-mapped warp with nearest-neighbour sampling; stays strictly
// binary, out-of-canvas regions become 0.
BinaryMask warp_mask(const BinaryMask& mask, const TransformParams& p);

// Same geometry with bilinear sampling, for the image half of a pair.
GrayImage warp_image(const GrayImage& image, const TransformParams& p);

}  // namespace polygen
