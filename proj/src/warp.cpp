#include "polygen/augment/warp.hpp"

#include <cmath>
#include <stdexcept>

namespace polygen {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Homography mapping the four points p -> q, h33 fixed to 1. Solved as the
// usual 8x8 linear system with partial pivoting.
Mat3 homography_from_points(const std::array<std::array<double, 2>, 4>& p,
                            const std::array<std::array<double, 2>, 4>& q) {
  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = p[i][0], y = p[i][1];
    const double qx = q[i][0], qy = q[i][1];
    double* r0 = a[2 * i];
    double* r1 = a[2 * i + 1];
    r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -qx * x; r0[7] = -qx * y; r0[8] = qx;
    r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -qy * x; r1[7] = -qy * y; r1[8] = qy;
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-9)
      throw std::invalid_argument("warp: degenerate perspective quad");
    if (pivot != col)
      for (int c = 0; c < 9; ++c) std::swap(a[pivot][c], a[col][c]);
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Mat3 h;
  for (int i = 0; i < 8; ++i) h.m[i] = a[i][8] / a[i][i];
  h.m[8] = 1.0;
  return h;
}

bool has_perspective(const TransformParams& p) {
  for (const auto& c : p.corner_shift)
    if (c[0] != 0.0 || c[1] != 0.0) return true;
  return false;
}

}  // namespace

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += m[3 * i + k] * o.m[3 * k + j];
      r.m[3 * i + j] = acc;
    }
  return r;
}

double Mat3::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 Mat3::inverse() const {
  const double d = det();
  if (std::fabs(d) < 1e-12)
    throw std::invalid_argument("warp: non-invertible transform");
  const double inv = 1.0 / d;
  Mat3 r;
  r.m[0] = (m[4] * m[8] - m[5] * m[7]) * inv;
  r.m[1] = (m[2] * m[7] - m[1] * m[8]) * inv;
  r.m[2] = (m[1] * m[5] - m[2] * m[4]) * inv;
  r.m[3] = (m[5] * m[6] - m[3] * m[8]) * inv;
  r.m[4] = (m[0] * m[8] - m[2] * m[6]) * inv;
  r.m[5] = (m[2] * m[3] - m[0] * m[5]) * inv;
  r.m[6] = (m[3] * m[7] - m[4] * m[6]) * inv;
  r.m[7] = (m[1] * m[6] - m[0] * m[7]) * inv;
  r.m[8] = (m[0] * m[4] - m[1] * m[3]) * inv;
  return r;
}

void Mat3::apply(double x, double y, double& ox, double& oy) const {
  const double u = m[0] * x + m[1] * y + m[2];
  const double v = m[3] * x + m[4] * y + m[5];
  const double w = m[6] * x + m[7] * y + m[8];
  if (std::fabs(w) < 1e-12)
    throw std::invalid_argument("warp: point maps to infinity");
  ox = u / w;
  oy = v / w;
}

Mat3 compose_transform(const TransformParams& p, int width, int height) {
  if (!(p.scale > 0.0))
    throw std::invalid_argument("warp: scale must be positive");
  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double rad = p.rotation_deg * kPi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);

  Mat3 to_origin;
  to_origin.m = {1, 0, -cx, 0, 1, -cy, 0, 0, 1};
  Mat3 rot_scale;
  rot_scale.m = {p.scale * c, -p.scale * s, 0, p.scale * s, p.scale * c, 0, 0, 0, 1};
  Mat3 back;
  back.m = {1, 0, cx + p.translate_x, 0, 1, cy + p.translate_y, 0, 0, 1};
  Mat3 affine = back * rot_scale * to_origin;

  if (!has_perspective(p)) return affine;

  const std::array<std::array<double, 2>, 4> corners = {
      {{0.0, 0.0},
       {static_cast<double>(width - 1), 0.0},
       {static_cast<double>(width - 1), static_cast<double>(height - 1)},
       {0.0, static_cast<double>(height - 1)}}};
  std::array<std::array<double, 2>, 4> moved = corners;
  for (int i = 0; i < 4; ++i) {
    moved[i][0] += p.corner_shift[i][0];
    moved[i][1] += p.corner_shift[i][1];
  }
  const Mat3 persp = homography_from_points(corners, moved);
  return persp * affine;
}

BinaryMask warp_mask(const BinaryMask& mask, const TransformParams& p) {
  const Mat3 inv = compose_transform(p, mask.width, mask.height).inverse();
  BinaryMask out = BinaryMask::filled(mask.width, mask.height, 0);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      double sx, sy;
      inv.apply(x, y, sx, sy);
      const int ix = static_cast<int>(std::lround(sx));
      const int iy = static_cast<int>(std::lround(sy));
      if (ix >= 0 && ix < mask.width && iy >= 0 && iy < mask.height)
        out.at(y, x) = mask.at(iy, ix);
    }
  return out;
}

GrayImage warp_image(const GrayImage& image, const TransformParams& p) {
  const Mat3 inv = compose_transform(p, image.width, image.height).inverse();
  GrayImage out = GrayImage::filled(image.width, image.height, 0);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      double sx, sy;
      inv.apply(x, y, sx, sy);
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      auto sample = [&](int yy, int xx) -> double {
        if (xx < 0 || xx >= image.width || yy < 0 || yy >= image.height) return 0.0;
        return image.at(yy, xx);
      };
      const double v = (1 - fy) * ((1 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
                       fy * ((1 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
      out.at(y, x) = static_cast<std::uint8_t>(std::clamp(v + 0.5, 0.0, 255.0));
    }
  return out;
}

}  // namespace polygen
