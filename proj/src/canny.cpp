#include "polygen/imaging/canny.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace polygen {

namespace {

// reflect-101 border (mirror without repeating the edge sample), so flat
// regions touching the frame produce no spurious gradient.
int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

std::vector<float> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : k) v = static_cast<float>(v / sum);
  return k;
}

std::vector<float> blur(const std::vector<float>& in, int w, int h, double sigma) {
  const std::vector<float> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  std::vector<float> tmp(in.size()), out(in.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int t = -radius; t <= radius; ++t)
        acc += k[t + radius] * in[static_cast<std::size_t>(y) * w + reflect(x + t, w)];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int t = -radius; t <= radius; ++t)
        acc += k[t + radius] * tmp[static_cast<std::size_t>(reflect(y + t, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  return out;
}

}  // namespace

GrayImage to_grayscale(const RgbImage& rgb) {
  GrayImage out;
  out.width = rgb.width;
  out.height = rgb.height;
  out.pixels.resize(static_cast<std::size_t>(rgb.width) * rgb.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double v = 0.299 * rgb.pixels[3 * i] + 0.587 * rgb.pixels[3 * i + 1] +
                     0.114 * rgb.pixels[3 * i + 2];
    out.pixels[i] = static_cast<std::uint8_t>(v + 0.5);
  }
  return out;
}

BinaryMask canny(const GrayImage& image, double sigma, double low, double high) {
  if (!(sigma > 0.0)) throw std::invalid_argument("canny: sigma must be positive");
  if (!(low < high))
    throw std::invalid_argument("canny: low threshold must be below high");
  if (image.width < 3 || image.height < 3)
    throw std::invalid_argument("canny: image must be at least 3x3");

  const int w = image.width, h = image.height;
  std::vector<float> gray(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = image.pixels[i];
  const std::vector<float> smooth = blur(gray, w, h, sigma);

  std::vector<float> gx(gray.size()), gy(gray.size()), mag(gray.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto s = [&](int yy, int xx) {
        return smooth[static_cast<std::size_t>(reflect(yy, h)) * w + reflect(xx, w)];
      };
      const float dx = (s(y - 1, x + 1) - s(y - 1, x - 1)) +
                       2.0f * (s(y, x + 1) - s(y, x - 1)) +
                       (s(y + 1, x + 1) - s(y + 1, x - 1));
      const float dy = (s(y + 1, x - 1) - s(y - 1, x - 1)) +
                       2.0f * (s(y + 1, x) - s(y - 1, x)) +
                       (s(y + 1, x + 1) - s(y - 1, x + 1));
      gx[static_cast<std::size_t>(y) * w + x] = dx;
      gy[static_cast<std::size_t>(y) * w + x] = dy;
      mag[static_cast<std::size_t>(y) * w + x] = std::sqrt(dx * dx + dy * dy);
    }

  // Non-maximum suppression along the quantized gradient direction. The
  // asymmetric tie-break (strict on the negative side) keeps exactly one
  // pixel of a two-wide plateau.
  constexpr float kTan22 = 0.41421356237f;
  constexpr float kTan67 = 2.41421356237f;
  std::vector<float> thin(gray.size(), 0.0f);
  auto m = [&](int yy, int xx) -> float {
    if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0f;
    return mag[static_cast<std::size_t>(yy) * w + xx];
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (mag[i] == 0.0f) continue;
      const float ax = std::fabs(gx[i]);
      const float ay = std::fabs(gy[i]);
      float neg, pos;
      if (ay <= ax * kTan22) {  // horizontal gradient, vertical edge
        neg = m(y, x - 1);
        pos = m(y, x + 1);
      } else if (ay >= ax * kTan67) {  // vertical gradient
        neg = m(y - 1, x);
        pos = m(y + 1, x);
      } else if (gx[i] * gy[i] > 0.0f) {  // down-right diagonal
        neg = m(y - 1, x - 1);
        pos = m(y + 1, x + 1);
      } else {  // up-right diagonal
        neg = m(y + 1, x - 1);
        pos = m(y - 1, x + 1);
      }
      if (mag[i] > neg && mag[i] >= pos) thin[i] = mag[i];
    }

  // Double threshold + hysteresis from strong seeds through weak pixels.
  BinaryMask edges = BinaryMask::filled(w, h, 0);
  std::vector<std::uint8_t> weak(gray.size(), 0);
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < thin.size(); ++i) {
    if (thin[i] <= 0.0f) continue;
    if (thin[i] >= high) {
      edges.pixels[i] = 1;
      frontier.push_back(i);
    } else if (thin[i] >= low) {
      weak[i] = 1;
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const int y = static_cast<int>(i) / w;
    const int x = static_cast<int>(i) % w;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int ny = y + dy, nx = x + dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (weak[j] && !edges.pixels[j]) {
          edges.pixels[j] = 1;
          frontier.push_back(j);
        }
      }
  }
  return edges;
}

BinaryMask canny_rel(const GrayImage& image, const CannyParams& params) {
  if (!(params.low_frac < params.high_frac))
    throw std::invalid_argument("canny: low threshold must be below high");
  // One smoothing+gradient pass just to scale the thresholds; cheap at the
  // image sizes involved.
  const int w = image.width, h = image.height;
  std::vector<float> gray(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = image.pixels[i];
  const std::vector<float> smooth = blur(gray, w, h, params.sigma);
  double max_mag = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto s = [&](int yy, int xx) {
        return smooth[static_cast<std::size_t>(reflect(yy, h)) * w + reflect(xx, w)];
      };
      const float dx = (s(y - 1, x + 1) - s(y - 1, x - 1)) +
                       2.0f * (s(y, x + 1) - s(y, x - 1)) +
                       (s(y + 1, x + 1) - s(y + 1, x - 1));
      const float dy = (s(y + 1, x - 1) - s(y - 1, x - 1)) +
                       2.0f * (s(y + 1, x) - s(y - 1, x)) +
                       (s(y + 1, x + 1) - s(y - 1, x + 1));
      max_mag = std::max(max_mag, static_cast<double>(std::sqrt(dx * dx + dy * dy)));
    }
  if (max_mag == 0.0) return BinaryMask::filled(w, h, 0);
  return canny(image, params.sigma, params.low_frac * max_mag, params.high_frac * max_mag);
}

}  // namespace polygen
