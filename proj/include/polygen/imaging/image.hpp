#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polygen {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width*height

  std::uint8_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  static GrayImage filled(int w, int h, std::uint8_t v) {
    return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, v)};
  }
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // interleaved r,g,b
};

// Strictly binary image; 1 = on.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::int64_t area() const {
    std::int64_t a = 0;
    for (auto p : pixels) a += p;
    return a;
  }
  bool empty_mask() const { return area() == 0; }

  static BinaryMask filled(int w, int h, std::uint8_t v) {
    return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, v)};
  }
};

// Generator conditioning input: Canny edges with the polyp region filled in.
// Every on-pixel is either an edge pixel or a mask pixel.
struct ConditionedImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // values in {0, 1}

  std::uint8_t at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// --- file I/O (PNG and PGM; format chosen by extension) ---

// Reads an 8-bit image; RGB(A) inputs are reduced to luma.
GrayImage read_gray(const std::string& path);

// Reads a binary mask stored with 0/255 encoding (>=128 counts as on).
BinaryMask read_mask(const std::string& path);

void write_gray(const std::string& path, const GrayImage& img);
// Masks and conditioned images are written 0/255.
void write_mask(const std::string& path, const BinaryMask& mask);
void write_conditioned(const std::string& path, const ConditionedImage& img);

}  // namespace polygen
