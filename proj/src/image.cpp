#include "polygen/imaging/image.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "polygen/core/error.hpp"

namespace polygen {

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

GrayImage read_png_gray(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DataError("png: cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("png: out of memory");
  }
  std::vector<png_bytep> rows;
  GrayImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png: failed to decode " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png: unsupported channel count in " + path);
  }

  std::vector<std::uint8_t> raw(static_cast<std::size_t>(img.width) * img.height * channels);
  rows.resize(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = raw.data() + static_cast<std::size_t>(y) * img.width * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  if (channels == 1) {
    img.pixels = std::move(raw);
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const double v = 0.299 * raw[3 * i] + 0.587 * raw[3 * i + 1] + 0.114 * raw[3 * i + 2];
      img.pixels[i] = static_cast<std::uint8_t>(v + 0.5);
    }
  }
  return img;
}

void write_png_gray(const std::string& path, int width, int height,
                    const std::uint8_t* pixels) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("png: cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("png: out of memory");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png: failed to encode " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * width));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("pgm: cannot open " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5" && magic != "P2") throw DataError("pgm: bad magic in " + path);
  auto next_token = [&]() -> long {
    // Skips whitespace and '#' comments.
    while (true) {
      int c = f.peek();
      if (c == '#') {
        std::string line;
        std::getline(f, line);
      } else if (std::isspace(c)) {
        f.get();
      } else {
        break;
      }
    }
    long v;
    f >> v;
    return v;
  };
  const long w = next_token();
  const long h = next_token();
  const long maxval = next_token();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw DataError("pgm: unsupported header in " + path);
  GrayImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.resize(static_cast<std::size_t>(w) * h);
  if (magic == "P5") {
    f.get();  // single whitespace after maxval
    f.read(reinterpret_cast<char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
    if (f.gcount() != static_cast<std::streamsize>(img.pixels.size()))
      throw DataError("pgm: truncated data in " + path);
  } else {
    for (auto& p : img.pixels) {
      long v;
      f >> v;
      if (!f) throw DataError("pgm: truncated data in " + path);
      p = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void write_pgm(const std::string& path, int width, int height,
               const std::uint8_t* pixels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("pgm: cannot write " + path);
  f << "P5\n" << width << " " << height << "\n255\n";
  f.write(reinterpret_cast<const char*>(pixels),
          static_cast<std::streamsize>(static_cast<std::size_t>(width) * height));
  if (!f) throw DataError("pgm: write failed for " + path);
}

bool is_pgm(const std::string& path) {
  return has_suffix(path, ".pgm") || has_suffix(path, ".PGM");
}

}  // namespace

GrayImage read_gray(const std::string& path) {
  GrayImage img = is_pgm(path) ? read_pgm(path) : read_png_gray(path);
  if (img.width <= 0 || img.height <= 0)
    throw DataError("image: empty image " + path);
  return img;
}

BinaryMask read_mask(const std::string& path) {
  GrayImage img = read_gray(path);
  BinaryMask mask;
  mask.width = img.width;
  mask.height = img.height;
  mask.pixels.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    mask.pixels[i] = img.pixels[i] >= 128 ? 1 : 0;
  return mask;
}

void write_gray(const std::string& path, const GrayImage& img) {
  if (is_pgm(path))
    write_pgm(path, img.width, img.height, img.pixels.data());
  else
    write_png_gray(path, img.width, img.height, img.pixels.data());
}

void write_mask(const std::string& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> bytes(mask.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.pixels[i] ? 255 : 0;
  if (is_pgm(path))
    write_pgm(path, mask.width, mask.height, bytes.data());
  else
    write_png_gray(path, mask.width, mask.height, bytes.data());
}

void write_conditioned(const std::string& path, const ConditionedImage& img) {
  std::vector<std::uint8_t> bytes(img.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = img.pixels[i] ? 255 : 0;
  if (is_pgm(path))
    write_pgm(path, img.width, img.height, bytes.data());
  else
    write_png_gray(path, img.width, img.height, bytes.data());
}

}  // namespace polygen
