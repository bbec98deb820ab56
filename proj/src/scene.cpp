#include "polygen/synthdata/scene.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "polygen/core/error.hpp"
#include "polygen/core/rng.hpp"

namespace polygen {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kPolypMargin = 2;

// Smooth value noise: random lattice values interpolated bilinearly, octaves
// summed with halving amplitude.
std::vector<double> value_noise(int extent, int octaves, Rng& rng) {
  std::vector<double> field(static_cast<std::size_t>(extent) * extent, 0.0);
  double amplitude = 1.0;
  double total_amp = 0.0;
  for (int o = 0; o < octaves; ++o) {
    const int cells = 4 << o;
    std::vector<double> lattice(static_cast<std::size_t>(cells + 1) * (cells + 1));
    for (auto& v : lattice) v = rng.uniform();
    for (int y = 0; y < extent; ++y) {
      const double fy = static_cast<double>(y) / extent * cells;
      const int y0 = static_cast<int>(fy);
      const double ty = fy - y0;
      for (int x = 0; x < extent; ++x) {
        const double fx = static_cast<double>(x) / extent * cells;
        const int x0 = static_cast<int>(fx);
        const double tx = fx - x0;
        const double v00 = lattice[static_cast<std::size_t>(y0) * (cells + 1) + x0];
        const double v01 = lattice[static_cast<std::size_t>(y0) * (cells + 1) + x0 + 1];
        const double v10 = lattice[static_cast<std::size_t>(y0 + 1) * (cells + 1) + x0];
        const double v11 = lattice[static_cast<std::size_t>(y0 + 1) * (cells + 1) + x0 + 1];
        const double v = (1 - ty) * ((1 - tx) * v00 + tx * v01) +
                         ty * ((1 - tx) * v10 + tx * v11);
        field[static_cast<std::size_t>(y) * extent + x] += amplitude * v;
      }
    }
    total_amp += amplitude;
    amplitude *= 0.5;
  }
  for (auto& v : field) v /= total_amp;
  return field;
}

struct EllipseGeometry {
  double hx, hy;  // axis-aligned half extents of the rotated ellipse
};

EllipseGeometry ellipse_half_extents(const PolypSpec& p) {
  const double c = std::cos(p.orientation_rad), s = std::sin(p.orientation_rad);
  return {std::sqrt(p.axis_a * p.axis_a * c * c + p.axis_b * p.axis_b * s * s),
          std::sqrt(p.axis_a * p.axis_a * s * s + p.axis_b * p.axis_b * c * c)};
}

}  // namespace

RenderedScene render(const SceneSpec& spec) {
  if (spec.extent < 8) throw std::invalid_argument("render: extent too small");
  if (spec.polyp) {
    const auto he = ellipse_half_extents(*spec.polyp);
    const PolypSpec& p = *spec.polyp;
    if (p.center_x - he.hx < kPolypMargin || p.center_y - he.hy < kPolypMargin ||
        p.center_x + he.hx > spec.extent - 1 - kPolypMargin ||
        p.center_y + he.hy > spec.extent - 1 - kPolypMargin)
      throw std::invalid_argument(
          "render: polyp ellipse must keep a 2-pixel margin from the border");
  }

  Rng rng(spec.seed);
  const int e = spec.extent;
  std::vector<double> field = value_noise(e, spec.noise_octaves, rng);

  const double cx = (e - 1) / 2.0, cy = (e - 1) / 2.0;
  const double rmax2 = cx * cx + cy * cy;
  std::vector<double> intensity(field.size());
  for (int y = 0; y < e; ++y)
    for (int x = 0; x < e; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * e + x;
      double v = spec.noise_floor + (spec.noise_ceil - spec.noise_floor) * field[i];
      const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / rmax2;
      v *= 1.0 - spec.vignette_strength * r2;
      intensity[i] = v;
    }

  BinaryMask mask = BinaryMask::filled(e, e, 0);
  if (spec.polyp) {
    const PolypSpec& p = *spec.polyp;
    const double c = std::cos(p.orientation_rad), s = std::sin(p.orientation_rad);
    for (int y = 0; y < e; ++y)
      for (int x = 0; x < e; ++x) {
        const double dx = x - p.center_x, dy = y - p.center_y;
        const double xr = dx * c + dy * s;
        const double yr = -dx * s + dy * c;
        const double q = (xr / p.axis_a) * (xr / p.axis_a) +
                         (yr / p.axis_b) * (yr / p.axis_b);
        if (q <= 1.0) {
          mask.at(y, x) = 1;
          // Brighter toward the ellipse centre, echoing a protruding polyp.
          intensity[static_cast<std::size_t>(y) * e + x] +=
              p.brightness_lift * (1.0 - 0.45 * q);
        }
      }
    const double sx = p.center_x + p.specular_offset_x;
    const double sy = p.center_y + p.specular_offset_y;
    for (int y = 0; y < e; ++y)
      for (int x = 0; x < e; ++x) {
        const double d2 = (x - sx) * (x - sx) + (y - sy) * (y - sy);
        if (d2 <= p.specular_radius * p.specular_radius)
          intensity[static_cast<std::size_t>(y) * e + x] += 90.0;
      }
  }

  GrayImage img = GrayImage::filled(e, e, 0);
  for (std::size_t i = 0; i < intensity.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(intensity[i] + 0.5, 0.0, 255.0));
  return {std::move(img), std::move(mask)};
}

SceneSpec sample_polyp_scene(int extent, std::uint64_t seed) {
  SceneSpec spec;
  spec.extent = extent;
  spec.seed = seed;
  Rng rng(mix64(seed));
  spec.vignette_strength = rng.uniform(0.25, 0.45);

  PolypSpec p;
  p.axis_a = rng.uniform(extent / 10.0, extent / 5.0);
  p.axis_b = rng.uniform(extent / 10.0, extent / 5.0);
  p.orientation_rad = rng.uniform(0.0, kPi);
  const auto he = ellipse_half_extents(p);
  const double margin = kPolypMargin + 1.0;
  p.center_x = rng.uniform(margin + he.hx, extent - 1 - margin - he.hx);
  p.center_y = rng.uniform(margin + he.hy, extent - 1 - margin - he.hy);
  p.brightness_lift = rng.uniform(35.0, 60.0);
  p.specular_offset_x = rng.uniform(-0.35, 0.35) * p.axis_a;
  p.specular_offset_y = rng.uniform(-0.35, 0.35) * p.axis_b;
  p.specular_radius = rng.uniform(1.0, std::max(1.5, p.axis_a / 4.0));
  spec.polyp = p;
  return spec;
}

SceneSpec sample_normal_scene(int extent, std::uint64_t seed) {
  SceneSpec spec;
  spec.extent = extent;
  spec.seed = seed;
  Rng rng(mix64(seed));
  spec.vignette_strength = rng.uniform(0.25, 0.45);
  return spec;
}

DatasetManifest make_dataset(int n_polyp, int n_normal, int extent,
                             std::uint64_t seed, const std::string& out_dir) {
  if (extent < 32) throw std::invalid_argument("make_dataset: extent must be >= 32");
  if (n_polyp < 0 || n_normal < 0)
    throw std::invalid_argument("make_dataset: negative frame count");

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "frames", ec);
  fs::create_directories(fs::path(out_dir) / "masks", ec);
  if (ec) throw DataError("make_dataset: cannot create " + out_dir + ": " + ec.message());

  DatasetManifest manifest;
  manifest.extent = extent;
  manifest.seed = seed;

  char name[32];
  for (int i = 0; i < n_polyp; ++i) {
    std::snprintf(name, sizeof(name), "p%04d", i);
    const std::uint64_t scene_seed = derive_seed(seed, "synth-data/polyp", i);
    RenderedScene scene = render(sample_polyp_scene(extent, scene_seed));
    DatasetEntry e;
    e.id = name;
    e.image = std::string("frames/") + name + ".png";
    e.mask = std::string("masks/") + name + ".png";
    e.kind = "polyp";
    e.source_id = name;
    e.scene_seed = scene_seed;
    write_gray((fs::path(out_dir) / e.image).string(), scene.image);
    write_mask((fs::path(out_dir) / e.mask).string(), scene.mask);
    manifest.entries.push_back(std::move(e));
  }
  for (int i = 0; i < n_normal; ++i) {
    std::snprintf(name, sizeof(name), "n%04d", i);
    const std::uint64_t scene_seed = derive_seed(seed, "synth-data/normal", i);
    RenderedScene scene = render(sample_normal_scene(extent, scene_seed));
    DatasetEntry e;
    e.id = name;
    e.image = std::string("frames/") + name + ".png";
    e.kind = "normal";
    e.source_id = name;
    e.scene_seed = scene_seed;
    write_gray((fs::path(out_dir) / e.image).string(), scene.image);
    manifest.entries.push_back(std::move(e));
  }
  save_dataset_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
  // Re-load so callers get absolute paths, same as any other consumer.
  return load_dataset_manifest((fs::path(out_dir) / "manifest.json").string());
}

}  // namespace polygen
