#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "polygen/data/manifest.hpp"
#include "polygen/imaging/image.hpp"

namespace polygen {

struct PolypSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double axis_a = 0.0;  // ellipse semi-axis along the orientation axis, pixels
  double axis_b = 0.0;
  double orientation_rad = 0.0;
  double brightness_lift = 45.0;
  double specular_offset_x = 0.0;  // relative to the ellipse centre
  double specular_offset_y = 0.0;
  double specular_radius = 2.0;
};

// A procedurally rendered colonoscopy-like frame: smooth multi-octave value
// noise under a radial vignette, plus an optional brightened ellipse with a
// small specular highlight standing in for the polyp.
struct SceneSpec {
  int extent = 64;
  std::uint64_t seed = 0;
  int noise_octaves = 3;
  double noise_floor = 40.0;  // intensity range the noise maps onto
  double noise_ceil = 200.0;
  double vignette_strength = 0.35;
  std::optional<PolypSpec> polyp;
};

struct RenderedScene {
  GrayImage image;
  BinaryMask mask;  // empty for normal frames
};

// Deterministic under spec.seed. Rejects polyp ellipses that do not keep a
// 2-pixel margin from the canvas border.
RenderedScene render(const SceneSpec& spec);

SceneSpec sample_polyp_scene(int extent, std::uint64_t seed);
SceneSpec sample_normal_scene(int extent, std::uint64_t seed);

// Writes n_polyp paired frames+masks and n_normal normal frames under
// out_dir (frames/, masks/) along with a dataset manifest.
DatasetManifest make_dataset(int n_polyp, int n_normal, int extent,
                             std::uint64_t seed, const std::string& out_dir);

}  // namespace polygen
