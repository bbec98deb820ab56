#include "polygen/models/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "polygen/core/error.hpp"

namespace polygen {

using nlohmann::json;

std::string to_string(UpsampleMode mode) {
  return mode == UpsampleMode::kResizeConv ? "resize_conv" : "transposed_conv";
}

UpsampleMode upsample_mode_from_string(const std::string& s) {
  if (s == "resize_conv") return UpsampleMode::kResizeConv;
  if (s == "transposed_conv") return UpsampleMode::kTransposedConv;
  throw std::invalid_argument("arch: unknown upsample mode '" + s + "'");
}

int GeneratorConfig::encoder_width(int block) const {
  return std::min(base_width << (block - 1), cap());
}

int GeneratorConfig::decoder_width(int block) const {
  // Decoder block j upsamples to extent S / 2^(blocks-j) and mirrors the
  // encoder width at that extent.
  const int mirrored = blocks - block + 1;
  return mirrored >= 1 ? encoder_width(mirrored) : base_width;
}

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("arch: " + msg); };
  if (extent < 8 || (extent & (extent - 1)) != 0)
    fail("extent must be a power of two >= 8, got " + std::to_string(extent));
  if (blocks < 3) fail("need at least 3 encoder blocks for the multi-scale heads");
  if (extent % (1 << blocks) != 0)
    fail("extent " + std::to_string(extent) + " not divisible by 2^" +
         std::to_string(blocks));
  if (bottleneck_extent() < 4)
    fail("bottleneck extent " + std::to_string(bottleneck_extent()) +
         " must be >= 4");
  if (dilations.empty()) fail("dilation set must be non-empty");
  for (int d : dilations)
    if (d < 1) fail("dilation rates must be positive");
  if (base_width < 1) fail("base width must be positive");
  if (in_channels != 1 && in_channels != 3) fail("in_channels must be 1 or 3");
  if (out_channels != 1 && out_channels != 3) fail("out_channels must be 1 or 3");
  if (disc_stages < 1 || disc_patch_extent() < 4)
    fail("discriminator must keep a patch grid of at least 4x4");
  if (dropout_rate < 0.0f || dropout_rate >= 1.0f) fail("dropout rate must be in [0, 1)");
}

GeneratorConfig load_arch_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("arch: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw DataError("arch: bad JSON in " + path + ": " + e.what());
  }
  GeneratorConfig cfg;
  try {
    cfg.extent = j.value("extent", cfg.extent);
    cfg.base_width = j.value("base_width", cfg.base_width);
    cfg.blocks = j.value("blocks", cfg.blocks);
    if (j.contains("dilations")) cfg.dilations = j["dilations"].get<std::vector<int>>();
    if (j.contains("upsample"))
      cfg.upsample = upsample_mode_from_string(j["upsample"].get<std::string>());
    cfg.in_channels = j.value("in_channels", cfg.in_channels);
    cfg.out_channels = j.value("out_channels", cfg.out_channels);
    cfg.width_cap = j.value("width_cap", cfg.width_cap);
    cfg.disc_stages = j.value("disc_stages", cfg.disc_stages);
    cfg.dropout_rate = j.value("dropout_rate", cfg.dropout_rate);
  } catch (const json::exception& e) {
    throw DataError("arch: bad field in " + path + ": " + e.what());
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(e.what()) + " (from " + path + ")");
  }
  return cfg;
}

void save_arch_config(const std::string& path, const GeneratorConfig& cfg) {
  json j;
  j["extent"] = cfg.extent;
  j["base_width"] = cfg.base_width;
  j["blocks"] = cfg.blocks;
  j["dilations"] = cfg.dilations;
  j["upsample"] = to_string(cfg.upsample);
  j["in_channels"] = cfg.in_channels;
  j["out_channels"] = cfg.out_channels;
  j["width_cap"] = cfg.width_cap;
  j["disc_stages"] = cfg.disc_stages;
  j["dropout_rate"] = cfg.dropout_rate;
  std::ofstream f(path);
  if (!f) throw DataError("arch: cannot write " + path);
  f << j.dump(2) << "\n";
}

}  // namespace polygen
