#pragma once

#include <string>
#include <vector>

namespace polygen {

enum class UpsampleMode { kResizeConv, kTransposedConv };

std::string to_string(UpsampleMode mode);
UpsampleMode upsample_mode_from_string(const std::string& s);

// Declarative architecture description for the generator family and the
// paired discriminator.
struct GeneratorConfig {
  int extent = 64;      // input extent S, power of two
  int base_width = 16;  // channel width of the first encoder block
  int blocks = 3;       // encoder blocks B; bottleneck extent = S / 2^B
  std::vector<int> dilations = {1, 2, 4};
  UpsampleMode upsample = UpsampleMode::kResizeConv;
  int in_channels = 1;
  int out_channels = 1;
  int width_cap = 0;  // 0 -> 4 * base_width
  int disc_stages = 3;
  float dropout_rate = 0.5f;

  int cap() const { return width_cap > 0 ? width_cap : 4 * base_width; }
  int bottleneck_extent() const { return extent >> blocks; }
  // Encoder block widths double from base_width up to the cap.
  int encoder_width(int block) const;  // block in [1, blocks]
  int decoder_width(int block) const;  // mirrors the encoder
  int disc_patch_extent() const { return extent >> disc_stages; }

  void validate() const;  // throws std::invalid_argument naming the violated invariant
};

GeneratorConfig load_arch_config(const std::string& path);
void save_arch_config(const std::string& path, const GeneratorConfig& cfg);

}  // namespace polygen
