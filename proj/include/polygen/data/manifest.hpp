#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polygen {

// Frame-level dataset listing shared by synth-data, prepare, and synth-masks.
// Saved paths are relative to the manifest's directory; loaders rewrite them
// to absolute paths.
struct DatasetEntry {
  std::string id;
  std::string image;
  std::string mask;  // empty = normal frame (no polyp)
  std::string kind;  // "polyp" | "normal"
  std::string source_id;
  std::vector<std::string> transforms;
  std::uint64_t scene_seed = 0;
};

struct DatasetManifest {
  int extent = 0;
  std::uint64_t seed = 0;
  std::vector<DatasetEntry> entries;
};

void save_dataset_manifest(const std::string& path, const DatasetManifest& m);
DatasetManifest load_dataset_manifest(const std::string& path);

// Conditioned-input / target pairs produced by `prepare`.
struct PairEntry {
  std::string id;
  std::string conditioned;
  std::string target;
  std::string mask;
  std::string source_id;
  std::vector<std::string> transforms;
};

struct PairManifest {
  int extent = 0;
  std::vector<PairEntry> pairs;
};

void save_pair_manifest(const std::string& path, const PairManifest& m);
PairManifest load_pair_manifest(const std::string& path);

// Inference conditioned inputs produced by `synth-masks`.
struct CondInputEntry {
  std::string id;
  std::string conditioned;
  std::string normal;
  std::string mask;  // the synthetic mask the input was built from
  std::uint64_t seed = 0;
};

struct CondInputManifest {
  int extent = 0;
  std::vector<CondInputEntry> inputs;
};

void save_cond_input_manifest(const std::string& path, const CondInputManifest& m);
CondInputManifest load_cond_input_manifest(const std::string& path);

}  // namespace polygen
