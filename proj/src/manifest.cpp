#include "polygen/data/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "polygen/core/error.hpp"

namespace polygen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("manifest: cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw DataError("manifest: bad JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw DataError("manifest: cannot write " + path);
  f << j.dump(2) << "\n";
}

std::string resolve(const fs::path& base, const std::string& rel) {
  if (rel.empty()) return rel;
  return (base / rel).string();
}

}  // namespace

void save_dataset_manifest(const std::string& path, const DatasetManifest& m) {
  json j;
  j["extent"] = m.extent;
  j["seed"] = m.seed;
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"id", e.id},
                       {"image", e.image},
                       {"mask", e.mask},
                       {"kind", e.kind},
                       {"source_id", e.source_id},
                       {"transforms", e.transforms},
                       {"scene_seed", e.scene_seed}});
  }
  j["entries"] = std::move(entries);
  write_json(path, j);
}

DatasetManifest load_dataset_manifest(const std::string& path) {
  const json j = load_json(path);
  const fs::path base = fs::path(path).parent_path();
  DatasetManifest m;
  try {
    m.extent = j.at("extent").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("entries")) {
      DatasetEntry d;
      d.id = e.at("id").get<std::string>();
      d.image = resolve(base, e.at("image").get<std::string>());
      d.mask = resolve(base, e.at("mask").get<std::string>());
      d.kind = e.at("kind").get<std::string>();
      d.source_id = e.value("source_id", d.id);
      d.transforms = e.value("transforms", std::vector<std::string>{});
      d.scene_seed = e.value("scene_seed", std::uint64_t{0});
      m.entries.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw DataError("manifest: missing field in " + path + ": " + e.what());
  }
  return m;
}

void save_pair_manifest(const std::string& path, const PairManifest& m) {
  json j;
  j["extent"] = m.extent;
  json pairs = json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back({{"id", p.id},
                     {"conditioned", p.conditioned},
                     {"target", p.target},
                     {"mask", p.mask},
                     {"source_id", p.source_id},
                     {"transforms", p.transforms}});
  }
  j["pairs"] = std::move(pairs);
  write_json(path, j);
}

PairManifest load_pair_manifest(const std::string& path) {
  const json j = load_json(path);
  const fs::path base = fs::path(path).parent_path();
  PairManifest m;
  try {
    m.extent = j.at("extent").get<int>();
    for (const auto& e : j.at("pairs")) {
      PairEntry p;
      p.id = e.at("id").get<std::string>();
      p.conditioned = resolve(base, e.at("conditioned").get<std::string>());
      p.target = resolve(base, e.at("target").get<std::string>());
      p.mask = resolve(base, e.value("mask", std::string{}));
      p.source_id = e.value("source_id", p.id);
      p.transforms = e.value("transforms", std::vector<std::string>{});
      m.pairs.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw DataError("manifest: missing field in " + path + ": " + e.what());
  }
  return m;
}

void save_cond_input_manifest(const std::string& path, const CondInputManifest& m) {
  json j;
  j["extent"] = m.extent;
  json inputs = json::array();
  for (const auto& e : m.inputs) {
    inputs.push_back({{"id", e.id},
                      {"conditioned", e.conditioned},
                      {"normal", e.normal},
                      {"mask", e.mask},
                      {"seed", e.seed}});
  }
  j["inputs"] = std::move(inputs);
  write_json(path, j);
}

CondInputManifest load_cond_input_manifest(const std::string& path) {
  const json j = load_json(path);
  const fs::path base = fs::path(path).parent_path();
  CondInputManifest m;
  try {
    m.extent = j.at("extent").get<int>();
    for (const auto& e : j.at("inputs")) {
      CondInputEntry c;
      c.id = e.at("id").get<std::string>();
      c.conditioned = resolve(base, e.at("conditioned").get<std::string>());
      c.normal = resolve(base, e.at("normal").get<std::string>());
      c.mask = resolve(base, e.at("mask").get<std::string>());
      c.seed = e.value("seed", std::uint64_t{0});
      m.inputs.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw DataError("manifest: missing field in " + path + ": " + e.what());
  }
  return m;
}

}  // namespace polygen
