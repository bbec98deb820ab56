#include "polygen/tensor/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "polygen/core/error.hpp"

namespace polygen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_le_f32(std::vector<unsigned char>& out, const std::vector<float>& v) {
  for (float f : v) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    out.push_back(static_cast<unsigned char>(bits & 0xffu));
    out.push_back(static_cast<unsigned char>((bits >> 8) & 0xffu));
    out.push_back(static_cast<unsigned char>((bits >> 16) & 0xffu));
    out.push_back(static_cast<unsigned char>((bits >> 24) & 0xffu));
  }
}

float read_le_f32(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

void save_checkpoint(const std::string& manifest_path,
                     const std::vector<NamedTensor>& tensors) {
  const fs::path mpath(manifest_path);
  const std::string blob_name = mpath.stem().string() + ".bin";
  const fs::path bpath = mpath.parent_path() / blob_name;

  json manifest;
  manifest["format_version"] = 1;
  manifest["blob"] = blob_name;
  json list = json::array();
  std::vector<unsigned char> blob;
  for (const auto& nt : tensors) {
    const Shape& s = nt.tensor.shape();
    json entry;
    entry["name"] = nt.name;
    entry["shape"] = {s.n, s.c, s.h, s.w};
    entry["offset_bytes"] = blob.size();
    list.push_back(std::move(entry));
    append_le_f32(blob, nt.tensor.values());
  }
  manifest["tensors"] = std::move(list);

  std::ofstream bf(bpath, std::ios::binary);
  if (!bf) throw DataError("checkpoint: cannot write " + bpath.string());
  bf.write(reinterpret_cast<const char*>(blob.data()),
           static_cast<std::streamsize>(blob.size()));
  bf.close();
  if (!bf) throw DataError("checkpoint: write failed for " + bpath.string());

  std::ofstream mf(mpath);
  if (!mf) throw DataError("checkpoint: cannot write " + mpath.string());
  mf << manifest.dump(2) << "\n";
}

std::vector<NamedTensor> load_checkpoint(const std::string& manifest_path) {
  std::ifstream mf(manifest_path);
  if (!mf) throw DataError("checkpoint: cannot open " + manifest_path);
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw DataError("checkpoint: bad manifest " + manifest_path + ": " + e.what());
  }
  if (!manifest.contains("format_version") || manifest["format_version"] != 1)
    throw DataError("checkpoint: unsupported format_version in " + manifest_path);

  const fs::path bpath =
      fs::path(manifest_path).parent_path() / manifest.at("blob").get<std::string>();
  std::ifstream bf(bpath, std::ios::binary);
  if (!bf) throw DataError("checkpoint: cannot open blob " + bpath.string());
  std::vector<unsigned char> blob((std::istreambuf_iterator<char>(bf)),
                                  std::istreambuf_iterator<char>());

  std::vector<NamedTensor> out;
  for (const auto& entry : manifest.at("tensors")) {
    const auto shape_arr = entry.at("shape");
    if (shape_arr.size() != 4)
      throw DataError("checkpoint: tensor shape must have 4 extents");
    Shape s{shape_arr[0].get<int>(), shape_arr[1].get<int>(),
            shape_arr[2].get<int>(), shape_arr[3].get<int>()};
    const std::size_t offset = entry.at("offset_bytes").get<std::size_t>();
    const std::size_t nbytes = static_cast<std::size_t>(s.numel()) * 4;
    if (offset + nbytes > blob.size())
      throw DataError("checkpoint: blob too small for tensor " +
                      entry.at("name").get<std::string>());
    std::vector<float> data(static_cast<std::size_t>(s.numel()));
    for (std::size_t i = 0; i < data.size(); ++i)
      data[i] = read_le_f32(blob.data() + offset + i * 4);
    out.push_back({entry.at("name").get<std::string>(),
                   Tensor::from_data(s, std::move(data))});
  }
  return out;
}

void restore_into(const std::string& manifest_path, std::vector<NamedTensor>& params) {
  auto loaded = load_checkpoint(manifest_path);
  for (auto& p : params) {
    bool found = false;
    for (const auto& l : loaded) {
      if (l.name != p.name) continue;
      if (!(l.tensor.shape() == p.tensor.shape()))
        throw DataError("checkpoint: shape mismatch for " + p.name + ", file " +
                        l.tensor.shape().str() + " vs model " +
                        p.tensor.shape().str());
      p.tensor.values() = l.tensor.values();
      found = true;
      break;
    }
    if (!found) throw DataError("checkpoint: missing tensor " + p.name);
  }
}

}  // namespace polygen
