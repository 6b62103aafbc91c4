#pragma once

#include <filesystem>
#include <fstream>

#include "scotlab/model/params.hpp"

namespace scotlab {

namespace detail {

template <class T>
constexpr const char* dtype_name() {
  if constexpr (std::is_same_v<T, float>) return "f32";
  else return "f64";
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace detail

// Checkpoint layout: <dir>/model.json holds the config and an ordered
// manifest of {name, shape, dtype, byte_offset}; <dir>/weights.bin holds
// the raw little-endian scalars concatenated in manifest order.
template <class T>
void save_checkpoint(const ScotParams<T>& params, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest = nlohmann::json::array();
  int64_t offset = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.param(i);
    manifest.push_back({{"name", p.name},
                        {"shape", p.value.shape()},
                        {"dtype", detail::dtype_name<T>()},
                        {"byte_offset", offset},
                        {"group", group_name(p.group)}});
    offset += p.value.size() * int64_t(sizeof(T));
  }
  nlohmann::json doc{{"format_version", 1}, {"config", params.config()}, {"manifest", manifest}};
  detail::write_file(dir / "model.json", doc.dump(2) + "\n");

  std::ofstream bin(dir / "weights.bin", std::ios::binary);
  if (!bin) throw IoError("cannot write " + (dir / "weights.bin").string());
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.param(i).value;
    bin.write(reinterpret_cast<const char*>(v.data()),
              std::streamsize(size_t(v.size()) * sizeof(T)));
  }
}

template <class T>
ScotParams<T> load_checkpoint(const std::filesystem::path& dir) {
  const nlohmann::json doc = nlohmann::json::parse(detail::read_file(dir / "model.json"));
  if (doc.at("format_version").get<int>() != 1)
    throw IoError("unsupported checkpoint format_version");
  ScotConfig cfg = doc.at("config").get<ScotConfig>();
  ScotParams<T> params(cfg, /*seed=*/0);

  const std::string payload = detail::read_file(dir / "weights.bin");
  const auto& manifest = doc.at("manifest");
  if (manifest.size() != params.size())
    throw IoError("checkpoint manifest has " + std::to_string(manifest.size()) +
                  " entries, model expects " + std::to_string(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params.param(i);
    const auto& entry = manifest[i];
    const std::string name = entry.at("name").get<std::string>();
    if (name != p.name)
      throw IoError("checkpoint manifest order mismatch: expected " + p.name + ", found " + name);
    const Shape shape = entry.at("shape").get<Shape>();
    if (shape != p.value.shape())
      throw IoError("checkpoint shape mismatch for " + p.name + ": file has " + shape_str(shape) +
                    ", model expects " + shape_str(p.value.shape()));
    const std::string dtype = entry.at("dtype").get<std::string>();
    const int64_t offset = entry.at("byte_offset").get<int64_t>();
    const size_t scalar_size = dtype == "f32" ? 4 : 8;
    const size_t bytes = size_t(p.value.size()) * scalar_size;
    if (size_t(offset) + bytes > payload.size())
      throw IoError("weights.bin truncated at parameter " + p.name);
    const char* src = payload.data() + offset;
    if (dtype == detail::dtype_name<T>()) {
      std::memcpy(p.value.data(), src, bytes);
    } else if (dtype == "f32") {
      const float* f = reinterpret_cast<const float*>(src);
      for (int64_t j = 0; j < p.value.size(); ++j) p.value[j] = T(f[j]);
    } else {
      const double* d = reinterpret_cast<const double*>(src);
      for (int64_t j = 0; j < p.value.size(); ++j) p.value[j] = T(d[j]);
    }
  }
  return params;
}

}  // namespace scotlab
