#pragma once

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "scotlab/pde/grid.hpp"

namespace scotlab {

// One solution trajectory: data laid out [time][channel][y][x], f64
// during generation.
struct Trajectory {
  std::vector<std::string> channels;
  std::vector<double> times;  // strictly increasing, starting at 0
  int64_t n = 0;              // grid points per side
  std::string pde;
  uint64_t seed = 0;
  std::vector<double> data;

  int64_t n_time() const { return int64_t(times.size()); }
  int64_t n_chan() const { return int64_t(channels.size()); }
  int64_t frame() const { return n * n; }

  double* field(int64_t t, int64_t c) { return data.data() + (t * n_chan() + c) * frame(); }
  const double* field(int64_t t, int64_t c) const {
    return data.data() + (t * n_chan() + c) * frame();
  }

  void allocate() { data.assign(size_t(n_time() * n_chan() * frame()), 0.0); }

  void validate() const {
    if (times.empty() || times.front() != 0.0) throw ValueError("trajectory times must start at 0");
    for (size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1]) throw ValueError("trajectory times must be strictly increasing");
    for (double v : data)
      if (!std::isfinite(v)) throw ValueError("trajectory contains non-finite values");
  }
};

// In-memory dataset: the container's meta plus the f32 payload.
struct TrajectoryDataset {
  std::string name;
  std::string pde;
  std::vector<std::string> channels;
  Grid grid;
  std::vector<double> times;
  int64_t n_trajectories = 0;
  std::vector<float> data;  // [traj][time][channel][y][x]

  int64_t n_time() const { return int64_t(times.size()); }
  int64_t n_chan() const { return int64_t(channels.size()); }
  int64_t frame() const { return grid.n * grid.n; }
  int64_t traj_stride() const { return n_time() * n_chan() * frame(); }

  const float* field(int64_t traj, int64_t t, int64_t c) const {
    return data.data() + traj * traj_stride() + (t * n_chan() + c) * frame();
  }
};

namespace detail {

inline std::string sha256_hex(const void* bytes, size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int dlen = 0;
  EVP_Digest(bytes, len, digest, &dlen, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < dlen; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace detail

// Writes the dataset container: meta.json plus raw little-endian f32
// payload in [traj][time][channel][y][x] order. Returns the payload hash.
inline std::string write_dataset(const std::vector<Trajectory>& trajectories,
                                 const std::filesystem::path& dir, const std::string& name,
                                 Boundary boundary, const nlohmann::json& provenance = {}) {
  namespace fs = std::filesystem;
  if (trajectories.empty()) throw ValueError("write_dataset: no trajectories");
  const Trajectory& first = trajectories.front();
  for (const auto& t : trajectories) {
    t.validate();
    if (t.channels != first.channels || t.times != first.times || t.n != first.n ||
        t.pde != first.pde)
      throw ValueError("write_dataset: trajectories disagree on channels/times/grid");
  }
  fs::create_directories(dir);

  std::vector<float> payload;
  payload.reserve(size_t(trajectories.size()) * first.data.size());
  for (const auto& t : trajectories)
    for (double v : t.data) payload.push_back(float(v));

  std::ofstream bin(dir / "data.bin", std::ios::binary);
  if (!bin) throw IoError("cannot write " + (dir / "data.bin").string());
  bin.write(reinterpret_cast<const char*>(payload.data()),
            std::streamsize(payload.size() * sizeof(float)));
  bin.close();

  const std::string hash = detail::sha256_hex(payload.data(), payload.size() * sizeof(float));
  nlohmann::json meta{{"format_version", 1},
                      {"name", name},
                      {"pde", first.pde},
                      {"channels", first.channels},
                      {"grid", {{"N", first.n}, {"boundary", boundary_name(boundary)}}},
                      {"times", first.times},
                      {"n_trajectories", trajectories.size()},
                      {"dtype", "f32"},
                      {"endianness", "little"},
                      {"layout", "[traj][time][channel][y][x]"},
                      {"content_hash", "sha256:" + hash}};
  if (!provenance.is_null() && !provenance.empty()) meta["provenance"] = provenance;
  std::ofstream mf(dir / "meta.json", std::ios::binary);
  if (!mf) throw IoError("cannot write " + (dir / "meta.json").string());
  mf << meta.dump(2) << "\n";
  return hash;
}

inline TrajectoryDataset read_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::ifstream mf(dir / "meta.json", std::ios::binary);
  if (!mf) throw IoError("cannot read " + (dir / "meta.json").string());
  nlohmann::json meta = nlohmann::json::parse(mf);
  if (meta.at("format_version").get<int>() != 1)
    throw IoError("unsupported dataset format_version " +
                  meta.at("format_version").dump());

  TrajectoryDataset ds;
  ds.name = meta.at("name").get<std::string>();
  ds.pde = meta.at("pde").get<std::string>();
  ds.channels = meta.at("channels").get<std::vector<std::string>>();
  ds.grid.n = meta.at("grid").at("N").get<int64_t>();
  ds.grid.boundary = boundary_from(meta.at("grid").at("boundary").get<std::string>());
  ds.times = meta.at("times").get<std::vector<double>>();
  ds.n_trajectories = meta.at("n_trajectories").get<int64_t>();

  const int64_t expected =
      4 * ds.n_trajectories * ds.n_time() * ds.n_chan() * ds.grid.n * ds.grid.n;
  const auto size = fs::file_size(dir / "data.bin");
  if (int64_t(size) != expected)
    throw IoError("data.bin size mismatch: expected " + std::to_string(expected) +
                  " bytes, found " + std::to_string(size));
  ds.data.resize(size_t(expected) / 4);
  std::ifstream bin(dir / "data.bin", std::ios::binary);
  if (!bin) throw IoError("cannot read " + (dir / "data.bin").string());
  bin.read(reinterpret_cast<char*>(ds.data.data()), std::streamsize(size));
  return ds;
}

}  // namespace scotlab
