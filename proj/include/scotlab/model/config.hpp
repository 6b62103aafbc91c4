#pragma once

#include <nlohmann/json.hpp>

#include "scotlab/common.hpp"

namespace scotlab {

// Architecture hyperparameters of one scOT instance. Levels are indexed
// 0..L-1; level L-1 is the (convolution-free) bottleneck stage.
struct ScotConfig {
  int64_t grid_size = 64;               // J, points per side
  int64_t patch_size = 4;               // p
  int64_t window = 4;                   // M, window size in patches
  int64_t embed_dim = 32;               // C at level 0; doubles per level
  int64_t levels = 3;                   // L
  std::vector<int64_t> blocks{2, 2, 2}; // t_i, per level (encoder == decoder)
  std::vector<int64_t> heads{2, 4, 8};  // h_i, per level
  int64_t convnext_blocks = 2;          // n_c per skip connection
  int64_t in_channels = 4;
  int64_t out_channels = 4;
  int64_t mlp_ratio = 4;
  int64_t bias_mlp_width = 64;
  double ln_eps = 1e-5;
  double tau_min = 0.01;      // attention temperature clamp
  double norm_floor = 1e-8;   // cosine-similarity magnitude floor

  int64_t tokens_per_side() const { return grid_size / patch_size; }
  int64_t dim_at(int64_t level) const { return embed_dim << level; }
  int64_t side_at(int64_t level) const { return tokens_per_side() >> level; }

  void validate() const {
    if (levels < 1) throw ValueError("config: levels must be >= 1");
    if (grid_size % patch_size != 0)
      throw ValueError("config: grid_size " + std::to_string(grid_size) +
                       " not divisible by patch_size " + std::to_string(patch_size));
    const int64_t coarse = window << (levels - 1);
    if (tokens_per_side() % coarse != 0)
      throw ValueError("config: token grid " + std::to_string(tokens_per_side()) +
                       " does not tile into windows of " + std::to_string(window) +
                       " at the coarsest level");
    if (int64_t(blocks.size()) != levels || int64_t(heads.size()) != levels)
      throw ValueError("config: blocks/heads must list one entry per level");
    for (int64_t i = 0; i < levels; ++i) {
      if (blocks[size_t(i)] < 1) throw ValueError("config: blocks per level must be >= 1");
      if (dim_at(i) % heads[size_t(i)] != 0)
        throw ValueError("config: dim " + std::to_string(dim_at(i)) + " at level " +
                         std::to_string(i) + " not divisible by " +
                         std::to_string(heads[size_t(i)]) + " heads");
    }
    if (window % 2 != 0) throw ValueError("config: window must be even (M/2 shift)");
    if (in_channels < 1 || out_channels < 1) throw ValueError("config: channel counts must be >= 1");
  }

  // Desk-scale default used throughout the tests and tools.
  static ScotConfig micro() { return ScotConfig{}; }

  // Smallest config that exercises every mechanism, for gradient checks.
  static ScotConfig tiny() {
    ScotConfig c;
    c.grid_size = 16;
    c.patch_size = 4;
    c.window = 2;
    c.embed_dim = 8;
    c.levels = 2;
    c.blocks = {1, 1};
    c.heads = {2, 2};
    c.convnext_blocks = 1;
    c.bias_mlp_width = 8;
    return c;
  }
};

inline void to_json(nlohmann::json& j, const ScotConfig& c) {
  j = nlohmann::json{{"grid_size", c.grid_size},
                     {"patch_size", c.patch_size},
                     {"window", c.window},
                     {"embed_dim", c.embed_dim},
                     {"levels", c.levels},
                     {"blocks", c.blocks},
                     {"heads", c.heads},
                     {"convnext_blocks", c.convnext_blocks},
                     {"in_channels", c.in_channels},
                     {"out_channels", c.out_channels},
                     {"mlp_ratio", c.mlp_ratio},
                     {"bias_mlp_width", c.bias_mlp_width},
                     {"ln_eps", c.ln_eps},
                     {"tau_min", c.tau_min},
                     {"norm_floor", c.norm_floor}};
}

inline void from_json(const nlohmann::json& j, ScotConfig& c) {
  j.at("grid_size").get_to(c.grid_size);
  j.at("patch_size").get_to(c.patch_size);
  j.at("window").get_to(c.window);
  j.at("embed_dim").get_to(c.embed_dim);
  j.at("levels").get_to(c.levels);
  j.at("blocks").get_to(c.blocks);
  j.at("heads").get_to(c.heads);
  j.at("convnext_blocks").get_to(c.convnext_blocks);
  j.at("in_channels").get_to(c.in_channels);
  j.at("out_channels").get_to(c.out_channels);
  j.at("mlp_ratio").get_to(c.mlp_ratio);
  j.at("bias_mlp_width").get_to(c.bias_mlp_width);
  j.at("ln_eps").get_to(c.ln_eps);
  j.at("tau_min").get_to(c.tau_min);
  j.at("norm_floor").get_to(c.norm_floor);
}

}  // namespace scotlab
