#pragma once

#include <unordered_map>

#include "scotlab/model/config.hpp"
#include "scotlab/rng.hpp"
#include "scotlab/tape.hpp"

namespace scotlab {

// Finetuning parameter groups: the backbone, the embedding/recovery set
// (replaced when downstream channels differ), and the time-conditioned
// layer-norm gains/biases.
enum class ParamGroup { Backbone, EmbedRecover, TimeNorm };

inline const char* group_name(ParamGroup g) {
  switch (g) {
    case ParamGroup::Backbone: return "backbone";
    case ParamGroup::EmbedRecover: return "embed_recover";
    case ParamGroup::TimeNorm: return "time_norm";
  }
  return "?";
}

template <class T>
struct Param {
  std::string name;
  Tensor<T> value;
  ParamGroup group;
};

// The full named parameter set of one scOT instance, in stable manifest
// order. Weights draw from a truncated normal (std 0.02) keyed by
// (seed, name); biases start at zero, temperatures at 1, and the
// time-conditioned norms at identity (alpha(t) == 1, beta(t) == 0).
template <class T>
class ScotParams {
 public:
  ScotParams() = default;

  ScotParams(const ScotConfig& cfg, uint64_t seed) : cfg_(cfg) {
    cfg.validate();
    seed_ = seed;
    build();
  }

  const ScotConfig& config() const { return cfg_; }

  size_t size() const { return params_.size(); }
  Param<T>& param(size_t i) { return params_[i]; }
  const Param<T>& param(size_t i) const { return params_[i]; }

  bool has(const std::string& name) const { return index_.count(name) > 0; }

  Tensor<T>& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValueError("unknown parameter: " + name);
    return params_[it->second].value;
  }

  const Tensor<T>& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValueError("unknown parameter: " + name);
    return params_[it->second].value;
  }

  int64_t count_scalars() const {
    int64_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  void attach(Tape<T>& tape) {
    for (auto& p : params_) tape.watch(p.value);
  }

  void detach_all() {
    for (auto& p : params_) {
      p.value.tape = nullptr;
      p.value.node = -1;
    }
  }

  // Re-draws one named parameter from (seed, name); used by the
  // replaced-embedding finetuning path.
  void reinit(const std::string& name, uint64_t seed) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValueError("unknown parameter: " + name);
    init_tensor(params_[it->second]);
    CounterRng rng(seed, name);
    fill(params_[it->second], rng);
  }

 private:
  void build() {
    const auto& c = cfg_;
    const int64_t C = c.embed_dim;
    const int64_t p = c.patch_size;
    const int64_t npp = c.in_channels * p * p;

    add("embed.w", {C, c.in_channels, p, p}, ParamGroup::EmbedRecover);
    add("embed.b", {C}, ParamGroup::EmbedRecover);
    add_norm("embed.norm", C);

    for (int64_t i = 0; i < c.levels - 1; ++i) add_stage("enc" + std::to_string(i), i);
    add_stage("bot", c.levels - 1);

    for (int64_t i = 0; i < c.levels - 1; ++i) {
      const int64_t ci = c.dim_at(i);
      add("merge" + std::to_string(i) + ".w", {4 * ci, 2 * ci}, ParamGroup::Backbone);
      add_norm("merge" + std::to_string(i) + ".norm", 2 * ci);
    }

    for (int64_t i = 0; i < c.levels - 1; ++i) {
      const int64_t ci = c.dim_at(i);
      for (int64_t j = 0; j < c.convnext_blocks; ++j) {
        const std::string pre = "skip" + std::to_string(i) + ".cn" + std::to_string(j);
        add(pre + ".dw.w", {ci, 1, 7, 7}, ParamGroup::Backbone);
        add(pre + ".dw.b", {ci}, ParamGroup::Backbone);
        add_norm(pre + ".norm", ci);
        add(pre + ".pw1.w", {ci, 4 * ci}, ParamGroup::Backbone);
        add(pre + ".pw1.b", {4 * ci}, ParamGroup::Backbone);
        add(pre + ".pw2.w", {4 * ci, ci}, ParamGroup::Backbone);
        add(pre + ".pw2.b", {ci}, ParamGroup::Backbone);
        add(pre + ".gamma", {ci}, ParamGroup::Backbone);
      }
    }

    for (int64_t i = c.levels - 2; i >= 0; --i) {
      const int64_t ci = c.dim_at(i);
      add("expand" + std::to_string(i) + ".w1", {2 * ci, 4 * ci}, ParamGroup::Backbone);
      add_norm("expand" + std::to_string(i) + ".norm", ci);
      add("expand" + std::to_string(i) + ".w2", {ci, ci}, ParamGroup::Backbone);
      add_stage("dec" + std::to_string(i), i);
    }

    add("recover.w", {c.out_channels, C, p, p}, ParamGroup::EmbedRecover);
    add("recover.b", {c.out_channels}, ParamGroup::EmbedRecover);
    add("mixup.w", {c.out_channels, c.out_channels, 5, 5}, ParamGroup::EmbedRecover);

    (void)npp;
    for (auto& prm : params_) {
      CounterRng rng(seed_, prm.name);
      fill(prm, rng);
    }
  }

  void add_stage(const std::string& tag, int64_t level) {
    const auto& c = cfg_;
    const int64_t ci = c.dim_at(level);
    const int64_t h = c.heads[size_t(level)];
    const int64_t w = c.bias_mlp_width;
    for (int64_t b = 0; b < c.blocks[size_t(level)]; ++b) {
      const std::string pre = tag + ".blk" + std::to_string(b);
      add(pre + ".attn.wq", {ci, ci}, ParamGroup::Backbone);
      add(pre + ".attn.bq", {ci}, ParamGroup::Backbone);
      add(pre + ".attn.wk", {ci, ci}, ParamGroup::Backbone);
      add(pre + ".attn.wv", {ci, ci}, ParamGroup::Backbone);
      add(pre + ".attn.bv", {ci}, ParamGroup::Backbone);
      add(pre + ".attn.wo", {ci, ci}, ParamGroup::Backbone);
      add(pre + ".attn.bo", {ci}, ParamGroup::Backbone);
      add(pre + ".attn.tau", {h}, ParamGroup::Backbone);
      add(pre + ".attn.bias.w1", {2, w}, ParamGroup::Backbone);
      add(pre + ".attn.bias.b1", {w}, ParamGroup::Backbone);
      add(pre + ".attn.bias.w2", {w, h}, ParamGroup::Backbone);
      add_norm(pre + ".norm1", ci);
      add(pre + ".mlp.w1", {ci, c.mlp_ratio * ci}, ParamGroup::Backbone);
      add(pre + ".mlp.b1", {c.mlp_ratio * ci}, ParamGroup::Backbone);
      add(pre + ".mlp.w2", {c.mlp_ratio * ci, ci}, ParamGroup::Backbone);
      add(pre + ".mlp.b2", {ci}, ParamGroup::Backbone);
      add_norm(pre + ".norm2", ci);
    }
  }

  void add_norm(const std::string& pre, int64_t c) {
    add(pre + ".wa", {c}, ParamGroup::TimeNorm);
    add(pre + ".ba", {c}, ParamGroup::TimeNorm);
    add(pre + ".wb", {c}, ParamGroup::TimeNorm);
    add(pre + ".bb", {c}, ParamGroup::TimeNorm);
  }

  void add(std::string name, Shape shape, ParamGroup group) {
    index_[name] = params_.size();
    params_.push_back(Param<T>{std::move(name), Tensor<T>::zeros(std::move(shape)), group});
  }

  void init_tensor(Param<T>& p) { p.value = Tensor<T>::zeros(p.value.shape()); }

  static bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
  }

  void fill(Param<T>& p, CounterRng& rng) {
    const std::string& n = p.name;
    if (ends_with(n, ".tau") || ends_with(n, ".ba")) {
      for (int64_t i = 0; i < p.value.size(); ++i) p.value[i] = T(1);
      return;
    }
    if (ends_with(n, ".wa") || ends_with(n, ".wb") || ends_with(n, ".bb") ||
        ends_with(n, ".b") || ends_with(n, ".b1") || ends_with(n, ".b2") ||
        ends_with(n, ".bq") || ends_with(n, ".bv") || ends_with(n, ".bo")) {
      return;  // zeros
    }
    for (int64_t i = 0; i < p.value.size(); ++i) p.value[i] = T(rng.trunc_normal(0.02));
  }

  ScotConfig cfg_;
  uint64_t seed_ = 0;
  std::vector<Param<T>> params_;
  std::unordered_map<std::string, size_t> index_;
};

template <class T>
ScotParams<T> init_params(const ScotConfig& cfg, uint64_t seed) {
  return ScotParams<T>(cfg, seed);
}

// Exact parameter set re-drawn when a finetuning task changes channels.
inline const std::vector<std::string>& replaced_embedding_params() {
  static const std::vector<std::string> names{"embed.w", "embed.b", "recover.w", "recover.b",
                                              "mixup.w"};
  return names;
}

}  // namespace scotlab
