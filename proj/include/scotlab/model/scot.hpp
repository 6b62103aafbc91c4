#pragma once

#include <map>
#include <mutex>

#include "scotlab/model/params.hpp"
#include "scotlab/ops.hpp"

namespace scotlab {

namespace detail {

// Relative-position geometry of one M x M window: for every (query, key)
// pair the index into the table of (2M-1)^2 distinct offsets, plus the
// sign(d)*log(1+|d|) input features per offset. Built once per window size.
struct WindowGeometry {
  std::vector<int64_t> pair_index;      // M^2 * M^2
  std::vector<double> offset_features;  // (2M-1)^2 * 2, [fx, fy]
  int64_t n_offsets = 0;
};

inline const WindowGeometry& window_geometry(int64_t m) {
  static std::map<int64_t, WindowGeometry> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  WindowGeometry g;
  const int64_t span = 2 * m - 1;
  g.n_offsets = span * span;
  g.offset_features.resize(size_t(g.n_offsets) * 2);
  for (int64_t dy = -(m - 1); dy <= m - 1; ++dy)
    for (int64_t dx = -(m - 1); dx <= m - 1; ++dx) {
      const int64_t idx = (dy + m - 1) * span + (dx + m - 1);
      auto feat = [](int64_t d) {
        const double s = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
        return s * std::log1p(double(std::abs(d)));
      };
      g.offset_features[size_t(idx) * 2 + 0] = feat(dx);
      g.offset_features[size_t(idx) * 2 + 1] = feat(dy);
    }
  g.pair_index.resize(size_t(m * m * m * m));
  for (int64_t qy = 0; qy < m; ++qy)
    for (int64_t qx = 0; qx < m; ++qx)
      for (int64_t ky = 0; ky < m; ++ky)
        for (int64_t kx = 0; kx < m; ++kx) {
          const int64_t q = qy * m + qx, k = ky * m + kx;
          const int64_t dy = qy - ky, dx = qx - kx;
          g.pair_index[size_t(q * m * m + k)] = (dy + m - 1) * span + (dx + m - 1);
        }
  auto [ins, ok] = cache.emplace(m, std::move(g));
  (void)ok;
  return ins->second;
}

}  // namespace detail

// sign(d)*log(1+|d|) features of a patch offset, as fed to the bias MLP.
inline std::pair<double, double> rel_pos_features(int64_t dx, int64_t dy) {
  auto feat = [](int64_t d) {
    const double s = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
    return s * std::log1p(double(std::abs(d)));
  };
  return {feat(dx), feat(dy)};
}

// The scOT operator: maps (lead time t, input fields a) to output fields.
// Parameters are shared read-only across forward calls; every call owns
// its private activations. Gradient tracking happens automatically when
// the parameters are attached to a tape.
template <class T>
class Scot {
 public:
  explicit Scot(ScotParams<T> params) : p_(std::move(params)), cfg_(p_.config()) {}

  Scot(const ScotConfig& cfg, uint64_t seed) : p_(cfg, seed), cfg_(p_.config()) {}

  const ScotConfig& config() const { return cfg_; }
  ScotParams<T>& params() { return p_; }
  const ScotParams<T>& params() const { return p_; }

  // a: [n_in, J, J], single sample.
  Tensor<T> forward(const Tensor<T>& a, double t) const {
    if (a.rank() != 3) throw ShapeError("forward expects [n_in, J, J]");
    Shape batched = a.shape();
    batched.insert(batched.begin(), 1);
    Tensor<T> out = forward_batch(reshape(a, batched), {t});
    Shape squeezed(out.shape().begin() + 1, out.shape().end());
    return reshape(out, squeezed);
  }

  // a: [B, n_in, J, J]; one lead time per sample.
  Tensor<T> forward_batch(const Tensor<T>& a, const std::vector<double>& t) const {
    const auto& c = cfg_;
    if (a.rank() != 4 || a.dim(1) != c.in_channels || a.dim(2) != c.grid_size ||
        a.dim(3) != c.grid_size)
      throw ShapeError("forward expects [B," + std::to_string(c.in_channels) + "," +
                       std::to_string(c.grid_size) + "," + std::to_string(c.grid_size) +
                       "], got " + shape_str(a.shape()));
    if (int64_t(t.size()) != a.dim(0)) throw ShapeError("one lead time per batch sample");
    for (double tv : t)
      if (tv < 0) throw ValueError("lead time must be >= 0");

    Tensor<T> tokens = patch_embed(a, t);
    std::vector<Tensor<T>> skips;
    Tensor<T> lvl = tokens;
    for (int64_t i = 0; i < c.levels - 1; ++i) {
      Tensor<T> stage_in = lvl;
      Tensor<T> stage_out = run_stage(stage_in, "enc" + std::to_string(i), i, t);
      skips.push_back(stage_out);
      lvl = patch_merge(add(stage_out, stage_in), i, t);
    }
    lvl = run_stage(lvl, "bot", c.levels - 1, t);
    for (int64_t i = c.levels - 2; i >= 0; --i) {
      lvl = patch_expand(lvl, i, t);
      Tensor<T> sk = skips[size_t(i)];
      for (int64_t j = 0; j < c.convnext_blocks; ++j)
        sk = convnext_block(sk, "skip" + std::to_string(i) + ".cn" + std::to_string(j), t);
      lvl = add(lvl, sk);
      lvl = run_stage(lvl, "dec" + std::to_string(i), i, t);
    }
    return patch_recover_mixup(lvl);
  }

  // Autoregressive rollout: lead times are consecutive differences of the
  // schedule, the first entry being measured from 0.
  Tensor<T> rollout(const Tensor<T>& a, const std::vector<double>& schedule) const {
    validate_schedule(schedule);
    Tensor<T> state = a;
    double prev = 0;
    for (double tt : schedule) {
      state = forward(state, tt - prev);
      prev = tt;
    }
    return state;
  }

  static void validate_schedule(const std::vector<double>& schedule) {
    if (schedule.empty()) throw ValueError("rollout schedule is empty");
    double prev = 0;
    for (double tt : schedule) {
      if (tt <= prev)
        throw ValueError("rollout schedule must be strictly increasing and start > 0");
      prev = tt;
    }
  }

  // --- individual pieces (public: exercised directly by the tests) ---

  // [B, n_in, J, J] -> [B, P, P, C]; shared linear patch map + bias,
  // then the time-conditioned layer norm.
  Tensor<T> patch_embed(const Tensor<T>& a, const std::vector<double>& t) const {
    const auto& c = cfg_;
    const int64_t B = a.dim(0), P = c.tokens_per_side(), p = c.patch_size;
    Tensor<T> x = reshape(a, {B, c.in_channels, P, p, P, p});
    x = permute(x, {0, 2, 4, 1, 3, 5});
    x = reshape(x, {B, P, P, c.in_channels * p * p});
    Tensor<T> w = reshape(p_.at("embed.w"), {c.embed_dim, c.in_channels * p * p});
    w = permute(w, {1, 0});
    Tensor<T> tok = add(matmul(x, w), p_.at("embed.b"));
    return time_layer_norm(tok, "embed.norm", t);
  }

  // Standardize across channels, then scale/shift by the affine-in-t
  // gain alpha(t) = wa*t + ba and bias beta(t) = wb*t + bb.
  Tensor<T> time_layer_norm(const Tensor<T>& x, const std::string& norm_name,
                            const std::vector<double>& t) const {
    Tensor<T> tt = lead_time_tensor(x, t);
    Tensor<T> alpha = add(mul(p_.at(norm_name + ".wa"), tt), p_.at(norm_name + ".ba"));
    Tensor<T> beta = add(mul(p_.at(norm_name + ".wb"), tt), p_.at(norm_name + ".bb"));
    Tensor<T> xhat = standardize_lastdim(x, T(cfg_.ln_eps));
    return add(mul(xhat, alpha), beta);
  }

  // Windowed multi-head cosine attention over [W, M^2, C] window tokens.
  Tensor<T> wmsa(const Tensor<T>& win, const std::string& attn, int64_t n_heads) const {
    const auto& c = cfg_;
    const int64_t W = win.dim(0), S = win.dim(1), C = win.dim(2);
    const int64_t hd = C / n_heads;

    Tensor<T> q = add(matmul(win, p_.at(attn + ".wq")), p_.at(attn + ".bq"));
    Tensor<T> k = matmul(win, p_.at(attn + ".wk"));
    Tensor<T> v = add(matmul(win, p_.at(attn + ".wv")), p_.at(attn + ".bv"));
    q = split_heads(q, W, S, n_heads, hd);
    k = split_heads(k, W, S, n_heads, hd);
    v = split_heads(v, W, S, n_heads, hd);

    Tensor<T> scores = matmul(unit_rows(q), permute(unit_rows(k), {0, 1, 3, 2}));
    Tensor<T> tau = reshape(clamp_min(p_.at(attn + ".tau"), T(cfg_.tau_min)), {n_heads, 1, 1});
    scores = divide(scores, tau);
    scores = add(scores, position_bias(attn, n_heads));

    Tensor<T> out = matmul(softmax_lastdim(scores), v);
    out = permute(out, {0, 2, 1, 3});
    out = reshape(out, {W, S, C});
    (void)c;
    return add(matmul(out, p_.at(attn + ".wo")), p_.at(attn + ".bo"));
  }

  // One SwinV2 block: v' = v + LN_t(W-MSA(v)); out = v' + LN_t(MLP(v')).
  Tensor<T> swin_block(const Tensor<T>& x, const std::string& pre, int64_t level,
                       const std::vector<double>& t, bool shifted) const {
    const auto& c = cfg_;
    const int64_t B = x.dim(0), P = x.dim(1), C = x.dim(3);
    const int64_t M = c.window, nw = P / M;
    const int64_t n_heads = c.heads[size_t(level)];

    Tensor<T> h = x;
    if (shifted) h = cyclic_shift(h, -M / 2);
    h = reshape(h, {B, nw, M, nw, M, C});
    h = permute(h, {0, 1, 3, 2, 4, 5});
    h = reshape(h, {B * nw * nw, M * M, C});
    h = wmsa(h, pre + ".attn", n_heads);
    h = reshape(h, {B, nw, nw, M, M, C});
    h = permute(h, {0, 1, 3, 2, 4, 5});
    h = reshape(h, {B, P, P, C});
    if (shifted) h = cyclic_shift(h, M / 2);

    Tensor<T> v1 = add(x, time_layer_norm(h, pre + ".norm1", t));
    Tensor<T> m = linear(v1, p_.at(pre + ".mlp.w1"), p_.at(pre + ".mlp.b1"));
    m = linear(gelu(m), p_.at(pre + ".mlp.w2"), p_.at(pre + ".mlp.b2"));
    return add(v1, time_layer_norm(m, pre + ".norm2", t));
  }

  // 2D circular roll of the token grid by (offset, offset) patches.
  Tensor<T> cyclic_shift(const Tensor<T>& grid, int64_t offset) const {
    return roll2d(grid, 1, 2, offset, offset);
  }

  // [B, P, P, C] -> [B, P/2, P/2, 2C]: stack each 2x2 token group and map
  // linearly, then the time-conditioned norm.
  Tensor<T> patch_merge(const Tensor<T>& x, int64_t level, const std::vector<double>& t) const {
    const int64_t B = x.dim(0), P = x.dim(1), C = x.dim(3);
    if (P % 2 != 0) throw ShapeError("patch_merge needs an even token grid, got side " +
                                     std::to_string(P));
    Tensor<T> h = reshape(x, {B, P / 2, 2, P / 2, 2, C});
    h = permute(h, {0, 1, 3, 2, 4, 5});
    h = reshape(h, {B, P / 2, P / 2, 4 * C});
    h = matmul(h, p_.at("merge" + std::to_string(level) + ".w"));
    return time_layer_norm(h, "merge" + std::to_string(level) + ".norm", t);
  }

  // [B, P, P, 2C] -> [B, 2P, 2P, C]: per token linear to 4C, spatial
  // rearrangement, norm, then a per-token linear.
  Tensor<T> patch_expand(const Tensor<T>& x, int64_t level, const std::vector<double>& t) const {
    const int64_t B = x.dim(0), P = x.dim(1);
    const int64_t C = cfg_.dim_at(level);
    const std::string pre = "expand" + std::to_string(level);
    Tensor<T> h = matmul(x, p_.at(pre + ".w1"));  // [B,P,P,4C]
    h = reshape(h, {B, P, P, 2, 2, C});
    h = permute(h, {0, 1, 3, 2, 4, 5});
    h = reshape(h, {B, 2 * P, 2 * P, C});
    h = time_layer_norm(h, pre + ".norm", t);
    return matmul(h, p_.at(pre + ".w2"));
  }

  // Depthwise 7x7 conv -> time-LN -> pointwise expand x4 -> GeLU ->
  // pointwise contract -> channel scale -> residual.
  Tensor<T> convnext_block(const Tensor<T>& x, const std::string& pre,
                           const std::vector<double>& t) const {
    Tensor<T> h = permute(x, {0, 3, 1, 2});
    h = conv2d(h, p_.at(pre + ".dw.w"), p_.at(pre + ".dw.b"), /*depthwise=*/true);
    h = permute(h, {0, 2, 3, 1});
    h = time_layer_norm(h, pre + ".norm", t);
    h = linear(h, p_.at(pre + ".pw1.w"), p_.at(pre + ".pw1.b"));
    h = linear(gelu(h), p_.at(pre + ".pw2.w"), p_.at(pre + ".pw2.b"));
    h = mul(h, p_.at(pre + ".gamma"));
    return add(x, h);
  }

  // [B, P, P, C] -> [B, n_out, J, J]: shared linear token->patch map plus
  // per-channel bias, assembled on the grid, then the 5x5 mixup
  // convolution (no bias).
  Tensor<T> patch_recover_mixup(const Tensor<T>& tokens) const {
    const auto& c = cfg_;
    const int64_t B = tokens.dim(0), P = tokens.dim(1), p = c.patch_size;
    Tensor<T> w = permute(p_.at("recover.w"), {1, 0, 2, 3});  // [C, n_out, p, p]
    w = reshape(w, {c.embed_dim, c.out_channels * p * p});
    Tensor<T> h = matmul(tokens, w);  // [B,P,P,n_out*p*p]
    h = reshape(h, {B, P, P, c.out_channels, p, p});
    h = permute(h, {0, 3, 1, 4, 2, 5});
    h = reshape(h, {B, c.out_channels, P * p, P * p});
    h = add(h, reshape(p_.at("recover.b"), {c.out_channels, 1, 1}));
    return conv2d(h, p_.at("mixup.w"), /*depthwise=*/false);
  }

  // Per-head M^2 x M^2 position bias from the shared-per-block MLP over
  // log-offset features.
  Tensor<T> position_bias(const std::string& attn, int64_t n_heads) const {
    const auto& g = detail::window_geometry(cfg_.window);
    Tensor<T> feats({g.n_offsets, 2});
    for (int64_t i = 0; i < g.n_offsets * 2; ++i) feats[i] = T(g.offset_features[size_t(i)]);
    Tensor<T> hb = relu(add(matmul(feats, p_.at(attn + ".bias.w1")), p_.at(attn + ".bias.b1")));
    hb = matmul(hb, p_.at(attn + ".bias.w2"));        // [n_off, h]
    Tensor<T> bias = gather_rows(hb, g.pair_index);   // [M^2*M^2, h]
    const int64_t s = cfg_.window * cfg_.window;
    bias = reshape(bias, {s, s, n_heads});
    return permute(bias, {2, 0, 1});                  // [h, S, S]
  }

 private:
  Tensor<T> run_stage(const Tensor<T>& x, const std::string& tag, int64_t level,
                      const std::vector<double>& t) const {
    const auto& c = cfg_;
    const bool single_window = x.dim(1) <= c.window;
    Tensor<T> h = x;
    for (int64_t b = 0; b < c.blocks[size_t(level)]; ++b) {
      const bool shifted = (b % 2 == 1) && !single_window;
      h = swin_block(h, tag + ".blk" + std::to_string(b), level, t, shifted);
    }
    return h;
  }

  // lead-time column of shape [B, 1, ..., 1] aligned with x's rank
  Tensor<T> lead_time_tensor(const Tensor<T>& x, const std::vector<double>& t) const {
    Shape s(size_t(x.rank()), 1);
    s[0] = int64_t(t.size());
    if (x.dim(0) != int64_t(t.size()))
      throw ShapeError("lead-time count does not match batch size");
    Tensor<T> tt(s);
    for (size_t i = 0; i < t.size(); ++i) tt[int64_t(i)] = T(t[i]);
    return tt;
  }

  Tensor<T> split_heads(const Tensor<T>& x, int64_t w, int64_t s, int64_t h, int64_t hd) const {
    Tensor<T> r = reshape(x, {w, s, h, hd});
    return permute(r, {0, 2, 1, 3});
  }

  // Rows scaled to unit length, with a floor on the magnitude so cosine
  // similarity stays finite on zero vectors.
  Tensor<T> unit_rows(const Tensor<T>& x) const {
    Tensor<T> sq = sum_axes(mul(x, x), {x.rank() - 1}, /*keepdim=*/true);
    Tensor<T> norm = clamp_min(sqrt_val(sq), T(cfg_.norm_floor));
    return divide(x, norm);
  }

  ScotParams<T> p_;
  ScotConfig cfg_;
};

// Lead times implied by a rollout schedule (first entry measured from 0).
inline std::vector<double> rollout_lead_times(const std::vector<double>& schedule) {
  Scot<float>::validate_schedule(schedule);
  std::vector<double> lead;
  double prev = 0;
  for (double t : schedule) {
    lead.push_back(t - prev);
    prev = t;
  }
  return lead;
}

}  // namespace scotlab
