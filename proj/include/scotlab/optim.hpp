#pragma once

#include <cmath>

#include "scotlab/tensor.hpp"

namespace scotlab {

// ------------------------------------------------------------ lr schedule

enum class LrKind { CosineWarmup, Cosine, Constant };

struct LrSchedule {
  LrKind kind = LrKind::CosineWarmup;
  double max_lr = 1e-3;
  int64_t warmup_steps = 0;
  int64_t total_steps = 1;

  static LrSchedule cosine_warmup(double max_lr, int64_t warmup, int64_t total) {
    return {LrKind::CosineWarmup, max_lr, warmup, total};
  }
  static LrSchedule cosine(double max_lr, int64_t total) {
    return {LrKind::Cosine, max_lr, 0, total};
  }
  static LrSchedule constant(double lr) { return {LrKind::Constant, lr, 0, 1}; }
};

// Linear ramp 0 -> max_lr over warmup, then cosine decay to 0 at total_steps.
inline double lr_at(const LrSchedule& s, int64_t step) {
  if (s.kind == LrKind::Constant) return s.max_lr;
  if (step < 0 || step > s.total_steps)
    throw ValueError("lr_at: step " + std::to_string(step) + " outside [0, " +
                     std::to_string(s.total_steps) + "]");
  const int64_t warmup = s.kind == LrKind::CosineWarmup ? s.warmup_steps : 0;
  if (step < warmup) return s.max_lr * double(step) / double(warmup);
  const double progress = double(step - warmup) / double(s.total_steps - warmup);
  return s.max_lr * 0.5 * (1.0 + std::cos(M_PI * progress));
}

// ------------------------------------------------------------- grad clip

// Scales all gradients by max_norm/norm when the global L2 norm exceeds
// max_norm; returns the pre-clip norm. The epsilon in the coefficient
// keeps the post-clip norm strictly below max_norm, so a second clip is
// an exact no-op.
template <class T>
double clip_grad_norm(std::vector<Tensor<T>>& grads, double max_norm) {
  if (max_norm <= 0) throw ValueError("clip_grad_norm: max_norm must be > 0");
  double sq = 0;
  for (const auto& g : grads)
    for (int64_t i = 0; i < g.size(); ++i) sq += double(g[i]) * double(g[i]);
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const T s = T(max_norm / (norm + 1e-6));
    for (auto& g : grads)
      for (int64_t i = 0; i < g.size(); ++i) g[i] *= s;
  }
  return norm;
}

// ----------------------------------------------------------------- AdamW

template <class T>
struct AdamWState {
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  int64_t t = 0;
};

template <class T>
AdamWState<T> adamw_init(const std::vector<Tensor<T>>& params) {
  AdamWState<T> st;
  for (const auto& p : params) {
    st.m.push_back(zeros_like(p));
    st.v.push_back(zeros_like(p));
  }
  return st;
}

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One decoupled-weight-decay Adam step. Updates params in place; lr and
// weight decay may vary per parameter (parameter groups).
template <class T>
void adamw_step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads,
                AdamWState<T>& state, const std::vector<double>& lr,
                const std::vector<double>& weight_decay, const AdamWConfig& cfg = {}) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw ShapeError("adamw_step: params/grads/state size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape())
      throw ShapeError("adamw_step: param/grad shape mismatch at index " + std::to_string(i));
    T* p = params[i].data();
    const T* g = grads[i].data();
    T* m = state.m[i].data();
    T* v = state.v[i].data();
    const T b1 = T(cfg.beta1), b2 = T(cfg.beta2);
    const T lr_i = T(lr[i]);
    const T wd = T(weight_decay[i]);
    const T eps = T(cfg.eps);
    const T ibc1 = T(1.0 / bc1), ibc2 = T(1.0 / bc2);
    const int64_t n = params[i].size();
    for (int64_t j = 0; j < n; ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      const T mhat = m[j] * ibc1;
      const T vhat = v[j] * ibc2;
      p[j] -= lr_i * wd * p[j];
      p[j] -= lr_i * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template <class T>
void adamw_step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads,
                AdamWState<T>& state, double lr, double weight_decay,
                const AdamWConfig& cfg = {}) {
  std::vector<double> lrs(params.size(), lr), wds(params.size(), weight_decay);
  adamw_step(params, grads, state, lrs, wds, cfg);
}

}  // namespace scotlab
