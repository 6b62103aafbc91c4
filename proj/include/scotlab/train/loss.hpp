#pragma once

#include "scotlab/ops.hpp"

namespace scotlab {

constexpr double kLossEps = 1e-10;

// Relative L1 objective: per channel, sum_{batch,grid} |pred - target|
// over sum_{batch,grid} |target| + eps, averaged over the channels the
// mask keeps. mask is per-channel [C] or per-sample [B, C] with entries
// in {0, 1}; masked channels are excluded from numerator, denominator
// and the channel average.
template <class T>
Tensor<T> relative_l1_loss(const Tensor<T>& pred, const Tensor<T>& target, const Tensor<T>& mask,
                           double eps = kLossEps) {
  if (pred.shape() != target.shape())
    throw ShapeError("loss shapes differ: " + shape_str(pred.shape()) + " vs " +
                     shape_str(target.shape()));
  if (pred.rank() != 4) throw ShapeError("relative_l1_loss expects [B, C, H, W]");
  const int64_t B = pred.dim(0), C = pred.dim(1);

  Tensor<T> m;
  if (mask.rank() == 1) {
    if (mask.dim(0) != C) throw ShapeError("mask length must equal channel count");
    m = detail::expand_to(mask.reshaped({1, C, 1, 1}), {B, C, 1, 1});
  } else if (mask.rank() == 2) {
    if (mask.dim(0) != B || mask.dim(1) != C) throw ShapeError("mask must be [B, C]");
    m = mask.reshaped({B, C, 1, 1});
  } else {
    throw ShapeError("mask must be [C] or [B, C]");
  }

  // denominator and channel weights carry no gradient
  Tensor<T> den_terms = detail::ew_binary(detail::ew_unary(detached(target), [](T x) {
                                            return std::abs(x);
                                          }),
                                          m, [](T x, T y) { return x * y; });
  Tensor<T> den = detail::sum_axes_raw(den_terms, {0, 2, 3}, false);  // [C]
  Tensor<T> msum = detail::sum_axes_raw(m, {0, 2, 3}, false);
  int64_t active = 0;
  for (int64_t c = 0; c < C; ++c)
    if (msum[c] > 0) ++active;
  if (active == 0) throw ValueError("relative_l1_loss: every channel is masked");

  Tensor<T> coef({C});
  for (int64_t c = 0; c < C; ++c)
    coef[c] = msum[c] > 0 ? T(1) / ((den[c] + T(eps)) * T(active)) : T(0);

  Tensor<T> num = sum_axes(mul(abs_val(sub(pred, target)), m), {0, 2, 3});  // [C]
  return sum_all(mul(num, coef));
}

}  // namespace scotlab
