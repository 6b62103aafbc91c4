#pragma once

#include "scotlab/tape.hpp"

// Differentiable tensor operations. Each op computes the forward value
// with the raw kernels and, when an input is attached to a tape, pushes
// a node whose closure routes the output gradient to its inputs.

namespace scotlab {

namespace detail {

template <class T>
inline Tape<T>* joint_tape(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.tape && b.tape && a.tape != b.tape)
    throw ValueError("operands attached to different tapes");
  return a.tape ? a.tape : b.tape;
}

}  // namespace detail

template <class T>
Tensor<T> detached(const Tensor<T>& a) {
  Tensor<T> out = a;
  out.tape = nullptr;
  out.node = -1;
  return out;
}

// ------------------------------------------------------------- elementwise

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out = detail::ew_binary(a, b, [](T x, T y) { return x + y; });
  if (Tape<T>* tp = detail::joint_tape(a, b)) {
    out.tape = tp;
    out.node = tp->push(out.shape(), [an = a.node, bn = b.node, as = a.shape(), bs = b.shape()](
                                         Tape<T>& t, const Tensor<T>& g) {
      if (an >= 0) t.accumulate(an, detail::reduce_to_shape(g, as));
      if (bn >= 0) t.accumulate(bn, detail::reduce_to_shape(g, bs));
    });
  }
  return out;
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out = detail::ew_binary(a, b, [](T x, T y) { return x - y; });
  if (Tape<T>* tp = detail::joint_tape(a, b)) {
    out.tape = tp;
    out.node = tp->push(out.shape(), [an = a.node, bn = b.node, as = a.shape(), bs = b.shape()](
                                         Tape<T>& t, const Tensor<T>& g) {
      if (an >= 0) t.accumulate(an, detail::reduce_to_shape(g, as));
      if (bn >= 0) {
        Tensor<T> ng = detail::ew_unary(g, [](T x) { return -x; });
        t.accumulate(bn, detail::reduce_to_shape(ng, bs));
      }
    });
  }
  return out;
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out = detail::ew_binary(a, b, [](T x, T y) { return x * y; });
  if (Tape<T>* tp = detail::joint_tape(a, b)) {
    out.tape = tp;
    Tensor<T> av = detached(a), bv = detached(b);
    out.node = tp->push(out.shape(), [an = a.node, bn = b.node, av, bv](Tape<T>& t,
                                                                        const Tensor<T>& g) {
      if (an >= 0) {
        Tensor<T> da = detail::ew_binary(g, bv, [](T x, T y) { return x * y; });
        t.accumulate(an, detail::reduce_to_shape(da, av.shape()));
      }
      if (bn >= 0) {
        Tensor<T> db = detail::ew_binary(g, av, [](T x, T y) { return x * y; });
        t.accumulate(bn, detail::reduce_to_shape(db, bv.shape()));
      }
    });
  }
  return out;
}

template <class T>
Tensor<T> divide(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out = detail::ew_binary(a, b, [](T x, T y) { return x / y; });
  if (Tape<T>* tp = detail::joint_tape(a, b)) {
    out.tape = tp;
    Tensor<T> av = detached(a), bv = detached(b);
    out.node = tp->push(out.shape(), [an = a.node, bn = b.node, av, bv](Tape<T>& t,
                                                                        const Tensor<T>& g) {
      if (an >= 0) {
        Tensor<T> da = detail::ew_binary(g, bv, [](T x, T y) { return x / y; });
        t.accumulate(an, detail::reduce_to_shape(da, av.shape()));
      }
      if (bn >= 0) {
        Tensor<T> q = detail::ew_binary(av, bv, [](T x, T y) { return -x / (y * y); });
        Tensor<T> db = detail::ew_binary(g, q, [](T x, T y) { return x * y; });
        t.accumulate(bn, detail::reduce_to_shape(db, bv.shape()));
      }
    });
  }
  return out;
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T s) {
  Tensor<T> out = detail::ew_unary(a, [s](T x) { return s * x; });
  if (a.tape) {
    out.tape = a.tape;
    out.node = a.tape->push(out.shape(), [an = a.node, s](Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::ew_unary(g, [s](T x) { return s * x; }));
    });
  }
  return out;
}

template <class T>
Tensor<T> add_scalar(const Tensor<T>& a, T s) {
  Tensor<T> out = detail::ew_unary(a, [s](T x) { return x + s; });
  if (a.tape) {
    out.tape = a.tape;
    out.node = a.tape->push(out.shape(), [an = a.node](Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, g);
    });
  }
  return out;
}

template <class T>
Tensor<T> neg(const Tensor<T>& a) {
  return scale(a, T(-1));
}

template <class T>
Tensor<T> abs_val(const Tensor<T>& a) {
  Tensor<T> out = detail::ew_unary(a, [](T x) { return std::abs(x); });
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> av = detached(a);
    out.node = a.tape->push(out.shape(), [an = a.node, av](Tape<T>& t, const Tensor<T>& g) {
      Tensor<T> da = detail::ew_binary(g, av, [](T x, T v) { return v > 0 ? x : (v < 0 ? -x : T(0)); });
      t.accumulate(an, da);
    });
  }
  return out;
}

template <class T>
Tensor<T> sqrt_val(const Tensor<T>& a) {
  Tensor<T> out = detail::ew_unary(a, [](T x) { return std::sqrt(x); });
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> ov = detached(out);
    out.node = a.tape->push(out.shape(), [an = a.node, ov](Tape<T>& t, const Tensor<T>& g) {
      Tensor<T> da = detail::ew_binary(g, ov, [](T x, T y) { return x / (T(2) * y); });
      t.accumulate(an, da);
    });
  }
  return out;
}

// max(x, floor): subgradient passes where x >= floor
template <class T>
Tensor<T> clamp_min(const Tensor<T>& a, T floor) {
  Tensor<T> out = detail::ew_unary(a, [floor](T x) { return x > floor ? x : floor; });
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> av = detached(a);
    out.node = a.tape->push(out.shape(), [an = a.node, av, floor](Tape<T>& t, const Tensor<T>& g) {
      Tensor<T> da = detail::ew_binary(g, av, [floor](T x, T v) { return v >= floor ? x : T(0); });
      t.accumulate(an, da);
    });
  }
  return out;
}

template <class T>
Tensor<T> gelu(const Tensor<T>& a) {
  Tensor<T> out = detail::ew_unary(a, [](T x) {
    return T(0.5) * x * (T(1) + std::erf(x * T(M_SQRT1_2)));
  });
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> av = detached(a);
    out.node = a.tape->push(out.shape(), [an = a.node, av](Tape<T>& t, const Tensor<T>& g) {
      Tensor<T> da = detail::ew_binary(g, av, [](T gv, T x) {
        const T phi = std::exp(T(-0.5) * x * x) * T(0.3989422804014327);
        const T Phi = T(0.5) * (T(1) + std::erf(x * T(M_SQRT1_2)));
        return gv * (Phi + x * phi);
      });
      t.accumulate(an, da);
    });
  }
  return out;
}

template <class T>
Tensor<T> relu(const Tensor<T>& a) {
  Tensor<T> out = detail::ew_unary(a, [](T x) { return x > 0 ? x : T(0); });
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> av = detached(a);
    out.node = a.tape->push(out.shape(), [an = a.node, av](Tape<T>& t, const Tensor<T>& g) {
      Tensor<T> da = detail::ew_binary(g, av, [](T x, T v) { return v > 0 ? x : T(0); });
      t.accumulate(an, da);
    });
  }
  return out;
}

// ----------------------------------------------------------------- matmul

// a: [..., m, k]. b either [k, n] (shared weight, batch dims flattened)
// or same-rank with identical leading dims (true batched product).
template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() < 2 || b.rank() < 2) throw ShapeError("matmul needs rank >= 2 operands");
  const int64_t k = a.dim(a.rank() - 1);
  const int64_t m = a.dim(a.rank() - 2);
  Tape<T>* tp = detail::joint_tape(a, b);

  if (b.rank() == 2) {
    if (b.dim(0) != k)
      throw ShapeError("matmul inner dims: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
    const int64_t n = b.dim(1);
    const int64_t rows = a.size() / k;
    Shape oshape(a.shape());
    oshape.back() = n;
    Tensor<T> out(oshape);
    detail::gemm_rows(a.data(), b.data(), out.data(), rows, k, n);
    if (tp) {
      out.tape = tp;
      Tensor<T> av = detached(a), bv = detached(b);
      out.node = tp->push(out.shape(), [an = a.node, bn = b.node, av, bv, rows, k, n](
                                           Tape<T>& t, const Tensor<T>& g) {
        if (an >= 0) {
          Tensor<T> da(av.shape());
          detail::gemm_nt_acc(g.data(), bv.data(), da.data(), rows, n, k);
          t.accumulate(an, da);
        }
        if (bn >= 0) {
          Tensor<T> db(bv.shape());
          detail::gemm_tn_acc(av.data(), g.data(), db.data(), rows, k, n);
          t.accumulate(bn, db);
        }
      });
    }
    return out;
  }

  if (a.rank() != b.rank())
    throw ShapeError("matmul rank mismatch: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  for (int i = 0; i < a.rank() - 2; ++i)
    if (a.dim(i) != b.dim(i))
      throw ShapeError("matmul batch dims: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  if (b.dim(b.rank() - 2) != k)
    throw ShapeError("matmul inner dims: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const int64_t n = b.dim(b.rank() - 1);
  const int64_t batch = a.size() / (m * k);
  Shape oshape(a.shape());
  oshape[oshape.size() - 1] = n;
  oshape[oshape.size() - 2] = m;
  Tensor<T> out(oshape);
  detail::bgemm(a.data(), b.data(), out.data(), batch, m, k, n);
  if (tp) {
    out.tape = tp;
    Tensor<T> av = detached(a), bv = detached(b);
    out.node = tp->push(out.shape(), [an = a.node, bn = b.node, av, bv, batch, m, k, n](
                                         Tape<T>& t, const Tensor<T>& g) {
      if (an >= 0) {
        Tensor<T> da(av.shape());
        detail::bgemm_nt(g.data(), bv.data(), da.data(), batch, m, n, k);
        t.accumulate(an, da);
      }
      if (bn >= 0) {
        Tensor<T> db(bv.shape());
        detail::bgemm_tn(av.data(), g.data(), db.data(), batch, m, k, n);
        t.accumulate(bn, db);
      }
    });
  }
  return out;
}

// ----------------------------------------------------------------- conv2d

// Same-size convolution; x [B,C,H,W] or [C,H,W], odd kernel, zero padding.
template <class T>
Tensor<T> conv2d(const Tensor<T>& x_in, const Tensor<T>& w, const Tensor<T>* bias,
                 bool depthwise) {
  Tensor<T> x = x_in;
  const bool unbatched = x.rank() == 3;
  if (unbatched) {
    Shape s = x.shape();
    s.insert(s.begin(), 1);
    x = x.reshaped(s);
    x.tape = x_in.tape;
    x.node = x_in.node;
  }
  if (x.rank() != 4 || w.rank() != 4) throw ShapeError("conv2d expects [B,C,H,W] and [Co,Ci,k,k]");
  const int64_t k = w.dim(2);
  if (k % 2 == 0) throw ShapeError("conv2d kernel size must be odd, got " + std::to_string(k));
  if (w.dim(3) != k) throw ShapeError("conv2d kernel must be square");
  const int64_t cin = x.dim(1);
  if (depthwise) {
    if (w.dim(0) != cin || w.dim(1) != 1)
      throw ShapeError("depthwise conv2d: weight " + shape_str(w.shape()) + " for " +
                       std::to_string(cin) + " channels");
  } else if (w.dim(1) != cin) {
    throw ShapeError("conv2d channels: input has " + std::to_string(cin) + ", weight " +
                     shape_str(w.shape()));
  }
  if (bias && bias->size() != w.dim(0)) throw ShapeError("conv2d bias size mismatch");

  Tensor<T> out = detail::conv2d_raw(x, w, bias ? bias->data() : nullptr, depthwise);
  Tape<T>* tp = detail::joint_tape(x, w);
  if (!tp && bias) tp = bias->tape;
  if (tp) {
    out.tape = tp;
    Tensor<T> xv = detached(x), wv = detached(w);
    const int64_t biasnode = bias ? bias->node : -1;
    out.node = tp->push(out.shape(), [xn = x.node, wn = w.node, biasnode, xv, wv, depthwise](
                                         Tape<T>& t, const Tensor<T>& g) {
      if (xn >= 0) t.accumulate(xn, detail::conv2d_bwd_input(g, wv, xv.shape(), depthwise));
      if (wn >= 0) t.accumulate(wn, detail::conv2d_bwd_weight(g, xv, wv.shape(), depthwise));
      if (biasnode >= 0)
        t.accumulate(biasnode, detail::sum_axes_raw(g, {0, 2, 3}, false));
    });
  }
  if (unbatched) {
    Shape s(out.shape().begin() + 1, out.shape().end());
    Tensor<T> squeezed = out.reshaped(s);
    squeezed.tape = out.tape;
    if (out.tape) {
      squeezed.node = out.tape->push(s, [on = out.node, bs = out.shape()](Tape<T>& t,
                                                                          const Tensor<T>& g) {
        t.accumulate(on, g.reshaped(bs));
      });
    }
    return squeezed;
  }
  return out;
}

template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias,
                 bool depthwise = false) {
  return conv2d(x, w, &bias, depthwise);
}

template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, bool depthwise = false) {
  return conv2d(x, w, static_cast<const Tensor<T>*>(nullptr), depthwise);
}

// ------------------------------------------------------------- softmax etc.

template <class T>
Tensor<T> softmax_lastdim(const Tensor<T>& a) {
  Tensor<T> out = detail::softmax_lastdim_raw(a);
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> ov = detached(out);
    out.node = a.tape->push(out.shape(), [an = a.node, ov](Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::softmax_lastdim_bwd(ov, g));
    });
  }
  return out;
}

// (x - mean) / sqrt(var + eps) over the last dim
template <class T>
Tensor<T> standardize_lastdim(const Tensor<T>& a, T eps) {
  Tensor<T> inv_std;
  Tensor<T> out = detail::standardize_lastdim_raw(a, eps, &inv_std);
  if (a.tape) {
    out.tape = a.tape;
    Tensor<T> ov = detached(out);
    out.node = a.tape->push(out.shape(), [an = a.node, ov, inv_std](Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::standardize_lastdim_bwd(ov, inv_std, g));
    });
  }
  return out;
}

// ---------------------------------------------------------------- reduce

template <class T>
Tensor<T> sum_all(const Tensor<T>& a) {
  Tensor<T> out = Tensor<T>::scalar(detail::sum_all_raw(a));
  if (a.tape) {
    out.tape = a.tape;
    out.node = a.tape->push(out.shape(), [an = a.node, as = a.shape()](Tape<T>& t,
                                                                       const Tensor<T>& g) {
      t.accumulate(an, Tensor<T>::full(as, g[0]));
    });
  }
  return out;
}

template <class T>
Tensor<T> sum_axes(const Tensor<T>& a, const std::vector<int>& axes, bool keepdim = false) {
  Tensor<T> out = detail::sum_axes_raw(a, axes, keepdim);
  if (a.tape) {
    out.tape = a.tape;
    Shape kshape = a.shape();
    for (int ax : axes) kshape[size_t(ax)] = 1;
    out.node = a.tape->push(out.shape(), [an = a.node, as = a.shape(), kshape](
                                             Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::expand_to(g.reshaped(kshape), as));
    });
  }
  return out;
}

template <class T>
Tensor<T> mean_all(const Tensor<T>& a) {
  return scale(sum_all(a), T(1) / T(a.size()));
}

// --------------------------------------------------------------- movement

template <class T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  Tensor<T> out = a.reshaped(std::move(shape));
  out.tape = a.tape;
  out.node = -1;
  if (a.tape) {
    out.node = a.tape->push(out.shape(), [an = a.node, as = a.shape()](Tape<T>& t,
                                                                       const Tensor<T>& g) {
      t.accumulate(an, g.reshaped(as));
    });
  }
  return out;
}

template <class T>
Tensor<T> permute(const Tensor<T>& a, const std::vector<int>& perm) {
  Tensor<T> out = detail::permute_raw(a, perm);
  if (a.tape) {
    out.tape = a.tape;
    out.node = a.tape->push(out.shape(), [an = a.node, inv = detail::inverse_perm(perm)](
                                             Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::permute_raw(g, inv));
    });
  }
  return out;
}

template <class T>
Tensor<T> roll2d(const Tensor<T>& a, int axis0, int axis1, int64_t s0, int64_t s1) {
  Tensor<T> out = detail::roll2d_raw(a, axis0, axis1, s0, s1);
  if (a.tape) {
    out.tape = a.tape;
    out.node = a.tape->push(out.shape(), [an = a.node, axis0, axis1, s0, s1](
                                             Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::roll2d_raw(g, axis0, axis1, -s0, -s1));
    });
  }
  return out;
}

// rows of a 2D table by index; backward scatter-adds
template <class T>
Tensor<T> gather_rows(const Tensor<T>& a, const std::vector<int64_t>& idx) {
  if (a.rank() != 2) throw ShapeError("gather_rows expects a 2D table");
  Tensor<T> out = detail::gather_rows_raw(a, idx);
  if (a.tape) {
    out.tape = a.tape;
    out.node = a.tape->push(out.shape(), [an = a.node, idx, rows = a.dim(0)](
                                             Tape<T>& t, const Tensor<T>& g) {
      t.accumulate(an, detail::scatter_rows_add_raw(g, idx, rows));
    });
  }
  return out;
}

template <class T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  return add(matmul(x, w), b);
}

}  // namespace scotlab
