#pragma once

#include <cmath>
#include <cstring>

#include "scotlab/tensor.hpp"

// Raw compute layer used by the taped ops and the optimizer. All kernels
// write each output element from exactly one thread in a fixed order, so
// results are bitwise-identical for any thread count.

namespace scotlab::detail {

// ---------------------------------------------------------------- gemm

// C[m,n] = A[m,k] * B[k,n], row-major, C must be zeroed.
template <class T>
inline void gemm_rows(const T* a, const T* b, T* c, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const T ap = arow[p];
      const T* brow = b + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += ap * brow[j];
    }
  }
}

// C[m,n] += A[m,k] * B[n,k]^T  (dot-product form)
template <class T>
inline void gemm_nt_acc(const T* a, const T* b, T* c, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (int64_t j = 0; j < n; ++j) {
      const T* brow = b + j * k;
      T acc = 0;
      for (int64_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] += acc;
    }
  }
}

// C[k,n] += A[m,k]^T * B[m,n]
template <class T>
inline void gemm_tn_acc(const T* a, const T* b, T* c, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < k; ++p) {
    T* crow = c + p * n;
    for (int64_t i = 0; i < m; ++i) {
      const T ap = a[i * k + p];
      const T* brow = b + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += ap * brow[j];
    }
  }
}

// Batched variants over equal leading dims; parallelism inside per-batch
// calls would nest, so batch loops stay serial and the row loops parallelize.
template <class T>
inline void bgemm(const T* a, const T* b, T* c, int64_t batch, int64_t m, int64_t k, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t job = 0; job < batch * m; ++job) {
    const int64_t bi = job / m, i = job % m;
    const T* arow = a + bi * m * k + i * k;
    const T* bmat = b + bi * k * n;
    T* crow = c + bi * m * n + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const T ap = arow[p];
      const T* brow = bmat + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += ap * brow[j];
    }
  }
}

template <class T>
inline void bgemm_nt(const T* a, const T* b, T* c, int64_t batch, int64_t m, int64_t k,
                     int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t job = 0; job < batch * m; ++job) {
    const int64_t bi = job / m, i = job % m;
    const T* arow = a + bi * m * k + i * k;
    const T* bmat = b + bi * n * k;
    T* crow = c + bi * m * n + i * n;
    for (int64_t j = 0; j < n; ++j) {
      const T* brow = bmat + j * k;
      T acc = 0;
      for (int64_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = acc;
    }
  }
}

template <class T>
inline void bgemm_tn(const T* a, const T* b, T* c, int64_t batch, int64_t m, int64_t k,
                     int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t job = 0; job < batch * k; ++job) {
    const int64_t bi = job / k, p = job % k;
    const T* amat = a + bi * m * k;
    const T* bmat = b + bi * m * n;
    T* crow = c + bi * k * n + p * n;
    for (int64_t i = 0; i < m; ++i) {
      const T ap = amat[i * k + p];
      const T* brow = bmat + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += ap * brow[j];
    }
  }
}

// ---------------------------------------------------- broadcast elementwise

template <class T, class F>
inline Tensor<T> ew_binary(const Tensor<T>& a, const Tensor<T>& b, F f) {
  if (a.shape() == b.shape()) {
    Tensor<T> out(a.shape());
    const T* pa = a.data();
    const T* pb = b.data();
    T* po = out.data();
    const int64_t n = out.size();
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) po[i] = f(pa[i], pb[i]);
    return out;
  }
  Shape os = broadcast_shape(a.shape(), b.shape());
  Tensor<T> out(os);
  const int r = int(os.size());
  Shape ost = row_major_strides(os);
  // input strides padded to output rank, 0 on broadcast dims
  Shape sa(r, 0), sb(r, 0);
  {
    Shape ast = row_major_strides(a.shape());
    Shape bst = row_major_strides(b.shape());
    for (int i = 0; i < r; ++i) {
      int ia = i - (r - a.rank());
      int ib = i - (r - b.rank());
      if (ia >= 0 && a.dim(ia) != 1) sa[size_t(i)] = ast[size_t(ia)];
      if (ib >= 0 && b.dim(ib) != 1) sb[size_t(i)] = bst[size_t(ib)];
    }
  }
  const T* pa = a.data();
  const T* pb = b.data();
  T* po = out.data();
  const int64_t n = out.size();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    int64_t rem = i, oa = 0, ob = 0;
    for (int d = 0; d < r; ++d) {
      int64_t id = rem / ost[size_t(d)];
      rem -= id * ost[size_t(d)];
      oa += id * sa[size_t(d)];
      ob += id * sb[size_t(d)];
    }
    po[i] = f(pa[oa], pb[ob]);
  }
  return out;
}

template <class T, class F>
inline Tensor<T> ew_unary(const Tensor<T>& a, F f) {
  Tensor<T> out(a.shape());
  const T* pa = a.data();
  T* po = out.data();
  const int64_t n = out.size();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) po[i] = f(pa[i]);
  return out;
}

// Sum g down to `shape` (inverse of broadcasting).
template <class T>
inline Tensor<T> reduce_to_shape(const Tensor<T>& g, const Shape& shape) {
  if (g.shape() == shape) return g;
  Tensor<T> out(shape);
  const int r = g.rank();
  Shape gst = row_major_strides(g.shape());
  Shape so(r, 0);
  {
    Shape ost = row_major_strides(shape);
    const int ro = int(shape.size());
    for (int i = 0; i < r; ++i) {
      int io = i - (r - ro);
      if (io >= 0 && shape[size_t(io)] != 1) so[size_t(i)] = ost[size_t(io)];
    }
  }
  const T* pg = g.data();
  T* po = out.data();
  for (int64_t i = 0; i < g.size(); ++i) {
    int64_t rem = i, oo = 0;
    for (int d = 0; d < r; ++d) {
      int64_t id = rem / gst[size_t(d)];
      rem -= id * gst[size_t(d)];
      oo += id * so[size_t(d)];
    }
    po[oo] += pg[i];
  }
  return out;
}

// Expand a reduced tensor back to `shape` by repetition.
template <class T>
inline Tensor<T> expand_to(const Tensor<T>& a, const Shape& shape) {
  return ew_binary(Tensor<T>::zeros(shape), a, [](T, T y) { return y; });
}

// ------------------------------------------------------------- reductions

template <class T>
inline T sum_all_raw(const Tensor<T>& a) {
  T acc = 0;
  for (int64_t i = 0; i < a.size(); ++i) acc += a[i];
  return acc;
}

// Sum over the given axes (sorted, unique). keepdim keeps size-1 dims.
template <class T>
inline Tensor<T> sum_axes_raw(const Tensor<T>& a, const std::vector<int>& axes, bool keepdim) {
  std::vector<bool> red(size_t(a.rank()), false);
  for (int ax : axes) red[size_t(ax)] = true;
  Shape kshape = a.shape();
  for (int i = 0; i < a.rank(); ++i)
    if (red[size_t(i)]) kshape[size_t(i)] = 1;
  Tensor<T> out(kshape);
  Shape ast = row_major_strides(a.shape());
  Shape ost = row_major_strides(kshape);
  const T* pa = a.data();
  T* po = out.data();
  const int r = a.rank();
  for (int64_t i = 0; i < a.size(); ++i) {
    int64_t rem = i, oo = 0;
    for (int d = 0; d < r; ++d) {
      int64_t id = rem / ast[size_t(d)];
      rem -= id * ast[size_t(d)];
      if (!red[size_t(d)]) oo += id * ost[size_t(d)];
    }
    po[oo] += pa[i];
  }
  if (keepdim) return out;
  Shape fshape;
  for (int i = 0; i < a.rank(); ++i)
    if (!red[size_t(i)]) fshape.push_back(a.dim(i));
  return out.reshaped(fshape);
}

// ------------------------------------------------------------ permutation

template <class T>
inline Tensor<T> permute_raw(const Tensor<T>& a, const std::vector<int>& perm) {
  const int r = a.rank();
  Shape os(size_t(r), 0);
  for (int i = 0; i < r; ++i) os[size_t(i)] = a.dim(perm[size_t(i)]);
  Tensor<T> out(os);
  Shape ast = row_major_strides(a.shape());
  Shape ost = row_major_strides(os);
  // stride of output dim i in the input
  Shape src_stride(size_t(r), 0);
  for (int i = 0; i < r; ++i) src_stride[size_t(i)] = ast[size_t(perm[size_t(i)])];
  const T* pa = a.data();
  T* po = out.data();
  const int64_t n = a.size();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    int64_t rem = i, ia = 0;
    for (int d = 0; d < r; ++d) {
      int64_t id = rem / ost[size_t(d)];
      rem -= id * ost[size_t(d)];
      ia += id * src_stride[size_t(d)];
    }
    po[i] = pa[ia];
  }
  return out;
}

inline std::vector<int> inverse_perm(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[size_t(perm[i])] = int(i);
  return inv;
}

// Cyclic roll along two axes.
template <class T>
inline Tensor<T> roll2d_raw(const Tensor<T>& a, int axis0, int axis1, int64_t s0, int64_t s1) {
  Tensor<T> out(a.shape());
  Shape st = row_major_strides(a.shape());
  const int r = a.rank();
  const int64_t d0 = a.dim(axis0), d1 = a.dim(axis1);
  s0 = ((s0 % d0) + d0) % d0;
  s1 = ((s1 % d1) + d1) % d1;
  const T* pa = a.data();
  T* po = out.data();
  const int64_t n = a.size();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    int64_t rem = i, src = 0;
    for (int d = 0; d < r; ++d) {
      int64_t id = rem / st[size_t(d)];
      rem -= id * st[size_t(d)];
      if (d == axis0) id = (id - s0 + d0) % d0;
      if (d == axis1) id = (id - s1 + d1) % d1;
      src += id * st[size_t(d)];
    }
    po[i] = pa[src];
  }
  return out;
}

// --------------------------------------------------------------- softmax

template <class T>
inline Tensor<T> softmax_lastdim_raw(const Tensor<T>& a) {
  const int64_t c = a.dim(a.rank() - 1);
  const int64_t rows = a.size() / c;
  Tensor<T> out(a.shape());
  const T* pa = a.data();
  T* po = out.data();
#pragma omp parallel for schedule(static)
  for (int64_t row = 0; row < rows; ++row) {
    const T* x = pa + row * c;
    T* y = po + row * c;
    T mx = x[0];
    for (int64_t j = 1; j < c; ++j) mx = std::max(mx, x[j]);
    T s = 0;
    for (int64_t j = 0; j < c; ++j) {
      y[j] = std::exp(x[j] - mx);
      s += y[j];
    }
    const T inv = T(1) / s;
    for (int64_t j = 0; j < c; ++j) y[j] *= inv;
  }
  return out;
}

template <class T>
inline Tensor<T> softmax_lastdim_bwd(const Tensor<T>& y, const Tensor<T>& g) {
  const int64_t c = y.dim(y.rank() - 1);
  const int64_t rows = y.size() / c;
  Tensor<T> dx(y.shape());
  const T* py = y.data();
  const T* pg = g.data();
  T* pd = dx.data();
#pragma omp parallel for schedule(static)
  for (int64_t row = 0; row < rows; ++row) {
    const T* yr = py + row * c;
    const T* gr = pg + row * c;
    T* dr = pd + row * c;
    T dot = 0;
    for (int64_t j = 0; j < c; ++j) dot += yr[j] * gr[j];
    for (int64_t j = 0; j < c; ++j) dr[j] = yr[j] * (gr[j] - dot);
  }
  return dx;
}

// ------------------------------------------------- standardize (layernorm)

// x_hat = (x - mean) / sqrt(var + eps) over the last dim; returns x_hat,
// inv_std per row goes to `inv_std` (rows = size/c) for the backward.
template <class T>
inline Tensor<T> standardize_lastdim_raw(const Tensor<T>& a, T eps, Tensor<T>* inv_std) {
  const int64_t c = a.dim(a.rank() - 1);
  const int64_t rows = a.size() / c;
  Tensor<T> out(a.shape());
  *inv_std = Tensor<T>({rows});
  const T* pa = a.data();
  T* po = out.data();
  T* pis = inv_std->data();
#pragma omp parallel for schedule(static)
  for (int64_t row = 0; row < rows; ++row) {
    const T* x = pa + row * c;
    T* y = po + row * c;
    T mu = 0;
    for (int64_t j = 0; j < c; ++j) mu += x[j];
    mu /= T(c);
    T var = 0;
    for (int64_t j = 0; j < c; ++j) var += (x[j] - mu) * (x[j] - mu);
    var /= T(c);
    const T is = T(1) / std::sqrt(var + eps);
    pis[row] = is;
    for (int64_t j = 0; j < c; ++j) y[j] = (x[j] - mu) * is;
  }
  return out;
}

template <class T>
inline Tensor<T> standardize_lastdim_bwd(const Tensor<T>& xhat, const Tensor<T>& inv_std,
                                         const Tensor<T>& g) {
  const int64_t c = xhat.dim(xhat.rank() - 1);
  const int64_t rows = xhat.size() / c;
  Tensor<T> dx(xhat.shape());
  const T* ph = xhat.data();
  const T* pg = g.data();
  const T* pis = inv_std.data();
  T* pd = dx.data();
#pragma omp parallel for schedule(static)
  for (int64_t row = 0; row < rows; ++row) {
    const T* h = ph + row * c;
    const T* gr = pg + row * c;
    T* dr = pd + row * c;
    T gmean = 0, ghmean = 0;
    for (int64_t j = 0; j < c; ++j) {
      gmean += gr[j];
      ghmean += gr[j] * h[j];
    }
    gmean /= T(c);
    ghmean /= T(c);
    const T is = pis[row];
    for (int64_t j = 0; j < c; ++j) dr[j] = is * (gr[j] - gmean - h[j] * ghmean);
  }
  return dx;
}

// ------------------------------------------------------------------ conv2d

// Stride-1 same-size convolution, zero padding (k odd, pad=(k-1)/2).
// w is [Cout,Cin,k,k], or [C,1,k,k] in depthwise mode.
template <class T>
inline Tensor<T> conv2d_raw(const Tensor<T>& x, const Tensor<T>& w, const T* bias,
                            bool depthwise) {
  const int64_t B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int64_t Cout = w.dim(0), k = w.dim(2);
  const int64_t pad = (k - 1) / 2;
  Tensor<T> out({B, Cout, H, W});
  const T* px = x.data();
  const T* pw = w.data();
  T* po = out.data();
#pragma omp parallel for schedule(static)
  for (int64_t job = 0; job < B * Cout; ++job) {
    const int64_t b = job / Cout, co = job % Cout;
    const int64_t ci_lo = depthwise ? co : 0;
    const int64_t ci_hi = depthwise ? co + 1 : Cin;
    T* oimg = po + (b * Cout + co) * H * W;
    const T bv = bias ? bias[co] : T(0);
    for (int64_t oy = 0; oy < H; ++oy)
      for (int64_t ox = 0; ox < W; ++ox) {
        T acc = bv;
        for (int64_t ci = ci_lo; ci < ci_hi; ++ci) {
          const T* ximg = px + (b * Cin + ci) * H * W;
          const T* wk = pw + (co * (depthwise ? 1 : Cin) + (depthwise ? 0 : ci)) * k * k;
          for (int64_t ky = 0; ky < k; ++ky) {
            const int64_t iy = oy + ky - pad;
            if (iy < 0 || iy >= H) continue;
            for (int64_t kx = 0; kx < k; ++kx) {
              const int64_t ix = ox + kx - pad;
              if (ix < 0 || ix >= W) continue;
              acc += ximg[iy * W + ix] * wk[ky * k + kx];
            }
          }
        }
        oimg[oy * W + ox] = acc;
      }
  }
  return out;
}

template <class T>
inline Tensor<T> conv2d_bwd_input(const Tensor<T>& g, const Tensor<T>& w, const Shape& xshape,
                                  bool depthwise) {
  const int64_t B = xshape[0], Cin = xshape[1], H = xshape[2], W = xshape[3];
  const int64_t Cout = w.dim(0), k = w.dim(2);
  const int64_t pad = (k - 1) / 2;
  Tensor<T> dx(xshape);
  const T* pg = g.data();
  const T* pw = w.data();
  T* pd = dx.data();
#pragma omp parallel for schedule(static)
  for (int64_t job = 0; job < B * Cin; ++job) {
    const int64_t b = job / Cin, ci = job % Cin;
    const int64_t co_lo = depthwise ? ci : 0;
    const int64_t co_hi = depthwise ? ci + 1 : Cout;
    T* dimg = pd + (b * Cin + ci) * H * W;
    for (int64_t iy = 0; iy < H; ++iy)
      for (int64_t ix = 0; ix < W; ++ix) {
        T acc = 0;
        for (int64_t co = co_lo; co < co_hi; ++co) {
          const T* gimg = pg + (b * Cout + co) * H * W;
          const T* wk = pw + (co * (depthwise ? 1 : Cin) + (depthwise ? 0 : ci)) * k * k;
          for (int64_t ky = 0; ky < k; ++ky) {
            const int64_t oy = iy - ky + pad;
            if (oy < 0 || oy >= H) continue;
            for (int64_t kx = 0; kx < k; ++kx) {
              const int64_t ox = ix - kx + pad;
              if (ox < 0 || ox >= W) continue;
              acc += gimg[oy * W + ox] * wk[ky * k + kx];
            }
          }
        }
        dimg[iy * W + ix] = acc;
      }
  }
  return dx;
}

template <class T>
inline Tensor<T> conv2d_bwd_weight(const Tensor<T>& g, const Tensor<T>& x, const Shape& wshape,
                                   bool depthwise) {
  const int64_t B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  const int64_t Cout = wshape[0], k = wshape[2];
  const int64_t pad = (k - 1) / 2;
  Tensor<T> dw(wshape);
  const T* pg = g.data();
  const T* px = x.data();
  T* pd = dw.data();
  const int64_t wc = wshape[1];
#pragma omp parallel for schedule(static)
  for (int64_t co = 0; co < Cout; ++co) {
    for (int64_t wci = 0; wci < wc; ++wci) {
      const int64_t ci = depthwise ? co : wci;
      T* wk = pd + (co * wc + wci) * k * k;
      for (int64_t ky = 0; ky < k; ++ky)
        for (int64_t kx = 0; kx < k; ++kx) {
          T acc = 0;
          for (int64_t b = 0; b < B; ++b) {
            const T* gimg = pg + (b * Cout + co) * H * W;
            const T* ximg = px + (b * Cin + ci) * H * W;
            const int64_t oy_lo = std::max<int64_t>(0, pad - ky);
            const int64_t oy_hi = std::min<int64_t>(H, H + pad - ky);
            for (int64_t oy = oy_lo; oy < oy_hi; ++oy) {
              const int64_t iy = oy + ky - pad;
              const int64_t ox_lo = std::max<int64_t>(0, pad - kx);
              const int64_t ox_hi = std::min<int64_t>(W, W + pad - kx);
              for (int64_t ox = ox_lo; ox < ox_hi; ++ox)
                acc += gimg[oy * W + ox] * ximg[iy * W + ox + kx - pad];
            }
          }
          wk[ky * k + kx] = acc;
        }
    }
  }
  return dw;
}

// ------------------------------------------------------------------ gather

template <class T>
inline Tensor<T> gather_rows_raw(const Tensor<T>& a, const std::vector<int64_t>& idx) {
  const int64_t c = a.dim(1);
  Tensor<T> out({int64_t(idx.size()), c});
  for (size_t i = 0; i < idx.size(); ++i)
    std::memcpy(out.data() + int64_t(i) * c, a.data() + idx[i] * c, size_t(c) * sizeof(T));
  return out;
}

template <class T>
inline Tensor<T> scatter_rows_add_raw(const Tensor<T>& g, const std::vector<int64_t>& idx,
                                      int64_t rows) {
  const int64_t c = g.dim(1);
  Tensor<T> out({rows, c});
  for (size_t i = 0; i < idx.size(); ++i) {
    T* dst = out.data() + idx[i] * c;
    const T* src = g.data() + int64_t(i) * c;
    for (int64_t j = 0; j < c; ++j) dst[j] += src[j];
  }
  return out;
}

}  // namespace scotlab::detail
