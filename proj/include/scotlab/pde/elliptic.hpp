#pragma once

#include <lapacke.h>

#include "scotlab/pde/grid.hpp"

namespace scotlab {

// -Lap(u) = f on (0,1)^2, homogeneous Dirichlet, 5-point stencil on the
// N^2 interior nodes (spacing 1/(N+1)), conjugate gradient.
struct PoissonResult {
  std::vector<double> u;
  int64_t iterations = 0;
  double residual = 0;
};

inline PoissonResult poisson_solve(const std::vector<double>& f, const Grid& grid,
                                   double tol = 1e-10, int64_t max_iters = 100000) {
  if (grid.boundary != Boundary::Dirichlet)
    throw ValueError("poisson_solve expects a Dirichlet grid");
  const int64_t n = grid.n;
  const double h = 1.0 / double(n + 1);
  const double ih2 = 1.0 / (h * h);
  const int64_t m = n * n;

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (int64_t y = 0; y < n; ++y)
      for (int64_t xx = 0; xx < n; ++xx) {
        const int64_t i = y * n + xx;
        double acc = 4.0 * x[size_t(i)];
        if (xx > 0) acc -= x[size_t(i - 1)];
        if (xx + 1 < n) acc -= x[size_t(i + 1)];
        if (y > 0) acc -= x[size_t(i - n)];
        if (y + 1 < n) acc -= x[size_t(i + n)];
        out[size_t(i)] = acc * ih2;
      }
  };

  auto dot = [m](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (int64_t i = 0; i < m; ++i) s += a[size_t(i)] * b[size_t(i)];
    return s;
  };

  PoissonResult res;
  res.u.assign(size_t(m), 0.0);
  std::vector<double> r = f, p = f, ap(size_t(m), 0.0);
  const double fnorm = std::sqrt(dot(f, f));
  if (fnorm == 0.0) return res;  // f = 0 -> u = 0
  double rr = dot(r, r);
  for (int64_t it = 0; it < max_iters; ++it) {
    apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (int64_t i = 0; i < m; ++i) {
      res.u[size_t(i)] += alpha * p[size_t(i)];
      r[size_t(i)] -= alpha * ap[size_t(i)];
    }
    const double rr_new = dot(r, r);
    res.iterations = it + 1;
    res.residual = std::sqrt(rr_new) / fnorm;
    if (res.residual < tol) return res;
    const double beta = rr_new / rr;
    for (int64_t i = 0; i < m; ++i) p[size_t(i)] = r[size_t(i)] + beta * p[size_t(i)];
    rr = rr_new;
  }
  throw ValueError("poisson CG did not reach tol " + std::to_string(tol) + " in " +
                   std::to_string(max_iters) + " iterations (residual " +
                   std::to_string(res.residual) + ")");
}

// -Lap(u) - omega^2 a(x,y) u = 0 with u = b on the boundary; possibly
// indefinite, solved by banded LU (LAPACK dgbsv).
struct HelmholtzResult {
  std::vector<double> u;
  double residual = 0;
};

inline HelmholtzResult helmholtz_solve(const std::vector<double>& a, double b, const Grid& grid,
                                       double omega = 5.0 * M_PI / 2.0) {
  if (grid.boundary != Boundary::Dirichlet)
    throw ValueError("helmholtz_solve expects a Dirichlet grid");
  const int64_t n = grid.n;
  const int64_t m = n * n;
  const double h = 1.0 / double(n + 1);
  const double ih2 = 1.0 / (h * h);
  const int64_t kl = n, ku = n;

  // LAPACK band storage: AB(kl+ku+1+i-j, j) = A(i,j), column-major with
  // leading dimension 2*kl+ku+1 (extra kl rows for pivoting)
  const int64_t ldab = 2 * kl + ku + 1;
  std::vector<double> ab(size_t(ldab * m), 0.0);
  auto at = [&](int64_t i, int64_t j) -> double& {
    return ab[size_t(j * ldab + (kl + ku + i - j))];
  };
  std::vector<double> rhs(size_t(m), 0.0);

  for (int64_t y = 0; y < n; ++y)
    for (int64_t x = 0; x < n; ++x) {
      const int64_t i = y * n + x;
      at(i, i) = 4.0 * ih2 - omega * omega * a[size_t(i)];
      if (x > 0) at(i, i - 1) = -ih2; else rhs[size_t(i)] += b * ih2;
      if (x + 1 < n) at(i, i + 1) = -ih2; else rhs[size_t(i)] += b * ih2;
      if (y > 0) at(i, i - n) = -ih2; else rhs[size_t(i)] += b * ih2;
      if (y + 1 < n) at(i, i + n) = -ih2; else rhs[size_t(i)] += b * ih2;
    }

  std::vector<double> ab_factor = ab;  // keep the matrix for the residual
  std::vector<double> u = rhs;
  std::vector<lapack_int> ipiv(size_t(m), 0);
  const lapack_int info =
      LAPACKE_dgbsv(LAPACK_COL_MAJOR, lapack_int(m), lapack_int(kl), lapack_int(ku), 1,
                    ab_factor.data(), lapack_int(ldab), ipiv.data(), u.data(), lapack_int(m));
  if (info != 0)
    throw ValueError("helmholtz band solve failed (resonant/singular system, info = " +
                     std::to_string(info) + ")");

  // residual ||A u - rhs|| / ||rhs||
  double rnorm = 0, bnorm = 0;
  for (int64_t i = 0; i < m; ++i) {
    double acc = 0;
    for (int64_t j = std::max<int64_t>(0, i - kl); j <= std::min(m - 1, i + ku); ++j) {
      const double av = ab[size_t(j * ldab + (kl + ku + i - j))];
      acc += av * u[size_t(j)];
    }
    const double r = acc - rhs[size_t(i)];
    rnorm += r * r;
    bnorm += rhs[size_t(i)] * rhs[size_t(i)];
  }
  HelmholtzResult res;
  res.u = std::move(u);
  res.residual = std::sqrt(rnorm) / std::max(std::sqrt(bnorm), 1e-300);
  return res;
}

}  // namespace scotlab
