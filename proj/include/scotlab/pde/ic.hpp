#pragma once

#include "scotlab/pde/grid.hpp"
#include "scotlab/pde/fft2.hpp"
#include "scotlab/rng.hpp"

namespace scotlab::ic {

// All samplers draw from one counter-based stream per trajectory, so a
// fixed (kind, params, seed) reproduces the same fields bitwise.

struct VelocityIC {
  std::vector<double> u, v;
};

struct EulerIC {
  std::vector<double> rho, vx, vy, p;
};

inline double px(int64_t i, int64_t n) { return double(i) / double(n); }

// --- Navier-Stokes -------------------------------------------------------

// linear combination of sines/cosines, p = 10 modes
inline VelocityIC ns_sines(int64_t n, CounterRng& rng) {
  const int64_t p = 10;
  std::vector<double> alpha, beta, gamma;
  for (int64_t i = 0; i < p * p; ++i) {
    alpha.push_back(rng.uniform(-1, 1));
    beta.push_back(rng.uniform(0, 2 * M_PI));
    gamma.push_back(rng.uniform(0, 2 * M_PI));
  }
  VelocityIC out;
  out.u.assign(size_t(n * n), 0.0);
  out.v.assign(size_t(n * n), 0.0);
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      double ux = 0, uy = 0;
      for (int64_t i = 1; i <= p; ++i)
        for (int64_t j = 1; j <= p; ++j) {
          const size_t m = size_t((i - 1) * p + (j - 1));
          const double amp = alpha[m] / std::sqrt(2 * M_PI * double(i + j));
          ux += amp * std::sin(2 * M_PI * i * x + beta[m]) * std::sin(2 * M_PI * j * y + gamma[m]);
          uy += amp * std::cos(2 * M_PI * i * x + beta[m]) * std::cos(2 * M_PI * j * y + gamma[m]);
        }
      out.u[size_t(iy * n + ix)] = ux;
      out.v[size_t(iy * n + ix)] = uy;
    }
  return out;
}

// superposition of 100 Gaussians in vorticity, summed over the 3x3
// periodic images so the field is smooth on the torus
inline std::vector<double> gaussian_vorticity(int64_t n, CounterRng& rng, int64_t count = 100) {
  std::vector<double> amp, sig, cx, cy;
  for (int64_t i = 0; i < count; ++i) {
    amp.push_back(rng.uniform(-1, 1));
    sig.push_back(rng.uniform(0.01, 0.1));
    cx.push_back(rng.uniform(0, 1));
    cy.push_back(rng.uniform(0, 1));
  }
  std::vector<double> w(size_t(n * n), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      double acc = 0;
      for (int64_t g = 0; g < count; ++g) {
        const double s2 = 2.0 * sig[size_t(g)] * sig[size_t(g)];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const double ddx = x - (cx[size_t(g)] + dx);
            const double ddy = y - (cy[size_t(g)] + dy);
            acc += amp[size_t(g)] / sig[size_t(g)] * std::exp(-(ddx * ddx + ddy * ddy) / s2);
          }
      }
      w[size_t(iy * n + ix)] = acc;
    }
  return w;
}

// vorticity constant on a p x p partition of the square, p = 10
inline std::vector<double> pwc_vorticity(int64_t n, CounterRng& rng, int64_t p = 10) {
  std::vector<double> c;
  for (int64_t i = 0; i < p * p; ++i) c.push_back(rng.uniform(-1, 1));
  std::vector<double> w(size_t(n * n));
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const int64_t bi = std::min(p - 1, int64_t(px(ix, n) * double(p)));
      const int64_t bj = std::min(p - 1, int64_t(px(iy, n) * double(p)));
      w[size_t(iy * n + ix)] = c[size_t(bj * p + bi)];
    }
  return w;
}

// Brownian-bridge-like velocity drawn directly in Fourier space with a
// |k|^{-3/2} spectrum (to be spun up through the solver before use)
inline VelocityIC brownian_bridge(int64_t n, CounterRng& rng) {
  Fft2 fft(n);
  const int64_t nk = fft.nk();
  VelocityIC out;
  for (int comp = 0; comp < 2; ++comp) {
    std::vector<std::complex<double>> spec(size_t(fft.spec_size()), 0.0);
    const int64_t kmax = n / 3;
    for (int64_t iy = 0; iy < n; ++iy)
      for (int64_t ix = 0; ix < nk; ++ix) {
        const int64_t kx = fft.kx(ix), ky = fft.ky(iy);
        if (kx == 0 && ky == 0) continue;
        if (std::abs(kx) > kmax || std::abs(ky) > kmax) continue;
        const double decay = std::pow(double(kx * kx + ky * ky), -0.75);
        spec[size_t(iy * nk + ix)] =
            std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1)) * decay;
      }
    std::vector<double> field(size_t(n * n));
    fft.backward(spec.data(), field.data());
    if (comp == 0) out.u = std::move(field); else out.v = std::move(field);
  }
  return out;
}

// perturbed double shear layer
inline VelocityIC shear_layer(int64_t n, CounterRng& rng) {
  const int64_t p = rng.uniform_int(7, 12);
  std::vector<double> a, b;
  for (int64_t k = 0; k < p; ++k) {
    a.push_back(rng.uniform(0, 1));
    b.push_back(rng.uniform(0, 2 * M_PI));
  }
  const double delta = 0.025;
  const double rho = rng.uniform(0.08, 0.12);
  const double xi = rng.uniform(-0.0625, 0.0625);
  VelocityIC out;
  out.u.assign(size_t(n * n), 0.0);
  out.v.assign(size_t(n * n), 0.0);
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      double sigma = xi;
      for (int64_t k = 1; k <= p; ++k)
        sigma += delta * a[size_t(k - 1)] * std::sin(2 * M_PI * k * x - b[size_t(k - 1)]);
      const double arg = (y + sigma <= 0.5) ? 2 * M_PI * (y - 0.25) / rho
                                            : 2 * M_PI * (0.75 - y) / rho;
      out.u[size_t(iy * n + ix)] = std::tanh(arg);
    }
  return out;
}

// sinusoidal vortex sheet: mollified line delta on a perturbed curve
inline std::vector<double> vortex_sheet_vorticity(int64_t n, CounterRng& rng) {
  const int64_t p = 10;
  std::vector<double> alpha, beta;
  for (int64_t i = 0; i < p; ++i) {
    alpha.push_back(rng.uniform(0, 0.003125));
    beta.push_back(rng.uniform(0, 1));
  }
  const double rho = 5.0 / 128.0;
  auto curve_y = [&](double x) {
    double y = 0.5 + 0.2 * std::sin(2 * M_PI * x);
    for (int64_t i = 0; i < p; ++i)
      y += alpha[size_t(i)] * std::sin(2 * M_PI * (x + beta[size_t(i)]));
    return y;
  };
  // quartic B-spline-like bump, support r < 1
  auto psi = [](double r) {
    auto cube = [](double v) { return v > 0 ? v * v * v : 0.0; };
    return 80.0 / (7.0 * M_PI) *
           (cube(r + 1) - 4 * cube(r + 0.5) + 6 * cube(r) - 4 * cube(r - 0.5) + cube(r - 1));
  };
  const int64_t samples = 4 * n;
  const double ds = 1.0 / double(samples);
  std::vector<double> gx(size_t(samples), 0.0), gy(size_t(samples), 0.0), glen(size_t(samples), 0.0);
  for (int64_t s = 0; s < samples; ++s) {
    const double x = double(s) * ds;
    gx[size_t(s)] = x;
    gy[size_t(s)] = curve_y(x);
    const double yp = (curve_y(x + 1e-6) - curve_y(x - 1e-6)) / 2e-6;
    glen[size_t(s)] = std::sqrt(1.0 + yp * yp) * ds;
  }
  std::vector<double> w(size_t(n * n), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      double acc = 0;
      for (int64_t s = 0; s < samples; ++s) {
        double dx = std::abs(x - gx[size_t(s)]);
        dx = std::min(dx, 1.0 - dx);
        double dy = std::abs(y - gy[size_t(s)]);
        dy = std::min(dy, 1.0 - dy);
        const double r = std::sqrt(dx * dx + dy * dy) / rho;
        if (r < 1.0) acc += psi(r) / (rho * rho) * glen[size_t(s)];
      }
      w[size_t(iy * n + ix)] = acc;
    }
  return w;
}

// tracer blob: indicator of the ball of radius 1/4 at the center
inline std::vector<double> tracer_ball(int64_t n) {
  std::vector<double> c(size_t(n * n));
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double dx = px(ix, n) - 0.5, dy = px(iy, n) - 0.5;
      c[size_t(iy * n + ix)] = (dx * dx + dy * dy < 0.0625) ? 1.0 : 0.0;
    }
  return c;
}

// --- compressible Euler --------------------------------------------------

// 4-quadrant Riemann problem
inline EulerIC ce_rp(int64_t n, CounterRng& rng) {
  std::array<std::array<double, 4>, 4> q;  // [quadrant][rho,vx,vy,p]
  for (auto& s : q) {
    s[0] = rng.uniform(0.1, 1.0);
    s[1] = rng.uniform(-1.0, 1.0);
    s[2] = rng.uniform(-1.0, 1.0);
    s[3] = rng.uniform(0.1, 1.0);
  }
  EulerIC out;
  out.rho.resize(size_t(n * n));
  out.vx.resize(size_t(n * n));
  out.vy.resize(size_t(n * n));
  out.p.resize(size_t(n * n));
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const int64_t quad = (px(ix, n) < 0.5 ? 0 : 1) + (px(iy, n) < 0.5 ? 0 : 2);
      const int64_t i = iy * n + ix;
      out.rho[size_t(i)] = q[size_t(quad)][0];
      out.vx[size_t(i)] = q[size_t(quad)][1];
      out.vy[size_t(i)] = q[size_t(quad)][2];
      out.p[size_t(i)] = q[size_t(quad)][3];
    }
  return out;
}

namespace detail {

// curved multi-partition Riemann construction shared by CE-CRP / CE-RPUI
inline EulerIC curved_partition(int64_t n, CounterRng& rng, int64_t p, double alpha_range,
                                double freq_shift, double rho_lo, double rho_hi, double v_range,
                                double p_lo, double p_hi) {
  const int64_t cells = p + 1;
  std::vector<double> ax, bx, ay, by;
  for (int64_t i = 0; i < p * p; ++i) {
    ax.push_back(rng.uniform(-alpha_range, alpha_range));
    bx.push_back(rng.uniform(0, 1));
  }
  for (int64_t i = 0; i < p * p; ++i) {
    ay.push_back(rng.uniform(-alpha_range, alpha_range));
    by.push_back(rng.uniform(0, 1));
  }
  std::vector<std::array<double, 4>> states;
  for (int64_t i = 0; i < cells * cells; ++i)
    states.push_back({rng.uniform(rho_lo, rho_hi), rng.uniform(-v_range, v_range),
                      rng.uniform(-v_range, v_range), rng.uniform(p_lo, p_hi)});

  auto sigma = [&](const std::vector<double>& a, const std::vector<double>& b, double x,
                   double y) {
    double s = 0;
    for (int64_t i = 1; i <= p; ++i)
      for (int64_t j = 1; j <= p; ++j) {
        const size_t m = size_t((i - 1) * p + (j - 1));
        s += a[m] * std::sin(2 * M_PI * (double(i) + freq_shift) * x +
                             (double(j) + freq_shift) * y + b[m]);
      }
    return s;
  };
  auto frac = [](double v) { return v - std::floor(v); };

  EulerIC out;
  out.rho.resize(size_t(n * n));
  out.vx.resize(size_t(n * n));
  out.vy.resize(size_t(n * n));
  out.p.resize(size_t(n * n));
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      const double wx = frac(x + sigma(ax, bx, x, y) + 1.0);
      const double wy = frac(y + sigma(ay, by, x, y) + 1.0);
      const int64_t ci = std::min(cells - 1, int64_t(wx * double(cells)));
      const int64_t cj = std::min(cells - 1, int64_t(wy * double(cells)));
      const auto& s = states[size_t(cj * cells + ci)];
      const int64_t i = iy * n + ix;
      out.rho[size_t(i)] = s[0];
      out.vx[size_t(i)] = s[1];
      out.vy[size_t(i)] = s[2];
      out.p[size_t(i)] = s[3];
    }
  return out;
}

}  // namespace detail

// curved multi-partitioned Riemann problem (3x3 cells)
inline EulerIC ce_crp(int64_t n, CounterRng& rng) {
  return detail::curved_partition(n, rng, /*p=*/2, /*alpha=*/0.1, /*freq_shift=*/0.0, 0.1, 1.0,
                                  1.0, 0.1, 1.0);
}

// Riemann problem with uncertain interfaces (2x2 quadrants, wavy edges)
inline EulerIC ce_rpui(int64_t n, CounterRng& rng) {
  const int64_t p = 1;
  return detail::curved_partition(n, rng, p, /*alpha=*/0.01,
                                  /*freq_shift=*/double(2 * p * p), 1.0, 3.0, 10.0, 5.0, 7.0);
}

// Kelvin-Helmholtz shear strip with perturbed interfaces
inline EulerIC ce_kh(int64_t n, CounterRng& rng) {
  const int64_t p = 10;
  const double eps = 0.05;
  std::array<std::vector<double>, 2> a, b;
  std::array<double, 2> asum{0, 0};
  for (int s = 0; s < 2; ++s)
    for (int64_t j = 0; j < p; ++j) {
      a[size_t(s)].push_back(rng.uniform(0, 1));
      b[size_t(s)].push_back(rng.uniform(0, 1));
      asum[size_t(s)] += a[size_t(s)].back();
    }
  auto sigma = [&](int s, double x) {
    double acc = 0;
    for (int64_t j = 1; j <= p; ++j)
      acc += a[size_t(s)][size_t(j - 1)] *
             std::cos(2 * M_PI * double(j) * (x + b[size_t(s)][size_t(j - 1)]));
    return eps / asum[size_t(s)] * acc;
  };
  EulerIC out;
  out.rho.resize(size_t(n * n));
  out.vx.resize(size_t(n * n));
  out.vy.assign(size_t(n * n), 0.0);
  out.p.assign(size_t(n * n), 2.5);
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      const bool outer = y < 0.25 + sigma(0, x) || y > 0.75 + sigma(1, x);
      const int64_t i = iy * n + ix;
      out.rho[size_t(i)] = outer ? 1.0 : 2.0;
      out.vx[size_t(i)] = outer ? 0.5 : -0.5;
    }
  return out;
}

// --- wave / ACE / elliptic -----------------------------------------------

struct WaveIC {
  std::vector<double> u;      // initial displacement
  std::vector<double> speed;  // c(x,y), normalized by speed_scale
};

// sum of 2..6 unit Gaussians over a smooth 4-bump speed field
inline WaveIC wave_gauss(int64_t n, CounterRng& rng, double speed_scale = 5000.0) {
  const int64_t count = rng.uniform_int(2, 6);
  std::vector<double> cx, cy, sd;
  for (int64_t i = 0; i < count; ++i) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double x = rng.uniform(1.0 / 6.0, 5.0 / 6.0);
      const double y = rng.uniform(1.0 / 6.0, 5.0 / 6.0);
      const double s = rng.uniform(0.039, 0.156);
      bool ok = true;
      for (size_t j = 0; j < cx.size(); ++j) {
        const double d = std::hypot(x - cx[j], y - cy[j]);
        if (d < 2.0 * std::max(s, sd[j])) ok = false;
      }
      if (ok) {
        cx.push_back(x);
        cy.push_back(y);
        sd.push_back(s);
        break;
      }
    }
    if (int64_t(cx.size()) != i + 1) {  // give up on separation, accept last draw
      cx.push_back(rng.uniform(1.0 / 6.0, 5.0 / 6.0));
      cy.push_back(rng.uniform(1.0 / 6.0, 5.0 / 6.0));
      sd.push_back(rng.uniform(0.039, 0.156));
    }
  }
  const double c0 = rng.uniform(1500, 2500);
  std::array<double, 4> bx{0.25, 0.25, 0.75, 0.75}, by{0.25, 0.75, 0.25, 0.75};
  std::array<double, 4> amp, bsig, dx, dy;
  for (int i = 0; i < 4; ++i) {
    dx[size_t(i)] = rng.uniform(-0.3125, 0.3125);
    dy[size_t(i)] = rng.uniform(-0.3125, 0.3125);
    amp[size_t(i)] = rng.uniform(1000, 2500);
    bsig[size_t(i)] = rng.uniform(1.0 / 12.0, 1.0 / 6.0);
  }
  WaveIC out;
  out.u.assign(size_t(n * n), 0.0);
  out.speed.assign(size_t(n * n), 0.0);
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      double u = 0;
      for (size_t g = 0; g < cx.size(); ++g)
        u += std::exp(-((x - cx[g]) * (x - cx[g]) + (y - cy[g]) * (y - cy[g])) /
                      (2 * sd[g] * sd[g]));
      double c = c0;
      for (int g = 0; g < 4; ++g)
        c += amp[size_t(g)] *
             std::exp(-((x - bx[size_t(g)] - dx[size_t(g)]) * (x - bx[size_t(g)] - dx[size_t(g)]) +
                        (y - by[size_t(g)] - dy[size_t(g)]) * (y - by[size_t(g)] - dy[size_t(g)])) /
                      (2 * bsig[size_t(g)] * bsig[size_t(g)]));
      out.u[size_t(iy * n + ix)] = u;
      out.speed[size_t(iy * n + ix)] = c / speed_scale;
    }
  return out;
}

// layered medium: 3..6 horizontal layers with wavy frontiers
inline WaveIC wave_layer(int64_t n, CounterRng& rng, double speed_scale = 5000.0) {
  const int64_t layers = rng.uniform_int(3, 6);
  // frontier i at i/n + bounded perturbation so frontiers cannot cross
  std::vector<std::vector<double>> coef(size_t(layers + 1));
  std::vector<double> shift(size_t(layers + 1), 0.0);
  for (int64_t i = 2; i <= layers; ++i) {
    shift[size_t(i)] = rng.uniform(0, 1);
    for (int64_t k = 0; k < 10; ++k) coef[size_t(i)].push_back(rng.uniform(0, 1));
  }
  std::vector<double> speeds;
  for (int64_t i = 0; i < layers; ++i) speeds.push_back(rng.uniform(2000, 5000));

  const double harmonic = 2.9289682539682538;  // sum 1/k, k=1..10
  auto frontier = [&](int64_t i, double x) {
    if (i <= 1) return 0.0;
    if (i > layers) return 1.0;
    double s = 0;
    for (int64_t k = 1; k <= 10; ++k)
      s += coef[size_t(i)][size_t(k - 1)] / double(k) * std::sin(2 * M_PI * k * x);
    const double margin = 0.25 / double(layers);
    return double(i - 1) / double(layers) + margin * (2 * shift[size_t(i)] - 1) +
           margin * s / harmonic;
  };

  WaveIC out = wave_gauss(n, rng, speed_scale);  // reuse the source sampler for u0
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      int64_t layer = layers - 1;
      for (int64_t i = 1; i <= layers; ++i)
        if (y >= frontier(i, x) && y < frontier(i + 1, x)) {
          layer = i - 1;
          break;
        }
      out.speed[size_t(iy * n + ix)] = speeds[size_t(layer)] / speed_scale;
    }
  return out;
}

// sine series with random spectral decay, scaled into [-1, 1]
inline std::vector<double> ace_modes(int64_t n, CounterRng& rng) {
  const int64_t K = rng.uniform_int(16, 32);
  const double r = rng.uniform(0.7, 1.0);
  std::vector<double> a;
  for (int64_t i = 0; i < K * K; ++i) a.push_back(rng.uniform(-1, 1));
  std::vector<double> u(size_t(n * n), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = px(ix, n), y = px(iy, n);
      double acc = 0;
      for (int64_t i = 1; i <= K; ++i)
        for (int64_t j = 1; j <= K; ++j)
          acc += a[size_t((i - 1) * K + (j - 1))] * std::pow(double(i * i + j * j), -r) *
                 std::sin(M_PI * i * x) * std::sin(M_PI * j * y);
      u[size_t(iy * n + ix)] = acc / double(K * K);
    }
  double umax = 0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  if (umax > 0)
    for (double& v : u) v /= umax;
  return u;
}

// Gaussian-mixture source on the Dirichlet grid, N ~ Geom(0.4)
inline std::vector<double> poisson_gauss_source(const Grid& grid, CounterRng& rng) {
  const int64_t count = rng.geometric(0.4);
  std::vector<double> cx, cy, sig;
  for (int64_t i = 0; i < count; ++i) {
    cx.push_back(rng.uniform(0, 1));
    cy.push_back(rng.uniform(0, 1));
    sig.push_back(rng.uniform(0.025, 0.1));
  }
  const int64_t n = grid.n;
  std::vector<double> f(size_t(n * n));
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = grid.coord(ix), y = grid.coord(iy);
      double acc = 0;
      for (int64_t g = 0; g < count; ++g)
        acc += std::exp(-((x - cx[size_t(g)]) * (x - cx[size_t(g)]) +
                          (y - cy[size_t(g)]) * (y - cy[size_t(g)])) /
                        (2 * sig[size_t(g)] * sig[size_t(g)]));
      f[size_t(iy * n + ix)] = acc;
    }
  return f;
}

struct HelmholtzIC {
  std::vector<double> a;  // medium in [0, 1]
  double b = 0;           // boundary value
};

inline HelmholtzIC helmholtz_gauss(const Grid& grid, CounterRng& rng) {
  const int64_t count = rng.uniform_int(2, 7);
  std::vector<double> amp, cx, cy, sig;
  for (int64_t i = 0; i < count; ++i) {
    amp.push_back(rng.uniform(0.5, 10.0));
    sig.push_back(rng.uniform(0.05, 0.1));
    cx.push_back(rng.uniform(0.2, 0.8));
    cy.push_back(rng.uniform(0.2, 0.8));
  }
  const int64_t n = grid.n;
  HelmholtzIC out;
  out.a.resize(size_t(n * n));
  double lo = 1e300, hi = -1e300;
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix) {
      const double x = grid.coord(ix), y = grid.coord(iy);
      double acc = 0;
      for (int64_t g = 0; g < count; ++g)
        acc -= amp[size_t(g)] * std::exp(-((x - cx[size_t(g)]) * (x - cx[size_t(g)]) +
                                           (y - cy[size_t(g)]) * (y - cy[size_t(g)])) /
                                         (2 * sig[size_t(g)] * sig[size_t(g)]));
      out.a[size_t(iy * n + ix)] = acc;
      lo = std::min(lo, acc);
      hi = std::max(hi, acc);
    }
  const double span = hi - lo;
  for (double& v : out.a) v = span > 0 ? (v - lo) / span : 0.0;
  out.b = rng.uniform(0.25, 0.5);
  return out;
}

inline const std::vector<std::string>& all_kinds() {
  static const std::vector<std::string> kinds{
      "ns-sines", "ns-gauss",  "ns-pwc", "ns-bb",   "ns-sl",
      "ns-svs",   "ce-rp",     "ce-crp", "ce-kh",   "ce-gauss",
      "ce-rpui",  "wave-gauss-source",   "wave-layer", "ace-modes",
      "poisson-gauss", "helmholtz-gauss"};
  return kinds;
}

}  // namespace scotlab::ic
