#pragma once

#include "scotlab/data/container.hpp"

namespace scotlab {

// Wave equation u_tt = c(x,y)^2 Lap(u) as the first-order system
// (u, v = u_t), second-order central differences in space, leapfrog in
// time. Boundaries: first-order Mur absorbing, or periodic.
struct WaveConfig {
  int64_t n = 64;
  double t_final = 1.0;
  int64_t snapshots = 11;
  double cfl = 0.7;
  Boundary boundary = Boundary::Absorbing;
};

class WaveFD {
 public:
  explicit WaveFD(const WaveConfig& cfg) : cfg_(cfg) {
    if (cfg.boundary == Boundary::Dirichlet)
      throw ValueError("wave solver supports periodic or absorbing boundaries");
  }

  // u0: initial displacement; v0: initial velocity; c: propagation speed
  // (> 0, stored as a constant third channel).
  Trajectory simulate(const std::vector<double>& u0, const std::vector<double>& v0,
                      const std::vector<double>& c) {
    const int64_t n = cfg_.n;
    double cmax = 0;
    for (double cv : c) {
      if (!(cv > 0)) throw ValueError("wave speed must be positive everywhere");
      cmax = std::max(cmax, cv);
    }
    const double h = 1.0 / double(n);
    // uniform dt that divides the snapshot interval exactly (leapfrog
    // needs a fixed step)
    const double snap_dt = cfg_.t_final / double(cfg_.snapshots - 1);
    const double dt_cfl = cfg_.cfl * h / (M_SQRT2 * cmax);
    const int64_t steps_per_snap = int64_t(std::ceil(snap_dt / dt_cfl));
    const double dt = snap_dt / double(steps_per_snap);

    Trajectory traj;
    traj.n = n;
    traj.pde = "wave";
    traj.channels = {"u", "v", "c"};
    for (int64_t s = 0; s < cfg_.snapshots; ++s) traj.times.push_back(snap_dt * double(s));
    traj.allocate();

    std::vector<double> prev = u0, cur(size_t(n * n)), next(size_t(n * n));
    // first step from the initial velocity: u1 = u0 + dt v0 + dt^2/2 c^2 Lap u0
    {
      std::vector<double> lap(size_t(n * n));
      laplacian(u0, lap);
      for (int64_t i = 0; i < n * n; ++i)
        cur[size_t(i)] = u0[size_t(i)] + dt * v0[size_t(i)] +
                         0.5 * dt * dt * c[size_t(i)] * c[size_t(i)] * lap[size_t(i)];
      if (cfg_.boundary == Boundary::Absorbing) mur_update(prev, cur, c, dt);
    }

    store(traj, 0, u0, v0, c);
    double t_cur = dt;  // `cur` is the state at t_cur
    int64_t stored = 1;
    std::vector<double> lap(size_t(n * n));
    while (stored < cfg_.snapshots) {
      const double t_snap = traj.times[size_t(stored)];
      while (t_cur < t_snap - 0.5 * dt) {
        laplacian(cur, lap);
        for (int64_t i = 0; i < n * n; ++i)
          next[size_t(i)] = 2.0 * cur[size_t(i)] - prev[size_t(i)] +
                            dt * dt * c[size_t(i)] * c[size_t(i)] * lap[size_t(i)];
        if (cfg_.boundary == Boundary::Absorbing) mur_update(cur, next, c, dt);
        prev.swap(cur);
        cur.swap(next);
        t_cur += dt;
      }
      // cur is now at t_snap; velocity by central difference needs one
      // step ahead
      laplacian(cur, lap);
      for (int64_t i = 0; i < n * n; ++i)
        next[size_t(i)] = 2.0 * cur[size_t(i)] - prev[size_t(i)] +
                          dt * dt * c[size_t(i)] * c[size_t(i)] * lap[size_t(i)];
      if (cfg_.boundary == Boundary::Absorbing) mur_update(cur, next, c, dt);
      std::vector<double> vel(size_t(n * n));
      for (int64_t i = 0; i < n * n; ++i)
        vel[size_t(i)] = (next[size_t(i)] - prev[size_t(i)]) / (2.0 * dt);
      store(traj, stored, cur, vel, c);
      ++stored;
      prev.swap(cur);
      cur.swap(next);
      t_cur += dt;
    }
    return traj;
  }

  // Discrete energy 0.5 sum(v^2 + c^2 |grad u|^2) h^2 (one-sided gradient)
  double energy(const std::vector<double>& u, const std::vector<double>& v,
                const std::vector<double>& c) const {
    const int64_t n = cfg_.n;
    const double h = 1.0 / double(n);
    double e = 0;
    for (int64_t y = 0; y < n; ++y)
      for (int64_t x = 0; x < n; ++x) {
        const int64_t i = y * n + x;
        e += v[size_t(i)] * v[size_t(i)];
        const int64_t xr = x + 1 < n ? i + 1 : (cfg_.boundary == Boundary::Periodic ? y * n : i);
        const int64_t yu = y + 1 < n ? i + n : (cfg_.boundary == Boundary::Periodic ? x : i);
        const double gx = (u[size_t(xr)] - u[size_t(i)]) / h;
        const double gy = (u[size_t(yu)] - u[size_t(i)]) / h;
        e += c[size_t(i)] * c[size_t(i)] * (gx * gx + gy * gy);
      }
    return 0.5 * e * h * h;
  }

 private:
  void laplacian(const std::vector<double>& u, std::vector<double>& out) const {
    const int64_t n = cfg_.n;
    const double ih2 = double(n) * double(n);
    const bool periodic = cfg_.boundary == Boundary::Periodic;
    for (int64_t y = 0; y < n; ++y)
      for (int64_t x = 0; x < n; ++x) {
        const int64_t i = y * n + x;
        auto at = [&](int64_t yy, int64_t xx) {
          if (periodic) {
            yy = (yy + n) % n;
            xx = (xx + n) % n;
          } else {
            yy = std::clamp<int64_t>(yy, 0, n - 1);
            xx = std::clamp<int64_t>(xx, 0, n - 1);
          }
          return u[size_t(yy * n + xx)];
        };
        out[size_t(i)] =
            ih2 * (at(y, x - 1) + at(y, x + 1) + at(y - 1, x) + at(y + 1, x) - 4.0 * u[size_t(i)]);
      }
  }

  // First-order Mur: u_b^{n+1} = u_a^n + (c dt - h)/(c dt + h) (u_a^{n+1} - u_b^n)
  void mur_update(const std::vector<double>& un, std::vector<double>& unp1,
                  const std::vector<double>& c, double dt) const {
    const int64_t n = cfg_.n;
    const double h = 1.0 / double(n);
    auto coeff = [&](int64_t i) { return (c[size_t(i)] * dt - h) / (c[size_t(i)] * dt + h); };
    for (int64_t x = 0; x < n; ++x) {
      // bottom row (y=0) uses neighbor y=1; top row uses y=n-2
      int64_t b = x, a = n + x;
      unp1[size_t(b)] = un[size_t(a)] + coeff(b) * (unp1[size_t(a)] - un[size_t(b)]);
      b = (n - 1) * n + x;
      a = (n - 2) * n + x;
      unp1[size_t(b)] = un[size_t(a)] + coeff(b) * (unp1[size_t(a)] - un[size_t(b)]);
    }
    for (int64_t y = 0; y < n; ++y) {
      int64_t b = y * n, a = y * n + 1;
      unp1[size_t(b)] = un[size_t(a)] + coeff(b) * (unp1[size_t(a)] - un[size_t(b)]);
      b = y * n + n - 1;
      a = y * n + n - 2;
      unp1[size_t(b)] = un[size_t(a)] + coeff(b) * (unp1[size_t(a)] - un[size_t(b)]);
    }
  }

  void store(Trajectory& traj, int64_t s, const std::vector<double>& u,
             const std::vector<double>& v, const std::vector<double>& c) const {
    std::copy(u.begin(), u.end(), traj.field(s, 0));
    std::copy(v.begin(), v.end(), traj.field(s, 1));
    std::copy(c.begin(), c.end(), traj.field(s, 2));
  }

  WaveConfig cfg_;
};

}  // namespace scotlab
