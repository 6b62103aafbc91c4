#pragma once

#include "scotlab/data/container.hpp"

namespace scotlab {

// Allen-Cahn u_t = Lap(u) - eps^2 u (u^2 - 1), periodic boundaries,
// explicit RK2 (Heun) with a step bounded by both the diffusion and the
// stiff reaction scale.
struct AllenCahnConfig {
  int64_t n = 64;
  double t_final = 2e-4;
  int64_t snapshots = 11;
  double eps = 220.0;
  double blowup_limit = 10.0;
};

class AllenCahn {
 public:
  explicit AllenCahn(const AllenCahnConfig& cfg) : cfg_(cfg) {}

  Trajectory simulate(const std::vector<double>& u0) {
    const int64_t n = cfg_.n;
    const double h2 = 1.0 / (double(n) * double(n));
    const double dt_diff = h2 / 4.0;
    const double dt_react = 0.4 / (cfg_.eps * cfg_.eps);
    const double snap_dt = cfg_.t_final / double(cfg_.snapshots - 1);
    const int64_t steps_per_snap =
        int64_t(std::ceil(snap_dt / std::min(dt_diff, dt_react)));
    const double dt = snap_dt / double(steps_per_snap);

    Trajectory traj;
    traj.n = n;
    traj.pde = "ace";
    traj.channels = {"u"};
    for (int64_t s = 0; s < cfg_.snapshots; ++s) traj.times.push_back(snap_dt * double(s));
    traj.allocate();

    std::vector<double> u = u0, k1(size_t(n * n)), mid(size_t(n * n)), k2(size_t(n * n));
    std::copy(u.begin(), u.end(), traj.field(0, 0));
    for (int64_t s = 1; s < cfg_.snapshots; ++s) {
      for (int64_t step = 0; step < steps_per_snap; ++step) {
        rhs(u, k1);
        for (int64_t i = 0; i < n * n; ++i) mid[size_t(i)] = u[size_t(i)] + dt * k1[size_t(i)];
        rhs(mid, k2);
        for (int64_t i = 0; i < n * n; ++i)
          u[size_t(i)] += 0.5 * dt * (k1[size_t(i)] + k2[size_t(i)]);
      }
      for (double v : u)
        if (std::abs(v) > cfg_.blowup_limit)
          throw ValueError("allen-cahn blow-up: |u| exceeded " +
                           std::to_string(cfg_.blowup_limit));
      std::copy(u.begin(), u.end(), traj.field(s, 0));
    }
    return traj;
  }

 private:
  void rhs(const std::vector<double>& u, std::vector<double>& out) const {
    const int64_t n = cfg_.n;
    const double ih2 = double(n) * double(n);
    const double e2 = cfg_.eps * cfg_.eps;
    for (int64_t y = 0; y < n; ++y)
      for (int64_t x = 0; x < n; ++x) {
        const int64_t i = y * n + x;
        const double lap = ih2 * (u[size_t(y * n + (x + 1) % n)] +
                                  u[size_t(y * n + (x + n - 1) % n)] +
                                  u[size_t(((y + 1) % n) * n + x)] +
                                  u[size_t(((y + n - 1) % n) * n + x)] - 4.0 * u[size_t(i)]);
        const double uv = u[size_t(i)];
        out[size_t(i)] = lap - e2 * uv * (uv * uv - 1.0);
      }
  }

  AllenCahnConfig cfg_;
};

}  // namespace scotlab
