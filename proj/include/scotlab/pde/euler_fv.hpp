#pragma once

#include <array>

#include "scotlab/data/container.hpp"

namespace scotlab {

// First-order finite-volume compressible Euler solver, dimension-by-
// dimension Rusanov (local Lax-Friedrichs) fluxes, periodic boundaries,
// ideal gas gamma = 1.4. State is conserved [rho, rho*u, rho*v, E].
struct EulerConfig {
  int64_t n = 64;
  double t_final = 1.0;
  int64_t snapshots = 11;
  double cfl = 0.4;
  double gamma = 1.4;
};

class EulerFV {
 public:
  using State = std::array<std::vector<double>, 4>;

  explicit EulerFV(const EulerConfig& cfg) : cfg_(cfg) {}

  static State from_primitive(const std::vector<double>& rho, const std::vector<double>& vx,
                              const std::vector<double>& vy, const std::vector<double>& p,
                              double gamma = 1.4) {
    State u;
    const size_t n = rho.size();
    for (auto& c : u) c.resize(n);
    for (size_t i = 0; i < n; ++i) {
      u[0][i] = rho[i];
      u[1][i] = rho[i] * vx[i];
      u[2][i] = rho[i] * vy[i];
      u[3][i] = p[i] / (gamma - 1.0) + 0.5 * rho[i] * (vx[i] * vx[i] + vy[i] * vy[i]);
    }
    return u;
  }

  // Evolves the state, storing primitive snapshots [rho, u, v, p].
  Trajectory simulate(State u) {
    const int64_t n = cfg_.n;
    check_positivity(u, 0.0);

    Trajectory traj;
    traj.n = n;
    traj.pde = "euler";
    traj.channels = {"rho", "u", "v", "p"};
    for (int64_t s = 0; s < cfg_.snapshots; ++s)
      traj.times.push_back(cfg_.t_final * double(s) / double(cfg_.snapshots - 1));
    traj.allocate();
    store(traj, 0, u);

    double t = 0;
    for (int64_t s = 1; s < cfg_.snapshots; ++s) {
      const double t_target = traj.times[size_t(s)];
      while (t < t_target - 1e-14) {
        const double dt = std::min(stable_dt(u), t_target - t);
        step(u, dt);
        t += dt;
        check_positivity(u, t);
      }
      store(traj, s, u);
    }
    return traj;
  }

  // One forward-Euler update with Rusanov fluxes in both dimensions.
  void step(State& u, double dt) {
    const int64_t n = cfg_.n;
    const double lambda = dt * double(n);  // dt / dx
    State flux_diff;
    for (auto& c : flux_diff) c.assign(size_t(n * n), 0.0);

    // x-direction: face between (i) and (i+1) in each row
    for (int64_t y = 0; y < n; ++y) {
      for (int64_t x = 0; x < n; ++x) {
        const int64_t l = y * n + x;
        const int64_t r = y * n + (x + 1) % n;
        std::array<double, 4> f = rusanov_flux(cell(u, l), cell(u, r), /*dir_x=*/true);
        for (int c = 0; c < 4; ++c) {
          flux_diff[size_t(c)][size_t(l)] += f[size_t(c)];
          flux_diff[size_t(c)][size_t(r)] -= f[size_t(c)];
        }
      }
    }
    // y-direction
    for (int64_t y = 0; y < n; ++y) {
      for (int64_t x = 0; x < n; ++x) {
        const int64_t b = y * n + x;
        const int64_t tcell = ((y + 1) % n) * n + x;
        std::array<double, 4> f = rusanov_flux(cell(u, b), cell(u, tcell), /*dir_x=*/false);
        for (int c = 0; c < 4; ++c) {
          flux_diff[size_t(c)][size_t(b)] += f[size_t(c)];
          flux_diff[size_t(c)][size_t(tcell)] -= f[size_t(c)];
        }
      }
    }
    for (int c = 0; c < 4; ++c)
      for (int64_t i = 0; i < n * n; ++i) u[size_t(c)][size_t(i)] -= lambda * flux_diff[size_t(c)][size_t(i)];
  }

  double stable_dt(const State& u) const {
    double amax = 0;
    const int64_t n = cfg_.n;
    for (int64_t i = 0; i < n * n; ++i) {
      const auto q = cell(u, i);
      const double rho = q[0], vx = q[1] / q[0], vy = q[2] / q[0];
      const double p = (cfg_.gamma - 1.0) * (q[3] - 0.5 * rho * (vx * vx + vy * vy));
      const double c = std::sqrt(cfg_.gamma * p / rho);
      amax = std::max(amax, std::abs(vx) + c + std::abs(vy) + c);
    }
    return cfg_.cfl / (double(n) * amax + 1e-300);
  }

  std::array<double, 4> conserved_totals(const State& u) const {
    std::array<double, 4> tot{0, 0, 0, 0};
    for (int c = 0; c < 4; ++c)
      for (double v : u[size_t(c)]) tot[size_t(c)] += v;
    return tot;
  }

 private:
  static std::array<double, 4> cell(const State& u, int64_t i) {
    return {u[0][size_t(i)], u[1][size_t(i)], u[2][size_t(i)], u[3][size_t(i)]};
  }

  std::array<double, 4> physical_flux(const std::array<double, 4>& q, bool dir_x) const {
    const double rho = q[0], vx = q[1] / rho, vy = q[2] / rho, E = q[3];
    const double p = (cfg_.gamma - 1.0) * (E - 0.5 * rho * (vx * vx + vy * vy));
    if (dir_x) return {rho * vx, rho * vx * vx + p, rho * vx * vy, (E + p) * vx};
    return {rho * vy, rho * vx * vy, rho * vy * vy + p, (E + p) * vy};
  }

  std::array<double, 4> rusanov_flux(const std::array<double, 4>& ql,
                                     const std::array<double, 4>& qr, bool dir_x) const {
    auto speed = [&](const std::array<double, 4>& q) {
      const double rho = q[0], vx = q[1] / rho, vy = q[2] / rho;
      const double p = (cfg_.gamma - 1.0) * (q[3] - 0.5 * rho * (vx * vx + vy * vy));
      const double c = std::sqrt(std::max(cfg_.gamma * p / rho, 0.0));
      return std::abs(dir_x ? vx : vy) + c;
    };
    const double alpha = std::max(speed(ql), speed(qr));
    const auto fl = physical_flux(ql, dir_x);
    const auto fr = physical_flux(qr, dir_x);
    std::array<double, 4> f;
    for (int c = 0; c < 4; ++c)
      f[size_t(c)] = 0.5 * (fl[size_t(c)] + fr[size_t(c)]) -
                     0.5 * alpha * (qr[size_t(c)] - ql[size_t(c)]);
    return f;
  }

  void check_positivity(const State& u, double t) const {
    const int64_t n = cfg_.n;
    for (int64_t i = 0; i < n * n; ++i) {
      const auto q = cell(u, i);
      const double rho = q[0];
      const double p =
          (cfg_.gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / rho);
      if (!(rho > 0.0) || !(p > 0.0))
        throw ValueError("euler state lost positivity at cell (" + std::to_string(i % n) + "," +
                         std::to_string(i / n) + ") t=" + std::to_string(t) +
                         " rho=" + std::to_string(rho) + " p=" + std::to_string(p));
    }
  }

  void store(Trajectory& traj, int64_t s, const State& u) const {
    const int64_t n = cfg_.n;
    for (int64_t i = 0; i < n * n; ++i) {
      const auto q = cell(u, i);
      const double rho = q[0], vx = q[1] / rho, vy = q[2] / rho;
      const double p = (cfg_.gamma - 1.0) * (q[3] - 0.5 * rho * (vx * vx + vy * vy));
      traj.field(s, 0)[i] = rho;
      traj.field(s, 1)[i] = vx;
      traj.field(s, 2)[i] = vy;
      traj.field(s, 3)[i] = p;
    }
  }

  EulerConfig cfg_;
};

}  // namespace scotlab
