#pragma once

#include <complex>

#include "scotlab/data/container.hpp"
#include "scotlab/pde/fft2.hpp"

namespace scotlab {

// Pseudo-spectral incompressible Navier-Stokes on the periodic unit
// square, stabilized by a spectral hyperviscosity eps_N * Lap(Q_N * u)
// that leaves modes |k| <= m_N untouched.
struct SpectralNSConfig {
  int64_t n = 64;
  double t_final = 1.0;
  int64_t snapshots = 11;
  double cfl = 0.5;
  double eps_factor = 0.05;  // eps_N = eps_factor / N
  double q_alpha = 4.0;      // exponent in the smooth multiplier
  double q_k0_factor = 1.0;  // k0 = factor * m_N
  double theta = 0.5;        // bound exponent in the admissibility check
  bool dealias = true;       // 2/3-rule truncation of products
  bool tracer = false;       // advect a passive scalar with kappa = eps_N
  bool forcing = false;      // steady Kolmogorov-type forcing, x-momentum
  double forcing_amp = 0.1;

  int64_t m_n() const { return int64_t(std::llround(std::sqrt(double(n)))); }
  double eps_n() const { return eps_factor / double(n); }
};

class SpectralNS {
 public:
  using Cx = std::complex<double>;

  explicit SpectralNS(const SpectralNSConfig& cfg) : cfg_(cfg), fft_(cfg.n) {
    const int64_t n = cfg_.n, nk = fft_.nk();
    kx_.resize(size_t(n * nk));
    ky_.resize(size_t(n * nk));
    k2_.resize(size_t(n * nk));
    qmul_.resize(size_t(n * nk));
    keep_.resize(size_t(n * nk));
    const int64_t kcut = cfg_.dealias ? n / 3 : n / 2;
    for (int64_t iy = 0; iy < n; ++iy)
      for (int64_t ix = 0; ix < nk; ++ix) {
        const int64_t i = iy * nk + ix;
        kx_[size_t(i)] = double(fft_.kx(ix));
        ky_[size_t(i)] = double(fft_.ky(iy));
        k2_[size_t(i)] = kx_[size_t(i)] * kx_[size_t(i)] + ky_[size_t(i)] * ky_[size_t(i)];
        qmul_[size_t(i)] = hyper_multiplier(std::sqrt(k2_[size_t(i)]));
        keep_[size_t(i)] =
            std::abs(fft_.kx(ix)) <= kcut && std::abs(fft_.ky(iy)) <= kcut ? 1.0 : 0.0;
      }
    if (cfg_.forcing) {
      std::vector<double> f(size_t(n * n));
      for (int64_t iy = 0; iy < n; ++iy)
        for (int64_t ix = 0; ix < n; ++ix)
          f[size_t(iy * n + ix)] =
              cfg_.forcing_amp * std::sin(2.0 * M_PI * (double(ix) + double(iy)) / double(n));
      fhat_.resize(size_t(spec_size()), Cx{});
      fft_.forward(f.data(), fhat_.data());
      truncate(fhat_.data());
    }
  }

  const SpectralNSConfig& config() const { return cfg_; }
  int64_t spec_size() const { return fft_.spec_size(); }

  // Q_hat(|k|): zero up to m_N, then the smooth ramp 1 - exp(-(|k|/k0)^alpha).
  double hyper_multiplier(double kmag) const {
    const double m = double(cfg_.m_n());
    if (kmag <= m) return 0.0;
    const double k0 = cfg_.q_k0_factor * m;
    return 1.0 - std::exp(-std::pow(kmag / k0, cfg_.q_alpha));
  }

  // Stream-function inversion: Lap(psi) = -omega, u = (d_y psi, -d_x psi).
  // The k=0 vorticity mode is dropped (zero-mean gauge).
  void vorticity_to_velocity(const std::vector<double>& omega, std::vector<double>& u,
                             std::vector<double>& v) {
    std::vector<Cx> what(size_t(spec_size()), Cx{}), uh(size_t(spec_size()), Cx{}), vh(size_t(spec_size()), Cx{});
    fft_.forward(omega.data(), what.data());
    const double twopi = 2.0 * M_PI;
    for (int64_t i = 0; i < spec_size(); ++i) {
      if (k2_[size_t(i)] == 0.0) {
        uh[size_t(i)] = vh[size_t(i)] = 0.0;
        continue;
      }
      const Cx psi = what[size_t(i)] / (4.0 * M_PI * M_PI * k2_[size_t(i)]);
      uh[size_t(i)] = Cx(0, twopi * ky_[size_t(i)]) * psi;
      vh[size_t(i)] = Cx(0, -twopi * kx_[size_t(i)]) * psi;
    }
    truncate(uh.data());
    truncate(vh.data());
    u.resize(size_t(cfg_.n * cfg_.n));
    v.resize(size_t(cfg_.n * cfg_.n));
    fft_.backward(uh.data(), u.data());
    fft_.backward(vh.data(), v.data());
  }

  // Evolves (u0, v0) (and optionally tracer c0) storing `snapshots`
  // uniformly spaced states in [0, t_final].
  Trajectory simulate(const std::vector<double>& u0, const std::vector<double>& v0,
                      const std::vector<double>* c0 = nullptr) {
    const int64_t n = cfg_.n;
    std::vector<Cx> uh(size_t(spec_size()), Cx{}), vh(size_t(spec_size()), Cx{}), ch;
    fft_.forward(u0.data(), uh.data());
    fft_.forward(v0.data(), vh.data());
    truncate(uh.data());
    truncate(vh.data());
    project(uh.data(), vh.data());
    if (cfg_.tracer) {
      if (!c0) throw ValueError("tracer run needs an initial concentration");
      ch.resize(size_t(spec_size()), Cx{});
      fft_.forward(c0->data(), ch.data());
      truncate(ch.data());
    }

    Trajectory traj;
    traj.n = n;
    traj.pde = cfg_.forcing ? "fns" : (cfg_.tracer ? "ns-tracer" : "ns");
    traj.channels = {"u", "v"};
    if (cfg_.tracer) traj.channels.push_back("c");
    if (cfg_.forcing) traj.channels.push_back("f");
    for (int64_t s = 0; s < cfg_.snapshots; ++s)
      traj.times.push_back(cfg_.t_final * double(s) / double(cfg_.snapshots - 1));
    traj.allocate();

    store(traj, 0, uh, vh, ch);
    double t = 0;
    for (int64_t s = 1; s < cfg_.snapshots; ++s) {
      const double t_target = traj.times[size_t(s)];
      while (t < t_target - 1e-14) {
        const double dt = std::min(stable_dt(uh, vh), t_target - t);
        rk3_step(uh, vh, ch, dt);
        t += dt;
      }
      store(traj, s, uh, vh, ch);
    }
    return traj;
  }

  // Spin-up helper (runs the system for `duration`, returns final fields).
  void run(std::vector<double>& u, std::vector<double>& v, double duration) {
    std::vector<Cx> uh(size_t(spec_size()), Cx{}), vh(size_t(spec_size()), Cx{}), ch;
    fft_.forward(u.data(), uh.data());
    fft_.forward(v.data(), vh.data());
    truncate(uh.data());
    truncate(vh.data());
    project(uh.data(), vh.data());
    double t = 0;
    while (t < duration - 1e-14) {
      const double dt = std::min(stable_dt(uh, vh), duration - t);
      rk3_step(uh, vh, ch, dt);
      t += dt;
    }
    fft_.backward(uh.data(), u.data());
    fft_.backward(vh.data(), v.data());
  }

  // max |k . u_hat(k)| over modes, for the divergence-free check
  double spectral_divergence(const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<Cx> uh(size_t(spec_size()), Cx{}), vh(size_t(spec_size()), Cx{});
    fft_.forward(u.data(), uh.data());
    fft_.forward(v.data(), vh.data());
    double worst = 0;
    for (int64_t i = 0; i < spec_size(); ++i)
      worst = std::max(worst, std::abs(kx_[size_t(i)] * uh[size_t(i)] +
                                       ky_[size_t(i)] * vh[size_t(i)]));
    return worst;
  }

  static double kinetic_energy(const std::vector<double>& u, const std::vector<double>& v) {
    double e = 0;
    for (size_t i = 0; i < u.size(); ++i) e += u[i] * u[i] + v[i] * v[i];
    return 0.5 * e / double(u.size());
  }

  void project_field(std::vector<double>& u, std::vector<double>& v) {
    std::vector<Cx> uh(size_t(spec_size()), Cx{}), vh(size_t(spec_size()), Cx{});
    fft_.forward(u.data(), uh.data());
    fft_.forward(v.data(), vh.data());
    truncate(uh.data());
    truncate(vh.data());
    project(uh.data(), vh.data());
    fft_.backward(uh.data(), u.data());
    fft_.backward(vh.data(), v.data());
  }

  double qmul_at(int64_t kx, int64_t ky) const {
    return hyper_multiplier(std::sqrt(double(kx * kx + ky * ky)));
  }

 private:
  void truncate(Cx* a) const {
    for (int64_t i = 0; i < spec_size(); ++i) a[size_t(i)] *= keep_[size_t(i)];
  }

  // Leray projection: u_hat -= k (k.u_hat)/|k|^2
  void project(Cx* uh, Cx* vh) const {
    for (int64_t i = 0; i < spec_size(); ++i) {
      const double k2 = k2_[size_t(i)];
      if (k2 == 0.0) continue;
      const Cx kd = (kx_[size_t(i)] * uh[size_t(i)] + ky_[size_t(i)] * vh[size_t(i)]) / k2;
      uh[size_t(i)] -= kx_[size_t(i)] * kd;
      vh[size_t(i)] -= ky_[size_t(i)] * kd;
    }
  }

  // d/dt u_hat = P[ (omega v, -omega u) ] - eps 4pi^2 |k|^2 Q u_hat (+ f)
  void rhs(const std::vector<Cx>& uh, const std::vector<Cx>& vh, const std::vector<Cx>& ch,
           std::vector<Cx>& du, std::vector<Cx>& dv, std::vector<Cx>& dc) {
    const int64_t n = cfg_.n;
    const double twopi = 2.0 * M_PI;
    std::vector<Cx> wh(size_t(spec_size()), Cx{});
    for (int64_t i = 0; i < spec_size(); ++i)
      wh[size_t(i)] = Cx(0, twopi) * (kx_[size_t(i)] * vh[size_t(i)] -
                                      ky_[size_t(i)] * uh[size_t(i)]);
    std::vector<double> u(size_t(n * n)), v(size_t(n * n)), w(size_t(n * n));
    fft_.backward(uh.data(), u.data());
    fft_.backward(vh.data(), v.data());
    fft_.backward(wh.data(), w.data());

    std::vector<double> ax(size_t(n * n)), ay(size_t(n * n));
    for (int64_t i = 0; i < n * n; ++i) {
      ax[size_t(i)] = w[size_t(i)] * v[size_t(i)];
      ay[size_t(i)] = -w[size_t(i)] * u[size_t(i)];
    }
    du.resize(size_t(spec_size()), Cx{});
    dv.resize(size_t(spec_size()), Cx{});
    fft_.forward(ax.data(), du.data());
    fft_.forward(ay.data(), dv.data());
    truncate(du.data());
    truncate(dv.data());
    project(du.data(), dv.data());

    const double visc = cfg_.eps_n() * 4.0 * M_PI * M_PI;
    for (int64_t i = 0; i < spec_size(); ++i) {
      const double damp = visc * k2_[size_t(i)] * qmul_[size_t(i)];
      du[size_t(i)] -= damp * uh[size_t(i)];
      dv[size_t(i)] -= damp * vh[size_t(i)];
    }
    if (cfg_.forcing)
      for (int64_t i = 0; i < spec_size(); ++i) du[size_t(i)] += fhat_[size_t(i)];

    if (cfg_.tracer) {
      std::vector<Cx> cxh(size_t(spec_size()), Cx{}), cyh(size_t(spec_size()), Cx{});
      for (int64_t i = 0; i < spec_size(); ++i) {
        cxh[size_t(i)] = Cx(0, twopi * kx_[size_t(i)]) * ch[size_t(i)];
        cyh[size_t(i)] = Cx(0, twopi * ky_[size_t(i)]) * ch[size_t(i)];
      }
      std::vector<double> cx(size_t(n * n)), cy(size_t(n * n)), adv(size_t(n * n));
      fft_.backward(cxh.data(), cx.data());
      fft_.backward(cyh.data(), cy.data());
      for (int64_t i = 0; i < n * n; ++i)
        adv[size_t(i)] = -(u[size_t(i)] * cx[size_t(i)] + v[size_t(i)] * cy[size_t(i)]);
      dc.resize(size_t(spec_size()), Cx{});
      fft_.forward(adv.data(), dc.data());
      truncate(dc.data());
      for (int64_t i = 0; i < spec_size(); ++i)
        dc[size_t(i)] -= visc * k2_[size_t(i)] * qmul_[size_t(i)] * ch[size_t(i)];
    }
  }

  void rk3_step(std::vector<Cx>& uh, std::vector<Cx>& vh, std::vector<Cx>& ch, double dt) {
    const bool tr = cfg_.tracer;
    std::vector<Cx> du, dv, dc, u1(uh), v1(vh), c1(ch);
    rhs(uh, vh, ch, du, dv, dc);
    for (int64_t i = 0; i < spec_size(); ++i) {
      u1[size_t(i)] = uh[size_t(i)] + dt * du[size_t(i)];
      v1[size_t(i)] = vh[size_t(i)] + dt * dv[size_t(i)];
      if (tr) c1[size_t(i)] = ch[size_t(i)] + dt * dc[size_t(i)];
    }
    project(u1.data(), v1.data());

    std::vector<Cx> u2(uh), v2(vh), c2(ch);
    rhs(u1, v1, c1, du, dv, dc);
    for (int64_t i = 0; i < spec_size(); ++i) {
      u2[size_t(i)] = 0.75 * uh[size_t(i)] + 0.25 * (u1[size_t(i)] + dt * du[size_t(i)]);
      v2[size_t(i)] = 0.75 * vh[size_t(i)] + 0.25 * (v1[size_t(i)] + dt * dv[size_t(i)]);
      if (tr) c2[size_t(i)] = 0.75 * ch[size_t(i)] + 0.25 * (c1[size_t(i)] + dt * dc[size_t(i)]);
    }
    project(u2.data(), v2.data());

    rhs(u2, v2, c2, du, dv, dc);
    const double c13 = 1.0 / 3.0, c23 = 2.0 / 3.0;
    for (int64_t i = 0; i < spec_size(); ++i) {
      uh[size_t(i)] = c13 * uh[size_t(i)] + c23 * (u2[size_t(i)] + dt * du[size_t(i)]);
      vh[size_t(i)] = c13 * vh[size_t(i)] + c23 * (v2[size_t(i)] + dt * dv[size_t(i)]);
      if (tr) ch[size_t(i)] = c13 * ch[size_t(i)] + c23 * (c2[size_t(i)] + dt * dc[size_t(i)]);
    }
    project(uh.data(), vh.data());
  }

  double stable_dt(const std::vector<Cx>& uh, const std::vector<Cx>& vh) {
    const int64_t n = cfg_.n;
    std::vector<double> u(size_t(n * n)), v(size_t(n * n));
    fft_.backward(uh.data(), u.data());
    fft_.backward(vh.data(), v.data());
    double umax = 0, vmax = 0;
    for (int64_t i = 0; i < n * n; ++i) {
      umax = std::max(umax, std::abs(u[size_t(i)]));
      vmax = std::max(vmax, std::abs(v[size_t(i)]));
    }
    const double dt_adv = cfg_.cfl / (double(n) * (umax + vmax) + 1e-12);
    const int64_t kcut = cfg_.dealias ? n / 3 : n / 2;
    const double lam = cfg_.eps_n() * 4.0 * M_PI * M_PI * 2.0 * double(kcut * kcut);
    const double dt_visc = 2.2 / std::max(lam, 1e-12);
    const double dt = std::min(dt_adv, dt_visc);
    if (dt < 1e-9)
      throw ValueError("NS time step collapsed (max |u| = " + std::to_string(umax) + ", " +
                       std::to_string(vmax) + ")");
    return dt;
  }

  void store(Trajectory& traj, int64_t s, const std::vector<Cx>& uh, const std::vector<Cx>& vh,
             const std::vector<Cx>& ch) {
    const int64_t n = cfg_.n;
    std::vector<double> f(size_t(n * n));
    fft_.backward(uh.data(), f.data());
    std::copy(f.begin(), f.end(), traj.field(s, 0));
    fft_.backward(vh.data(), f.data());
    std::copy(f.begin(), f.end(), traj.field(s, 1));
    int64_t c = 2;
    if (cfg_.tracer) {
      fft_.backward(ch.data(), f.data());
      std::copy(f.begin(), f.end(), traj.field(s, c++));
    }
    if (cfg_.forcing) {
      fft_.backward(fhat_.data(), f.data());
      std::copy(f.begin(), f.end(), traj.field(s, c));
    }
  }

  SpectralNSConfig cfg_;
  Fft2 fft_;
  std::vector<double> kx_, ky_, k2_, qmul_, keep_;
  std::vector<Cx> fhat_;
};

}  // namespace scotlab
