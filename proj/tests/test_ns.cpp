#include <catch2/catch_amalgamated.hpp>

#include "scotlab/pde/spectral_ns.hpp"
#include "scotlab/pde/ic.hpp"

using namespace scotlab;

namespace {

std::vector<double> grid_fn(int64_t n, const std::function<double(double, double)>& f) {
  std::vector<double> out(size_t(n * n));
  for (int64_t iy = 0; iy < n; ++iy)
    for (int64_t ix = 0; ix < n; ++ix)
      out[size_t(iy * n + ix)] = f(double(ix) / double(n), double(iy) / double(n));
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("vorticity inversion: single mode closed form and zero field") {
  SpectralNSConfig cfg;
  cfg.n = 64;
  SpectralNS solver(cfg);

  auto omega = grid_fn(cfg.n, [](double x, double) { return std::sin(2 * M_PI * x); });
  std::vector<double> u, v;
  solver.vorticity_to_velocity(omega, u, v);
  // psi = sin(2 pi x)/(4 pi^2); u = d_y psi = 0; v = -d_x psi = -cos(2 pi x)/(2 pi)
  auto v_exact = grid_fn(cfg.n, [](double x, double) { return -std::cos(2 * M_PI * x) / (2 * M_PI); });
  for (int64_t i = 0; i < cfg.n * cfg.n; ++i) {
    CHECK(std::abs(u[size_t(i)]) < 1e-12);
    CHECK(v[size_t(i)] == Catch::Approx(v_exact[size_t(i)]).margin(1e-12));
  }

  std::vector<double> zero(size_t(cfg.n * cfg.n), 0.0), uz, vz;
  solver.vorticity_to_velocity(zero, uz, vz);
  CHECK(max_abs(uz) == 0.0);
  CHECK(max_abs(vz) == 0.0);
}

TEST_CASE("vorticity inversion round-trips band-limited fields") {
  SpectralNSConfig cfg;
  cfg.n = 64;
  SpectralNS solver(cfg);
  // zero-mean band-limited vorticity
  auto omega = grid_fn(cfg.n, [](double x, double y) {
    return std::sin(2 * M_PI * (2 * x + y)) + 0.5 * std::cos(2 * M_PI * (x - 3 * y)) +
           0.25 * std::sin(2 * M_PI * 5 * y);
  });
  std::vector<double> u, v;
  solver.vorticity_to_velocity(omega, u, v);
  // curl u = dv/dx - du/dy via spectral derivatives: recompute with FFT
  Fft2 fft(cfg.n);
  std::vector<std::complex<double>> uh(size_t(fft.spec_size())), vh(size_t(fft.spec_size()));
  fft.forward(u.data(), uh.data());
  fft.forward(v.data(), vh.data());
  std::vector<std::complex<double>> wh(size_t(fft.spec_size()));
  for (int64_t iy = 0; iy < cfg.n; ++iy)
    for (int64_t ix = 0; ix < fft.nk(); ++ix) {
      const int64_t i = iy * fft.nk() + ix;
      wh[size_t(i)] = std::complex<double>(0, 2 * M_PI) *
                      (double(fft.kx(ix)) * vh[size_t(i)] - double(fft.ky(iy)) * uh[size_t(i)]);
    }
  std::vector<double> curl(size_t(cfg.n * cfg.n));
  fft.backward(wh.data(), curl.data());
  for (int64_t i = 0; i < cfg.n * cfg.n; ++i)
    CHECK(curl[size_t(i)] == Catch::Approx(omega[size_t(i)]).margin(1e-10));
}

TEST_CASE("hyperviscosity multiplier satisfies the admissibility bounds") {
  SpectralNSConfig cfg;
  cfg.n = 64;
  SpectralNS solver(cfg);
  const double m = double(cfg.m_n());  // sqrt(64) = 8
  CHECK(cfg.m_n() == 8);
  for (int64_t kx = 0; kx <= cfg.n / 2; ++kx)
    for (int64_t ky = -cfg.n / 2; ky <= cfg.n / 2; ++ky) {
      const double kmag = std::sqrt(double(kx * kx + ky * ky));
      const double q = solver.qmul_at(kx, ky);
      if (kmag <= m) {
        CHECK(q == 0.0);
      } else {
        const double lower = 1.0 - std::pow(m / kmag, 1.0 / cfg.theta);
        CHECK(q >= lower - 1e-12);
        CHECK(q <= 1.0 + 1e-12);
      }
    }
}

TEST_CASE("zero initial velocity stays identically zero") {
  SpectralNSConfig cfg;
  cfg.n = 32;
  cfg.snapshots = 5;
  SpectralNS solver(cfg);
  std::vector<double> z(size_t(cfg.n * cfg.n), 0.0);
  auto traj = solver.simulate(z, z);
  for (double v : traj.data) CHECK(v == 0.0);
}

TEST_CASE("Taylor-Green vortex is steady under the filtered system") {
  SpectralNSConfig cfg;
  cfg.n = 32;
  SpectralNS solver(cfg);
  auto u0 = grid_fn(cfg.n, [](double x, double y) {
    return std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
  });
  auto v0 = grid_fn(cfg.n, [](double x, double y) {
    return -std::cos(2 * M_PI * x) * std::sin(2 * M_PI * y);
  });
  // |u| max = 1 -> dt ~ cfl/(N*2) = 0.0078; ~100 steps
  auto u = u0, v = v0;
  solver.run(u, v, 0.78);
  double num = 0, den = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    num += (u[i] - u0[i]) * (u[i] - u0[i]) + (v[i] - v0[i]) * (v[i] - v0[i]);
    den += u0[i] * u0[i] + v0[i] * v0[i];
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("unforced runs dissipate energy and stay divergence-free") {
  SpectralNSConfig cfg;
  cfg.n = 32;
  cfg.snapshots = 6;
  SpectralNS solver(cfg);
  CounterRng rng(77, uint64_t(0));
  auto omega = ic::gaussian_vorticity(cfg.n, rng, 40);
  std::vector<double> u, v;
  solver.vorticity_to_velocity(omega, u, v);
  auto traj = solver.simulate(u, v);

  double prev_energy = 1e300;
  double mean_u0 = 0, mean_v0 = 0;
  for (int64_t s = 0; s < traj.n_time(); ++s) {
    std::vector<double> us(traj.field(s, 0), traj.field(s, 0) + cfg.n * cfg.n);
    std::vector<double> vs(traj.field(s, 1), traj.field(s, 1) + cfg.n * cfg.n);
    const double e = SpectralNS::kinetic_energy(us, vs);
    CHECK(e <= prev_energy * (1.0 + 1e-12));
    prev_energy = e;
    CHECK(solver.spectral_divergence(us, vs) < 1e-10);
    double mu = 0, mv = 0;
    for (int64_t i = 0; i < cfg.n * cfg.n; ++i) {
      mu += us[size_t(i)];
      mv += vs[size_t(i)];
    }
    mu /= double(cfg.n * cfg.n);
    mv /= double(cfg.n * cfg.n);
    if (s == 0) {
      mean_u0 = mu;
      mean_v0 = mv;
    } else {
      CHECK(mu == Catch::Approx(mean_u0).margin(1e-13));
      CHECK(mv == Catch::Approx(mean_v0).margin(1e-13));
    }
  }
}

TEST_CASE("frozen tracer with zero velocity and zero viscosity") {
  SpectralNSConfig cfg;
  cfg.n = 32;
  cfg.snapshots = 4;
  cfg.tracer = true;
  cfg.eps_factor = 0.0;  // kappa = eps_N = 0
  SpectralNS solver(cfg);
  std::vector<double> z(size_t(cfg.n * cfg.n), 0.0);
  // band-limited blob (the spectral representation must be exact)
  auto c0 = grid_fn(cfg.n, [](double x, double y) {
    return std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y) + 1.0;
  });
  auto traj = solver.simulate(z, z, &c0);
  for (int64_t s = 0; s < traj.n_time(); ++s)
    for (int64_t i = 0; i < cfg.n * cfg.n; ++i)
      CHECK(traj.field(s, 2)[i] == Catch::Approx(c0[size_t(i)]).margin(1e-12));
}

TEST_CASE("tracer mass is conserved under advection-diffusion") {
  SpectralNSConfig cfg;
  cfg.n = 32;
  cfg.snapshots = 5;
  cfg.tracer = true;
  SpectralNS solver(cfg);
  CounterRng rng(5, uint64_t(1));
  auto omega = ic::pwc_vorticity(cfg.n, rng);
  std::vector<double> u, v;
  solver.vorticity_to_velocity(omega, u, v);
  auto c0 = ic::tracer_ball(cfg.n);
  auto traj = solver.simulate(u, v, &c0);
  double mass0 = 0;
  for (int64_t i = 0; i < cfg.n * cfg.n; ++i) mass0 += traj.field(0, 2)[i];
  for (int64_t s = 1; s < traj.n_time(); ++s) {
    double mass = 0;
    for (int64_t i = 0; i < cfg.n * cfg.n; ++i) mass += traj.field(s, 2)[i];
    CHECK(mass == Catch::Approx(mass0).margin(1e-10 * std::abs(mass0) * double(cfg.n * cfg.n)));
  }
}

TEST_CASE("Kolmogorov forcing spins up a flow from rest") {
  SpectralNSConfig cfg;
  cfg.n = 32;
  cfg.snapshots = 3;
  cfg.forcing = true;
  SpectralNS solver(cfg);
  std::vector<double> z(size_t(cfg.n * cfg.n), 0.0);
  auto traj = solver.simulate(z, z);
  REQUIRE(traj.channels == std::vector<std::string>{"u", "v", "f"});
  std::vector<double> uf(traj.field(2, 0), traj.field(2, 0) + cfg.n * cfg.n);
  std::vector<double> vf(traj.field(2, 1), traj.field(2, 1) + cfg.n * cfg.n);
  CHECK(max_abs(uf) > 1e-3);
  CHECK(solver.spectral_divergence(uf, vf) < 1e-10);
  // the stored forcing channel is the constant field 0.1 sin(2 pi (x+y))
  auto f_expect = grid_fn(cfg.n, [](double x, double y) {
    return 0.1 * std::sin(2 * M_PI * (x + y));
  });
  for (int64_t s = 0; s < traj.n_time(); ++s)
    for (int64_t i = 0; i < cfg.n * cfg.n; ++i)
      CHECK(traj.field(s, 2)[i] == Catch::Approx(f_expect[size_t(i)]).margin(1e-10));
}
