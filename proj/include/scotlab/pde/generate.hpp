#pragma once

#include <atomic>
#include <thread>

#include "scotlab/pde/allen_cahn.hpp"
#include "scotlab/pde/elliptic.hpp"
#include "scotlab/pde/euler_fv.hpp"
#include "scotlab/pde/ic.hpp"
#include "scotlab/pde/spectral_ns.hpp"
#include "scotlab/pde/wave_fd.hpp"

namespace scotlab {

struct GenerateConfig {
  std::string pde = "ns";  // ns | ns-tracer | fns | euler | wave | ace | poisson | helmholtz
  std::string ic = "ns-pwc";
  int64_t n_traj = 16;
  int64_t grid = 64;
  int64_t snapshots = 11;
  double t_final = 1.0;
  uint64_t seed = 0;
  int workers = 1;
  std::string name;  // defaults to "<pde>-<ic>"

  std::string dataset_name() const { return name.empty() ? pde + "-" + ic : name; }
};

inline const std::vector<std::string>& valid_pdes() {
  static const std::vector<std::string> v{"ns",   "ns-tracer", "fns",     "euler",
                                          "wave", "ace",       "poisson", "helmholtz"};
  return v;
}

inline void validate_generate_config(const GenerateConfig& cfg) {
  auto in = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  if (!in(valid_pdes(), cfg.pde)) {
    std::string msg = "unknown pde '" + cfg.pde + "'; valid:";
    for (const auto& p : valid_pdes()) msg += " " + p;
    throw ValueError(msg);
  }
  static const std::vector<std::string> ns_ics{"ns-sines", "ns-gauss", "ns-pwc",
                                               "ns-bb",    "ns-sl",    "ns-svs"};
  static const std::vector<std::string> euler_ics{"ce-rp", "ce-crp", "ce-kh", "ce-gauss",
                                                  "ce-rpui"};
  std::vector<std::string> allowed;
  if (cfg.pde == "ns" || cfg.pde == "ns-tracer" || cfg.pde == "fns") allowed = ns_ics;
  else if (cfg.pde == "euler") allowed = euler_ics;
  else if (cfg.pde == "wave") allowed = {"wave-gauss-source", "wave-layer"};
  else if (cfg.pde == "ace") allowed = {"ace-modes"};
  else if (cfg.pde == "poisson") allowed = {"poisson-gauss"};
  else allowed = {"helmholtz-gauss"};
  if (!in(allowed, cfg.ic)) {
    std::string msg = "ic kind '" + cfg.ic + "' invalid for pde '" + cfg.pde + "'; valid:";
    for (const auto& k : allowed) msg += " " + k;
    throw ValueError(msg);
  }
  if (cfg.n_traj < 1) throw ValueError("n_traj must be >= 1");
  if (cfg.snapshots < 2) throw ValueError("snapshots must be >= 2");
}

inline Boundary dataset_boundary(const std::string& pde) {
  if (pde == "wave") return Boundary::Absorbing;
  if (pde == "poisson" || pde == "helmholtz") return Boundary::Dirichlet;
  return Boundary::Periodic;
}

namespace detail {

inline ic::VelocityIC sample_ns_velocity(const GenerateConfig& cfg, SpectralNS& solver,
                                         CounterRng& rng) {
  const int64_t n = cfg.grid;
  ic::VelocityIC vel;
  if (cfg.ic == "ns-sines") {
    vel = ic::ns_sines(n, rng);
  } else if (cfg.ic == "ns-gauss") {
    auto w = ic::gaussian_vorticity(n, rng);
    solver.vorticity_to_velocity(w, vel.u, vel.v);
  } else if (cfg.ic == "ns-pwc") {
    auto w = ic::pwc_vorticity(n, rng);
    solver.vorticity_to_velocity(w, vel.u, vel.v);
  } else if (cfg.ic == "ns-bb") {
    vel = ic::brownian_bridge(n, rng);
    solver.project_field(vel.u, vel.v);
    solver.run(vel.u, vel.v, 0.5);  // spin-up from t=-0.5 to 0
  } else if (cfg.ic == "ns-sl") {
    vel = ic::shear_layer(n, rng);
  } else if (cfg.ic == "ns-svs") {
    auto w = ic::vortex_sheet_vorticity(n, rng);
    solver.vorticity_to_velocity(w, vel.u, vel.v);
  } else {
    throw ValueError("unhandled ns ic " + cfg.ic);
  }
  return vel;
}

inline Trajectory generate_one(const GenerateConfig& cfg, int64_t index) {
  CounterRng rng(cfg.seed, uint64_t(index));
  const int64_t n = cfg.grid;
  Trajectory traj;

  if (cfg.pde == "ns" || cfg.pde == "ns-tracer" || cfg.pde == "fns") {
    SpectralNSConfig scfg;
    scfg.n = n;
    scfg.t_final = cfg.t_final;
    scfg.snapshots = cfg.snapshots;
    scfg.tracer = cfg.pde == "ns-tracer";
    scfg.forcing = cfg.pde == "fns";
    SpectralNS solver(scfg);
    auto vel = sample_ns_velocity(cfg, solver, rng);
    solver.project_field(vel.u, vel.v);
    if (scfg.tracer) {
      auto c0 = ic::tracer_ball(n);
      traj = solver.simulate(vel.u, vel.v, &c0);
    } else {
      traj = solver.simulate(vel.u, vel.v);
    }
  } else if (cfg.pde == "euler") {
    EulerConfig ecfg;
    ecfg.n = n;
    ecfg.t_final = cfg.t_final;
    ecfg.snapshots = cfg.snapshots;
    EulerFV solver(ecfg);
    ic::EulerIC prim;
    if (cfg.ic == "ce-rp") prim = ic::ce_rp(n, rng);
    else if (cfg.ic == "ce-crp") prim = ic::ce_crp(n, rng);
    else if (cfg.ic == "ce-kh") prim = ic::ce_kh(n, rng);
    else if (cfg.ic == "ce-rpui") prim = ic::ce_rpui(n, rng);
    else {  // ce-gauss: vorticity-derived velocity, constant rho and p
      SpectralNSConfig f;
      f.n = n;
      SpectralNS helper(f);
      auto w = ic::gaussian_vorticity(n, rng);
      ic::VelocityIC vel;
      helper.vorticity_to_velocity(w, vel.u, vel.v);
      prim.rho.assign(size_t(n * n), 0.1);
      prim.p.assign(size_t(n * n), 2.5);
      prim.vx = vel.u;
      prim.vy = vel.v;
    }
    traj = solver.simulate(EulerFV::from_primitive(prim.rho, prim.vx, prim.vy, prim.p));
  } else if (cfg.pde == "wave") {
    WaveConfig wcfg;
    wcfg.n = n;
    wcfg.t_final = cfg.t_final;
    wcfg.snapshots = cfg.snapshots;
    WaveFD solver(wcfg);
    auto icw = cfg.ic == "wave-layer" ? ic::wave_layer(n, rng) : ic::wave_gauss(n, rng);
    std::vector<double> v0(size_t(n * n), 0.0);
    traj = solver.simulate(icw.u, v0, icw.speed);
  } else if (cfg.pde == "ace") {
    AllenCahnConfig acfg;
    acfg.n = n;
    acfg.t_final = cfg.t_final;
    acfg.snapshots = cfg.snapshots;
    AllenCahn solver(acfg);
    traj = solver.simulate(ic::ace_modes(n, rng));
  } else if (cfg.pde == "poisson") {
    Grid grid{n, Boundary::Dirichlet};
    auto f = ic::poisson_gauss_source(grid, rng);
    auto sol = poisson_solve(f, grid);
    traj.n = n;
    traj.pde = "poisson";
    traj.channels = {"u"};
    traj.times = {0.0, 1.0};
    traj.allocate();
    std::copy(f.begin(), f.end(), traj.field(0, 0));
    std::copy(sol.u.begin(), sol.u.end(), traj.field(1, 0));
  } else {  // helmholtz; resample on resonant draws
    Grid grid{n, Boundary::Dirichlet};
    for (int attempt = 0;; ++attempt) {
      auto ich = ic::helmholtz_gauss(grid, rng);
      try {
        auto sol = helmholtz_solve(ich.a, ich.b, grid);
        traj.n = n;
        traj.pde = "helmholtz";
        traj.channels = {"u", "b"};
        traj.times = {0.0, 1.0};
        traj.allocate();
        std::copy(ich.a.begin(), ich.a.end(), traj.field(0, 0));
        std::fill(traj.field(0, 1), traj.field(0, 1) + n * n, ich.b);
        std::copy(sol.u.begin(), sol.u.end(), traj.field(1, 0));
        std::fill(traj.field(1, 1), traj.field(1, 1) + n * n, ich.b);
        break;
      } catch (const ValueError&) {
        if (attempt >= 8) throw;
      }
    }
  }
  traj.seed = cfg.seed;
  return traj;
}

}  // namespace detail

// Trajectory generation is embarrassingly parallel: each trajectory owns
// its (seed, index) stream and output slot, so results are independent of
// worker count and completion order.
inline std::vector<Trajectory> generate_trajectories(const GenerateConfig& cfg) {
  validate_generate_config(cfg);
  std::vector<Trajectory> out(size_t(cfg.n_traj));
  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (int64_t i = 0; i < cfg.n_traj; ++i) out[size_t(i)] = detail::generate_one(cfg, i);
    return out;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(size_t(workers), nullptr);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      try {
        for (;;) {
          const int64_t i = next.fetch_add(1);
          if (i >= cfg.n_traj) return;
          out[size_t(i)] = detail::generate_one(cfg, i);
        }
      } catch (...) {
        errors[size_t(w)] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Generates and writes the dataset container; returns the payload hash.
inline std::string generate_dataset(const GenerateConfig& cfg,
                                    const std::filesystem::path& out_dir) {
  auto trajectories = generate_trajectories(cfg);
  nlohmann::json provenance{{"seed", cfg.seed},
                            {"pde", cfg.pde},
                            {"ic", cfg.ic},
                            {"snapshots", cfg.snapshots},
                            {"t_final", cfg.t_final},
                            {"grid", cfg.grid}};
  return write_dataset(trajectories, out_dir, cfg.dataset_name(), dataset_boundary(cfg.pde),
                       provenance);
}

}  // namespace scotlab
