// Generates a tiny Navier-Stokes dataset in memory and prints a few
// physical diagnostics per snapshot.

#include <cstdio>

#include "scotlab/scotlab.hpp"

using namespace scotlab;

int main() {
  GenerateConfig cfg;
  cfg.pde = "ns";
  cfg.ic = "ns-gauss";
  cfg.n_traj = 2;
  cfg.grid = 32;
  cfg.snapshots = 6;
  cfg.seed = 3;
  auto trajectories = generate_trajectories(cfg);

  SpectralNSConfig scfg;
  scfg.n = cfg.grid;
  SpectralNS probe(scfg);
  for (size_t t = 0; t < trajectories.size(); ++t) {
    const auto& traj = trajectories[t];
    std::printf("trajectory %zu (%s):\n", t, traj.pde.c_str());
    for (int64_t s = 0; s < traj.n_time(); ++s) {
      std::vector<double> u(traj.field(s, 0), traj.field(s, 0) + traj.frame());
      std::vector<double> v(traj.field(s, 1), traj.field(s, 1) + traj.frame());
      std::printf("  t=%.2f  kinetic energy %.6f  spectral divergence %.2e\n",
                  traj.times[size_t(s)], SpectralNS::kinetic_energy(u, v),
                  probe.spectral_divergence(u, v));
    }
  }
  return 0;
}
