// Metropolis scan of a neutral vortex gas on the unit torus: the fraction of
// vortices bound in tight dipoles grows as the gas is cooled.

#include <cstdio>

#include "vortexgas/ensemble.hpp"

int main() {
  using namespace vortexgas;
  EnsembleSpec spec;
  spec.n_pairs = 8;
  spec.n_sweeps = 2000;
  spec.n_burn = 500;
  spec.seed = 1;
  std::printf("%8s %14s %12s %16s %12s\n", "beta", "mean_energy", "acceptance", "dipole_fraction", "mean_nn");
  for (const auto& r : temperature_scan(spec, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})) {
    std::printf("%8.3f %14.6f %12.4f %16.4f %12.5f\n", r.spec.beta, r.stats.mean_energy, r.stats.acceptance,
                r.stats.dipole_fraction, r.stats.mean_nn_distance);
  }
}
