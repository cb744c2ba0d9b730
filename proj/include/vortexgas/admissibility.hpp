#pragma once

#include <string>
#include <vector>

#include "vortexgas/configuration.hpp"
#include "vortexgas/geometry.hpp"

namespace vortexgas {

/// Outcome of the genus / net-charge checks for a configuration.
///
/// `dynamics_supported` is the geometric condition: affine vortex dynamics
/// needs a vanishing canonical Chern class, i.e. genus 1. `admissible`
/// additionally requires a neutral configuration, which phase-transition
/// studies (ensemble sampling) need.
struct AdmissibilityReport {
  bool admissible = false;
  bool dynamics_supported = false;
  int genus = 0;
  long long canonical_chern = 0;
  int dim_h1 = 0;  // dim H^1(M, C) = 2g
  Charge total_charge = 0;
  std::vector<std::string> reasons;
};

inline AdmissibilityReport admissibility(const Geometry& geometry, const Configuration& config) {
  AdmissibilityReport r;
  r.genus = geometry.genus();
  r.canonical_chern = canonical_chern(r.genus);
  r.dim_h1 = 2 * r.genus;
  r.total_charge = config.total_charge();
  r.dynamics_supported = (r.canonical_chern == 0);
  r.admissible = true;

  if (geometry.is_sphere() && !config.empty()) {
    r.admissible = false;
    r.reasons.emplace_back(
        "genus 0: no nontrivial vanishing-Chern-class bundles, vortex precipitation cannot "
        "occur on a sphere");
  }
  if (r.total_charge != 0) {
    r.admissible = false;
    r.reasons.emplace_back("net charge must vanish for phase-transition studies (Q = " +
                           std::to_string(r.total_charge) + ")");
  }
  if (!r.dynamics_supported && config.empty()) {
    r.reasons.emplace_back("genus " + std::to_string(r.genus) +
                           ": canonical Chern class nonzero, affine dynamics unsupported");
  }
  return r;
}

inline AdmissibilityReport admissibility(const Configuration& config) {
  return admissibility(config.geometry(), config);
}

}  // namespace vortexgas
