#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "vortexgas/configuration.hpp"
#include "vortexgas/error.hpp"
#include "vortexgas/geometry.hpp"

namespace vortexgas {

// Reduced units throughout: hbar/m = 1, so energies are in hbar^2/m^2, the
// circulation quantum h/m is 2*pi and the superfluid density is absorbed.

/// H = -sum_{k>l} n_k n_l K(z_k, z_l) with K the geometry's pair kernel.
inline double hamiltonian(const Configuration& config, double eps = kDefaultCoincidenceEps) {
  const auto& g = config.geometry();
  detail::require_interacting(g);
  const auto vs = config.vortices();
  double h = 0.0;
  for (std::size_t k = 1; k < vs.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l) {
      h -= static_cast<double>(vs[k].charge) * static_cast<double>(vs[l].charge) *
           pair_kernel(g, vs[k].position, vs[l].position, eps);
    }
  }
  return h;
}

/// Energy, total charge and (plane only) the dipole and angular moments.
struct ConservedSet {
  double energy = 0.0;
  std::optional<Complex> dipole_moment;  // M = sum n_k z_k
  std::optional<double> angular_moment;  // I = sum n_k |z_k|^2
  Charge total_charge = 0;
};

inline ConservedSet conserved_set(const Configuration& config,
                                  double eps = kDefaultCoincidenceEps) {
  ConservedSet out;
  out.energy = hamiltonian(config, eps);
  out.total_charge = config.total_charge();
  if (config.geometry().is_plane()) {
    Complex m{0.0, 0.0};
    double i = 0.0;
    for (const auto& v : config.vortices()) {
      const double n = static_cast<double>(v.charge);
      m += n * v.position;
      i += n * std::norm(v.position);
    }
    out.dipole_moment = m;
    out.angular_moment = i;
  }
  return out;
}

/// z_k -> eta z_k + xi with |eta| = 1, on the plane.
inline Configuration affine_transform(const Configuration& config, Complex eta, Complex xi) {
  if (!config.geometry().is_plane()) {
    throw Error(ErrorCode::unsupported_geometry, "affine_transform is defined on the plane");
  }
  if (std::abs(std::abs(eta) - 1.0) > 1e-12) {
    throw Error(ErrorCode::invalid_argument, "affine rotation eta must satisfy |eta| = 1");
  }
  std::vector<Complex> z = config.positions();
  for (auto& p : z) p = eta * p + xi;
  return config.with_positions(z);
}

inline Configuration negate_charges(const Configuration& config) {
  std::vector<Vortex> vs(config.vortices().begin(), config.vortices().end());
  for (auto& v : vs) v.charge = -v.charge;
  return Configuration(config.geometry(), std::move(vs));
}

}  // namespace vortexgas
