#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vortexgas/admissibility.hpp"
#include "vortexgas/configuration.hpp"
#include "vortexgas/error.hpp"
#include "vortexgas/geometry.hpp"
#include "vortexgas/parallel.hpp"
#include "vortexgas/rng.hpp"
#include "vortexgas/vortex_core.hpp"

namespace vortexgas {

/// Neutral +-1 vortex gas on a torus at inverse temperature beta.
/// Zero-valued length parameters are replaced by their defaults in
/// `resolve`: hard_core = 0.01 min(L), proposal_scale = 0.1 min(L),
/// r_pair = 3 hard_core.
struct EnsembleSpec {
  int n_pairs = 1;
  Geometry geometry = Geometry::torus(1.0, 1.0);
  double beta = 1.0;
  long n_sweeps = 1000;
  long n_burn = 100;
  double proposal_scale = 0.0;
  double hard_core = 0.0;
  double r_pair = 0.0;
  std::uint64_t seed = 0;
  long dump_every = 0;  // keep every k-th post-burn-in sample; 0 disables dumps
};

struct EnsembleStats {
  double mean_energy = 0.0;
  double acceptance = 0.0;                    // accepted / attempted
  double acceptance_excluding_hard_core = 0.0;
  double hard_core_rejection_rate = 0.0;
  double dipole_fraction = 0.0;
  double mean_nn_distance = 0.0;
  long samples = 0;

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

struct EnsembleResult {
  EnsembleSpec spec;  // resolved
  EnsembleStats stats;
  std::vector<Configuration> dumps;
};

inline EnsembleSpec resolve(EnsembleSpec spec) {
  const double lmin = std::min(spec.geometry.L1(), spec.geometry.L2());
  if (spec.hard_core == 0.0) spec.hard_core = 0.01 * lmin;
  if (spec.proposal_scale == 0.0) spec.proposal_scale = 0.1 * lmin;
  if (spec.r_pair == 0.0) spec.r_pair = 3.0 * spec.hard_core;
  return spec;
}

inline void validate(const EnsembleSpec& spec) {
  if (!spec.geometry.is_torus()) {
    const auto why = spec.geometry.is_sphere()
                         ? std::string("genus 0: no nontrivial vanishing-Chern-class bundles")
                         : std::string("ensemble sampling requires a torus geometry");
    throw Error(spec.geometry.is_sphere() ? ErrorCode::inadmissible
                                          : ErrorCode::unsupported_geometry,
                why);
  }
  if (spec.n_pairs < 1) throw Error(ErrorCode::invalid_argument, "n_pairs must be >= 1");
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
    throw Error(ErrorCode::invalid_argument, "beta must be positive and finite");
  }
  if (spec.n_sweeps < 1 || spec.n_burn < 0 || spec.dump_every < 0) {
    throw Error(ErrorCode::invalid_argument, "n_sweeps >= 1, n_burn >= 0, dump_every >= 0");
  }
  const double lmin = std::min(spec.geometry.L1(), spec.geometry.L2());
  if (!(spec.hard_core > 0.0 && spec.hard_core < spec.proposal_scale &&
        spec.proposal_scale < lmin)) {
    throw Error(ErrorCode::invalid_argument,
                "require 0 < hard_core < proposal_scale < min(L1, L2)");
  }
  if (!(spec.r_pair > 0.0)) throw Error(ErrorCode::invalid_argument, "r_pair must be positive");
}

inline double metropolis_acceptance(double beta, double delta_energy) {
  return delta_energy <= 0.0 ? 1.0 : std::exp(-beta * delta_energy);
}

struct PairingStats {
  double dipole_fraction = 0.0;
  double mean_nn_distance = 0.0;
};

/// Nearest opposite-charge neighbour of every vortex, in the geometry metric.
inline PairingStats pairing_stats(const Configuration& config, double r_pair) {
  if (config.empty()) throw Error(ErrorCode::invalid_argument, "pairing_stats on empty configuration");
  if (config.total_charge() != 0) {
    throw Error(ErrorCode::invalid_argument, "pairing_stats requires a neutral configuration");
  }
  const auto& g = config.geometry();
  const auto vs = config.vortices();
  std::size_t paired = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < vs.size(); ++l) {
      if ((vs[k].charge > 0) == (vs[l].charge > 0)) continue;
      best = std::min(best, distance(g, vs[k].position, vs[l].position));
    }
    sum += best;
    if (best < r_pair) ++paired;
  }
  const double n = static_cast<double>(vs.size());
  return {static_cast<double>(paired) / n, sum / n};
}

/// H(after) - H(before) when vortex k of `config` moves to `to`.
inline double move_energy_change(const Configuration& config, std::size_t k, Complex to) {
  const auto& g = config.geometry();
  const auto vs = config.vortices();
  if (k >= vs.size()) throw Error(ErrorCode::invalid_argument, "vortex index out of range");
  double dk = 0.0;
  for (std::size_t l = 0; l < vs.size(); ++l) {
    if (l == k) continue;
    dk += double(vs[l].charge) *
          (pair_kernel(g, to, vs[l].position, 0.0) - pair_kernel(g, vs[k].position, vs[l].position, 0.0));
  }
  return -double(vs[k].charge) * dk;
}

/// Single-vortex random-displacement Metropolis chain with incremental
/// energy bookkeeping (O(N) per move).
class MetropolisChain {
 public:
  explicit MetropolisChain(const EnsembleSpec& spec) : spec_(resolve(spec)), rng_(spec_.seed) {
    validate(spec_);
    const auto& g = spec_.geometry;
    const std::size_t n = 2 * static_cast<std::size_t>(spec_.n_pairs);
    positions_.reserve(n);
    charges_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex z;
      int tries = 0;
      do {
        if (++tries > 100000) {
          throw Error(ErrorCode::invalid_argument, "cannot place vortices outside the hard core");
        }
        z = {rng_.uniform(0.0, g.L1()), rng_.uniform(0.0, g.L2())};
      } while (violates_core(z, positions_.size()));
      positions_.push_back(z);
      charges_.push_back(i % 2 == 0 ? 1 : -1);
    }
    energy_ = hamiltonian(configuration());
  }

  const EnsembleSpec& spec() const noexcept { return spec_; }
  double energy() const noexcept { return energy_; }
  long attempted() const noexcept { return attempted_; }
  long accepted() const noexcept { return accepted_; }
  long hard_core_rejections() const noexcept { return hard_core_rejected_; }

  Configuration configuration() const {
    std::vector<Vortex> vs;
    vs.reserve(positions_.size());
    for (std::size_t i = 0; i < positions_.size(); ++i) vs.push_back({positions_[i], charges_[i]});
    return Configuration(spec_.geometry, std::move(vs));
  }

  /// H(after) - H(before) for moving vortex k to `to`.
  double delta_energy(std::size_t k, Complex to) const {
    const auto& g = spec_.geometry;
    double dk = 0.0;
    for (std::size_t l = 0; l < positions_.size(); ++l) {
      if (l == k) continue;
      dk += double(charges_[l]) *
            (pair_kernel(g, to, positions_[l], 0.0) - pair_kernel(g, positions_[k], positions_[l], 0.0));
    }
    return -double(charges_[k]) * dk;
  }

  void reset_counters() { attempted_ = accepted_ = hard_core_rejected_ = 0; }

  /// One proposal; returns true when accepted.
  bool step() {
    const auto& g = spec_.geometry;
    const std::size_t k = rng_.index(positions_.size());
    const double s = spec_.proposal_scale;
    const Complex dz{rng_.uniform(-s, s), rng_.uniform(-s, s)};
    const Complex to = reduce_position(g, positions_[k] + dz);
    const double u = rng_.uniform();
    ++attempted_;
    if (violates_core(to, positions_.size(), k)) {
      ++hard_core_rejected_;
      return false;
    }
    const double dh = delta_energy(k, to);
    if (u < metropolis_acceptance(spec_.beta, dh)) {
      positions_[k] = to;
      energy_ += dh;
      ++accepted_;
      return true;
    }
    return false;
  }

  /// N proposals.
  void sweep() {
    for (std::size_t i = 0; i < positions_.size(); ++i) step();
  }

 private:
  bool violates_core(Complex z, std::size_t upto,
                     std::size_t skip = std::numeric_limits<std::size_t>::max()) const {
    for (std::size_t l = 0; l < upto; ++l) {
      if (l == skip) continue;
      if (distance(spec_.geometry, z, positions_[l]) < spec_.hard_core) return true;
    }
    return false;
  }

  EnsembleSpec spec_;
  Rng rng_;
  std::vector<Complex> positions_;
  std::vector<Charge> charges_;
  double energy_ = 0.0;
  long attempted_ = 0;
  long accepted_ = 0;
  long hard_core_rejected_ = 0;
};

/// Burn in, then average energy and pairing observables over one sample per
/// sweep. Deterministic given the seed.
inline EnsembleResult sample(const EnsembleSpec& spec) {
  MetropolisChain chain(spec);
  const auto& s = chain.spec();
  for (long i = 0; i < s.n_burn; ++i) chain.sweep();
  chain.reset_counters();

  EnsembleResult result;
  result.spec = s;
  double e_sum = 0.0, frac_sum = 0.0, dist_sum = 0.0;
  for (long i = 0; i < s.n_sweeps; ++i) {
    chain.sweep();
    const auto config = chain.configuration();
    const auto pairing = pairing_stats(config, s.r_pair);
    e_sum += chain.energy();
    frac_sum += pairing.dipole_fraction;
    dist_sum += pairing.mean_nn_distance;
    if (s.dump_every > 0 && (i + 1) % s.dump_every == 0) result.dumps.push_back(config);
  }
  const double n = static_cast<double>(s.n_sweeps);
  auto& st = result.stats;
  st.samples = s.n_sweeps;
  st.mean_energy = e_sum / n;
  st.dipole_fraction = frac_sum / n;
  st.mean_nn_distance = dist_sum / n;
  const double att = static_cast<double>(chain.attempted());
  const double hc = static_cast<double>(chain.hard_core_rejections());
  st.acceptance = chain.accepted() / att;
  st.hard_core_rejection_rate = hc / att;
  st.acceptance_excluding_hard_core = att > hc ? chain.accepted() / (att - hc) : 0.0;
  return result;
}

/// Independent chains per beta; entry i uses seed base_seed + i, so entry 0
/// reproduces sample(spec).
inline std::vector<EnsembleResult> temperature_scan(const EnsembleSpec& base,
                                                    const std::vector<double>& betas,
                                                    unsigned workers = worker_count()) {
  if (betas.empty()) throw Error(ErrorCode::invalid_argument, "beta grid is empty");
  if (!std::is_sorted(betas.begin(), betas.end())) {
    throw Error(ErrorCode::invalid_argument, "beta grid must be ascending");
  }
  std::vector<EnsembleResult> out(betas.size());
  parallel_for(
      betas.size(),
      [&](std::size_t i) {
        EnsembleSpec s = base;
        s.beta = betas[i];
        s.seed = base.seed + i;
        try {
          out[i] = sample(s);
        } catch (const Error& e) {
          throw Error(e.code(), "at beta = " + std::to_string(betas[i]) + ": " + e.what());
        }
      },
      workers);
  return out;
}

}  // namespace vortexgas
