#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "vortexgas/admissibility.hpp"
#include "vortexgas/configuration.hpp"
#include "vortexgas/error.hpp"
#include "vortexgas/geometry.hpp"
#include "vortexgas/vortex_core.hpp"

namespace vortexgas {

/// Removal (or partial merge) of an opposite-charge pair closer than r_core.
struct AnnihilationEvent {
  double time = 0.0;
  Vortex first;
  Vortex second;
  std::optional<Vortex> merged;  // present when the charges do not cancel
  double separation = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
};

struct TrajectoryState {
  double time = 0.0;
  Configuration config;
  ConservedSet conserved;
  std::vector<AnnihilationEvent> events;  // events since the previous state
};

/// dz_k/dt = 2i sum_{l != k} n_l dK/d(conj z)(z_k, z_l). On the plane this is
/// i sum n_l / conj(z_k - z_l), the closed form of n_k dz_k/dt = -2i dH/d(conj z_k).
inline std::vector<Complex> velocity_field(const Geometry& g, std::span<const Vortex> vs,
                                           std::span<const Complex> positions,
                                           double eps = kDefaultCoincidenceEps) {
  std::vector<Complex> v(vs.size(), Complex{0.0, 0.0});
  for (std::size_t k = 1; k < vs.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l) {
      // the kernel is even, so dK/dzbar(z_l, z_k) = -dK/dzbar(z_k, z_l)
      const Complex dk = pair_kernel_dzbar(g, positions[k], positions[l], eps);
      const Complex two_i_dk = Complex(0.0, 2.0) * dk;
      v[k] += static_cast<double>(vs[l].charge) * two_i_dk;
      v[l] -= static_cast<double>(vs[k].charge) * two_i_dk;
    }
  }
  return v;
}

inline std::vector<Complex> velocity_field(const Configuration& config,
                                           double eps = kDefaultCoincidenceEps) {
  detail::require_interacting(config.geometry());
  const auto z = config.positions();
  return velocity_field(config.geometry(), config.vortices(), z, eps);
}

/// Merge opposite-sign pairs closer than r_core, closest first, until none
/// remain. Cancelling pairs are removed; otherwise a vortex of charge
/// n_k + n_l is placed at the |n|-weighted midpoint. Q is unchanged.
inline std::pair<Configuration, std::vector<AnnihilationEvent>> annihilate(
    const Configuration& config, double r_core) {
  if (!(r_core > 0.0)) throw Error(ErrorCode::invalid_argument, "r_core must be positive");
  const auto& g = config.geometry();
  const auto energy_of = [&](const Configuration& c) {
    if (g.is_sphere()) return std::numeric_limits<double>::quiet_NaN();
    try {
      return hamiltonian(c, 0.0);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::vector<Vortex> vs(config.vortices().begin(), config.vortices().end());
  std::vector<AnnihilationEvent> events;
  Configuration current = config;
  for (;;) {
    std::size_t best_k = 0;
    std::size_t best_l = 0;
    double best = r_core;
    for (std::size_t k = 1; k < vs.size(); ++k) {
      for (std::size_t l = 0; l < k; ++l) {
        if ((vs[k].charge > 0) == (vs[l].charge > 0)) continue;
        const double d = distance(g, vs[k].position, vs[l].position);
        if (d < best) {
          best = d;
          best_k = k;
          best_l = l;
        }
      }
    }
    if (best >= r_core) break;

    AnnihilationEvent ev;
    ev.first = vs[best_l];
    ev.second = vs[best_k];
    ev.separation = best;
    ev.energy_before = energy_of(current);

    const Charge merged_charge = ev.first.charge + ev.second.charge;
    std::vector<Vortex> next;
    next.reserve(vs.size() - 1);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i != best_k && i != best_l) next.push_back(vs[i]);
    }
    if (merged_charge != 0) {
      const double wa = static_cast<double>(std::abs(ev.first.charge));
      const double wb = static_cast<double>(std::abs(ev.second.charge));
      const Complex p = ev.first.position +
                        (wb / (wa + wb)) * separation(g, ev.second.position, ev.first.position);
      Vortex m{g.is_torus() ? reduce_position(g, p) : p, merged_charge};
      ev.merged = m;
      // keep the merged vortex where the lower-index partner was
      next.insert(next.begin() + static_cast<std::ptrdiff_t>(best_l), m);
    }
    vs = std::move(next);
    current = Configuration(g, vs);
    ev.energy_after = energy_of(current);
    events.push_back(ev);
  }
  return {std::move(current), std::move(events)};
}

struct IntegrationOptions {
  double eta_step = 0.05;       // step cap h <= eta_step * d_min^2
  double tolerance = 1e-12;     // local position error per step
  double output_interval = 0.0; // 0: emit only t = 0 and t_end
  bool annihilation = false;
  double r_core = 1e-3;
  double min_step = 1e-14;
  double coincidence_eps = kDefaultCoincidenceEps;
  std::size_t max_steps = 200'000'000;
};

namespace detail {

class Rk4Stepper {
 public:
  Rk4Stepper(const Geometry& g, std::span<const Vortex> vs, double eps)
      : g_(g), vs_(vs), eps_(eps) {}

  std::vector<Complex> rate(std::span<const Complex> z) const {
    return velocity_field(g_, vs_, z, eps_);
  }

  // RK4 increment over h (not the new position, so the caller can add it
  // with compensated summation).
  std::vector<Complex> increment(std::span<const Complex> z, const std::vector<Complex>& k1,
                                 double h) const {
    const std::size_t n = z.size();
    std::vector<Complex> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
    const auto k2 = rate(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
    const auto k3 = rate(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
    const auto k4 = rate(tmp);
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }

 private:
  const Geometry& g_;
  std::span<const Vortex> vs_;
  double eps_;
};

}  // namespace detail

/// Integrate the vortex equations of motion to t_end with classical RK4.
///
/// The step is capped at eta_step * d_min^2 (the fastest pair timescale) and
/// further controlled by step doubling against `tolerance`. States are
/// emitted at t = 0, every `output_interval`, and t_end. An empty initial
/// configuration yields an empty trajectory.
inline std::vector<TrajectoryState> integrate(const Configuration& initial, double t_end,
                                              const IntegrationOptions& opt = {}) {
  const auto report = admissibility(initial);
  if (!report.dynamics_supported || initial.geometry().is_sphere()) {
    throw Error(ErrorCode::inadmissible,
                report.reasons.empty() ? std::string("geometry does not support dynamics")
                                       : report.reasons.front());
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::invalid_argument, "t_end must be positive and finite");
  }
  if (!(opt.eta_step > 0.0) || !(opt.tolerance > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "eta_step and tolerance must be positive");
  }
  std::vector<TrajectoryState> out;
  if (initial.empty()) return out;

  const auto& g = initial.geometry();
  Configuration config = initial;
  std::vector<AnnihilationEvent> pending;
  if (opt.annihilation) {
    auto [c, ev] = annihilate(config, opt.r_core);
    config = std::move(c);
    pending = std::move(ev);
  }
  config.require_distinct(opt.coincidence_eps);

  const auto emit = [&](double t) {
    TrajectoryState s{t, config, {}, std::move(pending)};
    if (!config.empty()) s.conserved = conserved_set(config, 0.0);
    out.push_back(std::move(s));
    pending.clear();
  };
  emit(0.0);

  const double interval = opt.output_interval > 0.0 ? opt.output_interval : t_end;
  std::size_t output_index = 1;
  const auto next_output = [&] { return std::min(t_end, interval * double(output_index)); };

  double t = 0.0;
  double h_try = std::numeric_limits<double>::infinity();
  // Kahan compensation for the position sums: far-travelling vortices would
  // otherwise accumulate one rounding per step at large |z|
  std::vector<Complex> carry(config.size());
  std::size_t steps = 0;
  while (t < t_end) {
    const double t_out = next_output();
    if (config.size() < 2) {
      // no interactions: nothing moves
      t = t_out;
    } else {
      if (++steps > opt.max_steps) {
        throw Error(ErrorCode::step_underflow, "integration exceeded max_steps");
      }
      const double d_min = config.min_separation();
      const double h_cap = opt.eta_step * d_min * d_min;
      if (h_cap < opt.min_step) {
        throw Error(ErrorCode::step_underflow,
                    "step size underflow: vortex pair approaching coincidence (d_min = " +
                        std::to_string(d_min) + ")");
      }
      double h = std::min(h_try, h_cap);
      const double remaining = t_out - t;
      const bool clipped = h >= remaining;
      if (clipped) h = remaining;

      const detail::Rk4Stepper stepper(g, config.vortices(), 0.0);
      const auto z = config.positions();
      const auto k1 = stepper.rate(z);
      const auto full = stepper.increment(z, k1, h);
      auto twice = stepper.increment(z, k1, 0.5 * h);
      std::vector<Complex> half(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) half[i] = z[i] + twice[i];
      const auto second = stepper.increment(half, stepper.rate(half), 0.5 * h);
      for (std::size_t i = 0; i < z.size(); ++i) twice[i] += second[i];

      double err = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) err = std::max(err, std::abs(twice[i] - full[i]));
      const double ratio = err / (15.0 * opt.tolerance);
      if (std::isfinite(ratio) && ratio <= 1.0) {
        t = clipped ? t_out : t + h;
        std::vector<Complex> next(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
          const Complex y = twice[i] - carry[i];
          next[i] = z[i] + y;
          carry[i] = (next[i] - z[i]) - y;
        }
        config = config.with_positions(next);
        const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 4.0;
        if (!clipped || grow < 1.0) h_try = h * std::clamp(grow, 0.2, 4.0);
        if (opt.annihilation) {
          auto [c, ev] = annihilate(config, opt.r_core);
          if (!ev.empty()) {
            for (auto& e : ev) e.time = t;
            pending.insert(pending.end(), ev.begin(), ev.end());
            config = std::move(c);
            carry.assign(config.size(), Complex{});
          }
        }
      } else {
        const double shrink = std::isfinite(ratio) ? 0.9 * std::pow(ratio, -0.2) : 0.1;
        h_try = h * std::clamp(shrink, 0.1, 0.9);
        if (h_try < opt.min_step) {
          throw Error(ErrorCode::step_underflow, "step size underflow in error control");
        }
        continue;
      }
    }
    if (t >= t_out) {
      emit(t_out);
      ++output_index;
    }
  }
  return out;
}

}  // namespace vortexgas
