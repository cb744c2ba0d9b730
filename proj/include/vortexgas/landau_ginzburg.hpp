#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vortexgas/error.hpp"

namespace vortexgas::lg {

using Coefficient = std::function<double(double)>;

/// Truncated Landau-Ginzburg free energy
///
///   F = |grad Psi|^2 / 2m + a(T) |Psi|^2 + b(T) |Psi|^4 + c(T) |Psi|^6,
///
/// with the c term optional. Only the sign structure of a, b is physical
/// input; the functional forms are user choices.
struct LGModel {
  Coefficient a;
  Coefficient b;
  std::optional<Coefficient> c;
  double mass = 1.0;
  double critical_temperature = 1.0;

  /// a(T) = a0 (T - Tc), b and c constant.
  static LGModel linear(double a0, double b, std::optional<double> c = std::nullopt,
                        double mass = 1.0, double tc = 1.0) {
    LGModel m;
    m.a = [a0, tc](double t) { return a0 * (t - tc); };
    m.b = [b](double) { return b; };
    if (c) m.c = [cv = *c](double) { return cv; };
    m.mass = mass;
    m.critical_temperature = tc;
    return m;
  }

  /// Temperature-independent coefficients; Tc only selects which sign rule
  /// applies at a queried T.
  static LGModel constant(double a, double b, std::optional<double> c = std::nullopt,
                          double mass = 1.0, double tc = 1.0) {
    LGModel m;
    m.a = [a](double) { return a; };
    m.b = [b](double) { return b; };
    if (c) m.c = [cv = *c](double) { return cv; };
    m.mass = mass;
    m.critical_temperature = tc;
    return m;
  }
};

struct Coefficients {
  double a, b, c;
};

/// Sign rules as stated for the vortex-bearing transition: b(T) > 0 above
/// Tc, a(T)/b(T) < 0 below. Nothing is required exactly at Tc.
inline Coefficients evaluate(const LGModel& model, double T) {
  if (!(model.mass > 0.0)) throw Error(ErrorCode::model_validation, "mass must be positive");
  if (!std::isfinite(T)) throw Error(ErrorCode::model_validation, "temperature must be finite");
  const Coefficients k{model.a(T), model.b(T), model.c ? (*model.c)(T) : 0.0};
  const double tc = model.critical_temperature;
  if (T > tc && !(k.b > 0.0)) {
    throw Error(ErrorCode::model_validation,
                "model invalid at T = " + std::to_string(T) + ": b(T) must be > 0 above Tc");
  }
  if (T < tc && !(k.b != 0.0 && k.a / k.b < 0.0)) {
    throw Error(ErrorCode::model_validation,
                "model invalid at T = " + std::to_string(T) + ": a(T)/b(T) must be < 0 below Tc");
  }
  return k;
}

inline double free_energy_density(const LGModel& model, double T, double psi_sq,
                                  double grad_sq) {
  if (!(psi_sq >= 0.0) || !(grad_sq >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "psi_sq and grad_sq must be nonnegative");
  }
  const auto k = evaluate(model, T);
  return grad_sq / (2.0 * model.mass) + psi_sq * (k.a + psi_sq * (k.b + psi_sq * k.c));
}

namespace detail {

inline double uniform_energy(const Coefficients& k, double x) {
  return x * (k.a + x * (k.b + x * k.c));
}

inline void push_root(std::vector<double>& roots, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) return;
  for (double r : roots) {
    if (std::abs(r - x) <= 1e-12 * std::max(std::abs(r), std::abs(x))) return;
  }
  roots.push_back(x);
}

}  // namespace detail

/// Candidate |Psi|^2 values: 0 together with the nonnegative real roots of
/// a + 2b x + 3c x^2 = 0, ascending and distinct.
inline std::vector<double> stationary_moduli(const LGModel& model, double T) {
  const auto k = evaluate(model, T);
  std::vector<double> roots{0.0};
  if (k.c != 0.0) {
    const double A = 3.0 * k.c, B = 2.0 * k.b, C = k.a;
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      const double q = -0.5 * (B + std::copysign(s, B));
      if (q != 0.0) {
        detail::push_root(roots, q / A);
        detail::push_root(roots, C / q);
      } else {
        detail::push_root(roots, 0.0);
      }
    } else {
      // nearly-double roots whose imaginary part is roundoff
      const double re = -B / (2.0 * A);
      const double im = std::sqrt(-disc) / (2.0 * std::abs(A));
      if (im <= 1e-12 * std::abs(re)) detail::push_root(roots, re);
    }
  } else if (k.b != 0.0) {
    detail::push_root(roots, -k.a / (2.0 * k.b));
  } else if (k.a != 0.0) {
    throw Error(ErrorCode::degenerate_model, "degenerate model: b = c = 0 with a != 0");
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

enum class Branch { normal, superfluid };

inline std::string_view to_string(Branch b) noexcept {
  return b == Branch::normal ? "normal" : "superfluid";
}

struct OrderParameterResult {
  double temperature = 0.0;
  double psi_min = 0.0;  // |Psi_min|; the sign/phase is a convention
  Branch branch = Branch::normal;
  double free_energy_min = 0.0;
};

/// Global minimizer of the uniform free energy over the stationary moduli.
/// Ties go to the smaller modulus.
inline OrderParameterResult order_parameter(const LGModel& model, double T) {
  const auto k = evaluate(model, T);
  const auto candidates = stationary_moduli(model, T);
  double best_x = candidates.front();
  double best_f = detail::uniform_energy(k, best_x);
  for (double x : candidates) {
    const double f = detail::uniform_energy(k, x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return {T, std::sqrt(best_x), best_x > 0.0 ? Branch::superfluid : Branch::normal, best_f};
}

inline std::vector<OrderParameterResult> temperature_sweep(const LGModel& model,
                                                           const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "temperature grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw Error(ErrorCode::invalid_argument, "temperature grid must be ascending");
  }
  std::vector<OrderParameterResult> out;
  out.reserve(grid.size());
  for (double T : grid) {
    try {
      out.push_back(order_parameter(model, T));
    } catch (const Error& e) {
      throw Error(e.code(), "at T = " + std::to_string(T) + ": " + e.what());
    }
  }
  return out;
}

struct RelevanceReport {
  double temperature = 0.0;
  int nontrivial_stationary = 0;  // distinct x > 0 solving the stationarity condition
  int nontrivial_minima = 0;      // of those, strict local minima
  bool physically_relevant = true;
  std::string note;
};

/// Advisory only. Affine vortex dynamics forces genus 1, which limits the
/// gauge group to one U(1): at most one nontrivial stationary solution.
inline RelevanceReport relevance_check(const LGModel& model, double T) {
  const auto k = evaluate(model, T);
  RelevanceReport r;
  r.temperature = T;
  for (double x : stationary_moduli(model, T)) {
    if (x <= 0.0) continue;
    ++r.nontrivial_stationary;
    if (2.0 * k.b + 6.0 * k.c * x > 0.0) ++r.nontrivial_minima;
  }
  r.physically_relevant = r.nontrivial_stationary <= 1;
  r.note = r.physically_relevant
               ? "at most one nontrivial root: compatible with a genus-1 (torus) surface"
               : "more than one nontrivial root: would enlarge the gauge group and force "
                 "genus > 1, incompatible with affine vortex dynamics";
  return r;
}

}  // namespace vortexgas::lg
