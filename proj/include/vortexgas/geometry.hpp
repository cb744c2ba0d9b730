#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "vortexgas/error.hpp"
#include "vortexgas/theta.hpp"

namespace vortexgas {

using Complex = std::complex<double>;

enum class GeometryKind { plane, torus, sphere };

constexpr std::string_view to_string(GeometryKind kind) noexcept {
  switch (kind) {
    case GeometryKind::plane: return "plane";
    case GeometryKind::torus: return "torus";
    case GeometryKind::sphere: return "sphere";
  }
  return "unknown";
}

/// Surface the vortices live on. The plane is treated in its compactified
/// torus context (genus 1); the sphere exists only so it can be rejected.
class Geometry {
 public:
  static constexpr double kMinAspect = 0.1;
  static constexpr double kMaxAspect = 10.0;

  static Geometry plane() { return Geometry(GeometryKind::plane, 0.0, 0.0); }
  static Geometry sphere() { return Geometry(GeometryKind::sphere, 0.0, 0.0); }

  /// Rectangular torus [0,L1) x [0,L2). The aspect ratio L2/L1 must lie in
  /// [0.1, 10] unless `allow_extreme_aspect` is set.
  static Geometry torus(double L1, double L2, bool allow_extreme_aspect = false) {
    if (!(L1 > 0.0) || !(L2 > 0.0) || !std::isfinite(L1) || !std::isfinite(L2)) {
      throw Error(ErrorCode::invalid_argument, "torus periods must be finite and positive");
    }
    const double aspect = L2 / L1;
    if (!allow_extreme_aspect && (aspect < kMinAspect || aspect > kMaxAspect)) {
      throw Error(ErrorCode::invalid_argument,
                  "torus aspect ratio L2/L1 = " + std::to_string(aspect) +
                      " outside [0.1, 10]; allow_extreme_aspect overrides");
    }
    return Geometry(GeometryKind::torus, L1, L2);
  }

  GeometryKind kind() const noexcept { return kind_; }
  double L1() const noexcept { return L1_; }
  double L2() const noexcept { return L2_; }
  bool is_torus() const noexcept { return kind_ == GeometryKind::torus; }
  bool is_plane() const noexcept { return kind_ == GeometryKind::plane; }
  bool is_sphere() const noexcept { return kind_ == GeometryKind::sphere; }

  int genus() const noexcept { return kind_ == GeometryKind::sphere ? 0 : 1; }

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  Geometry(GeometryKind kind, double L1, double L2) : kind_(kind), L1_(L1), L2_(L2) {}

  GeometryKind kind_;
  double L1_;
  double L2_;
};

inline constexpr double kDefaultCoincidenceEps = 1e-12;

namespace detail {

inline void require_interacting(const Geometry& g) {
  if (g.is_sphere()) {
    throw Error(ErrorCode::unsupported_geometry,
                "genus 0: no nontrivial vanishing-Chern-class bundles, vortices cannot "
                "exist on a sphere");
  }
}

inline double wrap(double x, double period) {
  double r = x - period * std::floor(x / period);
  if (r >= period) r -= period;
  if (r < 0.0) r = 0.0;
  return r;
}

}  // namespace detail

/// Canonical representative of z in [0,L1) x [0,L2).
inline Complex reduce_position(const Geometry& g, Complex z) {
  if (!g.is_torus()) {
    throw Error(ErrorCode::unsupported_geometry, "reduce_position requires a torus geometry");
  }
  return {detail::wrap(z.real(), g.L1()), detail::wrap(z.imag(), g.L2())};
}

/// Separation z - w; on the torus, the lattice image with components in
/// [-L/2, L/2].
inline Complex separation(const Geometry& g, Complex z, Complex w) {
  Complex d = z - w;
  if (g.is_torus()) {
    d = {d.real() - g.L1() * std::round(d.real() / g.L1()),
         d.imag() - g.L2() * std::round(d.imag() / g.L2())};
  }
  return d;
}

inline double distance(const Geometry& g, Complex z, Complex w) {
  return std::abs(separation(g, z, w));
}

namespace detail {

inline void require_separated(Complex d, double eps) {
  if (!(std::abs(d) >= eps)) {
    throw Error(ErrorCode::coincident_vortices,
                "coincident positions: separation " + std::to_string(std::abs(d)) +
                    " below epsilon");
  }
}

inline double torus_kernel(const Geometry& g, Complex d) {
  const double pi = std::numbers::pi;
  const auto theta = special::theta1(pi * d / g.L1(), g.L2() / g.L1());
  return std::log(std::abs(theta.value)) - pi * d.imag() * d.imag() / (g.L1() * g.L2());
}

}  // namespace detail

/// Logarithmic pair interaction K(z, w). Plane: log|z - w|. Torus: the
/// doubly periodic theta-function kernel with additive constant zero.
inline double pair_kernel(const Geometry& g, Complex z, Complex w,
                          double eps = kDefaultCoincidenceEps) {
  detail::require_interacting(g);
  const Complex d = separation(g, z, w);
  detail::require_separated(d, eps);
  if (g.is_plane()) return std::log(std::abs(d));
  return detail::torus_kernel(g, d);
}

/// dK/d(conj z) for the kernel K(z, w), i.e. the Wirtinger derivative in the
/// first argument.
inline Complex pair_kernel_dzbar(const Geometry& g, Complex z, Complex w,
                                 double eps = kDefaultCoincidenceEps) {
  detail::require_interacting(g);
  const Complex d = separation(g, z, w);
  detail::require_separated(d, eps);
  if (g.is_plane()) return 0.5 / std::conj(d);
  const double pi = std::numbers::pi;
  const auto theta = special::theta1(pi * d / g.L1(), g.L2() / g.L1());
  const Complex log_deriv = (pi / g.L1()) * theta.derivative / theta.value;
  return 0.5 * std::conj(log_deriv) - Complex(0.0, pi * d.imag() / (g.L1() * g.L2()));
}

/// Chern class of the canonical bundle of a genus-g surface, 2(g - 1).
inline long long canonical_chern(long long genus) {
  if (genus < 0) throw Error(ErrorCode::invalid_argument, "genus must be nonnegative");
  return 2 * (genus - 1);
}

}  // namespace vortexgas
