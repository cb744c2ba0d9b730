#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "vortexgas/configuration.hpp"
#include "vortexgas/error.hpp"

namespace vortexgas {

struct DivisorPoint {
  Complex position;
  Charge order;

  friend bool operator==(const DivisorPoint&, const DivisorPoint&) = default;
};

/// Formal sum of orders of zeros (order > 0) and poles (order < 0).
/// Points are distinct and kept in first-appearance order.
class Divisor {
 public:
  Divisor() = default;

  explicit Divisor(std::vector<DivisorPoint> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].order == 0) {
        throw Error(ErrorCode::invalid_argument, "divisor orders must be nonzero");
      }
      if (!std::isfinite(points_[i].position.real()) ||
          !std::isfinite(points_[i].position.imag())) {
        throw Error(ErrorCode::invalid_argument, "divisor positions must be finite");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (points_[j].position == points_[i].position) {
          throw Error(ErrorCode::invalid_argument, "divisor positions must be distinct");
        }
      }
    }
  }

  static Divisor from_configuration(const Configuration& config) {
    std::vector<DivisorPoint> pts;
    pts.reserve(config.size());
    for (const auto& v : config.vortices()) pts.push_back({v.position, v.charge});
    return Divisor(std::move(pts));
  }

  std::span<const DivisorPoint> points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }

  Charge degree() const noexcept {
    Charge d = 0;
    for (const auto& p : points_) d += p.order;
    return d;
  }

  /// Order-independent equality of the formal sums.
  friend bool operator==(const Divisor& a, const Divisor& b) {
    if (a.points_.size() != b.points_.size()) return false;
    return std::all_of(a.points_.begin(), a.points_.end(), [&](const DivisorPoint& p) {
      return std::find(b.points_.begin(), b.points_.end(), p) != b.points_.end();
    });
  }

 private:
  std::vector<DivisorPoint> points_;
};

/// Class of f(z) = prod (z - z_k)^{n_k} modulo nonvanishing holomorphic
/// factors, carried entirely by its divisor. The product itself is never
/// evaluated.
class FlowPotential {
 public:
  FlowPotential() = default;
  explicit FlowPotential(Divisor divisor) : divisor_(std::move(divisor)) {}

  static FlowPotential from_configuration(const Configuration& config) {
    return FlowPotential(Divisor::from_configuration(config));
  }

  const Divisor& divisor() const noexcept { return divisor_; }

  friend bool operator==(const FlowPotential&, const FlowPotential&) = default;

 private:
  Divisor divisor_;
};

/// f'/f = sum_k n_k / (z - z_k).
inline Complex log_derivative(const FlowPotential& f, Complex z) {
  Complex sum{0.0, 0.0};
  for (const auto& p : f.divisor().points()) {
    const Complex d = z - p.position;
    if (d == Complex{0.0, 0.0}) {
      throw Error(ErrorCode::singular_evaluation, "log_derivative evaluated at a divisor point");
    }
    sum += static_cast<double>(p.order) / d;
  }
  return sum;
}

struct Circle {
  Complex center;
  double radius;
};

struct CirculationResult {
  Charge winding = 0;         // sum of enclosed orders
  double raw = 0.0;           // real part of the quadrature value
  double residual = 0.0;      // distance of the raw value from `winding`
  std::size_t nodes = 0;

  /// Circulation in reduced units, (h/m) * winding = 2 pi * winding.
  double circulation() const noexcept { return 2.0 * std::numbers::pi * double(winding); }
};

struct CirculationOptions {
  std::size_t max_nodes = std::size_t{1} << 22;
  double contour_clearance = 1e-9;
  double residual_tol = 1e-6;
};

/// (1/2 pi i) \oint f'/f dz over a circle by the periodic trapezoidal rule,
/// doubling the node count from `n_points` until the rounded value is stable
/// and its residual is below tolerance.
inline CirculationResult circulation(const FlowPotential& f, const Circle& contour,
                                     std::size_t n_points = 1024,
                                     const CirculationOptions& opt = {}) {
  if (n_points < 64) throw Error(ErrorCode::invalid_argument, "circulation needs >= 64 nodes");
  if (!(contour.radius > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "contour radius must be positive");
  }
  for (const auto& p : f.divisor().points()) {
    if (std::abs(std::abs(p.position - contour.center) - contour.radius) <
        opt.contour_clearance) {
      throw Error(ErrorCode::singular_evaluation, "contour passes through a divisor point");
    }
  }

  const auto quadrature = [&](std::size_t n) {
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double theta = 2.0 * std::numbers::pi * double(j) / double(n);
      const Complex e = std::polar(1.0, theta);
      sum += log_derivative(f, contour.center + contour.radius * e) * (contour.radius * e);
    }
    return sum / double(n);
  };

  std::optional<long long> previous;
  for (std::size_t n = n_points; n <= opt.max_nodes; n *= 2) {
    const Complex value = quadrature(n);
    const long long rounded = std::llround(value.real());
    const double residual = std::abs(value - Complex(double(rounded), 0.0));
    if (previous && *previous == rounded && residual < opt.residual_tol) {
      return {rounded, value.real(), residual, n};
    }
    previous = rounded;
  }
  throw Error(ErrorCode::quadrature_failure,
              "circulation quadrature did not converge to an integer within tolerance");
}

/// c = sum of orders.
inline Charge chern_class(const Divisor& d) { return d.degree(); }

/// Divisor of the product: orders add pointwise, cancelled points drop out.
inline FlowPotential multiply(const FlowPotential& a, const FlowPotential& b) {
  std::vector<DivisorPoint> pts(a.divisor().points().begin(), a.divisor().points().end());
  for (const auto& q : b.divisor().points()) {
    auto it = std::find_if(pts.begin(), pts.end(),
                           [&](const DivisorPoint& p) { return p.position == q.position; });
    if (it == pts.end()) {
      pts.push_back(q);
    } else {
      it->order += q.order;
    }
  }
  std::erase_if(pts, [](const DivisorPoint& p) { return p.order == 0; });
  return FlowPotential(Divisor(std::move(pts)));
}

struct Window {
  double x_min, x_max, y_min, y_max;
};

/// f'/f sampled on an nx-by-ny lattice spanning the window (inclusive of
/// edges). Nodes within `singular_radius` of a divisor point are missing.
struct FieldGrid {
  Window window;
  std::size_t nx = 0, ny = 0;
  std::vector<std::optional<Complex>> values;  // row-major, y outer

  double x(std::size_t i) const {
    return window.x_min + (window.x_max - window.x_min) * double(i) / double(nx - 1);
  }
  double y(std::size_t j) const {
    return window.y_min + (window.y_max - window.y_min) * double(j) / double(ny - 1);
  }
  const std::optional<Complex>& at(std::size_t i, std::size_t j) const {
    return values.at(j * nx + i);
  }
};

inline FieldGrid field_grid(const FlowPotential& f, const Window& window, std::size_t nx,
                            std::size_t ny, double singular_radius = 1e-6) {
  if (nx < 2 || ny < 2) throw Error(ErrorCode::invalid_argument, "grid resolution must be >= 2x2");
  if (!(window.x_max > window.x_min) || !(window.y_max > window.y_min)) {
    throw Error(ErrorCode::invalid_argument, "degenerate field window");
  }
  FieldGrid grid{window, nx, ny, {}};
  grid.values.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Complex z{grid.x(i), grid.y(j)};
      const bool singular = std::any_of(
          f.divisor().points().begin(), f.divisor().points().end(),
          [&](const DivisorPoint& p) { return std::abs(z - p.position) < singular_radius; });
      if (!singular) grid.values[j * nx + i] = log_derivative(f, z);
    }
  }
  return grid;
}

}  // namespace vortexgas
