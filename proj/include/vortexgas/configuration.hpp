#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vortexgas/error.hpp"
#include "vortexgas/geometry.hpp"

namespace vortexgas {

using Charge = std::int64_t;

/// Point vortex: position in reduced length units and a nonzero integer
/// circulation quantum count.
struct Vortex {
  Complex position;
  Charge charge;

  friend bool operator==(const Vortex&, const Vortex&) = default;
};

inline void validate(const Vortex& v) {
  if (v.charge == 0) throw Error(ErrorCode::invalid_argument, "vortex charge must be nonzero");
  if (!std::isfinite(v.position.real()) || !std::isfinite(v.position.imag())) {
    throw Error(ErrorCode::invalid_argument, "vortex position must be finite");
  }
}

/// Ordered vortex list bound to a geometry. Torus positions are stored in
/// their canonical fundamental-domain representative. Pairwise distinctness
/// is checked by the operations that need finite logarithms, against their
/// own epsilon.
class Configuration {
 public:
  explicit Configuration(Geometry geometry, std::vector<Vortex> vortices = {})
      : geometry_(geometry), vortices_(std::move(vortices)) {
    for (auto& v : vortices_) {
      validate(v);
      if (geometry_.is_torus()) v.position = reduce_position(geometry_, v.position);
    }
  }

  const Geometry& geometry() const noexcept { return geometry_; }
  std::span<const Vortex> vortices() const noexcept { return vortices_; }
  std::size_t size() const noexcept { return vortices_.size(); }
  bool empty() const noexcept { return vortices_.empty(); }
  const Vortex& operator[](std::size_t i) const { return vortices_.at(i); }

  Charge total_charge() const noexcept {
    Charge q = 0;
    for (const auto& v : vortices_) q += v.charge;
    return q;
  }

  /// Same charges, new positions (reduced on the torus).
  Configuration with_positions(std::span<const Complex> positions) const {
    if (positions.size() != vortices_.size()) {
      throw Error(ErrorCode::invalid_argument, "position count does not match vortex count");
    }
    std::vector<Vortex> out = vortices_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].position = positions[i];
    return Configuration(geometry_, std::move(out));
  }

  std::vector<Complex> positions() const {
    std::vector<Complex> out;
    out.reserve(vortices_.size());
    for (const auto& v : vortices_) out.push_back(v.position);
    return out;
  }

  /// Smallest pairwise separation (geometry metric); +inf for fewer than two.
  double min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < vortices_.size(); ++k) {
      for (std::size_t l = 0; l < k; ++l) {
        best = std::min(best, distance(geometry_, vortices_[k].position, vortices_[l].position));
      }
    }
    return best;
  }

  void require_distinct(double eps = kDefaultCoincidenceEps) const {
    if (vortices_.size() > 1 && !(min_separation() >= eps)) {
      throw Error(ErrorCode::coincident_vortices,
                  "configuration has coincident vortices (separation below " +
                      std::to_string(eps) + ")");
    }
  }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  Geometry geometry_;
  std::vector<Vortex> vortices_;
};

}  // namespace vortexgas
