#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace vortexgas::special {

/// First Jacobi theta function and its derivative in u, evaluated together.
template <typename Real>
struct Theta1Value {
  std::complex<Real> value;
  std::complex<Real> derivative;
};

/// theta_1(u; q) with nome q = exp(-pi * tau_im), tau_im > 0, from the series
///
///   theta_1(u) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) u).
///
/// The series is cut once the remaining terms are bounded below `rel_tol`
/// relative to the partial sum. Terms grow like exp((2n+1)|Im u|) before the
/// Gaussian factor wins, so callers should reduce u to |Im u| <= pi*tau_im/2
/// (the torus kernel does).
template <typename Real>
Theta1Value<Real> theta1(std::complex<Real> u, Real tau_im,
                         Real rel_tol = Real(1e-16)) {
  using C = std::complex<Real>;
  const Real pi = std::numbers::pi_v<Real>;
  const Real abs_im = std::abs(u.imag());
  // after this index the bound on |term| is strictly decreasing
  const Real peak = abs_im / (pi * tau_im);

  C sum{0, 0};
  C dsum{0, 0};
  const Real abs_u = std::abs(u);
  for (int n = 0; n < 10000; ++n) {
    const Real half = Real(n) + Real(0.5);
    const Real weight = std::exp(-pi * tau_im * half * half);
    if (weight == Real(0)) break;
    const Real k = Real(2 * n + 1);
    const C arg = k * u;
    const Real sign = (n % 2 == 0) ? Real(1) : Real(-1);
    sum += sign * weight * std::sin(arg);
    dsum += sign * weight * k * std::cos(arg);

    // bound the next term: |sin z| <= min(cosh Im z, sinh |z|), |cos z| <= cosh Im z
    const Real next_half = half + Real(1);
    if (next_half <= peak) continue;
    const Real next_weight = std::exp(-pi * tau_im * next_half * next_half);
    const Real next_k = k + Real(2);
    const Real next_value =
        next_weight * std::min(std::cosh(next_k * abs_im), std::sinh(next_k * abs_u));
    const Real next_deriv = next_weight * next_k * std::cosh(next_k * abs_im);
    if (next_value <= rel_tol * std::abs(sum) && next_deriv <= rel_tol * std::abs(dsum)) {
      break;
    }
  }
  return {Real(2) * sum, Real(2) * dsum};
}

}  // namespace vortexgas::special
