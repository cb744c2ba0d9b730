// Integrates a vortex dipole and a co-rotating pair and prints how far each
// ends up from the closed-form answer.

#include <cstdio>
#include <numbers>

#include "vortexgas/dynamics.hpp"

int main() {
  using namespace vortexgas;
  const auto plane = Geometry::plane();

  const Configuration dipole(plane, {{{0, 0}, 1}, {{1, 0}, -1}});
  IntegrationOptions opt;
  opt.output_interval = 2.5;
  for (const auto& s : integrate(dipole, 10.0, opt)) {
    const auto& c = s.config;
    std::printf("t=%5.2f  z0=(%.6f, %.6f)  z1=(%.6f, %.6f)  H=%.12f\n", s.time, c[0].position.real(),
                c[0].position.imag(), c[1].position.real(), c[1].position.imag(), s.conserved.energy);
  }

  const Configuration pair(plane, {{{0.5, 0}, 1}, {{-0.5, 0}, 1}});
  const auto end = integrate(pair, std::numbers::pi).back().config;
  std::printf("co-rotating pair after one period: |dz0| = %.3e, |dz1| = %.3e\n",
              std::abs(end[0].position - pair[0].position), std::abs(end[1].position - pair[1].position));
}
