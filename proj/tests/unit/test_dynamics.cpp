#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "vortexgas/dynamics.hpp"

namespace {

using namespace vortexgas;

const Geometry kPlane = Geometry::plane();

TEST(VelocityField, AnalyticTwoVortexCases) {
  for (double d : {0.5, 1.0, 3.0}) {
    const auto dip = velocity_field(Configuration(kPlane, {{{0, 0}, 1}, {{d, 0}, -1}}));
    EXPECT_NEAR(std::abs(dip[0] - Complex(0, 1 / d)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(dip[1] - Complex(0, 1 / d)), 0.0, 1e-15);

    const auto rot = velocity_field(Configuration(kPlane, {{{d / 2, 0}, 1}, {{-d / 2, 0}, 1}}));
    EXPECT_NEAR(std::abs(rot[0] - Complex(0, 1 / d)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(rot[1] - Complex(0, -1 / d)), 0.0, 1e-15);
  }
  const auto single = velocity_field(Configuration(kPlane, {{{0.3, 0.2}, 4}}));
  EXPECT_EQ(single[0], Complex(0, 0));
  EXPECT_THROW(velocity_field(Configuration(kPlane, {{{0, 0}, 1}, {{0, 0}, -1}})), Error);
}

// n_k dz_k/dt = -2i dH/d(conj z_k), dH/d(conj z) = (H_x + i H_y) / 2.
void expect_gradient_consistent(const Configuration& c, double tol) {
  const auto v = velocity_field(c);
  const double h = 1e-6;
  for (std::size_t k = 0; k < c.size(); ++k) {
    auto shifted = [&](Complex dz) {
      auto z = c.positions();
      z[k] += dz;
      return hamiltonian(c.with_positions(z));
    };
    const double hx = (shifted(h) - shifted(-h)) / (2 * h);
    const double hy = (shifted(Complex(0, h)) - shifted(Complex(0, -h))) / (2 * h);
    const Complex rhs = Complex(0, -2) * 0.5 * Complex(hx, hy);
    const Complex lhs = double(c[k].charge) * v[k];
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, tol * std::max(1.0, std::abs(lhs)));
  }
}

TEST(VelocityField, GradientOfHamiltonianPlane) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) expect_gradient_consistent(oracle::random_charged(rng, kPlane, 6), 1e-6);
}

TEST(VelocityField, GradientOfHamiltonianTorus) {
  Rng rng(6);
  const auto g = Geometry::torus(1.0, 1.3);
  for (int i = 0; i < 20; ++i) expect_gradient_consistent(oracle::random_neutral(rng, g, 3, 1.0, 0.1), 1e-6);
}

TEST(Annihilate, Examples) {
  {
    const Configuration c(kPlane, {{{0, 0}, 1}, {{0.001, 0}, -1}});
    auto [out, events] = annihilate(c, 0.01);
    EXPECT_TRUE(out.empty());
    ASSERT_EQ(events.size(), 1u);
    EXPECT_FALSE(events[0].merged.has_value());
    EXPECT_NEAR(events[0].separation, 0.001, 1e-15);
    EXPECT_TRUE(std::isfinite(events[0].energy_before));
    EXPECT_EQ(events[0].energy_after, 0.0);
    EXPECT_EQ(out.total_charge(), 0);
  }
  {
    const Configuration c(kPlane, {{{0, 0}, 2}, {{0.001, 0}, -1}});
    auto [out, events] = annihilate(c, 0.01);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].charge, 1);
    // |n|-weighted midpoint: (2*0 + 1*0.001) / 3
    EXPECT_NEAR(std::abs(out[0].position - Complex(0.001 / 3, 0)), 0.0, 1e-18);
    EXPECT_EQ(out.total_charge(), c.total_charge());
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].merged->charge, 1);
  }
  {
    const Configuration c(kPlane, {{{0, 0}, 1}, {{0.001, 0}, 1}});
    auto [out, events] = annihilate(c, 0.01);
    EXPECT_EQ(out, c);
    EXPECT_TRUE(events.empty());
  }
  EXPECT_THROW(annihilate(Configuration(kPlane), 0.0), Error);
}

TEST(Annihilate, ChainedMergesConserveCharge) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = oracle::random_charged(rng, kPlane, 12, 3, 0.05, 0.0);
    auto [out, events] = annihilate(c, 0.03);
    EXPECT_EQ(out.total_charge(), c.total_charge());
    for (const auto& e : events) {
      EXPECT_LT(e.first.charge * e.second.charge, 0);
      EXPECT_LT(e.separation, 0.03);
    }
    // nothing left to annihilate
    auto [again, none] = annihilate(out, 0.03);
    EXPECT_TRUE(none.empty());
  }
}

TEST(Annihilate, TorusUsesMinimumImage) {
  const auto g = Geometry::torus(1, 1);
  const Configuration c(g, {{{0.9995, 0.5}, 2}, {{0.0005, 0.5}, -1}});
  auto [out, events] = annihilate(c, 0.01);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(distance(g, out[0].position, {0.9995 + 0.001 / 3, 0.5}), 0.0, 1e-12);
}

TEST(Integrate, DipoleTranslatesUniformly) {
  const auto states = integrate(Configuration(kPlane, {{{0, 0}, 1}, {{1, 0}, -1}}), 1.0);
  ASSERT_EQ(states.size(), 2u);
  EXPECT_EQ(states.back().time, 1.0);
  EXPECT_NEAR(std::abs(states.back().config[0].position - Complex(0, 1)), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(states.back().config[1].position - Complex(1, 1)), 0.0, 1e-8);
}

TEST(Integrate, CoRotatingPairPeriod) {
  for (double d : {0.5, 1.0, 2.0}) {
    const Configuration c(kPlane, {{{d / 2, 0}, 1}, {{-d / 2, 0}, 1}});
    const double period = std::numbers::pi * d * d;
    const auto states = integrate(c, period);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_LT(std::abs(states.back().config[k].position - c[k].position) / (d / 2), 1e-6);
    }
    // half a period swaps the two vortices
    IntegrationOptions opt;
    opt.output_interval = period / 2;
    const auto half = integrate(c, period, opt);
    ASSERT_EQ(half.size(), 3u);
    EXPECT_LT(std::abs(half[1].config[0].position - c[1].position), 1e-6 * d);
  }
}

TEST(Integrate, EmptyAndErrors) {
  EXPECT_TRUE(integrate(Configuration(kPlane), 5.0).empty());
  EXPECT_THROW(integrate(Configuration(kPlane, {{{0, 0}, 1}}), 0.0), Error);
  try {
    integrate(Configuration(Geometry::sphere(), {{{0, 0}, 1}}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::inadmissible);
    EXPECT_NE(std::string(e.what()).find("genus 0"), std::string::npos);
  }
  EXPECT_THROW(integrate(Configuration(kPlane, {{{0, 0}, 1}, {{0, 0}, -1}}), 1.0), Error);
}

TEST(Integrate, StepUnderflowWithoutAnnihilation) {
  // a step floor above eta * d_min^2 for a tight pair
  IntegrationOptions opt;
  opt.min_step = 1e-3;
  try {
    integrate(Configuration(kPlane, {{{0, 0}, 1}, {{0.01, 0}, -1}}), 1.0, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::step_underflow);
  }
}

TEST(Integrate, OutputTimesAndSingleVortex) {
  IntegrationOptions opt;
  opt.output_interval = 0.25;
  const auto states = integrate(Configuration(kPlane, {{{0.5, 0.5}, 3}}), 1.0, opt);
  ASSERT_EQ(states.size(), 5u);
  for (std::size_t i = 0; i < states.size(); ++i) {
    EXPECT_DOUBLE_EQ(states[i].time, 0.25 * double(i));
    EXPECT_EQ(states[i].config[0].position, Complex(0.5, 0.5));
  }
}

TEST(Integrate, DipoleMomentsConstant) {
  IntegrationOptions opt;
  opt.output_interval = 0.5;
  const auto states = integrate(Configuration(kPlane, {{{0.2, 0.1}, 1}, {{-0.3, 0.4}, -1}}), 5.0, opt);
  const auto& c0 = states.front().conserved;
  for (const auto& s : states) {
    EXPECT_NEAR(std::abs(*s.conserved.dipole_moment - *c0.dipole_moment), 0.0, 1e-8);
    EXPECT_NEAR(*s.conserved.angular_moment, *c0.angular_moment, 1e-8);
  }
}

TEST(Integrate, TimeReversalByChargeNegation) {
  Rng rng(31);
  const auto c = oracle::random_charged(rng, kPlane, 5, 2, 1.0, 0.3);
  const double t = 0.5;
  const auto forward = integrate(c, t).back().config;
  const auto back = integrate(negate_charges(forward), t).back().config;
  for (std::size_t k = 0; k < c.size(); ++k) {
    EXPECT_LT(std::abs(back[k].position - c[k].position), 1e-6);
  }
}

TEST(Integrate, TorusConservesEnergyAndStaysInDomain) {
  Rng rng(12);
  const auto g = Geometry::torus(1, 1);
  const auto c = oracle::random_neutral(rng, g, 3, 1.0, 0.15);
  IntegrationOptions opt;
  opt.output_interval = 0.1;
  const auto states = integrate(c, 1.0, opt);
  const double h0 = states.front().conserved.energy;
  for (const auto& s : states) {
    EXPECT_LT(std::abs(s.conserved.energy - h0), 1e-7 * std::max(1.0, std::abs(h0)));
    EXPECT_FALSE(s.conserved.dipole_moment.has_value());
    for (const auto& v : s.config.vortices()) {
      EXPECT_GE(v.position.real(), 0.0);
      EXPECT_LT(v.position.real(), 1.0);
      EXPECT_GE(v.position.imag(), 0.0);
      EXPECT_LT(v.position.imag(), 1.0);
    }
  }
}

TEST(Integrate, AnnihilationEventsConserveCharge) {
  // the first pair starts inside r_core
  IntegrationOptions opt;
  opt.annihilation = true;
  opt.r_core = 0.01;
  const Configuration c(kPlane, {{{0, 0}, 1}, {{0.005, 0}, -1}, {{2, 0}, 2}, {{2.5, 0.5}, -1}});
  const auto states = integrate(c, 1.0, opt);
  ASSERT_FALSE(states.front().events.empty());
  for (const auto& s : states) EXPECT_EQ(s.config.total_charge(), c.total_charge());
}

}  // namespace
