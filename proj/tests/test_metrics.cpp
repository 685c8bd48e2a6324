#include <rydcz/metrics.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace rydcz;

namespace {
ComplexVector qubit_state(std::array<double, 4> amps) {
  ComplexVector v = ComplexVector::Zero(n_states);
  for (int j = 0; j < 4; ++j) v(qubit_indices()[j]) = amps[j];
  return v;
}
}  // namespace

TEST(Metrics, ElementFidelityCases) {
  const ComplexVector ideal = cz_target();
  EXPECT_NEAR(element_fidelity(DensityMatrix::pure(ideal), ideal), 1, 1e-15);
  ComplexMatrix mixed = ComplexMatrix::Zero(n_states, n_states);
  for (int k : qubit_indices()) mixed(k, k) = 0.25;
  EXPECT_NEAR(element_fidelity(DensityMatrix(mixed), ideal), 0.25, 1e-15);
  EXPECT_EQ(element_fidelity(DensityMatrix::basis(Level::d, Level::d), ideal), 0.0);
  EXPECT_THROW(element_fidelity(DensityMatrix{}, 2.0 * ideal), std::invalid_argument);
}

TEST(Metrics, WrongConditionalPhase) {
  const ComplexVector wrong = qubit_state({0.5, -0.5, -0.5, 0.5});
  EXPECT_NEAR(element_fidelity(DensityMatrix::pure(wrong), cz_target()), 0.25, 1e-15);
}

TEST(Metrics, DephasedOutput) {
  ComplexMatrix r = ComplexMatrix::Zero(n_states, n_states);
  for (int k : qubit_indices()) r(k, k) = 0.25;
  EXPECT_NEAR(element_fidelity(DensityMatrix(r), cz_target()), 0.25, 1e-15);
}

TEST(Metrics, IdealChannelGivesUnitFidelity) {
  ChannelState c = ChannelState::initial();
  c.s01[0] = c.s10[0] = c.s11[0] = -1.0;
  EXPECT_NEAR(channel_fidelity_phase(c), 1.0, 1e-15);
  const ComplexVector psi = channel_superposition(c);
  EXPECT_NEAR((psi - cz_target()).norm(), 0, 1e-15);
  c.s11[0] = 1.0;
  EXPECT_NEAR(channel_fidelity_phase(c), 0.25, 1e-15);
}

TEST(Metrics, PaperFidelityModes) {
  EXPECT_EQ(gate_fidelity_paper({1, 1, 1, 1}), 1.0);
  EXPECT_EQ(gate_fidelity_paper({1, 1, 1, 1}, PaperMode::sqrt), 1.0);
  EXPECT_NEAR(gate_fidelity_paper({0.99, 0.99, 0.99, 0.99}), 0.99, 1e-15);
  EXPECT_NEAR(gate_fidelity_paper({0.99, 0.99, 0.99, 0.99}, PaperMode::sqrt), 0.99, 1e-15);
  EXPECT_NEAR(gate_fidelity_paper({1, 1, 1, 0}), 0.75, 1e-15);
  EXPECT_NEAR(gate_fidelity_paper({1, 1, 1, 0}, PaperMode::sqrt), 0.5625, 1e-15);
  EXPECT_THROW(gate_fidelity_paper({1, 1, 1.1, 1}), std::invalid_argument);
  EXPECT_THROW(gate_fidelity_paper({1, -0.1, 1, 1}), std::invalid_argument);
}

TEST(Metrics, PhaseConvention) {
  EXPECT_NEAR(phase_of(std::exp(cplx(0, -0.3))), 0.3, 1e-15);
  EXPECT_NEAR(phase_of(cplx(-1, 0)), pi, 1e-15);
  EXPECT_NEAR(phase_of(std::exp(cplx(0, 0.3))), two_pi - 0.3, 1e-15);
  EXPECT_EQ(phase_of(cplx(1, 0)), 0.0);
}

TEST(Metrics, SymmetricPhasesAndRanges) {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> U(-1, 1);
  EvalOptions o;
  o.integrator = test::rk4();
  for (int i = 0; i < 12; ++i) {
    ErrorSample e;
    e.eps_delta = two_pi * U(g);
    e.eps_Delta = two_pi * 5 * U(g);
    e.eps_omega_p = 0.05 * U(g);
    e.eps_omega_c = 0.05 * U(g);
    e.dB = 0.1 * two_pi * 2000 * U(g);
    const GateResult r = simulate_gate(i % 2 ? presets::der() : presets::to(), e, DecayConstants::none(), o);
    EXPECT_LE(std::abs(std::remainder(r.phi01 - r.phi10, two_pi)), 1e-6);
    for (double f : {r.fidelity_phase, r.fidelity_paper, r.fidelity_paper_sqrt}) {
      EXPECT_GE(f, -1e-9);
      EXPECT_LE(f, 1 + 1e-9);
    }
    EXPECT_FALSE(r.density_path);
  }
}

TEST(Metrics, DensityPathAgreesWithChannels) {
  EvalOptions fast, dense;
  fast.integrator = dense.integrator = test::rk4();
  dense.force_density = true;
  ErrorSample e;
  e.eps_delta = two_pi * 0.4;
  const GateResult a = simulate_gate(presets::der(), e, DecayConstants::none(), fast);
  const GateResult b = simulate_gate(presets::der(), e, DecayConstants::none(), dense);
  EXPECT_TRUE(b.density_path);
  EXPECT_NEAR(a.fidelity_phase, b.fidelity_phase, 1e-8);
  EXPECT_NEAR(a.fidelity_paper, b.fidelity_paper, 1e-8);
  EXPECT_NEAR(std::remainder(a.phi11 - b.phi11, two_pi), 0, 1e-7);
  EXPECT_NEAR(std::remainder(a.phi01 - b.phi01, two_pi), 0, 1e-7);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(a.truth[j], b.truth[j], 1e-8);
  EXPECT_NEAR(gate_fidelity_phase(presets::der(), e, DecayConstants::none(), dense), b.fidelity_phase, 1e-12);
}

TEST(Metrics, DecaysCostFidelity) {
  EvalOptions o;
  o.integrator = test::rk4();
  const GateResult a = simulate_gate(presets::der(), ErrorSample{}, DecayConstants::none(), o);
  const GateResult b = simulate_gate(presets::der(), ErrorSample{}, DecayConstants{}, o);
  EXPECT_TRUE(b.density_path);
  EXPECT_LT(b.fidelity_phase, a.fidelity_phase);
  EXPECT_LE(std::abs(std::remainder(b.phi01 - b.phi10, two_pi)), 1e-6);
  EXPECT_EQ(b.truth[0], 1.0);
  for (int j = 0; j < 4; ++j) EXPECT_LE(b.truth[j], 1.0);
}

TEST(Metrics, ScanMatchesPointwiseEvaluation) {
  EvalOptions o;
  o.integrator = test::rk4();
  const auto grid = linspace(-two_pi, two_pi, 5);
  const auto scan = infidelity_scan(presets::der(), grid, DecayConstants::none(), o);
  ASSERT_EQ(scan.size(), 5u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ErrorSample e;
    e.eps_delta = grid[i];
    const GateResult g = simulate_gate(presets::der(), e, DecayConstants::none(), o);
    EXPECT_NEAR(scan[i].infidelity_phase, 1 - g.fidelity_phase, 1e-12);
    EXPECT_NEAR(scan[i].infidelity_paper, 1 - g.fidelity_paper, 1e-12);
    EXPECT_EQ(scan[i].eps_delta, grid[i]);
  }
}

TEST(Metrics, Linspace) {
  const auto v = linspace(-1, 1, 21);
  ASSERT_EQ(v.size(), 21u);
  EXPECT_EQ(v.front(), -1.0);
  EXPECT_EQ(v.back(), 1.0);
  EXPECT_EQ(v[10], 0.0);
  EXPECT_EQ(linspace(2, 3, 1), std::vector<double>{2});
  EXPECT_TRUE(linspace(0, 1, 0).empty());
}
