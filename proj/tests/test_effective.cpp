#include <rydcz/effective.hpp>
#include <rydcz/metrics.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace rydcz;

namespace {
const double W = two_pi * 150, D0 = two_pi * 2000, B = two_pi * 2000;

double wrapped(double a) { return std::remainder(a, two_pi); }
}  // namespace

TEST(Effective, DarkStateDecoupledLimit) {
  const DarkBrightDecomposition db = dark_bright(0.0, W, D0);
  EXPECT_EQ(db.alpha, 0.0);
  EXPECT_EQ(db.dark(0), cplx(-1));
  EXPECT_EQ(db.dark(1), cplx(0));
  EXPECT_EQ(db.dark(2), cplx(0));
  EXPECT_EQ(db.lambda_d, 0.0);
  EXPECT_THROW(dark_bright(W, 0.0, D0), std::invalid_argument);
}

TEST(Effective, DarkStateIsExactNullVector) {
  const ComplexMatrix h = three_level_h(W, W, D0);
  const DarkBrightDecomposition db = dark_bright(W, W, D0);
  const double ratio = W / D0;
  EXPECT_LE((h * db.dark).norm() / h.norm(), ratio * ratio);
  EXPECT_NEAR(db.dark.norm(), 1, 1e-15);
  EXPECT_NEAR(db.plus.norm(), 1, 1e-15);
  EXPECT_NEAR(db.minus.norm(), 1, 1e-15);
  EXPECT_LE(std::abs(db.dark.dot(db.plus)), 2 * W / D0);
  EXPECT_LE(std::abs(db.dark.dot(db.minus)), 2 * W / D0);
}

TEST(Effective, BrightEigenvaluesAgainstEigensolver) {
  for (double a : {0.3, 1.0, 2.0}) {
    const double op = a * W, oc = W;
    const HermitianEigen ex = herm_eig(three_level_h(op, oc, D0));
    const DarkBrightDecomposition db = dark_bright(op, oc, D0);
    EXPECT_NEAR(ex.values(0), db.lambda_minus, 0.01 * D0);
    EXPECT_NEAR(ex.values(1), 0.0, 1e-9 * D0);
    EXPECT_NEAR(ex.values(2), db.lambda_plus, 0.05 * db.lambda_plus);
  }
}

TEST(Effective, SingleChannelLimits) {
  const EffectiveTwoLevel s = h_eff_single(W, W, D0, 0.7);
  EXPECT_NEAR(s.detuning, 0.7, 1e-12);
  EXPECT_NEAR(s.rabi / two_pi, 5.625, 1e-12);
  const EffectiveTwoLevel z = h_eff_single(0, W, D0, 0);
  EXPECT_EQ(z.rabi, 0.0);
  EXPECT_NEAR(z.detuning, W * W / (4 * D0), 1e-12);
  const ComplexMatrix m = s.matrix();
  EXPECT_TRUE(is_hermitian(m, 0));
}

TEST(Effective, DoubleChannelLimits) {
  const EffectiveTwoLevel s = h_eff_single(W, 0.8 * W, D0, 0.2);
  const EffectiveTwoLevel inf = h_eff_11(W, 0.8 * W, D0, 0.2, 1e30);
  EXPECT_NEAR(inf.detuning, s.detuning, 1e-12);
  const double corr = blockade_correction(W, W, D0, 0, B);
  const double rabi = effective_rabi(W, W, D0);
  EXPECT_NEAR(corr, rabi * rabi / (W * W / D0 + 2 * B), 1e-15);
  EXPECT_LT(corr, two_pi * 0.01);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> U(0.1, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double op = U(g) * W, oc = U(g) * W;
    EXPECT_NEAR(h_eff_11(op, oc, D0, 0, B).rabi, std::sqrt(2.0) * effective_rabi(op, oc, D0), 1e-12);
    EXPECT_TRUE(is_hermitian(h_eff_11(op, oc, D0, 0.1, B).matrix(), 0));
  }
}

TEST(Effective, DarkPulseLeavesStateAlone) {
  const EffectiveTrajectory tr = evolve_effective(Channel::c11, test::dark_pulse(), 0.0, 11, test::rk4());
  EXPECT_NEAR(tr.final_population, 1, 1e-12);
  EXPECT_NEAR(wrapped(tr.final_phase), 0, 1e-12);
  EXPECT_EQ(tr.t.size(), 11u);
}

TEST(Effective, TracksFullDynamics) {
  for (const auto& p : {presets::to(), presets::der()}) {
    for (double eps : {0.0, two_pi * 0.3}) {
      const int n = 401;
      const auto times = linspace(p.t_start(), p.t_end(), n);
      ChannelTrajectory full;
      ErrorSample e;
      e.eps_delta = eps;
      evolve_channels(p, e, std::vector<double>{eps}, test::rk4(), times, &full);
      const EffectiveTrajectory e01 = evolve_effective(Channel::c01, p, eps, n, test::rk4());
      const EffectiveTrajectory e11 = evolve_effective(Channel::c11, p, eps, n, test::rk4());
      ASSERT_EQ(full.states.size(), static_cast<std::size_t>(n));
      double gap = 0;
      for (int i = 0; i < n; ++i) {
        gap = std::max(gap, std::abs(std::norm(full.states[i].a01()) - e01.population[i]));
        gap = std::max(gap, std::abs(std::norm(full.states[i].a11()) - e11.population[i]));
      }
      EXPECT_LE(gap, 1e-2);
      const ChannelState& last = full.states.back();
      EXPECT_LE(std::abs(wrapped(phase_of(last.a01()) - e01.final_phase)), 1e-2 * pi);
      EXPECT_LE(std::abs(wrapped(phase_of(last.a11()) - e11.final_phase)), 1e-2 * pi);
    }
  }
}

TEST(Effective, DetuningSignMapping) {
  const PulseParams p = presets::der();
  const double eps = two_pi * 0.5;
  const auto times = linspace(p.t_start(), p.t_end(), 201);
  ChannelTrajectory full;
  ErrorSample e;
  e.eps_delta = eps;
  evolve_channels(p, e, std::vector<double>{eps}, test::rk4(), times, &full);
  auto gap = [&](double arg) {
    const EffectiveTrajectory t = evolve_effective(Channel::c01, p, arg, 201, test::rk4());
    double g = 0;
    for (std::size_t i = 0; i < times.size(); ++i) g = std::max(g, std::abs(std::norm(full.states[i].a01()) - t.population[i]));
    return g;
  };
  EXPECT_LT(gap(eps), gap(-eps));
}

TEST(Effective, DynamicalPhaseCancels) {
  const PulseParams p = presets::der();
  auto branch = [&](int which, double t) {
    const HermitianEigen ex = herm_eig(three_level_h(omega_p(t, p), omega_c(t, p), detuning(t, p)));
    if (which == 1) return ex.values(1);
    const bool first = t < 0;
    if (which == 0) return first ? ex.values(0) : ex.values(2);  // the -Delta0 branch
    return first ? ex.values(2) : ex.values(0);                  // the light-shifted branch
  };
  for (int b = 0; b < 3; ++b) {
    const auto f = [&](double t) { return branch(b, t); };
    const auto g = [&](double t) { return std::abs(branch(b, t)); };
    // split at the flip so quadrature never straddles the discontinuity
    const double I = test::simpson(f, p.t_start(), 0.0, 20000) + test::simpson(f, 0.0, p.t_end(), 20000);
    const double A = test::simpson(g, p.t_start(), 0.0, 20000) + test::simpson(g, 0.0, p.t_end(), 20000);
    if (b == 1)
      EXPECT_LE(std::abs(I), 1e-6);
    else
      EXPECT_LE(std::abs(I), 1e-3 * A) << "branch " << b;
  }
}
