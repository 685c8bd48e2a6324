#pragma once

#include "dynamics.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rydcz {

enum class PaperMode { average, sqrt };

struct EvalOptions {
  IntegratorOptions integrator{};
  LaserBeams beams{};
  bool force_density = false;  // use the 25x25 master equation even when decay-free
  unsigned workers = 1;
};

inline const std::array<int, 4>& qubit_indices() {
  static const std::array<int, 4> idx{flat_index(Level::zero, Level::zero), flat_index(Level::zero, Level::one),
                                      flat_index(Level::one, Level::zero), flat_index(Level::one, Level::one)};
  return idx;
}

inline constexpr std::array<double, 4> cz_signs{1, -1, -1, -1};

inline ComplexVector psi_plus() {
  ComplexVector v = ComplexVector::Zero(n_states);
  for (int k : qubit_indices()) v(k) = 0.5;
  return v;
}

inline ComplexVector cz_target() {
  ComplexVector v = ComplexVector::Zero(n_states);
  for (int j = 0; j < 4; ++j) v(qubit_indices()[j]) = 0.5 * cz_signs[j];
  return v;
}

inline ComplexVector cz_ideal(int j) { return cz_signs[j] * basis_state(n_states, qubit_indices()[j]); }

inline double element_fidelity(const DensityMatrix& rho, const ComplexVector& ideal) {
  if (ideal.size() != n_states) throw std::invalid_argument("element_fidelity: expected 25 amplitudes");
  if (std::abs(ideal.norm() - 1.0) > 1e-9) throw std::invalid_argument("element_fidelity: ideal state not normalized");
  return (ideal.adjoint() * rho.matrix() * ideal)(0).real();
}

inline double gate_fidelity_paper(const std::array<double, 4>& f, PaperMode mode = PaperMode::average) {
  for (double x : f)
    if (!(x >= -1e-9 && x <= 1 + 1e-9)) throw std::invalid_argument("truth-table entries must lie in [0, 1]");
  double s = 0;
  if (mode == PaperMode::average) {
    for (double x : f) s += x;
    return s / 4;
  }
  for (double x : f) s += std::sqrt(std::max(0.0, x));
  return (s / 4) * (s / 4);
}

// phi such that the amplitude reads |a| e^{-i phi}, wrapped to [0, 2 pi)
inline double phase_of(cplx a) {
  double phi = -std::arg(a);
  if (phi < 0) phi += two_pi;
  if (phi >= two_pi) phi -= two_pi;
  return phi;
}

inline bool pure_path(const ErrorSample& e, const DecayConstants& d, const EvalOptions& o) {
  return !o.force_density && !d.any() && !e.dephasing();
}

inline double channel_fidelity_phase(const ChannelState& c) { return std::norm(0.25 * (1.0 - c.a01() - c.a10() - c.a11())); }

inline std::array<double, 4> channel_truth(const ChannelState& c) {
  return {1.0, std::norm(c.a01()), std::norm(c.a10()), std::norm(c.a11())};
}

struct GateResult {
  std::array<DensityMatrix, 4> outputs;
  std::array<double, 4> truth{};
  double fidelity_paper = 0;       // average mode
  double fidelity_paper_sqrt = 0;  // (1/4 sum sqrt F)^2
  double fidelity_phase = 0;
  double phi01 = 0, phi10 = 0, phi11 = 0;
  bool density_path = false;
};

inline double gate_fidelity_phase(const PulseParams& p, const ErrorSample& e, const DecayConstants& d,
                                  const EvalOptions& o = {}) {
  if (pure_path(e, d, o)) return channel_fidelity_phase(evolve_channels(p, e, o.integrator, o.beams));
  const DensityMatrix rho = evolve(DensityMatrix::pure(psi_plus()), p, e, d, o.integrator, {}, nullptr, o.beams);
  return element_fidelity(rho, cz_target());
}

inline GateResult simulate_gate(const PulseParams& p, const ErrorSample& e, const DecayConstants& d,
                                const EvalOptions& o = {}) {
  GateResult g;
  const auto& idx = qubit_indices();
  if (pure_path(e, d, o)) {
    const ChannelState c = evolve_channels(p, e, o.integrator, o.beams);
    const ComplexVector full = channel_superposition(c) * 2.0;  // unnormalized sum of the four outputs
    for (int j = 0; j < 4; ++j) {
      ComplexVector psi = ComplexVector::Zero(n_states);
      // pick the block belonging to input j
      for (int k = 0; k < n_states; ++k) {
        const auto [a, b] = split_index(k);
        const bool c_on = a != Level::zero, t_on = b != Level::zero;
        const bool c_in = j >= 2, t_in = j % 2 == 1;
        if (c_on == c_in && t_on == t_in) psi(k) = full(k);
      }
      g.outputs[j] = DensityMatrix::unchecked(psi * psi.adjoint());
    }
    g.truth = channel_truth(c);
    g.fidelity_phase = channel_fidelity_phase(c);
    g.phi01 = phase_of(c.a01());
    g.phi10 = phase_of(c.a10());
    g.phi11 = phase_of(c.a11());
  } else {
    g.density_path = true;
    for (int j = 0; j < 4; ++j) {
      g.outputs[j] = evolve(DensityMatrix::pure(basis_state(n_states, idx[j])), p, e, d, o.integrator, {}, nullptr, o.beams);
      g.truth[j] = element_fidelity(g.outputs[j], cz_ideal(j));
    }
    const DensityMatrix rho = evolve(DensityMatrix::pure(psi_plus()), p, e, d, o.integrator, {}, nullptr, o.beams);
    g.fidelity_phase = element_fidelity(rho, cz_target());
    const int i00 = idx[0];
    g.phi01 = phase_of(rho(idx[1], i00));
    g.phi10 = phase_of(rho(idx[2], i00));
    g.phi11 = phase_of(rho(idx[3], i00));
  }
  for (double& f : g.truth) f = std::clamp(f, 0.0, 1.0);
  g.fidelity_paper = gate_fidelity_paper(g.truth, PaperMode::average);
  g.fidelity_paper_sqrt = gate_fidelity_paper(g.truth, PaperMode::sqrt);
  return g;
}

struct ScanPoint {
  double eps_delta = 0;  // rad/us
  double infidelity_phase = 0;
  double infidelity_paper = 0;
};

// 1 - F over a grid of two-photon detuning errors; decay-free runs share one
// batched evolution
inline std::vector<ScanPoint> infidelity_scan(const PulseParams& p, const std::vector<double>& grid,
                                              const DecayConstants& d = DecayConstants::none(),
                                              const EvalOptions& o = {}, const ErrorSample& base = {}) {
  std::vector<ScanPoint> out(grid.size());
  if (pure_path(base, d, o)) {
    const auto cs = evolve_channels(p, base, grid, o.integrator, {}, nullptr, o.beams);
    for (std::size_t i = 0; i < grid.size(); ++i)
      out[i] = {grid[i], 1.0 - channel_fidelity_phase(cs[i]), 1.0 - gate_fidelity_paper(channel_truth(cs[i]))};
    return out;
  }
  auto res = unwrap(parallel_map(grid.size(), o.workers, [&](std::size_t i) {
    ErrorSample e = base;
    e.eps_delta = grid[i];
    const GateResult g = simulate_gate(p, e, d, o);
    return ScanPoint{grid[i], 1.0 - g.fidelity_phase, 1.0 - g.fidelity_paper};
  }));
  return res;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace rydcz
