#pragma once

#include "integrate.hpp"
#include "pulses.hpp"
#include "qla.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rydcz {

using Vector3c = Eigen::Vector3cd;

struct DarkBrightDecomposition {
  double alpha = 0;
  Vector3c dark, plus, minus;  // components on (1, p, r)
  double lambda_d = 0, lambda_plus = 0, lambda_minus = 0;
};

// single-atom three-level matrix on (1, p, r)
inline ComplexMatrix three_level_h(double op, double oc, double delta0) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = 0.5 * op;
  h(1, 2) = h(2, 1) = 0.5 * oc;
  h(1, 1) = -delta0;
  return h;
}

inline DarkBrightDecomposition dark_bright(double op, double oc, double delta0) {
  if (oc == 0) throw std::invalid_argument("dark_bright: coupling amplitude must be non-zero");
  DarkBrightDecomposition db;
  const double a = op / oc;
  const double n = std::sqrt(1 + a * a);
  db.alpha = a;
  db.dark << -1 / n, 0, a / n;
  db.plus << a / n, n * oc / (2 * delta0), 1 / n;
  db.minus << -a * oc / (2 * delta0), 1, -oc / (2 * delta0);
  db.plus.normalize();
  db.minus.normalize();
  db.lambda_plus = (1 + a * a) * oc * oc / (4 * delta0);
  db.lambda_minus = -delta0;
  return db;
}

struct EffectiveTwoLevel {
  double rabi = 0;
  double detuning = 0;      // excited minus ground energy
  double ground_shift = 0;  // absolute energy of the ground member

  // basis (ground, excited)
  ComplexMatrix matrix() const {
    ComplexMatrix h(2, 2);
    h << ground_shift, 0.5 * rabi, 0.5 * rabi, ground_shift + detuning;
    return h;
  }
};

inline double effective_rabi(double op, double oc, double delta0) { return op * oc / (2 * delta0); }

inline EffectiveTwoLevel h_eff_single(double op, double oc, double delta0, double d0) {
  EffectiveTwoLevel h;
  h.rabi = effective_rabi(op, oc, delta0);
  h.ground_shift = op * op / (4 * delta0);
  h.detuning = d0 + (oc * oc - op * op) / (4 * delta0);
  return h;
}

inline double blockade_correction(double op, double oc, double delta0, double d0, double b) {
  const double w = effective_rabi(op, oc, delta0);
  return w * w / (d0 + oc * oc / delta0 + 2 * b);
}

// |11> <-> |chi> = (|1r> + |r1>)/sqrt 2 with |rr> eliminated
inline EffectiveTwoLevel h_eff_11(double op, double oc, double delta0, double d0, double b) {
  const EffectiveTwoLevel s = h_eff_single(op, oc, delta0, d0);
  EffectiveTwoLevel h;
  h.rabi = std::sqrt(2.0) * s.rabi;
  h.ground_shift = 2 * s.ground_shift;
  h.detuning = s.detuning - blockade_correction(op, oc, delta0, d0, b);
  return h;
}

enum class Channel { c01, c11 };

struct EffectiveTrajectory {
  std::vector<double> t;
  std::vector<double> population;  // return population of the initial state
  std::vector<double> phase;       // -arg of its amplitude, unwrapped
  double final_phase = 0;          // wrapped to [0, 2 pi)
  double final_population = 0;
};

inline EffectiveTrajectory evolve_effective(Channel ch, const PulseParams& p, double eps_delta, int n_samples = 2001,
                                            IntegratorOptions opts = {}) {
  p.validate();
  if (opts.max_step <= 0) opts.max_step = p.width / 20;
  const double d0 = -eps_delta;
  double delta = 0;
  auto rhs = [&](double t, const ComplexVector& y, ComplexVector& dy) {
    const double op = omega_p(t, p), oc = omega_c(t, p);
    const EffectiveTwoLevel h = ch == Channel::c01 ? h_eff_single(op, oc, delta, d0) : h_eff_11(op, oc, delta, d0, p.blockade);
    dy(0) = cplx(0, -1) * (h.ground_shift * y(0) + 0.5 * h.rabi * y(1));
    dy(1) = cplx(0, -1) * (0.5 * h.rabi * y(0) + (h.ground_shift + h.detuning) * y(1));
  };

  const std::vector<double> times = [&] {
    std::vector<double> v(static_cast<std::size_t>(std::max(n_samples, 2)));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p.t_start() + p.gate_duration() * i / (v.size() - 1);
    return v;
  }();

  EffectiveTrajectory out;
  double last_raw = 0, offset = 0;
  std::size_t next = 0;
  auto record = [&](double t, ComplexVector& y, bool) {
    while (next < times.size() && std::abs(times[next] - t) <= 1e-12) {
      const double raw = -std::arg(y(0));
      if (!out.phase.empty()) {
        double d = raw - last_raw;
        offset -= two_pi * std::round(d / two_pi);
      }
      last_raw = raw;
      out.t.push_back(t);
      out.population.push_back(std::norm(y(0)));
      out.phase.push_back(raw + offset);
      ++next;
    }
  };

  ComplexVector y = ComplexVector::Zero(2);
  y(0) = 1.0;
  record(p.t_start(), y, true);
  delta = detuning(p.t_start(), p);
  integrate(rhs, p.t_start(), 0.0, y, opts, record, times);
  delta = detuning(p.t_end(), p);
  integrate(rhs, 0.0, p.t_end(), y, opts, record, times);

  double ph = std::fmod(-std::arg(y(0)), two_pi);
  if (ph < 0) ph += two_pi;
  out.final_phase = ph;
  out.final_population = std::norm(y(0));
  return out;
}

}  // namespace rydcz
