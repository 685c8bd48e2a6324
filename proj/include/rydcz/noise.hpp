#pragma once

#include "metrics.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rydcz {

// mt19937_64's output sequence is fixed by the standard; the distributions
// below are written out so samples are identical across standard libraries
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    double u1;
    do u1 = uniform();
    while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline constexpr double k_boltzmann = 1.380649e-23;  // J/K

enum class DistKind { gaussian, uniform, ushaped };

inline std::string_view to_string(DistKind k) {
  switch (k) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::uniform: return "uniform";
    case DistKind::ushaped: return "ushaped";
  }
  return "?";
}

inline std::optional<DistKind> dist_kind_from(std::string_view s) {
  if (s == "gaussian") return DistKind::gaussian;
  if (s == "uniform") return DistKind::uniform;
  if (s == "ushaped") return DistKind::ushaped;
  return std::nullopt;
}

struct DistributionSpec {
  DistKind kind = DistKind::uniform;
  double half_width = 0;       // rad/us
  double sigma_fraction = 0.5;  // gaussian only

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

inline double sample_detuning_error(const DistributionSpec& s, Rng& rng) {
  const double eps = s.half_width;
  if (eps == 0) return 0;
  switch (s.kind) {
    case DistKind::uniform: return rng.uniform(-eps, eps);
    case DistKind::ushaped: return eps * std::sin(pi * (rng.uniform() - 0.5));
    case DistKind::gaussian: {
      const double sigma = s.sigma_fraction * eps;
      for (;;) {
        const double x = sigma * rng.normal();
        if (std::abs(x) <= eps) return x;
      }
    }
  }
  return 0;
}

// probability density of the law above
inline double detuning_error_density(const DistributionSpec& s, double x) {
  const double eps = s.half_width;
  if (!(eps > 0) || std::abs(x) > eps) return 0;
  switch (s.kind) {
    case DistKind::uniform: return 0.5 / eps;
    case DistKind::ushaped: return std::abs(x) >= eps ? 0 : 1.0 / (pi * std::sqrt(eps * eps - x * x));
    case DistKind::gaussian: {
      const double sigma = s.sigma_fraction * eps;
      const double mass = std::erf(eps / (sigma * std::sqrt(2.0)));
      return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(two_pi) * mass);
    }
  }
  return 0;
}

struct PhysicalNoiseConfig {
  double atom_mass = 1.44316e-25;  // kg, 87Rb
  double lambda_p = 0.420;         // um
  double lambda_c = 1.013;
  LaserBeams beams{};
  Vec3 trap_freq{two_pi * 147e3, two_pi * 117e3, two_pi * 35e3};  // rad/s
  double c6 = 862.69;                                               // GHz um^6
  double r0 = 2.75;                                                 // um

  double k_p() const { return two_pi / (lambda_p * 1e-6); }  // 1/m
  double k_c() const { return two_pi / (lambda_c * 1e-6); }
  double k_eff() const { return k_p() - k_c(); }

  double v_rms(double temperature_mK) const { return std::sqrt(k_boltzmann * temperature_mK * 1e-3 / atom_mass); }

  Vec3 position_sigma(double temperature_mK) const {  // um
    const double v = v_rms(temperature_mK);
    return {v / trap_freq.x * 1e6, v / trap_freq.y * 1e6, v / trap_freq.z * 1e6};
  }
};

struct DopplerShift {
  double eps_Delta = 0;  // rad/us
  double eps_delta = 0;
};

inline DopplerShift sample_doppler(double temperature_mK, const PhysicalNoiseConfig& cfg, Rng& rng) {
  if (temperature_mK < 0) throw std::invalid_argument("temperature must be non-negative");
  if (temperature_mK == 0) return {};
  const double v = cfg.v_rms(temperature_mK) * rng.normal();  // m/s
  return {cfg.k_p() * v * 1e-6, cfg.k_eff() * v * 1e-6};
}

struct AcStarkProfile {
  std::vector<double> t;
  std::vector<double> eps_delta;  // rad/us
  double max_abs = 0;
};

inline AcStarkProfile ac_stark_detuning(double eps_op, double eps_oc, const PulseParams& p, int n_points = 2001) {
  AcStarkProfile out;
  for (double t : linspace(p.t_start(), p.t_end(), n_points)) {
    const double op = omega_p(t, p), oc = omega_c(t, p);
    const double e = (op * op * eps_op - oc * oc * eps_oc) / (2 * p.delta0);
    out.t.push_back(t);
    out.eps_delta.push_back(e);
    out.max_abs = std::max(out.max_abs, std::abs(e));
  }
  return out;
}

// max over the gate of (Omega_p^2 + Omega_c^2)/(2 Delta0) times eps_Omega
inline double ac_stark_bound(double eps_omega, const PulseParams& p, int n_points = 2001) {
  double m = 0;
  for (double t : linspace(p.t_start(), p.t_end(), n_points)) {
    const double op = omega_p(t, p), oc = omega_c(t, p);
    m = std::max(m, (op * op + oc * oc) / (2 * p.delta0));
  }
  return m * eps_omega;
}

struct AtomPositions {
  Vec3 r_c, r_t;
};

inline AtomPositions sample_positions(double temperature_mK, const PhysicalNoiseConfig& cfg, Rng& rng) {
  if (temperature_mK < 0) throw std::invalid_argument("temperature must be non-negative");
  if (temperature_mK == 0) return {};
  const Vec3 s = cfg.position_sigma(temperature_mK);
  AtomPositions a;
  for (Vec3* r : {&a.r_c, &a.r_t}) {
    r->x = s.x * rng.normal();
    r->y = s.y * rng.normal();
    r->z = s.z * rng.normal();
  }
  return a;
}

struct DephasingRates {
  double gamma1 = 0, gamma2 = 0;
};

inline DephasingRates sample_phase_dephasing(double gamma_z, Rng& rng) {
  if (gamma_z < 0) throw std::invalid_argument("dephasing bound must be non-negative");
  if (gamma_z == 0) return {};
  const double g1 = rng.uniform(0, gamma_z);
  return {g1, rng.uniform(0, gamma_z)};
}

// relative position change that would produce the blockade deviation fraction*B
inline double blockade_position_deviation_um(double fraction, double blockade, const PhysicalNoiseConfig& cfg) {
  const double db_ghz = fraction * blockade / (two_pi * 1e3);
  return std::pow(cfg.r0, 7) * db_ghz / (6 * cfg.c6);
}

inline double blockade_from_c6(const PhysicalNoiseConfig& cfg) {  // rad/us
  return two_pi * 1e3 * cfg.c6 / std::pow(cfg.r0, 6);
}

struct InteractionDeviation {
  double dB = 0;          // rad/us
  double delta_r_nm = 0;  // diagnostic for the bound fraction*B
};

inline InteractionDeviation interaction_deviation(double fraction, double blockade, const PhysicalNoiseConfig& cfg,
                                                  Rng& rng) {
  if (fraction < 0 || fraction > 1) throw std::invalid_argument("interaction fraction must lie in [0, 1]");
  InteractionDeviation d;
  d.delta_r_nm = blockade_position_deviation_um(fraction, blockade, cfg) * 1e3;
  if (fraction > 0) d.dB = rng.uniform(-fraction * blockade, fraction * blockade);
  return d;
}

// which channels a Monte-Carlo run draws; unset/zero means off
struct NoiseChannels {
  std::optional<DistributionSpec> detuning;
  std::optional<double> doppler_mK;
  double amplitude_bound = 0;  // eps_Omega, uniform per laser
  std::optional<double> position_mK;
  double intermediate_bound = 0;  // eps_Delta, uniform, rad/us
  double dephasing_bound = 0;     // gamma_z, 1/us
  double interaction_fraction = 0;

  friend bool operator==(const NoiseChannels&, const NoiseChannels&) = default;
};

inline ErrorSample draw_error_sample(const NoiseChannels& ch, const PhysicalNoiseConfig& cfg, const PulseParams& p,
                                     Rng& rng) {
  ErrorSample e;
  if (ch.detuning) e.eps_delta += sample_detuning_error(*ch.detuning, rng);
  if (ch.doppler_mK) {
    const DopplerShift d = sample_doppler(*ch.doppler_mK, cfg, rng);
    e.eps_delta += d.eps_delta;
    e.eps_Delta += d.eps_Delta;
  }
  if (ch.amplitude_bound > 0) {
    e.eps_omega_p = rng.uniform(-ch.amplitude_bound, ch.amplitude_bound);
    e.eps_omega_c = rng.uniform(-ch.amplitude_bound, ch.amplitude_bound);
  }
  if (ch.position_mK) {
    const AtomPositions a = sample_positions(*ch.position_mK, cfg, rng);
    e.r_c = a.r_c;
    e.r_t = a.r_t;
  }
  if (ch.intermediate_bound > 0) e.eps_Delta += rng.uniform(-ch.intermediate_bound, ch.intermediate_bound);
  if (ch.dephasing_bound > 0) {
    const DephasingRates g = sample_phase_dephasing(ch.dephasing_bound, rng);
    e.gamma1 = g.gamma1;
    e.gamma2 = g.gamma2;
  }
  if (ch.interaction_fraction > 0) e.dB = interaction_deviation(ch.interaction_fraction, p.blockade, cfg, rng).dB;
  return e;
}

struct SampleRecord {
  ErrorSample errors;
  double fidelity_phase = std::numeric_limits<double>::quiet_NaN();
  double fidelity_paper = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string failure;
};

struct MonteCarloResult {
  double mean_fidelity = 0;  // phase-sensitive
  double stderr_fidelity = 0;
  double mean_fidelity_paper = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  std::vector<SampleRecord> samples;
};

struct MonteCarloOptions {
  std::size_t samples = 50;
  std::uint64_t seed = 1;
  DecayConstants decays = DecayConstants::none();
  EvalOptions eval{};
  bool truth_table = false;  // paper-mode fidelity on the density path costs four more runs
};

inline double mean_of(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise_sum(v) / v.size(); }

inline double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return std::sqrt(pairwise_sum(sq) / (v.size() - 1) / v.size());
}

inline MonteCarloResult monte_carlo_fidelity(const PulseParams& p, const NoiseChannels& ch,
                                             const PhysicalNoiseConfig& cfg, const MonteCarloOptions& o) {
  if (o.samples < 1) throw std::invalid_argument("Monte-Carlo needs at least one sample");
  Rng rng(o.seed);
  std::vector<ErrorSample> draws;
  draws.reserve(o.samples);
  for (std::size_t i = 0; i < o.samples; ++i) draws.push_back(draw_error_sample(ch, cfg, p, rng));

  EvalOptions eo = o.eval;
  eo.beams = cfg.beams;
  // with every channel off all draws coincide and one evaluation serves them all
  const bool degenerate = std::all_of(draws.begin(), draws.end(), [&](const ErrorSample& e) { return e == draws[0]; });
  auto res = parallel_map(degenerate ? 1 : draws.size(), o.eval.workers, [&](std::size_t i) {
    const ErrorSample& e = draws[i];
    SampleRecord r;
    r.errors = e;
    if (pure_path(e, o.decays, eo)) {
      const ChannelState c = evolve_channels(p, e, eo.integrator, eo.beams);
      r.fidelity_phase = channel_fidelity_phase(c);
      r.fidelity_paper = gate_fidelity_paper(channel_truth(c));
    } else if (o.truth_table) {
      const GateResult g = simulate_gate(p, e, o.decays, eo);
      r.fidelity_phase = g.fidelity_phase;
      r.fidelity_paper = g.fidelity_paper;
    } else {
      r.fidelity_phase = gate_fidelity_phase(p, e, o.decays, eo);
    }
    r.ok = true;
    return r;
  });

  if (degenerate) {
    res.values.resize(draws.size(), res.values[0]);
    res.errors.resize(draws.size(), res.errors[0]);
  }

  MonteCarloResult out;
  out.n_samples = draws.size();
  std::vector<double> f, fp;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (res.errors[i]) {
      SampleRecord r;
      r.errors = draws[i];
      try {
        std::rethrow_exception(res.errors[i]);
      } catch (const std::exception& ex) {
        r.failure = ex.what();
      }
      ++out.n_failed;
      out.samples.push_back(std::move(r));
      continue;
    }
    SampleRecord& r = *res.values[i];
    f.push_back(r.fidelity_phase);
    if (!std::isnan(r.fidelity_paper)) fp.push_back(r.fidelity_paper);
    out.samples.push_back(std::move(r));
  }
  out.mean_fidelity = f.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_of(f);
  out.stderr_fidelity = stderr_of(f);
  if (!fp.empty() && fp.size() == f.size()) out.mean_fidelity_paper = mean_of(fp);
  return out;
}

}  // namespace rydcz
