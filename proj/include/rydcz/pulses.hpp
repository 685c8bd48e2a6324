#pragma once

#include "csv.hpp"
#include "error_sample.hpp"
#include "qla.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rydcz {

struct PulseParams {
  double t1 = 0.6664;  // us
  double t2 = 0.9260;
  double width = 0.1666;
  double omega_p_max = two_pi * 150.0;  // rad/us
  double omega_c_max = two_pi * 150.0;
  double delta0 = two_pi * 2000.0;
  double blockade = two_pi * 2000.0;

  double gate_duration() const { return 2.0 * (t2 + 3.0 * width); }
  double t_start() const { return -0.5 * gate_duration(); }
  double t_end() const { return 0.5 * gate_duration(); }

  void validate() const {
    if (!(width > 0)) throw std::invalid_argument("pulse width must be positive");
    if (!(t1 > 0 && t1 < t2)) throw std::invalid_argument("pulse centers need 0 < t1 < t2");
    if (!(omega_p_max > 0 && omega_c_max > 0)) throw std::invalid_argument("peak Rabi frequencies must be positive");
    if (!std::isfinite(delta0) || !std::isfinite(blockade)) throw std::invalid_argument("non-finite detuning/blockade");
  }

  friend bool operator==(const PulseParams&, const PulseParams&) = default;
};

namespace presets {

inline PulseParams with_triple(double t1, double t2, double w) {
  PulseParams p;
  p.t1 = t1;
  p.t2 = t2;
  p.width = w;
  return p;
}

inline PulseParams to() { return with_triple(0.4444, 0.9027, 0.1587); }
inline PulseParams der() { return with_triple(0.6664, 0.9260, 0.1666); }
inline PulseParams der_i_gauss() { return with_triple(0.6508, 0.9053, 0.1627); }
inline PulseParams der_i_uniform() { return with_triple(0.6632, 0.9239, 0.1658); }

inline std::optional<PulseParams> by_name(std::string_view name) {
  if (name == "to") return to();
  if (name == "der") return der();
  if (name == "der_i_gauss") return der_i_gauss();
  if (name == "der_i_uniform") return der_i_uniform();
  return std::nullopt;
}

}  // namespace presets

inline double gauss_lobe(double t, double center, double w) {
  const double u = (t - center) / w;
  return std::exp(-0.5 * u * u);
}

inline double omega_p(double t, const PulseParams& p) {
  return p.omega_p_max * (gauss_lobe(t, -p.t1, p.width) - gauss_lobe(t, p.t1, p.width));
}

inline double omega_c(double t, const PulseParams& p) {
  return p.omega_c_max * (gauss_lobe(t, -p.t2, p.width) + gauss_lobe(t, p.t2, p.width));
}

inline double detuning(double t, const PulseParams& p, double eps_Delta = 0.0) {
  const double d = p.delta0 + eps_Delta;
  return t < 0 ? d : -d;
}

struct WaveformSample {
  cplx omega_p;
  cplx omega_c;
  double delta = 0;
};

inline WaveformSample waveform(double t, const PulseParams& p, double eps_Delta = 0.0) {
  return {omega_p(t, p), omega_c(t, p), detuning(t, p, eps_Delta)};
}

struct BeamGeometry {
  double waist_x, waist_y;        // um
  double rayleigh_x, rayleigh_y;  // um
};

struct LaserBeams {
  BeamGeometry probe{7.8, 7.8, 455.08, 455.08};
  BeamGeometry coupling{8.3, 8.3, 213.65, 213.65};
};

inline double beam_factor(const Vec3& r, const BeamGeometry& b) {
  const double zx = 1.0 + r.z * r.z / (b.rayleigh_x * b.rayleigh_x);
  const double zy = 1.0 + r.z * r.z / (b.rayleigh_y * b.rayleigh_y);
  const double arg = r.x * r.x / (b.waist_x * b.waist_x * zx) + r.y * r.y / (b.waist_y * b.waist_y * zy);
  return std::exp(-arg) / std::pow(zx * zy, 0.25);
}

enum class Atom { control, target };

inline const Vec3& position(const ErrorSample& e, Atom a) { return a == Atom::control ? e.r_c : e.r_t; }

// static Rabi scale factors for one atom: amplitude error times beam profile
struct AmplitudeScale {
  double p = 1.0, c = 1.0;
};

inline AmplitudeScale amplitude_scale(const ErrorSample& e, Atom a, const LaserBeams& beams = {}) {
  const Vec3& r = position(e, a);
  return {(1.0 + e.eps_omega_p) * beam_factor(r, beams.probe), (1.0 + e.eps_omega_c) * beam_factor(r, beams.coupling)};
}

inline WaveformSample apply_modifiers(WaveformSample w, double t, const ErrorSample& e, Atom a = Atom::control,
                                      const LaserBeams& beams = {}) {
  const AmplitudeScale s = amplitude_scale(e, a, beams);
  w.omega_p *= s.p;
  w.omega_c *= s.c;
  if (e.phase_rate_p != 0) w.omega_p *= std::exp(I * (e.phase_rate_p * t));
  if (e.phase_rate_c != 0) w.omega_c *= std::exp(I * (e.phase_rate_c * t));
  return w;
}

inline void write_waveform_csv(std::ostream& os, const PulseParams& p, int n_points) {
  CsvWriter w(os, {"t_us", "omega_p", "omega_c", "delta"});
  const double t0 = p.t_start(), T = p.gate_duration();
  for (int k = 0; k < n_points; ++k) {
    const double t = n_points > 1 ? t0 + T * k / (n_points - 1) : 0.0;
    w.row(t, omega_p(t, p), omega_c(t, p), detuning(t, p));
  }
}

}  // namespace rydcz
