#pragma once

#include <array>
#include <cmath>

namespace rydcz {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

// one realization of every quasi-static noise channel; all zero = ideal
struct ErrorSample {
  double eps_delta = 0;    // two-photon detuning error, rad/us
  double eps_Delta = 0;    // intermediate detuning error, rad/us
  double eps_omega_p = 0;  // relative amplitude error
  double eps_omega_c = 0;
  double gamma1 = 0;  // laser dephasing rates, 1/us
  double gamma2 = 0;
  Vec3 r_c{};  // atom positions relative to beam focus, um
  Vec3 r_t{};
  double dB = 0;  // blockade shift deviation, rad/us

  // laser phase ramps Omega -> Omega e^{i k t}; the alternate Doppler form
  double phase_rate_p = 0;
  double phase_rate_c = 0;

  bool finite() const {
    const std::array v{eps_delta, eps_Delta, eps_omega_p, eps_omega_c, gamma1, gamma2, r_c.x, r_c.y,
                       r_c.z, r_t.x, r_t.y, r_t.z, dB, phase_rate_p, phase_rate_c};
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool dephasing() const { return gamma1 > 0 || gamma2 > 0; }

  friend bool operator==(const ErrorSample&, const ErrorSample&) = default;
};

}  // namespace rydcz
