#pragma once

#include <rydcz/dynamics.hpp>

#include <functional>
#include <random>

namespace rydcz::test {

inline IntegratorOptions rk4(double h = 5e-5) {
  IntegratorOptions o;
  o.method = IntegratorOptions::Method::fixed_rk4;
  o.fixed_step = h;
  return o;
}

inline ComplexMatrix random_matrix(int n, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(N(g), N(g));
  return m;
}

inline ComplexMatrix random_hermitian(int n, std::mt19937_64& g) {
  const ComplexMatrix a = random_matrix(n, g);
  return 0.5 * (a + a.adjoint());
}

inline DensityMatrix random_density(std::mt19937_64& g) {
  const ComplexMatrix a = random_matrix(n_states, g);
  ComplexMatrix r = a * a.adjoint();
  r /= r.trace();
  return DensityMatrix(0.5 * (r + r.adjoint()));
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

// pulses that are numerically zero everywhere on the gate window
inline PulseParams dark_pulse() {
  PulseParams p = presets::der();
  p.omega_p_max = p.omega_c_max = 1e-300;
  return p;
}

}  // namespace rydcz::test
