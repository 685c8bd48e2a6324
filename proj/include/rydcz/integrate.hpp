#pragma once

#include "qla.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydcz {

struct IntegratorOptions {
  enum class Method { adaptive, fixed_rk4 };
  Method method = Method::adaptive;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = 0;        // 0: pulse width / 20
  double fixed_step = 5e-5;   // us, fixed_rk4 only
  double min_step = 1e-12;
  long max_steps = 100'000'000;

  void validate() const {
    if (!(rel_tol > 0 && abs_tol > 0)) throw std::invalid_argument("integrator tolerances must be positive");
    if (max_step < 0 || !(fixed_step > 0) || !(min_step > 0)) throw std::invalid_argument("bad integrator step sizes");
  }
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what + " at t = " + std::to_string(t) + " us"), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

struct NoHook {
  void operator()(double, ComplexVector&, bool) const {}
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct DP45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

// Integrates y' = f(t, y) from t0 to t1. f(t, y, dydt) writes into dydt.
// hook(t, y, at_stop) runs after every accepted step and may modify y;
// steps are shortened to land exactly on each time in `stops`.
template <class F, class Hook = NoHook>
IntegrationStats integrate(F&& f, double t0, double t1, ComplexVector& y, const IntegratorOptions& opts,
                           Hook&& hook = {}, const std::vector<double>& stops = {}) {
  opts.validate();
  IntegrationStats st;
  if (t1 <= t0) return st;
  const Eigen::Index n = y.size();
  const double max_step = opts.max_step > 0 ? opts.max_step : (t1 - t0);

  std::vector<double> marks;
  for (double s : stops)
    if (s > t0 && s < t1) marks.push_back(s);
  std::sort(marks.begin(), marks.end());
  marks.push_back(t1);
  std::size_t next_mark = 0;

  auto advance_mark = [&](double t, ComplexVector& yy) {
    bool at_stop = false;
    while (next_mark < marks.size() && std::abs(marks[next_mark] - t) <= 1e-14 * std::max(1.0, std::abs(t))) {
      at_stop = true;
      ++next_mark;
    }
    hook(t, yy, at_stop);
  };

  double t = t0;
  if (opts.method == IntegratorOptions::Method::fixed_rk4) {
    ComplexVector k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double h_nom = std::min(opts.fixed_step, max_step);
    while (t < t1) {
      const double target = marks[next_mark];
      const long n_sub = std::max(1L, static_cast<long>(std::ceil((target - t) / h_nom - 1e-9)));
      const double h = (target - t) / static_cast<double>(n_sub);
      for (long s = 0; s < n_sub; ++s) {
        const double ts = (s + 1 == n_sub) ? target : t + h;
        f(t, y, k1);
        tmp = y + (0.5 * h) * k1;
        f(t + 0.5 * h, tmp, k2);
        tmp = y + (0.5 * h) * k2;
        f(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        f(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        st.rhs_evals += 4;
        ++st.accepted;
        if (!y.allFinite()) throw IntegrationError("non-finite state", ts);
        t = ts;
        if (s + 1 < n_sub) hook(t, y, false);
      }
      advance_mark(t, y);
    }
    return st;
  }

  using T = detail::DP45;
  ComplexVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  f(t, y, k1);
  st.rhs_evals = 1;
  double h = std::min({max_step, (t1 - t0) / 100.0, 1e-5});
  double err_prev = 1.0;
  while (t < t1) {
    if (st.accepted + st.rejected > opts.max_steps) throw IntegrationError("step budget exhausted", t);
    const double target = marks[next_mark];
    bool hits = false;
    double hh = std::min(h, max_step);
    if (t + hh >= target - 1e-14 * std::max(1.0, std::abs(target))) {
      hh = target - t;
      hits = true;
    }
    if (hh < opts.min_step && !hits) throw IntegrationError("step size underflow", t);

    ytmp = y + hh * (T::a21 * k1);
    f(t + T::c2 * hh, ytmp, k2);
    ytmp = y + hh * (T::a31 * k1 + T::a32 * k2);
    f(t + T::c3 * hh, ytmp, k3);
    ytmp = y + hh * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
    f(t + T::c4 * hh, ytmp, k4);
    ytmp = y + hh * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
    f(t + T::c5 * hh, ytmp, k5);
    ytmp = y + hh * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
    f(t + hh, ytmp, k6);
    ynew = y + hh * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
    f(t + hh, ynew, k7);
    st.rhs_evals += 6;
    err = hh * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

    double acc = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = std::abs(err[i]) / sc;
      acc += r * r;
    }
    double e = std::sqrt(acc / static_cast<double>(n));
    if (!std::isfinite(e)) e = 1e10;

    if (e <= 1.0) {
      t = hits ? target : t + hh;
      y.swap(ynew);
      k1.swap(k7);
      ++st.accepted;
      // PI step control
      const double fac = e == 0 ? 5.0 : 0.9 * std::pow(e, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
      err_prev = std::max(e, 1e-4);
      if (hits) {
        advance_mark(t, y);
        f(t, y, k1);  // hook may have changed y
        ++st.rhs_evals;
      } else {
        hook(t, y, false);
      }
      // a step truncated to land on a mark keeps the previous proposal
      if (!hits || hh >= h) h = hh * std::clamp(fac, 0.2, 5.0);
    } else {
      ++st.rejected;
      h = hh * std::max(0.2, 0.9 * std::pow(e, -0.2));
      if (h < opts.min_step) throw IntegrationError("step size underflow", t);
    }
  }
  return st;
}

}  // namespace rydcz
