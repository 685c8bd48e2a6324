#pragma once

#include "error_sample.hpp"
#include "integrate.hpp"
#include "pulses.hpp"
#include "qla.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rydcz {

struct DecayConstants {
  double gamma_r = 1.0 / 375.0;  // 1/us
  double gamma_p = 1.0 / 0.118;
  std::array<double, 3> b_r{0.059, 0.055, 0.886};  // into 0, 1, d
  std::array<double, 3> b_p{0.1354, 0.2504, 0.6142};

  static DecayConstants none() {
    DecayConstants d;
    d.gamma_r = 0;
    d.gamma_p = 0;
    return d;
  }

  bool any() const { return gamma_r > 0 || gamma_p > 0; }

  void validate() const {
    if (gamma_r < 0 || gamma_p < 0) throw std::invalid_argument("decay rates must be non-negative");
    double sr = 0, sp = 0;
    for (int i = 0; i < 3; ++i) {
      if (b_r[i] < 0 || b_p[i] < 0) throw std::invalid_argument("branching ratios must be non-negative");
      sr += b_r[i];
      sp += b_p[i];
    }
    if (std::abs(sr - 1) > 1e-4 || std::abs(sp - 1) > 1e-4) throw std::invalid_argument("branching ratios must sum to 1");
  }

  friend bool operator==(const DecayConstants&, const DecayConstants&) = default;
};

inline constexpr std::array<Level, 3> decay_targets{Level::zero, Level::one, Level::d};

inline IntegratorOptions resolved(IntegratorOptions o, const PulseParams& p) {
  if (o.max_step <= 0) o.max_step = p.width / 20.0;
  return o;
}

// ---- dense construction, used as reference and for diagnostics ----

inline ComplexMatrix single_atom_h(double t, const PulseParams& p, const ErrorSample& e, Atom a = Atom::control,
                                   const LaserBeams& beams = {}) {
  const WaveformSample w = apply_modifiers(waveform(t, p, e.eps_Delta), t, e, a, beams);
  const int one = 1, pp = 2, r = 3;
  ComplexMatrix h = ComplexMatrix::Zero(n_levels, n_levels);
  h(pp, one) = 0.5 * w.omega_p;
  h(one, pp) = std::conj(h(pp, one));
  h(r, pp) = 0.5 * w.omega_c;
  h(pp, r) = std::conj(h(r, pp));
  h(r, r) = -e.eps_delta;
  h(pp, pp) = -w.delta;
  return h;
}

inline ComplexMatrix two_atom_h(double t, const PulseParams& p, const ErrorSample& e, const LaserBeams& beams = {}) {
  const ComplexMatrix id = ComplexMatrix::Identity(n_levels, n_levels);
  ComplexMatrix h = kron(single_atom_h(t, p, e, Atom::control, beams), id) +
                    kron(id, single_atom_h(t, p, e, Atom::target, beams));
  const int rr = flat_index(Level::r, Level::r);
  h(rr, rr) += p.blockade + e.dB;
  return h;
}

inline std::vector<ComplexMatrix> jump_operators(const DecayConstants& d, const ErrorSample& e) {
  std::vector<ComplexMatrix> ls;
  const ComplexMatrix id = ComplexMatrix::Identity(n_levels, n_levels);
  std::vector<ComplexMatrix> single;
  for (int q = 0; q < 3; ++q) {
    const int to = static_cast<int>(decay_targets[q]);
    if (d.gamma_p > 0) single.push_back(std::sqrt(d.gamma_p * d.b_p[q]) * ket_bra(n_levels, to, 2));
    if (d.gamma_r > 0) single.push_back(std::sqrt(d.gamma_r * d.b_r[q]) * ket_bra(n_levels, to, 3));
  }
  if (e.gamma1 > 0) single.push_back(std::sqrt(e.gamma1 / 2) * (ket_bra(n_levels, 2, 2) - ket_bra(n_levels, 1, 1)));
  if (e.gamma2 > 0) single.push_back(std::sqrt(e.gamma2 / 2) * (ket_bra(n_levels, 3, 3) - ket_bra(n_levels, 2, 2)));
  for (const auto& l : single) {
    ls.push_back(kron(l, id));
    ls.push_back(kron(id, l));
  }
  return ls;
}

inline ComplexMatrix lindblad_rhs(const DensityMatrix& rho, double t, const PulseParams& p, const ErrorSample& e,
                                  const DecayConstants& d, const LaserBeams& beams = {}) {
  const ComplexMatrix& r = rho.matrix();
  const ComplexMatrix h = two_atom_h(t, p, e, beams);
  ComplexMatrix out = -I * (h * r - r * h);
  for (const auto& l : jump_operators(d, e)) {
    const ComplexMatrix ldl = l.adjoint() * l;
    out += l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl);
  }
  return out;
}

// ---- fast density-matrix generator ----

class LindbladModel {
 public:
  LindbladModel(const PulseParams& p, const ErrorSample& e, const DecayConstants& d, const LaserBeams& beams = {})
      : p_(p), e_(e) {
    scale_[0] = amplitude_scale(e, Atom::control, beams);
    scale_[1] = amplitude_scale(e, Atom::target, beams);
    blockade_ = p.blockade + e.dB;

    std::array<double, n_levels> gamma_level{};  // total loss rate of each single-atom level
    for (int q = 0; q < 3; ++q) {
      if (d.gamma_p > 0) jumps_.push_back({2, static_cast<int>(decay_targets[q]), d.gamma_p * d.b_p[q]});
      if (d.gamma_r > 0) jumps_.push_back({3, static_cast<int>(decay_targets[q]), d.gamma_r * d.b_r[q]});
      gamma_level[2] += d.gamma_p * d.b_p[q];
      gamma_level[3] += d.gamma_r * d.b_r[q];
    }
    for (int k = 0; k < n_states; ++k) {
      const auto [a, b] = split_index(k);
      loss_[k] = 0.5 * (gamma_level[static_cast<int>(a)] + gamma_level[static_cast<int>(b)]);
    }

    has_dephasing_ = e.dephasing();
    if (has_dephasing_) {
      // diagonal dephasing operators: L rho L^+ - {L^+L, rho}/2 = -(l_i - l_j)^2/2 rho_ij
      std::array<double, n_levels> l1{}, l2{};
      l1[1] = -std::sqrt(e.gamma1 / 2);
      l1[2] = std::sqrt(e.gamma1 / 2);
      l2[2] = -std::sqrt(e.gamma2 / 2);
      l2[3] = std::sqrt(e.gamma2 / 2);
      deph_.setZero();
      for (int i = 0; i < n_states; ++i)
        for (int j = 0; j < n_states; ++j) {
          const auto [ai, bi] = split_index(i);
          const auto [aj, bj] = split_index(j);
          double s = 0;
          for (const auto* l : {&l1, &l2}) {
            const double dc = (*l)[static_cast<int>(ai)] - (*l)[static_cast<int>(aj)];
            const double dt = (*l)[static_cast<int>(bi)] - (*l)[static_cast<int>(bj)];
            s += dc * dc + dt * dt;
          }
          deph_(i, j) = -0.5 * s;
        }
    }
  }

  void set_segment(double t) { delta_ = detuning(t, p_, e_.eps_Delta); }

  struct Fields {
    cplx op[2], oc[2];
    double delta;
  };

  Fields fields(double t) const {
    const double wp = omega_p(t, p_), wc = omega_c(t, p_);
    Fields f;
    cplx rp = 1.0, rc = 1.0;
    if (e_.phase_rate_p != 0) rp = std::exp(I * (e_.phase_rate_p * t));
    if (e_.phase_rate_c != 0) rc = std::exp(I * (e_.phase_rate_c * t));
    for (int a = 0; a < 2; ++a) {
      f.op[a] = wp * scale_[a].p * rp;
      f.oc[a] = wc * scale_[a].c * rc;
    }
    f.delta = delta_;
    return f;
  }

  void operator()(double t, const ComplexVector& y, ComplexVector& dy) const {
    const Fields f = fields(t);
    Eigen::Map<const Eigen::Matrix<cplx, n_states, n_states>> rho(y.data());
    Eigen::Map<Eigen::Matrix<cplx, n_states, n_states>> out(dy.data());

    std::array<double, n_levels> en{0, 0, -f.delta, -e_.eps_delta, 0};
    std::array<cplx, n_states> diag;
    for (int k = 0; k < n_states; ++k) {
      const int a = k / n_levels, b = k % n_levels;
      double ek = en[a] + en[b];
      if (a == 3 && b == 3) ek += blockade_;
      diag[k] = cplx(ek, -loss_[k]);
    }
    // X = H_eff rho, then d rho = -i (X - X^+) + jumps
    Eigen::Matrix<cplx, n_states, n_states> x;
    const cplx hp[2] = {0.5 * f.op[0], 0.5 * f.op[1]};
    const cplx hc[2] = {0.5 * f.oc[0], 0.5 * f.oc[1]};
    for (int col = 0; col < n_states; ++col) {
      const cplx* rc = y.data() + col * n_states;
      cplx* xc = &x(0, col);
      for (int k = 0; k < n_states; ++k) xc[k] = diag[k] * rc[k];
      for (int o = 0; o < n_levels; ++o) {
        // control atom couplings, target level o fixed
        const int k1 = 1 * n_levels + o, kp = 2 * n_levels + o, kr = 3 * n_levels + o;
        xc[kp] += hp[0] * rc[k1] + std::conj(hc[0]) * rc[kr];
        xc[k1] += std::conj(hp[0]) * rc[kp];
        xc[kr] += hc[0] * rc[kp];
        // target atom couplings, control level o fixed
        const int j1 = o * n_levels + 1, jp = o * n_levels + 2, jr = o * n_levels + 3;
        xc[jp] += hp[1] * rc[j1] + std::conj(hc[1]) * rc[jr];
        xc[j1] += std::conj(hp[1]) * rc[jp];
        xc[jr] += hc[1] * rc[jp];
      }
    }
    for (int j = 0; j < n_states; ++j)
      for (int i = 0; i < n_states; ++i) out(i, j) = cplx(0, -1) * (x(i, j) - std::conj(x(j, i)));

    if (has_dephasing_) out += (deph_.cast<cplx>().array() * rho.array()).matrix();

    for (const auto& jmp : jumps_) {
      for (int b = 0; b < n_levels; ++b)
        for (int b2 = 0; b2 < n_levels; ++b2) {
          out(jmp.to * n_levels + b, jmp.to * n_levels + b2) += jmp.rate * rho(jmp.from * n_levels + b, jmp.from * n_levels + b2);
          out(b * n_levels + jmp.to, b2 * n_levels + jmp.to) += jmp.rate * rho(b * n_levels + jmp.from, b2 * n_levels + jmp.from);
        }
    }
  }

 private:
  struct Jump {
    int from, to;
    double rate;
  };
  PulseParams p_;
  ErrorSample e_;
  AmplitudeScale scale_[2];
  double blockade_;
  double delta_ = 0;
  std::vector<Jump> jumps_;
  std::array<double, n_states> loss_{};
  bool has_dephasing_ = false;
  Eigen::Matrix<double, n_states, n_states> deph_;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<DensityMatrix> rho;
};

inline void symmetrize(ComplexVector& y) {
  Eigen::Map<Eigen::Matrix<cplx, n_states, n_states>> m(y.data());
  const Eigen::Matrix<cplx, n_states, n_states> herm = 0.5 * (m + m.adjoint());
  m = herm;
}

inline DensityMatrix evolve(const DensityMatrix& rho0, const PulseParams& p, const ErrorSample& e,
                            const DecayConstants& d, const IntegratorOptions& opts = {},
                            const std::vector<double>& sample_times = {}, Trajectory* traj = nullptr,
                            const LaserBeams& beams = {}) {
  p.validate();
  d.validate();
  if (!e.finite()) throw std::invalid_argument("error sample has non-finite fields");
  const IntegratorOptions o = resolved(opts, p);
  LindbladModel model(p, e, d, beams);

  ComplexVector y = Eigen::Map<const ComplexVector>(rho0.matrix().data(), n_states * n_states);
  std::size_t next = 0;
  auto record = [&](double t, ComplexVector& s) {
    while (traj && next < sample_times.size() && std::abs(sample_times[next] - t) <= 1e-12) {
      traj->t.push_back(t);
      traj->rho.push_back(DensityMatrix::unchecked(Eigen::Map<const ComplexMatrix>(s.data(), n_states, n_states)));
      ++next;
    }
  };
  auto hook = [&](double t, ComplexVector& s, bool) {
    symmetrize(s);
    record(t, s);
  };
  while (next < sample_times.size() && sample_times[next] < p.t_start() - 1e-12) ++next;
  record(p.t_start(), y);
  model.set_segment(p.t_start());
  integrate(model, p.t_start(), 0.0, y, o, hook, sample_times);
  model.set_segment(p.t_end());
  integrate(model, 0.0, p.t_end(), y, o, hook, sample_times);
  return DensityMatrix::unchecked(Eigen::Map<const ComplexMatrix>(y.data(), n_states, n_states));
}

// ---- decay-free fast path: decoupled pure-state channels ----
//
// |00> is static; |01> and |10> each drive one atom in {1,p,r};
// |11> lives in the 9-dim {1,p,r}x{1,p,r} block.

struct ChannelState {
  std::array<cplx, 3> s01{};  // target atom (1,p,r), control in 0
  std::array<cplx, 3> s10{};  // control atom (1,p,r), target in 0
  std::array<cplx, 9> s11{};  // index 3*control + target

  cplx a01() const { return s01[0]; }
  cplx a10() const { return s10[0]; }
  cplx a11() const { return s11[0]; }

  static ChannelState initial() {
    ChannelState c;
    c.s01[0] = c.s10[0] = c.s11[0] = 1.0;
    return c;
  }
};

inline constexpr int channel_dim = 15;

class ChannelModel {
 public:
  ChannelModel(const PulseParams& p, const ErrorSample& e, std::vector<double> eps_delta, const LaserBeams& beams = {})
      : p_(p), e_(e), eps_(std::move(eps_delta)) {
    scale_[0] = amplitude_scale(e, Atom::control, beams);
    scale_[1] = amplitude_scale(e, Atom::target, beams);
    blockade_ = p.blockade + e.dB;
  }

  std::size_t copies() const { return eps_.size(); }

  // the detuning is piecewise constant; each segment pins its sign so that
  // stages evaluated exactly at t = 0 stay on the correct side
  void set_segment(double t) { delta_ = detuning(t, p_, e_.eps_Delta); }

  void operator()(double t, const ComplexVector& y, ComplexVector& dy) const {
    const double wp = omega_p(t, p_), wc = omega_c(t, p_);
    cplx rp = 1.0, rc = 1.0;
    if (e_.phase_rate_p != 0) rp = std::exp(I * (e_.phase_rate_p * t));
    if (e_.phase_rate_c != 0) rc = std::exp(I * (e_.phase_rate_c * t));
    cplx hp[2], hc[2];
    for (int a = 0; a < 2; ++a) {
      hp[a] = 0.5 * wp * scale_[a].p * rp;
      hc[a] = 0.5 * wc * scale_[a].c * rc;
    }
    const double ep = -delta_;
    const cplx mi(0, -1);

    for (std::size_t k = 0; k < eps_.size(); ++k) {
      const cplx* s = y.data() + k * channel_dim;
      cplx* ds = dy.data() + k * channel_dim;
      const double en[3] = {0, ep, -eps_[k]};
      // single-atom channels: target (01) then control (10)
      for (int c = 0; c < 2; ++c) {
        const int a = c == 0 ? 1 : 0;
        const cplx* v = s + 3 * c;
        cplx* dv = ds + 3 * c;
        dv[0] = mi * (std::conj(hp[a]) * v[1]);
        dv[1] = mi * (hp[a] * v[0] + en[1] * v[1] + std::conj(hc[a]) * v[2]);
        dv[2] = mi * (hc[a] * v[1] + en[2] * v[2]);
      }
      const cplx* v = s + 6;
      cplx* dv = ds + 6;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double e = en[a] + en[b];
          if (a == 2 && b == 2) e += blockade_;
          cplx acc = e * v[3 * a + b];
          // control atom (first index)
          if (a == 0) acc += std::conj(hp[0]) * v[3 + b];
          if (a == 1) acc += hp[0] * v[b] + std::conj(hc[0]) * v[6 + b];
          if (a == 2) acc += hc[0] * v[3 + b];
          // target atom (second index)
          if (b == 0) acc += std::conj(hp[1]) * v[3 * a + 1];
          if (b == 1) acc += hp[1] * v[3 * a] + std::conj(hc[1]) * v[3 * a + 2];
          if (b == 2) acc += hc[1] * v[3 * a + 1];
          dv[3 * a + b] = mi * acc;
        }
    }
  }

 private:
  PulseParams p_;
  ErrorSample e_;
  std::vector<double> eps_;
  AmplitudeScale scale_[2];
  double blockade_;
  double delta_ = 0;
};

struct ChannelTrajectory {
  std::vector<double> t;
  std::vector<ChannelState> states;
};

// Evolves the three non-trivial channels for each value in eps_delta (which
// replaces e.eps_delta), batched into one ODE system.
inline std::vector<ChannelState> evolve_channels(const PulseParams& p, const ErrorSample& e,
                                                 const std::vector<double>& eps_delta,
                                                 const IntegratorOptions& opts = {},
                                                 const std::vector<double>& sample_times = {},
                                                 ChannelTrajectory* traj = nullptr, const LaserBeams& beams = {}) {
  p.validate();
  if (!e.finite()) throw std::invalid_argument("error sample has non-finite fields");
  const IntegratorOptions o = resolved(opts, p);
  ChannelModel model(p, e, eps_delta, beams);
  const std::size_t K = eps_delta.size();
  ComplexVector y(static_cast<Eigen::Index>(K * channel_dim));
  for (std::size_t k = 0; k < K; ++k) {
    const ChannelState c = ChannelState::initial();
    cplx* s = y.data() + k * channel_dim;
    std::copy(c.s01.begin(), c.s01.end(), s);
    std::copy(c.s10.begin(), c.s10.end(), s + 3);
    std::copy(c.s11.begin(), c.s11.end(), s + 6);
  }

  auto physical = [&](const ComplexVector& s, std::size_t k) {
    ChannelState c;
    const cplx* v = s.data() + k * channel_dim;
    std::copy(v, v + 3, c.s01.begin());
    std::copy(v + 3, v + 6, c.s10.begin());
    std::copy(v + 6, v + 15, c.s11.begin());
    return c;
  };

  std::size_t next = 0;
  auto record = [&](double t, ComplexVector& s) {
    while (traj && next < sample_times.size() && std::abs(sample_times[next] - t) <= 1e-12) {
      traj->t.push_back(t);
      traj->states.push_back(physical(s, 0));
      ++next;
    }
  };
  auto hook = [&](double t, ComplexVector& s, bool) { record(t, s); };
  while (next < sample_times.size() && sample_times[next] < p.t_start() - 1e-12) ++next;
  model.set_segment(p.t_start());
  record(p.t_start(), y);
  integrate(model, p.t_start(), 0.0, y, o, hook, sample_times);
  model.set_segment(p.t_end());
  integrate(model, 0.0, p.t_end(), y, o, hook, sample_times);

  std::vector<ChannelState> out;
  out.reserve(K);
  for (std::size_t k = 0; k < K; ++k) out.push_back(physical(y, k));
  return out;
}

inline ChannelState evolve_channels(const PulseParams& p, const ErrorSample& e, const IntegratorOptions& opts = {},
                                    const LaserBeams& beams = {}) {
  return evolve_channels(p, e, std::vector<double>{e.eps_delta}, opts, {}, nullptr, beams).front();
}

// embeds a channel state into the 25-dim two-atom space for input psi+ (weights 1/2)
inline ComplexVector channel_superposition(const ChannelState& c) {
  ComplexVector psi = ComplexVector::Zero(n_states);
  const int lv[3] = {1, 2, 3};
  psi(flat_index(Level::zero, Level::zero)) = 0.5;
  for (int i = 0; i < 3; ++i) {
    psi(0 * n_levels + lv[i]) += 0.5 * c.s01[i];
    psi(lv[i] * n_levels + 0) += 0.5 * c.s10[i];
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) psi(lv[a] * n_levels + lv[b]) += 0.5 * c.s11[3 * a + b];
  return psi;
}

}  // namespace rydcz
