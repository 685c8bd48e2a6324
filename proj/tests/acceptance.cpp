// Acceptance run: one PASS/FAIL line per criterion.
#include <rydcz/experiments.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

using namespace rydcz;

namespace {

int failures = 0;

struct Check {
  std::ostringstream why;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    why << (why.tellp() > 0 ? "; " : "") << what << (cond ? "" : " [x]");
    ok = ok && cond;
  }
};

std::string num(double x) { return format_double(x); }

void report(int id, const std::string& name, const Check& c, double seconds) {
  std::printf("%s %d %s: %s (%.0f s)\n", c.ok ? "PASS" : "FAIL", id, name.c_str(), c.why.str().c_str(), seconds);
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

template <class Fn>
void criterion(int id, const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    fn(c);
  } catch (const std::exception& ex) {
    c.expect(false, std::string("exception: ") + ex.what());
  }
  report(id, name, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

RunConfig base_config() {
  RunConfig c;
  c.workers = 0;
  return c;
}

double ideal_fidelity(const PulseParams& p) {
  return gate_fidelity_phase(p, ErrorSample{}, DecayConstants::none(), base_config().eval_options());
}

std::vector<double> scan_infidelity(const PulseParams& p, const std::vector<double>& mhz) {
  std::vector<double> grid;
  for (double f : mhz) grid.push_back(two_pi * f);
  std::vector<double> out;
  for (const auto& s : infidelity_scan(p, grid, DecayConstants::none(), base_config().eval_options()))
    out.push_back(s.infidelity_phase);
  return out;
}

double at(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - x) < 1e-9) return ys[i];
  throw std::out_of_range("grid point missing");
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double ratio(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / std::max(*lo, 1e-300);
}

double rms_doppler_MHz(double T, std::uint64_t seed) {
  const PhysicalNoiseConfig phys = base_config().physical();
  Rng rng(seed);
  std::vector<double> sq;
  for (int i = 0; i < 100000; ++i) {
    const double d = sample_doppler(T, phys, rng).eps_delta / two_pi;
    sq.push_back(d * d);
  }
  return std::sqrt(mean_of(sq));
}

}  // namespace

int main() {
  const RunConfig cfg = base_config();
  const std::vector<double> scan_mhz = linspace(-1.0, 1.0, 21);

  criterion(1, "ideal TO fidelity", [&](Check& c) {
    const double f = ideal_fidelity(presets::to());
    c.expect(f >= 0.9999, "F = " + num(f) + ", need >= 0.9999");
  });

  criterion(2, "ideal DER fidelity", [&](Check& c) {
    const double f = ideal_fidelity(presets::der());
    c.expect(std::abs(f - 0.9971) <= 0.0015, "F = " + num(f) + ", need 0.9971 +- 0.0015");
  });

  criterion(3, "detuning scan shape", [&](Check& c) {
    const auto to = scan_infidelity(presets::to(), scan_mhz);
    const auto der = scan_infidelity(presets::der(), scan_mhz);
    for (double x : {-1.0, 1.0}) {
      const double v = at(scan_mhz, to, x);
      c.expect(v >= 0.01 && v <= 0.04, "TO 1-F(" + num(x) + " MHz) = " + num(v) + " in [0.01, 0.04]");
    }
    for (double x : {-0.7, 0.7}) {
      const double v = at(scan_mhz, der, x);
      c.expect(v >= 0.001 && v <= 0.004, "DER 1-F(" + num(x) + " MHz) = " + num(v) + " in [0.001, 0.004]");
    }
    const double rd = ratio(der), rt = ratio(to);
    c.expect(5 * rd <= rt, "max/min ratio DER " + num(rd) + " vs TO " + num(rt) + ", need 5x flatter");
  });

  criterion(4, "TO phases and effective model", [&](Check& c) {
    PhaseSummary s;
    figure_5(cfg, &s, "to");
    const double p01 = s.phi01 / pi, p11 = s.phi11 / pi, comb = (2 * s.phi01 - s.phi11) / pi;
    c.expect(std::abs(p01 - 1) <= 1e-3, "phi01/pi = " + num(p01));
    c.expect(std::abs(p11 - 0.99902) <= 2e-3, "phi11/pi = " + num(p11));
    c.expect(std::abs(comb - 1.00098) <= 2e-3, "(2phi01 - phi11)/pi = " + num(comb));
    c.expect(s.max_population_gap <= 1e-2, "effective vs full population gap = " + num(s.max_population_gap));
  });

  criterion(5, "Doppler calibration", [&](Check& c) {
    const double r15 = rms_doppler_MHz(1.5, 11), r05 = rms_doppler_MHz(0.5, 12);
    c.expect(std::abs(r15 / 0.528 - 1) <= 0.02, "rms(1.5 mK) = " + num(r15) + " MHz");
    c.expect(std::abs(r05 / 0.3048 - 1) <= 0.02, "rms(0.5 mK) = " + num(r05) + " MHz");
  });

  criterion(6, "Doppler trend with decay", [&](Check& c) {
    const std::vector<double> temps{0.3, 1.5, 2.0};
    std::map<std::string, Table> t;
    for (const std::string name : {"der_i_gauss", "der", "to"}) t.emplace(name, doppler_curve(cfg, name, temps, true, name));
    auto f = [&](const std::string& n, double T) { return at(temps, t.at(n).column("mean_fidelity"), T); };
    auto e = [&](const std::string& n, double T) { return at(temps, t.at(n).column("stderr"), T); };
    auto ge = [&](const std::string& a, const std::string& b, double T) {
      const double slack = std::hypot(e(a, T), e(b, T));
      c.expect(f(a, T) + slack >= f(b, T), "F_" + a + "(" + num(T) + ") = " + num(f(a, T)) + " >= F_" + b + " = " + num(f(b, T)));
    };
    ge("der_i_gauss", "der", 2.0);
    ge("der", "to", 2.0);
    ge("to", "der", 0.3);
    ge("to", "der_i_gauss", 0.3);
    c.expect(f("der_i_gauss", 1.5) + e("der_i_gauss", 1.5) >= 0.99,
             "F_der_i(1.5 mK) = " + num(f("der_i_gauss", 1.5)) + " +- " + num(e("der_i_gauss", 1.5)) + " >= 0.99");
  });

  criterion(7, "ac Stark bound and amplitude trend", [&](Check& c) {
    const double b = ac_stark_bound(0.05, presets::der()) / two_pi;
    c.expect(std::abs(b / 0.32 - 1) <= 0.25, "max|eps_delta(t)|/2pi = " + num(b) + " MHz, need 0.32 +- 25%");
    const std::vector<double> eps{0.01, 0.02, 0.03, 0.04, 0.05};
    const Table to = amplitude_curve(cfg, "to", eps);
    for (const std::string name : {"der", "der_i_uniform"}) {
      const Table t = amplitude_curve(cfg, name, eps);
      const auto y = t.column("mean_infidelity"), yt = to.column("mean_infidelity");
      for (std::size_t i = 0; i < eps.size(); ++i)
        c.expect(y[i] < yt[i], name + " " + num(y[i]) + " < TO " + num(yt[i]) + " at " + num(eps[i]));
    }
  });

  criterion(8, "passive error magnitudes", [&](Check& c) {
    const Scale sc = Scale::of(cfg);
    for (char panel : {'a', 'd'}) {
      const double limit = panel == 'a' ? 1e-6 : 1e-8;
      const auto xs = fig7_axis(panel, sc);
      for (const auto& name : passive_pulses()) {
        const auto y = fig7_curve(cfg, panel, name, xs).column("mean_infidelity");
        const double worst = *std::max_element(y.begin(), y.end());
        c.expect(worst < limit, std::string("panel ") + panel + " " + name + " max = " + num(worst) + " < " + num(limit));
      }
    }
    const PhysicalNoiseConfig phys = cfg.physical();
    const double dr = blockade_position_deviation_um(0.1, two_pi * cfg.constants.blockade_MHz, phys) * 1e3;
    c.expect(std::abs(dr / 45.83 - 1) <= 0.01, "delta r = " + num(dr) + " nm");
    const Vec3 s = phys.position_sigma(2.0);
    const Vec3 want{0.47, 0.60, 1.99};
    c.expect(std::abs(s.x / want.x - 1) <= 0.02 && std::abs(s.y / want.y - 1) <= 0.02 && std::abs(s.z / want.z - 1) <= 0.02,
             "sigma(2 mK) = (" + num(s.x) + ", " + num(s.y) + ", " + num(s.z) + ") um");
  });

  criterion(9, "Pareto study and GA flatness", [&](Check& c) {
    RunConfig pc = cfg;
    pc.optimizer.cost = "der_i";
    const auto front = pareto_front(pc.cost_spec(), pc.ga_options());
    c.expect(front.size() >= 10, "front size " + std::to_string(front.size()));
    bool inverse = true, audit = true;
    for (std::size_t i = 0; i < front.size(); ++i) {
      if (i && !(front[i].j1 > front[i - 1].j1 && front[i].j2 < front[i - 1].j2)) inverse = false;
      for (std::size_t k = 0; k < front.size(); ++k)
        if (k != i && dominates({front[k].j1, front[k].j2}, {front[i].j1, front[i].j2})) audit = false;
    }
    c.expect(inverse, "strictly inverse ordering");
    c.expect(audit, "dominance audit");
    if (!front.empty()) {
      const auto near = std::min_element(front.begin(), front.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        return std::abs(std::log(a.j2 / 4.3e-3)) < std::abs(std::log(b.j2 / 4.3e-3));
      });
      const double f0 = 1 - near->j1;
      c.expect(near->j2 > 2.15e-3 && near->j2 < 8.6e-3 && std::abs(f0 - 0.9958) <= 0.003,
               "point nearest J2 = 4.3e-3 has J2 = " + num(near->j2) + ", F(0) = " + num(f0));
    }

    RunConfig gc = cfg;
    gc.optimizer.cost = "der";
    const GAResult ga = ga_minimize(gc.cost_spec(), gc.ga_options());
    const PulseParams found = with_genome(gc.cost_spec().base, ga.best);
    const double s_found = spread(scan_infidelity(found, scan_mhz));
    const double s_ref = spread(scan_infidelity(presets::der(), scan_mhz));
    c.expect(s_found <= 2 * s_ref, "GA DER (" + num(ga.best[0]) + ", " + num(ga.best[1]) + ", " + num(ga.best[2]) +
                                       ") scan spread " + num(s_found) + " vs published " + num(s_ref));
  });

  criterion(10, "property suite", [&](Check& c) {
    const PulseParams p = presets::der();
    const IntegratorOptions rk4 = cfg.integrator_options();
    const auto times = linspace(p.t_start(), p.t_end(), 41);

    Trajectory open;
    evolve(DensityMatrix::pure(psi_plus()), p, ErrorSample{}, DecayConstants::none(), rk4, times, &open);
    RunConfig dc = cfg;
    dc.constants.decays = true;
    Trajectory lossy;
    evolve(DensityMatrix::pure(psi_plus()), p, ErrorSample{}, dc.decay_constants(), rk4, times, &lossy);
    double tr = 0, neg = 0, pur = 0;
    for (const auto& r : lossy.rho) {
      tr = std::max(tr, std::abs(r.trace() - 1));
      neg = std::min(neg, r.min_eigenvalue());
    }
    for (const auto& r : open.rho) pur = std::max(pur, std::abs(r.purity() - 1));
    c.expect(tr <= 1e-8, "trace drift " + num(tr));
    c.expect(neg >= -1e-8, "min eigenvalue " + num(neg));
    c.expect(pur <= 1e-7, "closed purity drift " + num(pur));

    const GateResult g = simulate_gate(p, ErrorSample{}, DecayConstants::none(), cfg.eval_options());
    c.expect(std::abs(g.phi01 - g.phi10) <= 1e-6, "|phi01 - phi10| = " + num(std::abs(g.phi01 - g.phi10)));

    IntegratorOptions ad;
    ad.rel_tol = 1e-10;
    ad.abs_tol = 1e-12;
    const ChannelState a = evolve_channels(p, ErrorSample{}, ad), b = evolve_channels(p, ErrorSample{}, rk4);
    const double dev = std::max({std::abs(a.a01() - b.a01()), std::abs(a.a10() - b.a10()), std::abs(a.a11() - b.a11())});
    c.expect(dev <= 1e-6, "adaptive vs fixed step " + num(dev));

    NoiseChannels ch;
    ch.detuning = DistributionSpec{DistKind::uniform, two_pi * 0.5, 0.5};
    ch.amplitude_bound = 0.02;
    MonteCarloOptions mo = cfg.monte_carlo_options();
    mo.samples = 20;
    const auto r1 = monte_carlo_fidelity(p, ch, cfg.physical(), mo);
    mo.eval.workers = 1;
    const auto r2 = monte_carlo_fidelity(p, ch, cfg.physical(), mo);
    c.expect(r1.mean_fidelity == r2.mean_fidelity && r1.stderr_fidelity == r2.stderr_fidelity, "seeded determinism");

    Rng rng(7);
    std::vector<double> sq;
    for (int i = 0; i < 100000; ++i) {
      const double x = sample_detuning_error({DistKind::uniform, 1.0, 0.5}, rng);
      sq.push_back(x * x);
    }
    const double var = mean_of(sq);
    c.expect(std::abs(var * 3 - 1) <= 0.02, "uniform variance " + num(var) + " vs 1/3");
    Rng rng2(8);
    sq.clear();
    for (int i = 0; i < 100000; ++i) {
      const double x = sample_detuning_error({DistKind::ushaped, 1.0, 0.5}, rng2);
      sq.push_back(x * x);
    }
    c.expect(std::abs(mean_of(sq) * 2 - 1) <= 0.02, "arcsine variance " + num(mean_of(sq)) + " vs 1/2");

    double asym = 0, area = 0;
    const auto ts = linspace(p.t_start(), p.t_end(), 20001);
    const double h = ts[1] - ts[0];
    for (std::size_t i = 0; i < ts.size(); ++i) {
      asym = std::max(asym, std::abs(omega_p(ts[i], p) + omega_p(-ts[i], p)) / p.omega_p_max);
      area += (i == 0 || i + 1 == ts.size() ? 0.5 : 1.0) * h * omega_p(ts[i], p);
    }
    c.expect(asym <= 1e-12, "probe antisymmetry " + num(asym));
    c.expect(std::abs(area) <= 1e-10, "probe area " + num(area));
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
