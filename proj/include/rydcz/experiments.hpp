#pragma once

#include "config.hpp"
#include "csv.hpp"
#include "effective.hpp"
#include "manifest.hpp"
#include "noise.hpp"
#include "optimize.hpp"
#include "svg.hpp"

#include <json.hpp>

#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rydcz {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::string_view c) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (columns[k] == c) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[k]);
        return v;
      }
    throw std::out_of_range("no column '" + std::string(c) + "' in " + name);
  }

  void write_csv(std::ostream& os) const {
    CsvWriter w(os, columns);
    for (const auto& r : rows) {
      for (double x : r) w.cell(x);
      w.end_row();
    }
  }
};

struct FigureOutput {
  std::string id;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, PlotSpec>> plots;
  nlohmann::json details = nlohmann::json::object();

  const Table& table(std::string_view name) const {
    for (const auto& t : tables)
      if (t.name == name) return t;
    throw std::out_of_range("no table '" + std::string(name) + "'");
  }

  void write(OutputDir& out) const {
    for (const auto& t : tables) out.write(t.name + ".csv", [&](std::ostream& os) { t.write_csv(os); });
    for (const auto& [name, spec] : plots) out.write_text(name + ".svg", render_svg(spec));
  }
};

struct NamedPulse {
  std::string name;
  PulseParams params;
};

inline NamedPulse named_pulse(const RunConfig& cfg, const std::string& preset) {
  RunConfig c = cfg;
  c.pulse.preset = preset;
  return {preset, c.pulse_params()};
}

inline std::string pulse_dash(std::string_view name) {
  if (name == "to") return "6,4";
  if (name.substr(0, 5) == "der_i") return "8,3,2,3";
  return "";
}

inline std::string pulse_label(std::string_view name) {
  if (name == "to") return "TO";
  if (name == "der") return "DER";
  if (name.substr(0, 5) == "der_i") return "DER-i";
  return std::string(name);
}

// how a Monte-Carlo curve is reported
enum class Reading {
  infidelity,        // 1 - F
  excess_infidelity,  // F(0) - F(x), F(0) the same pulse without this noise
  fidelity           // F
};

inline std::string_view to_string(Reading r) {
  switch (r) {
    case Reading::infidelity: return "1 - F";
    case Reading::excess_infidelity: return "F(0) - F(x)";
    case Reading::fidelity: return "F";
  }
  return "?";
}

inline Table monte_carlo_curve(const std::string& name, const PulseParams& p, const std::vector<double>& xs,
                               const std::function<NoiseChannels(double)>& channels_at, const MonteCarloOptions& mo,
                               const PhysicalNoiseConfig& phys, Reading reading) {
  double f0 = 1;
  if (reading == Reading::excess_infidelity) {
    MonteCarloOptions one = mo;
    one.samples = 1;
    f0 = monte_carlo_fidelity(p, NoiseChannels{}, phys, one).mean_fidelity;
  }
  Table t{name, {"x_value", "mean_infidelity", "stderr", "n_samples", "n_failed", "mean_fidelity", "mean_fidelity_paper"}, {}};
  for (double x : xs) {
    const MonteCarloResult r = monte_carlo_fidelity(p, channels_at(x), phys, mo);
    double y = r.mean_fidelity;
    if (reading == Reading::infidelity) y = 1 - r.mean_fidelity;
    if (reading == Reading::excess_infidelity) y = f0 - r.mean_fidelity;
    t.rows.push_back({x, y, r.stderr_fidelity, static_cast<double>(r.n_samples), static_cast<double>(r.n_failed),
                      r.mean_fidelity, r.mean_fidelity_paper});
  }
  return t;
}

inline Series series_from(const Table& t, const std::string& label, std::string_view ycol, std::string dash = "",
                          std::string_view xcol = "x_value") {
  Series s;
  s.label = label;
  s.x = t.column(xcol);
  s.y = t.column(ycol);
  s.dash = std::move(dash);
  return s;
}

// sizes that differ between desk and paper scale
struct Scale {
  bool paper = false;
  std::size_t samples = 50;

  static Scale of(const RunConfig& c) { return {c.paper_scale, c.sampling.samples}; }
  int pick(int desk, int full) const { return paper ? full : desk; }
};

// ---- figure 1c: 1 - F versus eps_delta, decay-free ----

inline FigureOutput figure_1c(const RunConfig& cfg) {
  FigureOutput out{"1c", {}, {}, {}};
  const int n = cfg.paper_scale ? std::max(cfg.scan.points, 201) : cfg.scan.points;
  const auto mhz = linspace(cfg.scan.from_MHz, cfg.scan.to_MHz, n);
  std::vector<double> grid;
  for (double f : mhz) grid.push_back(two_pi * f);
  PlotSpec plot{"Gate infidelity versus two-photon detuning error", "eps_delta / 2pi (MHz)", "1 - F", false, true, {}};
  for (const char* name : {"der", "to"}) {
    const NamedPulse np = named_pulse(cfg, name);
    const auto scan = infidelity_scan(np.params, grid, DecayConstants::none(), cfg.eval_options());
    Table t{std::string("fig1c_") + name, {"eps_delta_MHz", "infidelity_phase", "infidelity_paper"}, {}};
    for (std::size_t i = 0; i < scan.size(); ++i) t.rows.push_back({mhz[i], scan[i].infidelity_phase, scan[i].infidelity_paper});
    plot.series.push_back(series_from(t, pulse_label(name), "infidelity_phase", pulse_dash(name), "eps_delta_MHz"));
    out.tables.push_back(std::move(t));
  }
  out.plots.push_back({"fig1c", plot});
  out.details["reading"] = "1 - F (phase-sensitive), decay-free";
  out.details["points"] = n;
  return out;
}

// ---- figure 2: three error distributions ----

inline FigureOutput figure_2(const RunConfig& cfg) {
  const Scale sc = Scale::of(cfg);
  FigureOutput out{"2", {}, {}, {}};
  const auto xs = linspace(0.0, 1.0, sc.pick(6, 11));
  MonteCarloOptions mo = cfg.monte_carlo_options();
  mo.decays = DecayConstants::none();
  const PhysicalNoiseConfig phys = cfg.physical();

  Table prof{"fig2_profiles", {"x_over_eps", "gaussian", "uniform", "ushaped"}, {}};
  for (double u : linspace(-0.995, 0.995, 199)) {
    std::vector<double> row{u};
    for (DistKind k : {DistKind::gaussian, DistKind::uniform, DistKind::ushaped})
      row.push_back(detuning_error_density({k, 1.0, cfg.noise.sigma_fraction}, u));
    prof.rows.push_back(row);
  }
  out.tables.push_back(prof);

  const char* panel[] = {"fig2a", "fig2b", "fig2c"};
  int ip = 0;
  for (DistKind k : {DistKind::gaussian, DistKind::uniform, DistKind::ushaped}) {
    PlotSpec plot{"Infidelity, " + std::string(to_string(k)) + " error distribution", "eps_delta / 2pi (MHz)",
                  "1 - F", false, true, {}};
    for (const char* name : {"der", "to"}) {
      const NamedPulse np = named_pulse(cfg, name);
      auto ch = [&](double x) {
        NoiseChannels c;
        if (x > 0) c.detuning = DistributionSpec{k, two_pi * x, cfg.noise.sigma_fraction};
        return c;
      };
      Table t = monte_carlo_curve(std::string("fig2_") + std::string(to_string(k)) + "_" + name, np.params, xs, ch, mo,
                                  phys, Reading::infidelity);
      plot.series.push_back(series_from(t, pulse_label(name), "mean_infidelity", pulse_dash(name)));
      out.tables.push_back(std::move(t));
    }
    out.plots.push_back({panel[ip++], plot});
  }
  out.details["reading"] = std::string(to_string(Reading::infidelity));
  out.details["sigma_fraction"] = cfg.noise.sigma_fraction;
  return out;
}

// ---- figure 3: Doppler dephasing ----

inline const std::vector<std::string>& doppler_pulses() {
  static const std::vector<std::string> v{"der", "to", "der_i_gauss"};
  return v;
}

inline Table doppler_curve(const RunConfig& cfg, const std::string& preset, const std::vector<double>& temps, bool decays,
                           const std::string& table_name) {
  MonteCarloOptions mo = cfg.monte_carlo_options();
  RunConfig c = cfg;
  c.constants.decays = decays;
  mo.decays = c.decay_constants();
  auto ch = [](double T) {
    NoiseChannels n;
    if (T > 0) n.doppler_mK = T;
    return n;
  };
  return monte_carlo_curve(table_name, named_pulse(cfg, preset).params, temps, ch, mo, cfg.physical(),
                           decays ? Reading::fidelity : Reading::excess_infidelity);
}

inline std::vector<double> fig3b_temperatures(const Scale& sc) {
  if (sc.paper) return linspace(0.0, 3.0, 13);
  return {0.0, 0.3, 1.0, 1.5, 2.0, 3.0};
}

inline FigureOutput figure_3(const RunConfig& cfg, bool panel_a = true, bool panel_b = true) {
  const Scale sc = Scale::of(cfg);
  FigureOutput out{"3", {}, {}, {}};
  if (panel_a) {
    const auto temps = linspace(0.0, 3.0, sc.pick(7, 13));
    PlotSpec a{"Doppler dephasing, no decay", "T (mK)", "F(0) - F(T)", false, true, {}};
    for (const auto& name : doppler_pulses()) {
      Table t = doppler_curve(cfg, name, temps, false, "fig3a_" + name);
      a.series.push_back(series_from(t, pulse_label(name), "mean_infidelity", pulse_dash(name)));
      out.tables.push_back(std::move(t));
    }
    out.plots.push_back({"fig3a", a});

    // inset: F versus a fixed eps_delta
    const auto mhz = linspace(-1.0, 1.0, sc.pick(21, 81));
    std::vector<double> grid;
    for (double f : mhz) grid.push_back(two_pi * f);
    PlotSpec inset{"Fidelity versus eps_delta", "eps_delta / 2pi (MHz)", "F", false, false, {}};
    for (const auto& name : doppler_pulses()) {
      const auto scan = infidelity_scan(named_pulse(cfg, name).params, grid, DecayConstants::none(), cfg.eval_options());
      Table t{"fig3a_inset_" + name, {"eps_delta_MHz", "fidelity"}, {}};
      for (std::size_t i = 0; i < scan.size(); ++i) t.rows.push_back({mhz[i], 1 - scan[i].infidelity_phase});
      inset.series.push_back(series_from(t, pulse_label(name), "fidelity", pulse_dash(name), "eps_delta_MHz"));
      out.tables.push_back(std::move(t));
    }
    out.plots.push_back({"fig3a_inset", inset});
  }
  if (panel_b) {
    const auto temps = fig3b_temperatures(sc);
    PlotSpec b{"Doppler dephasing with p and r decay", "T (mK)", "F", false, false, {}};
    for (const auto& name : doppler_pulses()) {
      Table t = doppler_curve(cfg, name, temps, true, "fig3b_" + name);
      b.series.push_back(series_from(t, pulse_label(name), "mean_infidelity", pulse_dash(name)));
      out.tables.push_back(std::move(t));
    }
    out.plots.push_back({"fig3b", b});
  }
  out.details["reading_a"] = std::string(to_string(Reading::excess_infidelity));
  out.details["reading_b"] = "F (column mean_infidelity holds the fidelity), decays on";
  return out;
}

// ---- figure 4: laser amplitude noise ----

inline const std::vector<std::string>& amplitude_pulses() {
  static const std::vector<std::string> v{"der", "to", "der_i_uniform"};
  return v;
}

inline Table amplitude_curve(const RunConfig& cfg, const std::string& preset, const std::vector<double>& eps) {
  MonteCarloOptions mo = cfg.monte_carlo_options();
  mo.decays = DecayConstants::none();
  auto ch = [](double e) {
    NoiseChannels n;
    n.amplitude_bound = e;
    return n;
  };
  return monte_carlo_curve("fig4_" + preset, named_pulse(cfg, preset).params, eps, ch, mo, cfg.physical(),
                           Reading::excess_infidelity);
}

inline FigureOutput figure_4(const RunConfig& cfg) {
  const Scale sc = Scale::of(cfg);
  FigureOutput out{"4", {}, {}, {}};
  const auto eps = linspace(0.0, 0.05, sc.pick(6, 11));
  PlotSpec plot{"Laser amplitude noise", "eps_Omega", "F(0) - F(eps_Omega)", false, true, {}};
  for (const auto& name : amplitude_pulses()) {
    Table t = amplitude_curve(cfg, name, eps);
    plot.series.push_back(series_from(t, pulse_label(name), "mean_infidelity", pulse_dash(name)));
    out.tables.push_back(std::move(t));
  }
  out.plots.push_back({"fig4", plot});

  const PulseParams der = named_pulse(cfg, "der").params;
  Table inset{"fig4_inset", {"eps_omega", "eps_delta_max_MHz"}, {}};
  for (double e : eps) inset.rows.push_back({e, ac_stark_bound(e, der) / two_pi});
  PlotSpec ip{"Maximal ac Stark detuning error (DER waveforms)", "eps_Omega", "eps_delta,max / 2pi (MHz)", false, false,
              {series_from(inset, "DER", "eps_delta_max_MHz", "", "eps_omega")}};
  out.tables.push_back(std::move(inset));
  out.plots.push_back({"fig4_inset", ip});
  out.details["reading"] = std::string(to_string(Reading::excess_infidelity));
  return out;
}

// ---- figure 5: full versus effective dynamics ----

struct PhaseSummary {
  double phi01 = 0, phi10 = 0, phi11 = 0;  // full dynamics, rad
  double phi01_eff = 0, phi11_eff = 0;
  double max_population_gap = 0;  // |full - effective| over the gate
};

inline FigureOutput figure_5(const RunConfig& cfg, PhaseSummary* summary = nullptr, const std::string& preset = "to") {
  const Scale sc = Scale::of(cfg);
  FigureOutput out{"5", {}, {}, {}};
  const PulseParams p = named_pulse(cfg, preset).params;
  const int n = sc.pick(401, 2001);
  const auto times = linspace(p.t_start(), p.t_end(), n);

  ChannelTrajectory traj;
  const auto states = evolve_channels(p, ErrorSample{}, {0.0}, cfg.integrator_options(), times, &traj);
  const ChannelState& fin = states[0];
  const auto e01 = evolve_effective(Channel::c01, p, 0.0, n, cfg.integrator_options());
  const auto e11 = evolve_effective(Channel::c11, p, 0.0, n, cfg.integrator_options());

  auto unwrap_phase = [](const std::vector<cplx>& a) {
    std::vector<double> ph;
    double off = 0, last = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double raw = -std::arg(a[i]);
      if (i) off -= two_pi * std::round((raw - last) / two_pi);
      last = raw;
      ph.push_back(raw + off);
    }
    return ph;
  };
  std::vector<cplx> a01, a11;
  for (const auto& s : traj.states) {
    a01.push_back(s.a01());
    a11.push_back(s.a11());
  }
  const auto ph01 = unwrap_phase(a01), ph11 = unwrap_phase(a11);

  Table t{"fig5",
          {"t_us", "pop_01", "phase_01", "pop_11", "phase_11", "pop_01_eff", "phase_01_eff", "pop_11_eff", "phase_11_eff"},
          {}};
  double gap = 0;
  const std::size_t m = std::min({traj.t.size(), e01.t.size(), e11.t.size()});
  for (std::size_t i = 0; i < m; ++i) {
    const double p01 = std::norm(a01[i]), p11 = std::norm(a11[i]);
    gap = std::max({gap, std::abs(p01 - e01.population[i]), std::abs(p11 - e11.population[i])});
    t.rows.push_back({traj.t[i], p01, ph01[i], p11, ph11[i], e01.population[i], e01.phase[i], e11.population[i], e11.phase[i]});
  }
  PhaseSummary s{phase_of(fin.a01()), phase_of(fin.a10()), phase_of(fin.a11()), e01.final_phase, e11.final_phase, gap};
  if (summary) *summary = s;

  auto over_pi = [](Series sr) {
    for (double& y : sr.y) y /= pi;
    return sr;
  };
  auto thinned = [](Series sr) {
    Series out = sr;
    out.x.clear();
    out.y.clear();
    const std::size_t stride = std::max<std::size_t>(1, sr.x.size() / 40);
    for (std::size_t i = 0; i < sr.x.size(); i += stride) {
      out.x.push_back(sr.x[i]);
      out.y.push_back(sr.y[i]);
    }
    out.markers = true;
    return out;
  };
  for (const std::string c : {"01", "11"}) {
    PlotSpec plot{"|" + c + "> population and phase", "t (us)", "population, phase / pi", false, false, {}};
    plot.series.push_back(series_from(t, "population", "pop_" + c, "", "t_us"));
    plot.series.push_back(over_pi(series_from(t, "phase / pi", "phase_" + c, "6,4", "t_us")));
    plot.series.push_back(thinned(series_from(t, "population (effective)", "pop_" + c + "_eff", "", "t_us")));
    plot.series.push_back(thinned(over_pi(series_from(t, "phase / pi (effective)", "phase_" + c + "_eff", "", "t_us"))));
    out.plots.push_back({c == "01" ? "fig5a" : "fig5b", plot});
  }
  out.tables.push_back(std::move(t));
  out.details["pulse"] = preset;
  out.details["phi01_pi"] = s.phi01 / pi;
  out.details["phi10_pi"] = s.phi10 / pi;
  out.details["phi11_pi"] = s.phi11 / pi;
  out.details["two_phi01_minus_phi11_pi"] = (2 * s.phi01 - s.phi11) / pi;
  out.details["phi01_effective_pi"] = s.phi01_eff / pi;
  out.details["phi11_effective_pi"] = s.phi11_eff / pi;
  out.details["max_population_gap"] = gap;
  out.details["phase_unit"] = "rad";
  return out;
}

// ---- figure 6: Pareto fronts ----

inline Table pareto_table(const std::string& name, const std::vector<ParetoPoint>& front) {
  Table t{name, {"J1", "J2", "t1", "t2", "omega"}, {}};
  for (const auto& q : front) t.rows.push_back({q.j1, q.j2, q.params[0], q.params[1], q.params[2]});
  return t;
}

inline FigureOutput figure_6(const RunConfig& cfg) {
  FigureOutput out{"6", {}, {}, {}};
  const char* panel[] = {"fig6a", "fig6b"};
  int ip = 0;
  for (CostKind k : {CostKind::der, CostKind::der_i}) {
    RunConfig c = cfg;
    c.optimizer.cost = std::string(to_string(k));
    const auto front = pareto_front(c.cost_spec(), c.ga_options());
    Table t = pareto_table(std::string(panel[ip]), front);
    PlotSpec plot{k == CostKind::der ? "Pareto front, J_der1 versus J_der2" : "Pareto front, J_der1-i versus J_der2-i",
                  "J1 = 1 - F(0)", k == CostKind::der ? "J2 = F_max - F_min" : "J2 = 1 - F_bar", false, false, {}};
    Series s = series_from(t, "Pareto points", "J2", "", "J1");
    s.markers = true;
    plot.series.push_back(s);
    out.plots.push_back({panel[ip], plot});
    out.tables.push_back(std::move(t));
    ++ip;
  }
  out.details["population"] = cfg.optimizer.population;
  out.details["generations"] = cfg.optimizer.generations;
  return out;
}

// ---- figure 7: passive error sources ----

inline std::vector<double> fig7_axis(char panel, const Scale& sc) {
  switch (panel) {
    case 'a': return linspace(0.0, 10.0, sc.pick(6, 11));   // eps_Delta / 2pi, MHz
    case 'b': return linspace(0.0, 2.0, sc.pick(5, 9));     // T, mK
    case 'c': return linspace(0.0, 40.0, sc.pick(5, 9));    // gamma_z / 2pi, kHz
    case 'd': return linspace(0.0, 0.1, sc.pick(6, 11));    // dB / B
  }
  throw std::invalid_argument("passive-error panels are a-d");
}

inline NoiseChannels fig7_channels(char panel, double x) {
  NoiseChannels n;
  switch (panel) {
    case 'a': n.intermediate_bound = two_pi * x; break;
    case 'b':
      if (x > 0) n.position_mK = x;
      break;
    case 'c': n.dephasing_bound = two_pi * 1e-3 * x; break;
    case 'd': n.interaction_fraction = x; break;
  }
  return n;
}

inline const std::vector<std::string>& passive_pulses() {
  static const std::vector<std::string> v{"der", "to", "der_i_gauss"};
  return v;
}

inline Table fig7_curve(const RunConfig& cfg, char panel, const std::string& preset, const std::vector<double>& xs) {
  MonteCarloOptions mo = cfg.monte_carlo_options();
  mo.decays = DecayConstants::none();
  return monte_carlo_curve(std::string("fig7") + panel + "_" + preset, named_pulse(cfg, preset).params, xs,
                           [&](double x) { return fig7_channels(panel, x); }, mo, cfg.physical(),
                           Reading::excess_infidelity);
}

inline FigureOutput figure_7(const RunConfig& cfg, const std::string& panels = "abcd") {
  const Scale sc = Scale::of(cfg);
  FigureOutput out{"7", {}, {}, {}};
  for (char panel : panels) {
    const auto xs = fig7_axis(panel, sc);
    static const char* xlabel[] = {"eps_Delta / 2pi (MHz)", "T (mK)", "gamma_z / 2pi (kHz)", "dB / B"};
    PlotSpec plot{std::string("Passive error source (") + panel + ")", xlabel[panel - 'a'], "F(0) - F(x)", false, true, {}};
    for (const auto& name : passive_pulses()) {
      Table t = fig7_curve(cfg, panel, name, xs);
      plot.series.push_back(series_from(t, pulse_label(name), "mean_infidelity", pulse_dash(name)));
      out.tables.push_back(std::move(t));
    }
    out.plots.push_back({std::string("fig7") + panel, plot});
  }
  const PhysicalNoiseConfig phys = cfg.physical();
  const Vec3 s = phys.position_sigma(2.0);
  out.details["reading"] = std::string(to_string(Reading::excess_infidelity));
  out.details["delta_r_nm_at_0.1"] = blockade_position_deviation_um(0.1, two_pi * cfg.constants.blockade_MHz, phys) * 1e3;
  out.details["position_sigma_um_at_2mK"] = {s.x, s.y, s.z};
  return out;
}

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> v{"1c", "2", "3", "3a", "3b", "4", "5", "6", "7", "7a", "7b", "7c", "7d"};
  return v;
}

inline FigureOutput reproduce_figure(const std::string& id, const RunConfig& cfg) {
  if (id == "1c") return figure_1c(cfg);
  if (id == "2") return figure_2(cfg);
  if (id == "3") return figure_3(cfg);
  if (id == "3a") return figure_3(cfg, true, false);
  if (id == "3b") return figure_3(cfg, false, true);
  if (id == "4") return figure_4(cfg);
  if (id == "5") return figure_5(cfg);
  if (id == "6") return figure_6(cfg);
  if (id == "7") return figure_7(cfg);
  if (id.size() == 2 && id[0] == '7' && id[1] >= 'a' && id[1] <= 'd') return figure_7(cfg, id.substr(1));
  throw ConfigError("unknown figure id '" + id + "'");
}

}  // namespace rydcz
