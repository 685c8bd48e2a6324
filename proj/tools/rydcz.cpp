// rydcz: command-line front end for the Rydberg CZ gate simulator
//
// exit codes: 0 ok, 1 unexpected error, 2 bad configuration or arguments,
//             3 integrator failure, 4 output/input file error

#include "rydcz/config.hpp"
#include "rydcz/experiments.hpp"
#include "rydcz/manifest.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace rydcz;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed, samples;
  std::optional<unsigned> workers;
  std::string out;
  bool paper_scale = false;
};

RunConfig build_config(const CommonFlags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  if (f.paper_scale) {
    c.paper_scale = true;
    c.sampling.samples = 500;
    std::cerr << "warning: --paper-scale uses 500 samples per point and dense grids; expect long runtimes\n";
  }
  if (!f.preset.empty()) c.pulse.preset = f.preset;
  if (f.seed) c.sampling.seed = *f.seed;
  if (f.samples) c.sampling.samples = *f.samples;
  if (f.workers) c.workers = *f.workers;
  if (!f.out.empty()) c.output = f.out;
  c.validate();
  return c;
}

void print_line(const std::string& k, double v) { std::cout << k << " = " << format_double(v) << '\n'; }

struct SimulateFlags {
  std::string input = "plus";
  double eps_delta_MHz = 0, eps_Delta_MHz = 0, eps_omega_p = 0, eps_omega_c = 0;
  int trajectory = 0;
};

ComplexVector input_state(const std::string& name) {
  if (name == "plus") return psi_plus();
  static const char* labels[] = {"00", "01", "10", "11"};
  for (int j = 0; j < 4; ++j)
    if (name == labels[j]) return basis_state(n_states, qubit_indices()[j]);
  throw ConfigError("--input must be one of 00, 01, 10, 11, plus");
}

void write_trajectory(OutputDir& out, const Trajectory& traj) {
  out.write("trajectory.csv", [&](std::ostream& os) {
    static const char lv[] = {'0', '1', 'p', 'r', 'd'};
    std::vector<std::string> head{"t_us"};
    for (int k = 0; k < n_states; ++k) head.push_back(std::string("P_") + lv[k / n_levels] + lv[k % n_levels]);
    for (const char* c : {"abs_rho_00_01", "abs_rho_00_10", "abs_rho_00_11", "trace"}) head.push_back(c);
    CsvWriter w(os, head);
    const auto& q = qubit_indices();
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
      const DensityMatrix& r = traj.rho[i];
      w.cell(traj.t[i]);
      for (int k = 0; k < n_states; ++k) w.cell(r.population(k));
      for (int j = 1; j < 4; ++j) w.cell(std::abs(r(q[0], q[j])));
      w.cell(r.trace());
      w.end_row();
    }
  });

}

int cmd_simulate(const RunConfig& cfg, const SimulateFlags& s) {
  const PulseParams p = cfg.pulse_params();
  ErrorSample e;
  e.eps_delta = two_pi * s.eps_delta_MHz;
  e.eps_Delta = two_pi * s.eps_Delta_MHz;
  e.eps_omega_p = s.eps_omega_p;
  e.eps_omega_c = s.eps_omega_c;
  const ComplexVector psi0 = input_state(s.input);
  const DecayConstants d = cfg.decay_constants();
  const EvalOptions eo = cfg.eval_options();

  const GateResult g = simulate_gate(p, e, d, eo);
  OutputDir out(cfg.output);
  out.write("gate_result.csv", [&](std::ostream& os) {
    CsvWriter w(os, {"fidelity_phase", "fidelity_paper", "fidelity_paper_sqrt", "F00", "F01", "F10", "F11", "phi01_pi",
                     "phi10_pi", "phi11_pi", "density_path"});
    w.row(g.fidelity_phase, g.fidelity_paper, g.fidelity_paper_sqrt, g.truth[0], g.truth[1], g.truth[2], g.truth[3],
          g.phi01 / pi, g.phi10 / pi, g.phi11 / pi, g.density_path ? 1 : 0);
  });

  double ret = 0;
  if (s.trajectory > 0 || s.input == "plus") {
    const auto times = linspace(p.t_start(), p.t_end(), std::max(s.trajectory, 2));
    Trajectory traj;
    const DensityMatrix rho = evolve(DensityMatrix::pure(psi0), p, e, d, eo.integrator,
                                     s.trajectory > 0 ? times : std::vector<double>{}, s.trajectory > 0 ? &traj : nullptr);
    ret = (psi0.adjoint() * rho.matrix() * psi0)(0).real();
    if (s.trajectory > 0) write_trajectory(out, traj);
  } else {
    const int j = std::stoi(s.input, nullptr, 2);
    ret = g.outputs[j].population(qubit_indices()[j]);
  }
  nlohmann::json det{{"input", s.input},
                     {"eps_delta_MHz", s.eps_delta_MHz},
                     {"eps_Delta_MHz", s.eps_Delta_MHz},
                     {"eps_omega_p", s.eps_omega_p},
                     {"eps_omega_c", s.eps_omega_c}};
  out.write_manifest(cfg, "simulate", det);

  std::cout << "pulse " << cfg.pulse.preset << " (t1, t2, omega) = (" << format_double(p.t1) << ", " << format_double(p.t2)
            << ", " << format_double(p.width) << ") us, Tg = " << format_double(p.gate_duration()) << " us\n";
  print_line("fidelity_phase", g.fidelity_phase);
  print_line("fidelity_paper", g.fidelity_paper);
  print_line("phi01/pi", g.phi01 / pi);
  print_line("phi11/pi", g.phi11 / pi);
  print_line("return_population(" + s.input + ")", ret);
  return 0;
}

int cmd_scan(const RunConfig& cfg) {
  const PulseParams p = cfg.pulse_params();
  const auto mhz = linspace(cfg.scan.from_MHz, cfg.scan.to_MHz, cfg.scan.points);
  std::vector<double> grid;
  for (double f : mhz) grid.push_back(two_pi * f);
  const auto scan = infidelity_scan(p, grid, cfg.decay_constants(), cfg.eval_options());
  Table t{"scan", {"eps_delta_MHz", "infidelity_phase", "infidelity_paper"}, {}};
  for (std::size_t i = 0; i < scan.size(); ++i) t.rows.push_back({mhz[i], scan[i].infidelity_phase, scan[i].infidelity_paper});
  OutputDir out(cfg.output);
  FigureOutput f{"scan", {t}, {}, {}};
  f.plots.push_back({"scan", PlotSpec{"Infidelity scan, " + cfg.pulse.preset, "eps_delta / 2pi (MHz)", "1 - F", false, true,
                                      {series_from(t, pulse_label(cfg.pulse.preset), "infidelity_phase", "", "eps_delta_MHz")}}});
  f.write(out);
  out.write_manifest(cfg, "scan");
  for (const auto& r : t.rows) std::cout << format_double(r[0]) << " MHz: 1 - F = " << format_double(r[1]) << '\n';
  return 0;
}

int cmd_montecarlo(const RunConfig& cfg) {
  const PulseParams p = cfg.pulse_params();
  const MonteCarloResult r = monte_carlo_fidelity(p, cfg.channels(), cfg.physical(), cfg.monte_carlo_options());
  OutputDir out(cfg.output);
  out.write("montecarlo.csv", [&](std::ostream& os) {
    CsvWriter w(os, {"x_value", "mean_infidelity", "stderr", "n_samples", "n_failed", "mean_fidelity", "mean_fidelity_paper"});
    w.row(0.0, 1 - r.mean_fidelity, r.stderr_fidelity, r.n_samples, r.n_failed, r.mean_fidelity, r.mean_fidelity_paper);
  });
  out.write("samples.csv", [&](std::ostream& os) {
    CsvWriter w(os, {"index", "eps_delta_MHz", "eps_Delta_MHz", "eps_omega_p", "eps_omega_c", "gamma1", "gamma2", "dB_MHz",
                     "fidelity_phase", "fidelity_paper", "ok"});
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& s = r.samples[i];
      w.row(i, s.errors.eps_delta / two_pi, s.errors.eps_Delta / two_pi, s.errors.eps_omega_p, s.errors.eps_omega_c,
            s.errors.gamma1, s.errors.gamma2, s.errors.dB / two_pi, s.fidelity_phase, s.fidelity_paper, s.ok ? 1 : 0);
    }
  });
  out.write_manifest(cfg, "montecarlo", {{"reading", "1 - F"}});
  print_line("mean_fidelity", r.mean_fidelity);
  print_line("stderr", r.stderr_fidelity);
  std::cout << "samples = " << r.n_samples << ", failed = " << r.n_failed << '\n';
  if (r.n_failed) std::cerr << "warning: " << r.n_failed << " samples failed and were excluded\n";
  return 0;
}

int cmd_optimize(const RunConfig& cfg) {
  const CostSpec spec = cfg.cost_spec();
  const GAResult r = ga_minimize(spec, cfg.ga_options());
  OutputDir out(cfg.output);
  Table t{"optimization_log", {"generation", "best_cost", "mean_cost", "best_t1", "best_t2", "best_omega"}, {}};
  for (const auto& h : r.history)
    t.rows.push_back({static_cast<double>(h.generation), h.best_cost, h.mean_cost, h.best[0], h.best[1], h.best[2]});
  const CostBreakdown b = eval_cost(spec, with_genome(spec.base, r.best));
  FigureOutput f{"optimize", {t}, {}, {}};
  f.plots.push_back({"optimization_log", PlotSpec{"GA convergence (" + cfg.optimizer.cost + ")", "generation", "best cost",
                                                  false, true, {series_from(t, "best", "best_cost", "", "generation")}}});
  f.write(out);
  out.write_manifest(cfg, "optimize",
                     {{"best", r.best}, {"best_cost", r.best_cost}, {"F0", b.f0}, {"Fmin", b.fmin}, {"Fmax", b.fmax},
                      {"Fbar", b.fbar}, {"evaluations", r.evaluations}});
  std::cout << "best (t1, t2, omega) = (" << format_double(r.best[0]) << ", " << format_double(r.best[1]) << ", "
            << format_double(r.best[2]) << ") us\n";
  print_line("best_cost", r.best_cost);
  print_line("F(0)", b.f0);
  return 0;
}

int cmd_pareto(const RunConfig& cfg) {
  RunConfig c = cfg;
  if (c.optimizer.cost == "to") {
    std::cerr << "note: Pareto search uses the der objective pair\n";
    c.optimizer.cost = "der";
  }
  const auto front = pareto_front(c.cost_spec(), c.ga_options());
  OutputDir out(c.output);
  Table t = pareto_table("pareto", front);
  Series s = series_from(t, "Pareto points", "J2", "", "J1");
  s.markers = true;
  FigureOutput f{"pareto", {t}, {{"pareto", PlotSpec{"Pareto front (" + c.optimizer.cost + ")", "J1", "J2", false, false, {s}}}}, {}};
  f.write(out);
  out.write_manifest(c, "pareto", {{"points", front.size()}});
  for (const auto& q : front)
    std::cout << format_double(q.j1) << ", " << format_double(q.j2) << "  (" << format_double(q.params[0]) << ", "
              << format_double(q.params[1]) << ", " << format_double(q.params[2]) << ")\n";
  return 0;
}

int cmd_reproduce(const RunConfig& cfg, const std::string& id) {
  const FigureOutput f = reproduce_figure(id, cfg);
  OutputDir out(cfg.output);
  f.write(out);
  nlohmann::json det = f.details;
  det["figure"] = id;
  out.write_manifest(cfg, "reproduce " + id, det);
  std::cout << "figure " << id << ": wrote " << out.files().size() << " files to " << out.path().string() << '\n';
  std::cout << f.details.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg-blockade CZ gate simulator and pulse optimizer"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration");
  app.add_option("--preset", flags.preset, "pulse preset: to, der, der_i_gauss, der_i_uniform, custom");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--samples", flags.samples, "Monte-Carlo samples per point");
  app.add_option("--workers", flags.workers, "worker threads (default: all cores)");
  app.add_option("--out", flags.out, "output directory");
  app.add_flag("--paper-scale", flags.paper_scale, "full paper sample counts and grids");

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "evolve one gate and report fidelities and phases");
  simulate->add_option("--input", sim.input, "input state for the trajectory: 00, 01, 10, 11, plus");
  simulate->add_option("--eps-delta", sim.eps_delta_MHz, "two-photon detuning error / 2pi (MHz)");
  simulate->add_option("--eps-Delta", sim.eps_Delta_MHz, "intermediate detuning error / 2pi (MHz)");
  simulate->add_option("--eps-omega-p", sim.eps_omega_p, "relative probe amplitude error");
  simulate->add_option("--eps-omega-c", sim.eps_omega_c, "relative coupling amplitude error");
  simulate->add_option("--trajectory", sim.trajectory, "write a trajectory with this many time points");
  auto* scan = app.add_subcommand("scan", "infidelity versus eps_delta");
  auto* mc = app.add_subcommand("montecarlo", "average fidelity over the configured noise");
  auto* opt = app.add_subcommand("optimize", "genetic search of (t1, t2, omega)");
  auto* par = app.add_subcommand("pareto", "two-objective search");
  std::string figure;
  auto* rep = app.add_subcommand("reproduce", "regenerate a figure's data and plot");
  rep->add_option("figure", figure, "figure id: 1c, 2, 3, 4, 5, 6, 7 (or 3a, 3b, 7a-7d)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = build_config(flags);
    if (*simulate) return cmd_simulate(cfg, sim);
    if (*scan) return cmd_scan(cfg);
    if (*mc) return cmd_montecarlo(cfg);
    if (*opt) return cmd_optimize(cfg);
    if (*par) return cmd_pareto(cfg);
    if (*rep) return cmd_reproduce(cfg, figure);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IntegrationError& e) {
    std::cerr << "integrator failure: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
