#pragma once

#include "noise.hpp"
#include "optimize.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rydcz {

// bad or unknown configuration input; maps to exit code 2
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frequencies are written as f = omega/2pi in MHz (kHz for dephasing);
// times in us. Conversion to rad/us happens in the accessors.
struct RunConfig {
  struct Pulse {
    std::string preset = "der";  // to, der, der_i_gauss, der_i_uniform, custom
    double t1 = 0.6664, t2 = 0.9260, width = 0.1666;  // used when preset == custom
    friend bool operator==(const Pulse&, const Pulse&) = default;
  } pulse;

  struct Constants {
    double omega_p_max_MHz = 150, omega_c_max_MHz = 150;
    double delta0_MHz = 2000, blockade_MHz = 2000;
    bool decays = false;
    double lifetime_r_us = 375, lifetime_p_us = 0.118;
    std::array<double, 3> branching_r{0.059, 0.055, 0.886};
    std::array<double, 3> branching_p{0.1354, 0.2504, 0.6142};
    double atom_mass_kg = 1.44316e-25;
    double lambda_p_um = 0.420, lambda_c_um = 1.013;
    std::array<double, 3> trap_kHz{147, 117, 35};
    double c6_GHz_um6 = 862.69, r0_um = 2.75;
    friend bool operator==(const Constants&, const Constants&) = default;
  } constants;

  struct Noise {
    std::string detuning_kind = "uniform";
    double detuning_MHz = 0;  // half-width; 0 = off
    double sigma_fraction = 0.5;
    double doppler_mK = 0;
    double amplitude_bound = 0;
    double position_mK = 0;
    double intermediate_MHz = 0;
    double dephasing_kHz = 0;
    double interaction_fraction = 0;
    friend bool operator==(const Noise&, const Noise&) = default;
  } noise;

  struct Sampling {
    std::uint64_t samples = 50;
    std::uint64_t seed = 1;
    bool truth_table = false;
    friend bool operator==(const Sampling&, const Sampling&) = default;
  } sampling;

  struct Integrator {
    std::string method = "rk4";  // rk4 or adaptive
    double step_us = 5e-5;
    double rel_tol = 1e-9, abs_tol = 1e-11;
    friend bool operator==(const Integrator&, const Integrator&) = default;
  } integrator;

  struct Scan {
    double from_MHz = -1, to_MHz = 1;
    int points = 21;
    friend bool operator==(const Scan&, const Scan&) = default;
  } scan;

  struct Optimizer {
    std::string cost = "der";
    double eps0_MHz = 0.8;
    int grid = 9;
    std::string weights = "gaussian";
    std::uint64_t population = 64;
    int generations = 60;
    int tournament = 3;
    double crossover_rate = 0.9, blend_alpha = 0.5;
    double mutation_rate = 0.15, mutation_sigma = 0.05;
    std::uint64_t elitism = 2;
    std::array<double, 3> lower{0.2, 0.5, 0.05};
    std::array<double, 3> upper{1.2, 1.5, 0.4};
    friend bool operator==(const Optimizer&, const Optimizer&) = default;
  } optimizer;

  std::string output = "out";
  unsigned workers = 0;  // 0 = all cores
  bool paper_scale = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  // ---- derived objects ----

  PulseParams pulse_params() const {
    PulseParams p;
    if (pulse.preset == "custom") {
      p = presets::with_triple(pulse.t1, pulse.t2, pulse.width);
    } else {
      auto q = presets::by_name(pulse.preset);
      if (!q) throw ConfigError("unknown pulse preset '" + pulse.preset + "'");
      p = *q;
    }
    apply_constants(p);
    return p;
  }

  void apply_constants(PulseParams& p) const {
    p.omega_p_max = two_pi * constants.omega_p_max_MHz;
    p.omega_c_max = two_pi * constants.omega_c_max_MHz;
    p.delta0 = two_pi * constants.delta0_MHz;
    p.blockade = two_pi * constants.blockade_MHz;
  }

  DecayConstants decay_constants() const {
    if (!constants.decays) return DecayConstants::none();
    DecayConstants d;
    d.gamma_r = 1.0 / constants.lifetime_r_us;
    d.gamma_p = 1.0 / constants.lifetime_p_us;
    d.b_r = constants.branching_r;
    d.b_p = constants.branching_p;
    return d;
  }

  PhysicalNoiseConfig physical() const {
    PhysicalNoiseConfig c;
    c.atom_mass = constants.atom_mass_kg;
    c.lambda_p = constants.lambda_p_um;
    c.lambda_c = constants.lambda_c_um;
    c.trap_freq = {two_pi * 1e3 * constants.trap_kHz[0], two_pi * 1e3 * constants.trap_kHz[1],
                   two_pi * 1e3 * constants.trap_kHz[2]};
    c.c6 = constants.c6_GHz_um6;
    c.r0 = constants.r0_um;
    return c;
  }

  NoiseChannels channels() const {
    NoiseChannels ch;
    if (noise.detuning_MHz > 0)
      ch.detuning = DistributionSpec{*dist_kind_from(noise.detuning_kind), two_pi * noise.detuning_MHz, noise.sigma_fraction};
    if (noise.doppler_mK > 0) ch.doppler_mK = noise.doppler_mK;
    ch.amplitude_bound = noise.amplitude_bound;
    if (noise.position_mK > 0) ch.position_mK = noise.position_mK;
    ch.intermediate_bound = two_pi * noise.intermediate_MHz;
    ch.dephasing_bound = two_pi * 1e-3 * noise.dephasing_kHz;
    ch.interaction_fraction = noise.interaction_fraction;
    return ch;
  }

  IntegratorOptions integrator_options() const {
    IntegratorOptions o;
    o.method = integrator.method == "adaptive" ? IntegratorOptions::Method::adaptive : IntegratorOptions::Method::fixed_rk4;
    o.fixed_step = integrator.step_us;
    o.rel_tol = integrator.rel_tol;
    o.abs_tol = integrator.abs_tol;
    return o;
  }

  unsigned resolved_workers() const { return workers == 0 ? default_workers() : workers; }

  EvalOptions eval_options() const {
    EvalOptions e;
    e.integrator = integrator_options();
    e.workers = resolved_workers();
    return e;
  }

  MonteCarloOptions monte_carlo_options() const {
    MonteCarloOptions m;
    m.samples = sampling.samples;
    m.seed = sampling.seed;
    m.decays = decay_constants();
    m.eval = eval_options();
    m.truth_table = sampling.truth_table;
    return m;
  }

  CostSpec cost_spec() const {
    CostSpec c;
    c.kind = *cost_kind_from(optimizer.cost);
    c.eps0 = two_pi * optimizer.eps0_MHz;
    c.grid = optimizer.grid;
    c.weights = *weight_profile_from(optimizer.weights);
    apply_constants(c.base);
    c.eval = eval_options();
    return c;
  }

  GAOptions ga_options() const {
    GAOptions g;
    g.population = optimizer.population;
    g.generations = optimizer.generations;
    g.tournament = optimizer.tournament;
    g.crossover_rate = optimizer.crossover_rate;
    g.blend_alpha = optimizer.blend_alpha;
    g.mutation_rate = optimizer.mutation_rate;
    g.mutation_sigma = optimizer.mutation_sigma;
    g.elitism = optimizer.elitism;
    g.seed = sampling.seed;
    g.bounds = {optimizer.lower, optimizer.upper};
    g.workers = resolved_workers();
    return g;
  }

  void validate() const {
    if (!dist_kind_from(noise.detuning_kind)) throw ConfigError("unknown distribution '" + noise.detuning_kind + "'");
    if (!cost_kind_from(optimizer.cost)) throw ConfigError("unknown cost '" + optimizer.cost + "'");
    if (!weight_profile_from(optimizer.weights)) throw ConfigError("unknown weight profile '" + optimizer.weights + "'");
    try {
      pulse_params().validate();
      decay_constants().validate();
      cost_spec().validate();
      ga_options().validate();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(ex.what());
    }
    if (integrator.method != "rk4" && integrator.method != "adaptive")
      throw ConfigError("integrator method must be rk4 or adaptive");
    if (!(integrator.step_us > 0 && integrator.rel_tol > 0 && integrator.abs_tol > 0))
      throw ConfigError("integrator step and tolerances must be positive");
    if (sampling.samples < 1) throw ConfigError("sampling.samples must be at least 1");
    if (scan.points < 1) throw ConfigError("scan.points must be at least 1");
    for (double x : {noise.detuning_MHz, noise.doppler_mK, noise.amplitude_bound, noise.position_mK,
                     noise.intermediate_MHz, noise.dephasing_kHz, noise.sigma_fraction})
      if (!(x >= 0) || !std::isfinite(x)) throw ConfigError("noise bounds must be finite and non-negative");
    if (noise.interaction_fraction < 0 || noise.interaction_fraction > 1)
      throw ConfigError("noise.interaction_fraction must lie in [0, 1]");
    if (output.empty()) throw ConfigError("output directory must be non-empty");
  }
};

namespace config_detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + where + "." + key + "'");
  }
}

}  // namespace config_detail

inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json j;
  j["pulse"] = {{"preset", c.pulse.preset}, {"t1", c.pulse.t1}, {"t2", c.pulse.t2}, {"width", c.pulse.width}};
  const auto& k = c.constants;
  j["constants"] = {{"omega_p_max_MHz", k.omega_p_max_MHz}, {"omega_c_max_MHz", k.omega_c_max_MHz},
                    {"delta0_MHz", k.delta0_MHz},           {"blockade_MHz", k.blockade_MHz},
                    {"decays", k.decays},                   {"lifetime_r_us", k.lifetime_r_us},
                    {"lifetime_p_us", k.lifetime_p_us},     {"branching_r", k.branching_r},
                    {"branching_p", k.branching_p},         {"atom_mass_kg", k.atom_mass_kg},
                    {"lambda_p_um", k.lambda_p_um},         {"lambda_c_um", k.lambda_c_um},
                    {"trap_kHz", k.trap_kHz},               {"c6_GHz_um6", k.c6_GHz_um6},
                    {"r0_um", k.r0_um}};
  const auto& n = c.noise;
  j["noise"] = {{"detuning_kind", n.detuning_kind},       {"detuning_MHz", n.detuning_MHz},
                {"sigma_fraction", n.sigma_fraction},     {"doppler_mK", n.doppler_mK},
                {"amplitude_bound", n.amplitude_bound},   {"position_mK", n.position_mK},
                {"intermediate_MHz", n.intermediate_MHz}, {"dephasing_kHz", n.dephasing_kHz},
                {"interaction_fraction", n.interaction_fraction}};
  j["sampling"] = {{"samples", c.sampling.samples}, {"seed", c.sampling.seed}, {"truth_table", c.sampling.truth_table}};
  j["integrator"] = {{"method", c.integrator.method},
                     {"step_us", c.integrator.step_us},
                     {"rel_tol", c.integrator.rel_tol},
                     {"abs_tol", c.integrator.abs_tol}};
  j["scan"] = {{"from_MHz", c.scan.from_MHz}, {"to_MHz", c.scan.to_MHz}, {"points", c.scan.points}};
  const auto& o = c.optimizer;
  j["optimizer"] = {{"cost", o.cost},
                    {"eps0_MHz", o.eps0_MHz},
                    {"grid", o.grid},
                    {"weights", o.weights},
                    {"population", o.population},
                    {"generations", o.generations},
                    {"tournament", o.tournament},
                    {"crossover_rate", o.crossover_rate},
                    {"blend_alpha", o.blend_alpha},
                    {"mutation_rate", o.mutation_rate},
                    {"mutation_sigma", o.mutation_sigma},
                    {"elitism", o.elitism},
                    {"lower", o.lower},
                    {"upper", o.upper}};
  j["output"] = c.output;
  j["workers"] = c.workers;
  j["paper_scale"] = c.paper_scale;
  return j;
}

// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  RunConfig c;
  check_keys(j, "", {"pulse", "constants", "noise", "sampling", "integrator", "scan", "optimizer", "output", "workers",
                     "paper_scale"});
  if (j.contains("pulse")) {
    const auto& s = j["pulse"];
    check_keys(s, "pulse", {"preset", "t1", "t2", "width"});
    read(s, "preset", c.pulse.preset, "pulse");
    read(s, "t1", c.pulse.t1, "pulse");
    read(s, "t2", c.pulse.t2, "pulse");
    read(s, "width", c.pulse.width, "pulse");
  }
  if (j.contains("constants")) {
    const auto& s = j["constants"];
    auto& k = c.constants;
    check_keys(s, "constants",
               {"omega_p_max_MHz", "omega_c_max_MHz", "delta0_MHz", "blockade_MHz", "decays", "lifetime_r_us",
                "lifetime_p_us", "branching_r", "branching_p", "atom_mass_kg", "lambda_p_um", "lambda_c_um",
                "trap_kHz", "c6_GHz_um6", "r0_um"});
    read(s, "omega_p_max_MHz", k.omega_p_max_MHz, "constants");
    read(s, "omega_c_max_MHz", k.omega_c_max_MHz, "constants");
    read(s, "delta0_MHz", k.delta0_MHz, "constants");
    read(s, "blockade_MHz", k.blockade_MHz, "constants");
    read(s, "decays", k.decays, "constants");
    read(s, "lifetime_r_us", k.lifetime_r_us, "constants");
    read(s, "lifetime_p_us", k.lifetime_p_us, "constants");
    read(s, "branching_r", k.branching_r, "constants");
    read(s, "branching_p", k.branching_p, "constants");
    read(s, "atom_mass_kg", k.atom_mass_kg, "constants");
    read(s, "lambda_p_um", k.lambda_p_um, "constants");
    read(s, "lambda_c_um", k.lambda_c_um, "constants");
    read(s, "trap_kHz", k.trap_kHz, "constants");
    read(s, "c6_GHz_um6", k.c6_GHz_um6, "constants");
    read(s, "r0_um", k.r0_um, "constants");
  }
  if (j.contains("noise")) {
    const auto& s = j["noise"];
    auto& n = c.noise;
    check_keys(s, "noise",
               {"detuning_kind", "detuning_MHz", "sigma_fraction", "doppler_mK", "amplitude_bound", "position_mK",
                "intermediate_MHz", "dephasing_kHz", "interaction_fraction"});
    read(s, "detuning_kind", n.detuning_kind, "noise");
    read(s, "detuning_MHz", n.detuning_MHz, "noise");
    read(s, "sigma_fraction", n.sigma_fraction, "noise");
    read(s, "doppler_mK", n.doppler_mK, "noise");
    read(s, "amplitude_bound", n.amplitude_bound, "noise");
    read(s, "position_mK", n.position_mK, "noise");
    read(s, "intermediate_MHz", n.intermediate_MHz, "noise");
    read(s, "dephasing_kHz", n.dephasing_kHz, "noise");
    read(s, "interaction_fraction", n.interaction_fraction, "noise");
  }
  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    check_keys(s, "sampling", {"samples", "seed", "truth_table"});
    read(s, "samples", c.sampling.samples, "sampling");
    read(s, "seed", c.sampling.seed, "sampling");
    read(s, "truth_table", c.sampling.truth_table, "sampling");
  }
  if (j.contains("integrator")) {
    const auto& s = j["integrator"];
    check_keys(s, "integrator", {"method", "step_us", "rel_tol", "abs_tol"});
    read(s, "method", c.integrator.method, "integrator");
    read(s, "step_us", c.integrator.step_us, "integrator");
    read(s, "rel_tol", c.integrator.rel_tol, "integrator");
    read(s, "abs_tol", c.integrator.abs_tol, "integrator");
  }
  if (j.contains("scan")) {
    const auto& s = j["scan"];
    check_keys(s, "scan", {"from_MHz", "to_MHz", "points"});
    read(s, "from_MHz", c.scan.from_MHz, "scan");
    read(s, "to_MHz", c.scan.to_MHz, "scan");
    read(s, "points", c.scan.points, "scan");
  }
  if (j.contains("optimizer")) {
    const auto& s = j["optimizer"];
    auto& o = c.optimizer;
    check_keys(s, "optimizer",
               {"cost", "eps0_MHz", "grid", "weights", "population", "generations", "tournament", "crossover_rate",
                "blend_alpha", "mutation_rate", "mutation_sigma", "elitism", "lower", "upper"});
    read(s, "cost", o.cost, "optimizer");
    read(s, "eps0_MHz", o.eps0_MHz, "optimizer");
    read(s, "grid", o.grid, "optimizer");
    read(s, "weights", o.weights, "optimizer");
    read(s, "population", o.population, "optimizer");
    read(s, "generations", o.generations, "optimizer");
    read(s, "tournament", o.tournament, "optimizer");
    read(s, "crossover_rate", o.crossover_rate, "optimizer");
    read(s, "blend_alpha", o.blend_alpha, "optimizer");
    read(s, "mutation_rate", o.mutation_rate, "optimizer");
    read(s, "mutation_sigma", o.mutation_sigma, "optimizer");
    read(s, "elitism", o.elitism, "optimizer");
    read(s, "lower", o.lower, "optimizer");
    read(s, "upper", o.upper, "optimizer");
  }
  read(j, "output", c.output, "");
  read(j, "workers", c.workers, "");
  read(j, "paper_scale", c.paper_scale, "");
  c.validate();
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

// I/O failures here surface as std::ios_base::failure
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rydcz
