#pragma once

#include "metrics.hpp"
#include "noise.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rydcz {

enum class CostKind { to, der, der_i };
enum class WeightProfile { gaussian, uniform };

inline std::string_view to_string(CostKind k) {
  switch (k) {
    case CostKind::to: return "to";
    case CostKind::der: return "der";
    case CostKind::der_i: return "der_i";
  }
  return "?";
}

inline std::optional<CostKind> cost_kind_from(std::string_view s) {
  if (s == "to") return CostKind::to;
  if (s == "der") return CostKind::der;
  if (s == "der_i") return CostKind::der_i;
  return std::nullopt;
}

inline std::string_view to_string(WeightProfile w) { return w == WeightProfile::gaussian ? "gaussian" : "uniform"; }

inline std::optional<WeightProfile> weight_profile_from(std::string_view s) {
  if (s == "gaussian") return WeightProfile::gaussian;
  if (s == "uniform") return WeightProfile::uniform;
  return std::nullopt;
}

inline constexpr double cost_sentinel = 1e3;

struct CostSpec {
  CostKind kind = CostKind::der;
  double eps0 = two_pi * 0.8;  // rad/us
  int grid = 9;
  WeightProfile weights = WeightProfile::gaussian;
  PulseParams base{};  // amplitudes, detuning and blockade; (t1, t2, width) come from the genome
  EvalOptions eval{};

  void validate() const {
    if (grid < 1 || grid % 2 == 0) throw std::invalid_argument("cost grid size must be odd and positive");
    if (!(eps0 >= 0)) throw std::invalid_argument("cost error range must be non-negative");
  }

  std::vector<double> grid_points() const {
    if (kind == CostKind::to) return {0.0};
    return linspace(-eps0, eps0, grid);
  }

  std::vector<double> weight_values() const {
    const auto g = grid_points();
    std::vector<double> w(g.size(), 1.0);
    if (weights == WeightProfile::gaussian && eps0 > 0) {
      const double sigma = eps0 / 2;
      for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::exp(-0.5 * g[i] * g[i] / (sigma * sigma));
    }
    const double s = pairwise_sum(w);
    for (double& x : w) x /= s;
    return w;
  }
};

struct CostBreakdown {
  double cost = cost_sentinel;
  bool ok = false;
  double f0 = 0, fmin = 0, fmax = 0, fbar = 0;
  std::string failure;

  double flatness() const { return fmax - fmin; }
};

using Genome = std::array<double, 3>;  // t1, t2, width

inline PulseParams with_genome(PulseParams p, const Genome& g) {
  p.t1 = g[0];
  p.t2 = g[1];
  p.width = g[2];
  return p;
}

inline Genome genome_of(const PulseParams& p) { return {p.t1, p.t2, p.width}; }

inline CostBreakdown eval_cost(const CostSpec& spec, const PulseParams& p) {
  spec.validate();
  CostBreakdown c;
  try {
    const auto g = spec.grid_points();
    const auto states = evolve_channels(p, ErrorSample{}, g, spec.eval.integrator, {}, nullptr, spec.eval.beams);
    std::vector<double> f(states.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = channel_fidelity_phase(states[i]);
    const std::size_t mid = g.size() / 2;
    c.f0 = f[mid];
    c.fmin = *std::min_element(f.begin(), f.end());
    c.fmax = *std::max_element(f.begin(), f.end());
    const auto w = spec.weight_values();
    std::vector<double> wf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) wf[i] = w[i] * f[i];
    c.fbar = pairwise_sum(wf);
    const double a = 1 - c.f0;
    switch (spec.kind) {
      case CostKind::to: c.cost = a; break;
      case CostKind::der: c.cost = a * a + c.flatness() * c.flatness(); break;
      case CostKind::der_i: c.cost = a * a + (1 - c.fbar) * (1 - c.fbar); break;
    }
    c.ok = std::isfinite(c.cost);
    if (!c.ok) c.cost = cost_sentinel;
  } catch (const std::exception& ex) {
    c = CostBreakdown{};
    c.failure = ex.what();
  }
  return c;
}

// objective pair: (1 - F(0), F_max - F_min) or (1 - F(0), 1 - F_bar)
inline std::array<double, 2> objectives(const CostSpec& spec, const CostBreakdown& c) {
  if (!c.ok) return {cost_sentinel, cost_sentinel};
  return {1 - c.f0, spec.kind == CostKind::der_i ? 1 - c.fbar : c.flatness()};
}

struct Bounds {
  Genome lo{0.2, 0.5, 0.05};
  Genome hi{1.2, 1.5, 0.4};
};

inline bool feasible(const Genome& g, const Bounds& b) {
  for (int i = 0; i < 3; ++i)
    if (g[i] < b.lo[i] || g[i] > b.hi[i]) return false;
  return g[0] < g[1];
}

struct GAOptions {
  std::size_t population = 64;
  int generations = 60;
  int tournament = 3;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;
  double mutation_rate = 0.15;
  double mutation_sigma = 0.05;  // fraction of each bound span
  std::size_t elitism = 2;
  std::uint64_t seed = 1;
  Bounds bounds{};
  unsigned workers = 1;

  void validate() const {
    if (population < 4) throw std::invalid_argument("GA population must be at least 4");
    if (generations < 0 || tournament < 1) throw std::invalid_argument("bad GA generation/tournament settings");
    if (elitism >= population) throw std::invalid_argument("elitism must be smaller than the population");
    for (int i = 0; i < 3; ++i)
      if (!(std::isfinite(bounds.lo[i]) && std::isfinite(bounds.hi[i]) && bounds.lo[i] < bounds.hi[i]))
        throw std::invalid_argument("GA bounds must be finite and ordered");
    if (!(bounds.lo[0] < bounds.hi[1])) throw std::invalid_argument("bounds leave no room for t1 < t2");
  }
};

struct GenerationStats {
  int generation = 0;
  double best_cost = 0;
  double mean_cost = 0;
  Genome best{};
};

struct GAResult {
  Genome best{};
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<GenerationStats> history;
  std::size_t evaluations = 0;
};

namespace detail {

inline Genome random_genome(const Bounds& b, Rng& rng) {
  for (;;) {
    Genome g;
    for (int i = 0; i < 3; ++i) g[i] = rng.uniform(b.lo[i], b.hi[i]);
    if (feasible(g, b)) return g;
  }
}

inline Genome clamp_to(Genome g, const Bounds& b) {
  for (int i = 0; i < 3; ++i) g[i] = std::clamp(g[i], b.lo[i], b.hi[i]);
  return g;
}

// BLX-alpha crossover of a and b followed by Gaussian mutation; retried until t1 < t2
inline Genome make_child(const Genome& a, const Genome& b, const GAOptions& o, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Genome c = a;
    if (rng.uniform() < o.crossover_rate) {
      for (int i = 0; i < 3; ++i) {
        const double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
        const double ext = o.blend_alpha * (hi - lo);
        c[i] = rng.uniform(lo - ext, hi + ext);
      }
    }
    for (int i = 0; i < 3; ++i)
      if (rng.uniform() < o.mutation_rate) c[i] += o.mutation_sigma * (o.bounds.hi[i] - o.bounds.lo[i]) * rng.normal();
    c = clamp_to(c, o.bounds);
    if (feasible(c, o.bounds)) return c;
  }
  return a;
}

template <class Obj>
std::vector<double> evaluate_all(const std::vector<Genome>& pop, Obj& f, unsigned workers) {
  auto r = parallel_map(pop.size(), workers, [&](std::size_t i) { return static_cast<double>(f(pop[i])); });
  std::vector<double> c(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    c[i] = r.errors[i] ? cost_sentinel : *r.values[i];
    if (!std::isfinite(c[i])) c[i] = cost_sentinel;
  }
  return c;
}

}  // namespace detail

// Minimizes f over the bounded genome. f must be a pure function; evaluation
// runs on opts.workers threads while the random stream is consumed serially.
template <class Obj>
GAResult ga_minimize_fn(Obj&& f, const GAOptions& o) {
  o.validate();
  Rng rng(o.seed);
  std::vector<Genome> pop(o.population);
  for (auto& g : pop) g = detail::random_genome(o.bounds, rng);
  std::vector<double> cost = detail::evaluate_all(pop, f, o.workers);
  GAResult res;
  res.evaluations = pop.size();

  auto record = [&](int gen) {
    const std::size_t ib = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    if (cost[ib] < res.best_cost) {
      res.best_cost = cost[ib];
      res.best = pop[ib];
    }
    res.history.push_back({gen, cost[ib], mean_of(cost), pop[ib]});
  };
  record(0);

  for (int gen = 1; gen <= o.generations; ++gen) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });

    auto tournament = [&]() {
      std::size_t best = static_cast<std::size_t>(rng.uniform() * pop.size());
      for (int k = 1; k < o.tournament; ++k) {
        const std::size_t c = static_cast<std::size_t>(rng.uniform() * pop.size());
        if (cost[c] < cost[best]) best = c;
      }
      return best;
    };

    std::vector<Genome> next;
    std::vector<double> next_cost;
    for (std::size_t e = 0; e < o.elitism; ++e) {
      next.push_back(pop[order[e]]);
      next_cost.push_back(cost[order[e]]);
    }
    std::vector<Genome> children;
    while (next.size() + children.size() < pop.size()) {
      const std::size_t a = tournament(), b = tournament();
      children.push_back(detail::make_child(pop[a], pop[b], o, rng));
    }
    const auto cc = detail::evaluate_all(children, f, o.workers);
    res.evaluations += children.size();
    next.insert(next.end(), children.begin(), children.end());
    next_cost.insert(next_cost.end(), cc.begin(), cc.end());
    pop.swap(next);
    cost.swap(next_cost);
    record(gen);
  }
  return res;
}

inline GAResult ga_minimize(const CostSpec& spec, const GAOptions& o) {
  spec.validate();
  auto f = [&](const Genome& g) {
    return eval_cost(spec, with_genome(spec.base, g)).cost;
  };
  return ga_minimize_fn(f, o);
}

// ---- multi-objective search ----

struct ParetoPoint {
  double j1 = 0, j2 = 0;
  Genome params{};
};

inline bool dominates(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

// indices of the non-dominated members; exact duplicates keep their first copy
inline std::vector<std::size_t> non_dominated(const std::vector<std::array<double, 2>>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dom = false;
    for (std::size_t j = 0; j < pts.size() && !dom; ++j) {
      if (j == i) continue;
      if (dominates(pts[j], pts[i]) || (j < i && pts[j] == pts[i])) dom = true;
    }
    if (!dom) out.push_back(i);
  }
  return out;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> sort_fronts(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<int> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dominates(pts[i], pts[j])) dominated_by[i].push_back(j);
      else if (dominates(pts[j], pts[i])) ++count[i];
    }
    if (count[i] == 0) fronts[0].push_back(i);
  }
  for (std::size_t k = 0; !fronts[k].empty(); ++k) {
    std::vector<std::size_t> nextf;
    for (std::size_t i : fronts[k])
      for (std::size_t j : dominated_by[i])
        if (--count[j] == 0) nextf.push_back(j);
    fronts.push_back(std::move(nextf));
  }
  fronts.pop_back();
  return fronts;
}

inline std::vector<double> crowding(const std::vector<std::array<double, 2>>& pts, const std::vector<std::size_t>& front) {
  std::vector<double> d(front.size(), 0.0);
  if (front.size() <= 2) {
    std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
    return d;
  }
  for (int m = 0; m < 2; ++m) {
    std::vector<std::size_t> idx(front.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pts[front[a]][m] < pts[front[b]][m]; });
    const double span = pts[front[idx.back()]][m] - pts[front[idx.front()]][m];
    d[idx.front()] = d[idx.back()] = std::numeric_limits<double>::infinity();
    if (span <= 0) continue;
    for (std::size_t k = 1; k + 1 < idx.size(); ++k)
      d[idx[k]] += (pts[front[idx[k + 1]]][m] - pts[front[idx[k - 1]]][m]) / span;
  }
  return d;
}

}  // namespace detail

// NSGA-II over the genome; the returned front is taken over every genome
// evaluated during the run, sorted by j1 ascending
template <class Obj>
std::vector<ParetoPoint> nsga2_fn(Obj&& f, const GAOptions& o) {
  o.validate();
  Rng rng(o.seed);
  std::vector<Genome> pop(o.population);
  for (auto& g : pop) g = detail::random_genome(o.bounds, rng);

  std::vector<Genome> archive;
  std::vector<std::array<double, 2>> archive_obj;
  auto evaluate = [&](const std::vector<Genome>& gs) {
    auto r = parallel_map(gs.size(), o.workers, [&](std::size_t i) { return f(gs[i]); });
    std::vector<std::array<double, 2>> out(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
      out[i] = r.errors[i] ? std::array<double, 2>{cost_sentinel, cost_sentinel} : *r.values[i];
      for (double& x : out[i])
        if (!std::isfinite(x)) x = cost_sentinel;
      archive.push_back(gs[i]);
      archive_obj.push_back(out[i]);
    }
    return out;
  };
  std::vector<std::array<double, 2>> obj = evaluate(pop);

  std::vector<int> rank(pop.size());
  std::vector<double> crowd(pop.size());
  auto assign = [&](const std::vector<std::array<double, 2>>& pts) {
    const auto fronts = detail::sort_fronts(pts);
    rank.assign(pts.size(), 0);
    crowd.assign(pts.size(), 0);
    for (std::size_t k = 0; k < fronts.size(); ++k) {
      const auto d = detail::crowding(pts, fronts[k]);
      for (std::size_t i = 0; i < fronts[k].size(); ++i) {
        rank[fronts[k][i]] = static_cast<int>(k);
        crowd[fronts[k][i]] = d[i];
      }
    }
    return fronts;
  };
  assign(obj);

  for (int gen = 1; gen <= o.generations; ++gen) {
    auto better = [&](std::size_t a, std::size_t b) {
      return rank[a] < rank[b] || (rank[a] == rank[b] && crowd[a] > crowd[b]);
    };
    auto tournament = [&]() {
      std::size_t best = static_cast<std::size_t>(rng.uniform() * pop.size());
      for (int k = 1; k < std::max(2, o.tournament); ++k) {
        const std::size_t c = static_cast<std::size_t>(rng.uniform() * pop.size());
        if (better(c, best)) best = c;
      }
      return best;
    };
    std::vector<Genome> children;
    while (children.size() < pop.size()) {
      const std::size_t a = tournament(), b = tournament();
      children.push_back(detail::make_child(pop[a], pop[b], o, rng));
    }
    const auto cobj = evaluate(children);

    std::vector<Genome> merged = pop;
    merged.insert(merged.end(), children.begin(), children.end());
    std::vector<std::array<double, 2>> mobj = obj;
    mobj.insert(mobj.end(), cobj.begin(), cobj.end());
    const auto fronts = assign(mobj);

    std::vector<std::size_t> keep;
    for (const auto& fr : fronts) {
      if (keep.size() + fr.size() <= pop.size()) {
        keep.insert(keep.end(), fr.begin(), fr.end());
        continue;
      }
      std::vector<std::size_t> rest = fr;
      std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
      rest.resize(pop.size() - keep.size());
      keep.insert(keep.end(), rest.begin(), rest.end());
      break;
    }
    std::vector<Genome> np;
    std::vector<std::array<double, 2>> nobj;
    for (std::size_t i : keep) {
      np.push_back(merged[i]);
      nobj.push_back(mobj[i]);
    }
    pop.swap(np);
    obj.swap(nobj);
    assign(obj);
  }

  std::vector<ParetoPoint> front;
  for (std::size_t i : non_dominated(archive_obj)) {
    if (archive_obj[i][0] >= cost_sentinel) continue;
    front.push_back({archive_obj[i][0], archive_obj[i][1], archive[i]});
  }
  std::stable_sort(front.begin(), front.end(), [](const ParetoPoint& a, const ParetoPoint& b) { return a.j1 < b.j1; });
  return front;
}

inline std::vector<ParetoPoint> pareto_front(const CostSpec& spec, const GAOptions& o) {
  spec.validate();
  if (spec.kind == CostKind::to) throw std::invalid_argument("the Pareto search needs the der or der_i objective pair");
  auto f = [&](const Genome& g) { return objectives(spec, eval_cost(spec, with_genome(spec.base, g))); };
  return nsga2_fn(f, o);
}

}  // namespace rydcz
