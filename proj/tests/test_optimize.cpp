#include <rydcz/optimize.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <mutex>

using namespace rydcz;

namespace {

CostSpec spec_of(CostKind k) {
  CostSpec s;
  s.kind = k;
  s.eval.integrator = test::rk4();
  return s;
}

double sphere(const Genome& g) {
  const Genome c{0.5, 1.0, 0.2};
  double s = 0;
  for (int i = 0; i < 3; ++i) s += (g[i] - c[i]) * (g[i] - c[i]);
  return s;
}

// two competing quadratics in t1: minima at 0.4 and 1.0
std::array<double, 2> bowl_pair(const Genome& g) {
  return {std::pow(g[0] - 0.4, 2) + std::pow(g[2] - 0.1, 2), std::pow(g[0] - 1.0, 2) + std::pow(g[2] - 0.1, 2)};
}

}  // namespace

TEST(Optimize, DominanceExample) {
  const std::vector<std::array<double, 2>> pts{{1, 2}, {2, 1}, {2, 2}};
  EXPECT_EQ(non_dominated(pts), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(dominates({1, 1}, {1, 2}));
  EXPECT_FALSE(dominates({1, 2}, {1, 2}));
  EXPECT_FALSE(dominates({1, 2}, {2, 1}));
}

TEST(Optimize, FrontsAndCrowding) {
  const std::vector<std::array<double, 2>> pts{{1, 4}, {2, 2}, {4, 1}, {3, 3}, {5, 5}};
  const auto fronts = detail::sort_fronts(pts);
  ASSERT_EQ(fronts.size(), 3u);
  EXPECT_EQ(fronts[0].size(), 3u);
  EXPECT_EQ(fronts[1], std::vector<std::size_t>{3});
  EXPECT_EQ(fronts[2], std::vector<std::size_t>{4});
  const auto d = detail::crowding(pts, fronts[0]);
  int inf = 0;
  for (double x : d) inf += std::isinf(x);
  EXPECT_EQ(inf, 2);
}

TEST(Optimize, CostGridAndWeights) {
  CostSpec s;
  const auto g = s.grid_points();
  ASSERT_EQ(g.size(), 9u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], -g[g.size() - 1 - i], 1e-15);
  EXPECT_EQ(g[4], 0.0);
  EXPECT_NEAR(g.back(), two_pi * 0.8, 1e-12);
  for (WeightProfile w : {WeightProfile::gaussian, WeightProfile::uniform}) {
    s.weights = w;
    const auto v = s.weight_values();
    double sum = 0;
    for (double x : v) {
      EXPECT_GT(x, 0);
      sum += x;
    }
    EXPECT_NEAR(sum, 1, 1e-14);
  }
  s.grid = 8;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = spec_of(CostKind::to);
  EXPECT_EQ(s.grid_points(), std::vector<double>{0.0});
}

TEST(Optimize, CostDefinitions) {
  const PulseParams p = presets::der();
  EvalOptions eo;
  eo.integrator = test::rk4();
  const auto grid = CostSpec{}.grid_points();
  std::vector<double> f;
  for (double e : grid) {
    ErrorSample s;
    s.eps_delta = e;
    f.push_back(simulate_gate(p, s, DecayConstants::none(), eo).fidelity_phase);
  }
  const double f0 = f[4], lo = *std::min_element(f.begin(), f.end()), hi = *std::max_element(f.begin(), f.end());

  const CostBreakdown to = eval_cost(spec_of(CostKind::to), p);
  EXPECT_TRUE(to.ok);
  EXPECT_NEAR(to.cost, 1 - f0, 1e-12);

  const CostBreakdown der = eval_cost(spec_of(CostKind::der), p);
  EXPECT_NEAR(der.cost, (1 - f0) * (1 - f0) + (hi - lo) * (hi - lo), 1e-12);
  EXPECT_NEAR(der.flatness(), hi - lo, 1e-12);

  const CostSpec si = spec_of(CostKind::der_i);
  const auto w = si.weight_values();
  double fbar = 0;
  for (std::size_t i = 0; i < f.size(); ++i) fbar += w[i] * f[i];
  const CostBreakdown di = eval_cost(si, p);
  EXPECT_NEAR(di.fbar, fbar, 1e-12);
  EXPECT_NEAR(di.cost, (1 - f0) * (1 - f0) + (1 - fbar) * (1 - fbar), 1e-12);
  const auto obj = objectives(si, di);
  EXPECT_NEAR(obj[0], 1 - f0, 1e-12);
  EXPECT_NEAR(obj[1], 1 - fbar, 1e-12);
  EXPECT_NEAR(objectives(spec_of(CostKind::der), der)[1], hi - lo, 1e-12);
}

TEST(Optimize, FailuresMapToSentinel) {
  PulseParams bad = presets::der();
  bad.t1 = 2.0;
  const CostBreakdown c = eval_cost(spec_of(CostKind::der), bad);
  EXPECT_FALSE(c.ok);
  EXPECT_EQ(c.cost, cost_sentinel);
  EXPECT_FALSE(c.failure.empty());
  EXPECT_EQ(objectives(spec_of(CostKind::der), c), (std::array<double, 2>{cost_sentinel, cost_sentinel}));

  CostSpec unstable = spec_of(CostKind::der);
  unstable.eval.integrator.fixed_step = 5e-4;
  const CostBreakdown u = eval_cost(unstable, presets::der());
  EXPECT_FALSE(u.ok);
  EXPECT_EQ(u.cost, cost_sentinel);
}

TEST(Optimize, SphereSmokeTest) {
  GAOptions o;
  const GAResult r = ga_minimize_fn(sphere, o);
  const Genome c{0.5, 1.0, 0.2};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.best[i], c[i], 1e-3 * (o.bounds.hi[i] - o.bounds.lo[i]));
  EXPECT_EQ(r.history.size(), static_cast<std::size_t>(o.generations + 1));
  EXPECT_EQ(r.evaluations, o.population + static_cast<std::size_t>(o.generations) * (o.population - o.elitism));
}

TEST(Optimize, ElitismKeepsBestMonotone) {
  GAOptions o;
  o.generations = 30;
  o.seed = 5;
  auto noisy = [](const Genome& g) { return sphere(g) + 0.01 * std::sin(40 * g[0]) * std::sin(30 * g[2]); };
  const GAResult r = ga_minimize_fn(noisy, o);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i].best_cost, r.history[i - 1].best_cost);
  EXPECT_EQ(r.best_cost, r.history.back().best_cost);
}

TEST(Optimize, SeedDeterminism) {
  GAOptions o;
  o.generations = 10;
  o.seed = 9;
  const GAResult a = ga_minimize_fn(sphere, o);
  o.workers = 3;
  const GAResult b = ga_minimize_fn(sphere, o);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].best_cost, b.history[i].best_cost);
    EXPECT_EQ(a.history[i].mean_cost, b.history[i].mean_cost);
    EXPECT_EQ(a.history[i].best, b.history[i].best);
  }
  EXPECT_EQ(a.best, b.best);
  o.seed = 10;
  EXPECT_NE(ga_minimize_fn(sphere, o).history[0].mean_cost, a.history[0].mean_cost);
}

TEST(Optimize, EvaluatedGenomesStayInBounds) {
  GAOptions o;
  o.generations = 20;
  o.mutation_rate = 0.6;
  o.mutation_sigma = 0.3;
  std::mutex m;
  std::vector<Genome> seen;
  auto f = [&](const Genome& g) {
    std::lock_guard lock(m);
    seen.push_back(g);
    return sphere(g);
  };
  ga_minimize_fn(f, o);
  nsga2_fn([&](const Genome& g) { f(g); return bowl_pair(g); }, o);
  ASSERT_FALSE(seen.empty());
  for (const Genome& g : seen) ASSERT_TRUE(feasible(g, o.bounds));
}

TEST(Optimize, OptionValidation) {
  GAOptions o;
  o.population = 3;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = GAOptions{};
  o.bounds.hi[2] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = GAOptions{};
  o.elitism = 64;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  EXPECT_THROW(pareto_front(spec_of(CostKind::to), GAOptions{}), std::invalid_argument);
}

TEST(Optimize, ParetoFrontOnKnownProblem) {
  GAOptions o;
  o.population = 40;
  o.generations = 30;
  const auto front = nsga2_fn(bowl_pair, o);
  ASSERT_GE(front.size(), 10u);
  for (std::size_t i = 0; i < front.size(); ++i) {
    for (std::size_t j = 0; j < front.size(); ++j)
      if (i != j) ASSERT_FALSE(dominates({front[j].j1, front[j].j2}, {front[i].j1, front[i].j2}));
    if (i) {
      EXPECT_GT(front[i].j1, front[i - 1].j1);
      EXPECT_LT(front[i].j2, front[i - 1].j2);
    }
  }
  EXPECT_LT(front.front().j1, 1e-3);
  EXPECT_LT(front.back().j2, 1e-3);
}

TEST(Optimize, SmallRealSearch) {
  GAOptions o;
  o.population = 6;
  o.generations = 2;
  o.elitism = 1;
  const GAResult r = ga_minimize(spec_of(CostKind::to), o);
  EXPECT_EQ(r.history.size(), 3u);
  EXPECT_LT(r.best_cost, cost_sentinel);
  EXPECT_TRUE(feasible(r.best, o.bounds));
  EXPECT_NEAR(eval_cost(spec_of(CostKind::to), with_genome(presets::der(), r.best)).cost, r.best_cost, 1e-15);
}

TEST(Optimize, NameRoundTrip) {
  for (CostKind k : {CostKind::to, CostKind::der, CostKind::der_i}) EXPECT_EQ(cost_kind_from(to_string(k)), k);
  for (WeightProfile w : {WeightProfile::gaussian, WeightProfile::uniform}) EXPECT_EQ(weight_profile_from(to_string(w)), w);
  EXPECT_FALSE(cost_kind_from("fast"));
  EXPECT_EQ(genome_of(presets::der()), (Genome{0.6664, 0.9260, 0.1666}));
}
