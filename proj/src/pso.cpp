#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coverpath/baselines.hpp"

namespace coverpath {

namespace {

// Priority decoder: visit cells in decreasing priority, ties to the lower
// cell index, so equal vectors always produce the same tour.
std::vector<Coord> decode(const std::vector<double>& priority,
                          const std::vector<Coord>& cells) {
  std::vector<int> order(priority.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (priority[static_cast<size_t>(a)] != priority[static_cast<size_t>(b)])
      return priority[static_cast<size_t>(a)] >
             priority[static_cast<size_t>(b)];
    return a < b;
  });
  std::vector<Coord> out;
  out.reserve(order.size());
  for (int i : order) out.push_back(cells[static_cast<size_t>(i)]);
  return out;
}

}  // namespace

PlanResult plan_pso(const GridMap& map, const EnvConfig& env_cfg,
                    const PlannerConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 9103));
  int n = map.size();

  // decision space: every reachable free cell except the base (it is
  // covered from the start)
  std::vector<char> reachable = map.reachable_mask();
  std::vector<Coord> cells;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (reachable[static_cast<size_t>(r) * n + c] &&
          !(Coord{r, c} == map.base()))
        cells.push_back({r, c});
  size_t m = cells.size();

  auto fitness_of = [&](const EpisodeStats& s) {
    return env_cfg.psi1 * s.covered_cells - env_cfg.psi2 * s.energy_consumed -
           cfg.pso_violation_penalty * s.violation_steps;
  };
  auto evaluate = [&](const std::vector<double>& x) {
    return fitness_of(execute_tour(map, env_cfg, decode(x, cells)).stats);
  };

  struct Particle {
    std::vector<double> x, v, best_x;
    double best_fit;
  };
  std::vector<Particle> swarm(static_cast<size_t>(cfg.pso_swarm));
  std::vector<double> gbest;
  double gbest_fit = -std::numeric_limits<double>::infinity();
  for (Particle& p : swarm) {
    p.x.resize(m);
    p.v.assign(m, 0.0);
    for (double& xi : p.x) xi = rng.uniform();
    p.best_x = p.x;
    p.best_fit = evaluate(p.x);
    if (p.best_fit > gbest_fit) {
      gbest_fit = p.best_fit;
      gbest = p.x;
    }
  }

  std::vector<double> curve;
  for (int it = 0; it < cfg.iterations; ++it) {
    for (Particle& p : swarm) {
      for (size_t d = 0; d < m; ++d) {
        double r1 = rng.uniform(), r2 = rng.uniform();
        p.v[d] = cfg.pso_inertia * p.v[d] +
                 cfg.pso_c1 * r1 * (p.best_x[d] - p.x[d]) +
                 cfg.pso_c2 * r2 * (gbest[d] - p.x[d]);
        p.x[d] += p.v[d];
      }
      double fit = evaluate(p.x);
      if (fit > p.best_fit) {
        p.best_fit = fit;
        p.best_x = p.x;
      }
      if (fit > gbest_fit) {
        gbest_fit = fit;
        gbest = p.x;
      }
    }
    curve.push_back(gbest_fit);
  }

  PlanResult result = execute_tour(map, env_cfg, decode(gbest, cells));
  result.search_curve = std::move(curve);
  return result;
}

}  // namespace coverpath
