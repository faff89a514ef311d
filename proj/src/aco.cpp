#include <cmath>
#include <limits>

#include "coverpath/baselines.hpp"

namespace coverpath {

namespace {

// One ant builds a visiting order over every reachable free cell: the next
// cell is drawn with weight pheromone^alpha * (1/distance)^beta among the
// cells not yet in the tour.
std::vector<int> construct_tour(Rng& rng, const std::vector<double>& pher,
                                const std::vector<std::vector<int>>& dist,
                                int base_id, double alpha, double beta) {
  int m = static_cast<int>(dist.size());
  std::vector<int> remaining;
  for (int i = 0; i < m; ++i)
    if (i != base_id) remaining.push_back(i);

  std::vector<int> order;
  order.reserve(remaining.size());
  std::vector<double> weights;
  int cur = base_id;
  while (!remaining.empty()) {
    weights.clear();
    for (int cand : remaining) {
      double tau = pher[static_cast<size_t>(cur) * m + cand];
      double d = static_cast<double>(dist[static_cast<size_t>(cur)]
                                         [static_cast<size_t>(cand)]);
      weights.push_back(std::pow(tau, alpha) * std::pow(1.0 / d, beta));
    }
    int pick = rng.categorical(weights);
    cur = remaining[static_cast<size_t>(pick)];
    order.push_back(cur);
    remaining.erase(remaining.begin() + pick);
  }
  return order;
}

}  // namespace

PlanResult plan_aco(const GridMap& map, const EnvConfig& env_cfg,
                    const PlannerConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 9102));
  int n = map.size();

  // compact ids over reachable free cells, base included
  std::vector<char> reachable = map.reachable_mask();
  std::vector<Coord> cells;
  std::vector<int> id_of(static_cast<size_t>(n) * n, -1);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (reachable[static_cast<size_t>(r) * n + c]) {
        id_of[static_cast<size_t>(r) * n + c] = static_cast<int>(cells.size());
        cells.push_back({r, c});
      }
  int m = static_cast<int>(cells.size());
  int base_id = id_of[static_cast<size_t>(map.base().r) * n + map.base().c];

  ShortestPaths paths(map);
  std::vector<std::vector<int>> dist(m, std::vector<int>(m, 1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) dist[i][j] = paths.dist(cells[i], cells[j]);

  auto as_coords = [&](const std::vector<int>& order) {
    std::vector<Coord> out;
    out.reserve(order.size());
    for (int id : order) out.push_back(cells[static_cast<size_t>(id)]);
    return out;
  };
  auto fitness_of = [&](const EpisodeStats& s) {
    // coverage achieved per unit energy
    return s.covered_cells / std::max(s.energy_consumed, env_cfg.move_cost());
  };

  std::vector<double> pher(static_cast<size_t>(m) * m, 1.0);
  std::vector<int> best_order;
  double best_fit = -std::numeric_limits<double>::infinity();
  std::vector<double> curve;

  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<std::pair<double, std::vector<int>>> tours;
    tours.reserve(static_cast<size_t>(cfg.aco_ants));
    for (int ant = 0; ant < cfg.aco_ants; ++ant) {
      std::vector<int> order = construct_tour(rng, pher, dist, base_id,
                                              cfg.aco_alpha, cfg.aco_beta);
      PlanResult res = execute_tour(map, env_cfg, as_coords(order));
      double fit = fitness_of(res.stats);
      if (fit > best_fit) {
        best_fit = fit;
        best_order = order;
      }
      tours.emplace_back(fit, std::move(order));
    }
    detail::aco_evaporate(pher, cfg.aco_rho, cfg.aco_pher_floor);
    for (const auto& [fit, order] : tours) {
      int prev = base_id;
      for (int id : order) {
        pher[static_cast<size_t>(prev) * m + id] += fit;
        prev = id;
      }
    }
    curve.push_back(best_fit);
  }

  PlanResult result = execute_tour(map, env_cfg, as_coords(best_order));
  result.search_curve = std::move(curve);
  return result;
}

}  // namespace coverpath
