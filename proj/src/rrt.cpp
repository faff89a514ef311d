#include <cmath>
#include <limits>

#include "coverpath/baselines.hpp"

namespace coverpath {

namespace {

int sign_of(int v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

// Discrete RRT over free cells: grow a parent-pointer tree one cell per
// iteration toward a sampled cell (goal-biased), then read the unique tree
// path start -> goal.  Empty result when the node budget runs out first.
std::vector<Action> rrt_query(const GridMap& map, Coord start, Coord goal,
                              const std::vector<Coord>& free_cells, Rng& rng,
                              int max_nodes, double goal_bias) {
  int n = map.size();
  auto idx = [n](Coord c) { return c.r * n + c.c; };
  if (start == goal) return {};

  std::vector<int> parent(static_cast<size_t>(n) * n, -2);  // -2 = absent
  std::vector<Coord> nodes = {start};
  parent[static_cast<size_t>(idx(start))] = -1;

  for (int it = 0;
       it < max_nodes && parent[static_cast<size_t>(idx(goal))] == -2; ++it) {
    Coord sample = rng.uniform() < goal_bias
                       ? goal
                       : free_cells[rng.uniform_int(free_cells.size())];

    int best = 0, best_d = std::numeric_limits<int>::max();
    for (size_t i = 0; i < nodes.size(); ++i) {
      int d = std::abs(nodes[i].r - sample.r) + std::abs(nodes[i].c - sample.c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    Coord from = nodes[static_cast<size_t>(best)];

    // candidate steps: axis order by larger remaining delta, then any
    // unexplored free neighbor so the tree cannot stall
    int dr = sign_of(sample.r - from.r), dc = sign_of(sample.c - from.c);
    Coord candidates[6];
    int count = 0;
    if (std::abs(sample.r - from.r) >= std::abs(sample.c - from.c)) {
      if (dr != 0) candidates[count++] = {from.r + dr, from.c};
      if (dc != 0) candidates[count++] = {from.r, from.c + dc};
    } else {
      if (dc != 0) candidates[count++] = {from.r, from.c + dc};
      if (dr != 0) candidates[count++] = {from.r + dr, from.c};
    }
    for (int a = 0; a < kNumActions; ++a) {
      Coord d = action_delta(static_cast<Action>(a));
      candidates[count++] = {from.r + d.r, from.c + d.c};
    }
    for (int ci = 0; ci < count; ++ci) {
      Coord next = candidates[ci];
      if (!map.is_free(next.r, next.c)) continue;
      if (parent[static_cast<size_t>(idx(next))] != -2) continue;
      parent[static_cast<size_t>(idx(next))] = idx(from);
      nodes.push_back(next);
      break;
    }
  }

  if (parent[static_cast<size_t>(idx(goal))] == -2) return {};
  std::vector<int> chain;
  for (int cur = idx(goal); cur != -1;
       cur = parent[static_cast<size_t>(cur)])
    chain.push_back(cur);
  std::vector<Action> actions;
  for (size_t i = chain.size() - 1; i > 0; --i) {
    int rdiff = chain[i - 1] / n - chain[i] / n;
    int cdiff = chain[i - 1] % n - chain[i] % n;
    if (rdiff == -1) actions.push_back(Action::Up);
    else if (rdiff == 1) actions.push_back(Action::Down);
    else if (cdiff == -1) actions.push_back(Action::Left);
    else actions.push_back(Action::Right);
  }
  return actions;
}

}  // namespace

PlanResult plan_rrt(const GridMap& map, const EnvConfig& env_cfg,
                    const PlannerConfig& cfg) {
  cfg.validate();
  GuardedRun run(map, env_cfg);
  Rng rng(mix_seed(cfg.seed, 9101));
  int n = map.size();

  std::vector<char> reachable = map.reachable_mask();
  std::vector<Coord> free_cells;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (map.is_free(r, c)) free_cells.push_back({r, c});

  std::vector<char> skipped(static_cast<size_t>(n) * n, 0);
  while (run.running()) {
    // nearest uncovered frontier cell by shortest-path distance
    Coord pos = run.env().position();
    const std::vector<char>& covered = run.env().covered();
    Coord target{-1, -1};
    int best = std::numeric_limits<int>::max();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        size_t i = static_cast<size_t>(r) * n + c;
        if (covered[i] || skipped[i] || !reachable[i]) continue;
        int d = run.paths().dist(pos, {r, c});
        if (d >= 0 && d < best) {
          best = d;
          target = {r, c};
        }
      }
    if (target.r < 0) {
      run.return_to_station();  // covered everything still worth trying
      break;
    }

    std::vector<Action> leg = rrt_query(map, pos, target, free_cells, rng,
                                        cfg.rrt_max_nodes, cfg.rrt_goal_bias);
    size_t ti = static_cast<size_t>(target.r) * n + target.c;
    if (leg.empty()) {
      skipped[ti] = 1;  // query budget exhausted for this frontier
      continue;
    }
    GuardedRun::Leg outcome = run.try_leg(leg);
    if (outcome == GuardedRun::Leg::Executed) continue;
    if (outcome == GuardedRun::Leg::Halted) break;

    // guard veto: refuel, re-query from the station, one retry
    if (!run.detour_and_recharge()) break;
    leg = rrt_query(map, run.env().position(), target, free_cells, rng,
                    cfg.rrt_max_nodes, cfg.rrt_goal_bias);
    if (leg.empty() || run.try_leg(leg) != GuardedRun::Leg::Executed)
      skipped[ti] = 1;
  }
  return std::move(run).finish();
}

}  // namespace coverpath
