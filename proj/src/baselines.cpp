#include "coverpath/baselines.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace coverpath {

std::string to_string(PlannerAlgorithm a) {
  switch (a) {
    case PlannerAlgorithm::Rrt: return "rrt";
    case PlannerAlgorithm::Aco: return "aco";
    case PlannerAlgorithm::Pso: return "pso";
  }
  return "rrt";
}

PlannerAlgorithm planner_from_string(const std::string& name) {
  if (name == "rrt") return PlannerAlgorithm::Rrt;
  if (name == "aco") return PlannerAlgorithm::Aco;
  if (name == "pso") return PlannerAlgorithm::Pso;
  throw std::invalid_argument("unknown planner algorithm: " + name);
}

void PlannerConfig::validate() const {
  if (iterations < 1)
    throw std::invalid_argument("planner: iterations must be positive");
  if (rrt_max_nodes < 1)
    throw std::invalid_argument("planner: rrt_max_nodes must be positive");
  if (rrt_goal_bias < 0.0 || rrt_goal_bias > 1.0)
    throw std::invalid_argument("planner: rrt_goal_bias must be in [0, 1]");
  if (aco_ants < 1)
    throw std::invalid_argument("planner: aco_ants must be positive");
  if (aco_rho < 0.0 || aco_rho > 1.0)
    throw std::invalid_argument("planner: aco_rho must be in [0, 1]");
  if (aco_alpha < 0.0 || aco_beta < 0.0)
    throw std::invalid_argument("planner: aco exponents must be >= 0");
  if (aco_pher_floor <= 0.0)
    throw std::invalid_argument("planner: aco_pher_floor must be > 0");
  if (pso_swarm < 1)
    throw std::invalid_argument("planner: pso_swarm must be positive");
  if (pso_inertia < 0.0 || pso_c1 < 0.0 || pso_c2 < 0.0 ||
      pso_violation_penalty < 0.0)
    throw std::invalid_argument("planner: pso weights must be >= 0");
}

// --------------------------------------------------------- shortest paths --

ShortestPaths::ShortestPaths(const GridMap& map) : n_(map.size()) {
  int cells = n_ * n_;
  dist_.assign(cells, std::vector<int>(cells, -1));
  parent_.assign(cells, std::vector<int>(cells, -1));
  for (int src = 0; src < cells; ++src) {
    if (map.is_obstacle(src / n_, src % n_)) continue;
    std::vector<int>& d = dist_[src];
    std::vector<int>& p = parent_[src];
    std::deque<int> queue;
    d[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      int r = cur / n_, c = cur % n_;
      for (int a = 0; a < kNumActions; ++a) {
        Coord delta = action_delta(static_cast<Action>(a));
        int nr = r + delta.r, nc = c + delta.c;
        if (!map.is_free(nr, nc)) continue;
        int next = nr * n_ + nc;
        if (d[next] >= 0) continue;
        d[next] = d[cur] + 1;
        p[next] = cur;
        queue.push_back(next);
      }
    }
  }
}

int ShortestPaths::dist(Coord from, Coord to) const {
  return dist_[static_cast<size_t>(idx(from))][static_cast<size_t>(idx(to))];
}

std::vector<Action> ShortestPaths::path(Coord from, Coord to) const {
  std::vector<Action> actions;
  int f = idx(from), t = idx(to);
  if (dist_[static_cast<size_t>(f)][static_cast<size_t>(t)] < 0 || f == t)
    return actions;
  const std::vector<int>& p = parent_[static_cast<size_t>(f)];
  std::vector<int> cells;
  for (int cur = t; cur != f; cur = p[static_cast<size_t>(cur)])
    cells.push_back(cur);
  cells.push_back(f);
  for (size_t i = cells.size() - 1; i > 0; --i) {
    int dr = cells[i - 1] / n_ - cells[i] / n_;
    int dc = cells[i - 1] % n_ - cells[i] % n_;
    if (dr == -1) actions.push_back(Action::Up);
    else if (dr == 1) actions.push_back(Action::Down);
    else if (dc == -1) actions.push_back(Action::Left);
    else actions.push_back(Action::Right);
  }
  return actions;
}

// ------------------------------------------------------------ guarded run --

namespace {

Action reverse_of(Action a) {
  switch (a) {
    case Action::Up: return Action::Down;
    case Action::Down: return Action::Up;
    case Action::Left: return Action::Right;
    case Action::Right: return Action::Left;
  }
  return Action::Up;
}

}  // namespace

GuardedRun::GuardedRun(const GridMap& map, const EnvConfig& cfg)
    : env_(map, cfg), paths_(map) {
  env_.reset();
  stats_ = init_stats(env_);
}

StepResult GuardedRun::exec(Action a) {
  StepResult r = env_.step(a);
  actions_.push_back(a);
  trace_.push_back({a, env_.position(), env_.energy(), r.reward, r.status});
  record_step(stats_, r, env_.energy(), env_.config().e_min);
  return r;
}

GuardedRun::Leg GuardedRun::try_leg(const std::vector<Action>& leg) {
  if (!running()) return Leg::Halted;
  if (leg.empty()) return Leg::Executed;

  Environment sim = env_;
  for (Action a : leg) {
    if (sim.status() != StepStatus::Running) break;
    sim.step(a);
  }
  if (sim.status() == StepStatus::EnergyDepleted) return Leg::Rejected;
  if (sim.status() == StepStatus::Running) {
    Coord end = sim.position();
    double budget = sim.energy() - env_.config().e_min;
    if (env_.min_return_cost(end.r, end.c) > budget + 1e-9)
      return Leg::Rejected;
  }

  for (Action a : leg) {
    if (!running()) return Leg::Halted;
    exec(a);
  }
  return running() ? Leg::Executed : Leg::Halted;
}

bool GuardedRun::detour_and_recharge() {
  if (!running()) return false;

  Coord pos = env_.position();
  const std::vector<Coord>& stations = env_.map().stations();
  Coord target{-1, -1};
  int best = std::numeric_limits<int>::max();
  for (Coord s : stations) {
    int d = paths_.dist(pos, s);
    if (d >= 0 && d < best) {
      best = d;
      target = s;
    }
  }
  if (target.r < 0) return false;
  for (Action a : paths_.path(pos, target)) {
    if (!running()) return false;
    exec(a);
  }

  const EnvConfig& cfg = env_.config();
  while (running() && env_.energy() < cfg.e_max - 1e-9) {
    double before = env_.energy();
    Coord at = env_.position();
    int blocked = -1, open = -1;
    for (int a = 0; a < kNumActions; ++a) {
      Coord d = action_delta(static_cast<Action>(a));
      if (env_.map().is_free(at.r + d.r, at.c + d.c)) {
        if (open < 0) open = a;
      } else if (blocked < 0) {
        blocked = a;
      }
    }
    if (blocked >= 0) {
      // a blocked move waits in place: pay the move cost, collect the charge
      exec(static_cast<Action>(blocked));
    } else {
      // bounce off a neighbor and return; skip if the outbound step would
      // dip below the reserve
      if (env_.energy() - cfg.move_cost() < cfg.e_min) break;
      exec(static_cast<Action>(open));
      if (!running()) break;
      exec(reverse_of(static_cast<Action>(open)));
    }
    if (env_.energy() <= before + 1e-12) break;  // waiting gains nothing
  }
  return running();
}

bool GuardedRun::goto_cell(Coord target) {
  if (!running()) return false;
  if (env_.position() == target) return true;
  std::vector<Action> leg = paths_.path(env_.position(), target);
  if (leg.empty()) return false;  // unreachable through free cells

  Leg result = try_leg(leg);
  if (result == Leg::Executed) return true;
  if (result == Leg::Halted) return false;

  if (!detour_and_recharge()) return false;
  leg = paths_.path(env_.position(), target);
  if (leg.empty()) return env_.position() == target;
  return try_leg(leg) == Leg::Executed;
}

void GuardedRun::return_to_station() {
  if (!running()) return;
  Coord pos = env_.position();
  if (env_.map().is_station(pos.r, pos.c)) return;
  detour_and_recharge();
}

PlanResult GuardedRun::finish() && {
  PlanResult result;
  result.actions = std::move(actions_);
  result.trace = std::move(trace_);
  result.stats = stats_;
  return result;
}

// ------------------------------------------------------------ tour runner --

PlanResult execute_tour(const GridMap& map, const EnvConfig& env_cfg,
                        const std::vector<Coord>& order) {
  GuardedRun run(map, env_cfg);
  int n = map.size();
  for (Coord t : order) {
    if (!run.running()) break;
    if (run.env().covered()[static_cast<size_t>(t.r) * n + t.c]) continue;
    run.goto_cell(t);
  }
  if (run.running()) run.return_to_station();
  return std::move(run).finish();
}

PlanResult plan(const GridMap& map, const EnvConfig& env_cfg,
                const PlannerConfig& cfg) {
  cfg.validate();
  switch (cfg.algorithm) {
    case PlannerAlgorithm::Rrt: return plan_rrt(map, env_cfg, cfg);
    case PlannerAlgorithm::Aco: return plan_aco(map, env_cfg, cfg);
    case PlannerAlgorithm::Pso: return plan_pso(map, env_cfg, cfg);
  }
  throw std::logic_error("plan: unhandled algorithm");
}

AggregateStats evaluate_planner(const GridMap& map, const EnvConfig& env_cfg,
                                const PlannerConfig& cfg, int runs) {
  if (runs < 1) throw std::invalid_argument("evaluate_planner: runs < 1");
  cfg.validate();
  std::vector<EpisodeStats> stats;
  stats.reserve(static_cast<size_t>(runs));
  for (int i = 0; i < runs; ++i) {
    PlannerConfig per_run = cfg;
    per_run.seed = mix_seed(cfg.seed, 4000 + static_cast<uint64_t>(i));
    stats.push_back(plan(map, env_cfg, per_run).stats);
  }
  return aggregate(stats);
}

namespace detail {

void aco_evaporate(std::vector<double>& pheromone, double rho, double floor) {
  for (double& p : pheromone) p = std::max(floor, (1.0 - rho) * p);
}

}  // namespace detail

}  // namespace coverpath
