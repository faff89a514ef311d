#pragma once

#include <string>
#include <vector>

#include "coverpath/env.hpp"
#include "coverpath/metrics.hpp"
#include "coverpath/rng.hpp"

namespace coverpath {

enum class PlannerAlgorithm { Rrt, Aco, Pso };

std::string to_string(PlannerAlgorithm a);
PlannerAlgorithm planner_from_string(const std::string& name);

struct PlannerConfig {
  PlannerAlgorithm algorithm = PlannerAlgorithm::Rrt;
  int iterations = 40;  // search rounds for ACO/PSO; RRT plans online

  // RRT: per-query tree budget and goal-directed sampling bias.
  int rrt_max_nodes = 4000;
  double rrt_goal_bias = 0.3;

  // ACO: ant count, evaporation rho, pheromone/heuristic exponents, and the
  // floor every trail entry is clamped to after evaporation.
  int aco_ants = 16;
  double aco_rho = 0.35;
  double aco_alpha = 1.0;
  double aco_beta = 2.0;
  double aco_pher_floor = 1e-3;

  // PSO: swarm size, inertia, cognitive/social weights, and the fitness
  // penalty per violation step.
  int pso_swarm = 16;
  double pso_inertia = 0.7;
  double pso_c1 = 1.5;
  double pso_c2 = 1.5;
  double pso_violation_penalty = 100.0;

  uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct TraceStep {
  Action action;
  Coord pos;      // position after the step
  double energy;  // battery after the step
  double reward;
  StepStatus status;
};

struct PlanResult {
  std::vector<Action> actions;
  std::vector<TraceStep> trace;
  EpisodeStats stats;
  // Best objective value after each search iteration (ACO/PSO only);
  // non-decreasing by construction.
  std::vector<double> search_curve;
};

// All-pairs shortest paths over free cells (BFS with the fixed
// Up/Down/Left/Right expansion order, so paths are deterministic).
class ShortestPaths {
 public:
  explicit ShortestPaths(const GridMap& map);
  int dist(Coord from, Coord to) const;  // steps; -1 when unreachable
  std::vector<Action> path(Coord from, Coord to) const;

 private:
  int idx(Coord c) const { return c.r * n_ + c.c; }
  int n_;
  std::vector<std::vector<int>> dist_;    // [from][to] in steps
  std::vector<std::vector<int>> parent_;  // [from][to] = previous cell index
};

// Executes planned legs on a live environment under the shared energy
// guard: a leg is committed only when, projected forward, the cheapest
// return to a station from its endpoint still fits within the remaining
// battery minus the reserve e_min.  Rejected legs trigger a detour to the
// nearest station plus a recharge; the run stops when the environment
// leaves the Running state.
class GuardedRun {
 public:
  GuardedRun(const GridMap& map, const EnvConfig& cfg);

  bool running() const { return env_.status() == StepStatus::Running; }
  const Environment& env() const { return env_; }
  const ShortestPaths& paths() const { return paths_; }

  enum class Leg { Executed, Rejected, Halted };
  // Projects the leg on a copy of the environment first; Rejected means the
  // guard vetoed it and nothing was executed.
  Leg try_leg(const std::vector<Action>& leg);
  // Walks to the nearest station and waits until the battery stops rising.
  // False when no station is reachable or the episode ended on the way.
  bool detour_and_recharge();
  // BFS leg to target under the guard, with one detour-and-retry.  False
  // when the target stays unreachable within the energy budget.
  bool goto_cell(Coord target);
  // Final move onto the nearest station so complete coverage can terminate.
  void return_to_station();

  PlanResult finish() &&;

 private:
  StepResult exec(Action a);

  Environment env_;
  ShortestPaths paths_;
  std::vector<Action> actions_;
  std::vector<TraceStep> trace_;
  EpisodeStats stats_;
};

// Shared tour decoder for ACO/PSO: visits targets in order (skipping ones
// already covered en route) under the energy guard, then returns to a
// station.
PlanResult execute_tour(const GridMap& map, const EnvConfig& env_cfg,
                        const std::vector<Coord>& order);

PlanResult plan_rrt(const GridMap& map, const EnvConfig& env_cfg,
                    const PlannerConfig& cfg);
PlanResult plan_aco(const GridMap& map, const EnvConfig& env_cfg,
                    const PlannerConfig& cfg);
PlanResult plan_pso(const GridMap& map, const EnvConfig& env_cfg,
                    const PlannerConfig& cfg);
PlanResult plan(const GridMap& map, const EnvConfig& env_cfg,
                const PlannerConfig& cfg);

// Runs the configured planner `runs` times with per-run seeds derived from
// cfg.seed and aggregates the episode statistics.
AggregateStats evaluate_planner(const GridMap& map, const EnvConfig& env_cfg,
                                const PlannerConfig& cfg, int runs);

namespace detail {
// Evaporation step shared by the ACO trail matrix: entries decay by rho and
// never fall below the floor.
void aco_evaporate(std::vector<double>& pheromone, double rho, double floor);
}  // namespace detail

}  // namespace coverpath
