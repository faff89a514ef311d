#pragma once

#include <vector>

#include "coverpath/grid_map.hpp"
#include "coverpath/tensor.hpp"

namespace coverpath {

enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };

constexpr int kNumActions = 4;

inline Coord action_delta(Action a) {
  switch (a) {
    case Action::Up: return {-1, 0};
    case Action::Down: return {1, 0};
    case Action::Left: return {0, -1};
    case Action::Right: return {0, 1};
  }
  return {0, 0};
}

enum class StepStatus { Running, Complete, EnergyDepleted, Truncated };

struct EnvConfig {
  double e_max = 100.0;       // battery capacity
  double eta_move = 1.0;      // energy per unit of traveled length
  double cell_length = 1.0;
  double e_min = 10.0;        // reserve threshold used by the safety metric
  double charge_rate = 5.0;   // energy gained per timestep spent on a station
  int max_steps = 0;          // 0 -> 4 * n * n
  double psi1 = 1.0;          // coverage reward weight
  double psi2 = 0.5;          // energy cost weight
  double psi3 = 0.7;          // safety reward weight

  int resolve_max_steps(int n) const { return max_steps > 0 ? max_steps : 4 * n * n; }
  double move_cost() const { return eta_move * cell_length; }
};

struct StepResult {
  double reward = 0.0;
  // reward components: reward = psi1*coverage - psi2*energy_spent + psi3*safety
  double coverage_signal = 0.0;  // +1 newly covered, -1 revisit or blocked
  double energy_spent = 0.0;     // consumption this step (before any charging)
  double safety_signal = 0.0;    // +0.5 when a station is still reachable, else -3
  double charge_applied = 0.0;
  bool blocked = false;
  bool newly_covered = false;
  StepStatus status = StepStatus::Running;
};

// Binary state tensor layout shared by the environment and the replay
// buffer: channel 0 obstacles, 1 stations, 2 agent position, 3 coverage.
Tensor make_state_tensor(const GridMap& map, const std::vector<char>& covered,
                         Coord pos);

// Grid-world coverage environment with a hard energy budget and passive
// charging: a step that ends on a station (including a blocked move that
// stays there) gains charge_rate, clamped to capacity.
class Environment {
 public:
  Environment(GridMap map, EnvConfig cfg);

  void reset();
  StepResult step(Action a);

  const GridMap& map() const { return map_; }
  const EnvConfig& config() const { return cfg_; }
  Coord position() const { return pos_; }
  double energy() const { return energy_; }
  int steps() const { return steps_; }
  StepStatus status() const { return status_; }
  const std::vector<char>& covered() const { return covered_; }
  int covered_count() const { return covered_count_; }
  // Number of cells that count toward full coverage: free cells reachable
  // from the base.
  int total_coverable() const { return coverable_; }
  int max_steps() const { return max_steps_; }

  Tensor state_tensor() const;

  // Cheapest energy cost to reach any station from (r, c) along free cells;
  // +inf when no station is reachable.
  double min_return_cost(int r, int c) const;
  // True when the battery level `energy` suffices to reach some station.
  bool is_safe_cell(int r, int c, double energy) const;

 private:
  void compute_station_distances();

  GridMap map_;
  EnvConfig cfg_;
  std::vector<int> dist_to_station_;  // steps to nearest station, -1 unreachable
  int coverable_ = 0;
  int max_steps_ = 0;

  Coord pos_;
  double energy_ = 0.0;
  int steps_ = 0;
  StepStatus status_ = StepStatus::Running;
  std::vector<char> covered_;
  int covered_count_ = 0;
};

}  // namespace coverpath
