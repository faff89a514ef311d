#include "coverpath/env.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace coverpath {

Tensor make_state_tensor(const GridMap& map, const std::vector<char>& covered,
                         Coord pos) {
  int n = map.size();
  int plane = n * n;
  Tensor t = Tensor::zeros({1, 4, n, n});
  double* d = t.data();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int i = map.index(r, c);
      d[i] = map.is_obstacle(r, c) ? 1.0 : 0.0;
      d[plane + i] = map.is_station(r, c) ? 1.0 : 0.0;
      d[3 * plane + i] = covered[static_cast<size_t>(i)] ? 1.0 : 0.0;
    }
  d[2 * plane + map.index(pos.r, pos.c)] = 1.0;
  return t;
}

Environment::Environment(GridMap map, EnvConfig cfg)
    : map_(std::move(map)), cfg_(cfg) {
  max_steps_ = cfg_.resolve_max_steps(map_.size());
  coverable_ = map_.reachable_count();
  auto reach = map_.reachable_mask();
  for (const Coord& s : map_.stations())
    if (!reach[static_cast<size_t>(map_.index(s.r, s.c))])
      throw std::runtime_error("env: station unreachable from base");
  compute_station_distances();
  reset();
}

void Environment::compute_station_distances() {
  int n = map_.size();
  dist_to_station_.assign(static_cast<size_t>(n) * n, -1);
  std::deque<Coord> q;
  for (const Coord& s : map_.stations()) {
    dist_to_station_[static_cast<size_t>(map_.index(s.r, s.c))] = 0;
    q.push_back(s);
  }
  static const int dr[4] = {-1, 1, 0, 0};
  static const int dc[4] = {0, 0, -1, 1};
  while (!q.empty()) {
    Coord cur = q.front();
    q.pop_front();
    int base = dist_to_station_[static_cast<size_t>(map_.index(cur.r, cur.c))];
    for (int d = 0; d < 4; ++d) {
      int r = cur.r + dr[d], c = cur.c + dc[d];
      if (!map_.is_free(r, c)) continue;
      int& slot = dist_to_station_[static_cast<size_t>(map_.index(r, c))];
      if (slot < 0) {
        slot = base + 1;
        q.push_back({r, c});
      }
    }
  }
}

void Environment::reset() {
  pos_ = map_.base();
  energy_ = cfg_.e_max;
  steps_ = 0;
  covered_.assign(static_cast<size_t>(map_.size()) * map_.size(), 0);
  covered_[static_cast<size_t>(map_.index(pos_.r, pos_.c))] = 1;
  covered_count_ = 1;
  // degenerate single-cell workspaces are complete as soon as they start
  status_ = covered_count_ == coverable_ ? StepStatus::Complete : StepStatus::Running;
}

StepResult Environment::step(Action a) {
  if (status_ != StepStatus::Running)
    throw std::logic_error("env: step() on a finished episode");
  StepResult res;

  Coord delta = action_delta(a);
  Coord dest{pos_.r + delta.r, pos_.c + delta.c};
  // A move into a wall or obstacle keeps the position but still burns the
  // motion energy: the rotors don't care that the cell was off limits.
  if (!map_.is_free(dest.r, dest.c)) {
    res.blocked = true;
    dest = pos_;
  }
  res.energy_spent = cfg_.move_cost();

  if (!res.blocked && !covered_[static_cast<size_t>(map_.index(dest.r, dest.c))]) {
    covered_[static_cast<size_t>(map_.index(dest.r, dest.c))] = 1;
    ++covered_count_;
    res.newly_covered = true;
    res.coverage_signal = 1.0;
  } else {
    res.coverage_signal = -1.0;
  }

  pos_ = dest;
  if (map_.is_station(pos_.r, pos_.c)) res.charge_applied = cfg_.charge_rate;
  energy_ = std::clamp(energy_ - res.energy_spent + res.charge_applied, 0.0, cfg_.e_max);
  ++steps_;

  res.safety_signal = is_safe_cell(pos_.r, pos_.c, energy_) ? 0.5 : -3.0;
  res.reward = cfg_.psi1 * res.coverage_signal - cfg_.psi2 * res.energy_spent +
               cfg_.psi3 * res.safety_signal;

  if (energy_ <= 0.0) {
    status_ = StepStatus::EnergyDepleted;
  } else if (covered_count_ == coverable_ && map_.is_station(pos_.r, pos_.c)) {
    status_ = StepStatus::Complete;
  } else if (steps_ >= max_steps_) {
    status_ = StepStatus::Truncated;
  }
  res.status = status_;
  return res;
}

Tensor Environment::state_tensor() const {
  return make_state_tensor(map_, covered_, pos_);
}

double Environment::min_return_cost(int r, int c) const {
  if (!map_.is_free(r, c))
    throw std::invalid_argument("env: min_return_cost on a non-free cell");
  int d = dist_to_station_[static_cast<size_t>(map_.index(r, c))];
  if (d < 0) return std::numeric_limits<double>::infinity();
  return d * cfg_.move_cost();
}

bool Environment::is_safe_cell(int r, int c, double energy) const {
  if (!map_.is_free(r, c)) return false;
  return min_return_cost(r, c) <= energy;
}

}  // namespace coverpath
