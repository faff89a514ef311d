#include "coverpath/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coverpath {

EpisodeStats init_stats(const Environment& env) {
  EpisodeStats s;
  const GridMap& map = env.map();
  s.total_cells = map.size() * map.size();
  s.obstacle_cells = 0;
  for (int r = 0; r < map.size(); ++r)
    for (int c = 0; c < map.size(); ++c)
      if (map.is_obstacle(r, c)) ++s.obstacle_cells;
  s.reachable_free_cells = env.total_coverable();
  s.covered_cells = env.covered_count();
  s.completed = env.status() == StepStatus::Complete;
  return s;
}

void record_step(EpisodeStats& stats, const StepResult& result,
                 double energy_after, double e_min) {
  stats.total_reward += result.reward;
  stats.energy_consumed += result.energy_spent;
  if (result.newly_covered) ++stats.covered_cells;
  if (energy_after < e_min) ++stats.violation_steps;
  ++stats.steps;
  stats.completed = result.status == StepStatus::Complete;
  stats.energy_depleted = result.status == StepStatus::EnergyDepleted;
}

double coverage_rate_paper(const EpisodeStats& stats) {
  int denom = stats.total_cells - stats.obstacle_cells;
  if (denom <= 0)
    throw std::invalid_argument(
        "coverage_rate_paper: map has no free cells (all obstacles)");
  return 100.0 * static_cast<double>(stats.covered_cells) / denom;
}

double coverage_rate(const EpisodeStats& stats) {
  if (stats.reachable_free_cells <= 0)
    throw std::invalid_argument("coverage_rate: no reachable free cells");
  return 100.0 * static_cast<double>(stats.covered_cells) /
         stats.reachable_free_cells;
}

int violations(const std::vector<double>& energy_trace, double e_min) {
  if (energy_trace.empty())
    throw std::invalid_argument("violations: empty energy trace");
  int count = 0;
  for (double e : energy_trace)
    if (e < e_min) ++count;
  return count;
}

std::optional<double> energy_efficiency(const EpisodeStats& stats) {
  if (stats.energy_consumed <= 0.0) return std::nullopt;
  return 100.0 * static_cast<double>(stats.covered_cells) /
         stats.energy_consumed;
}

double total_reward(const std::vector<double>& coverage_signals,
                    const std::vector<double>& energy_spent,
                    const std::vector<double>& safety_signals,
                    const RewardWeights& weights) {
  if (coverage_signals.size() != energy_spent.size() ||
      coverage_signals.size() != safety_signals.size())
    throw std::invalid_argument("total_reward: component traces misaligned");
  double sum = 0.0;
  for (size_t i = 0; i < coverage_signals.size(); ++i)
    sum += weights.psi1 * coverage_signals[i] -
           weights.psi2 * energy_spent[i] + weights.psi3 * safety_signals[i];
  return sum;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_std: no values");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

AggregateStats aggregate(const std::vector<EpisodeStats>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  std::vector<double> reward, cov, cov_paper, viol, energy, steps, eff;
  AggregateStats agg;
  agg.runs = static_cast<int>(runs.size());
  for (const EpisodeStats& s : runs) {
    reward.push_back(s.total_reward);
    cov.push_back(coverage_rate(s));
    cov_paper.push_back(coverage_rate_paper(s));
    viol.push_back(static_cast<double>(s.violation_steps));
    energy.push_back(s.energy_consumed);
    steps.push_back(static_cast<double>(s.steps));
    if (std::optional<double> e = energy_efficiency(s)) eff.push_back(*e);
    if (s.energy_depleted) ++agg.failed_episodes;
  }
  agg.reward = mean_std(reward);
  agg.coverage = mean_std(cov);
  agg.coverage_paper = mean_std(cov_paper);
  agg.violations = mean_std(viol);
  agg.energy = mean_std(energy);
  agg.steps = mean_std(steps);
  agg.efficiency_runs = static_cast<int>(eff.size());
  if (!eff.empty()) agg.efficiency = mean_std(eff);
  return agg;
}

std::string bench_csv_header() {
  return "map,algorithm,runs,coverage_mean,coverage_std,violations_mean,"
         "violations_std,energy_mean,energy_std,efficiency_mean,"
         "efficiency_std,reward_mean,reward_std,failed_episodes";
}

std::string bench_csv_row(const std::string& map_name,
                          const std::string& algorithm,
                          const AggregateStats& agg) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << map_name << ',' << algorithm << ',' << agg.runs << ','
     << agg.coverage.mean << ',' << agg.coverage.std << ','
     << agg.violations.mean << ',' << agg.violations.std << ','
     << agg.energy.mean << ',' << agg.energy.std << ','
     << agg.efficiency.mean << ',' << agg.efficiency.std << ','
     << agg.reward.mean << ',' << agg.reward.std << ','
     << agg.failed_episodes;
  return os.str();
}

}  // namespace coverpath
