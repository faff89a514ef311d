#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coverpath/env.hpp"

namespace coverpath {

// Per-episode bookkeeping shared by the trainer, the evaluator, and the
// baseline harness.  Counts are maintained incrementally via record_step and
// must match a recomputation from the raw trace exactly.
struct EpisodeStats {
  double total_reward = 0.0;
  int covered_cells = 0;
  int reachable_free_cells = 0;
  int obstacle_cells = 0;
  int total_cells = 0;  // N*N, denominator input for the paper-style rate
  double energy_consumed = 0.0;
  int violation_steps = 0;  // timesteps with e_t < e_min
  int steps = 0;
  bool completed = false;
  bool energy_depleted = false;
};

// Snapshot of a freshly reset environment (base cell already covered).
EpisodeStats init_stats(const Environment& env);

// Folds one transition into the stats.  energy_after is the battery level at
// the end of the step (the e_t entering the violation indicator).
void record_step(EpisodeStats& stats, const StepResult& result,
                 double energy_after, double e_min);

// Covered cells over N^2 - |O|, in percent.  The denominator counts
// unreachable free cells, so a complete episode can read below 100 on maps
// with walled-off pockets.  Throws std::invalid_argument on all-obstacle maps.
double coverage_rate_paper(const EpisodeStats& stats);

// Headline rate: covered cells over reachable free cells, in percent.
double coverage_rate(const EpisodeStats& stats);

// Count of timesteps with e_t < e_min.  Throws on an empty trace.
int violations(const std::vector<double>& energy_trace, double e_min);

// Covered cells per unit of consumed energy, in percent; absent when no
// energy was consumed.
std::optional<double> energy_efficiency(const EpisodeStats& stats);

struct RewardWeights {
  double psi1 = 1.0;
  double psi2 = 0.5;
  double psi3 = 0.7;
};

// Recomputes the episode return from aligned per-step component traces:
// sum of psi1*C - psi2*E + psi3*S.  Throws on length mismatch.
double total_reward(const std::vector<double>& coverage_signals,
                    const std::vector<double>& energy_spent,
                    const std::vector<double>& safety_signals,
                    const RewardWeights& weights);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 when n == 1
};

MeanStd mean_std(const std::vector<double>& values);

// Per-metric mean +/- sample std over a batch of runs, Table-4 style.
struct AggregateStats {
  int runs = 0;
  MeanStd reward;
  MeanStd coverage;        // headline (reachable denominator)
  MeanStd coverage_paper;  // N^2 - |O| denominator
  MeanStd violations;
  MeanStd energy;
  MeanStd steps;
  MeanStd efficiency;       // over runs where energy_efficiency is defined
  int efficiency_runs = 0;  // how many runs that was
  int failed_episodes = 0;  // episodes that ended energy-depleted
};

AggregateStats aggregate(const std::vector<EpisodeStats>& runs);

// CSV row shared by the benchmark table (one row per map x algorithm cell).
std::string bench_csv_header();
std::string bench_csv_row(const std::string& map_name,
                          const std::string& algorithm,
                          const AggregateStats& agg);

}  // namespace coverpath
