#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coverpath/adam.hpp"
#include "coverpath/env.hpp"
#include "coverpath/metrics.hpp"
#include "coverpath/nn.hpp"
#include "coverpath/rng.hpp"

namespace coverpath {

// Grid state compressed for replay storage: static channels are rebuilt
// from the map, so only the agent position and the coverage bitset vary.
struct PackedState {
  Coord pos{0, 0};
  std::vector<uint64_t> covered;  // N*N bits

  static PackedState pack(const Environment& env);
  std::vector<char> unpack(int n) const;
};

struct WindowBatch {
  int window_len = 0;
  std::vector<std::vector<PackedState>> states;  // batch x (L+1)
  std::vector<std::vector<int>> actions;         // batch x L
  std::vector<std::vector<double>> rewards;      // batch x L
  std::vector<std::vector<char>> dones;          // batch x L
  int size() const { return static_cast<int>(states.size()); }
};

// Transition store grouped by episodes; windows for the recurrent trunk
// never cross an episode boundary.  Capacity counts transitions; eviction
// drops whole episodes, oldest first.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int window_len);

  void start_episode(const PackedState& initial);
  void push_step(int action, double reward, const PackedState& next,
                 bool done);
  void end_episode();

  int transition_count() const { return transitions_; }
  // Number of distinct length-L windows available for sampling.
  int window_count() const { return windows_; }
  WindowBatch sample(Rng& rng, int batch) const;

  // Byte-exact snapshot of the stored episodes, so a resumed training run
  // samples the same batches it would have without the interruption.
  std::string serialize() const;
  void restore(const std::string& bytes);

 private:
  struct Episode {
    std::vector<PackedState> states;  // T+1
    std::vector<int> actions;         // T
    std::vector<double> rewards;
    std::vector<char> dones;
    int transitions() const { return static_cast<int>(actions.size()); }
  };
  void evict();
  int window_count_of(const Episode& e) const;

  int capacity_;
  int window_len_;
  int transitions_ = 0;
  int windows_ = 0;
  bool open_ = false;
  std::deque<Episode> episodes_;
};

struct SacConfig {
  TrunkConfig trunk;  // grid/in_channels are overwritten from the map
  double lr_actor = 3e-4;
  double lr_critic = 3e-3;
  double lr_entropy = 1e-3;
  double gamma = 0.98;
  double tau = 0.005;
  int batch_size = 64;
  double target_entropy = 0.5 * std::log(4.0);
  int target_update_freq = 1;  // in update rounds
  int window_len = 8;          // L; 1 recovers single-transition updates
  int replay_capacity = 50000;
  bool expectation_target = false;  // full-expectation bootstrap variant
  double exploration_eps = 0.0;     // epsilon-uniform action mixing
  double init_alpha = 0.1;
  int update_every = 1;  // env steps between gradient rounds
  uint64_t seed = 0;
};

enum class SampleMode { Stochastic, Greedy };

struct EpisodeLog {
  int episode = 0;
  double reward = 0.0;
  double coverage_pct = 0.0;
  int violations = 0;
  double energy_used = 0.0;
  int steps = 0;
  double alpha = 0.0;
  double q_loss = 0.0;
  double policy_loss = 0.0;
};

std::string training_csv_header();
std::string training_csv_row(const EpisodeLog& log);

struct TrainHooks {
  std::function<void(const EpisodeLog&)> on_episode;
  std::function<void(const std::string& reason)> on_abort;
};

// Raised when a gradient round produces a non-finite loss.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SacAgent {
 public:
  SacAgent(const GridMap& map, SacConfig cfg);

  struct ActResult {
    int action = 0;
    double log_prob = 0.0;
  };
  ActResult sample_action(const Tensor& state, LstmState& lstm,
                          SampleMode mode);

  // Bootstrap targets y for every (window, step), flattened window-major.
  std::vector<double> compute_target(const WindowBatch& batch);

  // Loss graphs, exposed for gradient verification.  critic_loss builds the
  // squared error for critic 1 or 2 against fixed targets; policy_loss uses
  // freshly detached critic values.
  Tensor critic_loss(int which, const WindowBatch& batch,
                     const std::vector<double>& targets);
  Tensor policy_loss(const WindowBatch& batch);
  // Analytic temperature objective; its value equals dL/d(log alpha).
  double alpha_loss(const WindowBatch& batch);

  void soft_update();

  // One full gradient round: critics, policy, temperature, target blend.
  struct UpdateStats {
    double q1_loss = 0.0, q2_loss = 0.0;
    double policy_loss = 0.0, alpha_loss = 0.0;
  };
  UpdateStats update(const WindowBatch& batch);

  std::vector<EpisodeLog> train(Environment& env, int episodes,
                                const TrainHooks& hooks = {},
                                int first_episode = 0);
  std::vector<EpisodeStats> evaluate(Environment& env, int runs);

  void save(const std::string& path, int64_t episode) const;
  int64_t load(const std::string& path);  // returns the stored episode

  double alpha() const { return std::exp(log_alpha_.value()); }
  double log_alpha_value() const { return log_alpha_.value(); }
  const SacConfig& config() const { return cfg_; }
  ReplayBuffer& replay() { return replay_; }
  Rng& rng() { return rng_; }
  int64_t total_env_steps() const { return total_env_steps_; }

  TrunkNet policy, q1, q2, target_q1, target_q2;

 private:
  Tensor batch_states(const std::vector<const PackedState*>& states) const;
  void check_finite(const UpdateStats& s, const TrainHooks& hooks) const;

  GridMap map_;
  SacConfig cfg_;
  Tensor log_alpha_;
  Adam opt_policy_, opt_q1_, opt_q2_, opt_alpha_;
  ReplayBuffer replay_;
  Rng rng_;
  int64_t total_env_steps_ = 0;
  int64_t update_rounds_ = 0;
};

}  // namespace coverpath
