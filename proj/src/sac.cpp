#include "coverpath/sac.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "coverpath/checkpoint.hpp"

namespace coverpath {

// ---------------------------------------------------------------- replay --

PackedState PackedState::pack(const Environment& env) {
  PackedState p;
  p.pos = env.position();
  const std::vector<char>& covered = env.covered();
  p.covered.assign((covered.size() + 63) / 64, 0);
  for (size_t i = 0; i < covered.size(); ++i)
    if (covered[i]) p.covered[i / 64] |= uint64_t{1} << (i % 64);
  return p;
}

std::vector<char> PackedState::unpack(int n) const {
  std::vector<char> out(static_cast<size_t>(n) * n, 0);
  for (size_t i = 0; i < out.size(); ++i)
    if (covered[i / 64] >> (i % 64) & 1) out[i] = 1;
  return out;
}

ReplayBuffer::ReplayBuffer(int capacity, int window_len)
    : capacity_(capacity), window_len_(window_len) {
  if (capacity < 1 || window_len < 1)
    throw std::invalid_argument("ReplayBuffer: bad capacity or window");
}

int ReplayBuffer::window_count_of(const Episode& e) const {
  return std::max(0, e.transitions() - window_len_ + 1);
}

void ReplayBuffer::start_episode(const PackedState& initial) {
  if (open_) end_episode();
  episodes_.emplace_back();
  episodes_.back().states.push_back(initial);
  open_ = true;
}

void ReplayBuffer::push_step(int action, double reward,
                             const PackedState& next, bool done) {
  if (!open_) throw std::logic_error("ReplayBuffer: no open episode");
  Episode& e = episodes_.back();
  windows_ -= window_count_of(e);
  e.states.push_back(next);
  e.actions.push_back(action);
  e.rewards.push_back(reward);
  e.dones.push_back(done ? 1 : 0);
  ++transitions_;
  windows_ += window_count_of(e);
  evict();
}

void ReplayBuffer::end_episode() {
  open_ = false;
  if (!episodes_.empty() && episodes_.back().transitions() == 0)
    episodes_.pop_back();
}

void ReplayBuffer::evict() {
  // Whole episodes leave first; a lone over-long episode sheds its oldest
  // transitions so the capacity bound holds unconditionally.
  while (transitions_ > capacity_ && episodes_.size() > 1) {
    const Episode& victim = episodes_.front();
    transitions_ -= victim.transitions();
    windows_ -= window_count_of(victim);
    episodes_.pop_front();
  }
  if (transitions_ > capacity_ && episodes_.size() == 1) {
    Episode& e = episodes_.front();
    windows_ -= window_count_of(e);
    int drop = transitions_ - capacity_;
    e.states.erase(e.states.begin(), e.states.begin() + drop);
    e.actions.erase(e.actions.begin(), e.actions.begin() + drop);
    e.rewards.erase(e.rewards.begin(), e.rewards.begin() + drop);
    e.dones.erase(e.dones.begin(), e.dones.begin() + drop);
    transitions_ -= drop;
    windows_ += window_count_of(e);
  }
}

WindowBatch ReplayBuffer::sample(Rng& rng, int batch) const {
  if (windows_ <= 0)
    throw std::logic_error("ReplayBuffer: no complete windows to sample");
  WindowBatch out;
  out.window_len = window_len_;
  for (int b = 0; b < batch; ++b) {
    uint64_t pick = rng.uniform_int(static_cast<uint64_t>(windows_));
    size_t ei = 0;
    for (; ei < episodes_.size(); ++ei) {
      int w = window_count_of(episodes_[ei]);
      if (pick < static_cast<uint64_t>(w)) break;
      pick -= static_cast<uint64_t>(w);
    }
    const Episode& e = episodes_[ei];
    int start = static_cast<int>(pick);
    out.states.emplace_back(e.states.begin() + start,
                            e.states.begin() + start + window_len_ + 1);
    out.actions.emplace_back(e.actions.begin() + start,
                             e.actions.begin() + start + window_len_);
    out.rewards.emplace_back(e.rewards.begin() + start,
                             e.rewards.begin() + start + window_len_);
    out.dones.emplace_back(e.dones.begin() + start,
                           e.dones.begin() + start + window_len_);
  }
  return out;
}

namespace {

void put_u64(std::string& out, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

uint64_t take_u64(const std::string& s, size_t& off) {
  if (off + 8 > s.size())
    throw std::runtime_error("replay snapshot: truncated");
  uint64_t v;
  std::memcpy(&v, s.data() + off, 8);
  off += 8;
  return v;
}

double take_f64(const std::string& s, size_t& off) {
  if (off + 8 > s.size())
    throw std::runtime_error("replay snapshot: truncated");
  double v;
  std::memcpy(&v, s.data() + off, 8);
  off += 8;
  return v;
}

}  // namespace

std::string ReplayBuffer::serialize() const {
  std::string out;
  put_u64(out, episodes_.size());
  put_u64(out, open_ ? 1 : 0);
  for (const Episode& e : episodes_) {
    put_u64(out, static_cast<uint64_t>(e.transitions()));
    for (const PackedState& s : e.states) {
      put_u64(out, static_cast<uint64_t>(s.pos.r));
      put_u64(out, static_cast<uint64_t>(s.pos.c));
      put_u64(out, s.covered.size());
      for (uint64_t w : s.covered) put_u64(out, w);
    }
    for (int t = 0; t < e.transitions(); ++t) {
      put_u64(out, static_cast<uint64_t>(e.actions[t]));
      put_f64(out, e.rewards[t]);
      put_u64(out, e.dones[t] ? 1 : 0);
    }
  }
  return out;
}

void ReplayBuffer::restore(const std::string& bytes) {
  size_t off = 0;
  uint64_t count = take_u64(bytes, off);
  bool open = take_u64(bytes, off) != 0;
  std::deque<Episode> episodes;
  int transitions = 0;
  int windows = 0;
  for (uint64_t i = 0; i < count; ++i) {
    Episode e;
    uint64_t steps = take_u64(bytes, off);
    for (uint64_t s = 0; s <= steps; ++s) {
      PackedState p;
      p.pos.r = static_cast<int>(take_u64(bytes, off));
      p.pos.c = static_cast<int>(take_u64(bytes, off));
      uint64_t words = take_u64(bytes, off);
      p.covered.resize(words);
      for (uint64_t w = 0; w < words; ++w) p.covered[w] = take_u64(bytes, off);
      e.states.push_back(std::move(p));
    }
    for (uint64_t t = 0; t < steps; ++t) {
      e.actions.push_back(static_cast<int>(take_u64(bytes, off)));
      e.rewards.push_back(take_f64(bytes, off));
      e.dones.push_back(take_u64(bytes, off) ? 1 : 0);
    }
    transitions += e.transitions();
    windows += window_count_of(e);
    episodes.push_back(std::move(e));
  }
  if (off != bytes.size())
    throw std::runtime_error("replay snapshot: trailing bytes");
  episodes_ = std::move(episodes);
  transitions_ = transitions;
  windows_ = windows;
  open_ = open;
  evict();
}

// ------------------------------------------------------------------- csv --

std::string training_csv_header() {
  return "episode,reward,coverage_pct,violations,energy_used,steps,alpha,"
         "q_loss,policy_loss";
}

std::string training_csv_row(const EpisodeLog& log) {
  std::ostringstream os;
  os.precision(10);
  os << log.episode << ',' << log.reward << ',' << log.coverage_pct << ','
     << log.violations << ',' << log.energy_used << ',' << log.steps << ','
     << log.alpha << ',' << log.q_loss << ',' << log.policy_loss;
  return os.str();
}

// ----------------------------------------------------------------- agent --

SacAgent::SacAgent(const GridMap& map, SacConfig cfg)
    : map_(map), cfg_(cfg), replay_(cfg.replay_capacity, cfg.window_len),
      rng_(mix_seed(cfg.seed, 2)) {
  cfg_.trunk.grid = map.size();
  cfg_.trunk.in_channels = 4;
  cfg_.trunk.out_dim = 4;
  if (cfg_.gamma <= 0.0 || cfg_.gamma >= 1.0)
    throw std::invalid_argument("SacAgent: gamma must lie in (0,1)");
  if (cfg_.tau <= 0.0 || cfg_.tau > 1.0)
    throw std::invalid_argument("SacAgent: tau must lie in (0,1]");

  Rng init(mix_seed(cfg_.seed, 1));
  policy = TrunkNet(cfg_.trunk, init);
  q1 = TrunkNet(cfg_.trunk, init);
  q2 = TrunkNet(cfg_.trunk, init);
  target_q1 = TrunkNet(cfg_.trunk, init);
  target_q2 = TrunkNet(cfg_.trunk, init);
  target_q1.copy_from(q1);
  target_q2.copy_from(q2);

  policy.set_requires_grad();
  q1.set_requires_grad();
  q2.set_requires_grad();

  log_alpha_ = Tensor::from({1}, {std::log(cfg_.init_alpha)});
  log_alpha_.set_requires_grad();

  opt_policy_ = Adam(policy.parameters(), cfg_.lr_actor);
  opt_q1_ = Adam(q1.parameters(), cfg_.lr_critic);
  opt_q2_ = Adam(q2.parameters(), cfg_.lr_critic);
  opt_alpha_ = Adam({log_alpha_}, cfg_.lr_entropy);
}

Tensor SacAgent::batch_states(
    const std::vector<const PackedState*>& states) const {
  int n = map_.size();
  int b = static_cast<int>(states.size());
  Tensor out = Tensor::zeros({b, 4, n, n});
  size_t per = static_cast<size_t>(4) * n * n;
  for (int i = 0; i < b; ++i) {
    Tensor one =
        make_state_tensor(map_, states[i]->unpack(n), states[i]->pos);
    std::memcpy(out.data() + per * static_cast<size_t>(i), one.data(),
                per * sizeof(double));
  }
  return out;
}

SacAgent::ActResult SacAgent::sample_action(const Tensor& state,
                                            LstmState& lstm,
                                            SampleMode mode) {
  NoGradGuard guard;
  Tensor logits = policy.forward(state, lstm);
  Tensor logp = log_softmax_rows(logits);
  ActResult res;
  if (mode == SampleMode::Greedy) {
    int best = 0;
    for (int a = 1; a < 4; ++a)
      if (logp.at({0, a}) > logp.at({0, best})) best = a;
    res.action = best;
  } else {
    if (cfg_.exploration_eps > 0.0 &&
        rng_.uniform() < cfg_.exploration_eps) {
      res.action = static_cast<int>(rng_.uniform_int(4));
    } else {
      std::vector<double> probs(4);
      for (int a = 0; a < 4; ++a) probs[a] = std::exp(logp.at({0, a}));
      res.action = static_cast<int>(rng_.categorical(probs));
    }
  }
  res.log_prob = logp.at({0, res.action});
  return res;
}

std::vector<double> SacAgent::compute_target(const WindowBatch& batch) {
  NoGradGuard guard;
  int b = batch.size();
  int len = batch.window_len;
  double a_coef = alpha();
  std::vector<double> y(static_cast<size_t>(b) * len, 0.0);

  LstmState pol_state = policy.zero_state(b);
  LstmState t1_state = target_q1.zero_state(b);
  LstmState t2_state = target_q2.zero_state(b);
  for (int t = 0; t <= len; ++t) {
    std::vector<const PackedState*> step;
    step.reserve(b);
    for (int i = 0; i < b; ++i) step.push_back(&batch.states[i][t]);
    Tensor x = batch_states(step);
    Tensor logits = policy.forward(x, pol_state);
    Tensor tq1_out = target_q1.forward(x, t1_state);
    Tensor tq2_out = target_q2.forward(x, t2_state);
    if (t == 0) continue;  // outputs at t score s_{t}, the next state of t-1
    Tensor logp = log_softmax_rows(logits);
    for (int i = 0; i < b; ++i) {
      double boot = 0.0;
      // The entropy term enters the bootstrap pessimistically: the sampled
      // surprisal alpha*(-log pi) is subtracted from the twin-min value,
      // y = r + gamma*(minQ' + alpha*log pi(a'|s')).
      if (cfg_.expectation_target) {
        for (int a = 0; a < 4; ++a) {
          double lp = logp.at({i, a});
          double minq = std::min(tq1_out.at({i, a}), tq2_out.at({i, a}));
          boot += std::exp(lp) * (minq + a_coef * lp);
        }
      } else {
        std::vector<double> probs(4);
        for (int a = 0; a < 4; ++a) probs[a] = std::exp(logp.at({i, a}));
        int ap = static_cast<int>(rng_.categorical(probs));
        double minq = std::min(tq1_out.at({i, ap}), tq2_out.at({i, ap}));
        boot = minq + a_coef * logp.at({i, ap});
      }
      double done = batch.dones[i][t - 1] ? 1.0 : 0.0;
      y[static_cast<size_t>(i) * len + (t - 1)] =
          batch.rewards[i][t - 1] + cfg_.gamma * (1.0 - done) * boot;
    }
  }
  return y;
}

Tensor SacAgent::critic_loss(int which, const WindowBatch& batch,
                             const std::vector<double>& targets) {
  TrunkNet& critic = which == 1 ? q1 : q2;
  int b = batch.size();
  int len = batch.window_len;
  LstmState state = critic.zero_state(b);
  Tensor total;
  for (int t = 0; t < len; ++t) {
    std::vector<const PackedState*> step;
    std::vector<int> acts;
    std::vector<double> yt(b);
    for (int i = 0; i < b; ++i) {
      step.push_back(&batch.states[i][t]);
      acts.push_back(batch.actions[i][t]);
      yt[i] = targets[static_cast<size_t>(i) * len + t];
    }
    Tensor qvals = critic.forward(batch_states(step), state);
    Tensor q = pick_per_row(qvals, acts);
    Tensor diff = sub(q, Tensor::from({b}, yt));
    Tensor sq = sum_all(mul(diff, diff));
    total = total.defined() ? add(total, sq) : sq;
  }
  return scale(total, 1.0 / (static_cast<double>(b) * len));
}

Tensor SacAgent::policy_loss(const WindowBatch& batch) {
  int b = batch.size();
  int len = batch.window_len;
  double a_coef = alpha();

  // critic values are constants here: gradients must reach only the policy
  std::vector<Tensor> minq(static_cast<size_t>(len));
  {
    NoGradGuard guard;
    LstmState s1 = q1.zero_state(b);
    LstmState s2 = q2.zero_state(b);
    for (int t = 0; t < len; ++t) {
      std::vector<const PackedState*> step;
      for (int i = 0; i < b; ++i) step.push_back(&batch.states[i][t]);
      Tensor x = batch_states(step);
      Tensor o1 = q1.forward(x, s1);
      Tensor o2 = q2.forward(x, s2);
      std::vector<double> m(static_cast<size_t>(b) * 4);
      for (int i = 0; i < b; ++i)
        for (int a = 0; a < 4; ++a)
          m[static_cast<size_t>(i) * 4 + a] =
              std::min(o1.at({i, a}), o2.at({i, a}));
      minq[t] = Tensor::from({b, 4}, std::move(m));
    }
  }

  LstmState state = policy.zero_state(b);
  Tensor total;
  for (int t = 0; t < len; ++t) {
    std::vector<const PackedState*> step;
    for (int i = 0; i < b; ++i) step.push_back(&batch.states[i][t]);
    Tensor logits = policy.forward(batch_states(step), state);
    Tensor logp = log_softmax_rows(logits);
    Tensor p = softmax_rows(logits);
    Tensor inner = sub(scale(logp, a_coef), minq[t]);
    Tensor contrib = sum_all(mul(p, inner));
    total = total.defined() ? add(total, contrib) : contrib;
  }
  return scale(total, 1.0 / (static_cast<double>(b) * len));
}

double SacAgent::alpha_loss(const WindowBatch& batch) {
  NoGradGuard guard;
  int b = batch.size();
  int len = batch.window_len;
  LstmState state = policy.zero_state(b);
  double k = 0.0;
  for (int t = 0; t < len; ++t) {
    std::vector<const PackedState*> step;
    for (int i = 0; i < b; ++i) step.push_back(&batch.states[i][t]);
    Tensor logits = policy.forward(batch_states(step), state);
    Tensor logp = log_softmax_rows(logits);
    for (int i = 0; i < b; ++i)
      for (int a = 0; a < 4; ++a) {
        double lp = logp.at({i, a});
        k += std::exp(lp) * (lp + cfg_.target_entropy);
      }
  }
  k /= static_cast<double>(b) * len;
  return -std::exp(log_alpha_.value()) * k;
}

void SacAgent::soft_update() {
  target_q1.blend_from(q1, cfg_.tau);
  target_q2.blend_from(q2, cfg_.tau);
}

SacAgent::UpdateStats SacAgent::update(const WindowBatch& batch) {
  UpdateStats stats;
  std::vector<double> y = compute_target(batch);

  opt_q1_.zero_grad();
  Tensor l1 = critic_loss(1, batch, y);
  stats.q1_loss = l1.value();
  l1.backward();
  opt_q1_.step();

  opt_q2_.zero_grad();
  Tensor l2 = critic_loss(2, batch, y);
  stats.q2_loss = l2.value();
  l2.backward();
  opt_q2_.step();

  opt_policy_.zero_grad();
  Tensor lp = policy_loss(batch);
  stats.policy_loss = lp.value();
  lp.backward();
  opt_policy_.step();

  double la = alpha_loss(batch);
  stats.alpha_loss = la;
  log_alpha_.zero_grad();
  log_alpha_.grad()[0] = la;  // dL/d(log alpha) equals the loss itself
  opt_alpha_.step();

  ++update_rounds_;
  if (update_rounds_ % cfg_.target_update_freq == 0) soft_update();
  return stats;
}

void SacAgent::check_finite(const UpdateStats& s,
                            const TrainHooks& hooks) const {
  double sum = s.q1_loss + s.q2_loss + s.policy_loss + s.alpha_loss;
  if (std::isfinite(sum)) return;
  std::ostringstream os;
  os << "non-finite loss (q1=" << s.q1_loss << ", q2=" << s.q2_loss
     << ", policy=" << s.policy_loss << ", alpha=" << s.alpha_loss
     << ") after " << update_rounds_ << " update rounds";
  if (hooks.on_abort) hooks.on_abort(os.str());
  throw NumericError(os.str());
}

std::vector<EpisodeLog> SacAgent::train(Environment& env, int episodes,
                                        const TrainHooks& hooks,
                                        int first_episode) {
  if (env.map().serialize() != map_.serialize())
    throw std::invalid_argument("SacAgent::train: environment map differs "
                                "from the agent's map");
  std::vector<EpisodeLog> logs;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    EpisodeStats stats = init_stats(env);
    LstmState lstm = policy.zero_state(1);
    replay_.start_episode(PackedState::pack(env));

    double q_sum = 0.0, p_sum = 0.0;
    int rounds = 0;
    while (env.status() == StepStatus::Running) {
      Tensor state =
          make_state_tensor(map_, env.covered(), env.position());
      ActResult act = sample_action(state, lstm, SampleMode::Stochastic);
      StepResult r = env.step(static_cast<Action>(act.action));
      record_step(stats, r, env.energy(), env.config().e_min);
      bool done = r.status != StepStatus::Running;
      replay_.push_step(act.action, r.reward, PackedState::pack(env), done);
      ++total_env_steps_;

      if (replay_.window_count() >= cfg_.batch_size &&
          total_env_steps_ % cfg_.update_every == 0) {
        UpdateStats us = update(replay_.sample(rng_, cfg_.batch_size));
        check_finite(us, hooks);
        q_sum += 0.5 * (us.q1_loss + us.q2_loss);
        p_sum += us.policy_loss;
        ++rounds;
      }
    }
    replay_.end_episode();

    EpisodeLog log;
    log.episode = first_episode + e;
    log.reward = stats.total_reward;
    log.coverage_pct = coverage_rate(stats);
    log.violations = stats.violation_steps;
    log.energy_used = stats.energy_consumed;
    log.steps = stats.steps;
    log.alpha = alpha();
    log.q_loss = rounds > 0 ? q_sum / rounds : 0.0;
    log.policy_loss = rounds > 0 ? p_sum / rounds : 0.0;
    logs.push_back(log);
    if (hooks.on_episode) hooks.on_episode(log);
  }
  return logs;
}

std::vector<EpisodeStats> SacAgent::evaluate(Environment& env, int runs) {
  if (env.map().serialize() != map_.serialize())
    throw std::invalid_argument("SacAgent::evaluate: environment map differs "
                                "from the agent's map");
  std::vector<EpisodeStats> out;
  for (int run = 0; run < runs; ++run) {
    env.reset();
    EpisodeStats stats = init_stats(env);
    LstmState lstm = policy.zero_state(1);
    while (env.status() == StepStatus::Running) {
      Tensor state =
          make_state_tensor(map_, env.covered(), env.position());
      ActResult act = sample_action(state, lstm, SampleMode::Greedy);
      StepResult r = env.step(static_cast<Action>(act.action));
      record_step(stats, r, env.energy(), env.config().e_min);
    }
    out.push_back(stats);
  }
  return out;
}

// ------------------------------------------------------------ checkpoint --

namespace {

void add_trunk(CheckpointWriter& w, const std::string& prefix,
               TrunkNet& net) {
  std::vector<Tensor> params = net.parameters();
  for (size_t i = 0; i < params.size(); ++i)
    w.add_tensor(prefix + "." + std::to_string(i), params[i]);
}

void load_trunk(const CheckpointReader& r, const std::string& prefix,
                TrunkNet& net) {
  std::vector<Tensor> params = net.parameters();
  for (size_t i = 0; i < params.size(); ++i)
    r.load_into(prefix + "." + std::to_string(i), params[i]);
}

void add_adam(CheckpointWriter& w, const std::string& prefix,
              const Adam& opt) {
  w.add_i64(prefix + ".t", opt.step_count());
  for (size_t i = 0; i < opt.m().size(); ++i) {
    w.add_array(prefix + ".m." + std::to_string(i), opt.m()[i]);
    w.add_array(prefix + ".v." + std::to_string(i), opt.v()[i]);
  }
}

void load_adam(const CheckpointReader& r, const std::string& prefix,
               Adam& opt) {
  std::vector<std::vector<double>> m, v;
  for (size_t i = 0; i < opt.m().size(); ++i) {
    m.push_back(r.array(prefix + ".m." + std::to_string(i)));
    v.push_back(r.array(prefix + ".v." + std::to_string(i)));
  }
  opt.restore(r.i64(prefix + ".t"), std::move(m), std::move(v));
}

}  // namespace

void SacAgent::save(const std::string& path, int64_t episode) const {
  CheckpointWriter w;
  w.add_i64("version", 1);
  w.add_i64("grid", cfg_.trunk.grid);
  w.add_i64("channels", cfg_.trunk.channels);
  w.add_i64("kernel", cfg_.trunk.kernel);
  w.add_i64("heads", cfg_.trunk.heads);
  w.add_i64("lstm_hidden", cfg_.trunk.lstm_hidden);
  w.add_f64("init_std", cfg_.trunk.init_std);
  w.add_string("map", map_.serialize());
  w.add_tensor("log_alpha", log_alpha_);
  SacAgent& self = const_cast<SacAgent&>(*this);
  add_trunk(w, "policy", self.policy);
  add_trunk(w, "q1", self.q1);
  add_trunk(w, "q2", self.q2);
  add_trunk(w, "tq1", self.target_q1);
  add_trunk(w, "tq2", self.target_q2);
  add_adam(w, "adam.policy", opt_policy_);
  add_adam(w, "adam.q1", opt_q1_);
  add_adam(w, "adam.q2", opt_q2_);
  add_adam(w, "adam.alpha", opt_alpha_);
  w.add_string("rng", rng_.serialize());
  w.add_string("replay", replay_.serialize());
  w.add_i64("episode", episode);
  w.add_i64("total_steps", total_env_steps_);
  w.add_i64("update_rounds", update_rounds_);
  w.write(path);
}

int64_t SacAgent::load(const std::string& path) {
  CheckpointReader r = CheckpointReader::from_file(path);
  if (r.i64("version") != 1)
    throw std::runtime_error("checkpoint: unsupported version");
  if (r.i64("grid") != cfg_.trunk.grid)
    throw std::runtime_error("checkpoint: grid size mismatch");
  load_trunk(r, "policy", policy);
  load_trunk(r, "q1", q1);
  load_trunk(r, "q2", q2);
  load_trunk(r, "tq1", target_q1);
  load_trunk(r, "tq2", target_q2);
  r.load_into("log_alpha", log_alpha_);
  load_adam(r, "adam.policy", opt_policy_);
  load_adam(r, "adam.q1", opt_q1_);
  load_adam(r, "adam.q2", opt_q2_);
  load_adam(r, "adam.alpha", opt_alpha_);
  rng_ = Rng::deserialize(r.str("rng"));
  replay_.restore(r.str("replay"));
  total_env_steps_ = r.i64("total_steps");
  update_rounds_ = r.i64("update_rounds");
  return r.i64("episode");
}

}  // namespace coverpath
