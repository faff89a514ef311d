#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>

#include "coverpath/checkpoint.hpp"
#include "coverpath/sac.hpp"
#include "grad_check.hpp"

using namespace coverpath;
using coverpath::testing::grad_check;

namespace {

GridMap tiny_map() {
  return GridMap::parse(
      "N=4\n"
      "B...\n"
      "....\n"
      "..#.\n"
      "...C\n");
}

EnvConfig tiny_env_cfg() {
  EnvConfig cfg;
  cfg.e_max = 40;
  cfg.e_min = 4;
  cfg.max_steps = 48;
  return cfg;
}

SacConfig tiny_sac_cfg(uint64_t seed = 0) {
  SacConfig cfg;
  cfg.trunk.channels = 4;
  cfg.trunk.kernel = 3;
  cfg.trunk.heads = 2;
  cfg.trunk.lstm_hidden = 8;
  cfg.trunk.init_std = 0.05;
  cfg.window_len = 2;
  cfg.batch_size = 3;
  cfg.replay_capacity = 500;
  cfg.update_every = 6;
  cfg.seed = seed;
  return cfg;
}

void zero_params(TrunkNet& net) {
  for (Tensor& p : net.parameters())
    std::fill(p.data(), p.data() + p.size(), 0.0);
}

// With every weight zero the LSTM hidden state is identically zero, so the
// head bias becomes the network's constant output regardless of input.
void rig_constant_output(TrunkNet& net, const std::vector<double>& out) {
  zero_params(net);
  for (int a = 0; a < 4; ++a) net.head.b.data()[a] = out[a];
}

PackedState packed_reset(const GridMap& map) {
  Environment env(map, tiny_env_cfg());
  env.reset();
  return PackedState::pack(env);
}

// One window of length L built from a freshly reset state (contents only
// matter through the rigged constant networks).
WindowBatch one_window(const GridMap& map, int len, double reward,
                       bool done_last) {
  WindowBatch batch;
  batch.window_len = len;
  PackedState s = packed_reset(map);
  batch.states.push_back(std::vector<PackedState>(len + 1, s));
  batch.actions.push_back(std::vector<int>(len, 1));
  batch.rewards.push_back(std::vector<double>(len, reward));
  std::vector<char> dones(len, 0);
  if (done_last) dones.back() = 1;
  batch.dones.push_back(dones);
  return batch;
}

// Fills the agent's replay buffer with random-walk episodes.
void fill_replay(SacAgent& agent, Environment& env, int episodes, Rng& rng) {
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    agent.replay().start_episode(PackedState::pack(env));
    while (env.status() == StepStatus::Running) {
      int a = static_cast<int>(rng.uniform_int(4));
      StepResult r = env.step(static_cast<Action>(a));
      agent.replay().push_step(a, r.reward, PackedState::pack(env),
                               r.status != StepStatus::Running);
    }
    agent.replay().end_episode();
  }
}

}  // namespace

TEST_CASE("replay: windows, grouping, and whole-episode eviction") {
  ReplayBuffer buf(10, 3);
  PackedState s;
  s.pos = {0, 0};
  s.covered = {1};

  // episode with 4 transitions -> 2 windows of length 3
  buf.start_episode(s);
  for (int i = 0; i < 4; ++i) buf.push_step(i % 4, 1.0 + i, s, i == 3);
  buf.end_episode();
  CHECK(buf.transition_count() == 4);
  CHECK(buf.window_count() == 2);

  // a 2-transition episode is too short for a window
  buf.start_episode(s);
  for (int i = 0; i < 2; ++i) buf.push_step(0, 10.0 + i, s, i == 1);
  buf.end_episode();
  CHECK(buf.transition_count() == 6);
  CHECK(buf.window_count() == 2);

  // pushing a 5-transition episode overflows capacity 10: the oldest
  // episode (4 transitions) leaves as a whole
  buf.start_episode(s);
  for (int i = 0; i < 5; ++i) buf.push_step(1, 20.0 + i, s, i == 4);
  buf.end_episode();
  CHECK(buf.transition_count() == 7);  // 2 + 5
  CHECK(buf.window_count() == 3);      // 0 + 3

  // sampled windows stay inside one episode and keep consecutive steps
  Rng rng(3);
  WindowBatch batch = buf.sample(rng, 64);
  REQUIRE(batch.size() == 64);
  for (int b = 0; b < batch.size(); ++b) {
    double first = batch.rewards[b][0];
    CHECK(first >= 20.0);  // only the 5-step episode has full windows
    for (int t = 1; t < 3; ++t)
      CHECK(batch.rewards[b][t] == first + t);
  }
}

TEST_CASE("replay: window length one recovers single transitions") {
  ReplayBuffer buf(100, 1);
  PackedState s;
  s.covered = {0};
  buf.start_episode(s);
  for (int i = 0; i < 7; ++i) buf.push_step(0, i, s, i == 6);
  buf.end_episode();
  CHECK(buf.window_count() == buf.transition_count());
}

TEST_CASE("replay: a lone oversized episode sheds its oldest steps") {
  ReplayBuffer buf(6, 2);
  PackedState s;
  s.covered = {0};
  buf.start_episode(s);
  for (int i = 0; i < 9; ++i) buf.push_step(0, i, s, false);
  CHECK(buf.transition_count() == 6);  // capacity bound holds mid-episode
  Rng rng(1);
  WindowBatch batch = buf.sample(rng, 32);
  for (int b = 0; b < batch.size(); ++b)
    CHECK(batch.rewards[b][0] >= 3.0);  // rewards 0..2 were dropped
}

TEST_CASE("packed states round-trip the coverage set") {
  GridMap map = tiny_map();
  Environment env(map, tiny_env_cfg());
  env.reset();
  env.step(Action::Right);
  env.step(Action::Down);
  PackedState p = PackedState::pack(env);
  CHECK(p.pos == env.position());
  CHECK(p.unpack(map.size()) == env.covered());
}

TEST_CASE("worked example: bootstrap target, q loss, soft update") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg();
  cfg.window_len = 1;
  cfg.init_alpha = 0.1;
  cfg.gamma = 0.98;
  SacAgent agent(map, cfg);

  // policy probabilities (0.2, 0.2, 0.2, 0.4); target critics 1.7 and 2.0
  rig_constant_output(agent.policy, {std::log(0.2), std::log(0.2),
                                     std::log(0.2), std::log(0.4)});
  rig_constant_output(agent.target_q1, {1.7, 1.7, 1.7, 1.7});
  rig_constant_output(agent.target_q2, {2.0, 2.0, 2.0, 2.0});

  WindowBatch batch = one_window(map, 1, 0.85, false);

  // pin the RNG so the sampled a' lands on a probability-0.2 action
  {
    Rng probe(11);
    std::vector<double> probs = {0.2, 0.2, 0.2, 0.4};
    REQUIRE(probe.categorical(probs) <= 2);
  }
  agent.rng() = Rng(11);
  std::vector<double> y = agent.compute_target(batch);
  REQUIRE(y.size() == 1);
  // entropy term 0.1 * (-log 0.2) = 0.16094 is subtracted from the
  // twin-min: y = 0.85 + 0.98 * (1.7 - 0.16094) = 2.3583
  CHECK(y[0] == doctest::Approx(2.3583).epsilon(0.002 / 2.3583));
  CHECK(y[0] ==
        doctest::Approx(0.85 + 0.98 * (1.7 + 0.1 * std::log(0.2)))
            .epsilon(1e-12));

  // done transition bootstraps nothing
  WindowBatch done_batch = one_window(map, 1, 0.85, true);
  std::vector<double> yd = agent.compute_target(done_batch);
  CHECK(yd[0] == 0.85);

  // critic pinned at 2.1 against target 2.36
  rig_constant_output(agent.q1, {2.1, 2.1, 2.1, 2.1});
  Tensor loss = agent.critic_loss(1, batch, {2.36});
  CHECK(loss.value() == (2.1 - 2.36) * (2.1 - 2.36));
  CHECK(loss.value() == doctest::Approx(0.0676).epsilon(1e-12));

  // exact-match target gives zero loss
  Tensor zero_loss = agent.critic_loss(1, batch, {2.1});
  CHECK(zero_loss.value() == 0.0);

  // tau = 0.005 blend: phi = 1, phi' = 0 -> 0.005
  std::fill(agent.q1.head.b.data(), agent.q1.head.b.data() + 4, 1.0);
  std::fill(agent.target_q1.head.b.data(),
            agent.target_q1.head.b.data() + 4, 0.0);
  agent.soft_update();
  CHECK(agent.target_q1.head.b.data()[0] == 0.005);
}

TEST_CASE("compute_target: twin-min and expectation variant") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg();
  cfg.window_len = 1;
  cfg.init_alpha = 0.1;
  SacAgent agent(map, cfg);
  rig_constant_output(agent.policy, {0.0, 0.0, 0.0, 0.0});  // uniform
  rig_constant_output(agent.target_q1, {1.0, 2.0, 3.0, 4.0});
  rig_constant_output(agent.target_q2, {4.0, 3.0, 2.0, 1.0});

  WindowBatch batch = one_window(map, 1, 0.5, false);

  // sampled variant: min is (1,2,2,1)[a']; uniform log pi = log(1/4)
  std::vector<double> y = agent.compute_target(batch);
  double lp = std::log(0.25);
  std::map<double, bool> allowed;
  for (double q : {1.0, 2.0})
    allowed[0.5 + 0.98 * (q + 0.1 * lp)] = true;
  bool found = false;
  for (auto& kv : allowed)
    if (std::abs(y[0] - kv.first) < 1e-12) found = true;
  CHECK(found);

  // expectation variant averages over all four actions
  SacConfig ecfg = cfg;
  ecfg.expectation_target = true;
  SacAgent eagent(map, ecfg);
  rig_constant_output(eagent.policy, {0.0, 0.0, 0.0, 0.0});
  rig_constant_output(eagent.target_q1, {1.0, 2.0, 3.0, 4.0});
  rig_constant_output(eagent.target_q2, {4.0, 3.0, 2.0, 1.0});
  std::vector<double> ye = eagent.compute_target(batch);
  double boot = 0.25 * ((1.0 + 0.1 * lp) + (2.0 + 0.1 * lp) +
                        (2.0 + 0.1 * lp) + (1.0 + 0.1 * lp));
  CHECK(ye[0] == doctest::Approx(0.5 + 0.98 * boot).epsilon(1e-12));
}

TEST_CASE("sample_action: frequencies, greedy tie-break, entropy") {
  GridMap map = tiny_map();
  SacAgent agent(map, tiny_sac_cfg(5));
  rig_constant_output(agent.policy, {std::log(0.15), std::log(0.25),
                                     std::log(0.30), std::log(0.30)});
  Environment env(map, tiny_env_cfg());
  env.reset();
  Tensor state = make_state_tensor(map, env.covered(), env.position());

  // greedy: argmax with lowest-index tie-break -> index 2
  LstmState greedy_state = agent.policy.zero_state(1);
  auto greedy = agent.sample_action(state, greedy_state, SampleMode::Greedy);
  CHECK(greedy.action == 2);
  CHECK(greedy.log_prob == doctest::Approx(std::log(0.30)).epsilon(1e-9));

  // stochastic frequencies approach the probabilities
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    LstmState s = agent.policy.zero_state(1);
    auto act = agent.sample_action(state, s, SampleMode::Stochastic);
    ++counts[act.action];
  }
  std::vector<double> want = {0.15, 0.25, 0.30, 0.30};
  for (int a = 0; a < 4; ++a)
    CHECK(std::abs(counts[a] / static_cast<double>(draws) - want[a]) < 0.01);

  // uniform policy: empirical entropy within 1% of log 4
  rig_constant_output(agent.policy, {0.0, 0.0, 0.0, 0.0});
  std::fill(counts.begin(), counts.end(), 0);
  for (int i = 0; i < draws; ++i) {
    LstmState s = agent.policy.zero_state(1);
    ++counts[agent.sample_action(state, s, SampleMode::Stochastic).action];
  }
  double entropy = 0.0;
  for (int a = 0; a < 4; ++a) {
    double p = counts[a] / static_cast<double>(draws);
    entropy -= p * std::log(p);
  }
  CHECK(std::abs(entropy - std::log(4.0)) / std::log(4.0) < 0.01);
}

TEST_CASE("gradients: critic, policy, and temperature losses") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg(17);
  SacAgent agent(map, cfg);
  Environment env(map, tiny_env_cfg());
  Rng walker(mix_seed(17, 50));
  fill_replay(agent, env, 4, walker);
  REQUIRE(agent.replay().window_count() >= cfg.batch_size);

  // Move every weight to a generic point first: freshly initialized biases
  // are exactly zero, which parks all-zero conv patches on the ReLU kink
  // where central differences are undefined.
  Rng noise(mix_seed(17, 52));
  for (TrunkNet* net : {&agent.policy, &agent.q1, &agent.q2})
    for (Tensor& p : net->parameters())
      coverpath::testing::fill_uniform(p, noise, -0.05, 0.05);

  WindowBatch batch = agent.replay().sample(agent.rng(), cfg.batch_size);
  std::vector<double> y = agent.compute_target(batch);

  Rng check_rng(mix_seed(17, 51));

  SUBCASE("critic loss gradient matches finite differences") {
    auto loss_fn = [&]() { return agent.critic_loss(1, batch, y); };
    auto res = grad_check(loss_fn, agent.q1.parameters(), check_rng, 1e-5, 6);
    CHECK(res.max_rel_err < 1e-3);
    CHECK(res.coords_checked > 50);
  }

  SUBCASE("policy loss gradient matches finite differences") {
    auto loss_fn = [&]() { return agent.policy_loss(batch); };
    auto res =
        grad_check(loss_fn, agent.policy.parameters(), check_rng, 1e-5, 6);
    CHECK(res.max_rel_err < 1e-3);
    CHECK(res.coords_checked > 50);
  }

  SUBCASE("temperature loss is linear in alpha") {
    // Same seed -> identical policies, so the entropy gap K matches and
    // loss(alpha) = -alpha * K must scale with alpha.  Linearity makes
    // dL/d(log alpha) = -alpha * K = loss, the shortcut update() relies on.
    SacConfig half = cfg;
    half.init_alpha = cfg.init_alpha * 0.5;
    SacAgent twin(map, half);
    twin.policy.copy_from(agent.policy);
    double full_loss = agent.alpha_loss(batch);
    double half_loss = twin.alpha_loss(batch);
    CHECK(half_loss == doctest::Approx(0.5 * full_loss).epsilon(1e-9));
    CHECK(full_loss != 0.0);
  }
}

TEST_CASE("update isolation: gradients stay inside their own network") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg(23);
  SacAgent agent(map, cfg);
  Environment env(map, tiny_env_cfg());
  Rng walker(mix_seed(23, 50));
  fill_replay(agent, env, 4, walker);
  WindowBatch batch = agent.replay().sample(agent.rng(), cfg.batch_size);
  std::vector<double> y = agent.compute_target(batch);

  // target networks never even allocate gradients
  for (Tensor& p : agent.target_q1.parameters()) CHECK_FALSE(p.has_grad());
  for (Tensor& p : agent.target_q2.parameters()) CHECK_FALSE(p.has_grad());

  auto grad_norm = [](TrunkNet& net) {
    double s = 0.0;
    for (Tensor& p : net.parameters())
      for (int i = 0; i < p.size(); ++i) s += std::abs(p.grad()[i]);
    return s;
  };

  agent.policy.zero_grad();
  agent.q1.zero_grad();
  agent.q2.zero_grad();
  Tensor l1 = agent.critic_loss(1, batch, y);
  l1.backward();
  CHECK(grad_norm(agent.q1) > 0.0);
  CHECK(grad_norm(agent.q2) == 0.0);
  CHECK(grad_norm(agent.policy) == 0.0);

  agent.q1.zero_grad();
  Tensor lp = agent.policy_loss(batch);
  lp.backward();
  CHECK(grad_norm(agent.policy) > 0.0);
  CHECK(grad_norm(agent.q1) == 0.0);
  CHECK(grad_norm(agent.q2) == 0.0);
}

TEST_CASE("temperature dynamics") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg(31);
  cfg.window_len = 1;
  cfg.lr_entropy = 1e-2;
  SacAgent agent(map, cfg);
  WindowBatch batch = one_window(map, 1, 0.1, false);

  SUBCASE("over-deterministic policy drives alpha up") {
    rig_constant_output(agent.policy, {30.0, 0.0, 0.0, 0.0});  // entropy ~0
    double before = agent.alpha();
    agent.update(batch);
    CHECK(agent.alpha() > before);
  }

  SUBCASE("entropy above target drives alpha down") {
    rig_constant_output(agent.policy, {0.0, 0.0, 0.0, 0.0});  // entropy log4
    double before = agent.alpha();
    agent.update(batch);
    CHECK(agent.alpha() < before);
  }

  SUBCASE("entropy exactly at target is a fixed point") {
    SacConfig fcfg = cfg;
    fcfg.target_entropy = std::log(4.0);
    SacAgent fixed(map, fcfg);
    rig_constant_output(fixed.policy, {0.0, 0.0, 0.0, 0.0});
    CHECK(std::abs(fixed.alpha_loss(batch)) < 1e-12);
  }

  SUBCASE("alpha stays positive through many noisy updates") {
    Rng noise(7);
    Tensor log_alpha = Tensor::from({1}, {std::log(0.1)});
    log_alpha.set_requires_grad();
    Adam opt({log_alpha}, 1e-2);
    for (int i = 0; i < 10000; ++i) {
      log_alpha.zero_grad();
      log_alpha.grad()[0] = noise.normal() * 5.0;
      opt.step();
      CHECK(std::isfinite(log_alpha.value()));
    }
    CHECK(std::exp(log_alpha.value()) > 0.0);
  }
}

TEST_CASE("policy loss closed forms") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg(37);
  cfg.window_len = 1;
  cfg.init_alpha = 0.3;
  SacAgent agent(map, cfg);
  WindowBatch batch = one_window(map, 1, 0.0, false);

  // uniform pi, all Q equal q -> alpha*log(1/4) - q
  rig_constant_output(agent.policy, {0.0, 0.0, 0.0, 0.0});
  rig_constant_output(agent.q1, {1.3, 1.3, 1.3, 1.3});
  rig_constant_output(agent.q2, {1.5, 1.5, 1.5, 1.5});
  Tensor loss = agent.policy_loss(batch);
  CHECK(loss.value() ==
        doctest::Approx(0.3 * std::log(0.25) - 1.3).epsilon(1e-12));
}

TEST_CASE("train: zero episodes leaves the agent untouched") {
  GridMap map = tiny_map();
  SacAgent agent(map, tiny_sac_cfg(41));
  std::vector<double> before(agent.policy.head.w.data(),
                             agent.policy.head.w.data() +
                                 agent.policy.head.w.size());
  Environment env(map, tiny_env_cfg());
  auto logs = agent.train(env, 0);
  CHECK(logs.empty());
  for (int i = 0; i < agent.policy.head.w.size(); ++i)
    CHECK(agent.policy.head.w.data()[i] == before[i]);
}

TEST_CASE("train: deterministic per seed, sensitive to seed") {
  GridMap map = tiny_map();
  auto run = [&](uint64_t seed) {
    SacAgent agent(map, tiny_sac_cfg(seed));
    Environment env(map, tiny_env_cfg());
    auto logs = agent.train(env, 4);
    std::string out;
    for (const auto& log : logs) out += training_csv_row(log) + "\n";
    return out;
  };
  std::string a = run(7);
  std::string b = run(7);
  std::string c = run(8);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("train: logs carry episode metrics that match the environment") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg(43);
  SacAgent agent(map, cfg);
  Environment env(map, tiny_env_cfg());
  auto logs = agent.train(env, 3);
  REQUIRE(logs.size() == 3);
  for (size_t i = 0; i < logs.size(); ++i) {
    CHECK(logs[i].episode == static_cast<int>(i));
    CHECK(logs[i].steps > 0);
    CHECK(logs[i].coverage_pct > 0.0);
    CHECK(logs[i].coverage_pct <= 100.0);
    CHECK(logs[i].alpha > 0.0);
    CHECK(std::isfinite(logs[i].reward));
  }
  CHECK(training_csv_header() ==
        "episode,reward,coverage_pct,violations,energy_used,steps,alpha,"
        "q_loss,policy_loss");
  std::string row = training_csv_row(logs[0]);
  CHECK(std::count(row.begin(), row.end(), ',') == 8);
}

TEST_CASE("checkpoint: bit-exact round trip and resumed determinism") {
  GridMap map = tiny_map();
  SacConfig cfg = tiny_sac_cfg(47);
  SacAgent agent(map, cfg);
  Environment env(map, tiny_env_cfg());
  agent.train(env, 3);

  std::string path = "/tmp/coverpath_test_agent.ckpt";
  agent.save(path, 3);

  SacAgent clone(map, cfg);
  int64_t episode = clone.load(path);
  CHECK(episode == 3);

  auto params_equal = [](TrunkNet& a, TrunkNet& b) {
    auto pa = a.parameters(), pb = b.parameters();
    for (size_t i = 0; i < pa.size(); ++i)
      for (int j = 0; j < pa[i].size(); ++j)
        if (pa[i].data()[j] != pb[i].data()[j]) return false;
    return true;
  };
  CHECK(params_equal(agent.policy, clone.policy));
  CHECK(params_equal(agent.q1, clone.q1));
  CHECK(params_equal(agent.q2, clone.q2));
  CHECK(params_equal(agent.target_q1, clone.target_q1));
  CHECK(params_equal(agent.target_q2, clone.target_q2));
  CHECK(agent.alpha() == clone.alpha());
  CHECK(agent.rng() == clone.rng());
  CHECK(agent.total_env_steps() == clone.total_env_steps());

  // both continue identically (replay is rebuilt, not checkpointed)
  Environment env_a(map, tiny_env_cfg());
  Environment env_b(map, tiny_env_cfg());
  auto la = agent.train(env_a, 2, {}, 3);
  auto lb = clone.train(env_b, 2, {}, 3);
  REQUIRE(la.size() == lb.size());
  for (size_t i = 0; i < la.size(); ++i)
    CHECK(training_csv_row(la[i]) == training_csv_row(lb[i]));

  // wrong grid size is rejected
  GridMap other = GridMap::parse("N=3\nB..\n...\n..C\n");
  SacAgent mismatched(other, cfg);
  CHECK_THROWS_AS((void)mismatched.load(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint container round-trips raw values") {
  CheckpointWriter w;
  Tensor t = Tensor::from({2, 3}, {0.1, -2.5, 3e-17, 1e300, -0.0, 7.25});
  w.add_tensor("t", t);
  w.add_array("arr", {1.0, 2.0, std::exp(1.0)});
  w.add_string("s", "hello\nworld");
  w.add_i64("count", -42);
  w.add_f64("x", 0.1 + 0.2);

  CheckpointReader r = CheckpointReader::from_bytes(w.to_bytes());
  CHECK(r.shape("t") == std::vector<int>{2, 3});
  Tensor back = Tensor::zeros({2, 3});
  r.load_into("t", back);
  for (int i = 0; i < 6; ++i) CHECK(back.data()[i] == t.data()[i]);
  CHECK(r.array("arr")[2] == std::exp(1.0));
  CHECK(r.str("s") == "hello\nworld");
  CHECK(r.i64("count") == -42);
  CHECK(r.f64("x") == 0.1 + 0.2);
  CHECK(r.has("t"));
  CHECK_FALSE(r.has("missing"));
  CHECK_THROWS_AS((void)r.str("t"), std::runtime_error);

  Tensor wrong = Tensor::zeros({3, 2});
  CHECK_THROWS_AS(r.load_into("t", wrong), std::runtime_error);
}

TEST_CASE("adam: first step moves by lr against the gradient sign") {
  Tensor p = Tensor::from({2}, {1.0, -1.0});
  p.set_requires_grad();
  Adam opt({p}, 0.1);
  p.grad()[0] = 0.5;
  p.grad()[1] = -2.0;
  opt.step();
  // bias-corrected first step is lr * g / (|g| + eps) ~ lr * sign(g)
  CHECK(p.data()[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-6));
  CHECK(p.data()[1] == doctest::Approx(-1.0 + 0.1).epsilon(1e-6));
  CHECK(opt.step_count() == 1);
}
