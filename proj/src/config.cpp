#include "coverpath/config.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace coverpath {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + ": not a number: '" +
                                value + "'");
  }
}

int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + ": not an integer: '" +
                                value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: " + key + ": not a boolean: '" +
                              value + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define NUM_ENTRY(key, field)                                              \
  {key, [](RunConfig& c, const std::string& v) {                           \
     c.field = parse_double(key, v);                                       \
   },                                                                      \
   [](const RunConfig& c) { return fmt(c.field); }}
#define INT_ENTRY(key, field)                                              \
  {key, [](RunConfig& c, const std::string& v) {                           \
     c.field = static_cast<int>(parse_int(key, v));                        \
   },                                                                      \
   [](const RunConfig& c) { return fmt(c.field); }}
#define SEED_ENTRY(key, field)                                             \
  {key, [](RunConfig& c, const std::string& v) {                           \
     c.field = static_cast<uint64_t>(parse_int(key, v));                   \
   },                                                                      \
   [](const RunConfig& c) { return fmt(c.field); }}
#define BOOL_ENTRY(key, field)                                             \
  {key, [](RunConfig& c, const std::string& v) {                           \
     c.field = parse_bool(key, v);                                         \
   },                                                                      \
   [](const RunConfig& c) { return fmt(c.field); }}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      NUM_ENTRY("env.e_max", env.e_max),
      NUM_ENTRY("env.eta_move", env.eta_move),
      NUM_ENTRY("env.cell_length", env.cell_length),
      NUM_ENTRY("env.e_min", env.e_min),
      NUM_ENTRY("env.charge_rate", env.charge_rate),
      INT_ENTRY("env.max_steps", env.max_steps),
      NUM_ENTRY("env.psi1", env.psi1),
      NUM_ENTRY("env.psi2", env.psi2),
      NUM_ENTRY("env.psi3", env.psi3),

      INT_ENTRY("agent.channels", agent.trunk.channels),
      INT_ENTRY("agent.kernel", agent.trunk.kernel),
      INT_ENTRY("agent.heads", agent.trunk.heads),
      INT_ENTRY("agent.lstm_hidden", agent.trunk.lstm_hidden),
      NUM_ENTRY("agent.init_std", agent.trunk.init_std),
      NUM_ENTRY("agent.lr_actor", agent.lr_actor),
      NUM_ENTRY("agent.lr_critic", agent.lr_critic),
      NUM_ENTRY("agent.lr_entropy", agent.lr_entropy),
      NUM_ENTRY("agent.gamma", agent.gamma),
      NUM_ENTRY("agent.tau", agent.tau),
      INT_ENTRY("agent.batch_size", agent.batch_size),
      NUM_ENTRY("agent.target_entropy", agent.target_entropy),
      INT_ENTRY("agent.target_update_freq", agent.target_update_freq),
      INT_ENTRY("agent.window_len", agent.window_len),
      INT_ENTRY("agent.replay_capacity", agent.replay_capacity),
      BOOL_ENTRY("agent.expectation_target", agent.expectation_target),
      NUM_ENTRY("agent.exploration_eps", agent.exploration_eps),
      NUM_ENTRY("agent.init_alpha", agent.init_alpha),
      INT_ENTRY("agent.update_every", agent.update_every),
      SEED_ENTRY("agent.seed", agent.seed),

      {"planner.algorithm",
       [](RunConfig& c, const std::string& v) {
         c.planner.algorithm = planner_from_string(v);
       },
       [](const RunConfig& c) { return to_string(c.planner.algorithm); }},
      INT_ENTRY("planner.iterations", planner.iterations),
      INT_ENTRY("planner.rrt_max_nodes", planner.rrt_max_nodes),
      NUM_ENTRY("planner.rrt_goal_bias", planner.rrt_goal_bias),
      INT_ENTRY("planner.aco_ants", planner.aco_ants),
      NUM_ENTRY("planner.aco_rho", planner.aco_rho),
      NUM_ENTRY("planner.aco_alpha", planner.aco_alpha),
      NUM_ENTRY("planner.aco_beta", planner.aco_beta),
      NUM_ENTRY("planner.aco_pher_floor", planner.aco_pher_floor),
      INT_ENTRY("planner.pso_swarm", planner.pso_swarm),
      NUM_ENTRY("planner.pso_inertia", planner.pso_inertia),
      NUM_ENTRY("planner.pso_c1", planner.pso_c1),
      NUM_ENTRY("planner.pso_c2", planner.pso_c2),
      NUM_ENTRY("planner.pso_violation_penalty", planner.pso_violation_penalty),
      SEED_ENTRY("planner.seed", planner.seed),

      INT_ENTRY("map.size", map.n),
      NUM_ENTRY("map.density", map.density),
      INT_ENTRY("map.stations", map.stations),
      {"map.layout",
       [](RunConfig& c, const std::string& v) {
         c.map.layout = layout_from_string(v);
       },
       [](const RunConfig& c) { return to_string(c.map.layout); }},
      SEED_ENTRY("map.seed", map.seed),

      INT_ENTRY("sweep.runs", sweep.runs),
  };
  return table;
}

#undef NUM_ENTRY
#undef INT_ENTRY
#undef SEED_ENTRY
#undef BOOL_ENTRY

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value) {
  for (const Entry& e : entries()) {
    if (e.key == key) {
      e.set(cfg, value);
      return;
    }
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      apply_setting(cfg, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

std::string resolved_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const Entry& e : entries()) {
    std::string s = e.key.substr(0, e.key.find('.'));
    if (s != section) {
      if (!section.empty()) os << "\n";
      section = s;
    }
    os << e.key << " = " << e.get(cfg) << "\n";
  }
  return os.str();
}

}  // namespace coverpath
