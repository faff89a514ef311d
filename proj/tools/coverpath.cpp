// coverpath: command-line front end for map generation, SAC training,
// checkpoint evaluation, and baseline benchmarks.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure
// during training (a diagnostic checkpoint is written first).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coverpath/baselines.hpp"
#include "coverpath/checkpoint.hpp"
#include "coverpath/config.hpp"
#include "coverpath/mapgen.hpp"
#include "coverpath/plot.hpp"
#include "coverpath/sac.hpp"

namespace fs = std::filesystem;
using namespace coverpath;

namespace {

RunConfig base_config() {
  RunConfig cfg;
  if (const char* s = std::getenv("COVERPATH_SEED")) {
    size_t used = 0;
    uint64_t seed = 0;
    try {
      seed = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != std::string(s).size())
      throw std::invalid_argument(std::string("COVERPATH_SEED: not an "
                                              "integer: '") + s + "'");
    cfg.agent.seed = seed;
    cfg.planner.seed = seed;
    cfg.map.seed = seed;
  }
  return cfg;
}

bool is_builtin_token(const std::string& tok) {
  return tok == "1" || tok == "2" || tok == "3";
}

GridMap load_map_arg(const std::string& tok) {
  if (is_builtin_token(tok)) return builtin_map(tok[0] - '0');
  std::ifstream in(tok);
  if (!in) throw std::invalid_argument("map file not found: " + tok);
  std::ostringstream buf;
  buf << in.rdbuf();
  return GridMap::parse(buf.str());
}

std::string map_label(const std::string& tok) {
  if (is_builtin_token(tok)) return "map" + tok;
  return fs::path(tok).stem().string();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string csvnum(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Emits reward.svg and coverage.svg from training CSVs, one series per file.
void write_curves(const fs::path& out_dir,
                  const std::vector<std::string>& csv_paths) {
  std::vector<Series> reward, coverage;
  for (const std::string& p : csv_paths) {
    CsvTable t = read_csv_file(p);
    const std::vector<double>& x = t.column("episode");
    reward.push_back({fs::path(p).stem().string(), x, t.column("reward")});
    coverage.push_back(
        {fs::path(p).stem().string(), x, t.column("coverage_pct")});
  }
  write_file(out_dir / "reward.svg",
             svg_line_chart("Episode reward", "episode", "reward", reward));
  write_file(out_dir / "coverage.svg",
             svg_line_chart("Coverage", "episode", "coverage [%]", coverage));
  std::cout << "wrote " << (out_dir / "reward.svg").string() << "\n"
            << "wrote " << (out_dir / "coverage.svg").string() << "\n";
}

// Rebuilds the trunk hyperparameters stored in a checkpoint so the agent
// can be constructed with matching shapes before load().
void adopt_trunk_from_checkpoint(RunConfig& cfg, const std::string& path) {
  CheckpointReader r = CheckpointReader::from_file(path);
  cfg.agent.trunk.channels = static_cast<int>(r.i64("channels"));
  cfg.agent.trunk.kernel = static_cast<int>(r.i64("kernel"));
  cfg.agent.trunk.heads = static_cast<int>(r.i64("heads"));
  cfg.agent.trunk.lstm_hidden = static_cast<int>(r.i64("lstm_hidden"));
  cfg.agent.trunk.init_std = r.f64("init_std");
}

int cmd_gen(const RunConfig& cfg, int builtin, const std::string& out) {
  std::string text;
  if (builtin > 0) {
    GridMap map = builtin_map(builtin);
    text = "# builtin=" + std::to_string(builtin) + "\n" + map.serialize();
  } else {
    GridMap map = generate(cfg.map);
    text = write_map_text(map, cfg.map);
  }
  write_file(out, text);
  std::cout << out << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& map_arg, int episodes,
              const std::string& out_dir, const std::string& resume,
              int checkpoint_every) {
  if (episodes < 0)
    throw std::invalid_argument("train: episodes must be >= 0");
  GridMap map = load_map_arg(map_arg);
  fs::create_directories(out_dir);
  fs::path out(out_dir);
  write_file(out / "config.txt", resolved_config_text(cfg));

  Environment env(map, cfg.env);
  SacAgent agent(map, cfg.agent);
  int first = 0;
  if (!resume.empty()) first = static_cast<int>(agent.load(resume));

  // A fresh run truncates; resuming into a directory that already has a
  // training log appends, keeping episode numbering gapless.
  fs::path csv_path = out / "training.csv";
  bool append = !resume.empty() && fs::exists(csv_path) &&
                fs::file_size(csv_path) > 0;
  std::ofstream csv(csv_path, append ? std::ios::app : std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  if (!append) csv << training_csv_header() << "\n";

  int print_every = std::max(1, episodes / 10);
  int done = first;
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeLog& log) {
    csv << training_csv_row(log) << "\n";
    csv.flush();
    done = log.episode + 1;
    int nth = log.episode - first + 1;
    if (checkpoint_every > 0 && nth % checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "ckpt_%06d.ckpt", log.episode + 1);
      agent.save((out / name).string(), log.episode + 1);
    }
    if (nth % print_every == 0 || nth == episodes)
      std::cout << "episode " << log.episode << ": reward "
                << std::fixed << std::setprecision(2) << log.reward
                << ", coverage " << log.coverage_pct << "%, alpha "
                << std::setprecision(4) << log.alpha << std::defaultfloat
                << "\n";
  };

  try {
    agent.train(env, episodes, hooks, first);
  } catch (const NumericError& err) {
    fs::path diag = out / "diagnostic.ckpt";
    agent.save(diag.string(), done);
    std::cerr << "error: " << err.what() << "\n"
              << "diagnostic checkpoint: " << diag.string() << "\n";
    return 3;
  }
  agent.save((out / "final.ckpt").string(), first + episodes);
  std::cout << "trained episodes " << first << ".." << first + episodes - 1
            << " -> " << csv_path.string() << "\n"
            << "checkpoint: " << (out / "final.ckpt").string() << "\n";
  return 0;
}

int cmd_eval(RunConfig cfg, const std::string& ckpt,
             const std::string& map_arg, int runs, const std::string& out_dir,
             bool seed_given, uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("eval: runs must be >= 1");
  GridMap map = load_map_arg(map_arg);
  adopt_trunk_from_checkpoint(cfg, ckpt);
  SacAgent agent(map, cfg.agent);
  agent.load(ckpt);  // grid-size mismatch surfaces here
  if (seed_given) agent.rng() = Rng(mix_seed(seed, 2));

  Environment env(map, cfg.env);
  std::vector<EpisodeStats> stats = agent.evaluate(env, runs);
  AggregateStats agg = aggregate(stats);

  fs::create_directories(out_dir);
  fs::path out(out_dir);
  write_file(out / "config.txt", resolved_config_text(cfg));

  std::ostringstream os;
  os << "run,reward,coverage_pct,violations,energy_used,steps,efficiency\n";
  for (size_t i = 0; i < stats.size(); ++i) {
    const EpisodeStats& s = stats[i];
    os << (i + 1) << "," << csvnum(s.total_reward) << ","
       << csvnum(coverage_rate(s)) << "," << s.violation_steps << ","
       << csvnum(s.energy_consumed) << "," << s.steps << ",";
    if (std::optional<double> e = energy_efficiency(s)) os << csvnum(*e);
    os << "\n";
  }
  os << "aggregate," << csvnum(agg.reward.mean) << ","
     << csvnum(agg.coverage.mean) << "," << csvnum(agg.violations.mean) << ","
     << csvnum(agg.energy.mean) << "," << csvnum(agg.steps.mean) << ",";
  if (agg.efficiency_runs > 0) os << csvnum(agg.efficiency.mean);
  os << "\n";
  write_file(out / "eval.csv", os.str());

  std::cout << std::fixed << std::setprecision(2) << "coverage "
            << agg.coverage.mean << " +/- " << agg.coverage.std
            << " | violations " << agg.violations.mean << " +/- "
            << agg.violations.std << " | reward " << agg.reward.mean
            << " +/- " << agg.reward.std << std::defaultfloat << "\n"
            << "wrote " << (out / "eval.csv").string() << "\n";
  return 0;
}

int cmd_bench(RunConfig cfg, const std::vector<std::string>& map_tokens,
              const std::vector<std::string>& algos, int runs,
              const std::vector<std::string>& ckpt_specs,
              const std::vector<std::string>& curves, bool sweep_weights,
              const std::string& out_dir, bool runs_given) {
  if (runs < 1) throw std::invalid_argument("bench: runs must be >= 1");
  fs::create_directories(out_dir);
  fs::path out(out_dir);
  write_file(out / "config.txt", resolved_config_text(cfg));

  std::vector<std::pair<std::string, GridMap>> maps;
  for (const std::string& tok : map_tokens)
    maps.emplace_back(tok, load_map_arg(tok));

  std::map<std::string, std::string> ckpt_by_map;
  for (const std::string& spec : ckpt_specs) {
    size_t eq = spec.find('=');
    if (eq == std::string::npos) {
      if (map_tokens.size() != 1)
        throw std::invalid_argument(
            "bench: --checkpoint needs the <map>=<path> form when more than "
            "one map is benchmarked");
      ckpt_by_map[map_tokens[0]] = spec;
    } else {
      ckpt_by_map[spec.substr(0, eq)] = spec.substr(eq + 1);
    }
  }

  if (sweep_weights) {
    // Reward-weight sensitivity grid: six published configurations per map.
    static const double kWeights[6][3] = {{0.5, 0.5, 0.7}, {1.0, 0.3, 0.7},
                                          {1.0, 0.5, 0.5}, {1.0, 0.5, 0.7},
                                          {1.0, 0.7, 0.7}, {1.2, 0.5, 0.7}};
    int n_runs = runs_given ? runs : cfg.sweep.runs;
    std::ostringstream os;
    os << "map,psi1,psi2,psi3,algorithm,runs,coverage_mean,coverage_std,"
          "violations_mean,violations_std,energy_mean,energy_std,"
          "reward_mean,reward_std,failed_episodes\n";
    for (const auto& [tok, map] : maps) {
      for (const double* w : kWeights) {
        EnvConfig ec = cfg.env;
        ec.psi1 = w[0];
        ec.psi2 = w[1];
        ec.psi3 = w[2];
        AggregateStats agg = evaluate_planner(map, ec, cfg.planner, n_runs);
        os << map_label(tok) << "," << w[0] << "," << w[1] << "," << w[2]
           << "," << to_string(cfg.planner.algorithm) << "," << agg.runs
           << "," << csvnum(agg.coverage.mean) << ","
           << csvnum(agg.coverage.std) << "," << csvnum(agg.violations.mean)
           << "," << csvnum(agg.violations.std) << ","
           << csvnum(agg.energy.mean) << "," << csvnum(agg.energy.std) << ","
           << csvnum(agg.reward.mean) << "," << csvnum(agg.reward.std) << ","
           << agg.failed_episodes << "\n";
        std::cout << map_label(tok) << " psi=(" << w[0] << "," << w[1] << ","
                  << w[2] << "): coverage " << std::fixed
                  << std::setprecision(1) << agg.coverage.mean
                  << std::defaultfloat << "\n";
      }
    }
    write_file(out / "sweep.csv", os.str());
    std::cout << "wrote " << (out / "sweep.csv").string() << "\n";
    return 0;
  }

  std::ostringstream os;
  os << bench_csv_header() << "\n";
  for (size_t mi = 0; mi < maps.size(); ++mi) {
    const std::string& tok = maps[mi].first;
    const GridMap& map = maps[mi].second;
    for (const std::string& algo : algos) {
      AggregateStats agg;
      if (algo == "sac") {
        auto it = ckpt_by_map.find(tok);
        if (it == ckpt_by_map.end())
          throw std::invalid_argument("bench: no checkpoint for map '" + tok +
                                      "' (pass --checkpoint " + tok +
                                      "=<path>)");
        RunConfig rc = cfg;
        adopt_trunk_from_checkpoint(rc, it->second);
        SacAgent agent(map, rc.agent);
        agent.load(it->second);
        agent.rng() = Rng(mix_seed(cfg.planner.seed, 8800 + mi));
        Environment env(map, cfg.env);
        agg = aggregate(agent.evaluate(env, runs));
      } else {
        PlannerConfig pc = cfg.planner;
        pc.algorithm = planner_from_string(algo);
        agg = evaluate_planner(map, cfg.env, pc, runs);
      }
      os << bench_csv_row(map_label(tok), algo, agg) << "\n";
      std::cout << map_label(tok) << "/" << algo << ": coverage "
                << std::fixed << std::setprecision(1) << agg.coverage.mean
                << " +/- " << agg.coverage.std << ", violations "
                << agg.violations.mean << std::defaultfloat << "\n";
    }
  }
  write_file(out / "bench.csv", os.str());
  std::cout << "wrote " << (out / "bench.csv").string() << "\n";
  if (!curves.empty()) write_curves(out, curves);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverpath: energy-aware coverage path planning on grid maps"};
  app.require_subcommand(1);
  int rc = 0;

  // Shared option storage; each subcommand applies precedence
  // config file < --set overrides < dedicated flags.
  std::string config_file, set_template;
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file,
                    "Config file (key = value lines, dotted sections)");
    cmd->add_option("--set", sets,
                    "Inline config override, e.g. --set env.e_min=5");
  };
  auto apply_common = [&](RunConfig& cfg) {
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    for (const std::string& kv : sets) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got '" + kv +
                                    "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  };

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a grid map file");
  int gen_size = 15, gen_stations = 4, gen_builtin = 0;
  double gen_density = 0.10;
  std::string gen_layout = "strategic", gen_out = "map.map";
  uint64_t gen_seed = 0;
  gen->add_option("--size", gen_size, "Grid side length N");
  gen->add_option("--density", gen_density, "Obstacle fraction [0, 0.5]");
  gen->add_option("--stations", gen_stations, "Charging station count");
  gen->add_option("--layout", gen_layout,
                  "strategic | random | path_constrained | sparse");
  gen->add_option("--seed", gen_seed, "Generation seed");
  gen->add_option("--builtin", gen_builtin, "Copy builtin map 1, 2, or 3")
      ->check(CLI::Range(1, 3));
  gen->add_option("-o,--out", gen_out, "Output map file");
  add_common(gen);
  gen->callback([&] {
    RunConfig cfg = base_config();
    apply_common(cfg);
    if (gen->count("--size")) cfg.map.n = gen_size;
    if (gen->count("--density")) cfg.map.density = gen_density;
    if (gen->count("--stations")) cfg.map.stations = gen_stations;
    if (gen->count("--layout")) cfg.map.layout = layout_from_string(gen_layout);
    if (gen->count("--seed")) cfg.map.seed = gen_seed;
    rc = cmd_gen(cfg, gen_builtin, gen_out);
  });

  // train
  auto* train = app.add_subcommand("train", "Train the SAC agent on a map");
  std::string train_map, train_out = ".", train_resume;
  int train_episodes = 0, train_ckpt_every = 0;
  uint64_t train_seed = 0;
  train->add_option("--map", train_map, "Map file or builtin id (1|2|3)")
      ->required();
  train->add_option("--episodes", train_episodes, "Episodes to run")
      ->required();
  train->add_option("--seed", train_seed, "Training seed");
  train->add_option("--out", train_out, "Output directory");
  train->add_option("--resume", train_resume, "Checkpoint to continue from");
  train->add_option("--checkpoint-every", train_ckpt_every,
                    "Also snapshot every K episodes (0 = final only)");
  add_common(train);
  train->callback([&] {
    RunConfig cfg = base_config();
    apply_common(cfg);
    if (train->count("--seed")) cfg.agent.seed = train_seed;
    rc = cmd_train(cfg, train_map, train_episodes, train_out, train_resume,
                   train_ckpt_every);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Greedy rollouts from a checkpoint");
  std::string eval_ckpt, eval_map, eval_out = ".";
  int eval_runs = 20;
  uint64_t eval_seed = 0;
  eval->add_option("--checkpoint", eval_ckpt, "Agent checkpoint")->required();
  eval->add_option("--map", eval_map, "Map file or builtin id")->required();
  eval->add_option("--runs", eval_runs, "Independent rollouts");
  eval->add_option("--seed", eval_seed, "Reseed the rollout stream");
  eval->add_option("--out", eval_out, "Output directory");
  add_common(eval);
  eval->callback([&] {
    RunConfig cfg = base_config();
    apply_common(cfg);
    rc = cmd_eval(cfg, eval_ckpt, eval_map, eval_runs, eval_out,
                  eval->count("--seed") > 0, eval_seed);
  });

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Map x algorithm comparison grid (Table-4 style)");
  std::vector<std::string> bench_maps = {"1", "2", "3"};
  std::vector<std::string> bench_algos = {"rrt", "aco", "pso"};
  std::vector<std::string> bench_ckpts, bench_curves;
  std::string bench_out = "bench_out";
  int bench_runs = 20;
  uint64_t bench_seed = 0;
  bool bench_sweep = false;
  bench->add_option("--maps", bench_maps, "Map files or builtin ids")
      ->delimiter(',');
  bench->add_option("--algorithms", bench_algos,
                    "Any of rrt, aco, pso, sac")
      ->delimiter(',');
  bench->add_option("--runs", bench_runs, "Runs per cell");
  bench->add_option("--checkpoint", bench_ckpts,
                    "SAC checkpoint as <map>=<path>; repeatable");
  bench->add_option("--curves", bench_curves,
                    "Training CSVs to render as reward/coverage SVGs");
  bench->add_option("--seed", bench_seed, "Base seed for all cells");
  bench->add_flag("--sweep-weights", bench_sweep,
                  "Reward-weight sensitivity grid instead of the "
                  "algorithm grid");
  bench->add_option("--out", bench_out, "Output directory");
  add_common(bench);
  bench->callback([&] {
    RunConfig cfg = base_config();
    apply_common(cfg);
    if (bench->count("--seed")) cfg.planner.seed = bench_seed;
    rc = cmd_bench(cfg, bench_maps, bench_algos, bench_runs, bench_ckpts,
                   bench_curves, bench_sweep, bench_out,
                   bench->count("--runs") > 0);
  });

  // plot
  auto* plot = app.add_subcommand("plot", "Render training CSVs as SVGs");
  std::vector<std::string> plot_csvs;
  std::string plot_out = ".";
  plot->add_option("--csv", plot_csvs, "Training CSV files")->required();
  plot->add_option("--out", plot_out, "Output directory");
  plot->callback([&] {
    fs::create_directories(plot_out);
    write_curves(plot_out, plot_csvs);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
