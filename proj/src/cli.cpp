#include "terragym/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "terragym/config.hpp"

namespace terragym::cli {

namespace {

TaskSpec spec_from_cli(const std::string& type, const std::vector<std::string>& params,
                       uint64_t seed) {
  TaskSpec spec;
  spec.type = terrain_type_from_name(type);
  spec.seed = seed;
  for (const std::string& p : params) {
    const size_t eq = p.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("malformed --param '" + p + "' (expected name=value or name=lo:hi)");
    }
    spec.bounds[p.substr(0, eq)] = parse_interval(p.substr(eq + 1));
  }
  spec.validate();
  return spec;
}

int cmd_gen_terrain(const std::string& type, const std::vector<std::string>& params, int rows,
                    int cols, uint64_t seed, const std::string& out_path, bool binary,
                    std::ostream& out) {
  const TaskSpec spec = spec_from_cli(type, params, seed);
  const Heightfield field = generate(spec, rows, cols);
  if (binary) {
    field.save_binary(out_path);
  } else {
    field.save_text(out_path);
  }
  out << "wrote " << out_path << " (" << rows << "x" << cols << " " << type << ")\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out_override,
              const std::string& resume, std::ostream& out) {
  RunConfig rc = RunConfig::from_file(config_path);
  if (rc.tasks.entries.empty()) throw ConfigError("config has no [task ...] sections");
  TrainSetup setup = rc.train_setup();
  if (!out_override.empty()) setup.out_dir = out_override;
  setup.resume_from = resume;
  const TrainResult result = train(setup);
  out << "trained " << result.iterations << " iterations, " << result.env_steps
      << " env steps; final checkpoint: " << result.final_checkpoint << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& suite_path, int episodes,
             uint64_t seed, const std::string& csv_path, std::ostream& out) {
  const RunConfig rc = RunConfig::from_file(suite_path);
  if (rc.eval_suite.empty()) throw ConfigError("suite config has no [eval ...] sections");
  const LoadedCheckpoint loaded = load_checkpoint(checkpoint_path, rc.env.robot);

  EnvConfig env_cfg = rc.env;
  env_cfg.use_tg = loaded.policy->config().use_tg;
  env_cfg.use_lidar = loaded.policy->config().use_lidar;
  if (loaded.policy->layout() != env_cfg.obs_layout()) {
    throw CheckpointError("checkpoint observation layout does not match the suite config");
  }

  const EvalReport report = run_eval(*loaded.policy, env_cfg, rc.eval_suite, episodes, seed);
  out << report.to_table();
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write csv: " + csv_path);
    report.write_csv(csv);
    out << "wrote " << csv_path << "\n";
  }
  return kExitOk;
}

struct VariantResult {
  std::string name;
  EvalReport report;
};

int cmd_ablate(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  const RunConfig rc = RunConfig::from_file(config_path);
  if (rc.tasks.entries.empty()) throw ConfigError("config has no [task ...] sections");
  if (rc.eval_suite.empty()) throw ConfigError("config has no [eval ...] sections");
  std::filesystem::create_directories(out_dir);

  struct Variant {
    const char* name;
    bool use_tg;
    bool use_lidar;
    Schedule schedule;
  };
  const Variant variants[] = {
      {"full", true, true, Schedule::kMultitask},
      {"reactive", false, true, Schedule::kMultitask},
      {"blind", true, false, Schedule::kMultitask},
      {"sequential", true, true, Schedule::kSequential},
  };

  std::vector<VariantResult> results;
  for (const Variant& v : variants) {
    TrainSetup setup = rc.train_setup();
    setup.env.use_tg = v.use_tg;
    setup.env.use_lidar = v.use_lidar;
    setup.schedule = v.schedule;
    setup.out_dir = (std::filesystem::path(out_dir) / v.name).string();
    out << "training variant '" << v.name << "'...\n";
    const TrainResult tr = train(setup);
    const LoadedCheckpoint loaded = load_checkpoint(tr.final_checkpoint, setup.env.robot);
    EnvConfig eval_env = setup.env;
    results.push_back({v.name, run_eval(*loaded.policy, eval_env, rc.eval_suite,
                                        rc.eval_episodes, rc.seed)});
  }

  // Combined table: one row per variant, one column per eval terrain, plus
  // the relative gap of the full configuration over each variant.
  out << std::left << std::setw(12) << "variant";
  for (const auto& cell : results[0].report.cells) {
    out << std::right << std::setw(12) << cell.terrain;
  }
  out << std::right << std::setw(12) << "mean" << std::setw(14) << "full_vs_%" << "\n";
  const double full_mean = results[0].report.overall_mean_tcr;
  out << std::fixed << std::setprecision(3);
  for (const auto& r : results) {
    out << std::left << std::setw(12) << r.name;
    for (const auto& cell : r.report.cells) out << std::right << std::setw(12) << cell.mean_tcr;
    out << std::right << std::setw(12) << r.report.overall_mean_tcr;
    const double variant_mean = r.report.overall_mean_tcr;
    const double rel = std::abs(variant_mean) > 1e-12
                           ? (full_mean - variant_mean) / variant_mean * 100.0
                           : 0.0;
    out << std::setw(14) << rel << "\n";
  }

  std::ofstream csv((std::filesystem::path(out_dir) / "ablation.csv").string());
  csv << "variant,terrain,mean_tcr,std_tcr,success_rate,episodes\n";
  csv << std::setprecision(17);
  for (const auto& r : results) {
    for (const auto& cell : r.report.cells) {
      csv << r.name << ',' << cell.terrain << ',' << cell.mean_tcr << ',' << cell.std_tcr << ','
          << cell.success_rate << ',' << cell.episodes << '\n';
    }
  }
  return kExitOk;
}

int cmd_replay(const std::string& checkpoint_path, const std::string& config_path,
               const std::string& type, const std::vector<std::string>& params, uint64_t seed,
               const std::string& out_path, std::ostream& out) {
  RunConfig rc;
  if (!config_path.empty()) rc = RunConfig::from_file(config_path);
  const TaskSpec spec = spec_from_cli(type, params, Rng::derive(seed, 5));
  const LoadedCheckpoint loaded = load_checkpoint(checkpoint_path, rc.env.robot);

  EnvConfig env_cfg = rc.env;
  env_cfg.use_tg = loaded.policy->config().use_tg;
  env_cfg.use_lidar = loaded.policy->config().use_lidar;
  if (loaded.policy->layout() != env_cfg.obs_layout()) {
    throw CheckpointError("checkpoint observation layout does not match the config");
  }

  std::ofstream trace(out_path);
  if (!trace) throw std::runtime_error("cannot write trace: " + out_path);
  Env env(env_cfg);
  env.set_trace(&trace);
  Eigen::VectorXd obs = env.reset_task(spec, seed);
  const ActionScaling& scaling = loaded.policy->config().action_scaling;
  while (!env.episode_done()) {
    const Eigen::VectorXd action =
        scaling.to_physical(loaded.policy->act_mean(obs).cwiseMax(-1.0).cwiseMin(1.0));
    obs = env.step(action).obs;
  }
  out << "episode finished: steps=" << env.info().steps << " tcr=" << env.info().tcr
      << " success=" << (env.info().success ? 1 : 0) << "; trace: " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"terragym: multi-task quadruped locomotion over procedural terrains"};
  app.require_subcommand(1);

  // gen-terrain
  auto* gen = app.add_subcommand("gen-terrain", "Generate a heightfield file");
  std::string gen_type;
  std::vector<std::string> gen_params;
  int gen_rows = 64, gen_cols = 64;
  uint64_t gen_seed = 0;
  std::string gen_out = "terrain.hf";
  bool gen_binary = false;
  gen->add_option("--type", gen_type, "terrain type")->required();
  gen->add_option("--param", gen_params, "parameter name=value or name=lo:hi");
  gen->add_option("--rows", gen_rows, "grid rows");
  gen->add_option("--cols", gen_cols, "grid cols");
  gen->add_option("--seed", gen_seed, "sampling seed");
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_flag("--binary", gen_binary, "write the binary variant");

  // train
  auto* tr = app.add_subcommand("train", "Train a policy from a run config");
  std::string tr_config, tr_out, tr_resume;
  tr->add_option("--config", tr_config, "run config (ini)")->required();
  tr->add_option("--out", tr_out, "output directory override");
  tr->add_option("--resume", tr_resume, "checkpoint to resume from");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a suite");
  std::string ev_ckpt, ev_suite, ev_csv;
  int ev_episodes = 20;
  uint64_t ev_seed = 3;
  ev->add_option("--checkpoint", ev_ckpt, "checkpoint path")->required();
  ev->add_option("--suite", ev_suite, "suite config (ini with [eval ...] sections)")->required();
  ev->add_option("--episodes", ev_episodes, "episodes per terrain");
  ev->add_option("--seed", ev_seed, "evaluation seed");
  ev->add_option("--csv", ev_csv, "per-episode csv output path");

  // ablate
  auto* ab = app.add_subcommand("ablate", "Train and compare the four configurations");
  std::string ab_config, ab_out;
  ab->add_option("--config", ab_config, "run config (ini)")->required();
  ab->add_option("--out", ab_out, "output directory")->required();

  // replay
  auto* rp = app.add_subcommand("replay", "Dump one greedy episode as JSONL");
  std::string rp_ckpt, rp_config, rp_type, rp_out = "trace.jsonl";
  std::vector<std::string> rp_params;
  uint64_t rp_seed = 0;
  rp->add_option("--checkpoint", rp_ckpt, "checkpoint path")->required();
  rp->add_option("--config", rp_config, "run config for env settings (optional)");
  rp->add_option("--type", rp_type, "terrain type")->required();
  rp->add_option("--param", rp_params, "parameter name=value or name=lo:hi");
  rp->add_option("--seed", rp_seed, "episode seed");
  rp->add_option("--out", rp_out, "trace output path");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_terrain(gen_type, gen_params, gen_rows, gen_cols, gen_seed, gen_out,
                             gen_binary, out);
    }
    if (tr->parsed()) return cmd_train(tr_config, tr_out, tr_resume, out);
    if (ev->parsed()) return cmd_eval(ev_ckpt, ev_suite, ev_episodes, ev_seed, ev_csv, out);
    if (ab->parsed()) return cmd_ablate(ab_config, ab_out, out);
    if (rp->parsed()) {
      return cmd_replay(rp_ckpt, rp_config, rp_type, rp_params, rp_seed, rp_out, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFault;
  }
  return kExitUsage;
}

}  // namespace terragym::cli
