#include "terragym/trainer.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace terragym {

namespace {

PolicyConfig policy_config_for(const TrainSetup& setup) {
  return PolicyConfig::make(setup.env.use_tg, setup.env.use_lidar, setup.env.robot,
                            setup.env.lidar.channels, setup.env.lidar.azimuth_bins);
}

std::string checkpoint_name(const std::string& dir, long iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ckpt_%06ld.ckpt", iteration);
  return (std::filesystem::path(dir) / buf).string();
}

void write_metrics_line(std::ofstream& out, const IterationMetrics& m) {
  nlohmann::json rec;
  rec["iter"] = m.iteration;
  rec["env_steps"] = m.env_steps;
  rec["mean_return"] = m.mean_return;
  rec["mean_tcr"] = m.mean_tcr;
  rec["policy_loss"] = m.policy_loss;
  rec["value_loss"] = m.value_loss;
  rec["entropy"] = m.entropy;
  rec["kl"] = m.kl;
  rec["episodes"] = m.episode_count;
  rec["faults"] = m.fault_count;
  out << rec.dump() << '\n';
  out.flush();
}

}  // namespace

PolicyNet make_initial_policy(const TrainSetup& setup) {
  return PolicyNet(policy_config_for(setup), Rng::derive(setup.seed, 100));
}

TrainResult train(const TrainSetup& setup) {
  setup.ppo.validate();
  setup.tasks.validate();

  PolicyNet policy = make_initial_policy(setup);
  AdamState adam(policy.param_count());
  Rng trainer_rng(Rng::derive(setup.seed, 200));
  long iteration = 0;
  long env_steps = 0;

  if (!setup.resume_from.empty()) {
    LoadedCheckpoint loaded = load_checkpoint(setup.resume_from, setup.env.robot);
    if (loaded.policy->layout() != policy.layout()) {
      throw CheckpointError("resume checkpoint does not match the run configuration");
    }
    policy.params() = loaded.policy->params();
    adam = loaded.adam;
    trainer_rng.set_state(loaded.rng_state);
    iteration = static_cast<long>(loaded.iteration);
    env_steps = static_cast<long>(loaded.env_steps);
  }

  const bool writing = !setup.out_dir.empty();
  std::ofstream metrics_out;
  if (writing) {
    std::filesystem::create_directories(setup.out_dir);
    const auto mode = setup.resume_from.empty() ? std::ios::out : std::ios::app;
    metrics_out.open((std::filesystem::path(setup.out_dir) / "metrics.jsonl").string(), mode);
    if (iteration == 0) {
      save_checkpoint(checkpoint_name(setup.out_dir, 0), policy, adam, trainer_rng.state(), 0, 0);
    }
  }

  long switch_every = setup.switch_every;
  if (setup.schedule == Schedule::kSequential && switch_every <= 0) {
    const long tasks = static_cast<long>(setup.tasks.entries.size());
    switch_every = std::max<long>(1, setup.ppo.total_env_steps / (tasks * 3));
  }

  TrainResult result;
  while (env_steps < setup.ppo.total_env_steps) {
    RolloutConfig rc;
    rc.workers = setup.ppo.workers;
    rc.horizon = setup.ppo.horizon;
    rc.seed = trainer_rng.next_u64();
    rc.reward_scale = setup.ppo.reward_scale;
    rc.gamma = setup.ppo.gamma;
    rc.lam = setup.ppo.lam;
    rc.max_threads = setup.ppo.max_threads;

    EnvFactory factory;
    if (setup.schedule == Schedule::kSequential) {
      const size_t task_index =
          static_cast<size_t>((env_steps / switch_every) %
                              static_cast<long>(setup.tasks.entries.size()));
      const TaskSpec task = setup.tasks.entries[task_index].spec;
      factory = [&, task](int) { return std::make_unique<TaskEnv>(setup.env, task); };
    } else {
      factory = [&](int) { return std::make_unique<TaskEnv>(setup.env, setup.tasks); };
    }

    TrajectoryBatch batch = collect_rollouts(policy, factory, rc);
    if (batch.size() == 0) {
      throw std::runtime_error("training aborted: every rollout worker faulted");
    }
    const UpdateStats stats = ppo_update(policy, adam, batch, setup.ppo, trainer_rng);
    if (stats.fault) {
      throw std::runtime_error("training aborted: non-finite PPO loss");
    }

    env_steps += batch.size();
    iteration += 1;

    IterationMetrics m;
    m.iteration = iteration;
    m.env_steps = env_steps;
    m.policy_loss = stats.policy_loss;
    m.value_loss = stats.value_loss;
    m.entropy = stats.entropy;
    m.kl = stats.approx_kl;
    m.fault_count = batch.fault_count;
    m.episode_count = static_cast<int>(batch.episodes.size());
    if (!batch.episodes.empty()) {
      for (const auto& ep : batch.episodes) {
        m.mean_return += ep.return_sum;
        m.mean_tcr += ep.tcr;
      }
      m.mean_return /= static_cast<double>(batch.episodes.size());
      m.mean_tcr /= static_cast<double>(batch.episodes.size());
    }
    result.metrics.push_back(m);
    if (writing) {
      write_metrics_line(metrics_out, m);
      if (setup.ppo.checkpoint_every > 0 && iteration % setup.ppo.checkpoint_every == 0) {
        save_checkpoint(checkpoint_name(setup.out_dir, iteration), policy, adam,
                        trainer_rng.state(), static_cast<uint64_t>(iteration),
                        static_cast<uint64_t>(env_steps));
      }
    }
    if (setup.stop_callback && setup.stop_callback(policy, m)) break;
  }

  result.iterations = iteration;
  result.env_steps = env_steps;
  if (writing) {
    result.final_checkpoint = (std::filesystem::path(setup.out_dir) / "final.ckpt").string();
    save_checkpoint(result.final_checkpoint, policy, adam, trainer_rng.state(),
                    static_cast<uint64_t>(iteration), static_cast<uint64_t>(env_steps));
  }
  return result;
}

}  // namespace terragym
