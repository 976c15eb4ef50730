#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "terragym/checkpoint.hpp"
#include "terragym/rollout.hpp"

namespace terragym {

enum class Schedule { kMultitask, kSequential };

struct IterationMetrics {
  long iteration = 0;
  long env_steps = 0;
  double mean_return = 0.0;
  double mean_tcr = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl = 0.0;
  int episode_count = 0;
  int fault_count = 0;
};

struct TrainSetup {
  EnvConfig env;
  TaskDistribution tasks;
  PpoConfig ppo;
  Schedule schedule = Schedule::kMultitask;
  long switch_every = 0;  // sequential mode; 0 = budget / (tasks * 3)
  uint64_t seed = 1;

  std::string out_dir;          // empty: nothing written
  std::string resume_from;      // checkpoint path, optional

  // Invoked after each iteration; returning true stops training early.
  std::function<bool(const PolicyNet&, const IterationMetrics&)> stop_callback;
};

struct TrainResult {
  std::vector<IterationMetrics> metrics;
  long iterations = 0;
  long env_steps = 0;
  std::string final_checkpoint;  // path, when out_dir set
};

// Synchronous PPO: alternate deterministic parallel rollouts and updates
// until the step budget. Writes metrics.jsonl and periodic checkpoints when
// out_dir is set. Bit-reproducible for a fixed setup.
TrainResult train(const TrainSetup& setup);

// The policy a fresh run of `setup` would start from (used by budget-0 paths
// and tests).
PolicyNet make_initial_policy(const TrainSetup& setup);

}  // namespace terragym
