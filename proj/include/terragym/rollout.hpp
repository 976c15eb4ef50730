#pragma once

#include <functional>
#include <memory>

#include "terragym/env.hpp"
#include "terragym/ppo.hpp"

namespace terragym {

// Minimal environment surface the rollout machinery needs; lets tests inject
// scripted doubles.
class RolloutEnv {
 public:
  virtual ~RolloutEnv() = default;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  // Starts a fresh episode (task sampling included) and returns the first
  // observation.
  virtual Eigen::VectorXd reset(uint64_t seed) = 0;

  struct Step {
    Eigen::VectorXd obs;
    double reward = 0.0;
    bool done = false;
    bool success = false;
    double tcr = 0.0;
  };
  virtual Step step(const Eigen::VectorXd& physical_action) = 0;
};

// Real environment bound to a task source: either a distribution (a new task
// per episode) or one fixed spec whose terrain seed is refreshed per episode.
class TaskEnv : public RolloutEnv {
 public:
  TaskEnv(const EnvConfig& config, TaskDistribution dist);
  TaskEnv(const EnvConfig& config, TaskSpec fixed_task);

  int obs_dim() const override { return env_.obs_dim(); }
  int action_dim() const override { return env_.action_dim(); }
  Eigen::VectorXd reset(uint64_t seed) override;
  Step step(const Eigen::VectorXd& physical_action) override;

  Env& env() { return env_; }
  const TaskSpec& current_task() const { return current_; }

 private:
  Env env_;
  bool fixed_ = false;
  TaskDistribution dist_;
  TaskSpec fixed_task_;
  TaskSpec current_;
};

using EnvFactory = std::function<std::unique_ptr<RolloutEnv>(int worker_index)>;

struct RolloutConfig {
  int workers = 8;
  int horizon = 512;
  uint64_t seed = 0;       // worker w uses seed + w
  double reward_scale = 1.0;
  double gamma = 0.99;
  double lam = 0.95;
  int max_threads = 0;     // 0: hardware limit (capped by TERRAGYM_THREADS)
};

// Runs `workers` deterministic rollout segments of `horizon` control steps,
// each on its own environment, and assembles the training batch (values,
// GAE). The result is independent of how segments are scheduled onto
// threads. A worker that throws has its segment discarded and counted in
// fault_count.
TrajectoryBatch collect_rollouts(const PolicyNet& policy, const EnvFactory& factory,
                                 const RolloutConfig& config);

// Effective thread budget: min(requested or hardware, TERRAGYM_THREADS).
int worker_thread_budget(int requested);

}  // namespace terragym
