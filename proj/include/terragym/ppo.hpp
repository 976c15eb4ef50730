#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "terragym/policy.hpp"
#include "terragym/rng.hpp"

namespace terragym {

struct PpoConfig {
  double gamma = 0.99;
  double lam = 0.95;
  double clip = 0.2;
  int epochs = 4;
  int minibatch_size = 512;
  double learning_rate = 3e-4;
  double entropy_coef = 1e-3;
  double value_coef = 0.5;
  int workers = 8;
  int horizon = 512;          // control steps per worker per iteration
  long total_env_steps = 2000000;
  double reward_scale = 0.1;  // fixed scaling of training rewards
  int checkpoint_every = 50;  // iterations
  int max_threads = 0;        // 0: hardware limit (capped by TERRAGYM_THREADS)

  void validate() const;
};

// Rollout storage across workers; columns are steps ordered by worker index.
struct TrajectoryBatch {
  Eigen::MatrixXd obs;          // obs_dim x B
  Eigen::MatrixXd actions;      // A x B, in the policy's normalized space
  Eigen::VectorXd log_probs;    // B
  Eigen::VectorXd rewards;      // B, scaled for training
  Eigen::VectorXd values;       // B
  std::vector<uint8_t> dones;   // B
  Eigen::VectorXd advantages;   // B, filled by GAE
  Eigen::VectorXd returns;      // B

  struct EpisodeStat {
    double return_sum = 0.0;  // unscaled env reward sum up to end or truncation
    double tcr = 0.0;
    bool success = false;
    bool completed = false;  // reached a terminal state inside the batch
    int steps = 0;
  };
  std::vector<EpisodeStat> episodes;
  int fault_count = 0;

  long size() const { return obs.cols(); }
};

// In-place batch advantage normalization (mean 0, std 1). No-op for size < 2.
void normalize_advantages(Eigen::VectorXd& advantages);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(int n = 0) { resize(n); }
  void resize(int n) {
    m = Eigen::VectorXd::Zero(n);
    v = Eigen::VectorXd::Zero(n);
    t = 0;
  }
  void apply(std::vector<double>& params, const std::vector<double>& grad, double lr);
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  bool fault = false;  // non-finite loss encountered; update aborted
};

// Clipped-surrogate PPO over shuffled minibatches; advantages are normalized
// across the whole batch first.
UpdateStats ppo_update(PolicyNet& policy, AdamState& adam, TrajectoryBatch& batch,
                       const PpoConfig& config, Rng& rng);

}  // namespace terragym
