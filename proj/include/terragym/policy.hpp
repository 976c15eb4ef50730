#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "terragym/mlp.hpp"
#include "terragym/observation.hpp"
#include "terragym/rng.hpp"
#include "terragym/robot.hpp"

namespace terragym {

struct PolicyConfig {
  bool use_tg = true;     // false: reactive policy, 12 joint targets
  bool use_lidar = true;  // false: blind policy, lidar slice ignored

  int lidar_channels = 16;
  int lidar_azimuth_bins = 64;

  std::vector<int> lidar_encoder = {32, 16, 4};
  std::vector<int> proprio_encoder = {32, 16, 4};
  std::vector<int> policy_trunk = {256, 128};
  std::vector<int> value_net = {512, 256};

  double log_std_init = -1.2;
  double log_std_min = -4.0;
  double log_std_max = 1.0;

  // Fixed input normalization constants.
  double goal_dist_scale = 10.0;
  double angular_velocity_scale = 0.3;

  ActionScaling action_scaling = ActionScaling::pmtg();

  int action_dim() const { return use_tg ? 3 + kNumJoints : kNumJoints; }
  int lidar_dim() const { return lidar_channels * lidar_azimuth_bins; }
  ObsLayout obs_layout() const { return ObsLayout{action_dim(), lidar_dim()}; }

  static PolicyConfig make(bool use_tg, bool use_lidar, const RobotModel& model,
                           int lidar_channels = 16, int lidar_azimuth_bins = 64);
};

// Twin-encoder Gaussian policy with a value head, parameters in one flat
// vector, exact reverse-mode gradients.
class PolicyNet {
 public:
  PolicyNet(const PolicyConfig& config, uint64_t init_seed);

  const PolicyConfig& config() const { return config_; }
  const ObsLayout& layout() const { return layout_; }
  int param_count() const { return static_cast<int>(params_.size()); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Layer width lists in serialization order (lidar encoder, proprio encoder,
  // trunk, value); the lidar entry is empty for blind policies.
  std::vector<std::vector<int>> layer_dims() const;

  struct Output {
    Eigen::VectorXd mean;     // tanh-squashed, in [-1, 1]^A
    Eigen::VectorXd log_std;  // clamped to [log_std_min, log_std_max]
    double value = 0.0;
  };
  Output forward(const Eigen::VectorXd& obs) const;

  void forward_batch(const Eigen::MatrixXd& obs_cols, Eigen::MatrixXd* mean,
                     Eigen::VectorXd* log_std, Eigen::VectorXd* value) const;
  Eigen::VectorXd values(const Eigen::MatrixXd& obs_cols) const;

  Eigen::VectorXd act_mean(const Eigen::VectorXd& obs) const;  // greedy, normalized space

  struct ActionSample {
    Eigen::VectorXd action;  // normalized space, unclamped
    double log_prob = 0.0;
  };
  ActionSample act_sample(const Eigen::VectorXd& obs, Rng& rng) const;

  struct PpoBatch {
    Eigen::MatrixXd obs;        // obs_dim x B
    Eigen::MatrixXd actions;    // A x B, normalized space
    Eigen::VectorXd old_log_prob;
    Eigen::VectorXd advantages;  // already normalized
    Eigen::VectorXd returns;
    double clip = 0.2;
    double value_coef = 0.5;
    double entropy_coef = 1e-3;
  };
  struct LossStats {
    double total = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
  };
  // Loss and, when grad != nullptr, d(loss)/d(params) accumulated into grad
  // (grad is zeroed first).
  LossStats ppo_loss(const PpoBatch& batch, std::vector<double>* grad) const;

 private:
  struct BatchInputs {
    Eigen::MatrixXd lidar;    // lidar_dim x B (empty when blind)
    Eigen::MatrixXd proprio;  // proprio_dim x B
    Eigen::MatrixXd goal;     // 2 x B
  };
  BatchInputs assemble_inputs(const Eigen::MatrixXd& obs_cols) const;

  struct ForwardCache {
    BatchInputs inputs;
    MlpLayout::Cache lidar_cache, proprio_cache, trunk_cache, value_cache;
    Eigen::MatrixXd feature;   // feature_dim x B
    Eigen::MatrixXd raw_mean;  // A x B, pre-tanh
    Eigen::MatrixXd mean;      // tanh(raw)
    Eigen::VectorXd value;
  };
  void forward_internal(const Eigen::MatrixXd& obs_cols, ForwardCache* cache,
                        bool with_value = true) const;
  Eigen::VectorXd clamped_log_std() const;
  int feature_dim() const;

  PolicyConfig config_;
  ObsLayout layout_;
  MlpLayout lidar_enc_, proprio_enc_, trunk_, value_;
  int log_std_offset_ = 0;
  std::vector<double> params_;
};

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action);
double gaussian_entropy(const Eigen::VectorXd& log_std);

}  // namespace terragym
