#pragma once

#include <memory>
#include <ostream>

#include "terragym/observation.hpp"
#include "terragym/physics.hpp"
#include "terragym/pmtg.hpp"
#include "terragym/sensors.hpp"
#include "terragym/terrain.hpp"

namespace terragym {

struct EpisodeConfig {
  double control_dt = 0.01;  // seconds between policy decisions
  int action_repeat = 10;    // low-level steps per decision (physics at 1 kHz)
  int max_steps = 1000;      // control steps before timeout
  double success_radius = 0.5;

  // Start/goal placement: start near the low-x edge, goal along +x.
  double start_x = 2.0;
  double goal_distance_min = 6.0;
  double goal_distance_max = 10.0;
  bool use_fixed_goal = false;
  Eigen::Vector3d fixed_goal = Eigen::Vector3d::Zero();

  int grid_rows = 64;
  int grid_cols = 64;

  double physics_dt() const { return control_dt / action_repeat; }
};

struct EnvConfig {
  RobotModel robot;
  ContactParams contact;
  LidarConfig lidar;
  EpisodeConfig episode;
  bool use_tg = true;     // false: actions are 12 joint targets
  bool use_lidar = true;  // false: lidar slice zeroed, rays not cast
  double residual_bound = 0.4;
  double proprio_noise_sigma = 0.0;

  int action_dim() const { return use_tg ? 3 + kNumJoints : kNumJoints; }
  ObsLayout obs_layout() const { return ObsLayout{action_dim(), lidar.beam_count()}; }
};

struct StepInfo {
  bool success = false;
  bool fallen = false;
  bool timeout = false;
  bool fault = false;
  int steps = 0;
  double goal_distance = 0.0;
  double initial_goal_distance = 0.0;
  double reward_sum = 0.0;
  double tcr = 0.0;
};

// 1 - final/initial goal distance. 1 means the goal was reached.
double task_completion_rate(double initial_distance, double final_distance);

// The multi-task episode: terrain sampling, observation assembly, progress
// reward, termination.
class Env {
 public:
  explicit Env(const EnvConfig& config);

  int obs_dim() const { return layout_.total_dim(); }
  int action_dim() const { return config_.action_dim(); }
  const EnvConfig& config() const { return config_; }

  // Start an episode on a task drawn from the distribution.
  Eigen::VectorXd reset(const TaskDistribution& dist, uint64_t seed);
  // Start an episode on a fixed task (terrain from spec.seed, placement from seed).
  Eigen::VectorXd reset_task(const TaskSpec& spec, uint64_t seed);

  struct StepResult {
    Eigen::VectorXd obs;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
  };
  // Physical action: (f, swing height, stride, 12 residuals) in PMTG mode,
  // 12 joint targets in reactive mode. Throws if the episode is over.
  StepResult step(const Eigen::VectorXd& action);

  bool episode_done() const { return done_; }
  const StepInfo& info() const { return info_; }
  const Heightfield& terrain() const { return terrain_; }
  const RobotState& state() const { return state_; }
  const Eigen::Vector3d& goal() const { return goal_; }

  // Optional JSONL trace, one record per control step.
  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  Eigen::VectorXd assemble_observation();
  void start_episode(uint64_t placement_seed);

  EnvConfig config_;
  ObsLayout layout_;
  Heightfield terrain_;
  RobotState state_;
  Eigen::Vector3d goal_ = Eigen::Vector3d::Zero();
  TGState tg_state_;
  TGParams tg_params_;
  Eigen::VectorXd prev_action_;  // physical units, as executed
  Rng noise_rng_{0};
  double goal_distance_ = 0.0;
  StepInfo info_;
  bool done_ = true;
  std::ostream* trace_ = nullptr;
};

}  // namespace terragym
