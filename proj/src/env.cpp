#include "terragym/env.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace terragym {

double task_completion_rate(double initial_distance, double final_distance) {
  if (!(initial_distance > 0.0)) {
    throw std::invalid_argument("task_completion_rate: initial distance must be positive");
  }
  return 1.0 - final_distance / initial_distance;
}

Env::Env(const EnvConfig& config) : config_(config), layout_(config.obs_layout()) {
  if (!config_.robot.valid()) throw std::invalid_argument("env: invalid robot model");
  if (!config_.lidar.valid()) throw std::invalid_argument("env: invalid lidar config");
  if (config_.episode.max_steps < 1 || config_.episode.action_repeat < 1 ||
      !(config_.episode.control_dt > 0.0) || !(config_.episode.success_radius > 0.0)) {
    throw std::invalid_argument("env: invalid episode config");
  }
}

Eigen::VectorXd Env::reset(const TaskDistribution& dist, uint64_t seed) {
  const TaskSpec task = sample_task(dist, Rng::derive(seed, 1));
  terrain_ = generate(task, config_.episode.grid_rows, config_.episode.grid_cols);
  start_episode(Rng::derive(seed, 2));
  return assemble_observation();
}

Eigen::VectorXd Env::reset_task(const TaskSpec& spec, uint64_t seed) {
  terrain_ = generate(spec, config_.episode.grid_rows, config_.episode.grid_cols);
  start_episode(Rng::derive(seed, 2));
  return assemble_observation();
}

void Env::start_episode(uint64_t placement_seed) {
  Rng place(placement_seed);
  noise_rng_ = Rng(Rng::derive(placement_seed, 3));

  // Start column: centered, resampled if the cell is a hole or gap.
  const double start_x = terrain_.origin.x() + config_.episode.start_x;
  double start_y = terrain_.origin.y() + 0.5 * terrain_.extent_y();
  bool placed = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (terrain_.height_at(start_x, start_y) > -0.1) {
      placed = true;
      break;
    }
    start_y = terrain_.origin.y() + place.uniform(2.0 * terrain_.cell_width,
                                                  terrain_.extent_y() - 2.0 * terrain_.cell_width);
  }
  if (!placed) throw std::runtime_error("env reset: no solid start cell after 100 tries");

  const double ground = terrain_.height_at(start_x, start_y);
  state_ = RobotState{};
  state_.position = Eigen::Vector3d(start_x, start_y, ground + config_.robot.nominal_stance_depth);
  state_.orientation = Eigen::Quaterniond::Identity();  // facing +x, toward the goal
  state_.joint_positions = config_.robot.nominal_joint_angles();

  if (config_.episode.use_fixed_goal) {
    goal_ = config_.episode.fixed_goal;
  } else {
    double gx = start_x + place.uniform(config_.episode.goal_distance_min,
                                        config_.episode.goal_distance_max);
    gx = std::min(gx, terrain_.origin.x() + terrain_.extent_x() - 2.0 * terrain_.cell_length);
    const double gy = start_y;
    goal_ = Eigen::Vector3d(gx, gy, terrain_.height_at(gx, gy));
  }

  tg_state_ = TGState{};
  tg_params_ = TGParams{};
  tg_params_.frequency = 0.5 * TGParams::kMaxFrequency;
  tg_params_.swing_height = 0.5 * TGParams::kMaxSwingHeight;
  tg_params_.stride = 0.0;

  const ActionScaling scaling = config_.use_tg ? ActionScaling::pmtg(config_.residual_bound)
                                               : ActionScaling::reactive(config_.robot);
  prev_action_ = scaling.to_physical(Eigen::VectorXd::Zero(config_.action_dim()));

  goal_distance_ = (goal_ - state_.position).norm();
  info_ = StepInfo{};
  info_.goal_distance = goal_distance_;
  info_.initial_goal_distance = goal_distance_;
  done_ = false;
}

Env::StepResult Env::step(const Eigen::VectorXd& action) {
  if (done_) throw std::logic_error("env: step() called after the episode ended");
  if (action.size() != config_.action_dim()) {
    throw std::invalid_argument("env: action dimension mismatch");
  }

  Vector12 target_q;
  Eigen::VectorXd executed(action.size());
  if (config_.use_tg) {
    TGParams params;
    params.frequency = action[0];
    params.swing_height = action[1];
    params.stride = action[2];
    tg_params_ = params.clamped();
    Vector12 residual = action.tail(kNumJoints)
                            .cwiseMax(-config_.residual_bound)
                            .cwiseMin(config_.residual_bound);
    tg_state_ = advance(tg_state_, tg_params_, config_.episode.control_dt);
    target_q = compose_action(foot_targets(tg_state_, tg_params_, config_.robot), residual,
                              config_.robot);
    executed << tg_params_.frequency, tg_params_.swing_height, tg_params_.stride, residual;
  } else {
    target_q = Vector12(action).cwiseMax(config_.robot.joint_lower)
                   .cwiseMin(config_.robot.joint_upper);
    executed = target_q;
  }
  prev_action_ = executed;

  const double g_prev = goal_distance_;
  bool fault = false;
  for (int k = 0; k < config_.episode.action_repeat; ++k) {
    state_ = step_lowlevel(config_.robot, state_, target_q, terrain_, config_.contact,
                           config_.episode.physics_dt());
    if (!state_is_finite(state_)) {
      fault = true;
      break;
    }
  }

  goal_distance_ = fault ? g_prev : (goal_ - state_.position).norm();
  const double reward = (g_prev - goal_distance_) / config_.episode.control_dt;

  info_.steps += 1;
  info_.reward_sum += reward;
  info_.goal_distance = goal_distance_;
  info_.fault = fault;
  info_.success = !fault && goal_distance_ <= config_.episode.success_radius;
  info_.fallen = !fault && !info_.success && is_fallen(config_.robot, state_, terrain_);
  info_.timeout = !fault && !info_.success && !info_.fallen &&
                  info_.steps >= config_.episode.max_steps;
  info_.tcr = task_completion_rate(info_.initial_goal_distance, goal_distance_);
  done_ = info_.success || info_.fallen || info_.timeout || info_.fault;

  StepResult result;
  result.reward = reward;
  result.done = done_;
  result.info = info_;
  result.obs = fault ? Eigen::VectorXd::Zero(layout_.total_dim()).eval() : assemble_observation();

  if (trace_) {
    nlohmann::json rec;
    rec["t"] = state_.time;
    rec["pos"] = {state_.position.x(), state_.position.y(), state_.position.z()};
    rec["quat"] = {state_.orientation.w(), state_.orientation.x(), state_.orientation.y(),
                   state_.orientation.z()};
    rec["q"] = std::vector<double>(state_.joint_positions.data(),
                                   state_.joint_positions.data() + kNumJoints);
    rec["target_q"] = std::vector<double>(target_q.data(), target_q.data() + kNumJoints);
    rec["reward"] = reward;
    rec["goal_dist"] = goal_distance_;
    (*trace_) << rec.dump() << '\n';
  }
  return result;
}

Eigen::VectorXd Env::assemble_observation() {
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(layout_.total_dim());
  obs.segment(layout_.prev_action_offset(), config_.action_dim()) = prev_action_;

  if (config_.use_lidar) {
    const Eigen::Vector3d sensor_pos =
        state_.position + state_.orientation * config_.lidar.mount_offset;
    const LidarScan scan = raycast_scan(config_.lidar, sensor_pos, state_.orientation, terrain_,
                                        noise_rng_.next_u64());
    obs.segment(layout_.lidar_offset(), layout_.lidar_dim) = scan.normalized;
  }

  const ProprioReading prop =
      proprioception(state_, config_.proprio_noise_sigma, noise_rng_.next_u64());
  obs.segment<3>(layout_.angular_velocity_offset()) = prop.angular_velocity;
  obs.segment<kNumJoints>(layout_.joint_offset()) = prop.joint_positions;
  obs[layout_.roll_pitch_offset()] = prop.roll;
  obs[layout_.roll_pitch_offset() + 1] = prop.pitch;

  obs[layout_.tg_offset()] = std::sin(tg_state_.phase);
  obs[layout_.tg_offset() + 1] = std::cos(tg_state_.phase);
  obs[layout_.tg_offset() + 2] = tg_params_.frequency;
  obs[layout_.tg_offset() + 3] = tg_params_.swing_height;
  obs[layout_.tg_offset() + 4] = tg_params_.stride;

  const GoalReading goal = goal_sensor(state_, goal_);
  obs[layout_.goal_dist_offset()] = goal.distance;
  obs[layout_.goal_heading_offset()] = goal.heading;
  return obs;
}

}  // namespace terragym
