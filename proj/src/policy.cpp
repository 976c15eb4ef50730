#include "terragym/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "terragym/pmtg.hpp"

namespace terragym {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

PolicyConfig PolicyConfig::make(bool use_tg, bool use_lidar, const RobotModel& model,
                                int lidar_channels, int lidar_azimuth_bins) {
  PolicyConfig cfg;
  cfg.use_tg = use_tg;
  cfg.use_lidar = use_lidar;
  cfg.lidar_channels = lidar_channels;
  cfg.lidar_azimuth_bins = lidar_azimuth_bins;
  cfg.action_scaling = use_tg ? ActionScaling::pmtg() : ActionScaling::reactive(model);
  return cfg;
}

int PolicyNet::feature_dim() const {
  return (config_.use_lidar ? config_.lidar_encoder.back() : 0) +
         config_.proprio_encoder.back() + 2;
}

PolicyNet::PolicyNet(const PolicyConfig& config, uint64_t init_seed)
    : config_(config), layout_(config.obs_layout()) {
  int at = 0;
  if (config_.use_lidar) {
    MlpSpec spec;
    spec.widths.push_back(layout_.lidar_dim);
    spec.widths.insert(spec.widths.end(), config_.lidar_encoder.begin(),
                       config_.lidar_encoder.end());
    lidar_enc_ = MlpLayout(spec, at);
    at += lidar_enc_.param_count();
  }
  {
    MlpSpec spec;
    spec.widths.push_back(layout_.proprio_dim());
    spec.widths.insert(spec.widths.end(), config_.proprio_encoder.begin(),
                       config_.proprio_encoder.end());
    proprio_enc_ = MlpLayout(spec, at);
    at += proprio_enc_.param_count();
  }
  {
    MlpSpec spec;
    spec.widths.push_back(feature_dim());
    spec.widths.insert(spec.widths.end(), config_.policy_trunk.begin(),
                       config_.policy_trunk.end());
    spec.widths.push_back(layout_.action_dim);
    trunk_ = MlpLayout(spec, at);
    at += trunk_.param_count();
  }
  {
    MlpSpec spec;
    spec.widths.push_back(feature_dim());
    spec.widths.insert(spec.widths.end(), config_.value_net.begin(), config_.value_net.end());
    spec.widths.push_back(1);
    value_ = MlpLayout(spec, at);
    at += value_.param_count();
  }
  log_std_offset_ = at;
  at += layout_.action_dim;
  params_.assign(static_cast<size_t>(at), 0.0);

  Rng rng(init_seed);
  if (config_.use_lidar) lidar_enc_.initialize(params_.data(), rng);
  proprio_enc_.initialize(params_.data(), rng);
  trunk_.initialize(params_.data(), rng, 0.01);
  value_.initialize(params_.data(), rng);
  for (int k = 0; k < layout_.action_dim; ++k) {
    params_[static_cast<size_t>(log_std_offset_ + k)] = config_.log_std_init;
  }
}

std::vector<std::vector<int>> PolicyNet::layer_dims() const {
  std::vector<std::vector<int>> dims(4);
  if (config_.use_lidar) dims[0] = lidar_enc_.spec().widths;
  dims[1] = proprio_enc_.spec().widths;
  dims[2] = trunk_.spec().widths;
  dims[3] = value_.spec().widths;
  return dims;
}

Eigen::VectorXd PolicyNet::clamped_log_std() const {
  Eigen::VectorXd v(layout_.action_dim);
  for (int k = 0; k < layout_.action_dim; ++k) {
    const double raw = params_[static_cast<size_t>(log_std_offset_ + k)];
    v[k] = std::min(std::max(raw, config_.log_std_min), config_.log_std_max);
  }
  return v;
}

PolicyNet::BatchInputs PolicyNet::assemble_inputs(const Eigen::MatrixXd& obs_cols) const {
  if (obs_cols.rows() != layout_.total_dim()) {
    throw std::invalid_argument("policy forward: observation dimension mismatch (expected " +
                                std::to_string(layout_.total_dim()) + ", got " +
                                std::to_string(obs_cols.rows()) + ")");
  }
  const auto batch = obs_cols.cols();
  BatchInputs in;
  if (config_.use_lidar) {
    in.lidar = obs_cols.middleRows(layout_.lidar_offset(), layout_.lidar_dim);
  }

  in.proprio.resize(layout_.proprio_dim(), batch);
  int row = 0;
  // Previous action, mapped back to the normalized space.
  for (int k = 0; k < layout_.action_dim; ++k, ++row) {
    in.proprio.row(row) =
        (obs_cols.row(layout_.prev_action_offset() + k).array() - config_.action_scaling.center[k]) /
        config_.action_scaling.half_range[k];
  }
  for (int k = 0; k < 3; ++k, ++row) {
    in.proprio.row(row) =
        obs_cols.row(layout_.angular_velocity_offset() + k) * config_.angular_velocity_scale;
  }
  for (int k = 0; k < kNumJoints; ++k, ++row) {
    in.proprio.row(row) = obs_cols.row(layout_.joint_offset() + k);
  }
  for (int k = 0; k < 2; ++k, ++row) {
    in.proprio.row(row) = obs_cols.row(layout_.roll_pitch_offset() + k);
  }
  for (int k = 0; k < 5; ++k, ++row) {
    in.proprio.row(row) = obs_cols.row(layout_.tg_offset() + k);
  }

  in.goal.resize(2, batch);
  in.goal.row(0) = obs_cols.row(layout_.goal_dist_offset()) / config_.goal_dist_scale;
  in.goal.row(1) = obs_cols.row(layout_.goal_heading_offset()) / 3.14159265358979323846;
  return in;
}

void PolicyNet::forward_internal(const Eigen::MatrixXd& obs_cols, ForwardCache* cache,
                                 bool with_value) const {
  cache->inputs = assemble_inputs(obs_cols);
  const auto batch = obs_cols.cols();
  const double* p = params_.data();

  cache->feature.resize(feature_dim(), batch);
  int row = 0;
  if (config_.use_lidar) {
    cache->feature.middleRows(row, lidar_enc_.output_dim()) =
        lidar_enc_.forward(p, cache->inputs.lidar, &cache->lidar_cache);
    row += lidar_enc_.output_dim();
  }
  cache->feature.middleRows(row, proprio_enc_.output_dim()) =
      proprio_enc_.forward(p, cache->inputs.proprio, &cache->proprio_cache);
  row += proprio_enc_.output_dim();
  cache->feature.middleRows(row, 2) = cache->inputs.goal;

  cache->raw_mean = trunk_.forward(p, cache->feature, &cache->trunk_cache);
  cache->mean = cache->raw_mean.array().tanh();
  if (with_value) {
    cache->value = value_.forward(p, cache->feature, &cache->value_cache).row(0);
  } else {
    cache->value = Eigen::VectorXd::Zero(batch);
  }
}

PolicyNet::Output PolicyNet::forward(const Eigen::VectorXd& obs) const {
  ForwardCache cache;
  forward_internal(obs, &cache);
  Output out;
  out.mean = cache.mean.col(0);
  out.log_std = clamped_log_std();
  out.value = cache.value[0];
  return out;
}

void PolicyNet::forward_batch(const Eigen::MatrixXd& obs_cols, Eigen::MatrixXd* mean,
                              Eigen::VectorXd* log_std, Eigen::VectorXd* value) const {
  ForwardCache cache;
  forward_internal(obs_cols, &cache);
  if (mean) *mean = cache.mean;
  if (log_std) *log_std = clamped_log_std();
  if (value) *value = cache.value;
}

Eigen::VectorXd PolicyNet::values(const Eigen::MatrixXd& obs_cols) const {
  // Value head only; skips the trunk.
  ForwardCache cache;
  cache.inputs = assemble_inputs(obs_cols);
  const double* p = params_.data();
  Eigen::MatrixXd feature(feature_dim(), obs_cols.cols());
  int row = 0;
  if (config_.use_lidar) {
    feature.middleRows(row, lidar_enc_.output_dim()) = lidar_enc_.forward(p, cache.inputs.lidar);
    row += lidar_enc_.output_dim();
  }
  feature.middleRows(row, proprio_enc_.output_dim()) =
      proprio_enc_.forward(p, cache.inputs.proprio);
  row += proprio_enc_.output_dim();
  feature.middleRows(row, 2) = cache.inputs.goal;
  return value_.forward(p, feature).row(0);
}

Eigen::VectorXd PolicyNet::act_mean(const Eigen::VectorXd& obs) const {
  ForwardCache cache;
  forward_internal(obs, &cache, /*with_value=*/false);
  return cache.mean.col(0);
}

PolicyNet::ActionSample PolicyNet::act_sample(const Eigen::VectorXd& obs, Rng& rng) const {
  ForwardCache cache;
  forward_internal(obs, &cache, /*with_value=*/false);
  const Eigen::VectorXd mean = cache.mean.col(0);
  const Eigen::VectorXd log_std = clamped_log_std();
  ActionSample sample;
  sample.action.resize(layout_.action_dim);
  for (int k = 0; k < layout_.action_dim; ++k) {
    sample.action[k] = mean[k] + std::exp(log_std[k]) * rng.normal();
  }
  sample.log_prob = gaussian_log_prob(mean, log_std, sample.action);
  return sample;
}

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& action) {
  double lp = -0.5 * kLog2Pi * static_cast<double>(mean.size());
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    const double z = (action[k] - mean[k]) * std::exp(-log_std[k]);
    lp += -0.5 * z * z - log_std[k];
  }
  return lp;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * (kLog2Pi + 1.0) * static_cast<double>(log_std.size());
}

PolicyNet::LossStats PolicyNet::ppo_loss(const PpoBatch& batch, std::vector<double>* grad) const {
  const auto B = batch.obs.cols();
  if (B < 1 || batch.actions.cols() != B || batch.old_log_prob.size() != B ||
      batch.advantages.size() != B || batch.returns.size() != B) {
    throw std::invalid_argument("ppo_loss: inconsistent batch");
  }
  ForwardCache cache;
  forward_internal(batch.obs, &cache);
  const Eigen::VectorXd log_std = clamped_log_std();
  const Eigen::VectorXd inv_var = (-2.0 * log_std).array().exp();
  const int A = layout_.action_dim;
  const double invB = 1.0 / static_cast<double>(B);

  // Per-sample log prob under the current parameters.
  Eigen::MatrixXd delta = batch.actions - cache.mean;  // A x B
  Eigen::VectorXd logp(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    double lp = -0.5 * kLog2Pi * A - log_std.sum();
    for (int k = 0; k < A; ++k) lp -= 0.5 * delta(k, b) * delta(k, b) * inv_var[k];
    logp[b] = lp;
  }

  LossStats stats;
  Eigen::VectorXd ratio = (logp - batch.old_log_prob).array().exp();
  Eigen::VectorXd dsurr_dratio(B);
  double surrogate = 0.0;
  for (Eigen::Index b = 0; b < B; ++b) {
    const double adv = batch.advantages[b];
    const double r = ratio[b];
    const double clipped = std::min(std::max(r, 1.0 - batch.clip), 1.0 + batch.clip);
    const double u = r * adv;
    const double c = clipped * adv;
    if (u <= c) {
      surrogate += u;
      dsurr_dratio[b] = adv;
    } else {
      surrogate += c;
      dsurr_dratio[b] = 0.0;  // clipped branch active and flat
    }
    if (std::abs(r - 1.0) > batch.clip) stats.clip_fraction += invB;
  }
  surrogate *= invB;

  const Eigen::VectorXd verr = cache.value - batch.returns;
  stats.policy_loss = -surrogate;
  stats.value_loss = 0.5 * verr.squaredNorm() * invB;
  stats.entropy = gaussian_entropy(log_std);
  stats.approx_kl = (batch.old_log_prob - logp).mean();
  stats.total = stats.policy_loss + batch.value_coef * stats.value_loss -
                batch.entropy_coef * stats.entropy;

  if (!grad) return stats;
  grad->assign(params_.size(), 0.0);
  double* g = grad->data();

  // d(total)/d(mean) and d(total)/d(value), per sample.
  Eigen::MatrixXd dmean(A, B);
  Eigen::VectorXd dlogstd = Eigen::VectorXd::Zero(A);
  for (Eigen::Index b = 0; b < B; ++b) {
    const double w = -invB * dsurr_dratio[b] * ratio[b];  // d(policy_loss)/d(logp_b)
    for (int k = 0; k < A; ++k) {
      // dlogp/dmean_k = delta * inv_var
      dmean(k, b) = w * delta(k, b) * inv_var[k];
      // dlogp/dlog_std_k = delta^2 * inv_var - 1
      dlogstd[k] += w * (delta(k, b) * delta(k, b) * inv_var[k] - 1.0);
    }
  }
  // Entropy bonus: d(-coef * entropy)/d(log_std_k) = -coef.
  dlogstd.array() -= batch.entropy_coef;
  // Clamp gate on log_std.
  for (int k = 0; k < A; ++k) {
    const double raw = params_[static_cast<size_t>(log_std_offset_ + k)];
    if (raw > config_.log_std_min && raw < config_.log_std_max) {
      g[log_std_offset_ + k] += dlogstd[k];
    }
  }

  // Through the tanh squash.
  Eigen::MatrixXd draw = dmean.array() * (1.0 - cache.mean.array().square());
  Eigen::MatrixXd dvalue_row(1, B);
  dvalue_row.row(0) = (batch.value_coef * invB) * verr.transpose();

  const double* p = params_.data();
  Eigen::MatrixXd dfeature = trunk_.backward(p, cache.trunk_cache, draw, g);
  dfeature += value_.backward(p, cache.value_cache, dvalue_row, g);

  int row = 0;
  if (config_.use_lidar) {
    lidar_enc_.backward(p, cache.lidar_cache,
                        dfeature.middleRows(row, lidar_enc_.output_dim()), g);
    row += lidar_enc_.output_dim();
  }
  proprio_enc_.backward(p, cache.proprio_cache,
                        dfeature.middleRows(row, proprio_enc_.output_dim()), g);
  return stats;
}

}  // namespace terragym
