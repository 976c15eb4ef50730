#include "terragym/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace terragym {

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo: gamma outside (0, 1]");
  if (!(lam >= 0.0 && lam <= 1.0)) throw std::invalid_argument("ppo: lambda outside [0, 1]");
  if (!(clip > 0.0)) throw std::invalid_argument("ppo: clip must be positive");
  if (epochs < 1 || minibatch_size < 1 || workers < 1 || horizon < 1) {
    throw std::invalid_argument("ppo: epochs, minibatch, workers, horizon must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("ppo: learning rate must be positive");
  if (total_env_steps < 0) throw std::invalid_argument("ppo: negative step budget");
}

void normalize_advantages(Eigen::VectorXd& advantages) {
  const auto n = advantages.size();
  if (n < 2) return;
  const double mean = advantages.mean();
  advantages.array() -= mean;
  const double std = std::sqrt(advantages.squaredNorm() / static_cast<double>(n));
  advantages /= std + 1e-8;
}

void AdamState::apply(std::vector<double>& params, const std::vector<double>& grad, double lr) {
  if (static_cast<int>(params.size()) != m.size() || params.size() != grad.size()) {
    throw std::invalid_argument("adam: size mismatch");
  }
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t k = 0; k < params.size(); ++k) {
    const double g = grad[k];
    m[static_cast<Eigen::Index>(k)] = beta1 * m[static_cast<Eigen::Index>(k)] + (1.0 - beta1) * g;
    v[static_cast<Eigen::Index>(k)] =
        beta2 * v[static_cast<Eigen::Index>(k)] + (1.0 - beta2) * g * g;
    const double mhat = m[static_cast<Eigen::Index>(k)] / bc1;
    const double vhat = v[static_cast<Eigen::Index>(k)] / bc2;
    params[k] -= lr * mhat / (std::sqrt(vhat) + epsilon);
  }
}

UpdateStats ppo_update(PolicyNet& policy, AdamState& adam, TrajectoryBatch& batch,
                       const PpoConfig& config, Rng& rng) {
  config.validate();
  const long B = batch.size();
  if (B < 1) throw std::invalid_argument("ppo_update: empty batch");

  normalize_advantages(batch.advantages);

  std::vector<int> order(static_cast<size_t>(B));
  std::iota(order.begin(), order.end(), 0);

  UpdateStats stats;
  int updates = 0;
  std::vector<double> grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with the trainer's RNG keeps runs reproducible.
    for (long k = B - 1; k > 0; --k) {
      const long j = static_cast<long>(rng.uniform_index(static_cast<uint64_t>(k + 1)));
      std::swap(order[static_cast<size_t>(k)], order[static_cast<size_t>(j)]);
    }
    for (long start = 0; start < B; start += config.minibatch_size) {
      const long count = std::min<long>(config.minibatch_size, B - start);
      PolicyNet::PpoBatch mb;
      mb.obs.resize(batch.obs.rows(), count);
      mb.actions.resize(batch.actions.rows(), count);
      mb.old_log_prob.resize(count);
      mb.advantages.resize(count);
      mb.returns.resize(count);
      for (long k = 0; k < count; ++k) {
        const int src = order[static_cast<size_t>(start + k)];
        mb.obs.col(k) = batch.obs.col(src);
        mb.actions.col(k) = batch.actions.col(src);
        mb.old_log_prob[k] = batch.log_probs[src];
        mb.advantages[k] = batch.advantages[src];
        mb.returns[k] = batch.returns[src];
      }
      mb.clip = config.clip;
      mb.value_coef = config.value_coef;
      mb.entropy_coef = config.entropy_coef;

      const PolicyNet::LossStats loss = policy.ppo_loss(mb, &grad);
      if (!std::isfinite(loss.total)) {
        stats.fault = true;
        return stats;
      }
      adam.apply(policy.params(), grad, config.learning_rate);

      stats.policy_loss += loss.policy_loss;
      stats.value_loss += loss.value_loss;
      stats.entropy += loss.entropy;
      stats.approx_kl += loss.approx_kl;
      stats.clip_fraction += loss.clip_fraction;
      ++updates;
    }
  }
  if (updates > 0) {
    stats.policy_loss /= updates;
    stats.value_loss /= updates;
    stats.entropy /= updates;
    stats.approx_kl /= updates;
    stats.clip_fraction /= updates;
  }
  return stats;
}

}  // namespace terragym
