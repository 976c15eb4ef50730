#include "terragym/rollout.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "terragym/gae.hpp"

namespace terragym {

TaskEnv::TaskEnv(const EnvConfig& config, TaskDistribution dist)
    : env_(config), dist_(std::move(dist)) {
  dist_.validate();
}

TaskEnv::TaskEnv(const EnvConfig& config, TaskSpec fixed_task)
    : env_(config), fixed_(true), fixed_task_(std::move(fixed_task)) {
  fixed_task_.validate();
}

Eigen::VectorXd TaskEnv::reset(uint64_t seed) {
  if (fixed_) {
    current_ = fixed_task_;
    current_.seed = Rng::derive(seed, 11);  // fresh terrain draw, same family
    return env_.reset_task(current_, seed);
  }
  current_ = sample_task(dist_, Rng::derive(seed, 1));
  const Eigen::VectorXd obs = env_.reset_task(current_, seed);
  return obs;
}

RolloutEnv::Step TaskEnv::step(const Eigen::VectorXd& physical_action) {
  const Env::StepResult r = env_.step(physical_action);
  Step out;
  out.obs = r.obs;
  out.reward = r.reward;
  out.done = r.done;
  out.success = r.info.success;
  out.tcr = r.info.tcr;
  return out;
}

int worker_thread_budget(int requested) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int budget = requested > 0 ? requested : hw;
  if (const char* cap = std::getenv("TERRAGYM_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit >= 1) budget = std::min(budget, limit);
  }
  return std::max(1, budget);
}

namespace {

struct WorkerSegment {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd rewards;          // scaled
  std::vector<uint8_t> dones;
  Eigen::VectorXd bootstrap_obs;    // observation after the last stored step
  std::vector<TrajectoryBatch::EpisodeStat> episodes;
  bool faulted = false;
};

void run_worker(const PolicyNet& policy, const EnvFactory& factory, const RolloutConfig& cfg,
                int worker_index, WorkerSegment* out) {
  try {
    std::unique_ptr<RolloutEnv> env = factory(worker_index);
    const int L = cfg.horizon;
    const int A = env->action_dim();
    out->obs.resize(env->obs_dim(), L);
    out->actions.resize(A, L);
    out->log_probs.resize(L);
    out->rewards.resize(L);
    out->dones.assign(static_cast<size_t>(L), 0);

    Rng rng(cfg.seed + static_cast<uint64_t>(worker_index));
    const ActionScaling& scaling = policy.config().action_scaling;

    Eigen::VectorXd obs = env->reset(rng.next_u64());
    TrajectoryBatch::EpisodeStat episode;
    for (int t = 0; t < L; ++t) {
      const PolicyNet::ActionSample sample = policy.act_sample(obs, rng);
      const Eigen::VectorXd physical =
          scaling.to_physical(sample.action.cwiseMax(-1.0).cwiseMin(1.0));
      const RolloutEnv::Step step = env->step(physical);

      out->obs.col(t) = obs;
      out->actions.col(t) = sample.action;
      out->log_probs[t] = sample.log_prob;
      out->rewards[t] = step.reward * cfg.reward_scale;
      out->dones[static_cast<size_t>(t)] = step.done ? 1 : 0;

      episode.return_sum += step.reward;
      episode.steps += 1;
      episode.tcr = step.tcr;
      episode.success = step.success;
      if (step.done) {
        episode.completed = true;
        out->episodes.push_back(episode);
        episode = TrajectoryBatch::EpisodeStat{};
        obs = env->reset(rng.next_u64());
      } else {
        obs = step.obs;
      }
    }
    if (episode.steps > 0) out->episodes.push_back(episode);  // truncated at the horizon
    out->bootstrap_obs = obs;
  } catch (...) {
    out->faulted = true;
  }
}

}  // namespace

TrajectoryBatch collect_rollouts(const PolicyNet& policy, const EnvFactory& factory,
                                 const RolloutConfig& config) {
  const int W = config.workers;
  std::vector<WorkerSegment> segments(static_cast<size_t>(W));

  const int threads = std::min(worker_thread_budget(config.max_threads), W);
  if (threads <= 1) {
    for (int w = 0; w < W; ++w) run_worker(policy, factory, config, w, &segments[static_cast<size_t>(w)]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int w = next.fetch_add(1); w < W; w = next.fetch_add(1)) {
          run_worker(policy, factory, config, w, &segments[static_cast<size_t>(w)]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  TrajectoryBatch batch;
  long total = 0;
  for (const auto& seg : segments) {
    if (seg.faulted) {
      ++batch.fault_count;
      continue;
    }
    total += seg.obs.cols();
  }
  if (total == 0) return batch;

  const int obs_dim = policy.layout().total_dim();
  const int act_dim = policy.layout().action_dim;
  batch.obs.resize(obs_dim, total);
  batch.actions.resize(act_dim, total);
  batch.log_probs.resize(total);
  batch.rewards.resize(total);
  batch.dones.assign(static_cast<size_t>(total), 0);
  batch.values.resize(total);
  batch.advantages.resize(total);
  batch.returns.resize(total);

  long at = 0;
  for (const auto& seg : segments) {
    if (seg.faulted) continue;
    const long L = seg.obs.cols();
    batch.obs.middleCols(at, L) = seg.obs;
    batch.actions.middleCols(at, L) = seg.actions;
    batch.log_probs.segment(at, L) = seg.log_probs;
    batch.rewards.segment(at, L) = seg.rewards;
    for (long t = 0; t < L; ++t) batch.dones[static_cast<size_t>(at + t)] = seg.dones[static_cast<size_t>(t)];
    batch.episodes.insert(batch.episodes.end(), seg.episodes.begin(), seg.episodes.end());

    // Values for the segment plus its bootstrap observation, in one pass.
    Eigen::MatrixXd with_bootstrap(obs_dim, L + 1);
    with_bootstrap.leftCols(L) = seg.obs;
    with_bootstrap.col(L) = seg.bootstrap_obs;
    const Eigen::VectorXd vals = policy.values(with_bootstrap);
    batch.values.segment(at, L) = vals.head(L);

    const GaeResult gae =
        compute_gae(seg.rewards, vals.head(L), seg.dones, vals[L], config.gamma, config.lam);
    batch.advantages.segment(at, L) = gae.advantages;
    batch.returns.segment(at, L) = gae.returns;
    at += L;
  }
  return batch;
}

}  // namespace terragym
