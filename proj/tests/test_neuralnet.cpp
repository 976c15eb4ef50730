#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "terragym/checkpoint.hpp"
#include "terragym/policy.hpp"

using namespace terragym;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Straight-line re-implementation of the forward pass working directly on
// the flat parameter vector: plain loops, no Eigen products. Shares only the
// layout convention with the implementation.
struct FlatOracle {
  const PolicyNet& net;

  struct NetOffsets {
    std::vector<int> widths;
    int offset;
  };
  std::vector<NetOffsets> nets;
  int log_std_offset = 0;

  explicit FlatOracle(const PolicyNet& n) : net(n) {
    int at = 0;
    for (const auto& widths : n.layer_dims()) {
      NetOffsets o;
      o.widths = widths;
      o.offset = at;
      for (size_t l = 0; l + 1 < widths.size(); ++l) {
        at += widths[l + 1] * widths[l] + widths[l + 1];
      }
      nets.push_back(o);
    }
    log_std_offset = at;
  }

  std::vector<double> run_mlp(const NetOffsets& o, const std::vector<double>& input) const {
    const std::vector<double>& p = net.params();
    std::vector<double> a = input;
    int at = o.offset;
    for (size_t l = 0; l + 1 < o.widths.size(); ++l) {
      const int in = o.widths[l];
      const int out = o.widths[l + 1];
      std::vector<double> z(static_cast<size_t>(out), 0.0);
      for (int r = 0; r < out; ++r) {
        double acc = 0.0;
        for (int c = 0; c < in; ++c) {
          acc += p[static_cast<size_t>(at + c * out + r)] * a[static_cast<size_t>(c)];
        }
        z[static_cast<size_t>(r)] = acc + p[static_cast<size_t>(at + in * out + r)];
      }
      at += in * out + out;
      const bool hidden = l + 2 < o.widths.size();
      if (hidden) {
        for (double& v : z) v = v > 0.0 ? v : 0.0;
      }
      a = z;
    }
    return a;
  }

  // Mirrors the documented observation normalization.
  void assemble(const Eigen::VectorXd& obs, std::vector<double>* lidar,
                std::vector<double>* proprio, double* gd, double* gh) const {
    const ObsLayout& lay = net.layout();
    const PolicyConfig& cfg = net.config();
    lidar->clear();
    for (int k = 0; k < lay.lidar_dim; ++k) lidar->push_back(obs[lay.lidar_offset() + k]);
    proprio->clear();
    for (int k = 0; k < lay.action_dim; ++k) {
      proprio->push_back((obs[lay.prev_action_offset() + k] - cfg.action_scaling.center[k]) /
                         cfg.action_scaling.half_range[k]);
    }
    for (int k = 0; k < 3; ++k) {
      proprio->push_back(obs[lay.angular_velocity_offset() + k] * cfg.angular_velocity_scale);
    }
    for (int k = 0; k < kNumJoints; ++k) proprio->push_back(obs[lay.joint_offset() + k]);
    for (int k = 0; k < 2; ++k) proprio->push_back(obs[lay.roll_pitch_offset() + k]);
    for (int k = 0; k < 5; ++k) proprio->push_back(obs[lay.tg_offset() + k]);
    *gd = obs[lay.goal_dist_offset()] / cfg.goal_dist_scale;
    *gh = obs[lay.goal_heading_offset()] / 3.14159265358979323846;
  }

  void forward(const Eigen::VectorXd& obs, std::vector<double>* mean, double* value) const {
    std::vector<double> lidar, proprio;
    double gd = 0.0, gh = 0.0;
    assemble(obs, &lidar, &proprio, &gd, &gh);

    std::vector<double> feature;
    if (net.config().use_lidar) {
      for (double v : run_mlp(nets[0], lidar)) feature.push_back(v);
    }
    for (double v : run_mlp(nets[1], proprio)) feature.push_back(v);
    feature.push_back(gd);
    feature.push_back(gh);

    *mean = run_mlp(nets[2], feature);
    for (double& v : *mean) v = std::tanh(v);
    *value = run_mlp(nets[3], feature)[0];
  }
};

Eigen::VectorXd random_obs(const ObsLayout& lay, Rng& rng) {
  Eigen::VectorXd obs(lay.total_dim());
  for (int k = 0; k < lay.total_dim(); ++k) obs[k] = rng.uniform(-1.0, 1.0);
  for (int k = 0; k < lay.lidar_dim; ++k) obs[lay.lidar_offset() + k] = rng.uniform(0.0, 1.0);
  obs[lay.goal_dist_offset()] = rng.uniform(0.5, 10.0);
  return obs;
}

PolicyConfig tiny_config(bool use_lidar = true) {
  RobotModel model;
  PolicyConfig cfg = PolicyConfig::make(true, use_lidar, model, 2, 2);  // lidar dim 4
  cfg.lidar_encoder = {4, 3};
  cfg.proprio_encoder = {5, 3};
  cfg.policy_trunk = {6, 5};
  cfg.value_net = {7, 4};
  return cfg;
}

void randomize_params(PolicyNet& net, Rng& rng, double scale = 0.4) {
  for (double& p : net.params()) p = rng.uniform(-scale, scale);
}

PolicyNet::PpoBatch make_batch(const PolicyNet& net, Rng& rng, int batch_size) {
  const ObsLayout& lay = net.layout();
  PolicyNet::PpoBatch batch;
  batch.obs.resize(lay.total_dim(), batch_size);
  batch.actions.resize(lay.action_dim, batch_size);
  batch.old_log_prob.resize(batch_size);
  batch.advantages.resize(batch_size);
  batch.returns.resize(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    batch.obs.col(b) = random_obs(lay, rng);
    const PolicyNet::Output out = net.forward(batch.obs.col(b));
    for (int k = 0; k < lay.action_dim; ++k) {
      batch.actions(k, b) = out.mean[k] + std::exp(out.log_std[k]) * rng.normal();
    }
    batch.old_log_prob[b] = gaussian_log_prob(out.mean, out.log_std, batch.actions.col(b));
    batch.advantages[b] = rng.uniform(-2.0, 2.0);
    batch.returns[b] = rng.uniform(-1.0, 1.0);
  }
  return batch;
}

}  // namespace

TEST_SUITE("neuralnet") {

TEST_CASE("zero parameters give zero mean and value") {
  PolicyNet net(tiny_config(), 7);
  for (double& p : net.params()) p = 0.0;
  Rng rng(3);
  const Eigen::VectorXd obs = random_obs(net.layout(), rng);
  const PolicyNet::Output out = net.forward(obs);
  CHECK(out.mean.cwiseAbs().maxCoeff() == 0.0);  // tanh(0)
  CHECK(out.value == 0.0);
}

TEST_CASE("doubling the value head output layer doubles the value only") {
  PolicyNet net(tiny_config(), 7);
  Rng rng(5);
  randomize_params(net, rng);
  const Eigen::VectorXd obs = random_obs(net.layout(), rng);
  const PolicyNet::Output before = net.forward(obs);

  // Locate the value net's final layer in the flat vector.
  FlatOracle oracle(net);
  const auto& value_net = oracle.nets[3];
  int at = value_net.offset;
  for (size_t l = 0; l + 2 < value_net.widths.size(); ++l) {
    at += value_net.widths[l + 1] * value_net.widths[l] + value_net.widths[l + 1];
  }
  const size_t n = value_net.widths.size();
  const int final_count = value_net.widths[n - 1] * value_net.widths[n - 2] + value_net.widths[n - 1];
  for (int k = 0; k < final_count; ++k) net.params()[static_cast<size_t>(at + k)] *= 2.0;

  const PolicyNet::Output after = net.forward(obs);
  CHECK(after.value == doctest::Approx(2.0 * before.value).epsilon(1e-12));
  CHECK(after.mean == before.mean);
}

TEST_CASE("forward matches the straight-line oracle") {
  SUBCASE("default architecture") {
    RobotModel model;
    PolicyNet net(PolicyConfig::make(true, true, model), 11);
    Rng rng(13);
    randomize_params(net, rng, 0.05);
    FlatOracle oracle(net);
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd obs = random_obs(net.layout(), rng);
      const PolicyNet::Output out = net.forward(obs);
      std::vector<double> mean;
      double value = 0.0;
      oracle.forward(obs, &mean, &value);
      CHECK(std::abs(out.value - value) < 1e-10);
      for (int a = 0; a < net.layout().action_dim; ++a) {
        CHECK(std::abs(out.mean[a] - mean[static_cast<size_t>(a)]) < 1e-10);
      }
    }
  }
  SUBCASE("small nets, many draws") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      PolicyNet net(tiny_config(trial % 2 == 0), rng.next_u64());
      randomize_params(net, rng);
      FlatOracle oracle(net);
      const Eigen::VectorXd obs = random_obs(net.layout(), rng);
      const PolicyNet::Output out = net.forward(obs);
      std::vector<double> mean;
      double value = 0.0;
      oracle.forward(obs, &mean, &value);
      CHECK(std::abs(out.value - value) < 1e-10);
      for (int a = 0; a < net.layout().action_dim; ++a) {
        CHECK(std::abs(out.mean[a] - mean[static_cast<size_t>(a)]) < 1e-10);
      }
    }
  }
}

TEST_CASE("gaussian log prob and entropy closed forms") {
  const int dim = 15;
  const Eigen::VectorXd mean = Eigen::VectorXd::Constant(dim, 0.3);
  const Eigen::VectorXd log_std = Eigen::VectorXd::Zero(dim);

  SUBCASE("action at the mean") {
    const double lp = gaussian_log_prob(mean, log_std, mean);
    CHECK(lp == doctest::Approx(-0.5 * dim * kLog2Pi).epsilon(1e-12));
    CHECK(lp == doctest::Approx(-13.78387).epsilon(1e-6));
  }
  SUBCASE("entropy closed form") {
    const double h = gaussian_entropy(log_std);
    CHECK(h == doctest::Approx(0.5 * dim * (kLog2Pi + 1.0)).epsilon(1e-12));
    CHECK(h == doctest::Approx(21.28387).epsilon(1e-5));
  }
  SUBCASE("entropy strictly increases in any log std") {
    Eigen::VectorXd ls = log_std;
    const double h0 = gaussian_entropy(ls);
    ls[4] += 0.1;
    CHECK(gaussian_entropy(ls) > h0);
  }
}

TEST_CASE("ppo loss gradient matches central finite differences") {
  Rng rng(2025);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    PolicyNet net(tiny_config(trial % 2 == 0), rng.next_u64());
    randomize_params(net, rng);
    PolicyNet::PpoBatch batch = make_batch(net, rng, 6);

    std::vector<double> grad;
    net.ppo_loss(batch, &grad);

    const double h = 1e-6;
    for (size_t k = 0; k < net.params().size(); ++k) {
      const double saved = net.params()[k];
      net.params()[k] = saved + h;
      const double up = net.ppo_loss(batch, nullptr).total;
      net.params()[k] = saved - h;
      const double down = net.ppo_loss(batch, nullptr).total;
      net.params()[k] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({1e-4, std::abs(fd), std::abs(grad[k])});
      worst = std::max(worst, std::abs(grad[k] - fd) / denom);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("constant loss has zero gradient") {
  PolicyNet net(tiny_config(), 23);
  Rng rng(29);
  randomize_params(net, rng);
  PolicyNet::PpoBatch batch = make_batch(net, rng, 4);
  batch.advantages.setZero();
  batch.value_coef = 0.0;
  batch.entropy_coef = 0.0;
  std::vector<double> grad;
  net.ppo_loss(batch, &grad);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("dead relu units receive zero gradient") {
  PolicyConfig cfg = tiny_config(false);  // proprio encoder sits at offset 0
  PolicyNet net(cfg, 31);
  Rng rng(37);
  randomize_params(net, rng);

  const int out0 = cfg.proprio_encoder[0];
  const int in0 = net.layout().proprio_dim();
  const int dead_unit = 2;
  net.params()[static_cast<size_t>(in0 * out0 + dead_unit)] = -100.0;  // bias

  PolicyNet::PpoBatch batch = make_batch(net, rng, 8);
  std::vector<double> grad;
  net.ppo_loss(batch, &grad);
  for (int c = 0; c < in0; ++c) {
    CHECK(grad[static_cast<size_t>(c * out0 + dead_unit)] == 0.0);
  }
  CHECK(grad[static_cast<size_t>(in0 * out0 + dead_unit)] == 0.0);
}

TEST_CASE("checkpoint round trip is bit identical") {
  RobotModel model;
  PolicyNet net(PolicyConfig::make(true, true, model, 4, 8), 41);
  Rng rng(43);
  randomize_params(net, rng, 0.1);
  AdamState adam(net.param_count());
  adam.m.setRandom();
  adam.v = adam.v.array() + 0.5;
  adam.t = 123;

  const std::string path =
      (std::filesystem::temp_directory_path() / "tg_test.ckpt").string();
  save_checkpoint(path, net, adam, 0xDEADBEEFull, 7, 4096);
  const LoadedCheckpoint loaded = load_checkpoint(path, model);

  CHECK(loaded.policy->params() == net.params());
  CHECK(loaded.adam.m == adam.m);
  CHECK(loaded.adam.v == adam.v);
  CHECK(loaded.adam.t == adam.t);
  CHECK(loaded.rng_state == 0xDEADBEEFull);
  CHECK(loaded.iteration == 7);
  CHECK(loaded.env_steps == 4096);

  const Eigen::VectorXd obs = random_obs(net.layout(), rng);
  CHECK(loaded.policy->act_mean(obs) == net.act_mean(obs));
  std::remove(path.c_str());
}

TEST_CASE("greedy evaluation is deterministic") {
  PolicyNet net(tiny_config(), 47);
  Rng rng(53);
  randomize_params(net, rng);
  const Eigen::VectorXd obs = random_obs(net.layout(), rng);
  CHECK(net.act_mean(obs) == net.act_mean(obs));
}

TEST_CASE("sampled actions differ from the mean but share its distribution") {
  PolicyNet net(tiny_config(), 59);
  Rng rng(61);
  randomize_params(net, rng);
  const Eigen::VectorXd obs = random_obs(net.layout(), rng);
  Rng rng_a(7), rng_b(7);
  const auto a = net.act_sample(obs, rng_a);
  const auto b = net.act_sample(obs, rng_b);
  CHECK(a.action == b.action);  // same rng stream, same sample
  CHECK(a.log_prob == b.log_prob);
  const PolicyNet::Output out = net.forward(obs);
  CHECK(a.log_prob == doctest::Approx(gaussian_log_prob(out.mean, out.log_std, a.action)));
}

}  // TEST_SUITE
