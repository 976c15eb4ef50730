#include "terragym/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace terragym {

namespace {

constexpr char kMagic[8] = {'T', 'G', 'C', 'K', 'P', 'T', '1', '\0'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw CheckpointError("checkpoint truncated");
  return v;
}

void write_f64_array(std::ofstream& out, const double* data, size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_f64_array(std::ifstream& in, double* data, size_t n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw CheckpointError("checkpoint truncated");
}

}  // namespace

void save_checkpoint(const std::string& path, const PolicyNet& policy, const AdamState& adam,
                     uint64_t rng_state, uint64_t iteration, uint64_t env_steps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open for write: " + path);
  out.write(kMagic, sizeof(kMagic));

  const PolicyConfig& cfg = policy.config();
  uint32_t flags = 0;
  if (cfg.use_tg) flags |= 1u;
  if (cfg.use_lidar) flags |= 2u;
  write_pod(out, flags);
  write_pod(out, static_cast<uint32_t>(cfg.lidar_channels));
  write_pod(out, static_cast<uint32_t>(cfg.lidar_azimuth_bins));
  write_pod(out, static_cast<uint32_t>(policy.layout().action_dim));
  write_pod(out, static_cast<uint32_t>(policy.layout().total_dim()));

  const auto dims = policy.layer_dims();
  write_pod(out, static_cast<uint32_t>(dims.size()));
  for (const auto& net : dims) {
    write_pod(out, static_cast<uint32_t>(net.size()));
    for (int w : net) write_pod(out, static_cast<int32_t>(w));
  }

  const auto& params = policy.params();
  write_pod(out, static_cast<uint64_t>(params.size()));
  write_f64_array(out, params.data(), params.size());

  write_pod(out, static_cast<uint64_t>(adam.m.size()));
  write_f64_array(out, adam.m.data(), static_cast<size_t>(adam.m.size()));
  write_f64_array(out, adam.v.data(), static_cast<size_t>(adam.v.size()));
  write_pod(out, static_cast<uint64_t>(adam.t));

  write_pod(out, rng_state);
  write_pod(out, iteration);
  write_pod(out, env_steps);
  if (!out) throw CheckpointError("write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path, const RobotModel& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("bad checkpoint magic in " + path);
  }

  const uint32_t flags = read_pod<uint32_t>(in);
  const bool use_tg = (flags & 1u) != 0;
  const bool use_lidar = (flags & 2u) != 0;
  const int channels = static_cast<int>(read_pod<uint32_t>(in));
  const int bins = static_cast<int>(read_pod<uint32_t>(in));
  const int action_dim = static_cast<int>(read_pod<uint32_t>(in));
  const int obs_dim = static_cast<int>(read_pod<uint32_t>(in));

  const uint32_t net_count = read_pod<uint32_t>(in);
  if (net_count != 4) throw CheckpointError("unexpected network table size");
  std::vector<std::vector<int>> dims(net_count);
  for (auto& net : dims) {
    const uint32_t len = read_pod<uint32_t>(in);
    net.resize(len);
    for (auto& w : net) w = static_cast<int>(read_pod<int32_t>(in));
  }

  PolicyConfig cfg = PolicyConfig::make(use_tg, use_lidar, model, channels, bins);
  const auto hidden_of = [](const std::vector<int>& widths, int strip_back) {
    if (widths.empty()) return std::vector<int>{};
    return std::vector<int>(widths.begin() + 1, widths.end() - strip_back);
  };
  if (use_lidar) cfg.lidar_encoder = hidden_of(dims[0], 0);
  cfg.proprio_encoder = hidden_of(dims[1], 0);
  cfg.policy_trunk = hidden_of(dims[2], 1);
  cfg.value_net = hidden_of(dims[3], 1);

  LoadedCheckpoint loaded;
  loaded.policy = std::make_unique<PolicyNet>(cfg, 0);
  if (loaded.policy->layout().action_dim != action_dim ||
      loaded.policy->layout().total_dim() != obs_dim) {
    throw CheckpointError("checkpoint dimensions do not match the configured robot/lidar");
  }
  if (loaded.policy->layer_dims() != dims) {
    throw CheckpointError("checkpoint layer table mismatch");
  }

  const uint64_t param_count = read_pod<uint64_t>(in);
  if (param_count != loaded.policy->params().size()) {
    throw CheckpointError("checkpoint parameter count mismatch");
  }
  read_f64_array(in, loaded.policy->params().data(), param_count);

  const uint64_t moment_count = read_pod<uint64_t>(in);
  if (moment_count != param_count) throw CheckpointError("checkpoint moment count mismatch");
  loaded.adam.resize(static_cast<int>(moment_count));
  read_f64_array(in, loaded.adam.m.data(), moment_count);
  read_f64_array(in, loaded.adam.v.data(), moment_count);
  loaded.adam.t = static_cast<long>(read_pod<uint64_t>(in));

  loaded.rng_state = read_pod<uint64_t>(in);
  loaded.iteration = read_pod<uint64_t>(in);
  loaded.env_steps = read_pod<uint64_t>(in);
  return loaded;
}

}  // namespace terragym
