#include "terragym/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace terragym {

const EvalReport::Cell* EvalReport::find(const std::string& terrain) const {
  for (const auto& c : cells)
    if (c.terrain == terrain) return &c;
  return nullptr;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(14) << "terrain" << std::right << std::setw(10) << "mean_tcr"
      << std::setw(10) << "std" << std::setw(10) << "success" << std::setw(10) << "episodes"
      << '\n';
  for (const auto& c : cells) {
    out << std::left << std::setw(14) << c.terrain << std::right << std::setw(10) << c.mean_tcr
        << std::setw(10) << c.std_tcr << std::setw(10) << c.success_rate << std::setw(10)
        << c.episodes << '\n';
  }
  out << std::left << std::setw(14) << "overall" << std::right << std::setw(10)
      << overall_mean_tcr << '\n';
  return out.str();
}

void EvalReport::write_csv(std::ostream& out) const {
  out << "terrain,episode,seed,tcr,success,steps\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.terrain << ',' << r.episode << ',' << r.seed << ',' << r.tcr << ','
        << (r.success ? 1 : 0) << ',' << r.steps << '\n';
  }
}

EvalReport run_eval(const ActionFn& act, const EvalEnvFactory& factory,
                    const std::vector<EvalCell>& suite, int episodes_per_cell, uint64_t seed,
                    int max_steps) {
  if (episodes_per_cell < 1) throw std::invalid_argument("eval: episodes must be >= 1");
  EvalReport report;
  double total = 0.0;
  int total_rows = 0;
  for (size_t ci = 0; ci < suite.size(); ++ci) {
    const EvalCell& cell = suite[ci];
    EvalReport::Cell agg;
    agg.terrain = cell.name;
    agg.episodes = episodes_per_cell;
    std::vector<double> tcrs;
    for (int ep = 0; ep < episodes_per_cell; ++ep) {
      const uint64_t ep_seed = Rng::derive(seed, ci * 100003ull + static_cast<uint64_t>(ep));
      TaskSpec spec = cell.spec;
      spec.seed = Rng::derive(ep_seed, 5);  // fresh terrain draw per episode
      std::unique_ptr<RolloutEnv> env = factory(spec, ep_seed);

      Eigen::VectorXd obs = env->reset(ep_seed);
      EvalRow row;
      row.terrain = cell.name;
      row.episode = ep;
      row.seed = ep_seed;
      for (int t = 0; t < max_steps; ++t) {
        const RolloutEnv::Step step = env->step(act(obs));
        row.steps = t + 1;
        row.tcr = step.tcr;
        row.success = step.success;
        obs = step.obs;
        if (step.done) break;
      }
      tcrs.push_back(row.tcr);
      agg.mean_tcr += row.tcr;
      agg.success_rate += row.success ? 1.0 : 0.0;
      report.rows.push_back(row);
      total += row.tcr;
      ++total_rows;
    }
    agg.mean_tcr /= episodes_per_cell;
    agg.success_rate /= episodes_per_cell;
    double var = 0.0;
    for (double v : tcrs) var += (v - agg.mean_tcr) * (v - agg.mean_tcr);
    agg.std_tcr = std::sqrt(var / episodes_per_cell);
    report.cells.push_back(agg);
  }
  report.overall_mean_tcr = total_rows > 0 ? total / total_rows : 0.0;
  return report;
}

EvalReport run_eval(const PolicyNet& policy, const EnvConfig& env_config,
                    const std::vector<EvalCell>& suite, int episodes_per_cell, uint64_t seed) {
  const ActionScaling& scaling = policy.config().action_scaling;
  const ActionFn greedy = [&](const Eigen::VectorXd& obs) {
    return scaling.to_physical(policy.act_mean(obs).cwiseMax(-1.0).cwiseMin(1.0));
  };
  const EvalEnvFactory factory = [&](const TaskSpec& spec, uint64_t) {
    return std::make_unique<TaskEnv>(env_config, spec);
  };
  return run_eval(greedy, factory, suite, episodes_per_cell, seed,
                  env_config.episode.max_steps);
}

double mean_tcr(const EvalReport& report, const std::vector<std::string>& names) {
  double sum = 0.0;
  int count = 0;
  for (const auto& c : report.cells) {
    if (!names.empty() &&
        std::find(names.begin(), names.end(), c.terrain) == names.end()) {
      continue;
    }
    sum += c.mean_tcr;
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

}  // namespace terragym
