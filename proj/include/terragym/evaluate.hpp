#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "terragym/rollout.hpp"

namespace terragym {

struct EvalCell {
  std::string name;  // row label, e.g. "hills"
  TaskSpec spec;
};

struct EvalRow {
  std::string terrain;
  int episode = 0;
  uint64_t seed = 0;
  double tcr = 0.0;
  bool success = false;
  int steps = 0;
};

struct EvalReport {
  struct Cell {
    std::string terrain;
    double mean_tcr = 0.0;
    double std_tcr = 0.0;
    double success_rate = 0.0;
    int episodes = 0;
  };
  std::vector<Cell> cells;
  std::vector<EvalRow> rows;
  double overall_mean_tcr = 0.0;

  std::string to_table() const;
  void write_csv(std::ostream& out) const;  // terrain,episode,seed,tcr,success,steps
  const Cell* find(const std::string& terrain) const;
};

// Maps an observation to a physical action (greedy policies, scripted tests).
using ActionFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& obs)>;

// Builds one environment per (cell, episode); tests can substitute doubles.
using EvalEnvFactory =
    std::function<std::unique_ptr<RolloutEnv>(const TaskSpec& spec, uint64_t seed)>;

EvalReport run_eval(const ActionFn& act, const EvalEnvFactory& factory,
                    const std::vector<EvalCell>& suite, int episodes_per_cell, uint64_t seed,
                    int max_steps);

// Greedy evaluation of a policy (mean action) on real environments.
EvalReport run_eval(const PolicyNet& policy, const EnvConfig& env_config,
                    const std::vector<EvalCell>& suite, int episodes_per_cell, uint64_t seed);

// Mean tcr over a subset of cells (by name); all cells when names is empty.
double mean_tcr(const EvalReport& report, const std::vector<std::string>& names = {});

}  // namespace terragym
