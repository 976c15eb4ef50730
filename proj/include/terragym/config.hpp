#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "terragym/evaluate.hpp"
#include "terragym/trainer.hpp"

namespace terragym {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat INI: [section] lines and key = value pairs, '#' or ';' comments.
// Section and key order is preserved so parse -> serialize -> parse is the
// identity on the parsed form.
class Ini {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    const std::string* find(const std::string& key) const;
    bool operator==(const Section&) const = default;
  };

  static Ini parse(const std::string& text);
  static Ini parse_file(const std::string& path);
  std::string serialize() const;

  std::vector<Section>& sections() { return sections_; }
  const std::vector<Section>& sections() const { return sections_; }
  const Section* find(const std::string& name) const;

  bool operator==(const Ini&) const = default;

 private:
  std::vector<Section> sections_;
};

// Interval syntax: "v" (degenerate) or "lo:hi".
Interval parse_interval(const std::string& text);

// Full run description: environment, PPO, task distribution, eval suite,
// mode flags.
struct RunConfig {
  EnvConfig env;
  PpoConfig ppo;
  TaskDistribution tasks;
  std::vector<EvalCell> eval_suite;
  Schedule schedule = Schedule::kMultitask;
  long switch_every = 0;
  uint64_t seed = 1;
  std::string out_dir = "runs/default";
  int eval_episodes = 20;

  // Throws ConfigError naming the offending section/key.
  static RunConfig from_ini(const Ini& ini);
  static RunConfig from_file(const std::string& path);

  TrainSetup train_setup() const;
};

}  // namespace terragym
