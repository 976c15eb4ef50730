#include "terragym/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace terragym {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError("[" + section + "] " + key + ": not a number: '" + v + "'");
  }
}

long to_long(const std::string& section, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError("[" + section + "] " + key + ": not an integer: '" + v + "'");
  }
}

}  // namespace

bool Ini::Section::has(const std::string& key) const { return find(key) != nullptr; }

const std::string* Ini::Section::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

Ini Ini::parse(const std::string& text) {
  Ini ini;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Section* current = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      }
      Section s;
      s.name = trim(line.substr(1, line.size() - 2));
      if (s.name.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      ini.sections_.push_back(std::move(s));
      current = &ini.sections_.back();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (!current) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    current->entries.emplace_back(key, value);
  }
  return ini;
}

Ini Ini::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

std::string Ini::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
  }
  return out.str();
}

const Ini::Section* Ini::find(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

Interval parse_interval(const std::string& text) {
  const size_t colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
      return {v, v};
    }
    size_t used = 0;
    const std::string lo_s = trim(text.substr(0, colon));
    const std::string hi_s = trim(text.substr(colon + 1));
    const double lo = std::stod(lo_s, &used);
    if (used != lo_s.size()) throw std::invalid_argument("trailing");
    const double hi = std::stod(hi_s, &used);
    if (used != hi_s.size()) throw std::invalid_argument("trailing");
    return {lo, hi};
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("bad interval '" + text + "' (expected 'v' or 'lo:hi')");
  }
}

namespace {

TaskSpec task_from_section(const Ini::Section& s, bool allow_weight) {
  TaskSpec spec;
  bool typed = false;
  for (const auto& [key, value] : s.entries) {
    if (key == "type") {
      spec.type = terrain_type_from_name(value);
      typed = true;
    } else if (key == "weight" && allow_weight) {
      continue;  // handled by the caller
    } else if (key == "seed") {
      spec.seed = static_cast<uint64_t>(to_long(s.name, key, value));
    } else {
      spec.bounds[key] = parse_interval(value);
    }
  }
  if (!typed) throw ConfigError("[" + s.name + "] missing 'type'");
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError("[" + s.name + "] " + e.what());
  }
  return spec;
}

}  // namespace

RunConfig RunConfig::from_ini(const Ini& ini) {
  RunConfig rc;
  for (const auto& s : ini.sections()) {
    if (s.name == "robot") {
      for (const auto& [key, value] : s.entries) {
        if (key == "mass") rc.env.robot.torso_mass = to_double(s.name, key, value);
        else if (key == "torque_limit") rc.env.robot.torque_limit = to_double(s.name, key, value);
        else if (key == "kp") rc.env.robot.kp.setConstant(to_double(s.name, key, value));
        else if (key == "kd") rc.env.robot.kd.setConstant(to_double(s.name, key, value));
        else if (key == "joint_inertia") rc.env.robot.joint_reflected_inertia = to_double(s.name, key, value);
        else if (key == "stance_depth") rc.env.robot.nominal_stance_depth = to_double(s.name, key, value);
        else throw ConfigError("[robot] unknown key: " + key);
      }
    } else if (s.name == "contact") {
      for (const auto& [key, value] : s.entries) {
        if (key == "normal_stiffness") rc.env.contact.normal_stiffness = to_double(s.name, key, value);
        else if (key == "normal_damping") rc.env.contact.normal_damping = to_double(s.name, key, value);
        else if (key == "friction") rc.env.contact.friction = to_double(s.name, key, value);
        else if (key == "tangential_damping") rc.env.contact.tangential_damping = to_double(s.name, key, value);
        else if (key == "max_penetration") rc.env.contact.max_penetration = to_double(s.name, key, value);
        else throw ConfigError("[contact] unknown key: " + key);
      }
    } else if (s.name == "lidar") {
      for (const auto& [key, value] : s.entries) {
        if (key == "channels") rc.env.lidar.channels = static_cast<int>(to_long(s.name, key, value));
        else if (key == "azimuth_bins") rc.env.lidar.azimuth_bins = static_cast<int>(to_long(s.name, key, value));
        else if (key == "vertical_fov_deg") rc.env.lidar.vertical_fov_deg = to_double(s.name, key, value);
        else if (key == "max_range") rc.env.lidar.max_range = to_double(s.name, key, value);
        else if (key == "noise_sigma") rc.env.lidar.noise_sigma = to_double(s.name, key, value);
        else if (key == "mount_height") rc.env.lidar.mount_offset.z() = to_double(s.name, key, value);
        else throw ConfigError("[lidar] unknown key: " + key);
      }
    } else if (s.name == "episode") {
      for (const auto& [key, value] : s.entries) {
        if (key == "control_dt") rc.env.episode.control_dt = to_double(s.name, key, value);
        else if (key == "action_repeat") rc.env.episode.action_repeat = static_cast<int>(to_long(s.name, key, value));
        else if (key == "max_steps") rc.env.episode.max_steps = static_cast<int>(to_long(s.name, key, value));
        else if (key == "success_radius") rc.env.episode.success_radius = to_double(s.name, key, value);
        else if (key == "start_x") rc.env.episode.start_x = to_double(s.name, key, value);
        else if (key == "goal_distance") {
          const Interval g = parse_interval(value);
          rc.env.episode.goal_distance_min = g.low;
          rc.env.episode.goal_distance_max = g.high;
        } else if (key == "grid_rows") rc.env.episode.grid_rows = static_cast<int>(to_long(s.name, key, value));
        else if (key == "grid_cols") rc.env.episode.grid_cols = static_cast<int>(to_long(s.name, key, value));
        else if (key == "proprio_noise") rc.env.proprio_noise_sigma = to_double(s.name, key, value);
        else throw ConfigError("[episode] unknown key: " + key);
      }
    } else if (s.name == "ppo") {
      for (const auto& [key, value] : s.entries) {
        if (key == "gamma") rc.ppo.gamma = to_double(s.name, key, value);
        else if (key == "lambda") rc.ppo.lam = to_double(s.name, key, value);
        else if (key == "clip") rc.ppo.clip = to_double(s.name, key, value);
        else if (key == "epochs") rc.ppo.epochs = static_cast<int>(to_long(s.name, key, value));
        else if (key == "minibatch") rc.ppo.minibatch_size = static_cast<int>(to_long(s.name, key, value));
        else if (key == "learning_rate") rc.ppo.learning_rate = to_double(s.name, key, value);
        else if (key == "entropy_coef") rc.ppo.entropy_coef = to_double(s.name, key, value);
        else if (key == "value_coef") rc.ppo.value_coef = to_double(s.name, key, value);
        else if (key == "workers") rc.ppo.workers = static_cast<int>(to_long(s.name, key, value));
        else if (key == "horizon") rc.ppo.horizon = static_cast<int>(to_long(s.name, key, value));
        else if (key == "total_env_steps") rc.ppo.total_env_steps = to_long(s.name, key, value);
        else if (key == "reward_scale") rc.ppo.reward_scale = to_double(s.name, key, value);
        else if (key == "checkpoint_every") rc.ppo.checkpoint_every = static_cast<int>(to_long(s.name, key, value));
        else if (key == "max_threads") rc.ppo.max_threads = static_cast<int>(to_long(s.name, key, value));
        else throw ConfigError("[ppo] unknown key: " + key);
      }
    } else if (s.name == "run") {
      for (const auto& [key, value] : s.entries) {
        if (key == "policy") {
          if (value == "pmtg") rc.env.use_tg = true;
          else if (value == "reactive") rc.env.use_tg = false;
          else throw ConfigError("[run] policy must be pmtg or reactive, got: " + value);
        } else if (key == "vision") {
          if (value == "lidar") rc.env.use_lidar = true;
          else if (value == "blind") rc.env.use_lidar = false;
          else throw ConfigError("[run] vision must be lidar or blind, got: " + value);
        } else if (key == "schedule") {
          if (value == "multitask") rc.schedule = Schedule::kMultitask;
          else if (value == "sequential") rc.schedule = Schedule::kSequential;
          else throw ConfigError("[run] schedule must be multitask or sequential, got: " + value);
        } else if (key == "switch_every") rc.switch_every = to_long(s.name, key, value);
        else if (key == "seed") rc.seed = static_cast<uint64_t>(to_long(s.name, key, value));
        else if (key == "out") rc.out_dir = value;
        else if (key == "eval_episodes") rc.eval_episodes = static_cast<int>(to_long(s.name, key, value));
        else throw ConfigError("[run] unknown key: " + key);
      }
    } else if (s.name.rfind("task ", 0) == 0) {
      TaskDistribution::Entry entry;
      entry.name = trim(s.name.substr(5));
      entry.spec = task_from_section(s, true);
      if (const std::string* w = s.find("weight")) entry.weight = to_double(s.name, "weight", *w);
      rc.tasks.entries.push_back(std::move(entry));
    } else if (s.name.rfind("eval ", 0) == 0) {
      EvalCell cell;
      cell.name = trim(s.name.substr(5));
      cell.spec = task_from_section(s, false);
      rc.eval_suite.push_back(std::move(cell));
    } else {
      throw ConfigError("unknown section: [" + s.name + "]");
    }
  }
  try {
    rc.ppo.validate();
    if (!rc.tasks.entries.empty()) rc.tasks.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_ini(Ini::parse_file(path));
}

TrainSetup RunConfig::train_setup() const {
  TrainSetup setup;
  setup.env = env;
  setup.tasks = tasks;
  setup.ppo = ppo;
  setup.schedule = schedule;
  setup.switch_every = switch_every;
  setup.seed = seed;
  setup.out_dir = out_dir;
  return setup;
}

}  // namespace terragym
