#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "terragym/checkpoint.hpp"
#include "terragym/config.hpp"
#include "terragym/evaluate.hpp"
#include "terragym/sensors.hpp"
#include "terragym/trainer.hpp"

namespace py = pybind11;
using namespace terragym;

namespace {

Interval interval_from_object(const py::handle& value) {
  if (py::isinstance<py::tuple>(value) || py::isinstance<py::list>(value)) {
    const auto seq = value.cast<std::vector<double>>();
    if (seq.size() != 2) throw std::invalid_argument("interval needs exactly two numbers");
    return {seq[0], seq[1]};
  }
  const double v = value.cast<double>();
  return {v, v};
}

TaskSpec spec_from_python(const std::string& type, const py::dict& params, uint64_t seed) {
  TaskSpec spec;
  spec.type = terrain_type_from_name(type);
  spec.seed = seed;
  for (const auto& item : params) {
    spec.bounds[item.first.cast<std::string>()] = interval_from_object(item.second);
  }
  spec.validate();
  return spec;
}

class PyEnv {
 public:
  PyEnv(const std::string& config_path, const std::string& policy_mode,
        const std::string& vision_mode) {
    RunConfig rc;
    if (!config_path.empty()) rc = RunConfig::from_file(config_path);
    cfg_ = rc.env;
    if (!policy_mode.empty()) cfg_.use_tg = policy_mode != "reactive";
    if (!vision_mode.empty()) cfg_.use_lidar = vision_mode != "blind";
    tasks_ = rc.tasks;
    env_ = std::make_unique<Env>(cfg_);
  }

  int obs_dim() const { return env_->obs_dim(); }
  int action_dim() const { return env_->action_dim(); }

  Eigen::VectorXd reset(uint64_t seed) {
    if (tasks_.entries.empty()) throw std::invalid_argument("no task distribution configured");
    return env_->reset(tasks_, seed);
  }

  Eigen::VectorXd reset_task(const std::string& type, const py::dict& params, uint64_t seed) {
    return env_->reset_task(spec_from_python(type, params, Rng::derive(seed, 5)), seed);
  }

  py::tuple step(const Eigen::VectorXd& action) {
    const Env::StepResult r = env_->step(action);
    py::dict info;
    info["success"] = r.info.success;
    info["fallen"] = r.info.fallen;
    info["timeout"] = r.info.timeout;
    info["fault"] = r.info.fault;
    info["steps"] = r.info.steps;
    info["goal_distance"] = r.info.goal_distance;
    info["tcr"] = r.info.tcr;
    return py::make_tuple(r.obs, r.reward, r.done, info);
  }

  bool done() const { return env_->episode_done(); }
  Eigen::MatrixXd terrain_heights() const { return env_->terrain().heights; }

  const EnvConfig& config() const { return cfg_; }

 private:
  EnvConfig cfg_;
  TaskDistribution tasks_;
  std::unique_ptr<Env> env_;
};

class PyPolicy {
 public:
  PyPolicy(uint64_t seed, bool pmtg, bool lidar) {
    RobotModel model;
    net_ = std::make_unique<PolicyNet>(PolicyConfig::make(pmtg, lidar, model), seed);
  }
  explicit PyPolicy(std::unique_ptr<PolicyNet> net) : net_(std::move(net)) {}

  static PyPolicy load(const std::string& path) {
    RobotModel model;
    LoadedCheckpoint loaded = load_checkpoint(path, model);
    return PyPolicy(std::move(loaded.policy));
  }

  int obs_dim() const { return net_->layout().total_dim(); }
  int action_dim() const { return net_->layout().action_dim; }

  Eigen::VectorXd act(const Eigen::VectorXd& obs) const { return net_->act_mean(obs); }

  Eigen::VectorXd act_physical(const Eigen::VectorXd& obs) const {
    return net_->config().action_scaling.to_physical(
        net_->act_mean(obs).cwiseMax(-1.0).cwiseMin(1.0));
  }

  py::tuple forward(const Eigen::VectorXd& obs) const {
    const PolicyNet::Output out = net_->forward(obs);
    return py::make_tuple(out.mean, out.log_std, out.value);
  }

 private:
  std::unique_ptr<PolicyNet> net_;
};

py::dict train_from_config(const std::string& config_path, const std::string& out_dir,
                           const std::string& resume) {
  RunConfig rc = RunConfig::from_file(config_path);
  TrainSetup setup = rc.train_setup();
  if (!out_dir.empty()) setup.out_dir = out_dir;
  setup.resume_from = resume;
  TrainResult result;
  {
    py::gil_scoped_release release;
    result = train(setup);
  }
  py::dict d;
  d["iterations"] = result.iterations;
  d["env_steps"] = result.env_steps;
  d["final_checkpoint"] = result.final_checkpoint;
  return d;
}

py::dict eval_checkpoint(const std::string& checkpoint_path, const std::string& suite_path,
                         int episodes, uint64_t seed) {
  const RunConfig rc = RunConfig::from_file(suite_path);
  if (rc.eval_suite.empty()) throw std::invalid_argument("suite has no [eval ...] sections");
  LoadedCheckpoint loaded = load_checkpoint(checkpoint_path, rc.env.robot);
  EnvConfig env_cfg = rc.env;
  env_cfg.use_tg = loaded.policy->config().use_tg;
  env_cfg.use_lidar = loaded.policy->config().use_lidar;
  EvalReport report;
  {
    py::gil_scoped_release release;
    report = run_eval(*loaded.policy, env_cfg, rc.eval_suite, episodes, seed);
  }
  py::dict d;
  for (const auto& cell : report.cells) {
    py::dict c;
    c["mean_tcr"] = cell.mean_tcr;
    c["std_tcr"] = cell.std_tcr;
    c["success_rate"] = cell.success_rate;
    c["episodes"] = cell.episodes;
    d[py::str(cell.terrain)] = c;
  }
  d["overall_mean_tcr"] = report.overall_mean_tcr;
  return d;
}

}  // namespace

PYBIND11_MODULE(_terragym, m) {
  m.doc() = "Multi-task quadruped locomotion over procedural terrains";
  m.attr("__version__") = "0.1.0";

  py::class_<Heightfield>(m, "Heightfield")
      .def_readonly("rows", &Heightfield::rows)
      .def_readonly("cols", &Heightfield::cols)
      .def_readonly("cell_length", &Heightfield::cell_length)
      .def_readonly("cell_width", &Heightfield::cell_width)
      .def_readonly("heights", &Heightfield::heights)
      .def("height_at", &Heightfield::height_at, py::arg("x"), py::arg("y"))
      .def("save_text", &Heightfield::save_text, py::arg("path"))
      .def("save_binary", &Heightfield::save_binary, py::arg("path"))
      .def_static("load", &Heightfield::load, py::arg("path"));

  m.def(
      "generate_terrain",
      [](const std::string& type, const py::dict& params, int rows, int cols, uint64_t seed) {
        return generate(spec_from_python(type, params, seed), rows, cols);
      },
      py::arg("type"), py::arg("params") = py::dict(), py::arg("rows") = 64,
      py::arg("cols") = 64, py::arg("seed") = 0);

  m.def(
      "lidar_scan",
      [](const Heightfield& field, const Eigen::Vector3d& position, double yaw, int channels,
         int azimuth_bins, double max_range, double noise_sigma, uint64_t seed) {
        LidarConfig cfg;
        cfg.channels = channels;
        cfg.azimuth_bins = azimuth_bins;
        cfg.max_range = max_range;
        cfg.noise_sigma = noise_sigma;
        const Eigen::Quaterniond q(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
        return raycast_scan(cfg, position, q, field, seed).distances;
      },
      py::arg("field"), py::arg("position"), py::arg("yaw") = 0.0, py::arg("channels") = 16,
      py::arg("azimuth_bins") = 64, py::arg("max_range") = 10.0, py::arg("noise_sigma") = 0.0,
      py::arg("seed") = 0);

  py::class_<PyEnv>(m, "Env")
      .def(py::init<const std::string&, const std::string&, const std::string&>(),
           py::arg("config_path") = "", py::arg("policy") = "", py::arg("vision") = "")
      .def_property_readonly("obs_dim", &PyEnv::obs_dim)
      .def_property_readonly("action_dim", &PyEnv::action_dim)
      .def("reset", &PyEnv::reset, py::arg("seed"))
      .def("reset_task", &PyEnv::reset_task, py::arg("type"), py::arg("params") = py::dict(),
           py::arg("seed") = 0)
      .def("step", &PyEnv::step, py::arg("action"))
      .def_property_readonly("done", &PyEnv::done)
      .def("terrain_heights", &PyEnv::terrain_heights);

  py::class_<PyPolicy>(m, "Policy")
      .def(py::init<uint64_t, bool, bool>(), py::arg("seed") = 1, py::arg("pmtg") = true,
           py::arg("lidar") = true)
      .def_static("load", &PyPolicy::load, py::arg("path"))
      .def_property_readonly("obs_dim", &PyPolicy::obs_dim)
      .def_property_readonly("action_dim", &PyPolicy::action_dim)
      .def("act", &PyPolicy::act, py::arg("obs"))
      .def("act_physical", &PyPolicy::act_physical, py::arg("obs"))
      .def("forward", &PyPolicy::forward, py::arg("obs"));

  m.def("train_from_config", &train_from_config, py::arg("config_path"),
        py::arg("out_dir") = "", py::arg("resume") = "");
  m.def("eval_checkpoint", &eval_checkpoint, py::arg("checkpoint"), py::arg("suite"),
        py::arg("episodes") = 20, py::arg("seed") = 3);
}
