#include <doctest.h>

#include <cmath>

#include "terragym/sensors.hpp"
#include "terragym/terrain.hpp"

using namespace terragym;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Brute-force reference: march 1 mm steps until the point dips below the
// local pillar top.
double march_ray(const Heightfield& field, const Eigen::Vector3d& origin,
                 const Eigen::Vector3d& dir, double max_range, double step = 1e-3) {
  for (double t = step; t <= max_range; t += step) {
    const Eigen::Vector3d p = origin + t * dir;
    if (!field.contains(p.x(), p.y())) continue;
    if (p.z() < field.height_at(p.x(), p.y())) return t;
  }
  return max_range;
}

// Fine re-march of a bracket; resolves corner grazes that dip below the
// surface for less than one coarse step.
bool confirmed_by_fine_march(const Heightfield& field, const Eigen::Vector3d& origin,
                             const Eigen::Vector3d& dir, double t_hit, double tol) {
  const double lo = std::max(0.0, t_hit - tol);
  const double hi = t_hit + tol;
  for (double t = lo; t <= hi; t += 1e-7) {
    const Eigen::Vector3d p = origin + t * dir;
    if (!field.contains(p.x(), p.y())) continue;
    if (p.z() < field.height_at(p.x(), p.y())) return true;
  }
  return false;
}

Eigen::Quaterniond yaw_quat(double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
}

}  // namespace

TEST_SUITE("sensors") {

TEST_CASE("downward channel over a flat plane matches the closed form") {
  const Heightfield field = generate_flat(128, 128);
  LidarConfig cfg;
  cfg.noise_sigma = 0.0;
  const Eigen::Vector3d pos(16.0, 16.0, 0.5);
  const LidarScan scan = raycast_scan(cfg, pos, Eigen::Quaterniond::Identity(), field, 0);

  // Channel 0 is -15 degrees; expected slant distance 0.5 / sin(15 deg).
  const double expected = 0.5 / std::sin(15.0 * kPi / 180.0);
  CHECK(scan.distances(0, 0) == doctest::Approx(expected).epsilon(1e-9));

  // The horizon channel (elevation 0) sees nothing over a flat field.
  const int mid = 8;  // channels at -15 + 2k degrees; no exact horizontal beam
  (void)mid;
  CHECK(scan.distances(15, 0) == doctest::Approx(10.0));  // +15 degrees: sky
  CHECK(scan.normalized[15 * cfg.azimuth_bins + 0] == doctest::Approx(1.0));
}

TEST_CASE("horizontal ray over an unbounded flat field returns max range") {
  const Heightfield field = generate_flat(64, 64);
  const double d = cast_ray(field, Eigen::Vector3d(8.0, 8.0, 0.4),
                            Eigen::Vector3d(1.0, 0.0, 0.0), 10.0);
  CHECK(d == doctest::Approx(10.0));
}

TEST_CASE("vertical wall side faces are visible") {
  Heightfield field = generate_flat(64, 64);
  // A wall of 1 m pillars across rows 40.. at all columns.
  for (int j = 0; j < field.cols; ++j) field.heights(40, j) = 1.0;
  const Eigen::Vector3d origin(8.0, 8.0, 0.5);
  const double d =
      cast_ray(field, origin, Eigen::Vector3d(1.0, 0.0, 0.0), 10.0);
  CHECK(d == doctest::Approx(40 * 0.25 - 8.0).epsilon(1e-9));  // x = 10 is out of range
}

TEST_CASE("random rays agree with the marching oracle") {
  Rng rng(2024);
  int checked = 0;
  while (checked < 1000) {
    Heightfield field = (checked % 2 == 0)
                            ? generate_rugged(0.0, 0.4, 1.0, 48, 48, rng.next_u64())
                            : generate_sparse(TerrainType::kObstacles,
                                              30 + static_cast<int>(rng.uniform_index(40)), 0.5,
                                              48, 48, rng.next_u64());
    for (int k = 0; k < 10 && checked < 1000; ++k, ++checked) {
      const Eigen::Vector3d origin(rng.uniform(2.0, 10.0), rng.uniform(2.0, 10.0),
                                   rng.uniform(0.45, 1.5));
      const double az = rng.uniform(0.0, 2.0 * kPi);
      const double el = rng.uniform(-0.35, 0.35);
      const Eigen::Vector3d dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                                std::sin(el));
      const double fast = cast_ray(field, origin, dir, 10.0);
      const double slow = march_ray(field, origin, dir, 10.0);
      if (std::abs(fast - slow) <= 2e-3) {
        CHECK(std::abs(fast - slow) <= 2e-3);
      } else {
        // The coarse oracle can only miss a hit, never invent one; an
        // earlier DDA hit must be a graze confirmable at fine resolution.
        CHECK(fast < slow);
        CHECK(confirmed_by_fine_march(field, origin, dir, fast, 2e-3));
      }
    }
  }
}

TEST_CASE("normalized scan stays in the unit interval under noise") {
  LidarConfig cfg;
  cfg.noise_sigma = 0.5;  // exaggerated noise
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Heightfield field = generate_rugged(0.0, 0.3, 0.5, 32, 32, rng.next_u64());
    const Eigen::Vector3d pos(4.0, 4.0, rng.uniform(0.4, 1.0));
    const LidarScan scan = raycast_scan(cfg, pos, yaw_quat(rng.uniform(0, 6.28)), field,
                                        rng.next_u64());
    CHECK(scan.normalized.minCoeff() >= 0.0);
    CHECK(scan.normalized.maxCoeff() <= 1.0);
  }
}

TEST_CASE("rotating the sensor by whole bins permutes azimuth columns") {
  LidarConfig cfg;
  cfg.noise_sigma = 0.0;
  Rng rng(31);
  for (int scene = 0; scene < 100; ++scene) {
    const Heightfield field =
        generate_rugged(0.0, 0.5, 0.8, 40, 40, rng.next_u64());
    const Eigen::Vector3d pos(5.0, 5.0, rng.uniform(0.45, 1.2));
    const double yaw = rng.uniform(0.0, 2.0 * kPi);
    const int shift = 1 + static_cast<int>(rng.uniform_index(static_cast<uint64_t>(cfg.azimuth_bins - 1)));
    const double rotated = yaw + 2.0 * kPi * shift / cfg.azimuth_bins;

    const LidarScan a = raycast_scan(cfg, pos, yaw_quat(yaw), field, 0);
    const LidarScan b = raycast_scan(cfg, pos, yaw_quat(rotated), field, 0);
    for (int c = 0; c < cfg.channels; ++c) {
      for (int k = 0; k < cfg.azimuth_bins; ++k) {
        const int k2 = (k + shift) % cfg.azimuth_bins;
        CHECK(a.distances(c, k2) == doctest::Approx(b.distances(c, k)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("proprioception extracts euler angles from the quaternion") {
  RobotState s;
  SUBCASE("identity orientation") {
    const ProprioReading r = proprioception(s);
    CHECK(r.roll == 0.0);
    CHECK(r.pitch == 0.0);
  }
  SUBCASE("pure roll") {
    s.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitX()));
    const ProprioReading r = proprioception(s);
    CHECK(r.roll == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::abs(r.pitch) < 1e-12);
  }
  SUBCASE("zero noise is bit-identical to ground truth") {
    s.angular_velocity = Eigen::Vector3d(0.1, -0.2, 0.3);
    s.joint_positions.setLinSpaced(12, -0.5, 0.5);
    const ProprioReading a = proprioception(s, 0.0, 1);
    const ProprioReading b = proprioception(s, 0.0, 2);
    CHECK(a.angular_velocity == b.angular_velocity);
    CHECK(a.joint_positions == b.joint_positions);
  }
  SUBCASE("combined roll-pitch-yaw round trip") {
    Rng rng(9);
    for (int k = 0; k < 200; ++k) {
      const double roll = rng.uniform(-1.2, 1.2);
      const double pitch = rng.uniform(-1.2, 1.2);
      const double yaw = rng.uniform(-3.0, 3.0);
      const Eigen::Quaterniond q = yaw_quat(yaw) *
                                   Eigen::Quaterniond(Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY())) *
                                   Eigen::Quaterniond(Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()));
      const Eigen::Vector3d rpy = quaternion_to_rpy(q);
      CHECK(rpy.x() == doctest::Approx(roll).epsilon(1e-9));
      CHECK(rpy.y() == doctest::Approx(pitch).epsilon(1e-9));
      CHECK(rpy.z() == doctest::Approx(yaw).epsilon(1e-9));
    }
  }
}

TEST_CASE("goal sensor distance and heading") {
  RobotState s;
  s.position = Eigen::Vector3d(1.0, 2.0, 0.4);

  SUBCASE("straight ahead") {
    const GoalReading g = goal_sensor(s, Eigen::Vector3d(4.0, 2.0, 0.4));
    CHECK(g.distance == doctest::Approx(3.0));
    CHECK(g.heading == doctest::Approx(0.0));
  }
  SUBCASE("directly left is positive half pi") {
    const GoalReading g = goal_sensor(s, Eigen::Vector3d(1.0, 5.0, 0.4));
    CHECK(g.heading == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  }
  SUBCASE("diagonal at yaw zero") {
    const GoalReading g = goal_sensor(s, s.position + Eigen::Vector3d(1.0, 1.0, 0.0));
    CHECK(g.distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(g.heading == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  }
  SUBCASE("coincident goal has zero heading") {
    const GoalReading g = goal_sensor(s, s.position);
    CHECK(g.distance < 1e-9);
    CHECK(g.heading == 0.0);
  }
  SUBCASE("heading always wraps into (-pi, pi]") {
    Rng rng(3);
    for (int k = 0; k < 500; ++k) {
      s.orientation = yaw_quat(rng.uniform(-10.0, 10.0));
      const GoalReading g = goal_sensor(
          s, s.position + Eigen::Vector3d(rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0));
      CHECK(g.heading > -kPi);
      CHECK(g.heading <= kPi);
    }
  }
}

}  // TEST_SUITE
