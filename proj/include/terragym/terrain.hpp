#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "terragym/heightfield.hpp"
#include "terragym/rng.hpp"

namespace terragym {

enum class TerrainType { kFlat, kRugged, kHoles, kObstacles, kStairs, kGaps, kHills, kCliff };

const char* terrain_type_name(TerrainType t);
TerrainType terrain_type_from_name(const std::string& name);  // throws on unknown

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const Interval&) const = default;
};

enum class ParamKind { kReal, kIntCount };

struct ParamDef {
  std::string name;
  ParamKind kind;
  // Hard bounds the sampled value (and thus the interval) must respect.
  double min_allowed;
  double max_allowed;
};

// Parameter schema for a terrain type. Interval maps must carry exactly
// these names.
const std::vector<ParamDef>& terrain_schema(TerrainType t);

// One multi-task entry: a terrain family with sampling bounds.
struct TaskSpec {
  TerrainType type = TerrainType::kFlat;
  std::map<std::string, Interval> bounds;
  uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument on schema violations
};

struct TaskDistribution {
  struct Entry {
    TaskSpec spec;
    double weight = 1.0;
    std::string name;  // label used in reports
  };
  std::vector<Entry> entries;

  void validate() const;
};

// Samples one parameter set and builds the heightfield. Deterministic in
// (spec, rows, cols). Stairs override the cell length with the sampled step
// length; all other types keep the default pillar cross-section.
Heightfield generate(const TaskSpec& spec, int rows, int cols);

// Individual generators (also reachable through generate()).
Heightfield generate_flat(int rows, int cols);
Heightfield generate_rugged(double h_min, double h_max, double sigma, int rows, int cols,
                            uint64_t seed);
Heightfield generate_sparse(TerrainType kind, int count, double h, int rows, int cols,
                            uint64_t seed);
Heightfield generate_stairs(double step_height, double step_length, int rows, int cols);
Heightfield generate_gaps(int count, int gap_width_cells, double gap_depth, int rows, int cols,
                          uint64_t seed);
Heightfield generate_hills(int count, double amplitude, double radius_cells, int rows, int cols,
                           uint64_t seed);
Heightfield generate_cliff(int walkway_width_cells, double cliff_depth, int rows, int cols);

// Weighted task choice with a freshly derived seed; deterministic in
// (dist, seed).
TaskSpec sample_task(const TaskDistribution& dist, uint64_t seed);

// Convenience builders for fixed-parameter specs (degenerate intervals).
TaskSpec make_task(TerrainType type, const std::map<std::string, Interval>& bounds, uint64_t seed);

}  // namespace terragym
