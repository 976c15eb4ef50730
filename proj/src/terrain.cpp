#include "terragym/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace terragym {

const char* terrain_type_name(TerrainType t) {
  switch (t) {
    case TerrainType::kFlat: return "flat";
    case TerrainType::kRugged: return "rugged";
    case TerrainType::kHoles: return "holes";
    case TerrainType::kObstacles: return "obstacles";
    case TerrainType::kStairs: return "stairs";
    case TerrainType::kGaps: return "gaps";
    case TerrainType::kHills: return "hills";
    case TerrainType::kCliff: return "cliff";
  }
  return "?";
}

TerrainType terrain_type_from_name(const std::string& name) {
  for (TerrainType t : {TerrainType::kFlat, TerrainType::kRugged, TerrainType::kHoles,
                        TerrainType::kObstacles, TerrainType::kStairs, TerrainType::kGaps,
                        TerrainType::kHills, TerrainType::kCliff}) {
    if (name == terrain_type_name(t)) return t;
  }
  throw std::invalid_argument("unknown terrain type: " + name);
}

const std::vector<ParamDef>& terrain_schema(TerrainType t) {
  static const std::vector<ParamDef> kFlat = {};
  static const std::vector<ParamDef> kRugged = {
      {"h_min", ParamKind::kReal, -5.0, 5.0},
      {"h_max", ParamKind::kReal, -5.0, 5.0},
      {"sigma", ParamKind::kReal, 0.0, 32.0},
  };
  // Holes carve below grade, obstacles rise above it; the sign of h encodes
  // which one, so the magnitudes cannot be confused.
  static const std::vector<ParamDef> kHoles = {
      {"n", ParamKind::kIntCount, 0.0, 1e9},
      {"h", ParamKind::kReal, -5.0, -1e-6},
  };
  static const std::vector<ParamDef> kObstacles = {
      {"n", ParamKind::kIntCount, 0.0, 1e9},
      {"h", ParamKind::kReal, 1e-6, 5.0},
  };
  static const std::vector<ParamDef> kStairs = {
      {"h", ParamKind::kReal, -1.0, 1.0},
      {"l", ParamKind::kReal, 0.05, 5.0},
  };
  static const std::vector<ParamDef> kGaps = {
      {"n", ParamKind::kIntCount, 0.0, 64.0},
      {"gap_width", ParamKind::kIntCount, 1.0, 16.0},
      {"gap_depth", ParamKind::kReal, -5.0, -1e-6},
  };
  static const std::vector<ParamDef> kHills = {
      {"n", ParamKind::kIntCount, 1.0, 64.0},
      {"amplitude", ParamKind::kReal, 1e-6, 5.0},
      {"radius", ParamKind::kIntCount, 1.0, 64.0},
  };
  static const std::vector<ParamDef> kCliff = {
      {"walkway_width", ParamKind::kIntCount, 1.0, 256.0},
      {"cliff_depth", ParamKind::kReal, -5.0, -1e-6},
  };
  switch (t) {
    case TerrainType::kFlat: return kFlat;
    case TerrainType::kRugged: return kRugged;
    case TerrainType::kHoles: return kHoles;
    case TerrainType::kObstacles: return kObstacles;
    case TerrainType::kStairs: return kStairs;
    case TerrainType::kGaps: return kGaps;
    case TerrainType::kHills: return kHills;
    case TerrainType::kCliff: return kCliff;
  }
  return kFlat;
}

void TaskSpec::validate() const {
  const auto& schema = terrain_schema(type);
  if (bounds.size() != schema.size()) {
    throw std::invalid_argument(std::string("task '") + terrain_type_name(type) +
                                "': expected " + std::to_string(schema.size()) +
                                " parameters, got " + std::to_string(bounds.size()));
  }
  for (const auto& def : schema) {
    auto it = bounds.find(def.name);
    if (it == bounds.end()) {
      throw std::invalid_argument(std::string("task '") + terrain_type_name(type) +
                                  "': missing parameter " + def.name);
    }
    const Interval& iv = it->second;
    if (!(iv.low <= iv.high)) {
      throw std::invalid_argument("degenerate bounds for " + def.name + ": low > high");
    }
    if (iv.low < def.min_allowed || iv.high > def.max_allowed) {
      throw std::invalid_argument("bounds for " + def.name + " outside allowed range");
    }
  }
  if (type == TerrainType::kRugged) {
    // Interval-wise consistency so every sampled (h_min, h_max) pair is ordered.
    if (bounds.at("h_min").high > bounds.at("h_max").low) {
      throw std::invalid_argument("rugged: h_min interval must lie below h_max interval");
    }
  }
}

void TaskDistribution::validate() const {
  if (entries.empty()) throw std::invalid_argument("task distribution is empty");
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.weight < 0.0) throw std::invalid_argument("negative task weight");
    e.spec.validate();
    total += e.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("task weights sum to zero");
}

TaskSpec make_task(TerrainType type, const std::map<std::string, Interval>& bounds,
                   uint64_t seed) {
  TaskSpec spec;
  spec.type = type;
  spec.bounds = bounds;
  spec.seed = seed;
  spec.validate();
  return spec;
}

namespace {

constexpr double kDefaultCell = 0.25;

double sample_param(Rng& rng, const ParamDef& def, const Interval& iv) {
  if (def.kind == ParamKind::kIntCount) {
    const int64_t lo = static_cast<int64_t>(std::ceil(iv.low));
    const int64_t hi = static_cast<int64_t>(std::floor(iv.high));
    if (hi < lo) throw std::invalid_argument("empty integer interval for " + def.name);
    return static_cast<double>(rng.uniform_int(lo, hi));
  }
  return iv.low == iv.high ? iv.low : rng.uniform(iv.low, iv.high);
}

// Partial Fisher-Yates: first `count` entries of a shuffled 0..total-1.
std::vector<int> sample_without_replacement(int total, int count, Rng& rng) {
  std::vector<int> idx(static_cast<size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < count; ++k) {
    const int j = k + static_cast<int>(rng.uniform_index(static_cast<uint64_t>(total - k)));
    std::swap(idx[static_cast<size_t>(k)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(count));
  return idx;
}

}  // namespace

Heightfield generate_flat(int rows, int cols) { return Heightfield(rows, cols); }

Heightfield generate_rugged(double h_min, double h_max, double sigma, int rows, int cols,
                            uint64_t seed) {
  if (h_min > h_max) throw std::invalid_argument("rugged: h_min > h_max");
  if (sigma < 0.0) throw std::invalid_argument("rugged: sigma < 0");
  Heightfield f(rows, cols);
  Rng rng(seed);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      f.heights(i, j) = h_min == h_max ? h_min : rng.uniform(h_min, h_max);

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  if (radius == 0) return f;

  std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * (k / sigma) * (k / sigma));
    kernel[static_cast<size_t>(k + radius)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;

  const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
  // Separable passes with clamp-to-edge indexing; equals the direct 2D
  // convolution because the clamps act per axis.
  Eigen::MatrixXd tmp(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<size_t>(k + radius)] * f.heights(clampi(i + k, rows - 1), j);
      }
      tmp(i, j) = acc;
    }
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[static_cast<size_t>(k + radius)] * tmp(i, clampi(j + k, cols - 1));
      }
      f.heights(i, j) = acc;
    }
  }
  return f;
}

Heightfield generate_sparse(TerrainType kind, int count, double h, int rows, int cols,
                            uint64_t seed) {
  if (kind != TerrainType::kHoles && kind != TerrainType::kObstacles) {
    throw std::invalid_argument("generate_sparse: kind must be holes or obstacles");
  }
  if (count < 0 || count > rows * cols) {
    throw std::invalid_argument("generate_sparse: count outside [0, m*n]");
  }
  if (kind == TerrainType::kHoles && !(h < 0.0)) {
    throw std::invalid_argument("holes: depth h must be negative");
  }
  if (kind == TerrainType::kObstacles && !(h > 0.0)) {
    throw std::invalid_argument("obstacles: height h must be positive");
  }
  Heightfield f(rows, cols);
  Rng rng(seed);
  for (int cell : sample_without_replacement(rows * cols, count, rng)) {
    f.heights(cell / cols, cell % cols) = h;
  }
  return f;
}

Heightfield generate_stairs(double step_height, double step_length, int rows, int cols) {
  if (step_length <= 0.0) throw std::invalid_argument("stairs: step length must be positive");
  Heightfield f(rows, cols, step_length, kDefaultCell);
  for (int i = 1; i < rows; ++i) {
    f.heights.row(i) = f.heights.row(i - 1).array() + step_height;
  }
  return f;
}

Heightfield generate_gaps(int count, int gap_width_cells, double gap_depth, int rows, int cols,
                          uint64_t seed) {
  if (gap_width_cells < 1) throw std::invalid_argument("gaps: width must be >= 1 cell");
  if (!(gap_depth < 0.0)) throw std::invalid_argument("gaps: depth must be negative");
  Heightfield f(rows, cols);
  Rng rng(seed);
  // Keep a start strip and the far edge solid so episodes can begin and end
  // on the terrain.
  const int lo = std::min(rows - 1, 12);
  const int hi = rows - 4 - gap_width_cells;
  if (hi < lo) return f;
  std::vector<int> placed;
  int attempts = 0;
  while (static_cast<int>(placed.size()) < count && attempts < 200 * std::max(count, 1)) {
    ++attempts;
    const int r = static_cast<int>(rng.uniform_int(lo, hi));
    bool overlaps = false;
    for (int p : placed) {
      if (std::abs(p - r) < gap_width_cells + 1) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    placed.push_back(r);
    for (int k = 0; k < gap_width_cells; ++k) {
      f.heights.row(r + k).setConstant(gap_depth);
    }
  }
  return f;
}

Heightfield generate_hills(int count, double amplitude, double radius_cells, int rows, int cols,
                           uint64_t seed) {
  if (count < 1) throw std::invalid_argument("hills: need at least one bump");
  if (!(amplitude > 0.0) || !(radius_cells > 0.0)) {
    throw std::invalid_argument("hills: amplitude and radius must be positive");
  }
  Heightfield f(rows, cols);
  Rng rng(seed);
  for (int b = 0; b < count; ++b) {
    const double ci = rng.uniform(0.0, rows - 1.0);
    const double cj = rng.uniform(0.0, cols - 1.0);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const double d2 = (i - ci) * (i - ci) + (j - cj) * (j - cj);
        f.heights(i, j) += amplitude * std::exp(-0.5 * d2 / (radius_cells * radius_cells));
      }
    }
  }
  // Superposed bumps may exceed a single amplitude; cap so the field honors
  // the sampled bound.
  f.heights = f.heights.cwiseMin(amplitude);
  return f;
}

Heightfield generate_cliff(int walkway_width_cells, double cliff_depth, int rows, int cols) {
  if (walkway_width_cells < 1) throw std::invalid_argument("cliff: walkway must be >= 1 cell");
  if (!(cliff_depth < 0.0)) throw std::invalid_argument("cliff: depth must be negative");
  Heightfield f(rows, cols);
  const int width = std::min(walkway_width_cells, cols);
  const int first = (cols - width) / 2;
  for (int j = 0; j < cols; ++j) {
    if (j < first || j >= first + width) f.heights.col(j).setConstant(cliff_depth);
  }
  return f;
}

Heightfield generate(const TaskSpec& spec, int rows, int cols) {
  spec.validate();
  if (rows < 2 || cols < 2) throw std::invalid_argument("generate: need rows, cols >= 2");
  Rng rng(spec.seed);
  std::map<std::string, double> p;
  for (const auto& def : terrain_schema(spec.type)) {
    p[def.name] = sample_param(rng, def, spec.bounds.at(def.name));
  }
  const uint64_t sub = rng.next_u64();  // seed for the generator's own draws
  switch (spec.type) {
    case TerrainType::kFlat:
      return generate_flat(rows, cols);
    case TerrainType::kRugged:
      return generate_rugged(p["h_min"], p["h_max"], p["sigma"], rows, cols, sub);
    case TerrainType::kHoles:
      return generate_sparse(TerrainType::kHoles, static_cast<int>(p["n"]), p["h"], rows, cols,
                             sub);
    case TerrainType::kObstacles:
      return generate_sparse(TerrainType::kObstacles, static_cast<int>(p["n"]), p["h"], rows,
                             cols, sub);
    case TerrainType::kStairs:
      return generate_stairs(p["h"], p["l"], rows, cols);
    case TerrainType::kGaps:
      return generate_gaps(static_cast<int>(p["n"]), static_cast<int>(p["gap_width"]),
                           p["gap_depth"], rows, cols, sub);
    case TerrainType::kHills:
      return generate_hills(static_cast<int>(p["n"]), p["amplitude"], p["radius"], rows, cols,
                            sub);
    case TerrainType::kCliff:
      return generate_cliff(static_cast<int>(p["walkway_width"]), p["cliff_depth"], rows, cols);
  }
  throw std::invalid_argument("unknown terrain type");
}

TaskSpec sample_task(const TaskDistribution& dist, uint64_t seed) {
  dist.validate();
  Rng rng(seed);
  double total = 0.0;
  for (const auto& e : dist.entries) total += e.weight;
  const double u = rng.uniform(0.0, total);
  double acc = 0.0;
  size_t chosen = dist.entries.size() - 1;
  for (size_t i = 0; i < dist.entries.size(); ++i) {
    acc += dist.entries[i].weight;
    if (u < acc) {
      chosen = i;
      break;
    }
  }
  // A zero-weight entry can only be reached through accumulated float error;
  // skip to the next weighted one.
  while (dist.entries[chosen].weight == 0.0 && chosen + 1 < dist.entries.size()) ++chosen;
  while (dist.entries[chosen].weight == 0.0 && chosen > 0) --chosen;
  TaskSpec spec = dist.entries[chosen].spec;
  spec.seed = rng.next_u64();
  return spec;
}

}  // namespace terragym
