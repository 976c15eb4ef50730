#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "terragym/terrain.hpp"

using namespace terragym;

namespace {

// Direct 2D convolution with clamp-to-edge indexing; the independent check
// for the separable implementation.
Eigen::MatrixXd conv2_oracle(const Eigen::MatrixXd& raw, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int rows = static_cast<int>(raw.rows());
  const int cols = static_cast<int>(raw.cols());
  Eigen::MatrixXd kernel(2 * radius + 1, 2 * radius + 1);
  double sum = 0.0;
  for (int a = -radius; a <= radius; ++a) {
    for (int b = -radius; b <= radius; ++b) {
      const double v = std::exp(-0.5 * (a * a + b * b) / (sigma * sigma));
      kernel(a + radius, b + radius) = v;
      sum += v;
    }
  }
  kernel /= sum;
  const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int a = -radius; a <= radius; ++a) {
        for (int b = -radius; b <= radius; ++b) {
          acc += kernel(a + radius, b + radius) *
                 raw(clampi(i + a, rows - 1), clampi(j + b, cols - 1));
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

double mean_neighbor_roughness(const Eigen::MatrixXd& h) {
  double acc = 0.0;
  long count = 0;
  for (int i = 0; i < h.rows(); ++i) {
    for (int j = 0; j < h.cols(); ++j) {
      if (i + 1 < h.rows()) {
        acc += std::abs(h(i + 1, j) - h(i, j));
        ++count;
      }
      if (j + 1 < h.cols()) {
        acc += std::abs(h(i, j + 1) - h(i, j));
        ++count;
      }
    }
  }
  return acc / static_cast<double>(count);
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("terrain") {

TEST_CASE("flat is all zeros") {
  const TaskSpec spec = make_task(TerrainType::kFlat, {}, 42);
  const Heightfield f = generate(spec, 5, 7);
  CHECK(f.heights.isZero(0.0));
  CHECK(f.rows == 5);
  CHECK(f.cols == 7);
}

TEST_CASE("stairs rows follow the step rule exactly") {
  const TaskSpec spec =
      make_task(TerrainType::kStairs, {{"h", {0.1, 0.1}}, {"l", {0.3, 0.3}}}, 1);
  const Heightfield f = generate(spec, 4, 3);
  CHECK(f.cell_length == 0.3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(f.heights(i, j) == doctest::Approx(0.1 * i).epsilon(1e-15));
    }
  }
  // Exact increments, all columns.
  for (int i = 0; i + 1 < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(f.heights(i + 1, j) - f.heights(i, j) == doctest::Approx(0.1).epsilon(1e-15));
    }
  }
}

TEST_CASE("degenerate rugged interval gives a constant field") {
  const Heightfield f = generate_rugged(0.05, 0.05, 0.0, 6, 6, 9);
  CHECK((f.heights.array() == 0.05).all());
}

TEST_CASE("rugged with sigma zero equals the raw sample") {
  const Heightfield a = generate_rugged(0.0, 0.08, 0.0, 8, 8, 3);
  // Identity kernel: regeneration with any smoothing disabled must match.
  const Heightfield b = generate_rugged(0.0, 0.08, 0.0, 8, 8, 3);
  CHECK(a.heights == b.heights);
  CHECK(a.heights.minCoeff() >= 0.0);
  CHECK(a.heights.maxCoeff() <= 0.08);
}

TEST_CASE("rugged bounds containment with smoothing") {
  const Heightfield f = generate_rugged(0.0, 0.08, 2.0, 16, 16, 7);
  CHECK(f.heights.minCoeff() >= 0.0);
  CHECK(f.heights.maxCoeff() <= 0.08);
}

TEST_CASE("rugged smoothing equals the direct 2D convolution oracle") {
  const Heightfield raw = generate_rugged(0.0, 0.1, 0.0, 64, 64, 123);
  const Heightfield smoothed = generate_rugged(0.0, 0.1, 2.0, 64, 64, 123);
  const Eigen::MatrixXd expected = conv2_oracle(raw.heights, 2.0);
  CHECK((smoothed.heights - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rugged rejects negative sigma and inverted bounds") {
  CHECK_THROWS_AS(generate_rugged(0.0, 0.1, -1.0, 4, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_rugged(0.2, 0.1, 1.0, 4, 4, 0), std::invalid_argument);
}

TEST_CASE("sparse fields have exactly count cells at h") {
  SUBCASE("one hole") {
    const Heightfield f = generate_sparse(TerrainType::kHoles, 1, -0.5, 6, 5, 11);
    int negatives = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 5; ++j)
        if (f.heights(i, j) != 0.0) {
          CHECK(f.heights(i, j) == -0.5);
          ++negatives;
        }
    CHECK(negatives == 1);
  }
  SUBCASE("zero obstacles") {
    const Heightfield f = generate_sparse(TerrainType::kObstacles, 0, 0.4, 6, 5, 11);
    CHECK(f.heights.isZero(0.0));
  }
  SUBCASE("exhaustive obstacles") {
    const Heightfield f = generate_sparse(TerrainType::kObstacles, 30, 0.4, 6, 5, 11);
    CHECK((f.heights.array() == 0.4).all());
  }
  SUBCASE("count over m*n rejected") {
    CHECK_THROWS_AS(generate_sparse(TerrainType::kHoles, 31, -0.5, 6, 5, 11),
                    std::invalid_argument);
  }
  SUBCASE("hole depth sign enforced") {
    CHECK_THROWS_AS(generate_sparse(TerrainType::kHoles, 1, 0.5, 6, 5, 11),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_sparse(TerrainType::kObstacles, 1, -0.5, 6, 5, 11),
                    std::invalid_argument);
  }
}

TEST_CASE("sparse cardinality over random cases") {
  Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    const int rows = 4 + static_cast<int>(rng.uniform_index(20));
    const int cols = 4 + static_cast<int>(rng.uniform_index(20));
    const int count = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(rows * cols + 1)));
    const Heightfield f =
        generate_sparse(TerrainType::kObstacles, count, 0.3, rows, cols, rng.next_u64());
    CHECK((f.heights.array() != 0.0).count() == count);
  }
}

TEST_CASE("generation is deterministic") {
  const TaskSpec spec = make_task(
      TerrainType::kRugged,
      {{"h_min", {0.0, 0.01}}, {"h_max", {0.03, 0.08}}, {"sigma", {0.0, 2.0}}}, 555);
  const Heightfield a = generate(spec, 32, 32);
  const Heightfield b = generate(spec, 32, 32);
  CHECK(a.heights == b.heights);
  CHECK(a.cell_length == b.cell_length);
}

TEST_CASE("smoothing reduces 4-neighbor roughness monotonically") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const Heightfield s1 = generate_rugged(0.0, 0.1, 1.0, 32, 32, seed);
    const Heightfield s2 = generate_rugged(0.0, 0.1, 2.5, 32, 32, seed);
    CHECK(mean_neighbor_roughness(s2.heights) <=
          mean_neighbor_roughness(s1.heights) + 1e-12);
  }
}

TEST_CASE("gaps, hills and cliff honor their schema bounds") {
  SUBCASE("gaps") {
    const TaskSpec spec = make_task(
        TerrainType::kGaps,
        {{"n", {2, 3}}, {"gap_width", {2, 2}}, {"gap_depth", {-1.0, -0.5}}}, 17);
    const Heightfield f = generate(spec, 64, 16);
    for (int i = 0; i < f.rows; ++i) {
      const bool is_gap = f.heights(i, 0) < 0.0;
      for (int j = 0; j < f.cols; ++j) {
        CHECK((f.heights(i, j) < 0.0) == is_gap);  // full-width rows
        if (is_gap) {
          CHECK(f.heights(i, j) >= -1.0);
          CHECK(f.heights(i, j) <= -0.5);
        }
      }
    }
    // Runs of gap rows have exactly the sampled thickness.
    int run = 0;
    for (int i = 0; i < f.rows; ++i) {
      if (f.heights(i, 0) < 0.0) {
        ++run;
      } else if (run > 0) {
        CHECK(run == 2);
        run = 0;
      }
    }
  }
  SUBCASE("hills amplitude bound") {
    const TaskSpec spec = make_task(
        TerrainType::kHills,
        {{"n", {3, 6}}, {"amplitude", {0.1, 0.3}}, {"radius", {3, 8}}}, 23);
    const Heightfield f = generate(spec, 64, 64);
    CHECK(f.heights.maxCoeff() <= 0.3 + 1e-12);
    CHECK(f.heights.minCoeff() >= 0.0);
  }
  SUBCASE("cliff walkway width") {
    const TaskSpec spec = make_task(
        TerrainType::kCliff, {{"walkway_width", {8, 8}}, {"cliff_depth", {-2.0, -2.0}}}, 5);
    const Heightfield f = generate(spec, 32, 32);
    int walkway_cols = 0;
    for (int j = 0; j < f.cols; ++j) {
      if (f.heights(0, j) == 0.0) ++walkway_cols;
      CHECK(f.heights.col(j).minCoeff() == f.heights.col(j).maxCoeff());  // uniform along x
    }
    CHECK(walkway_cols == 8);
  }
}

TEST_CASE("height_at uses cell ownership and the out-of-bounds sentinel") {
  SUBCASE("flat field in-extent") {
    const Heightfield f = generate_flat(4, 4);
    CHECK(f.height_at(0.3, 0.3) == 0.0);
  }
  SUBCASE("stairs row lookup") {
    const TaskSpec spec =
        make_task(TerrainType::kStairs, {{"h", {0.1, 0.1}}, {"l", {0.3, 0.3}}}, 1);
    const Heightfield f = generate(spec, 4, 3);
    CHECK(f.height_at(0.75, 0.1) == doctest::Approx(0.2).epsilon(1e-15));  // row 2
    // Shared boundary x = 0.6 belongs to row 1.
    CHECK(f.height_at(0.6, 0.1) == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("just outside the extent") {
    const Heightfield f = generate_flat(4, 4);
    CHECK(f.height_at(-0.001, 0.5) == doctest::Approx(-10.0));
    CHECK(f.height_at(0.5, 1.001) == doctest::Approx(-10.0));
  }
}

TEST_CASE("sample_task covers weights correctly") {
  TaskDistribution dist;
  dist.entries.push_back({make_task(TerrainType::kFlat, {}, 0), 1.0, "flat"});

  SUBCASE("single entry always selected") {
    for (uint64_t s = 0; s < 20; ++s) {
      CHECK(sample_task(dist, s).type == TerrainType::kFlat);
    }
  }

  SUBCASE("two equal weights within 3 sigma of half") {
    dist.entries.push_back(
        {make_task(TerrainType::kStairs, {{"h", {0.1, 0.1}}, {"l", {0.3, 0.3}}}, 0), 1.0,
         "stairs"});
    const int draws = 10000;
    int flat_count = 0;
    for (int k = 0; k < draws; ++k) {
      if (sample_task(dist, static_cast<uint64_t>(k)).type == TerrainType::kFlat) ++flat_count;
    }
    // Binomial(10^4, 0.5): 3 sigma = 3 * sqrt(n)/2 = 150.
    CHECK(std::abs(flat_count - draws / 2) <= 150);
  }

  SUBCASE("zero-weight entry never selected") {
    dist.entries.push_back(
        {make_task(TerrainType::kStairs, {{"h", {0.1, 0.1}}, {"l", {0.3, 0.3}}}, 0), 0.0,
         "never"});
    for (int k = 0; k < 10000; ++k) {
      CHECK(sample_task(dist, static_cast<uint64_t>(k)).type == TerrainType::kFlat);
    }
  }

  SUBCASE("empty distribution rejected") {
    TaskDistribution empty;
    CHECK_THROWS_AS(sample_task(empty, 1), std::invalid_argument);
  }

  SUBCASE("sampled specs carry fresh seeds") {
    const TaskSpec a = sample_task(dist, 1);
    const TaskSpec b = sample_task(dist, 2);
    CHECK(a.seed != b.seed);
    CHECK(sample_task(dist, 1).seed == a.seed);
  }
}

TEST_CASE("task spec schema validation") {
  CHECK_THROWS_AS(make_task(TerrainType::kRugged, {{"h_min", {0.0, 0.0}}}, 0),
                  std::invalid_argument);  // missing parameters
  CHECK_THROWS_AS(
      make_task(TerrainType::kFlat, {{"bogus", {0.0, 1.0}}}, 0),
      std::invalid_argument);  // extra parameter
  CHECK_THROWS_AS(
      make_task(TerrainType::kStairs, {{"h", {0.2, 0.1}}, {"l", {0.3, 0.3}}}, 0),
      std::invalid_argument);  // low > high
  CHECK_THROWS_AS(terrain_type_from_name("mesa"), std::invalid_argument);
}

TEST_CASE("heightfield file round trips") {
  const TaskSpec spec = make_task(
      TerrainType::kRugged,
      {{"h_min", {0.0, 0.0}}, {"h_max", {0.08, 0.08}}, {"sigma", {1.0, 1.0}}}, 99);
  const Heightfield f = generate(spec, 12, 9);

  SUBCASE("text preserves doubles exactly") {
    const std::string path = temp_path("tg_field.hf");
    f.save_text(path);
    const Heightfield g = Heightfield::load(path);
    CHECK(g.rows == f.rows);
    CHECK(g.cols == f.cols);
    CHECK(g.heights == f.heights);
    std::remove(path.c_str());
  }

  SUBCASE("binary preserves float32 precision") {
    const std::string path = temp_path("tg_field.hfb");
    f.save_binary(path);
    const Heightfield g = Heightfield::load(path);
    CHECK(g.rows == f.rows);
    for (int i = 0; i < f.rows; ++i) {
      for (int j = 0; j < f.cols; ++j) {
        CHECK(g.heights(i, j) == doctest::Approx(f.heights(i, j)).epsilon(1e-6));
      }
    }
    std::remove(path.c_str());
  }
}

}  // TEST_SUITE
