#pragma once

#include <Eigen/Core>
#include <string>

namespace terragym {

// World geometry: a grid of flat-topped pillars. Row index maps to world x,
// column index to world y. A cell (i, j) spans
//   x in [origin_x + i*cell_length, origin_x + (i+1)*cell_length],
//   y in [origin_y + j*cell_width,  origin_y + (j+1)*cell_width],
// with shared boundaries owned by the lower-index cell.
struct Heightfield {
  int rows = 0;               // m
  int cols = 0;               // n
  double cell_length = 0.25;  // pillar extent along x, meters
  double cell_width = 0.25;   // pillar extent along y, meters
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  Eigen::MatrixXd heights;    // rows x cols, meters

  // Height reported for queries outside the grid extent ("off the world").
  double out_of_bounds_depth = -10.0;

  Heightfield() = default;
  Heightfield(int m, int n, double l = 0.25, double w = 0.25);

  bool valid() const;

  double extent_x() const { return rows * cell_length; }
  double extent_y() const { return cols * cell_width; }

  bool contains(double x, double y) const;

  // Cell index of an in-extent point; boundaries owned by the lower-index cell.
  int row_index(double x) const;
  int col_index(double y) const;

  double height_at(double x, double y) const;

  // Text format: header "HF1 <m> <n> <l> <w> <origin_x> <origin_y>" then
  // m lines of n heights. Binary variant: identical header line followed by
  // row-major little-endian 32-bit floats (payload size 4*m*n exactly).
  void save_text(const std::string& path) const;
  void save_binary(const std::string& path) const;
  static Heightfield load(const std::string& path);
};

}  // namespace terragym
