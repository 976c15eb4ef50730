#include "terragym/heightfield.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace terragym {

Heightfield::Heightfield(int m, int n, double l, double w)
    : rows(m), cols(n), cell_length(l), cell_width(w), heights(Eigen::MatrixXd::Zero(m, n)) {
  if (m < 1 || n < 1 || l <= 0.0 || w <= 0.0) {
    throw std::invalid_argument("heightfield: need m,n >= 1 and positive cell dimensions");
  }
}

bool Heightfield::valid() const {
  return rows >= 1 && cols >= 1 && cell_length > 0.0 && cell_width > 0.0 &&
         heights.rows() == rows && heights.cols() == cols && heights.allFinite();
}

bool Heightfield::contains(double x, double y) const {
  const double u = (x - origin.x()) / cell_length;
  const double v = (y - origin.y()) / cell_width;
  return u >= 0.0 && u <= static_cast<double>(rows) && v >= 0.0 && v <= static_cast<double>(cols);
}

namespace {
inline int owned_index(double u, int count) {
  int i = static_cast<int>(std::floor(u));
  if (static_cast<double>(i) == u && i > 0) --i;  // boundary belongs to the lower cell
  if (i < 0) i = 0;
  if (i > count - 1) i = count - 1;
  return i;
}
}  // namespace

int Heightfield::row_index(double x) const {
  return owned_index((x - origin.x()) / cell_length, rows);
}

int Heightfield::col_index(double y) const {
  return owned_index((y - origin.y()) / cell_width, cols);
}

double Heightfield::height_at(double x, double y) const {
  if (!contains(x, y)) return out_of_bounds_depth;
  return heights(row_index(x), col_index(y));
}

void Heightfield::save_text(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "HF1 " << rows << ' ' << cols << ' ' << cell_length << ' ' << cell_width << ' '
      << origin.x() << ' ' << origin.y() << '\n';
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out << ' ';
      out << heights(i, j);
    }
    out << '\n';
  }
}

void Heightfield::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  std::ostringstream header;
  header << std::setprecision(std::numeric_limits<double>::max_digits10);
  header << "HF1 " << rows << ' ' << cols << ' ' << cell_length << ' ' << cell_width << ' '
         << origin.x() << ' ' << origin.y() << '\n';
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<float> row(static_cast<size_t>(cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) row[static_cast<size_t>(j)] = static_cast<float>(heights(i, j));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(float) * row.size()));
  }
}

Heightfield Heightfield::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty heightfield file: " + path);
  std::istringstream hs(header);
  std::string magic;
  int m = 0, n = 0;
  double l = 0, w = 0, ox = 0, oy = 0;
  hs >> magic >> m >> n >> l >> w >> ox >> oy;
  if (magic != "HF1" || !hs || m < 1 || n < 1 || l <= 0 || w <= 0) {
    throw std::runtime_error("bad heightfield header in " + path);
  }
  Heightfield f(m, n, l, w);
  f.origin = Eigen::Vector2d(ox, oy);

  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const size_t binary_size = sizeof(float) * static_cast<size_t>(m) * static_cast<size_t>(n);
  if (payload.size() == binary_size) {
    const char* p = payload.data();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        float v;
        std::memcpy(&v, p, sizeof(float));
        p += sizeof(float);
        f.heights(i, j) = static_cast<double>(v);
      }
    }
  } else {
    std::istringstream ts(payload);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!(ts >> f.heights(i, j))) {
          throw std::runtime_error("truncated heightfield data in " + path);
        }
      }
    }
  }
  if (!f.heights.allFinite()) throw std::runtime_error("non-finite heights in " + path);
  return f;
}

}  // namespace terragym
