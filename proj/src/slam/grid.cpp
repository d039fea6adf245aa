#include "echoslam/slam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "echoslam/errors.hpp"

namespace echoslam::slam {

namespace {

constexpr float kFreeDelta = -0.4f;
constexpr float kOccupiedDelta = 0.85f;
constexpr float kLogOddsClamp = 10.0f;
constexpr double kCellEps = 1e-9;
constexpr int kGrowMargin = 32;

constexpr unsigned char kPgmOccupied = 0;
constexpr unsigned char kPgmFree = 254;
constexpr unsigned char kPgmUnknown = 205;

}  // namespace

OccupancyGrid::OccupancyGrid(double resolution) : res_(resolution) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ConfigError("grid resolution must be positive");
  }
}

int OccupancyGrid::world_to_cell(double coord, double resolution) {
  return static_cast<int>(std::floor(coord / resolution + kCellEps));
}

std::size_t OccupancyGrid::index_of(int ix, int iy) const {
  return static_cast<std::size_t>(iy - min_y_) * width_ +
         static_cast<std::size_t>(ix - min_x_);
}

float OccupancyGrid::log_odds(int ix, int iy) const {
  if (ix < min_x_ || iy < min_y_ || ix >= min_x_ + width_ ||
      iy >= min_y_ + height_) {
    return 0.0f;
  }
  return cells_[index_of(ix, iy)];
}

CellState OccupancyGrid::state(int ix, int iy) const {
  const float v = log_odds(ix, iy);
  if (v > 0.0f) return CellState::kOccupied;
  if (v < 0.0f) return CellState::kFree;
  return CellState::kUnknown;
}

void OccupancyGrid::ensure(int ix, int iy) {
  if (width_ == 0) {
    min_x_ = ix - kGrowMargin;
    min_y_ = iy - kGrowMargin;
    width_ = 2 * kGrowMargin + 1;
    height_ = 2 * kGrowMargin + 1;
    cells_.assign(static_cast<std::size_t>(width_) * height_, 0.0f);
    return;
  }
  if (ix >= min_x_ && iy >= min_y_ && ix < min_x_ + width_ &&
      iy < min_y_ + height_) {
    return;
  }
  const int new_min_x = std::min(min_x_, ix - kGrowMargin);
  const int new_min_y = std::min(min_y_, iy - kGrowMargin);
  const int new_max_x = std::max(min_x_ + width_ - 1, ix + kGrowMargin);
  const int new_max_y = std::max(min_y_ + height_ - 1, iy + kGrowMargin);
  const int new_w = new_max_x - new_min_x + 1;
  const int new_h = new_max_y - new_min_y + 1;
  std::vector<float> grown(static_cast<std::size_t>(new_w) * new_h, 0.0f);
  for (int y = 0; y < height_; ++y) {
    const std::size_t src = static_cast<std::size_t>(y) * width_;
    const std::size_t dst =
        static_cast<std::size_t>(y + min_y_ - new_min_y) * new_w +
        static_cast<std::size_t>(min_x_ - new_min_x);
    std::copy_n(cells_.begin() + src, width_, grown.begin() + dst);
  }
  cells_ = std::move(grown);
  min_x_ = new_min_x;
  min_y_ = new_min_y;
  width_ = new_w;
  height_ = new_h;
}

void OccupancyGrid::apply(int ix, int iy, float delta) {
  ensure(ix, iy);
  float& cell = cells_[index_of(ix, iy)];
  cell = std::clamp(cell + delta, -kLogOddsClamp, kLogOddsClamp);
  ++updates_;
}

void OccupancyGrid::set_log_odds(int ix, int iy, float value) {
  ensure(ix, iy);
  cells_[index_of(ix, iy)] =
      std::clamp(value, -kLogOddsClamp, kLogOddsClamp);
}

void OccupancyGrid::integrate_beam(double ox, double oy, double ex, double ey,
                                   bool hit) {
  if (!std::isfinite(ox) || !std::isfinite(oy) || !std::isfinite(ex) ||
      !std::isfinite(ey)) {
    throw DataError("beam endpoints must be finite");
  }
  const int ocx = world_to_cell(ox, res_);
  const int ocy = world_to_cell(oy, res_);
  const int ecx = world_to_cell(ex, res_);
  const int ecy = world_to_cell(ey, res_);

  const double dx = ex - ox;
  const double dy = ey - oy;
  const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
  const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);

  const double inf = std::numeric_limits<double>::infinity();
  double t_max_x = inf, t_delta_x = inf;
  double t_max_y = inf, t_delta_y = inf;
  if (step_x != 0) {
    const double boundary = (step_x > 0 ? ocx + 1 : ocx) * res_;
    t_max_x = (boundary - ox) / dx;
    t_delta_x = res_ / std::fabs(dx);
  }
  if (step_y != 0) {
    const double boundary = (step_y > 0 ? ocy + 1 : ocy) * res_;
    t_max_y = (boundary - oy) / dy;
    t_delta_y = res_ / std::fabs(dy);
  }

  int cx = ocx, cy = ocy;
  const int max_steps = std::abs(ecx - ocx) + std::abs(ecy - ocy) + 4;
  for (int it = 0; it < max_steps; ++it) {
    if (cx == ecx && cy == ecy) break;
    if (std::min(t_max_x, t_max_y) > 1.0 + kCellEps) break;
    if (cx != ocx || cy != ocy) apply(cx, cy, kFreeDelta);
    if (t_max_x < t_max_y) {
      cx += step_x;
      t_max_x += t_delta_x;
    } else {
      cy += step_y;
      t_max_y += t_delta_y;
    }
  }
  if (ecx != ocx || ecy != ocy) {
    apply(ecx, ecy, hit ? kOccupiedDelta : kFreeDelta);
  }
}

void OccupancyGrid::integrate_scan(const sim::Pose2& pose,
                                   const std::vector<double>& ranges,
                                   double max_range) {
  if (ranges.size() < 2) throw DataError("scan must have at least two beams");
  if (!(max_range > 0.0)) throw ConfigError("max_range must be positive");
  const double step = 2.0 * 3.14159265358979323846 /
                      static_cast<double>(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const double r = ranges[i];
    if (!std::isfinite(r) || r < 0.0 || r > max_range + 1e-9) {
      throw DataError("scan range outside [0, max_range]");
    }
    const double ang = pose.theta + static_cast<double>(i) * step;
    const bool hit = r < max_range - 1e-12;
    integrate_beam(pose.x, pose.y, pose.x + r * std::cos(ang),
                   pose.y + r * std::sin(ang), hit);
  }
}

std::vector<std::pair<int, int>> OccupancyGrid::occupied_cells() const {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (cells_[static_cast<std::size_t>(y) * width_ + x] > 0.0f) {
        out.emplace_back(min_x_ + x, min_y_ + y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool OccupancyGrid::known_bounds(int& min_x, int& min_y, int& max_x,
                                 int& max_y) const {
  bool any = false;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (cells_[static_cast<std::size_t>(y) * width_ + x] != 0.0f) {
        const int wx = min_x_ + x;
        const int wy = min_y_ + y;
        if (!any) {
          min_x = max_x = wx;
          min_y = max_y = wy;
          any = true;
        } else {
          min_x = std::min(min_x, wx);
          max_x = std::max(max_x, wx);
          min_y = std::min(min_y, wy);
          max_y = std::max(max_y, wy);
        }
      }
    }
  }
  return any;
}

void save_pgm(const OccupancyGrid& grid, const std::string& pgm_path,
              const std::string& meta_path) {
  int min_x = 0, min_y = 0, max_x = -1, max_y = -1;
  if (!grid.known_bounds(min_x, min_y, max_x, max_y)) {
    min_x = min_y = 0;
    max_x = max_y = 0;
  }
  const int w = max_x - min_x + 1;
  const int h = max_y - min_y + 1;

  std::ofstream pgm(pgm_path, std::ios::binary);
  if (!pgm) throw DataError("cannot open " + pgm_path + " for writing");
  pgm << "P5\n" << w << " " << h << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(w));
  for (int y = max_y; y >= min_y; --y) {
    for (int x = 0; x < w; ++x) {
      switch (grid.state(min_x + x, y)) {
        case CellState::kOccupied:
          row[static_cast<std::size_t>(x)] = kPgmOccupied;
          break;
        case CellState::kFree:
          row[static_cast<std::size_t>(x)] = kPgmFree;
          break;
        case CellState::kUnknown:
          row[static_cast<std::size_t>(x)] = kPgmUnknown;
          break;
      }
    }
    pgm.write(reinterpret_cast<const char*>(row.data()), w);
  }
  if (!pgm) throw DataError("failed writing " + pgm_path);
  pgm.close();

  std::ofstream meta(meta_path, std::ios::binary);
  if (!meta) throw DataError("cannot open " + meta_path + " for writing");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", grid.resolution());
  meta << "resolution " << buf << "\n";
  meta << "min_x " << min_x << "\n";
  meta << "min_y " << min_y << "\n";
  meta << "width " << w << "\n";
  meta << "height " << h << "\n";
  if (!meta) throw DataError("failed writing " + meta_path);
}

namespace {

double meta_field(std::istream& is, const std::string& key,
                  const std::string& path) {
  std::string line;
  if (!std::getline(is, line)) {
    throw FormatError(path + ": missing field " + key);
  }
  std::istringstream ls(line);
  std::string name;
  double value = 0.0;
  if (!(ls >> name >> value) || name != key) {
    throw FormatError(path + ": expected field " + key);
  }
  std::string extra;
  if (ls >> extra) throw FormatError(path + ": trailing tokens after " + key);
  return value;
}

}  // namespace

OccupancyGrid load_pgm(const std::string& pgm_path,
                       const std::string& meta_path) {
  std::ifstream meta(meta_path, std::ios::binary);
  if (!meta) throw DataError("cannot open " + meta_path);
  const double resolution = meta_field(meta, "resolution", meta_path);
  const double min_x = meta_field(meta, "min_x", meta_path);
  const double min_y = meta_field(meta, "min_y", meta_path);
  const double width = meta_field(meta, "width", meta_path);
  const double height = meta_field(meta, "height", meta_path);
  if (resolution <= 0.0 || width < 1 || height < 1 ||
      width != std::floor(width) || height != std::floor(height) ||
      min_x != std::floor(min_x) || min_y != std::floor(min_y)) {
    throw FormatError(meta_path + ": invalid grid geometry");
  }

  std::ifstream pgm(pgm_path, std::ios::binary);
  if (!pgm) throw DataError("cannot open " + pgm_path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  pgm >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 255) {
    throw FormatError(pgm_path + ": not a maxval-255 P5 image");
  }
  if (w != static_cast<int>(width) || h != static_cast<int>(height)) {
    throw FormatError(pgm_path + ": image size does not match the sidecar");
  }
  pgm.get();  // single whitespace byte after the header
  std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h);
  pgm.read(reinterpret_cast<char*>(pixels.data()),
           static_cast<std::streamsize>(pixels.size()));
  if (pgm.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw FormatError(pgm_path + ": truncated pixel data");
  }

  OccupancyGrid grid(resolution);
  const int base_x = static_cast<int>(min_x);
  const int base_y = static_cast<int>(min_y);
  for (int row = 0; row < h; ++row) {
    const int iy = base_y + (h - 1 - row);
    for (int x = 0; x < w; ++x) {
      const unsigned char px = pixels[static_cast<std::size_t>(row) * w + x];
      float delta = 0.0f;
      if (px == kPgmOccupied) {
        delta = 1.0f;
      } else if (px == kPgmFree) {
        delta = -1.0f;
      } else if (px != kPgmUnknown) {
        throw FormatError(pgm_path + ": unexpected pixel value");
      }
      if (delta != 0.0f) grid.set_log_odds(base_x + x, iy, delta);
    }
  }
  return grid;
}

double map_overlap(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (a.resolution() != b.resolution()) {
    throw ConfigError("map overlap requires equal resolutions");
  }
  const auto ca = a.occupied_cells();
  const auto cb = b.occupied_cells();
  std::size_t inter = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < ca.size() && ib < cb.size()) {
    if (ca[ia] == cb[ib]) {
      ++inter;
      ++ia;
      ++ib;
    } else if (ca[ia] < cb[ib]) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const std::size_t uni = ca.size() + cb.size() - inter;
  if (uni == 0) return 100.0;
  return 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace echoslam::slam
