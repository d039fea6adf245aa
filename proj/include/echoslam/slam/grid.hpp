#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "echoslam/sim/geometry.hpp"

namespace echoslam::slam {

enum class CellState { kUnknown, kFree, kOccupied };

// Log-odds occupancy grid anchored to the world frame: cell (ix, iy) spans
// [ix*res, (ix+1)*res) x [iy*res, (iy+1)*res), so grids built from
// different runs at the same resolution index identical world cells. A
// coordinate sitting on a boundary within 1e-9 cells belongs to the upper
// cell. Storage grows on demand; the cell holding a beam origin is never
// updated by that beam.
class OccupancyGrid {
 public:
  explicit OccupancyGrid(double resolution);

  double resolution() const { return res_; }

  static int world_to_cell(double coord, double resolution);

  float log_odds(int ix, int iy) const;
  CellState state(int ix, int iy) const;
  void set_log_odds(int ix, int iy, float value);

  // Marks the cells crossed between origin and endpoint as free and the
  // endpoint cell as occupied (hit) or free (no return).
  void integrate_beam(double ox, double oy, double ex, double ey, bool hit);

  // One beam per range; beam i points at pose.theta + i * (2*pi/n). Ranges
  // equal to max_range count as no-return beams.
  void integrate_scan(const sim::Pose2& pose, const std::vector<double>& ranges,
                      double max_range);

  // Occupied cells in (ix, iy) lexicographic order.
  std::vector<std::pair<int, int>> occupied_cells() const;

  // Inclusive cell-index bounds of every known (non-zero) cell; false when
  // the grid is empty.
  bool known_bounds(int& min_x, int& min_y, int& max_x, int& max_y) const;

  std::int64_t update_count() const { return updates_; }

 private:
  void apply(int ix, int iy, float delta);
  void ensure(int ix, int iy);
  std::size_t index_of(int ix, int iy) const;

  double res_;
  int min_x_ = 0;
  int min_y_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<float> cells_;
  std::int64_t updates_ = 0;
};

// Portable P5 export: occupied 0, free 254, unknown 205, top row = highest
// cell row. The text sidecar records resolution and the cell-index anchor
// so the image round-trips into a world-aligned grid (states only; the
// log-odds magnitudes are quantized away).
void save_pgm(const OccupancyGrid& grid, const std::string& pgm_path,
              const std::string& meta_path);
OccupancyGrid load_pgm(const std::string& pgm_path,
                       const std::string& meta_path);

// Intersection over union of the occupied cells, in percent. Two grids
// with no occupied cells at all count as fully overlapping.
double map_overlap(const OccupancyGrid& a, const OccupancyGrid& b);

}  // namespace echoslam::slam
