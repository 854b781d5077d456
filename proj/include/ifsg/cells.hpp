#pragma once

// Integer grid cells and the small graph algorithms run on them.

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ifsg/ifs_core.hpp"

namespace ifsg {

/// Square [x h, (x+1) h] x [y h, (y+1) h] of a grid anchored at the origin.
struct Cell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(c.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(c.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

inline Point cell_center(Cell c, double h) {
  return {(static_cast<double>(c.x) + 0.5) * h, (static_cast<double>(c.y) + 0.5) * h};
}

inline Cell cell_of(Point z, double h) {
  return {static_cast<std::int64_t>(std::floor(z.real() / h)),
          static_cast<std::int64_t>(std::floor(z.imag() / h))};
}

/// Distance from z to the closed square of cell c.
double distance_to_cell(Point z, Cell c, double h);

/// Appends every cell meeting the closed disk B(center, radius).
void rasterize_disk(Point center, double radius, double h, std::vector<Cell>& out);

void sort_unique(std::vector<Cell>& cells);

/// Position lookup for a fixed cell list.
class CellIndex {
 public:
  explicit CellIndex(const std::vector<Cell>& cells);
  std::optional<std::size_t> find(Cell c) const;
  const std::vector<Cell>& cells() const { return *cells_; }

 private:
  const std::vector<Cell>* cells_;
  std::unordered_map<Cell, std::size_t, CellHash> pos_;
};

/// 8-neighbour connected components over the cells with keep[k] set.
/// Returns a label per cell (-1 where not kept) and the component count.
struct Labelling {
  std::vector<int> label;
  int count = 0;
};
Labelling label_components(const CellIndex& index, const std::vector<bool>& keep);

/// Breadth-first shortest 8-neighbour path over allowed cells from `source`
/// to the first cell satisfying `is_target`. Returns cell positions, source
/// first; empty when unreachable.
std::vector<std::size_t> shortest_path(const CellIndex& index, const std::vector<bool>& allowed,
                                       std::size_t source,
                                       const std::function<bool(std::size_t)>& is_target);

/// Nearest-point queries over a fixed point set (bucket grid).
class NearestPoints {
 public:
  NearestPoints(std::vector<Point> points, double bucket);
  /// Distance to the nearest stored point; +inf when empty.
  double nearest_distance(Point z) const;

 private:
  std::vector<Point> points_;
  double bucket_;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> buckets_;
  std::int64_t min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
};

}  // namespace ifsg
