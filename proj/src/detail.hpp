#pragma once

// Small helpers shared by the library sources; not installed.

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>
#include <string>
#include <vector>

#include "ifsg/cells.hpp"

namespace ifsg::detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Unites every pair of disks that touch (up to `slack`), via a bucket grid.
inline void unite_overlapping(const std::vector<Point>& centers, const std::vector<double>& radii,
                              double slack, UnionFind& uf) {
  if (centers.empty()) return;
  double rmax = 0.0;
  for (double r : radii) rmax = std::max(rmax, r);
  const double bucket = std::max(2.0 * rmax + slack, 1e-300);
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
  for (std::size_t k = 0; k < centers.size(); ++k) grid[cell_of(centers[k], bucket)].push_back(k);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Cell c = cell_of(centers[k], bucket);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({c.x + dx, c.y + dy});
        if (it == grid.end()) continue;
        for (auto o : it->second)
          if (o > k && std::abs(centers[k] - centers[o]) <= radii[k] + radii[o] + slack) uf.unite(k, o);
      }
  }
}

/// Fixed six-decimal rendering with negative zero folded to zero.
inline std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

}  // namespace ifsg::detail
