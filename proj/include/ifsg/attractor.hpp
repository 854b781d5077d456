#pragma once

// Certified cell covers of the attractor and its pieces.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ifsg/cells.hpp"
#include "ifsg/ifs_core.hpp"

namespace ifsg {

/// Work limits shared by the cover and pair-expansion engines.
/// IFSG_BUDGET in the environment overrides both limits.
struct Budget {
  std::size_t leaves = 20'000'000;
  std::size_t pairs = 1'000'000;

  static Budget from_env();
};

/// A disk mapped into itself by every map of the system, so it holds K.
struct BoundingDisk {
  Point center;
  double radius = 0.0;
};

/// Center fix(S_1), radius max_i |S_i(c) - c| / (1 - r_max).
BoundingDisk bounding_disk(const SimSystem& system);

/// Disk holding K_w = S_w(K), given the disk of K.
inline BoundingDisk piece_disk(const BoundingDisk& disk, const Similarity& s_w) {
  return {s_w(disk.center), s_w.ratio() * disk.radius};
}

/// Visits the leaves of the word tree below `target`: the first words w
/// (target as a prefix) whose piece disk has diameter <= eps.
void for_each_leaf(const SimSystem& system, const BoundingDisk& disk, const Multiindex& target,
                   double eps, const std::function<void(const Multiindex&, const Similarity&)>& visit);

/// Number of leaves for eps, stopping early once `cap` is exceeded.
std::size_t count_leaves(const SimSystem& system, const BoundingDisk& disk, const Multiindex& target,
                         double eps, std::size_t cap);

struct CellCover {
  double cell_size = 0.0;
  std::vector<Cell> cells;  // sorted, unique
  /// Hausdorff distance between the cell union and the true set is at most this.
  double error_bound = 0.0;
  std::size_t leaf_count = 0;

  bool contains(Cell c) const;
  Point center(Cell c) const { return cell_center(c, cell_size); }
};

struct CoverOptions {
  double cell_size = 0.0;  // 0 selects eps / 2
  std::size_t leaf_budget = Budget{}.leaves;
};

/// Cover of K_target (the whole attractor for the empty word) whose leaves
/// have certified diameter <= eps. error_bound <= 2 eps with the default grid.
/// ResourceError (carrying the finest eps that fits) when over budget.
CellCover cover(const SimSystem& system, const Multiindex& target, double eps,
                const CoverOptions& options = {});

/// Upper bound on the Hausdorff distance between the two true sets.
double hausdorff_upper(const CellCover& a, const CellCover& b);

struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on dist(x, K_j) by best-first refinement of piece disks, until the
/// gap is at most `resolution` or `max_nodes` pieces were expanded. Upper
/// bounds come from images of fixed points, which lie in K.
DistanceBounds piece_distance(const SimSystem& system, const BoundingDisk& disk, const Multiindex& j,
                              Point x, double resolution, std::size_t max_nodes = 200'000);

/// dist(x, K_j) <= tol, decided from piece_distance at resolution tol / 2.
bool piece_contains(const SimSystem& system, const BoundingDisk& disk, const Multiindex& j, Point x,
                    double tol);

/// Plain PBM (P1), row-major from the top row, 1 = occupied cell.
std::string to_pbm(const CellCover& cover);

struct SvgLayer {
  std::vector<std::vector<Point>> polylines;
  std::vector<std::pair<Point, double>> circles;
};

/// Cells as rectangles, plus optional polylines and circles, in a y-up frame.
std::string to_svg(const CellCover& cover, const SvgLayer& overlay = {});

}  // namespace ifsg
