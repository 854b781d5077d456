#pragma once

// Certified detection of piece intersections by pair expansion.
//
// A pair (u, v) of incomparable words is expanded by repeatedly replacing the
// member with the larger disk by its children. Pairs whose disks are
// separated (with outward rounding) are dropped; that is the only certified
// step. Whatever survives is an over-approximation of K_u ∩ K_v, so a
// missing cluster is proof of absence while a present one is only evidence.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifsg/attractor.hpp"
#include "ifsg/errors.hpp"
#include "ifsg/ifs_core.hpp"

namespace ifsg {

/// A surviving leaf pair together with the lengths of the pair it grew from,
/// which is enough to replay the expansion chain.
struct Witness {
  Multiindex u;
  Multiindex v;
  std::uint16_t origin_u = 0;
  std::uint16_t origin_v = 0;
  friend auto operator<=>(const Witness&, const Witness&) = default;
  friend bool operator==(const Witness&, const Witness&) = default;
};

struct IntersectionCluster {
  Point center;
  double radius = 0.0;  // the tracked intersection lies in B(center, radius)
  std::vector<Witness> witnesses;
  std::optional<std::pair<Address, Address>> address_pair;
};

/// Pair budget exhaustion. `achievable` is the largest disk diameter still on
/// the frontier; `extent` the largest cluster radius formed by that frontier.
struct PairBudgetExceeded : ResourceError {
  PairBudgetExceeded(const std::string& what, double reached, double extent, std::size_t frontier)
      : ResourceError(what, reached), extent(extent), frontier(frontier) {}
  double extent;
  std::size_t frontier;
};

/// Clusters of K_{u0} ∩ K_{v0} at leaf disk diameter <= tol, sorted by center.
std::vector<IntersectionCluster> pair_expand(const SimSystem& system, const Multiindex& u0,
                                             const Multiindex& v0, double tol,
                                             std::size_t pair_budget = Budget::from_env().pairs);

/// Union-find merge of clusters whose disks overlap; witnesses are pooled.
std::vector<IntersectionCluster> merge_clusters(std::vector<IntersectionCluster> clusters);

/// Eventually periodic addresses of the cluster's point, found as a
/// recurrence of the relative map S_u^{-1} S_v along a witness chain with
/// lag <= max_period letters per side, and checked with eval_address.
std::optional<std::pair<Address, Address>> detect_address_pair(const SimSystem& system,
                                                                const IntersectionCluster& cluster,
                                                                std::size_t max_period);

/// Points of K_j shared with another piece of the same level.
std::vector<IntersectionCluster> boundary_points(const SimSystem& system, const Multiindex& j,
                                                 double tol,
                                                 std::size_t pair_budget = Budget::from_env().pairs);

enum class FIVerdict { Certified, Likely, NotFI };
const char* to_string(FIVerdict v);

struct PairResult {
  std::uint8_t i = 0;  // 0-based map indices, i < j
  std::uint8_t j = 0;
  std::vector<std::size_t> counts;          // cluster count per completed tolerance
  std::vector<double> max_radius;           // largest cluster radius per completed tolerance
  std::vector<IntersectionCluster> clusters;  // at the finest completed tolerance
  bool stabilized = false;
  bool overlap = false;    // continuum-overlap signature
  bool resource_limited = false;
  std::string note;
};

/// A point of the critical set, with the first-level pieces that contain it.
struct CriticalPoint {
  IntersectionCluster cluster;
  std::vector<std::uint8_t> pieces;  // 0-based, sorted
};

struct FIReport {
  FIVerdict verdict = FIVerdict::Likely;
  std::size_t s = 0;
  std::vector<double> schedule;
  std::vector<PairResult> pairs;
  std::vector<CriticalPoint> critical;  // pairwise clusters merged across pairs
  std::optional<std::pair<Multiindex, Multiindex>> not_fi_witness;
  std::vector<std::string> notes;

  const PairResult* pair(std::uint8_t i, std::uint8_t j) const;
};

struct FIOptions {
  std::vector<double> schedule{1e-3, 1e-5, 1e-7};
  std::size_t pair_budget = Budget::from_env().pairs;
};

FIReport fi_report(const SimSystem& system, const FIOptions& options = {});

/// Rasterized check of a declared open set (union of axis-aligned
/// rectangles): images pairwise disjoint and contained in the set.
struct Rect {
  double x0, y0, x1, y1;
};
struct OpenSetCheck {
  bool images_inside = false;
  bool images_disjoint = false;
  bool ok() const { return images_inside && images_disjoint; }
};
OpenSetCheck check_open_set(const SimSystem& system, const std::vector<Rect>& open_set,
                            std::size_t resolution = 256);

}  // namespace ifsg
