#pragma once

// Address counts, local component counts and Zerner-type constants.

#include <optional>
#include <string>
#include <vector>

#include "ifsg/intersection.hpp"

namespace ifsg {

/// Diameter of K, from images of the fixed points (a lower bound that is
/// exact whenever K's extreme points are such images).
double attractor_diameter(const SimSystem& system);

/// Pieces of the cut at scale rho (|K_j| <= rho < |K_parent|) containing x.
std::vector<Multiindex> pieces_at(const SimSystem& system, Point x, double rho, double tol);

struct AddressCount {
  std::size_t count = 0;
  double scale = 0.0;              // the finer of the two agreeing scales
  std::vector<Multiindex> words;   // the cut pieces at that scale
};

/// Number of addresses of x: cut pieces containing x (within tol) at scales
/// |K| 1e-2, 1e-3, ... until two successive counts agree. tol = 0 selects
/// 1e-9 |K|. InconclusiveError when no two scales agree.
AddressCount count_addresses(const SimSystem& system, Point x, double tol = 0.0);

struct ZernerEstimate {
  double a = 1.0;
  std::size_t depth = 0;
  std::size_t value = 0;
  std::vector<std::size_t> by_depth;  // values at depth-2, depth-1, depth (where >= 1)
  bool stabilized = false;
  bool lower_estimate = true;          // always: windows and hits are sampled
  std::size_t samples = 0;
  std::size_t windows = 0;
};

/// Sampled M_a: the largest number of words of length <= depth with
/// a|U| r_min < |K_j| <= a|U| whose sampled points meet a window U. Windows
/// are squares of side |K| r_min^k (k <= depth) on grids offset by half a
/// side from the lower-left corner of K's bounding box.
ZernerEstimate zerner_constant(const SimSystem& system, double a, std::size_t depth,
                               std::size_t sample_budget = 3'000'000);

struct StableNeighborhood {
  Point x;
  std::vector<Multiindex> J;
  std::size_t components = 0;
  std::vector<std::size_t> history;  // component count per tried depth (0 when skipped)
  double scale = 0.0;
  double cell_size = 0.0;
};

/// Deepens the pieces around x until they pairwise meet only at x and the
/// number of components of their union minus a small ball around x agrees
/// at two successive depths. InconclusiveError otherwise.
StableNeighborhood stable_neighborhood(const SimSystem& system, Point x, double tol = 0.0,
                                       std::size_t max_depth = 12);

struct OrderBounds {
  std::size_t m1 = 0;
  std::size_t m_third = 0;
  std::optional<std::size_t> m_half;  // only for dendrites
  std::size_t s = 0;
  std::size_t addresses = 0;   // point: M1; piece: M1^2 s
  std::size_t components = 0;  // point: M_{1/3}; piece: M_{1/3} M1 s
  std::size_t order = 0;       // point: M1^2 s; piece: M1^3 s^2
  bool stabilized = false;     // all Zerner estimates stabilized
};

/// M_1, M_{1/3} (and M_{1/2} for dendrites) at the given depth, with s from fi.
OrderBounds zerner_bounds(const SimSystem& system, const FIReport& fi, bool dendrite, std::size_t depth);

struct OrderOptions {
  std::size_t zerner_depth = 7;
  double tol = 0.0;
  std::optional<OrderBounds> bounds;  // reuse instead of sampling again
};

struct OrderReport {
  Point point;
  std::size_t address_count = 0;
  std::size_t n_components = 0;
  std::size_t ord_estimate = 0;
  OrderBounds bounds;
  bool consistent = true;  // estimates within the sampled bounds
  std::vector<std::string> notes;
};

OrderReport order_report(const SimSystem& system, Point x, const FIReport& fi, bool dendrite,
                         const OrderOptions& options = {});

struct PieceOrderReport {
  Multiindex piece;
  std::vector<Point> boundary;
  std::vector<std::size_t> address_counts;  // per boundary point
  std::size_t address_total = 0;
  std::size_t n_components = 0;
  OrderBounds bounds;
  bool consistent = true;
  std::vector<std::string> notes;
};

PieceOrderReport piece_order_report(const SimSystem& system, const Multiindex& j, const FIReport& fi,
                                    bool dendrite, const OrderOptions& options = {});

}  // namespace ifsg
