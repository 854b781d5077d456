#pragma once

// Invariant arcs at fixed points and their logarithmic-spiral slopes.

#include <optional>
#include <string>
#include <vector>

#include "ifsg/intersection.hpp"

namespace ifsg {

/// Increment of arg(z - z0) along the polyline. Segments turning by more
/// than a quarter turn are subdivided. DomainError when a vertex is z0,
/// PrecisionError when a segment passes through z0.
double arg_increment(const std::vector<Point>& polyline, Point z0);

struct InvariantArc {
  Point z0;
  std::vector<Point> polyline;  // from y towards z0, ending at z0
  Multiindex period_word;       // word of the period map
  Similarity period_map;
  std::size_t fundamental_count = 1;  // n with period_map^n(arc) inside arc
  /// Polyline positions of period_map^{kn}(y); junctions[1] ends the fundamental piece.
  std::vector<std::size_t> junctions;
  double cell_size = 0.0;  // resolution of the cell paths (0 for synthetic arcs)
};

/// Components of K minus z0 that reach away from z0, one point in each.
std::vector<Point> component_seeds(const SimSystem& system, Point z0);

/// Invariant arc of fix(S_i) inside the component of K minus fix(S_i) that
/// holds `seed`, built from shortest cell paths at resolution eps.
/// Orientation-reversing words are doubled; the word is raised to the power
/// that fixes the component.
InvariantArc invariant_arc(const SimSystem& system, const Multiindex& i, Point seed, double eps);

/// Logarithmic spiral from z0 + 1 towards the fixed point of `s`, turning by
/// arg(a) + 2 pi m per application of s. Orientation-preserving maps only.
InvariantArc spiral_arc(const Similarity& s, int m, double eps, std::size_t points_per_piece = 256);

/// The same arc with period word i.i (twice the period map).
InvariantArc with_doubled_period(const InvariantArc& arc);

struct SlopeEstimate {
  double lambda = 0.0;
  long winding = 0;
  double delta_arg = 0.0;  // over the fundamental piece
  double log_lip = 0.0;    // n log ratio(period map)
  double residual = 0.0;   // max - min of arg(z - z0) - lambda log|z - z0| over vertices
};

SlopeEstimate slope_parameter(const InvariantArc& arc);

struct ArmSlope {
  Address address;
  Point anchor;  // fixed point of the period
  Point seed;
  InvariantArc arc;
  SlopeEstimate slope;
};

/// Arcs and slopes in every component of K minus fix(S_i).
std::vector<ArmSlope> slopes_at_fixed_point(const SimSystem& system, const Multiindex& i, double eps);

enum class MatchStatus { Matched, Mismatched, Inconclusive };
const char* to_string(MatchStatus s);

struct ParameterMatch {
  MatchStatus status = MatchStatus::Inconclusive;
  double lambda = 0.0;
  std::vector<ArmSlope> arms;
  std::string note;
};

/// Slopes at the fixed points behind the eventually periodic addresses of p
/// (every component, every detected address); matched when all agree within tol.
ParameterMatch parameter_match(const SimSystem& system, const IntersectionCluster& p, double tol = 1e-3,
                               double eps = 1e-3);

}  // namespace ifsg
