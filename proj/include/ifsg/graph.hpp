#pragma once

// Bipartite intersection graphs: pieces (white) against contact points (black).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ifsg/intersection.hpp"

namespace ifsg {

/// Contact point S_w(p_k): p_k is the k-th point of the first-level critical
/// set and w the shortest common prefix of the pieces meeting there. Graphs
/// of different levels use the same names for the same points.
struct BlackId {
  Multiindex word;
  std::uint32_t index = 0;
  friend auto operator<=>(const BlackId&, const BlackId&) = default;
  friend bool operator==(const BlackId&, const BlackId&) = default;
  std::string str() const;
};

struct BlackVertex {
  Point center;
  double radius = 0.0;
};

class IntersectionGraph {
 public:
  void add_white(const Multiindex& w) { white_.insert(w); }
  void add_black(const BlackId& id, BlackVertex v) { black_.insert_or_assign(id, v); }
  /// Both endpoints must already be present.
  void add_edge(const Multiindex& w, const BlackId& b);
  void remove_white(const Multiindex& w);
  void remove_black(const BlackId& b);

  const std::set<Multiindex>& white() const { return white_; }
  const std::map<BlackId, BlackVertex>& black() const { return black_; }
  const std::set<std::pair<Multiindex, BlackId>>& edges() const { return edges_; }

  std::vector<BlackId> neighbors(const Multiindex& w) const;
  std::vector<Multiindex> neighbors(const BlackId& b) const;
  bool has_white(const Multiindex& w) const { return white_.count(w) > 0; }
  bool has_black(const BlackId& b) const { return black_.count(b) > 0; }

  /// Same vertex names and edges; black coordinates are not compared.
  friend bool operator==(const IntersectionGraph& a, const IntersectionGraph& b) {
    return a.white_ == b.white_ && a.edges_ == b.edges_ && a.black_names() == b.black_names();
  }

 private:
  std::set<BlackId> black_names() const;

  std::set<Multiindex> white_;
  std::map<BlackId, BlackVertex> black_;
  std::set<std::pair<Multiindex, BlackId>> edges_;
};

struct GraphOptions {
  std::size_t max_white = 200'000;
};

/// Γ_n: pieces of level n and their contact points. Contacts are found among
/// the first-level clusters of `fi` carried to level n by S_w.
IntersectionGraph build_graph(const SimSystem& system, std::size_t n, const FIReport& fi,
                              const GraphOptions& options = {});

enum class TreeStatus { Tree, NotTree, Disconnected };
const char* to_string(TreeStatus s);

struct TreeCheck {
  TreeStatus status = TreeStatus::Tree;
  /// Shortest cycle as alternating vertex labels, first label repeated at the end.
  std::vector<std::string> cycle;
};

TreeCheck is_tree(const IntersectionGraph& g);

/// Where a boundary point of the refined piece goes: a template white
/// (a new edge) or a template black (the two points are identified).
using GlueTarget = std::variant<Multiindex, BlackId>;

/// Replaces white `l` by `tmpl`. Template vertices are renamed by prefixing
/// l (whites l.w, blacks (l.w, k)) and template black centers are moved by
/// `place`. Identified points keep their name in g. Throws ContractViolation
/// when a neighbour of l is not glued, a target is missing, or two points are
/// glued to one template black.
IntersectionGraph refine_graph(const IntersectionGraph& g, const Multiindex& l, const IntersectionGraph& tmpl,
                               const std::map<BlackId, GlueTarget>& gluing, const Similarity& place = {});

/// The gluing of the self-similar refinement of l by Γ_1.
std::map<BlackId, GlueTarget> natural_gluing(const SimSystem& system, const IntersectionGraph& g,
                                             const Multiindex& l, const IntersectionGraph& gamma1,
                                             const FIReport& fi);

/// Γ_{n+1} from Γ_n by refining every white of Γ_n with Γ_1.
IntersectionGraph refine_level(const SimSystem& system, const IntersectionGraph& g, const IntersectionGraph& gamma1,
                               const FIReport& fi);

enum class DendriteOutcome { Dendrite, NotDendrite, Inconclusive };
const char* to_string(DendriteOutcome o);

struct DendriteVerdict {
  DendriteOutcome outcome = DendriteOutcome::Inconclusive;
  std::vector<std::string> cycle;  // witness when NotDendrite
  std::size_t cycle_level = 0;
  std::size_t checked_levels = 0;
  bool resource_limited = false;
  std::string note;
  FIReport fi;
};

DendriteVerdict dendrite_verdict(const SimSystem& system, std::size_t max_level, const FIOptions& fi_options = {});

/// Graphviz text: whites as boxes, blacks as filled circles labeled with
/// their coordinates; output depends only on the graph.
std::string to_dot(const IntersectionGraph& g, const std::vector<std::string>& highlight_cycle = {});

}  // namespace ifsg
