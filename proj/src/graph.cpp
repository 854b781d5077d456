#include "ifsg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "detail.hpp"

namespace ifsg {

std::string BlackId::str() const {
  const std::string k = "p" + std::to_string(index);
  return word.empty() ? k : word.str() + "/" + k;
}

void IntersectionGraph::add_edge(const Multiindex& w, const BlackId& b) {
  if (!has_white(w) || !has_black(b))
    throw ContractViolation("edge between unknown vertices " + w.str() + " and " + b.str());
  edges_.emplace(w, b);
}

void IntersectionGraph::remove_white(const Multiindex& w) {
  white_.erase(w);
  std::erase_if(edges_, [&](const auto& e) { return e.first == w; });
}

void IntersectionGraph::remove_black(const BlackId& b) {
  black_.erase(b);
  std::erase_if(edges_, [&](const auto& e) { return e.second == b; });
}

std::vector<BlackId> IntersectionGraph::neighbors(const Multiindex& w) const {
  std::vector<BlackId> out;
  for (auto it = edges_.lower_bound({w, BlackId{}}); it != edges_.end() && it->first == w; ++it)
    out.push_back(it->second);
  return out;
}

std::vector<Multiindex> IntersectionGraph::neighbors(const BlackId& b) const {
  std::vector<Multiindex> out;
  for (const auto& [w, x] : edges_)
    if (x == b) out.push_back(w);
  return out;
}

std::set<BlackId> IntersectionGraph::black_names() const {
  std::set<BlackId> out;
  for (const auto& [id, v] : black_) out.insert(id);
  return out;
}

namespace {

std::vector<Multiindex> words_of_length(std::size_t m, std::size_t n) {
  std::vector<Multiindex> level{Multiindex{}};
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<Multiindex> next;
    next.reserve(level.size() * m);
    for (const auto& w : level)
      for (std::size_t i = 0; i < m; ++i) next.push_back(w.child(static_cast<std::uint8_t>(i)));
    level = std::move(next);
  }
  return level;
}

struct Candidate {
  std::uint32_t k;
  Point center;
  double tol;
};

}  // namespace

IntersectionGraph build_graph(const SimSystem& system, std::size_t n, const FIReport& fi, const GraphOptions& options) {
  if (fi.verdict == FIVerdict::NotFI) throw ContractViolation("intersection graphs need a finite-intersection system");
  if (n == 0) throw DomainError("graph level must be at least 1");
  double count = 1.0;
  for (std::size_t d = 0; d < n; ++d) count *= static_cast<double>(system.size());
  if (count > static_cast<double>(options.max_white))
    throw ResourceError("level " + std::to_string(n) + " has " + std::to_string(static_cast<long long>(count)) +
                            " pieces, above the limit of " + std::to_string(options.max_white),
                        static_cast<double>(options.max_white));

  const BoundingDisk disk = bounding_disk(system);
  const double slack = 1e-12 * (disk.radius + std::abs(disk.center));

  // Contact candidates of each first-level pair, as indices into fi.critical.
  std::map<std::pair<std::uint8_t, std::uint8_t>, std::vector<Candidate>> cand;
  for (const auto& pr : fi.pairs)
    for (const auto& c : pr.clusters) {
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < fi.critical.size(); ++k) {
        const auto& pcs = fi.critical[k].pieces;
        if (!std::binary_search(pcs.begin(), pcs.end(), pr.i) || !std::binary_search(pcs.begin(), pcs.end(), pr.j))
          continue;
        const double d = std::abs(fi.critical[k].cluster.center - c.center);
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(k);
        }
      }
      if (best_d == std::numeric_limits<double>::infinity()) continue;
      const auto& cc = fi.critical[best].cluster;
      cand[{pr.i, pr.j}].push_back({best, cc.center, 4.0 * cc.radius + slack});
    }

  const auto words = words_of_length(system.size(), n);
  std::vector<BoundingDisk> disks;
  for (const auto& w : words) disks.push_back(piece_disk(disk, compose(system, w)));

  IntersectionGraph g;
  for (const auto& w : words) g.add_white(w);

  std::map<std::pair<Multiindex, std::uint32_t>, bool> memo;
  auto contains = [&](const Multiindex& suffix, const Candidate& c) {
    auto [it, fresh] = memo.try_emplace({suffix, c.k}, false);
    if (fresh) it->second = piece_contains(system, disk, suffix, c.center, c.tol);
    return it->second;
  };

  struct Hit {
    BlackId id;
    std::size_t u, v;
  };
  std::vector<Hit> hits;
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      if (std::abs(disks[a].center - disks[b].center) > disks[a].radius + disks[b].radius + slack) continue;
      const std::size_t p = common_prefix_length(words[a], words[b]);
      auto it = cand.find({words[a][p], words[b][p]});
      if (it == cand.end()) continue;
      const Multiindex su = words[a].suffix_from(p), sv = words[b].suffix_from(p);
      for (const auto& c : it->second)
        if (contains(su, c) && contains(sv, c)) hits.push_back({{words[a].prefix(p), c.k}, a, b});
    }

  // The same point reached through different prefixes: keep the shortest name.
  std::vector<Point> centers;
  std::vector<double> radii;
  for (const auto& h : hits) {
    const Similarity s = compose(system, h.id.word);
    centers.push_back(s(fi.critical[h.id.index].cluster.center));
    radii.push_back(s.ratio() * fi.critical[h.id.index].cluster.radius);
  }
  detail::UnionFind uf(hits.size());
  detail::unite_overlapping(centers, radii, slack, uf);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < hits.size(); ++k) groups[uf.find(k)].push_back(k);
  for (const auto& [root, members] : groups) {
    std::size_t rep = members.front();
    for (auto k : members) {
      const auto& a = hits[k].id;
      const auto& b = hits[rep].id;
      if (a.word.size() < b.word.size() || (a.word.size() == b.word.size() && a < b)) rep = k;
    }
    g.add_black(hits[rep].id, {centers[rep], radii[rep]});
    for (auto k : members) {
      g.add_edge(words[hits[k].u], hits[rep].id);
      g.add_edge(words[hits[k].v], hits[rep].id);
    }
  }
  return g;
}

const char* to_string(TreeStatus s) {
  switch (s) {
    case TreeStatus::Tree: return "tree";
    case TreeStatus::NotTree: return "not_tree";
    case TreeStatus::Disconnected: return "disconnected";
  }
  return "?";
}

TreeCheck is_tree(const IntersectionGraph& g) {
  // Vertices: whites first (set order), then blacks (map order).
  std::vector<std::string> label;
  std::map<Multiindex, std::size_t> wpos;
  std::map<BlackId, std::size_t> bpos;
  for (const auto& w : g.white()) {
    wpos[w] = label.size();
    label.push_back(w.str());
  }
  const std::size_t whites = label.size();
  for (const auto& [id, v] : g.black()) {
    bpos[id] = label.size();
    label.push_back(id.str());
  }
  const std::size_t V = label.size();
  std::vector<std::vector<std::size_t>> adj(V);
  for (const auto& [w, b] : g.edges()) {
    adj[wpos.at(w)].push_back(bpos.at(b));
    adj[bpos.at(b)].push_back(wpos.at(w));
  }

  TreeCheck out;
  if (V == 0) return out;

  // Shortest cycle: BFS from every vertex, keeping the first minimum.
  std::size_t best_len = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best_cycle;
  std::vector<std::size_t> dist(V), parent(V);
  constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < V; ++s) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    dist[s] = 0;
    parent[s] = kUnseen;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      if (2 * dist[x] + 1 >= best_len) break;
      for (std::size_t y : adj[x]) {
        if (dist[y] == kUnseen) {
          dist[y] = dist[x] + 1;
          parent[y] = x;
          queue.push_back(y);
        } else if (y != parent[x]) {
          const std::size_t len = dist[x] + dist[y] + 1;
          if (len < best_len) {
            best_len = len;
            std::vector<std::size_t> left, right;
            for (std::size_t z = x; z != kUnseen; z = parent[z]) left.push_back(z);
            for (std::size_t z = y; z != kUnseen; z = parent[z]) right.push_back(z);
            std::reverse(left.begin(), left.end());  // s .. x
            right.pop_back();                        // y .. (child of s)
            best_cycle = left;
            best_cycle.insert(best_cycle.end(), right.begin(), right.end());
          }
        }
      }
    }
  }
  if (!best_cycle.empty()) {
    out.status = TreeStatus::NotTree;
    // Start at the smallest white, walk towards its smaller neighbour.
    auto start = std::min_element(best_cycle.begin(), best_cycle.end(), [&](std::size_t a, std::size_t b) {
      const bool wa = a < whites, wb = b < whites;
      if (wa != wb) return wa;
      return a < b;
    });
    std::rotate(best_cycle.begin(), start, best_cycle.end());
    if (best_cycle.size() > 2 && best_cycle.back() < best_cycle[1])
      std::reverse(best_cycle.begin() + 1, best_cycle.end());
    for (auto v : best_cycle) out.cycle.push_back(label[v]);
    out.cycle.push_back(label[best_cycle.front()]);
    return out;
  }

  std::vector<bool> seen(V, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y : adj[x])
      if (!seen[y]) {
        seen[y] = true;
        ++reached;
        stack.push_back(y);
      }
  }
  if (reached != V) out.status = TreeStatus::Disconnected;
  return out;
}

IntersectionGraph refine_graph(const IntersectionGraph& g, const Multiindex& l, const IntersectionGraph& tmpl,
                               const std::map<BlackId, GlueTarget>& gluing, const Similarity& place) {
  if (!g.has_white(l)) throw ContractViolation("refined vertex " + l.str() + " is not a white vertex");
  const auto boundary = g.neighbors(l);
  for (const auto& [p, target] : gluing)
    if (!std::binary_search(boundary.begin(), boundary.end(), p))
      throw ContractViolation("glued point " + p.str() + " is not a neighbour of " + l.str());

  std::map<BlackId, BlackId> identified;  // template black -> point of g
  for (const auto& p : boundary) {
    auto it = gluing.find(p);
    if (it == gluing.end()) throw ContractViolation("boundary point " + p.str() + " of " + l.str() + " is not glued");
    if (const auto* b = std::get_if<BlackId>(&it->second)) {
      if (!tmpl.has_black(*b)) throw ContractViolation("gluing target " + b->str() + " is not in the template");
      if (!identified.emplace(*b, p).second)
        throw ContractViolation("two boundary points glued to template point " + b->str());
    } else if (!tmpl.has_white(std::get<Multiindex>(it->second))) {
      throw ContractViolation("gluing target " + std::get<Multiindex>(it->second).str() + " is not in the template");
    }
  }

  IntersectionGraph out = g;
  out.remove_white(l);
  for (const auto& w : tmpl.white()) {
    const Multiindex nw = l + w;
    if (out.has_white(nw)) throw ContractViolation("refinement creates duplicate piece " + nw.str());
    out.add_white(nw);
  }
  auto rename = [&](const BlackId& b) {
    auto it = identified.find(b);
    return it != identified.end() ? it->second : BlackId{l + b.word, b.index};
  };
  for (const auto& [b, v] : tmpl.black()) {
    if (identified.count(b)) continue;
    const BlackId nb = rename(b);
    if (out.has_black(nb)) throw ContractViolation("refinement creates duplicate point " + nb.str());
    out.add_black(nb, {place(v.center), place.ratio() * v.radius});
  }
  for (const auto& [w, b] : tmpl.edges()) out.add_edge(l + w, rename(b));
  for (const auto& [p, target] : gluing)
    if (const auto* w = std::get_if<Multiindex>(&target)) out.add_edge(l + *w, p);
  return out;
}

std::map<BlackId, GlueTarget> natural_gluing(const SimSystem& system, const IntersectionGraph& g, const Multiindex& l,
                                             const IntersectionGraph& gamma1, const FIReport& fi) {
  (void)fi;
  const BoundingDisk disk = bounding_disk(system);
  const Similarity s = compose(system, l);
  const Similarity inv = s.inverse();
  std::map<BlackId, GlueTarget> out;
  for (const auto& p : g.neighbors(l)) {
    const BlackVertex& v = g.black().at(p);
    const Point y = inv(v.center);
    const double tol = 4.0 * v.radius / s.ratio() + 1e-12 * disk.radius;
    std::optional<BlackId> hit;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [q, qv] : gamma1.black()) {
      const double d = std::abs(y - qv.center);
      if (d <= tol + 4.0 * qv.radius && d < best) {
        best = d;
        hit = q;
      }
    }
    if (hit) {
      out.emplace(p, *hit);
      continue;
    }
    std::vector<Multiindex> owners;
    for (const auto& w : gamma1.white())
      if (piece_contains(system, disk, w, y, tol)) owners.push_back(w);
    if (owners.size() != 1)
      throw InconclusiveError("boundary point " + p.str() + " of " + l.str() + " lies in " +
                              std::to_string(owners.size()) + " pieces of the template");
    out.emplace(p, owners.front());
  }
  return out;
}

IntersectionGraph refine_level(const SimSystem& system, const IntersectionGraph& g, const IntersectionGraph& gamma1,
                               const FIReport& fi) {
  IntersectionGraph out = g;
  for (const auto& l : g.white()) {
    const auto glue = natural_gluing(system, out, l, gamma1, fi);
    out = refine_graph(out, l, gamma1, glue, compose(system, l));
  }
  return out;
}

const char* to_string(DendriteOutcome o) {
  switch (o) {
    case DendriteOutcome::Dendrite: return "Dendrite";
    case DendriteOutcome::NotDendrite: return "NotDendrite";
    case DendriteOutcome::Inconclusive: return "Inconclusive";
  }
  return "?";
}

DendriteVerdict dendrite_verdict(const SimSystem& system, std::size_t max_level, const FIOptions& fi_options) {
  DendriteVerdict v;
  v.fi = fi_report(system, fi_options);
  if (v.fi.verdict == FIVerdict::NotFI) {
    v.note = "not a finite-intersection system: pieces " + v.fi.not_fi_witness->first.str() + " and " +
             v.fi.not_fi_witness->second.str() + " share a continuum";
    v.resource_limited = std::any_of(v.fi.pairs.begin(), v.fi.pairs.end(), [](const auto& p) { return p.resource_limited; });
    return v;
  }
  const IntersectionGraph g1 = build_graph(system, 1, v.fi);
  const TreeCheck t1 = is_tree(g1);
  v.checked_levels = 1;
  if (t1.status == TreeStatus::NotTree) {
    v.outcome = DendriteOutcome::NotDendrite;
    v.cycle = t1.cycle;
    v.cycle_level = 1;
    if (v.fi.verdict != FIVerdict::Certified) v.note = "cycle found with finite intersection not certified";
    return v;
  }
  if (g1.black().empty() || t1.status == TreeStatus::Disconnected) {
    v.note = "attractor disconnected";
    return v;
  }
  for (std::size_t n = 2; n <= max_level; ++n) {
    try {
      const TreeCheck t = is_tree(build_graph(system, n, v.fi));
      if (t.status == TreeStatus::NotTree) {
        v.outcome = DendriteOutcome::NotDendrite;
        v.cycle = t.cycle;
        v.cycle_level = n;
        return v;
      }
      if (t.status == TreeStatus::Disconnected) {
        v.note = "level " + std::to_string(n) + " graph disconnected";
        return v;
      }
      v.checked_levels = n;
    } catch (const ResourceError& e) {
      v.resource_limited = true;
      v.note = e.what();
      break;
    }
  }
  if (v.fi.verdict == FIVerdict::Certified) {
    v.outcome = DendriteOutcome::Dendrite;
  } else {
    v.note = v.note.empty() ? "first-level graph is a tree but finite intersection is not certified" : v.note;
  }
  return v;
}

std::string to_dot(const IntersectionGraph& g, const std::vector<std::string>& highlight_cycle) {
  std::set<std::pair<std::string, std::string>> hot;
  for (std::size_t k = 0; k + 1 < highlight_cycle.size(); ++k) {
    hot.emplace(highlight_cycle[k], highlight_cycle[k + 1]);
    hot.emplace(highlight_cycle[k + 1], highlight_cycle[k]);
  }
  std::vector<std::pair<BlackId, BlackVertex>> blacks(g.black().begin(), g.black().end());
  std::sort(blacks.begin(), blacks.end(), [](const auto& a, const auto& b) {
    if (a.second.center.real() != b.second.center.real()) return a.second.center.real() < b.second.center.real();
    if (a.second.center.imag() != b.second.center.imag()) return a.second.center.imag() < b.second.center.imag();
    return a.first < b.first;
  });
  std::ostringstream out;
  out << "graph intersection {\n";
  for (const auto& w : g.white()) out << "  \"" << w.str() << "\" [shape=box];\n";
  for (const auto& [id, v] : blacks)
    out << "  \"" << id.str() << "\" [shape=circle, style=filled, fillcolor=black, fontcolor=white, label=\""
        << detail::fixed6(v.center.real()) << ',' << detail::fixed6(v.center.imag()) << "\"];\n";
  for (const auto& [w, b] : g.edges()) {
    out << "  \"" << w.str() << "\" -- \"" << b.str() << '"';
    if (hot.count({w.str(), b.str()})) out << " [color=red, penwidth=2]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ifsg
