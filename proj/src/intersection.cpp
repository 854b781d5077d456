#include "ifsg/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "detail.hpp"

namespace ifsg {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Word tree nodes shared by every pair that mentions them.
struct Node {
  Similarity s;
  Point center;
  double radius;
  std::uint32_t parent;
  std::uint32_t first_child;
  std::uint8_t letter;
};

class Arena {
 public:
  Arena(const SimSystem& system, BoundingDisk disk) : system_(system), disk_(disk) {}

  std::uint32_t root(const Similarity& s) { return add(s, kNone, 0); }

  std::uint32_t children(std::uint32_t k) {
    if (nodes_[k].first_child == kNone) {
      const auto first = static_cast<std::uint32_t>(nodes_.size());
      const Similarity s = nodes_[k].s;
      for (std::size_t i = 0; i < system_.size(); ++i)
        add(s * system_[i], k, static_cast<std::uint8_t>(i));
      nodes_[k].first_child = first;
    }
    return nodes_[k].first_child;
  }

  const Node& operator[](std::uint32_t k) const { return nodes_[k]; }

  Multiindex word(std::uint32_t k, const Multiindex& root_word) const {
    std::vector<std::uint8_t> rev;
    while (nodes_[k].parent != kNone) {
      rev.push_back(nodes_[k].letter);
      k = nodes_[k].parent;
    }
    Multiindex w = root_word;
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) w.push_back(*it);
    return w;
  }

 private:
  std::uint32_t add(const Similarity& s, std::uint32_t parent, std::uint8_t letter) {
    const BoundingDisk d = piece_disk(disk_, s);
    nodes_.push_back({s, d.center, d.radius, parent, kNone, letter});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  const SimSystem& system_;
  BoundingDisk disk_;
  std::vector<Node> nodes_;
};

struct PairRef {
  std::uint32_t a;
  std::uint32_t b;
};

// Where the intersection of a surviving pair can be: inside the smaller disk.
std::pair<Point, double> pair_region(const Arena& arena, PairRef p) {
  const Node& a = arena[p.a];
  const Node& b = arena[p.b];
  return a.radius <= b.radius ? std::pair{a.center, a.radius} : std::pair{b.center, b.radius};
}

struct Grouping {
  std::vector<std::vector<std::size_t>> members;
  std::vector<Point> center;
  std::vector<double> radius;
};

Grouping group_regions(const std::vector<Point>& centers, const std::vector<double>& radii, double slack) {
  detail::UnionFind uf(centers.size());
  detail::unite_overlapping(centers, radii, slack, uf);
  std::map<std::size_t, std::size_t> slot;
  Grouping g;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    auto [it, fresh] = slot.emplace(uf.find(k), g.members.size());
    if (fresh) g.members.emplace_back();
    g.members[it->second].push_back(k);
  }
  for (const auto& m : g.members) {
    Point c{0.0, 0.0};
    for (auto k : m) c += centers[k];
    c /= static_cast<double>(m.size());
    double r = 0.0;
    for (auto k : m) r = std::max(r, std::abs(centers[k] - c) + radii[k]);
    g.center.push_back(c);
    g.radius.push_back(r);
  }
  return g;
}

bool center_less(const IntersectionCluster& a, const IntersectionCluster& b) {
  if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
  if (a.center.imag() != b.center.imag()) return a.center.imag() < b.center.imag();
  return a.radius < b.radius;
}

bool same_map(const Similarity& f, const Similarity& g, double tol) {
  if (f.reflect() != g.reflect()) return false;
  if (std::abs(f.ratio() - g.ratio()) > tol * std::max(1.0, f.ratio())) return false;
  if (std::abs(normalize_angle(f.raw_rotation() - g.raw_rotation())) > tol) return false;
  const Point tf = f.translation(), tg = g.translation();
  return std::abs(tf - tg) <= tol * std::max({1.0, std::abs(tf), std::abs(tg)});
}

}  // namespace

std::vector<IntersectionCluster> pair_expand(const SimSystem& system, const Multiindex& u0,
                                             const Multiindex& v0, double tol, std::size_t pair_budget) {
  if (!(tol > 0.0)) throw DomainError("pair expansion tolerance must be positive");
  if (word_relation(u0, v0) != WordRelation::Incomparable)
    throw ContractViolation("pair expansion needs incomparable words, got " + u0.str() + " and " + v0.str());
  const BoundingDisk disk = bounding_disk(system);
  const double slack = 1e-12 * (disk.radius + std::abs(disk.center));
  Arena arena(system, disk);
  std::vector<PairRef> frontier{{arena.root(compose(system, u0)), arena.root(compose(system, v0))}};
  std::vector<PairRef> done;

  auto separated = [&](PairRef p) {
    const Node& a = arena[p.a];
    const Node& b = arena[p.b];
    return std::abs(a.center - b.center) > a.radius + b.radius + slack;
  };
  auto finished = [&](PairRef p) {
    return 2.0 * std::max(arena[p.a].radius, arena[p.b].radius) <= tol * (1.0 + 1e-12);
  };

  std::vector<PairRef> next;
  while (!frontier.empty()) {
    next.clear();
    for (PairRef p : frontier) {
      if (separated(p)) continue;
      if (finished(p)) {
        done.push_back(p);
        continue;
      }
      // Split the member with the larger disk; ties split u.
      const bool split_a = arena[p.a].radius >= arena[p.b].radius;
      const std::uint32_t first = arena.children(split_a ? p.a : p.b);
      for (std::uint32_t c = first; c < first + system.size(); ++c)
        next.push_back(split_a ? PairRef{c, p.b} : PairRef{p.a, c});
    }
    if (next.size() + done.size() > pair_budget) {
      // Extent of the surviving region, read off grid components of the
      // pair regions (exact disk clustering is quadratic on dense overlaps).
      double reached = 0.0;
      for (const auto& list : {std::cref(done), std::cref(next)})
        for (PairRef p : list.get())
          reached = std::max(reached, 2.0 * std::max(arena[p.a].radius, arena[p.b].radius));
      const double h = std::max(reached, 1e-300);
      std::vector<Cell> cells;
      for (const auto& list : {std::cref(done), std::cref(next)})
        for (PairRef p : list.get()) cells.push_back(cell_of(pair_region(arena, p).first, h));
      sort_unique(cells);
      const CellIndex index(cells);
      const Labelling lab = label_components(index, std::vector<bool>(cells.size(), true));
      std::vector<Cell> lo(static_cast<std::size_t>(lab.count), Cell{INT64_MAX, INT64_MAX});
      std::vector<Cell> hi(static_cast<std::size_t>(lab.count), Cell{INT64_MIN, INT64_MIN});
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto l = static_cast<std::size_t>(lab.label[k]);
        lo[l] = {std::min(lo[l].x, cells[k].x), std::min(lo[l].y, cells[k].y)};
        hi[l] = {std::max(hi[l].x, cells[k].x), std::max(hi[l].y, cells[k].y)};
      }
      double extent = 0.0;
      for (std::size_t l = 0; l < lo.size(); ++l)
        extent = std::max(extent, 0.5 * h * std::hypot(static_cast<double>(hi[l].x - lo[l].x + 1),
                                                       static_cast<double>(hi[l].y - lo[l].y + 1)));
      throw PairBudgetExceeded("pair expansion of " + u0.str() + " and " + v0.str() + " exceeded " +
                                   std::to_string(pair_budget) + " pairs",
                               reached, extent, next.size() + done.size());
    }
    std::swap(frontier, next);
  }

  std::vector<Point> centers;
  std::vector<double> radii;
  for (PairRef p : done) {
    auto [c, r] = pair_region(arena, p);
    centers.push_back(c);
    radii.push_back(r);
  }
  const Grouping g = group_regions(centers, radii, slack);
  std::vector<IntersectionCluster> out;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    IntersectionCluster cl;
    cl.center = g.center[k];
    cl.radius = g.radius[k];
    for (auto idx : g.members[k]) {
      cl.witnesses.push_back({arena.word(done[idx].a, u0), arena.word(done[idx].b, v0),
                              static_cast<std::uint16_t>(u0.size()),
                              static_cast<std::uint16_t>(v0.size())});
    }
    std::sort(cl.witnesses.begin(), cl.witnesses.end());
    out.push_back(std::move(cl));
  }
  std::sort(out.begin(), out.end(), center_less);
  return out;
}

std::vector<IntersectionCluster> merge_clusters(std::vector<IntersectionCluster> clusters) {
  std::vector<Point> centers;
  std::vector<double> radii;
  double scale = 0.0;
  for (const auto& c : clusters) {
    centers.push_back(c.center);
    radii.push_back(c.radius);
    scale = std::max(scale, std::abs(c.center) + c.radius);
  }
  const Grouping g = group_regions(centers, radii, 1e-12 * scale);
  std::vector<IntersectionCluster> out;
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    IntersectionCluster merged;
    merged.center = g.center[k];
    merged.radius = g.radius[k];
    for (auto idx : g.members[k]) {
      auto& w = clusters[idx].witnesses;
      merged.witnesses.insert(merged.witnesses.end(), w.begin(), w.end());
      if (!merged.address_pair) merged.address_pair = clusters[idx].address_pair;
    }
    std::sort(merged.witnesses.begin(), merged.witnesses.end());
    merged.witnesses.erase(std::unique(merged.witnesses.begin(), merged.witnesses.end()),
                           merged.witnesses.end());
    out.push_back(std::move(merged));
  }
  std::sort(out.begin(), out.end(), center_less);
  return out;
}

std::optional<std::pair<Address, Address>> detect_address_pair(const SimSystem& system,
                                                                const IntersectionCluster& cluster,
                                                                std::size_t max_period) {
  if (max_period == 0) return std::nullopt;
  constexpr std::size_t kMaxWitnesses = 256;
  const double slack = 1e-9 * std::max(1.0, std::abs(cluster.center));
  std::optional<std::pair<Address, Address>> best;
  std::size_t best_len = 0;
  for (std::size_t w = 0; w < std::min(cluster.witnesses.size(), kMaxWitnesses); ++w) {
    const Witness& wit = cluster.witnesses[w];
    // Replay the expansion chain: the member with the larger ratio grows.
    std::size_t lu = wit.origin_u, lv = wit.origin_v;
    Similarity su = compose(system, wit.u.prefix(lu)), sv = compose(system, wit.v.prefix(lv));
    std::vector<Similarity> rel;
    std::vector<std::pair<std::size_t, std::size_t>> len;
    for (;;) {
      rel.push_back(su.inverse() * sv);
      len.emplace_back(lu, lv);
      const bool grow_u = su.ratio() >= sv.ratio();
      if (grow_u ? lu >= wit.u.size() : lv >= wit.v.size()) break;
      if (grow_u) su = su * system[wit.u[lu++]];
      else sv = sv * system[wit.v[lv++]];
    }
    for (std::size_t b = 1; b < rel.size(); ++b) {
      std::optional<std::pair<Address, Address>> found;
      for (std::size_t a = b; a-- > 0;) {
        const auto [ua, va] = len[a];
        const auto [ub, vb] = len[b];
        if (ub - ua > max_period || vb - va > max_period) break;
        if (ub == ua || vb == va) continue;
        if (!same_map(rel[a], rel[b], 1e-9)) continue;
        Address pa(wit.u.prefix(ua), Multiindex(std::vector<std::uint8_t>(
                                         wit.u.letters().begin() + static_cast<std::ptrdiff_t>(ua),
                                         wit.u.letters().begin() + static_cast<std::ptrdiff_t>(ub))));
        Address pb(wit.v.prefix(va), Multiindex(std::vector<std::uint8_t>(
                                         wit.v.letters().begin() + static_cast<std::ptrdiff_t>(va),
                                         wit.v.letters().begin() + static_cast<std::ptrdiff_t>(vb))));
        const double da = std::abs(eval_address(system, pa) - cluster.center);
        const double db = std::abs(eval_address(system, pb) - cluster.center);
        if (da <= cluster.radius + slack && db <= cluster.radius + slack) {
          found = std::pair{pa, pb};
          break;
        }
      }
      if (found) {
        const std::size_t size = found->first.preperiod().size() + found->first.period().size() +
                                 found->second.preperiod().size() + found->second.period().size();
        if (!best || size < best_len || (size == best_len && *found < *best)) {
          best = found;
          best_len = size;
        }
        break;
      }
    }
  }
  return best;
}

std::vector<IntersectionCluster> boundary_points(const SimSystem& system, const Multiindex& j, double tol,
                                                 std::size_t pair_budget) {
  system.check(j);
  if (j.empty()) return {};
  std::vector<IntersectionCluster> all;
  const BoundingDisk disk = bounding_disk(system);
  const BoundingDisk dj = piece_disk(disk, compose(system, j));
  // Enumerate every other word of the same length, pruning whole subtrees
  // whose disks miss K_j.
  std::vector<std::pair<Multiindex, Similarity>> level{{Multiindex{}, Similarity{}}};
  for (std::size_t d = 0; d < j.size(); ++d) {
    std::vector<std::pair<Multiindex, Similarity>> next;
    for (const auto& [w, s] : level)
      for (std::size_t i = 0; i < system.size(); ++i) {
        Similarity c = s * system[i];
        const BoundingDisk dc = piece_disk(disk, c);
        if (std::abs(dc.center - dj.center) > dc.radius + dj.radius + 1e-12 * (disk.radius + std::abs(disk.center)))
          continue;
        next.emplace_back(w.child(static_cast<std::uint8_t>(i)), c);
      }
    level = std::move(next);
  }
  for (const auto& [u, s] : level) {
    if (u == j) continue;
    auto part = pair_expand(system, j, u, tol, pair_budget);
    all.insert(all.end(), part.begin(), part.end());
  }
  return merge_clusters(std::move(all));
}

const char* to_string(FIVerdict v) {
  switch (v) {
    case FIVerdict::Certified: return "FI_certified";
    case FIVerdict::Likely: return "FI_likely";
    case FIVerdict::NotFI: return "NotFI";
  }
  return "?";
}

const PairResult* FIReport::pair(std::uint8_t i, std::uint8_t j) const {
  if (i > j) std::swap(i, j);
  for (const auto& p : pairs)
    if (p.i == i && p.j == j) return &p;
  return nullptr;
}

FIReport fi_report(const SimSystem& system, const FIOptions& options) {
  if (options.schedule.empty()) throw DomainError("empty tolerance schedule");
  for (double t : options.schedule)
    if (!(t > 0.0)) throw DomainError("tolerances must be positive");
  FIReport report;
  report.schedule = options.schedule;
  bool all_stable = true;
  std::vector<IntersectionCluster> pooled;
  std::vector<std::pair<std::uint8_t, std::uint8_t>> pooled_pair;

  for (std::size_t i = 0; i < system.size(); ++i)
    for (std::size_t j = i + 1; j < system.size(); ++j) {
      PairResult pr;
      pr.i = static_cast<std::uint8_t>(i);
      pr.j = static_cast<std::uint8_t>(j);
      const Multiindex u({pr.i}), v({pr.j});
      for (std::size_t k = 0; k < options.schedule.size(); ++k) {
        const double tol = options.schedule[k];
        std::vector<IntersectionCluster> clusters;
        try {
          clusters = pair_expand(system, u, v, tol, options.pair_budget);
        } catch (const PairBudgetExceeded& e) {
          pr.resource_limited = true;
          pr.note = e.what();
          if (e.extent >= 10.0 * e.achievable) {
            pr.overlap = true;
            pr.note += "; surviving pairs span a region far larger than their diameter";
          }
          break;
        }
        double rmax = 0.0;
        for (const auto& c : clusters) rmax = std::max(rmax, c.radius);
        pr.counts.push_back(clusters.size());
        pr.max_radius.push_back(rmax);
        pr.clusters = std::move(clusters);
        if (k > 0 && rmax > 0.5 * pr.max_radius[k - 1] && rmax > 1e3 * tol) {
          pr.overlap = true;
          pr.note = "cluster radius does not shrink with the tolerance";
          break;
        }
      }
      const auto n = pr.counts.size();
      if (!pr.overlap && n >= 3 && pr.counts[n - 1] > pr.counts[n - 2] && pr.counts[n - 2] > pr.counts[n - 3]) {
        pr.overlap = true;
        pr.note = "cluster count grows without stabilizing";
      }
      if (!pr.overlap && n >= 2 && n == options.schedule.size() && pr.counts[n - 1] == pr.counts[n - 2]) {
        const double tol = options.schedule[n - 1];
        const double r1 = pr.max_radius[n - 1], r0 = pr.max_radius[n - 2];
        pr.stabilized = r1 <= 100.0 * tol || r1 <= 0.05 * r0;
      }
      if (pr.overlap && !report.not_fi_witness) report.not_fi_witness = std::pair{u, v};
      all_stable = all_stable && pr.stabilized;
      if (!pr.overlap) {
        for (auto& c : pr.clusters) {
          c.address_pair = detect_address_pair(system, c, 8);
          pooled.push_back(c);
          pooled_pair.emplace_back(pr.i, pr.j);
        }
        report.s = std::max(report.s, pr.clusters.size());
      }
      if (!pr.note.empty())
        report.notes.push_back(Multiindex({pr.i}).str() + "," + Multiindex({pr.j}).str() + ": " + pr.note);
      report.pairs.push_back(std::move(pr));
    }

  if (report.not_fi_witness) report.verdict = FIVerdict::NotFI;
  else report.verdict = all_stable ? FIVerdict::Certified : FIVerdict::Likely;

  // Critical set: pairwise clusters that describe the same point are merged.
  std::vector<Point> centers;
  std::vector<double> radii;
  for (const auto& c : pooled) {
    centers.push_back(c.center);
    radii.push_back(c.radius);
  }
  detail::UnionFind uf(pooled.size());
  detail::unite_overlapping(centers, radii, 1e-12, uf);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < pooled.size(); ++k) groups[uf.find(k)].push_back(k);
  for (const auto& [root, members] : groups) {
    std::vector<IntersectionCluster> part;
    CriticalPoint cp;
    for (auto k : members) {
      part.push_back(pooled[k]);
      cp.pieces.push_back(pooled_pair[k].first);
      cp.pieces.push_back(pooled_pair[k].second);
    }
    auto merged = merge_clusters(std::move(part));
    cp.cluster = merged.front();
    for (std::size_t k = 1; k < merged.size(); ++k) {
      // Chained overlaps that no longer overlap pairwise; keep one disk.
      const double d = std::abs(merged[k].center - cp.cluster.center) + merged[k].radius;
      cp.cluster.radius = std::max(cp.cluster.radius, d);
      cp.cluster.witnesses.insert(cp.cluster.witnesses.end(), merged[k].witnesses.begin(),
                                  merged[k].witnesses.end());
    }
    std::sort(cp.pieces.begin(), cp.pieces.end());
    cp.pieces.erase(std::unique(cp.pieces.begin(), cp.pieces.end()), cp.pieces.end());
    report.critical.push_back(std::move(cp));
  }
  std::sort(report.critical.begin(), report.critical.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.pieces != b.pieces) return a.pieces < b.pieces;
    return center_less(a.cluster, b.cluster);
  });
  return report;
}

OpenSetCheck check_open_set(const SimSystem& system, const std::vector<Rect>& open_set, std::size_t resolution) {
  if (open_set.empty()) throw ValidationError("open set needs at least one rectangle");
  double x0 = open_set[0].x0, y0 = open_set[0].y0, x1 = open_set[0].x1, y1 = open_set[0].y1;
  for (const auto& r : open_set) {
    if (!(r.x0 < r.x1 && r.y0 < r.y1)) throw ValidationError("open set rectangle is empty");
    x0 = std::min(x0, r.x0);
    y0 = std::min(y0, r.y0);
    x1 = std::max(x1, r.x1);
    y1 = std::max(y1, r.y1);
  }
  const double margin = 1e-9 * std::max({x1 - x0, y1 - y0, std::abs(x0), std::abs(x1), std::abs(y0), std::abs(y1)});
  auto inside = [&](Point p, double m) {
    for (const auto& r : open_set)
      if (p.real() > r.x0 + m && p.real() < r.x1 - m && p.imag() > r.y0 + m && p.imag() < r.y1 - m) return true;
    return false;
  };
  std::vector<Point> samples;
  const double hx = (x1 - x0) / static_cast<double>(resolution);
  const double hy = (y1 - y0) / static_cast<double>(resolution);
  for (std::size_t a = 0; a < resolution; ++a)
    for (std::size_t b = 0; b < resolution; ++b) {
      const Point p{x0 + (static_cast<double>(a) + 0.5) * hx, y0 + (static_cast<double>(b) + 0.5) * hy};
      if (inside(p, 0.0)) samples.push_back(p);
    }
  OpenSetCheck out{true, true};
  std::vector<Similarity> inverses;
  for (const auto& s : system.maps()) inverses.push_back(s.inverse());
  for (std::size_t i = 0; i < system.size(); ++i)
    for (Point q : samples) {
      const Point p = system[i](q);
      if (!inside(p, -margin)) out.images_inside = false;
      for (std::size_t j = 0; j < system.size(); ++j)
        if (j != i && inside(inverses[j](p), margin)) out.images_disjoint = false;
    }
  return out;
}

}  // namespace ifsg
