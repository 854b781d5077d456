#include "ifsg/order.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ifsg {

double attractor_diameter(const SimSystem& system) {
  std::vector<Point> fixed;
  for (const auto& s : system.maps()) fixed.push_back(fixed_point(s));
  std::vector<Point> pts = fixed;
  std::vector<Similarity> level{Similarity{}};
  while (level.size() * system.size() * fixed.size() <= 4096) {
    std::vector<Similarity> next;
    for (const auto& s : level)
      for (const auto& m : system.maps()) {
        next.push_back(s * m);
        for (auto p : fixed) pts.push_back(next.back()(p));
      }
    level = std::move(next);
  }
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, std::abs(pts[a] - pts[b]));
  if (!(d > 0.0)) throw DomainError("attractor is a single point");
  return d;
}

std::vector<Multiindex> pieces_at(const SimSystem& system, Point x, double rho, double tol) {
  const BoundingDisk disk = bounding_disk(system);
  const double diam = attractor_diameter(system);
  std::vector<Multiindex> out;
  Multiindex word;
  std::function<void(const Similarity&)> walk = [&](const Similarity& s) {
    const BoundingDisk d = piece_disk(disk, s);
    if (std::abs(x - d.center) - d.radius > tol) return;
    if (s.ratio() * diam <= rho * (1.0 + 1e-12) && !word.empty()) {
      if (piece_contains(system, disk, word, x, tol)) out.push_back(word);
      return;
    }
    for (std::size_t i = 0; i < system.size(); ++i) {
      word.push_back(static_cast<std::uint8_t>(i));
      walk(s * system[i]);
      word.pop_back();
    }
  };
  walk(Similarity{});
  return out;
}

AddressCount count_addresses(const SimSystem& system, Point x, double tol) {
  const double diam = attractor_diameter(system);
  if (tol <= 0.0) tol = 1e-9 * diam;
  std::optional<std::size_t> prev;
  std::string seen;
  for (int e = 2; e <= 6; ++e) {
    const double rho = diam * std::pow(10.0, -e);
    auto words = pieces_at(system, x, rho, tol);
    seen += (seen.empty() ? "" : ", ") + std::to_string(words.size());
    if (prev && *prev == words.size()) return {words.size(), rho, std::move(words)};
    prev = words.size();
  }
  throw InconclusiveError("address count did not stabilize (counts " + seen + ")");
}

// ---------------------------------------------------------------------------

namespace {

struct Sample {
  Point p;
  std::uint64_t code;  // the word in base m, first letter most significant
};

// An eligible word seen in a half-side cell of the window grid.
struct Entry {
  std::int64_t cx, cy;
  std::uint64_t id;  // prefix code * 64 + length
  friend auto operator<=>(const Entry&, const Entry&) = default;
};

}  // namespace

ZernerEstimate zerner_constant(const SimSystem& system, double a, std::size_t depth, std::size_t sample_budget) {
  if (!(a > 0.0)) throw DomainError("Zerner constant needs a > 0");
  if (depth == 0) throw DomainError("Zerner depth must be at least 1");
  const std::size_t m = system.size();
  if (static_cast<double>(depth) * std::log2(static_cast<double>(m)) > 56.0)
    throw ResourceError("Zerner depth too large for word codes", 0.0);
  const double diam = attractor_diameter(system);
  const double rmin = system.r_min(), rmax = system.r_max();

  // Sample level: pieces below an eighth of the smallest window.
  std::size_t L = depth;
  while (std::pow(rmax, static_cast<double>(L)) > std::pow(rmin, static_cast<double>(depth)) / 8.0) ++L;
  auto count_for = [&](std::size_t l) { return std::pow(static_cast<double>(m), static_cast<double>(l + 1)); };
  while (L > depth && count_for(L) > static_cast<double>(sample_budget)) --L;
  if (count_for(L) > static_cast<double>(sample_budget) ||
      static_cast<double>(L) * std::log2(static_cast<double>(m)) > 60.0)
    throw ResourceError("Zerner depth " + std::to_string(depth) + " needs more than " +
                            std::to_string(sample_budget) + " samples",
                        static_cast<double>(depth));

  std::vector<Point> fixed;
  for (const auto& s : system.maps()) fixed.push_back(fixed_point(s));
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(count_for(L)));
  std::function<void(const Similarity&, std::size_t, std::uint64_t)> walk = [&](const Similarity& s, std::size_t l,
                                                                             std::uint64_t code) {
    if (l == L) {
      for (auto f : fixed) samples.push_back({s(f), code});
      return;
    }
    for (std::size_t i = 0; i < m; ++i) walk(s * system[i], l + 1, code * m + i);
  };
  walk(Similarity{}, 0, 0);

  double bx = std::numeric_limits<double>::infinity(), by = bx;
  for (const auto& s : samples) {
    bx = std::min(bx, s.p.real());
    by = std::min(by, s.p.imag());
  }
  std::vector<std::uint64_t> mpow(L + 1, 1);
  for (std::size_t l = 1; l <= L; ++l) mpow[l] = mpow[l - 1] * m;
  std::vector<double> ratio(m);
  for (std::size_t i = 0; i < m; ++i) ratio[i] = system[i].ratio();

  ZernerEstimate out;
  out.a = a;
  out.depth = depth;
  out.samples = samples.size();
  const std::size_t first = depth >= 3 ? depth - 2 : 1;
  std::vector<std::size_t> best(depth + 1, 0);  // best[d]: words of length <= d, windows k <= d

  for (std::size_t k = 0; k <= depth; ++k) {
    const double side = diam * std::pow(rmin, static_cast<double>(k));
    const double half = side / 2.0;
    const double hi = a * side * std::sqrt(2.0);
    const double lo = hi * rmin;
    std::vector<Entry> entries;
    for (const auto& s : samples) {
      // Eligible prefixes of this sample's word.
      double r = diam;
      std::vector<std::uint64_t> ids;
      for (std::size_t l = 1; l <= std::min(depth, L); ++l) {
        r *= ratio[(s.code / mpow[L - l]) % m];
        if (r <= lo * (1.0 - 1e-12)) break;
        if (r <= hi * (1.0 + 1e-12) && r > lo * (1.0 + 1e-12)) ids.push_back((s.code / mpow[L - l]) * 64 + l);
      }
      if (ids.empty()) continue;
      const double fx = (s.p.real() - bx) / half, fy = (s.p.imag() - by) / half;
      const auto cx = static_cast<std::int64_t>(std::floor(fx)), cy = static_cast<std::int64_t>(std::floor(fy));
      // Closed windows: a sample on a grid line belongs to both sides.
      std::vector<std::int64_t> xs{cx}, ys{cy};
      if (fx - static_cast<double>(cx) < 1e-9) xs.push_back(cx - 1);
      if (static_cast<double>(cx + 1) - fx < 1e-9) xs.push_back(cx + 1);
      if (fy - static_cast<double>(cy) < 1e-9) ys.push_back(cy - 1);
      if (static_cast<double>(cy + 1) - fy < 1e-9) ys.push_back(cy + 1);
      for (auto x : xs)
        for (auto y : ys)
          for (auto id : ids) entries.push_back({x, y, id});
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    // Windows are 2x2 blocks of half cells, keyed by their lower-left cell.
    std::vector<std::pair<std::int64_t, std::int64_t>> windows;
    for (const auto& e : entries)
      for (int dx = 0; dx <= 1; ++dx)
        for (int dy = 0; dy <= 1; ++dy) windows.emplace_back(e.cx - dx, e.cy - dy);
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    out.windows += windows.size();
    auto range = [&](std::int64_t x, std::int64_t y) {
      auto b = std::lower_bound(entries.begin(), entries.end(), Entry{x, y, 0});
      auto e = std::lower_bound(entries.begin(), entries.end(), Entry{x, y + 1, 0});
      return std::pair{b, e};
    };
    std::vector<std::uint64_t> ids;
    for (const auto& [wx, wy] : windows) {
      ids.clear();
      for (int dx = 0; dx <= 1; ++dx)
        for (int dy = 0; dy <= 1; ++dy) {
          auto [b, e] = range(wx + dx, wy + dy);
          for (auto it = b; it != e; ++it) ids.push_back(it->id);
        }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      for (std::size_t d = std::max<std::size_t>(k, 1); d <= depth; ++d) {
        const auto n = static_cast<std::size_t>(
            std::count_if(ids.begin(), ids.end(), [&](std::uint64_t id) { return id % 64 <= d; }));
        best[d] = std::max(best[d], n);
      }
    }
  }
  for (std::size_t d = first; d <= depth; ++d) out.by_depth.push_back(best[d]);
  out.value = best[depth];
  out.stabilized = out.by_depth.size() >= 3 &&
                   std::all_of(out.by_depth.begin(), out.by_depth.end(), [&](auto v) { return v == out.value; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Components of (union of pieces) minus the cells near `centers`, counting
// only components that reach farther than `reach` from every center.
std::size_t count_branches(const SimSystem& system, const std::vector<Multiindex>& pieces,
                           const std::vector<Point>& centers, double size) {
  const double eps = size / 256.0;
  const double h = eps / 2.0;
  const double deleted = 8.0 * h;
  const double reach = 8.0 * deleted;
  std::vector<Cell> cells;
  for (const auto& j : pieces) {
    const CellCover c = cover(system, j, eps, {h, Budget::from_env().leaves});
    cells.insert(cells.end(), c.cells.begin(), c.cells.end());
  }
  sort_unique(cells);
  auto nearest = [&](Cell c) {
    double d = std::numeric_limits<double>::infinity();
    for (auto p : centers) d = std::min(d, std::abs(cell_center(c, h) - p));
    return d;
  };
  std::vector<bool> keep(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) keep[k] = nearest(cells[k]) > deleted;
  const CellIndex index(cells);
  const Labelling lab = label_components(index, keep);
  std::vector<bool> far(static_cast<std::size_t>(lab.count), false);
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (lab.label[k] >= 0 && nearest(cells[k]) > reach) far[static_cast<std::size_t>(lab.label[k])] = true;
  return static_cast<std::size_t>(std::count(far.begin(), far.end(), true));
}

bool meet_only_at(const SimSystem& system, const std::vector<Multiindex>& J, Point x, double size, double tol) {
  for (std::size_t a = 0; a < J.size(); ++a)
    for (std::size_t b = a + 1; b < J.size(); ++b) {
      if (word_relation(J[a], J[b]) != WordRelation::Incomparable) return false;
      for (const auto& c : pair_expand(system, J[a], J[b], size * 1e-4))
        if (std::abs(c.center - x) > c.radius + tol + size * 1e-6) return false;
    }
  return true;
}

double max_piece_size(const SimSystem& system, const std::vector<Multiindex>& J, double diam) {
  double d = 0.0;
  for (const auto& j : J) d = std::max(d, compose(system, j).ratio() * diam);
  return d;
}

}  // namespace

StableNeighborhood stable_neighborhood(const SimSystem& system, Point x, double tol, std::size_t max_depth) {
  const double diam = attractor_diameter(system);
  if (tol <= 0.0) tol = 1e-9 * diam;
  StableNeighborhood out;
  out.x = x;
  std::size_t prev = std::numeric_limits<std::size_t>::max();  // no usable previous depth
  for (std::size_t k = 1; k <= max_depth; ++k) {
    const double rho = diam * std::pow(system.r_max(), static_cast<double>(k));
    auto J = pieces_at(system, x, rho, tol);
    if (J.empty()) throw DomainError("point is not on the attractor");
    const double size = max_piece_size(system, J, diam);
    if (!meet_only_at(system, J, x, size, tol)) {
      out.history.push_back(0);
      prev = std::numeric_limits<std::size_t>::max();
      continue;
    }
    const std::size_t n = count_branches(system, J, {x}, size);
    out.history.push_back(n);
    if (prev == n) {
      out.J = std::move(J);
      out.components = n;
      out.scale = rho;
      out.cell_size = size / 512.0;
      return out;
    }
    prev = n;
  }
  throw InconclusiveError("component count around the point did not stabilize");
}

OrderBounds zerner_bounds(const SimSystem& system, const FIReport& fi, bool dendrite, std::size_t depth) {
  OrderBounds b;
  const auto z1 = zerner_constant(system, 1.0, depth);
  const auto z3 = zerner_constant(system, 1.0 / 3.0, depth);
  b.m1 = z1.value;
  b.m_third = z3.value;
  b.s = fi.s;
  b.stabilized = z1.stabilized && z3.stabilized;
  if (dendrite) {
    const auto z2 = zerner_constant(system, 0.5, depth);
    b.m_half = z2.value;
    b.stabilized = b.stabilized && z2.stabilized;
  }
  return b;
}

OrderReport order_report(const SimSystem& system, Point x, const FIReport& fi, bool dendrite,
                         const OrderOptions& options) {
  OrderReport r;
  r.point = x;
  r.address_count = count_addresses(system, x, options.tol).count;
  const StableNeighborhood nb = stable_neighborhood(system, x, options.tol);
  r.n_components = nb.components;
  r.ord_estimate = nb.components;
  r.bounds = options.bounds ? *options.bounds : zerner_bounds(system, fi, dendrite, options.zerner_depth);
  auto& b = r.bounds;
  b.addresses = b.m1;
  b.components = b.m_third;
  b.order = b.m1 * b.m1 * b.s;
  if (!b.stabilized) r.notes.push_back("Zerner estimates not stabilized at depth " + std::to_string(options.zerner_depth));
  auto check = [&](std::size_t value, std::size_t bound, const char* what) {
    if (value > bound) {
      r.consistent = false;
      r.notes.push_back(std::string(what) + " " + std::to_string(value) + " exceeds the sampled bound " +
                        std::to_string(bound));
    }
  };
  check(r.address_count, b.addresses, "address count");
  check(r.n_components, b.components, "component count");
  if (b.s > 0) check(r.ord_estimate, b.order, "order estimate");
  if (b.m_half) check(r.ord_estimate, *b.m_half, "order estimate (dendrite bound)");
  return r;
}

PieceOrderReport piece_order_report(const SimSystem& system, const Multiindex& j, const FIReport& fi, bool dendrite,
                                    const OrderOptions& options) {
  PieceOrderReport r;
  r.piece = j;
  const double diam = attractor_diameter(system);
  const double rj = compose(system, j).ratio();
  const auto clusters = boundary_points(system, j, rj * diam * 1e-7);
  for (const auto& c : clusters) {
    Point p = c.center;
    if (auto ap = detect_address_pair(system, c, 8)) p = eval_address(system, ap->first);
    r.boundary.push_back(p);
    const double tol = options.tol > 0.0 ? options.tol : 4.0 * c.radius + 1e-9 * diam;
    r.address_counts.push_back(count_addresses(system, p, tol).count);
    r.address_total += r.address_counts.back();
  }

  if (!r.boundary.empty()) {
    double gap = rj * diam;
    for (std::size_t a = 0; a < r.boundary.size(); ++a)
      for (std::size_t b = a + 1; b < r.boundary.size(); ++b)
        gap = std::min(gap, 0.5 * std::abs(r.boundary[a] - r.boundary[b]));
    std::optional<std::size_t> prev;
    for (int step = 1; step <= 4; ++step) {
      const double rho = gap * std::pow(system.r_min(), step);
      std::vector<Multiindex> outside;
      for (auto p : r.boundary)
        for (auto& w : pieces_at(system, p, rho, 1e-9 * diam))
          if (word_relation(j, w) == WordRelation::Incomparable) outside.push_back(w);
      std::sort(outside.begin(), outside.end());
      outside.erase(std::unique(outside.begin(), outside.end()), outside.end());
      const std::size_t n = count_branches(system, outside, r.boundary, max_piece_size(system, outside, diam));
      if (prev && *prev == n) break;
      if (step == 4) r.notes.push_back("component count around the piece did not stabilize");
      prev = n;
    }
    r.n_components = prev.value_or(0);
  }

  r.bounds = options.bounds ? *options.bounds : zerner_bounds(system, fi, dendrite, options.zerner_depth);
  auto& b = r.bounds;
  b.addresses = b.m1 * b.m1 * b.s;
  b.components = b.m_third * b.m1 * b.s;
  b.order = b.m1 * b.m1 * b.m1 * b.s * b.s;
  if (b.s > 0 && r.address_total > b.addresses) {
    r.consistent = false;
    r.notes.push_back("address count exceeds the sampled bound");
  }
  if (b.s > 0 && r.n_components > b.components) {
    r.consistent = false;
    r.notes.push_back("component count exceeds the sampled bound");
  }
  return r;
}

}  // namespace ifsg
