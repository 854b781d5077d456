#include "ifsg/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "ifsg/errors.hpp"

namespace ifsg {

Budget Budget::from_env() {
  Budget b;
  if (const char* v = std::getenv("IFSG_BUDGET")) {
    char* end = nullptr;
    const double n = std::strtod(v, &end);
    if (end != v && n >= 1.0) b.leaves = b.pairs = static_cast<std::size_t>(n);
  }
  return b;
}

BoundingDisk bounding_disk(const SimSystem& system) {
  const Point c = fixed_point(system[0]);
  double spread = 0.0;
  for (const auto& s : system.maps()) spread = std::max(spread, std::abs(s(c) - c));
  double radius = spread / (1.0 - system.r_max());
  radius = std::max(radius, std::numeric_limits<double>::epsilon());
  for (const auto& s : system.maps()) {
    const double reach = std::abs(s(c) - c) + s.ratio() * radius;
    if (reach > radius * (1.0 + 1e-12) + 1e-300)
      throw std::logic_error("bounding disk is not invariant");
  }
  return {c, radius};
}

namespace {

bool small_enough(double ratio, double radius, double eps) {
  return 2.0 * ratio * radius <= eps * (1.0 + 1e-12);
}

void leaves_below(const SimSystem& system, const BoundingDisk& disk, Multiindex& word,
                  const Similarity& s, double eps,
                  const std::function<void(const Multiindex&, const Similarity&)>& visit) {
  if (small_enough(s.ratio(), disk.radius, eps)) {
    visit(word, s);
    return;
  }
  for (std::size_t i = 0; i < system.size(); ++i) {
    word.push_back(static_cast<std::uint8_t>(i));
    leaves_below(system, disk, word, s * system[i], eps, visit);
    word.pop_back();
  }
}

std::size_t count_below(const SimSystem& system, double radius, double ratio, double eps,
                        std::size_t cap, std::size_t acc) {
  if (acc > cap) return acc;
  if (small_enough(ratio, radius, eps)) return acc + 1;
  for (const auto& s : system.maps()) {
    acc = count_below(system, radius, ratio * s.ratio(), eps, cap, acc);
    if (acc > cap) return acc;
  }
  return acc;
}

}  // namespace

void for_each_leaf(const SimSystem& system, const BoundingDisk& disk, const Multiindex& target,
                   double eps, const std::function<void(const Multiindex&, const Similarity&)>& visit) {
  if (!(eps > 0.0)) throw DomainError("cover resolution must be positive");
  Multiindex word = target;
  leaves_below(system, disk, word, compose(system, target), eps, visit);
}

std::size_t count_leaves(const SimSystem& system, const BoundingDisk& disk, const Multiindex& target,
                         double eps, std::size_t cap) {
  if (!(eps > 0.0)) throw DomainError("cover resolution must be positive");
  return count_below(system, disk.radius, compose(system, target).ratio(), eps, cap, 0);
}

bool CellCover::contains(Cell c) const { return std::binary_search(cells.begin(), cells.end(), c); }

CellCover cover(const SimSystem& system, const Multiindex& target, double eps,
                const CoverOptions& options) {
  if (!(eps > 0.0)) throw DomainError("cover resolution must be positive");
  const BoundingDisk disk = bounding_disk(system);
  const std::size_t n = count_leaves(system, disk, target, eps, options.leaf_budget);
  if (n > options.leaf_budget) {
    double achievable = eps;
    while (count_leaves(system, disk, target, achievable, options.leaf_budget) > options.leaf_budget)
      achievable *= 2.0;
    throw ResourceError("cover needs more than " + std::to_string(options.leaf_budget) +
                            " leaves; coarsest fitting eps is about " + std::to_string(achievable),
                        achievable);
  }
  CellCover out;
  out.cell_size = options.cell_size > 0.0 ? options.cell_size : eps / 2.0;
  double max_radius = 0.0;
  std::size_t compact_at = std::size_t{1} << 22;
  for_each_leaf(system, disk, target, eps, [&](const Multiindex&, const Similarity& s) {
    const BoundingDisk d = piece_disk(disk, s);
    max_radius = std::max(max_radius, d.radius);
    rasterize_disk(d.center, d.radius, out.cell_size, out.cells);
    ++out.leaf_count;
    if (out.cells.size() > compact_at) {
      sort_unique(out.cells);
      compact_at = std::max(compact_at, 2 * out.cells.size());
    }
  });
  sort_unique(out.cells);
  out.error_bound = out.cell_size * std::sqrt(2.0) + 2.0 * max_radius;
  return out;
}

double hausdorff_upper(const CellCover& a, const CellCover& b) {
  if (a.cells.empty() || b.cells.empty()) throw DomainError("hausdorff bound of an empty cover");
  auto centers = [](const CellCover& c) {
    std::vector<Point> pts;
    pts.reserve(c.cells.size());
    for (auto cell : c.cells) pts.push_back(c.center(cell));
    return pts;
  };
  auto directed = [&](const CellCover& from, const CellCover& to) {
    const double bucket = std::max(from.cell_size, to.cell_size) * 4.0;
    NearestPoints nearest(centers(to), bucket);
    const bool same_grid = from.cell_size == to.cell_size;
    double worst = 0.0;
    for (auto cell : from.cells) {
      if (same_grid && to.contains(cell)) continue;
      // Any point of a source cell is within half a diagonal of its center.
      worst = std::max(worst, nearest.nearest_distance(from.center(cell)) + from.cell_size * std::sqrt(0.5));
    }
    return worst;
  };
  const double grid = std::max(directed(a, b), directed(b, a));
  return grid + a.error_bound + b.error_bound;
}

DistanceBounds piece_distance(const SimSystem& system, const BoundingDisk& disk, const Multiindex& j,
                              Point x, double resolution, std::size_t max_nodes) {
  struct Node {
    double lower;
    Similarity s;
  };
  auto worse = [](const Node& a, const Node& b) { return a.lower > b.lower; };
  std::vector<Point> refs;
  for (const auto& m : system.maps()) refs.push_back(fixed_point(m));

  double upper = std::numeric_limits<double>::infinity();
  auto visit = [&](const Similarity& s) {
    for (auto p : refs) upper = std::min(upper, std::abs(s(p) - x));
    const BoundingDisk d = piece_disk(disk, s);
    return Node{std::max(0.0, std::abs(x - d.center) - d.radius), s};
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  open.push(visit(compose(system, j)));
  std::size_t expanded = 0;
  while (!open.empty()) {
    const Node top = open.top();
    if (upper - top.lower <= resolution || expanded >= max_nodes) break;
    open.pop();
    ++expanded;
    for (const auto& m : system.maps()) {
      Node child = visit(top.s * m);
      if (child.lower < upper) open.push(std::move(child));
    }
  }
  const double lower = open.empty() ? upper : std::min(open.top().lower, upper);
  return {lower, upper};
}

bool piece_contains(const SimSystem& system, const BoundingDisk& disk, const Multiindex& j, Point x,
                    double tol) {
  const DistanceBounds b = piece_distance(system, disk, j, x, tol / 2.0);
  if (b.upper <= tol) return true;
  // Only reachable undecided when the node limit stopped refinement.
  return b.upper - b.lower > tol / 2.0 && b.lower <= tol / 2.0;
}

std::string to_pbm(const CellCover& c) {
  if (c.cells.empty()) return "P1\n0 0\n";
  std::int64_t x0 = c.cells.front().x, x1 = x0, y0 = c.cells.front().y, y1 = y0;
  for (auto cell : c.cells) {
    x0 = std::min(x0, cell.x);
    x1 = std::max(x1, cell.x);
    y0 = std::min(y0, cell.y);
    y1 = std::max(y1, cell.y);
  }
  const auto w = static_cast<std::size_t>(x1 - x0 + 1), h = static_cast<std::size_t>(y1 - y0 + 1);
  std::vector<std::string> rows(h, std::string(w, '0'));
  for (auto cell : c.cells)
    rows[static_cast<std::size_t>(y1 - cell.y)][static_cast<std::size_t>(cell.x - x0)] = '1';
  std::ostringstream out;
  out << "P1\n" << w << ' ' << h << '\n';
  for (const auto& r : rows) out << r << '\n';
  return out.str();
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}
}  // namespace

std::string to_svg(const CellCover& c, const SvgLayer& overlay) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!c.cells.empty()) {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -x0;
    for (auto cell : c.cells) {
      const double cx = static_cast<double>(cell.x) * c.cell_size;
      const double cy = static_cast<double>(cell.y) * c.cell_size;
      x0 = std::min(x0, cx);
      y0 = std::min(y0, cy);
      x1 = std::max(x1, cx + c.cell_size);
      y1 = std::max(y1, cy + c.cell_size);
    }
  }
  const double pad = 0.02 * std::max(x1 - x0, y1 - y0);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(x0 - pad) << ' '
      << fmt(-(y1 + pad)) << ' ' << fmt(x1 - x0 + 2 * pad) << ' ' << fmt(y1 - y0 + 2 * pad)
      << "\">\n<g transform=\"scale(1,-1)\">\n<g fill=\"#222\" stroke=\"none\">\n";
  for (auto cell : c.cells)
    out << "<rect x=\"" << fmt(static_cast<double>(cell.x) * c.cell_size) << "\" y=\""
        << fmt(static_cast<double>(cell.y) * c.cell_size) << "\" width=\"" << fmt(c.cell_size)
        << "\" height=\"" << fmt(c.cell_size) << "\"/>\n";
  out << "</g>\n";
  const double stroke = std::max(c.cell_size, 1e-4 * (x1 - x0));
  for (const auto& line : overlay.polylines) {
    out << "<polyline fill=\"none\" stroke=\"#d22\" stroke-width=\"" << fmt(stroke) << "\" points=\"";
    for (std::size_t k = 0; k < line.size(); ++k)
      out << (k ? " " : "") << fmt(line[k].real()) << ',' << fmt(line[k].imag());
    out << "\"/>\n";
  }
  for (const auto& [p, r] : overlay.circles)
    out << "<circle cx=\"" << fmt(p.real()) << "\" cy=\"" << fmt(p.imag()) << "\" r=\""
        << fmt(std::max(r, 2 * stroke)) << "\" fill=\"none\" stroke=\"#27c\" stroke-width=\""
        << fmt(stroke) << "\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace ifsg
