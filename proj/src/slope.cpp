#include "ifsg/slope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "ifsg/order.hpp"

namespace ifsg {

namespace {

double turn(Point a, Point b, Point z0) { return std::arg((b - z0) / (a - z0)); }

double segment_increment(Point a, Point b, Point z0, int depth) {
  const double t = turn(a, b, z0);
  if (std::abs(t) <= std::numbers::pi / 2) return t;
  // Closest approach of the segment to z0.
  const Point d = b - a;
  const double u = std::clamp(std::real((z0 - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
  const double gap = std::abs(a + u * d - z0);
  if (depth > 40 || gap <= 1e-14 * (std::abs(a - z0) + std::abs(b - z0)))
    throw PrecisionError("polyline segment passes through the anchor point");
  const Point mid = 0.5 * (a + b);
  return segment_increment(a, mid, z0, depth + 1) + segment_increment(mid, b, z0, depth + 1);
}

}  // namespace

double arg_increment(const std::vector<Point>& polyline, Point z0) {
  for (auto z : polyline)
    if (z == z0) throw DomainError("polyline vertex coincides with the anchor point");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) total += segment_increment(polyline[k], polyline[k + 1], z0, 0);
  return total;
}

// ---------------------------------------------------------------------------

namespace {

// Cover of K with the cells near z0 removed, labelled by component; only
// components reaching well away from z0 are kept.
struct Around {
  double h = 0.0;
  std::vector<Cell> cells;
  std::vector<int> label;  // -1 for deleted or short components
  int count = 0;
  std::vector<Point> rep;  // farthest cell center per component

  int component_of(Point z) const {
    const Cell c = cell_of(z, h);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::int64_t dx = -2; dx <= 2; ++dx)
      for (std::int64_t dy = -2; dy <= 2; ++dy) {
        auto it = std::lower_bound(cells.begin(), cells.end(), Cell{c.x + dx, c.y + dy});
        if (it == cells.end() || *it != Cell{c.x + dx, c.y + dy}) continue;
        const int l = label[static_cast<std::size_t>(it - cells.begin())];
        const double d = std::abs(cell_center(*it, h) - z);
        if (l >= 0 && d < best_d) {
          best_d = d;
          best = l;
        }
      }
    return best;
  }
};

Around components_around(const SimSystem& system, Point z0) {
  const double diam = attractor_diameter(system);
  const double eps = diam / 256.0;
  Around a;
  a.h = eps / 2.0;
  a.cells = cover(system, {}, eps, {a.h, Budget::from_env().leaves}).cells;
  const double deleted = 8.0 * a.h, reach = 8.0 * deleted;
  std::vector<bool> keep(a.cells.size());
  for (std::size_t k = 0; k < a.cells.size(); ++k) keep[k] = std::abs(cell_center(a.cells[k], a.h) - z0) > deleted;
  const CellIndex index(a.cells);
  const Labelling lab = label_components(index, keep);
  std::vector<double> far(static_cast<std::size_t>(lab.count), 0.0);
  std::vector<Point> rep(static_cast<std::size_t>(lab.count));
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    if (lab.label[k] < 0) continue;
    const auto l = static_cast<std::size_t>(lab.label[k]);
    const Point c = cell_center(a.cells[k], a.h);
    if (std::abs(c - z0) > far[l]) {
      far[l] = std::abs(c - z0);
      rep[l] = c;
    }
  }
  std::vector<int> renumber(static_cast<std::size_t>(lab.count), -1);
  for (std::size_t l = 0; l < far.size(); ++l)
    if (far[l] > reach) {
      renumber[l] = a.count++;
      a.rep.push_back(rep[l]);
    }
  a.label.resize(a.cells.size());
  for (std::size_t k = 0; k < a.cells.size(); ++k)
    a.label[k] = lab.label[k] < 0 ? -1 : renumber[static_cast<std::size_t>(lab.label[k])];
  return a;
}

}  // namespace

std::vector<Point> component_seeds(const SimSystem& system, Point z0) { return components_around(system, z0).rep; }

InvariantArc invariant_arc(const SimSystem& system, const Multiindex& i, Point seed, double eps) {
  if (i.empty()) throw DomainError("invariant arcs need a nonempty period word");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("arc resolution must be in (0,1)");
  Multiindex word = i;
  if (compose(system, word).reflect()) word = word + i;
  const Similarity s = compose(system, word);
  const Point z0 = fixed_point(s);
  const double diam = attractor_diameter(system);

  const Around around = components_around(system, z0);
  const int q = around.component_of(seed);
  if (q < 0) throw InconclusiveError("seed is not in a component of the attractor minus the fixed point");

  // Power of the map that sends every component into itself.
  std::vector<int> sigma(static_cast<std::size_t>(around.count));
  for (int k = 0; k < around.count; ++k) {
    sigma[static_cast<std::size_t>(k)] = around.component_of(s(around.rep[static_cast<std::size_t>(k)]));
    if (sigma[static_cast<std::size_t>(k)] < 0) throw InconclusiveError("could not follow a component under the map");
  }
  std::size_t l = 1;
  for (;; ++l) {
    bool id = true;
    for (int k = 0; k < around.count && id; ++k) {
      int x = k;
      for (std::size_t t = 0; t < l; ++t) x = sigma[static_cast<std::size_t>(x)];
      id = x == k;
    }
    if (id) break;
    if (l > static_cast<std::size_t>(around.count)) throw InconclusiveError("component permutation has no finite order");
  }
  const Multiindex j = Multiindex::repeat(word, l);
  const Similarity sj = compose(system, j);
  const Similarity sj_inv = sj.inverse();

  // D: preimages of the boundary points of K_j lying in the chosen component.
  std::vector<Point> D;
  for (const auto& c : boundary_points(system, j, sj.ratio() * diam * 1e-7)) {
    Point b = c.center;
    if (auto ap = detect_address_pair(system, c, 8)) b = eval_address(system, ap->first);
    const Point d = sj_inv(b);
    if (around.component_of(d) == q) D.push_back(d);
  }
  if (D.empty()) throw InconclusiveError("no boundary point of the period piece in the component");

  double nearest_entry = std::numeric_limits<double>::infinity();
  for (auto d : D) nearest_entry = std::min(nearest_entry, std::abs(sj(d) - z0));
  const double h = std::min(eps * diam / 2.0, nearest_entry / 16.0);
  const double eps_p = 2.0 * h;
  const std::vector<Cell> cells = cover(system, {}, eps_p, {h, Budget::from_env().leaves}).cells;
  const CellCover inner = cover(system, j, eps_p, {h, Budget::from_env().leaves});
  const double unblock = 4.0 * eps_p;
  std::vector<Point> entries;
  for (auto d : D) entries.push_back(sj(d));
  auto entry_near = [&](Point c) {
    for (std::size_t k = 0; k < entries.size(); ++k)
      if (std::abs(c - entries[k]) <= unblock) return static_cast<int>(k);
    return -1;
  };
  std::vector<bool> allowed(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k)
    allowed[k] = !inner.contains(cells[k]) || entry_near(cell_center(cells[k], h)) >= 0;
  const CellIndex index(cells);

  // phi(d) and the path from d to the entry point of phi(d).
  std::vector<std::size_t> phi(D.size());
  std::vector<std::vector<Point>> piece(D.size());
  for (std::size_t k = 0; k < D.size(); ++k) {
    auto start = index.find(cell_of(D[k], h));
    if (!start) throw InconclusiveError("boundary point outside the cover");
    std::vector<bool> ok = allowed;
    ok[*start] = true;
    const auto path = shortest_path(index, ok, *start, [&](std::size_t c) { return entry_near(cell_center(cells[c], h)) >= 0; });
    if (path.empty()) throw InconclusiveError("no cell path to the inner piece at resolution " + std::to_string(eps));
    const Point end = cell_center(cells[path.back()], h);
    std::size_t best = 0;
    for (std::size_t e = 1; e < entries.size(); ++e)
      if (std::abs(end - entries[e]) < std::abs(end - entries[best])) best = e;
    phi[k] = best;
    piece[k].push_back(D[k]);
    for (std::size_t p = 1; p + 1 < path.size(); ++p) piece[k].push_back(cell_center(cells[path[p]], h));
    piece[k].push_back(entries[best]);
  }

  // First cycle of phi reached from D[0].
  std::vector<int> seen(D.size(), -1);
  std::size_t y = 0;
  for (int step = 0; seen[y] < 0; ++step) {
    seen[y] = step;
    y = phi[y];
  }
  std::vector<std::size_t> cycle{y};
  for (std::size_t x = phi[y]; x != y; x = phi[x]) cycle.push_back(x);

  InvariantArc arc;
  arc.z0 = z0;
  arc.period_word = j;
  arc.period_map = sj;
  arc.fundamental_count = cycle.size();
  arc.cell_size = h;
  std::vector<Point> fundamental;
  Similarity power;
  for (auto k : cycle) {
    for (std::size_t p = fundamental.empty() ? 0 : 1; p < piece[k].size(); ++p) fundamental.push_back(power(piece[k][p]));
    power = power * sj;
  }
  // power = sj^n; append images until close enough to z0.
  const double start_dist = std::abs(fundamental.front() - z0);
  Similarity img;
  arc.polyline = fundamental;
  arc.junctions = {0};
  for (;;) {
    img = img * power;
    arc.junctions.push_back(arc.polyline.size() - 1);
    if (std::abs(arc.polyline.back() - z0) <= eps * start_dist) break;
    for (std::size_t p = 1; p < fundamental.size(); ++p) arc.polyline.push_back(img(fundamental[p]));
  }
  arc.polyline.push_back(z0);
  return arc;
}

InvariantArc spiral_arc(const Similarity& s, int m, double eps, std::size_t points_per_piece) {
  if (s.reflect()) throw ContractViolation("synthetic spirals need an orientation-preserving map");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("arc resolution must be in (0,1)");
  if (points_per_piece < 2) throw DomainError("need at least two points per piece");
  InvariantArc arc;
  arc.z0 = fixed_point(s);
  arc.period_map = s;
  arc.fundamental_count = 1;
  const double turn_per_piece = s.rotation() + 2.0 * std::numbers::pi * m;
  const double shrink = std::log(s.ratio());
  std::vector<Point> fundamental;
  for (std::size_t k = 0; k <= points_per_piece; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points_per_piece);
    fundamental.push_back(arc.z0 + std::exp(Point{shrink * t, turn_per_piece * t}));
  }
  fundamental.back() = s(fundamental.front());
  arc.polyline = fundamental;
  arc.junctions = {0};
  Similarity img;
  for (;;) {
    img = img * s;
    arc.junctions.push_back(arc.polyline.size() - 1);
    if (std::abs(arc.polyline.back() - arc.z0) <= eps) break;
    for (std::size_t p = 1; p < fundamental.size(); ++p) arc.polyline.push_back(img(fundamental[p]));
  }
  arc.polyline.push_back(arc.z0);
  return arc;
}

InvariantArc with_doubled_period(const InvariantArc& arc) {
  InvariantArc out = arc;
  out.period_word = arc.period_word + arc.period_word;
  out.period_map = arc.period_map * arc.period_map;
  out.junctions.clear();
  for (std::size_t k = 0; k < arc.junctions.size(); k += 2) out.junctions.push_back(arc.junctions[k]);
  if (out.junctions.size() < 2) throw DomainError("arc too short to double its period");
  return out;
}

SlopeEstimate slope_parameter(const InvariantArc& arc) {
  if (arc.junctions.size() < 2 || arc.polyline.size() < 3) throw DomainError("arc has no fundamental piece");
  SlopeEstimate e;
  const std::vector<Point> head(arc.polyline.begin(), arc.polyline.begin() + static_cast<std::ptrdiff_t>(arc.junctions[1]) + 1);
  e.delta_arg = arg_increment(head, arc.z0);
  e.log_lip = static_cast<double>(arc.fundamental_count) * std::log(arc.period_map.ratio());
  e.lambda = e.delta_arg / e.log_lip;
  const double theta = static_cast<double>(arc.fundamental_count) * arc.period_map.rotation();
  e.winding = std::lround((e.delta_arg - theta) / (2.0 * std::numbers::pi));

  // Deviation from the strip along the whole arc (z0 itself excluded).
  double cum = 0.0, lo = 0.0, hi = 0.0;
  const double base = std::log(std::abs(arc.polyline[0] - arc.z0));
  for (std::size_t k = 0; k + 1 < arc.polyline.size(); ++k) {
    if (k > 0) cum += segment_increment(arc.polyline[k - 1], arc.polyline[k], arc.z0, 0);
    const double f = cum - e.lambda * (std::log(std::abs(arc.polyline[k] - arc.z0)) - base);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  e.residual = hi - lo;
  return e;
}

std::vector<ArmSlope> slopes_at_fixed_point(const SimSystem& system, const Multiindex& i, double eps) {
  const Point z0 = fixed_point(compose(system, i));
  std::vector<ArmSlope> arms;
  for (auto seed : component_seeds(system, z0)) {
    ArmSlope a{Address({}, i), z0, seed, invariant_arc(system, i, seed, eps), {}};
    a.slope = slope_parameter(a.arc);
    arms.push_back(std::move(a));
  }
  return arms;
}

const char* to_string(MatchStatus s) {
  switch (s) {
    case MatchStatus::Matched: return "matched";
    case MatchStatus::Mismatched: return "mismatched";
    case MatchStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

ParameterMatch parameter_match(const SimSystem& system, const IntersectionCluster& p, double tol, double eps) {
  ParameterMatch out;
  auto pair = p.address_pair ? p.address_pair : detect_address_pair(system, p, 8);
  if (!pair) {
    out.note = "no eventually periodic address detected";
    return out;
  }
  try {
    for (const Address& a : {pair->first, pair->second}) {
      for (auto& arm : slopes_at_fixed_point(system, a.period(), eps)) {
        arm.address = a;
        out.arms.push_back(std::move(arm));
      }
    }
  } catch (const InconclusiveError& e) {
    out.note = e.what();
    return out;
  }
  if (out.arms.empty()) {
    out.note = "no arcs found";
    return out;
  }
  double lo = out.arms.front().slope.lambda, hi = lo, sum = 0.0;
  bool finite = true;
  for (const auto& a : out.arms) {
    lo = std::min(lo, a.slope.lambda);
    hi = std::max(hi, a.slope.lambda);
    sum += a.slope.lambda;
    finite = finite && std::isfinite(a.slope.residual);
  }
  out.lambda = sum / static_cast<double>(out.arms.size());
  if (!finite) {
    out.note = "unbounded residual";
  } else if (hi - lo <= tol) {
    out.status = MatchStatus::Matched;
  } else {
    out.status = MatchStatus::Mismatched;
    out.note = "slopes differ by " + std::to_string(hi - lo);
  }
  return out;
}

}  // namespace ifsg
