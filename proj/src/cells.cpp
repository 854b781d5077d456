#include "ifsg/cells.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace ifsg {

double distance_to_cell(Point z, Cell c, double h) {
  const double x0 = static_cast<double>(c.x) * h, y0 = static_cast<double>(c.y) * h;
  const double dx = std::max({x0 - z.real(), 0.0, z.real() - (x0 + h)});
  const double dy = std::max({y0 - z.imag(), 0.0, z.imag() - (y0 + h)});
  return std::hypot(dx, dy);
}

void rasterize_disk(Point center, double radius, double h, std::vector<Cell>& out) {
  const auto x_lo = static_cast<std::int64_t>(std::floor((center.real() - radius) / h));
  const auto x_hi = static_cast<std::int64_t>(std::floor((center.real() + radius) / h));
  const auto y_lo = static_cast<std::int64_t>(std::floor((center.imag() - radius) / h));
  const auto y_hi = static_cast<std::int64_t>(std::floor((center.imag() + radius) / h));
  for (auto x = x_lo; x <= x_hi; ++x)
    for (auto y = y_lo; y <= y_hi; ++y)
      if (distance_to_cell(center, {x, y}, h) <= radius) out.push_back({x, y});
}

void sort_unique(std::vector<Cell>& cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

CellIndex::CellIndex(const std::vector<Cell>& cells) : cells_(&cells) {
  pos_.reserve(cells.size() * 2);
  for (std::size_t k = 0; k < cells.size(); ++k) pos_.emplace(cells[k], k);
}

std::optional<std::size_t> CellIndex::find(Cell c) const {
  auto it = pos_.find(c);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

namespace {
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
}  // namespace

Labelling label_components(const CellIndex& index, const std::vector<bool>& keep) {
  const auto& cells = index.cells();
  Labelling out;
  out.label.assign(cells.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < cells.size(); ++s) {
    if (!keep[s] || out.label[s] >= 0) continue;
    const int id = out.count++;
    out.label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      for (int d = 0; d < 8; ++d) {
        auto n = index.find({cells[k].x + kDx[d], cells[k].y + kDy[d]});
        if (n && keep[*n] && out.label[*n] < 0) {
          out.label[*n] = id;
          stack.push_back(*n);
        }
      }
    }
  }
  return out;
}

std::vector<std::size_t> shortest_path(const CellIndex& index, const std::vector<bool>& allowed,
                                       std::size_t source,
                                       const std::function<bool(std::size_t)>& is_target) {
  const auto& cells = index.cells();
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(cells.size(), none);
  std::deque<std::size_t> queue{source};
  parent[source] = source;
  while (!queue.empty()) {
    const auto k = queue.front();
    queue.pop_front();
    if (k != source && is_target(k)) {
      std::vector<std::size_t> path;
      for (auto v = k; v != source; v = parent[v]) path.push_back(v);
      path.push_back(source);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (int d = 0; d < 8; ++d) {
      auto n = index.find({cells[k].x + kDx[d], cells[k].y + kDy[d]});
      if (n && allowed[*n] && parent[*n] == none) {
        parent[*n] = k;
        queue.push_back(*n);
      }
    }
  }
  return {};
}

NearestPoints::NearestPoints(std::vector<Point> points, double bucket)
    : points_(std::move(points)), bucket_(bucket) {
  bool first = true;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const Cell c = cell_of(points_[k], bucket_);
    buckets_[c].push_back(k);
    if (first) {
      min_x_ = max_x_ = c.x;
      min_y_ = max_y_ = c.y;
      first = false;
    }
    min_x_ = std::min(min_x_, c.x);
    max_x_ = std::max(max_x_, c.x);
    min_y_ = std::min(min_y_, c.y);
    max_y_ = std::max(max_y_, c.y);
  }
}

double NearestPoints::nearest_distance(Point z) const {
  double best = std::numeric_limits<double>::infinity();
  if (points_.empty()) return best;
  const Cell c = cell_of(z, bucket_);
  const std::int64_t max_ring = std::max({std::abs(c.x - min_x_), std::abs(c.x - max_x_),
                                          std::abs(c.y - min_y_), std::abs(c.y - max_y_)}) + 1;
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    // Every point in ring k is at least (k-1) buckets away.
    if (ring > 0 && static_cast<double>(ring - 1) * bucket_ > best) break;
    for (std::int64_t dx = -ring; dx <= ring; ++dx) {
      for (std::int64_t dy = -ring; dy <= ring; ++dy) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        auto it = buckets_.find({c.x + dx, c.y + dy});
        if (it == buckets_.end()) continue;
        for (auto k : it->second) best = std::min(best, std::abs(points_[k] - z));
      }
    }
  }
  return best;
}

}  // namespace ifsg
