#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ifsg/attractor.hpp"
#include "ifsg/errors.hpp"
#include "systems.hpp"

using namespace ifsg;

TEST_CASE("bounding disks") {
  const auto g = test::gasket();
  const BoundingDisk d = bounding_disk(g);
  CHECK(std::abs(d.center) < 1e-15);
  CHECK(d.radius == doctest::Approx(1.0));
  for (Point v : {Point{0, 0}, Point{1, 0}, Point{0.5, std::sqrt(3.0) / 2}}) CHECK(std::abs(v - d.center) <= d.radius);

  const BoundingDisk dv = bounding_disk(test::vicsek());
  for (Point v : {Point{0, 0}, Point{1, 0}, Point{0, 1}, Point{1, 1}}) CHECK(std::abs(v - dv.center) <= dv.radius * (1 + 1e-12));

  // Every map sends the disk into itself.
  for (const auto& sys : {test::gasket(), test::vicsek_rotated(), test::overlap()}) {
    const BoundingDisk b = bounding_disk(sys);
    for (const auto& s : sys.maps()) CHECK(std::abs(s(b.center) - b.center) + s.ratio() * b.radius <= b.radius * (1 + 1e-12));
  }
}

TEST_CASE("leaf counts") {
  const auto g = test::gasket();
  const BoundingDisk d = bounding_disk(g);
  CHECK(count_leaves(g, d, {}, 0.5 + 1e-9, 1000) == 9);
  CHECK(count_leaves(g, d, {}, 2 * d.radius, 1000) == 1);
  const auto v = test::vicsek();
  const BoundingDisk dv = bounding_disk(v);
  CHECK(count_leaves(v, dv, {}, 2 * dv.radius / 9, 1000) == 25);
  std::size_t visited = 0;
  for_each_leaf(v, dv, Multiindex::parse("5"), 2 * dv.radius / 9, [&](const Multiindex& w, const Similarity&) {
    CHECK(w.size() == 2);
    CHECK(w[0] == 4);
    ++visited;
  });
  CHECK(visited == 5);
}

TEST_CASE("cover budget") {
  const auto g = test::gasket();
  try {
    cover(g, {}, 1e-6, {0.0, 1000});
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.achievable > 1e-6);
    CHECK(count_leaves(g, bounding_disk(g), {}, e.achievable, 2000) <= 1000);
  }
  CHECK_THROWS_AS(cover(g, {}, 0.0), DomainError);
}

TEST_CASE("hausdorff bounds between covers") {
  const auto g = test::gasket();
  const CellCover a = cover(g, {}, 0.02);
  CHECK(hausdorff_upper(a, a) <= 2 * a.error_bound + 1e-15);

  double last = 1e9;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const CellCover c = cover(g, {}, eps);
    CHECK(c.error_bound <= last);
    last = c.error_bound;
  }

  const auto c = test::cantor();
  const CellCover k1 = cover(c, Multiindex::parse("1"), 0.01);
  const CellCover k2 = cover(c, Multiindex::parse("2"), 0.01);
  CHECK(hausdorff_upper(k1, k2) >= 1.0 / 3 - k1.error_bound - k2.error_bound);
}

TEST_CASE("property: Hutchinson containment") {
  for (const auto& sys : {test::gasket(), test::vicsek(), test::vicsek_rotated()}) {
    const CellCover c = cover(sys, {}, 0.02);
    const double slack = c.error_bound + c.cell_size * std::sqrt(2.0);
    std::size_t bad = 0;
    for (const auto& s : sys.maps())
      for (auto cell : c.cells) {
        const Point z = s(c.center(cell));
        double best = 1e9;
        const Cell home = cell_of(z, c.cell_size);
        for (std::int64_t dx = -3; dx <= 3; ++dx)
          for (std::int64_t dy = -3; dy <= 3; ++dy)
            if (c.contains({home.x + dx, home.y + dy})) best = std::min(best, distance_to_cell(z, {home.x + dx, home.y + dy}, c.cell_size));
        if (best > slack) ++bad;
      }
    CHECK(bad == 0);
  }
}

TEST_CASE("property: piece cover is the image of a whole cover") {
  const auto v = test::vicsek_rotated();
  const Multiindex j = Multiindex::parse("52");
  const Similarity s = compose(v, j);
  const double eps = 0.004;
  const CellCover piece = cover(v, j, eps);
  const CellCover whole = cover(v, {}, eps / s.ratio());
  std::vector<Point> image;
  for (auto c : whole.cells) image.push_back(s(whole.center(c)));
  const NearestPoints near(image, piece.cell_size * 4);
  const double tol = piece.error_bound + s.ratio() * whole.error_bound + piece.cell_size;
  for (auto c : piece.cells) CHECK(near.nearest_distance(piece.center(c)) <= tol);
}

TEST_CASE("piece membership") {
  const auto g = test::gasket();
  const BoundingDisk d = bounding_disk(g);
  CHECK(piece_contains(g, d, Multiindex::parse("1"), {0.5, 0}, 1e-9));
  CHECK(piece_contains(g, d, Multiindex::parse("2"), {0.5, 0}, 1e-9));
  CHECK_FALSE(piece_contains(g, d, Multiindex::parse("3"), {0.5, 0}, 1e-3));
  // Center of the removed triangle is at distance sqrt(3)/12 from K.
  const DistanceBounds b = piece_distance(g, d, {}, {0.5, std::sqrt(3.0) / 6}, 1e-6);
  CHECK(b.lower <= std::sqrt(3.0) / 12 + 1e-12);
  CHECK(b.upper >= std::sqrt(3.0) / 12 - 1e-12);
  CHECK(b.upper - b.lower <= 1e-6 + 1e-12);
}

TEST_CASE("cells: components and paths") {
  std::vector<Cell> cells{{0, 0}, {1, 1}, {2, 1}, {5, 5}, {6, 6}, {9, 0}};
  sort_unique(cells);
  const CellIndex index(cells);
  const Labelling lab = label_components(index, std::vector<bool>(cells.size(), true));
  CHECK(lab.count == 3);
  std::vector<bool> keep(cells.size(), true);
  keep[*index.find({1, 1})] = false;
  CHECK(label_components(index, keep).count == 4);

  const auto path = shortest_path(index, std::vector<bool>(cells.size(), true), *index.find({0, 0}),
                                  [&](std::size_t k) { return cells[k] == Cell{2, 1}; });
  CHECK(path.size() == 3);
  CHECK(shortest_path(index, std::vector<bool>(cells.size(), true), *index.find({0, 0}),
                      [&](std::size_t k) { return cells[k] == Cell{9, 0}; })
            .empty());

  std::vector<Cell> disk;
  rasterize_disk({0.5, 0.5}, 0.4, 1.0, disk);
  sort_unique(disk);
  CHECK(disk == std::vector<Cell>{{0, 0}});
  CHECK(distance_to_cell({3, 0.5}, {0, 0}, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("renderings") {
  const CellCover c = cover(test::gasket(), {}, 0.1);
  const std::string pbm = to_pbm(c);
  CHECK(pbm.rfind("P1\n", 0) == 0);
  const std::string svg = to_svg(c, {{{{0, 0}, {1, 0}}}, {{{0.5, 0}, 0.05}}});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg == to_svg(c, {{{{0, 0}, {1, 0}}}, {{{0.5, 0}, 0.05}}}));
}
