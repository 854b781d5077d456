#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "ifsg/graph.hpp"
#include "ifsg/order.hpp"
#include "systems.hpp"

using namespace ifsg;

namespace {

// Exact M_a for the middle-third Cantor set on the half-side window grid.
// Coordinates are integers in units of 3^-D / 2, so every endpoint is exact.
struct CantorOracle {
  int D;
  std::int64_t unit(int level) const {  // length 3^-level
    std::int64_t v = 2;
    for (int k = level; k < D; ++k) v *= 3;
    return v;
  }
  bool meets(std::int64_t c, std::int64_t len, std::int64_t p, std::int64_t q) const {
    if (c + len < p || c > q) return false;
    if ((c >= p && c <= q) || (c + len >= p && c + len <= q)) return true;
    if (len % 3 != 0) return false;
    const std::int64_t t = len / 3;
    return meets(c, t, p, q) || meets(c + 2 * t, t, p, q);
  }
  std::size_t value(double a, int depth) const {
    std::size_t best = 0;
    for (int k = 0; k <= depth; ++k) {
      const double hi = a * std::sqrt(2.0) * std::pow(3.0, -k), lo = hi / 3;
      const std::int64_t side = unit(k), half = side / 2;
      for (std::int64_t i = -2; i * half <= unit(0); ++i) {
        const std::int64_t p = i * half, q = p + side;
        std::size_t count = 0;
        for (int n = 1; n <= depth; ++n) {
          const double size = std::pow(3.0, -n);
          if (!(size > lo && size <= hi)) continue;
          // Level-n pieces: left ends are sums of 2 * 3^-m over a digit set.
          const std::int64_t len = unit(n);
          for (std::int64_t code = 0; code < (std::int64_t{1} << n); ++code) {
            std::int64_t c = 0;
            for (int m = 1; m <= n; ++m)
              if (code >> (n - m) & 1) c += 2 * unit(m);
            if (meets(c, len, p, q)) ++count;
          }
        }
        best = std::max(best, count);
      }
    }
    return best;
  }
};

}  // namespace

TEST_CASE("diameters and address counts") {
  CHECK(attractor_diameter(test::gasket()) == doctest::Approx(1.0));
  CHECK(attractor_diameter(test::vicsek()) == doctest::Approx(std::sqrt(2.0)));

  const auto g = test::gasket();
  CHECK(count_addresses(g, {0.5, 0}).count == 2);
  CHECK(count_addresses(g, {0, 0}).count == 1);
  CHECK(count_addresses(g, {1.0 / 3, 0}).count == 1);
  const auto v = test::vicsek();
  CHECK(count_addresses(v, {1.0 / 3, 1.0 / 3}).count == 2);
  CHECK(count_addresses(v, {0.5, 0.5}).count == 1);
  CHECK(count_addresses(test::cantor(), {0, 0}).count == 1);

  const auto at_mid = pieces_at(g, {0.5, 0}, 0.3, 1e-9);
  CHECK(at_mid == std::vector<Multiindex>{Multiindex::parse("12"), Multiindex::parse("21")});
}

TEST_CASE("Zerner constant of the Cantor set against the exact oracle") {
  const CantorOracle oracle{10};
  CHECK(oracle.value(1.0, 8) == 2);  // frozen
  const ZernerEstimate z = zerner_constant(test::cantor(), 1.0, 8);
  CHECK(z.value <= oracle.value(1.0, 8));
  CHECK(z.value == 2);
  CHECK(z.stabilized);
  CHECK(z.lower_estimate);
  CHECK(z.by_depth == std::vector<std::size_t>{2, 2, 2});
  for (double a : {1.0 / 3, 0.5, 2.0}) CHECK(zerner_constant(test::cantor(), a, 7).value <= oracle.value(a, 7));
  CHECK_THROWS_AS(zerner_constant(test::cantor(), 0.0, 4), DomainError);
  CHECK_THROWS_AS(zerner_constant(test::cantor(), 1.0, 8, 100), ResourceError);
}

TEST_CASE("Zerner constants of the gasket") {
  const auto g = test::gasket();
  const ZernerEstimate z = zerner_constant(g, 1.0, 8);
  CHECK(z.stabilized);
  CHECK(z.value == 6);
  // Address counts never exceed the stabilized M_1.
  for (const auto& c : fi_report(g).critical) CHECK(count_addresses(g, c.cluster.center, 4 * c.cluster.radius).count <= z.value);
}

TEST_CASE("stable neighborhoods") {
  const auto g = test::gasket();
  CHECK(stable_neighborhood(g, {0.5, 0}).components == 2);
  CHECK(stable_neighborhood(g, {0, 0}).components == 1);
  const auto v = test::vicsek();
  CHECK(stable_neighborhood(v, {0.5, 0.5}).components == 4);
  CHECK(stable_neighborhood(v, {1.0 / 3, 1.0 / 3}).components == 2);
  const auto s = test::segment();
  CHECK(stable_neighborhood(s, {0, 0}).components == 1);
  CHECK(stable_neighborhood(s, {0.5, 0}).components == 2);
  CHECK_THROWS_AS(stable_neighborhood(g, {0.5, 0.3}), DomainError);

  // The counts seen along the way never decrease.
  for (auto x : {Point{0.5, 0.5}, Point{1.0 / 3, 1.0 / 3}}) {
    const auto nb = stable_neighborhood(v, x);
    std::size_t last = 0;
    for (auto n : nb.history)
      if (n > 0) {
        CHECK(n >= last);
        last = n;
      }
  }
}

TEST_CASE("order reports") {
  const auto g = test::gasket();
  const FIReport fg = fi_report(g);
  const OrderReport r = order_report(g, {0.5, 0}, fg, false);
  CHECK(r.address_count == 2);
  CHECK(r.n_components == 2);
  CHECK(r.ord_estimate == 2);
  CHECK(r.bounds.m1 == 6);
  CHECK(r.bounds.s == 1);
  CHECK(r.bounds.order == 36);
  CHECK_FALSE(r.bounds.m_half);
  CHECK(r.consistent);

  const auto v = test::vicsek();
  const FIReport fv = fi_report(v);
  OrderOptions opt;
  opt.bounds = zerner_bounds(v, fv, true, 6);
  CHECK(opt.bounds->stabilized);
  const OrderReport c = order_report(v, {0.5, 0.5}, fv, true, opt);
  CHECK(c.address_count == 1);
  CHECK(c.ord_estimate == 4);
  REQUIRE(c.bounds.m_half);
  CHECK(c.ord_estimate <= *c.bounds.m_half);
  CHECK(c.consistent);

  const PieceOrderReport p = piece_order_report(v, Multiindex::parse("5"), fv, true, opt);
  CHECK(p.boundary.size() == 4);
  CHECK(p.address_total == 8);
  CHECK(p.n_components == 4);
  CHECK(p.consistent);
}
