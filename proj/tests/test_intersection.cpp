#include <doctest.h>

#include <cmath>

#include "ifsg/intersection.hpp"
#include "systems.hpp"

using namespace ifsg;

namespace {

const Point kMid12{0.5, 0};
const Point kMid13{0.25, std::sqrt(3.0) / 4};
const Point kMid23{0.75, std::sqrt(3.0) / 4};

Multiindex w(const char* s) { return Multiindex::parse(s); }

}  // namespace

TEST_CASE("pair expansion on the gasket") {
  const auto g = test::gasket();
  const auto c = pair_expand(g, w("1"), w("2"), 1e-6);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0].center - kMid12) <= c[0].radius + 1e-12);
  CHECK(c[0].radius <= 1e-5);
  CHECK_THROWS_AS(pair_expand(g, w("1"), w("12"), 1e-3), ContractViolation);
  CHECK_THROWS_AS(pair_expand(g, w("1"), w("2"), 0.0), DomainError);
}

TEST_CASE("pair expansion: separated and corner contacts") {
  CHECK(pair_expand(test::cantor(), w("1"), w("2"), 1e-6).empty());
  const auto c = pair_expand(test::vicsek(), w("1"), w("5"), 1e-6);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0].center - Point{1.0 / 3, 1.0 / 3}) <= c[0].radius + 1e-12);
  CHECK(pair_expand(test::vicsek(), w("1"), w("4"), 1e-6).empty());
}

TEST_CASE("pair budget") {
  try {
    pair_expand(test::overlap(), w("1"), w("2"), 1e-7, 1000000);
    FAIL("expected the pair budget to run out");
  } catch (const PairBudgetExceeded& e) {
    CHECK(e.frontier > 0);
    CHECK(e.achievable > 1e-7);
    // The shared segment keeps the surviving region long while disks shrink.
    CHECK(e.extent >= 10 * e.achievable);
  }
}

TEST_CASE("FI reports") {
  const FIReport g = fi_report(test::gasket());
  CHECK(g.verdict == FIVerdict::Certified);
  CHECK(g.s == 1);
  REQUIRE(g.critical.size() == 3);
  CHECK(std::abs(g.critical[0].cluster.center - kMid12) < 1e-6);
  CHECK(std::abs(g.critical[1].cluster.center - kMid13) < 1e-6);
  CHECK(std::abs(g.critical[2].cluster.center - kMid23) < 1e-6);
  for (const auto& c : g.critical) {
    CHECK(c.cluster.radius <= 1e-5);
    CHECK(c.pieces.size() == 2);
  }
  CHECK(std::string(to_string(g.verdict)) == "FI_certified");

  const FIReport v = fi_report(test::vicsek());
  CHECK(v.verdict == FIVerdict::Certified);
  CHECK(v.s == 1);
  CHECK(v.critical.size() == 4);
  CHECK(v.pair(0, 3)->clusters.empty());

  const FIReport o = fi_report(test::overlap());
  CHECK(o.verdict == FIVerdict::NotFI);
  REQUIRE(o.not_fi_witness);
  CHECK(o.not_fi_witness->first == w("1"));
  CHECK(o.not_fi_witness->second == w("2"));

  const FIReport c = fi_report(test::cantor());
  CHECK(c.verdict == FIVerdict::Certified);
  CHECK(c.s == 0);
}

TEST_CASE("address pairs") {
  const FIReport g = fi_report(test::gasket());
  const auto& mid = g.critical[0].cluster;
  REQUIRE(mid.address_pair);
  CHECK(mid.address_pair->first == Address::parse("1(2)"));
  CHECK(mid.address_pair->second == Address::parse("2(1)"));
  CHECK_FALSE(detect_address_pair(test::gasket(), mid, 0));

  const FIReport v = fi_report(test::vicsek());
  const auto& corner = v.critical[0].cluster;
  REQUIRE(corner.address_pair);
  CHECK(std::abs(eval_address(test::vicsek(), corner.address_pair->first) - Point{1.0 / 3, 1.0 / 3}) < 1e-12);
  CHECK(std::abs(eval_address(test::vicsek(), corner.address_pair->second) - Point{1.0 / 3, 1.0 / 3}) < 1e-12);

  // Every detected pair evaluates to points within the cluster disk.
  for (const auto& sys : {test::gasket(), test::vicsek(), test::vicsek_rotated()})
    for (const auto& c : fi_report(sys).critical)
      if (c.cluster.address_pair)
        CHECK(std::abs(eval_address(sys, c.cluster.address_pair->first) -
                       eval_address(sys, c.cluster.address_pair->second)) <= 2 * c.cluster.radius + 1e-12);
}

TEST_CASE("boundary points") {
  const auto b = boundary_points(test::gasket(), w("1"), 1e-7);
  REQUIRE(b.size() == 2);
  CHECK(std::abs(b[0].center - kMid13) < 1e-6);
  CHECK(std::abs(b[1].center - kMid12) < 1e-6);
  CHECK(boundary_points(test::vicsek(), w("5"), 1e-7).size() == 4);
  CHECK(boundary_points(test::cantor(), w("1"), 1e-7).empty());
}

TEST_CASE("property: level invariance of clusters") {
  const auto g = test::gasket();
  const auto base = pair_expand(g, w("1"), w("2"), 1e-7);
  for (const char* prefix : {"3", "21", "132"}) {
    const Multiindex p = w(prefix);
    const Similarity s = compose(g, p);
    const auto moved = pair_expand(g, p + w("1"), p + w("2"), 1e-7 * s.ratio());
    REQUIRE(moved.size() == base.size());
    for (std::size_t k = 0; k < base.size(); ++k)
      CHECK(std::abs(moved[k].center - s(base[k].center)) <= moved[k].radius + s.ratio() * base[k].radius + 1e-12);
  }
}

TEST_CASE("property: deeper pairs never meet in more points than s") {
  const auto v = test::vicsek();
  const std::size_t s = fi_report(v).s;
  for (const char* a : {"15", "51", "55", "25"})
    for (const char* b : {"52", "53", "54", "35"}) {
      if (word_relation(w(a), w(b)) != WordRelation::Incomparable) continue;
      CHECK(pair_expand(v, w(a), w(b), 1e-7).size() <= s);
    }
}

TEST_CASE("merge clusters") {
  IntersectionCluster a{{0, 0}, 0.1, {}, std::nullopt}, b{{0.15, 0}, 0.1, {}, std::nullopt}, c{{1, 0}, 0.1, {}, std::nullopt};
  CHECK(merge_clusters({a, b, c}).size() == 2);
  CHECK(merge_clusters({c, a}).size() == 2);
}

TEST_CASE("open set check") {
  const double h = std::sqrt(3.0) / 2;
  CHECK(check_open_set(test::vicsek(), {{0, 0, 1, 1}}).ok());
  const auto box = check_open_set(test::gasket(), {{0, 0, 1, h}});
  CHECK(box.images_inside);
  CHECK_FALSE(check_open_set(test::overlap(), {{0, -0.1, 1, 0.1}}).images_disjoint);
}
