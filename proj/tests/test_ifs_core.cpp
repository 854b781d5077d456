#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ifsg/errors.hpp"
#include "ifsg/ifs_core.hpp"
#include "systems.hpp"

using namespace ifsg;

namespace {

bool same_map(const Similarity& f, const Similarity& g, double tol) {
  for (Point z : {Point{0, 0}, Point{1, 0}, Point{0.3, -0.7}, Point{-2, 1.5}})
    if (std::abs(f(z) - g(z)) > tol * (1 + std::abs(z))) return false;
  return true;
}

}  // namespace

TEST_CASE("compose: gasket word 12 is z/4 + 1/4") {
  const auto g = test::gasket();
  const Similarity s = compose(g, Multiindex::parse("12"));
  CHECK(s.ratio() == 0.25);
  CHECK(same_map(s, Similarity(0.25, 0, false, {0.25, 0}), 1e-15));
  CHECK(same_map(compose(g, Multiindex::parse("2")), g[1], 0));
  CHECK_THROWS_AS(compose(g, Multiindex::parse("14")), IndexError);
}

TEST_CASE("compose: a reflection composed with itself") {
  const SimSystem sys({Similarity(0.5, 0, true, 0), Similarity(0.5, 0, false, 0.5)});
  const Similarity s = compose(sys, Multiindex::parse("11"));
  CHECK_FALSE(s.reflect());
  CHECK(s.ratio() == 0.25);
  CHECK(s.rotation() == doctest::Approx(0.0));
  CHECK(same_map(s, Similarity(0.25, 0, false, 0), 1e-15));
}

TEST_CASE("fixed points") {
  CHECK(std::abs(fixed_point(Similarity(0.5, 0, false, 0.5)) - Point{1, 0}) < 1e-15);
  CHECK(std::abs(fixed_point(Similarity(0.5, 0, true, 0))) < 1e-15);
  const Similarity s(0.5, std::numbers::pi / 2, false, 1.0);
  const Point z = fixed_point(s);
  CHECK(std::abs(z - Point{0.8, 0.4}) < 1e-14);
  CHECK(std::abs(s(z) - z) < 1e-14);
  CHECK_THROWS_AS(fixed_point(Similarity()), DomainError);
  // Reflection with translation: z -> conj(z)/2 + i fixes 2i/3.
  const Similarity r(0.5, 0, true, {0, 1});
  CHECK(std::abs(r(fixed_point(r)) - fixed_point(r)) < 1e-14);
}

TEST_CASE("eval_address") {
  const auto g = test::gasket();
  CHECK(std::abs(eval_address(g, Address::parse("2(1)")) - Point{0.5, 0}) < 1e-14);
  CHECK(std::abs(eval_address(g, Address::parse("(12)")) - Point{1.0 / 3, 0}) < 1e-14);
  for (std::size_t k = 0; k < g.size(); ++k)
    CHECK(std::abs(eval_address(g, Address({}, Multiindex({static_cast<std::uint8_t>(k)}))) - fixed_point(g[k])) < 1e-15);
}

TEST_CASE("word relations") {
  auto rel = [](const char* a, const char* b) { return word_relation(Multiindex::parse(a), Multiindex::parse(b)); };
  CHECK(rel("1", "12") == WordRelation::Prefix);
  CHECK(rel("12", "1") == WordRelation::Extension);
  CHECK(rel("12", "13") == WordRelation::Incomparable);
  CHECK(rel("21", "21") == WordRelation::Equal);
  CHECK(common_prefix_length(Multiindex::parse("1234"), Multiindex::parse("1243")) == 2);
}

TEST_CASE("address canonical form") {
  CHECK(Address::parse("12(2)") == Address::parse("1(2)"));
  CHECK(Address::parse("1(22)").str() == "1(2)");
  CHECK(Address::parse("(11)") == Address::parse("1(1)"));
  CHECK(Address::parse("(1)").is_periodic());
  CHECK(Address::parse("1(21)") == Address::parse("(12)"));
  const Address a = Address::parse("312(12)");
  CHECK(Address(a.preperiod(), a.period()) == a);
  CHECK(a.letter(0) == 2);
  CHECK_THROWS(Address::parse("1()"));
}

TEST_CASE("multiindex text form") {
  CHECK(Multiindex::parse("123").str() == "123");
  const Multiindex big({0, 11, 2});
  CHECK(big.str() == "1.12.3");
  CHECK(Multiindex::parse(big.str()) == big);
  CHECK(Multiindex::parse("").empty());
  CHECK_THROWS(Multiindex::parse("1a"));
  CHECK_THROWS(Multiindex::parse("0"));
}

TEST_CASE("property: composition is a homomorphism with exact ratios") {
  const auto v = test::vicsek_rotated();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(0, 6), letter(0, 4);
  auto word = [&] {
    std::vector<std::uint8_t> w(static_cast<std::size_t>(len(rng)));
    for (auto& c : w) c = static_cast<std::uint8_t>(letter(rng));
    return Multiindex(w);
  };
  for (int trial = 0; trial < 500; ++trial) {
    const Multiindex u = word(), w = word(), uw = u + w;
    CHECK(same_map(compose(v, uw), compose(v, u) * compose(v, w), 1e-12));
    double r = 1.0;
    for (auto c : uw.letters()) r *= v[c].ratio();
    CHECK(compose(v, uw).ratio() == r);
    const Similarity s = compose(v, u);
    CHECK(same_map(s * s.inverse(), Similarity(), 1e-12));
  }
}

TEST_CASE("property: shift rule for eval_address") {
  const auto g = test::gasket();
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> letter(0, 2), len(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> pre(static_cast<std::size_t>(len(rng) - 1)), per(static_cast<std::size_t>(len(rng)));
    for (auto& c : pre) c = static_cast<std::uint8_t>(letter(rng));
    for (auto& c : per) c = static_cast<std::uint8_t>(letter(rng));
    const Address a{Multiindex(pre), Multiindex(per)};
    const auto k = static_cast<std::uint8_t>(letter(rng));
    const Address ka(Multiindex({k}) + Multiindex(pre), Multiindex(per));
    CHECK(std::abs(eval_address(g, ka) - g[k](eval_address(g, a))) < 1e-13);
  }
}

TEST_CASE("system validation") {
  CHECK_THROWS(SimSystem({Similarity(0.5, 0, false, 0)}));
  CHECK_THROWS(SimSystem({Similarity(0.5, 0, false, 0), Similarity(1.0, 0, false, 0)}));
  CHECK(test::gasket().r_max() == 0.5);
}
