// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "ifsg/cli.hpp"
#include "ifsg/graph.hpp"
#include "ifsg/order.hpp"
#include "ifsg/slope.hpp"
#include "systems.hpp"

using namespace ifsg;

namespace {

const std::string kSpecs = IFSG_SPECS_DIR;

// Pinned tolerances.
constexpr double kGasketSeconds = 5.0;
constexpr double kVicsekSeconds = 30.0;
constexpr double kFISeconds = 30.0;
constexpr double kClusterRadius = 1e-5;
constexpr double kSpiralTol = 1e-3;
constexpr double kDoublingTol = 1e-6;
constexpr double kMatchTol = 1e-3;
constexpr double kStripSlack = 1e-9;
constexpr int kRefinements = 1000;
constexpr int kSubarcs = 100;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
auto timed(F&& f, double& secs) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = f();
  secs = seconds_since(t0);
  return r;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome gasket_not_dendrite() {
  double secs = 0;
  const DendriteVerdict d = timed([] { return dendrite_verdict(test::gasket(), 3); }, secs);
  const bool ok = d.outcome == DendriteOutcome::NotDendrite && d.cycle_level == 1 && d.cycle.size() == 7 &&
                  d.cycle.front() == d.cycle.back() && secs < kGasketSeconds;
  return {ok, std::string(to_string(d.outcome)) + ", cycle of " + std::to_string(d.cycle.size()) + " labels at level " +
                  std::to_string(d.cycle_level) + ", " + fmt("%.2f s", secs) + " (limit 5 s)"};
}

Outcome vicsek_dendrite() {
  const auto v = test::vicsek();
  double secs = 0;
  const DendriteVerdict d = timed([&] { return dendrite_verdict(v, 3); }, secs);
  const FIReport& fi = d.fi;
  const IntersectionGraph g1 = build_graph(v, 1, fi);
  bool star = g1.white().size() == 5 && g1.black().size() == 4 && g1.neighbors(Multiindex::parse("5")).size() == 4;
  for (const char* c : {"1", "2", "3", "4"}) star = star && g1.neighbors(Multiindex::parse(c)).size() == 1;
  const IntersectionGraph g2 = refine_level(v, g1, g1, fi);
  const IntersectionGraph g3 = refine_level(v, g2, g1, fi);
  const bool trees = is_tree(g2).status == TreeStatus::Tree && is_tree(g3).status == TreeStatus::Tree;
  const bool ok = d.outcome == DendriteOutcome::Dendrite && star && trees && secs < kVicsekSeconds;
  return {ok, std::string(to_string(d.outcome)) + ", level-1 star " + (star ? "yes" : "no") + ", levels 2-3 trees " +
                  (trees ? "yes" : "no") + ", " + fmt("%.2f s", secs) + " (limit 30 s)"};
}

Outcome fi_verdicts() {
  double tg = 0, to = 0;
  const FIReport g = timed([] { return fi_report(test::gasket()); }, tg);
  const FIReport o = timed([] { return fi_report(test::overlap()); }, to);
  double worst = 0;
  for (const auto& c : g.critical) worst = std::max(worst, c.cluster.radius);
  const bool ok = g.verdict == FIVerdict::Certified && g.s == 1 && g.critical.size() == 3 && worst <= kClusterRadius &&
                  o.verdict == FIVerdict::NotFI && tg < kFISeconds && to < kFISeconds;
  return {ok, "gasket " + std::string(to_string(g.verdict)) + "(" + std::to_string(g.s) + ") with " +
                  std::to_string(g.critical.size()) + " clusters, max radius " + fmt("%.1e", worst) +
                  " (limit 1e-5); overlap " + to_string(o.verdict) + "; " + fmt("%.2f s", tg) + " / " +
                  fmt("%.2f s", to) + " (limit 30 s each)"};
}

Outcome address_counts() {
  const auto g = test::gasket();
  const std::size_t mid = count_addresses(g, {0.5, 0}).count;
  const std::size_t fix = count_addresses(g, fixed_point(g[0])).count;
  return {mid == 2 && fix == 1,
          "midpoint " + std::to_string(mid) + " (want 2), fixed point of S1 " + std::to_string(fix) + " (want 1)"};
}

Outcome refinement_matches() {
  std::string detail;
  bool ok = true;
  for (const auto& [name, sys] : {std::pair{"gasket", test::gasket()}, std::pair{"vicsek", test::vicsek()}}) {
    const FIReport fi = fi_report(sys);
    const IntersectionGraph g1 = build_graph(sys, 1, fi);
    IntersectionGraph g = g1;
    for (std::size_t n = 2; n <= 3; ++n) {
      g = refine_level(sys, g, g1, fi);
      const bool same = g == build_graph(sys, n, fi);
      ok = ok && same;
      detail += std::string(name) + " level " + std::to_string(n) + (same ? " equal" : " DIFFERENT") + "; ";
    }
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// Random bipartite tree: whites are one-letter words, blacks ({}, k).
IntersectionGraph random_tree(std::mt19937& rng, int steps) {
  IntersectionGraph g;
  std::vector<Multiindex> whites{Multiindex({0})};
  std::vector<BlackId> blacks;
  g.add_white(whites[0]);
  for (int s = 0; s < steps; ++s) {
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, whites.size() + blacks.size() - 1)(rng);
    if (pick < whites.size()) {
      const BlackId b{{}, static_cast<std::uint32_t>(blacks.size())};
      g.add_black(b, {});
      g.add_edge(whites[pick], b);
      blacks.push_back(b);
    } else if (whites.size() < 200) {
      const Multiindex nw({static_cast<std::uint8_t>(whites.size())});
      g.add_white(nw);
      g.add_edge(nw, blacks[pick - whites.size()]);
      whites.push_back(nw);
    }
  }
  return g;
}

Outcome random_refinements() {
  std::mt19937 rng(7);
  int failures = 0;
  for (int trial = 0; trial < kRefinements; ++trial) {
    const IntersectionGraph g = random_tree(rng, std::uniform_int_distribution<int>(1, 30)(rng));
    const IntersectionGraph t = random_tree(rng, std::uniform_int_distribution<int>(1, 30)(rng));
    const std::vector<Multiindex> gw(g.white().begin(), g.white().end());
    const Multiindex l = gw[std::uniform_int_distribution<std::size_t>(0, gw.size() - 1)(rng)];
    const std::vector<Multiindex> tw(t.white().begin(), t.white().end());
    std::vector<BlackId> tb;
    for (const auto& [b, v] : t.black()) tb.push_back(b);
    std::shuffle(tb.begin(), tb.end(), rng);
    std::map<BlackId, GlueTarget> glue;
    for (const auto& p : g.neighbors(l)) {
      if (!tb.empty() && std::bernoulli_distribution(0.5)(rng)) {
        glue.emplace(p, tb.back());
        tb.pop_back();
      } else {
        glue.emplace(p, tw[std::uniform_int_distribution<std::size_t>(0, tw.size() - 1)(rng)]);
      }
    }
    if (is_tree(refine_graph(g, l, t, glue)).status != TreeStatus::Tree) ++failures;
  }
  return {failures == 0, std::to_string(kRefinements) + " refinements, " + std::to_string(failures) + " non-trees"};
}

Outcome spiral_slope() {
  const double pi = std::numbers::pi;
  const Similarity s(0.5, pi / 2, false, 0);
  const double want = (pi / 2) / std::log(0.5);
  const InvariantArc arc = spiral_arc(s, 0, 1e-6);
  const double got = slope_parameter(arc).lambda;
  const double twice = slope_parameter(with_doubled_period(arc)).lambda;
  const double err = std::abs(got - want), drift = std::abs(twice - got);
  return {err <= kSpiralTol && drift <= kDoublingTol,
          "lambda " + fmt("%.9f", got) + ", error " + fmt("%.1e", err) + " (limit 1e-3), doubling drift " +
              fmt("%.1e", drift) + " (limit 1e-6)"};
}

std::vector<ParameterMatch> contact_matches() {
  std::vector<ParameterMatch> out;
  for (const auto& sys : {test::gasket(), test::vicsek()}) out.push_back(parameter_match(sys, fi_report(sys).critical[0].cluster));
  return out;
}

Outcome parameter_matching(const std::vector<ParameterMatch>& matches) {
  bool ok = true;
  double worst = 0;
  std::size_t arms = 0;
  std::string status;
  for (const auto& m : matches) {
    ok = ok && m.status == MatchStatus::Matched && m.arms.size() >= 2;
    status += std::string(status.empty() ? "" : "/") + to_string(m.status);
    for (const auto& a : m.arms) {
      ++arms;
      worst = std::max(worst, std::abs(a.slope.lambda));
      ok = ok && std::isfinite(a.slope.residual);
    }
  }
  ok = ok && worst <= kMatchTol;
  return {ok, "gasket midpoint/Vicsek contact " + status + ", " + std::to_string(arms) + " arms, max |lambda| " +
                  fmt("%.1e", worst) + " (limit 1e-3)"};
}

Outcome strip_property(const std::vector<ParameterMatch>& matches) {
  std::mt19937 rng(11);
  std::size_t arcs = 0, violations = 0;
  for (const auto& m : matches)
    for (const auto& a : m.arms) {
      ++arcs;
      const auto& poly = a.arc.polyline;
      std::uniform_int_distribution<std::size_t> pick(0, poly.size() - 2);  // z0 excluded
      for (int s = 0; s < kSubarcs; ++s) {
        std::size_t i = pick(rng), j = pick(rng);
        if (i > j) std::swap(i, j);
        const std::vector<Point> sub(poly.begin() + static_cast<std::ptrdiff_t>(i),
                                     poly.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        const double darg = arg_increment(sub, a.arc.z0);
        const double dlog = std::log(std::abs(sub.back() - a.arc.z0) / std::abs(sub.front() - a.arc.z0));
        if (std::abs(darg - a.slope.lambda * dlog) > a.slope.residual + kStripSlack) ++violations;
      }
    }
  return {arcs > 0 && violations == 0, std::to_string(arcs) + " arcs x " + std::to_string(kSubarcs) + " subarcs, " +
                                           std::to_string(violations) + " violations (slack 1e-9)"};
}

Outcome zerner_checks() {
  const ZernerEstimate c = zerner_constant(test::cantor(), 1.0, 8);
  const bool cantor_ok = c.stabilized && c.by_depth.size() == 3 && c.by_depth[0] == c.by_depth[1] &&
                         c.by_depth[1] == c.by_depth[2];
  bool bounded = true;
  std::string detail = "Cantor M1 " + std::to_string(c.value) + (cantor_ok ? " stable over depths 6-8" : " NOT stable");
  for (const auto& [name, sys] : {std::pair{"gasket", test::gasket()}, std::pair{"vicsek", test::vicsek()}}) {
    const std::size_t m1 = zerner_constant(sys, 1.0, 7).value;
    std::size_t most = 0;
    for (const auto& cp : fi_report(sys).critical)
      most = std::max(most, count_addresses(sys, cp.cluster.center, 4 * cp.cluster.radius).count);
    bounded = bounded && most <= m1;
    detail += std::string("; ") + name + " max addresses " + std::to_string(most) + " <= M1 " + std::to_string(m1);
  }
  return {cantor_ok && bounded, detail};
}

Outcome reports_reproducible() {
  std::size_t same = 0, total = 0;
  for (const char* name : {"gasket", "vicsek", "vicsek_rotated", "cantor", "overlap", "segment"}) {
    const SystemSpec spec = load_spec(kSpecs + "/" + name + ".json");
    ++total;
    if (full_report(spec) == full_report(spec)) ++same;
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " bundled specs byte-identical"};
}

}  // namespace

int main() {
  int failed = 0;
  int index = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& f) {
    ++index;
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report("gasket is not a dendrite", gasket_not_dendrite);
  report("Vicsek is a dendrite", vicsek_dendrite);
  report("finite intersection verdicts", fi_verdicts);
  report("address counts on the gasket", address_counts);
  report("refinement equals direct construction", refinement_matches);
  report("tree refinements stay trees", random_refinements);
  report("spiral slope parameter", spiral_slope);
  std::vector<ParameterMatch> matches;
  report("parameter matching at contacts", [&] {
    matches = contact_matches();
    return parameter_matching(matches);
  });
  report("strip property", [&] { return strip_property(matches); });
  report("Zerner constants", zerner_checks);
  report("deterministic reports", reports_reproducible);

  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
