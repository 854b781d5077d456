#include "ifsg/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "ifsg/graph.hpp"
#include "ifsg/order.hpp"
#include "ifsg/slope.hpp"

namespace ifsg {

using nlohmann::json;

namespace {

json pt(Point p) { return json::array({p.real(), p.imag()}); }

json addresses_json(const std::optional<std::pair<Address, Address>>& ap) {
  if (!ap) return nullptr;
  return json::array({ap->first.str(), ap->second.str()});
}

json cluster_json(const IntersectionCluster& c) {
  return {{"center", pt(c.center)},
          {"radius", c.radius},
          {"witnesses", c.witnesses.size()},
          {"addresses", addresses_json(c.address_pair)}};
}

json fi_json(const FIReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["s"] = r.s;
  j["schedule"] = r.schedule;
  j["pairs"] = json::array();
  for (const auto& p : r.pairs) {
    json q{{"i", p.i + 1},
           {"j", p.j + 1},
           {"counts", p.counts},
           {"max_radius", p.max_radius},
           {"stabilized", p.stabilized},
           {"overlap", p.overlap},
           {"resource_limited", p.resource_limited}};
    if (!p.note.empty()) q["note"] = p.note;
    j["pairs"].push_back(q);
  }
  j["critical"] = json::array();
  for (std::size_t k = 0; k < r.critical.size(); ++k) {
    json c = cluster_json(r.critical[k].cluster);
    c["index"] = k;
    c["pieces"] = json::array();
    for (auto p : r.critical[k].pieces) c["pieces"].push_back(p + 1);
    j["critical"].push_back(c);
  }
  j["not_fi_witness"] =
      r.not_fi_witness ? json::array({r.not_fi_witness->first.str(), r.not_fi_witness->second.str()}) : json(nullptr);
  j["notes"] = r.notes;
  return j;
}

json graph_json(const IntersectionGraph& g, std::size_t level) {
  json j{{"level", level}};
  j["white"] = json::array();
  for (const auto& w : g.white()) j["white"].push_back(w.str());
  j["black"] = json::array();
  for (const auto& [id, v] : g.black()) j["black"].push_back({{"id", id.str()}, {"center", pt(v.center)}});
  j["edges"] = json::array();
  for (const auto& [w, b] : g.edges()) j["edges"].push_back({w.str(), b.str()});
  const TreeCheck t = is_tree(g);
  j["tree"] = to_string(t.status);
  j["cycle"] = t.cycle;
  return j;
}

json bounds_json(const OrderBounds& b) {
  return {{"M1", b.m1},
          {"M_third", b.m_third},
          {"M_half", b.m_half ? json(*b.m_half) : json(nullptr)},
          {"s", b.s},
          {"addresses", b.addresses},
          {"components", b.components},
          {"order", b.order},
          {"stabilized", b.stabilized},
          {"lower_estimates", true}};
}

json order_json(const OrderReport& r) {
  return {{"point", pt(r.point)},
          {"address_count", r.address_count},
          {"n_components", r.n_components},
          {"ord_estimate", r.ord_estimate},
          {"bounds", bounds_json(r.bounds)},
          {"consistent", r.consistent},
          {"notes", r.notes}};
}

json piece_json(const PieceOrderReport& r) {
  json boundary = json::array();
  for (auto p : r.boundary) boundary.push_back(pt(p));
  return {{"piece", r.piece.str()},
          {"boundary", boundary},
          {"address_counts", r.address_counts},
          {"address_total", r.address_total},
          {"n_components", r.n_components},
          {"bounds", bounds_json(r.bounds)},
          {"consistent", r.consistent},
          {"notes", r.notes}};
}

json zerner_json(const ZernerEstimate& z) {
  return {{"a", z.a},
          {"depth", z.depth},
          {"value", z.value},
          {"by_depth", z.by_depth},
          {"stabilized", z.stabilized},
          {"lower_estimate", z.lower_estimate},
          {"samples", z.samples},
          {"windows", z.windows}};
}

json arm_json(const ArmSlope& a) {
  return {{"address", a.address.str()},
          {"anchor", pt(a.anchor)},
          {"seed", pt(a.seed)},
          {"period_word", a.arc.period_word.str()},
          {"fundamental_count", a.arc.fundamental_count},
          {"points", a.arc.polyline.size()},
          {"cell_size", a.arc.cell_size},
          {"lambda", a.slope.lambda},
          {"winding", a.slope.winding},
          {"delta_arg", a.slope.delta_arg},
          {"log_lip", a.slope.log_lip},
          {"residual", a.slope.residual}};
}

json match_json(const ParameterMatch& m) {
  json arms = json::array();
  for (const auto& a : m.arms) arms.push_back(arm_json(a));
  return {{"status", to_string(m.status)}, {"lambda", m.lambda}, {"arms", arms}, {"note", m.note}};
}

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("point must be given as x,y");
  try {
    std::size_t used = 0;
    const double x = std::stod(text.substr(0, comma), &used);
    const double y = std::stod(text.substr(comma + 1));
    return {x, y};
  } catch (const std::logic_error&) {
    throw ValidationError("point must be given as x,y");
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

int fi_exit(const FIReport& r) {
  if (r.verdict == FIVerdict::NotFI) return kExitNegative;
  if (r.verdict == FIVerdict::Certified) return kExitOk;
  for (const auto& p : r.pairs)
    if (p.resource_limited) return kExitResource;
  return kExitAmbiguous;
}

// Flag value when given, else the spec file's override, else the default.
template <typename T>
void resolve(T& value, const CLI::Option* opt, const SystemSpec& spec, const char* key) {
  if (opt->count() == 0) value = static_cast<T>(spec.tolerance(key, static_cast<double>(value)));
}

}  // namespace

std::string full_report(const SystemSpec& spec, const ReportOptions& options) {
  const SimSystem system = spec.system();
  FIOptions fo;
  fo.pair_budget = static_cast<std::size_t>(spec.tolerance("pair_budget", static_cast<double>(fo.pair_budget)));
  const DendriteVerdict dv = dendrite_verdict(system, options.max_level, fo);
  const FIReport& fi = dv.fi;

  json rep;
  rep["system"] = {{"name", spec.name},
                   {"maps", system.size()},
                   {"r_min", system.r_min()},
                   {"r_max", system.r_max()},
                   {"diameter", attractor_diameter(system)}};
  if (spec.open_set) {
    const auto osc = check_open_set(system, *spec.open_set);
    rep["open_set"] = {{"images_inside", osc.images_inside}, {"images_disjoint", osc.images_disjoint}};
  }
  rep["fi"] = fi_json(fi);
  rep["dendrite"] = {{"outcome", to_string(dv.outcome)},
                     {"cycle", dv.cycle},
                     {"cycle_level", dv.cycle_level},
                     {"checked_levels", dv.checked_levels},
                     {"resource_limited", dv.resource_limited},
                     {"note", dv.note}};
  rep["critical"] = json::array();
  if (fi.verdict != FIVerdict::NotFI) {
    const bool dendrite = dv.outcome == DendriteOutcome::Dendrite;
    OrderOptions oo;
    oo.zerner_depth = options.zerner_depth;
    oo.bounds = zerner_bounds(system, fi, dendrite, options.zerner_depth);
    const auto& b = *oo.bounds;
    rep["zerner"] = {{"depth", options.zerner_depth},
                     {"M1", b.m1},
                     {"M_third", b.m_third},
                     {"M_half", b.m_half ? json(*b.m_half) : json(nullptr)},
                     {"stabilized", b.stabilized},
                     {"lower_estimates", true}};
    for (std::size_t k = 0; k < fi.critical.size(); ++k) {
      const auto& c = fi.critical[k];
      json e = cluster_json(c.cluster);
      e["index"] = k;
      Point x = c.cluster.center;
      OrderOptions po = oo;
      if (c.cluster.address_pair) {
        x = eval_address(system, c.cluster.address_pair->first);
      } else {
        po.tol = 4.0 * c.cluster.radius + 1e-9 * attractor_diameter(system);
      }
      try {
        e["order"] = order_json(order_report(system, x, fi, dendrite, po));
      } catch (const std::exception& err) {
        e["order"] = {{"error", err.what()}};
      }
      try {
        e["slope"] = match_json(parameter_match(system, c.cluster, options.slope_tol, options.arc_eps));
      } catch (const std::exception& err) {
        e["slope"] = {{"error", err.what()}};
      }
      rep["critical"].push_back(e);
    }
  }
  rep["assumptions"] = {"slope denominator is n log ratio(S_j) with n the fundamental count of the arc",
                        "Zerner constants are sampled lower estimates",
                        "order estimate is the number of local components"};
  return rep.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology of self-similar sets in the plane"};
  app.require_subcommand(1);
  std::string spec_path;
  auto add = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("spec", spec_path, "JSON system description")->required()->check(CLI::ExistingFile);
    return s;
  };

  std::vector<double> schedule{1e-3, 1e-5, 1e-7};
  std::size_t pair_budget = Budget::from_env().pairs;
  auto* fi_cmd = add("fi", "finite-intersection report");
  fi_cmd->add_option("--schedule", schedule, "tolerances, coarse to fine")->capture_default_str();
  auto* pb_opt = fi_cmd->add_option("--pair-budget", pair_budget, "pair budget per tolerance")->capture_default_str();

  std::size_t level = 1;
  std::string dot_path;
  auto* graph_cmd = add("graph", "intersection graph of one level");
  graph_cmd->add_option("--level", level, "level n")->capture_default_str()->check(CLI::Range(1, 12));
  graph_cmd->add_option("--dot", dot_path, "write Graphviz here");

  std::size_t max_level = 3;
  auto* dendrite_cmd = add("dendrite", "dendrite verdict from intersection graphs");
  auto* ml_opt = dendrite_cmd->add_option("--max-level", max_level, "deepest level checked")->capture_default_str();
  dendrite_cmd->add_option("--dot", dot_path, "write the cycle witness here");

  std::string point_text, piece_text;
  std::size_t zdepth = 7;
  double address_tol = 0.0;
  auto* order_cmd = add("order", "address count, local components and order bounds");
  auto* point_opt = order_cmd->add_option("--point", point_text, "x,y");
  auto* piece_opt = order_cmd->add_option("--piece", piece_text, "word, e.g. 12");
  point_opt->excludes(piece_opt);
  auto* zd_opt = order_cmd->add_option("--zerner-depth", zdepth, "depth of the Zerner estimates")->capture_default_str();
  auto* at_opt = order_cmd->add_option("--address-tol", address_tol, "membership tolerance (0: 1e-9 |K|)");
  order_cmd->add_option("--max-level", max_level, "levels for the dendrite check")->capture_default_str();

  double a_value = 1.0;
  std::size_t zsamples = 3'000'000;
  auto* zerner_cmd = add("zerner", "sampled Zerner constant M_a");
  zerner_cmd->add_option("--a", a_value, "window factor a")->capture_default_str()->check(CLI::PositiveNumber);
  zerner_cmd->add_option("--depth", zdepth, "maximal word length")->capture_default_str()->check(CLI::Range(1, 16));
  zerner_cmd->add_option("--samples", zsamples, "sample budget")->capture_default_str();

  std::size_t cluster_id = 0;
  std::string period_text;
  double arc_eps = 1e-3, slope_tol = 1e-3;
  std::string arc_svg;
  auto* slope_cmd = add("slope", "invariant arcs and slope parameters");
  auto* cl_opt = slope_cmd->add_option("--cluster", cluster_id, "index of a critical point (see fi)");
  auto* pe_opt = slope_cmd->add_option("--period", period_text, "period word of a fixed point");
  cl_opt->excludes(pe_opt);
  auto* ae_opt = slope_cmd->add_option("--eps", arc_eps, "arc resolution")->capture_default_str();
  auto* st_opt = slope_cmd->add_option("--tol", slope_tol, "matching tolerance")->capture_default_str();
  slope_cmd->add_option("--svg", arc_svg, "draw the arcs over the attractor");

  std::string svg_path, pbm_path;
  double render_eps = 1e-2;
  bool with_clusters = false;
  auto* render_cmd = add("render", "cell cover as SVG or PBM");
  render_cmd->add_option("--svg", svg_path, "SVG output");
  render_cmd->add_option("--pbm", pbm_path, "PBM output");
  auto* re_opt = render_cmd->add_option("--eps", render_eps, "cover resolution")->capture_default_str();
  render_cmd->add_flag("--clusters", with_clusters, "circle the critical points");

  std::string json_path;
  ReportOptions ropt;
  auto* report_cmd = add("report", "full pipeline as JSON");
  report_cmd->add_option("--json", json_path, "write here instead of stdout");
  auto* rml_opt = report_cmd->add_option("--max-level", ropt.max_level, "levels for the dendrite check")->capture_default_str();
  auto* rzd_opt = report_cmd->add_option("--zerner-depth", ropt.zerner_depth, "depth of the Zerner estimates")->capture_default_str();
  auto* rae_opt = report_cmd->add_option("--eps", ropt.arc_eps, "arc resolution")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const SystemSpec spec = load_spec(spec_path);
    const SimSystem system = spec.system();
    resolve(pair_budget, pb_opt, spec, "pair_budget");
    FIOptions fo{schedule, pair_budget};
    auto emit = [&](const json& j) { out << j.dump(2) << "\n"; };

    if (fi_cmd->parsed()) {
      const FIReport r = fi_report(system, fo);
      emit(fi_json(r));
      return fi_exit(r);
    }
    if (graph_cmd->parsed()) {
      const FIReport r = fi_report(system, fo);
      if (r.verdict == FIVerdict::NotFI) {
        emit({{"fi", fi_json(r)}, {"note", "intersection graphs need a finite-intersection system"}});
        return kExitNegative;
      }
      const IntersectionGraph g = build_graph(system, level, r);
      if (!dot_path.empty()) write_file(dot_path, to_dot(g, is_tree(g).cycle));
      emit(graph_json(g, level));
      return kExitOk;
    }
    if (dendrite_cmd->parsed()) {
      resolve(max_level, ml_opt, spec, "max_level");
      const DendriteVerdict d = dendrite_verdict(system, max_level, fo);
      json j{{"outcome", to_string(d.outcome)},
             {"cycle", d.cycle},
             {"cycle_level", d.cycle_level},
             {"checked_levels", d.checked_levels},
             {"resource_limited", d.resource_limited},
             {"note", d.note},
             {"fi_verdict", to_string(d.fi.verdict)}};
      if (d.outcome == DendriteOutcome::NotDendrite) {
        const std::string dot = to_dot(build_graph(system, d.cycle_level, d.fi), d.cycle);
        j["witness_dot"] = dot;
        if (!dot_path.empty()) write_file(dot_path, dot);
      }
      emit(j);
      if (d.outcome == DendriteOutcome::Dendrite) return kExitOk;
      if (d.outcome == DendriteOutcome::NotDendrite) return kExitNegative;
      return d.resource_limited ? kExitResource : kExitAmbiguous;
    }
    if (order_cmd->parsed()) {
      if (point_text.empty() == piece_text.empty()) throw ValidationError("order needs exactly one of --point, --piece");
      resolve(zdepth, zd_opt, spec, "zerner_depth");
      resolve(address_tol, at_opt, spec, "address_tol");
      const DendriteVerdict d = dendrite_verdict(system, max_level, fo);
      if (d.fi.verdict == FIVerdict::NotFI) {
        emit({{"fi", fi_json(d.fi)}, {"note", "order bounds need a finite-intersection system"}});
        return kExitNegative;
      }
      const bool dendrite = d.outcome == DendriteOutcome::Dendrite;
      OrderOptions oo{zdepth, address_tol, std::nullopt};
      json j;
      bool consistent = true;
      if (!point_text.empty()) {
        const auto r = order_report(system, parse_point(point_text), d.fi, dendrite, oo);
        j = order_json(r);
        consistent = r.consistent;
      } else {
        const auto r = piece_order_report(system, Multiindex::parse(piece_text), d.fi, dendrite, oo);
        j = piece_json(r);
        consistent = r.consistent;
      }
      j["dendrite"] = to_string(d.outcome);
      emit(j);
      return consistent ? kExitOk : kExitAmbiguous;
    }
    if (zerner_cmd->parsed()) {
      const auto z = zerner_constant(system, a_value, zdepth, zsamples);
      emit(zerner_json(z));
      return z.stabilized ? kExitOk : kExitAmbiguous;
    }
    if (slope_cmd->parsed()) {
      resolve(arc_eps, ae_opt, spec, "arc_eps");
      resolve(slope_tol, st_opt, spec, "slope_tol");
      std::vector<ArmSlope> arms;
      int code = kExitOk;
      json j;
      if (pe_opt->count() > 0) {
        const Multiindex w = Multiindex::parse(period_text);
        system.check(w);
        arms = slopes_at_fixed_point(system, w, arc_eps);
        j["period"] = w.str();
        j["arms"] = json::array();
        for (const auto& a : arms) j["arms"].push_back(arm_json(a));
      } else {
        const FIReport r = fi_report(system, fo);
        if (cluster_id >= r.critical.size())
          throw ValidationError("cluster index out of range (" + std::to_string(r.critical.size()) + " critical points)");
        const auto m = parameter_match(system, r.critical[cluster_id].cluster, slope_tol, arc_eps);
        j = match_json(m);
        j["cluster"] = cluster_json(r.critical[cluster_id].cluster);
        arms = m.arms;
        code = m.status == MatchStatus::Matched ? kExitOk
               : m.status == MatchStatus::Mismatched ? kExitNegative
                                                     : kExitAmbiguous;
      }
      j["assumption"] = "slope denominator is n log ratio(S_j) with n the fundamental count of the arc";
      if (!arc_svg.empty()) {
        SvgLayer layer;
        for (const auto& a : arms) layer.polylines.push_back(a.arc.polyline);
        write_file(arc_svg, to_svg(cover(system, {}, 1e-2), layer));
      }
      emit(j);
      return code;
    }
    if (render_cmd->parsed()) {
      resolve(render_eps, re_opt, spec, "render_eps");
      if (svg_path.empty() && pbm_path.empty()) throw ValidationError("render needs --svg or --pbm");
      const CellCover c = cover(system, {}, render_eps);
      SvgLayer layer;
      if (with_clusters)
        for (const auto& p : fi_report(system, fo).critical)
          layer.circles.emplace_back(p.cluster.center, std::max(p.cluster.radius, 2.0 * c.cell_size));
      if (!svg_path.empty()) write_file(svg_path, to_svg(c, layer));
      if (!pbm_path.empty()) write_file(pbm_path, to_pbm(c));
      emit({{"cells", c.cells.size()}, {"cell_size", c.cell_size}, {"error_bound", c.error_bound}, {"leaves", c.leaf_count}});
      return kExitOk;
    }
    if (report_cmd->parsed()) {
      resolve(ropt.max_level, rml_opt, spec, "max_level");
      resolve(ropt.zerner_depth, rzd_opt, spec, "zerner_depth");
      resolve(ropt.arc_eps, rae_opt, spec, "arc_eps");
      ropt.slope_tol = spec.tolerance("slope_tol", ropt.slope_tol);
      const std::string text = full_report(spec, ropt);
      if (json_path.empty()) {
        out << text;
      } else {
        write_file(json_path, text);
      }
      return kExitOk;
    }
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const InconclusiveError& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kExitAmbiguous;
  } catch (const PrecisionError& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kExitAmbiguous;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ifsg
