#include "morphoscope/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "morphoscope/catalog.hpp"
#include "morphoscope/hermitian.hpp"
#include "morphoscope/parallel.hpp"
#include "morphoscope/random.hpp"
#include "morphoscope/symbol.hpp"
#include "morphoscope/twistor.hpp"
#include "morphoscope/weingarten.hpp"

namespace morpho {

namespace {

json to_json(const Vec2& v) { return json::array({v[0], v[1]}); }
json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }
json to_json(const Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }

template <class M>
json matrix_json(const M& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json fit_json(const RateFit& f) {
  return {{"radii", f.radii},       {"values", f.values},           {"slope", f.slope},
          {"constant", f.constant}, {"residual", f.residual},       {"zero_branch", f.zero_branch},
          {"points_used", f.points_used}};
}

json conventions() {
  return {
      {"curvature", "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z; Omega^T = <R(t1,t2)t1,t2>, "
                    "Omega^N = <R(t1,t2)n1,n2>; the round unit sphere gives Omega^T = -1"},
      {"fiber_basis", kFiberConvention},
      {"lift_structure", kScriptJConvention},
      {"target_frame", "eps1 = first target coordinate direction normalized by h, eps2 = j eps1"},
      {"complex_coordinates", "w1 = x1 + i x2, w2 = x3 + i x4; real maps read as f = F1 + i F2"},
      {"structure_norm", "Frobenius norm in a chart normalized so that g(m0) = I"},
      {"metric_defect_norm", "spectral norm"},
      {"tensor_norm", "|K|^2 = tr(g^-1 K^T g K)"},
      {"critical_threshold", "regular iff the top singular value of dF exceeds the configured threshold"},
  };
}

class Verdicts {
 public:
  void add(const std::string& check, bool pass, json evidence) {
    list_.push_back({{"check", check}, {"status", pass ? "PASS" : "FAIL"}, {"evidence", std::move(evidence)}});
    all_ = all_ && pass;
  }
  const json& list() const { return list_; }
  bool all() const { return all_; }

 private:
  json list_ = json::array();
  bool all_ = true;
};

struct Context {
  const RunOptions& opts;
  const ScenarioConfig& cfg;
  json records = json::array();
  json fits = json::object();
  json extra = json::object();
  Verdicts verdicts;
  std::string csv;
};

std::vector<Vec4> regular_samples(const ScenarioConfig& cfg, int count) {
  const MorphismScenario& s = cfg.scenario;
  Rng rng(cfg.analysis.seed);
  std::vector<Vec4> pts;
  const long max_attempts = 100L * count;
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(pts.size()) < count; ++attempt) {
    const Vec4 p = rng.point_in(s.metric().domain());
    if (classify_point(s, p, cfg.analysis.critical_threshold).regular) pts.push_back(p);
  }
  if (static_cast<int>(pts.size()) < count) {
    throw PreconditionError("could not draw " + std::to_string(count) + " regular points from the domain");
  }
  return pts;
}

std::vector<Vec4> evaluation_points(const Context& c) {
  if (c.opts.point) return {*c.opts.point};
  if (!c.cfg.analysis.points.empty()) return c.cfg.analysis.points;
  return regular_samples(c.cfg, c.cfg.analysis.samples);
}

Vec4 center_point(const Context& c) {
  const Vec4 m = c.opts.point.value_or(c.cfg.analysis.center);
  c.cfg.scenario.metric().require_inside(m);
  return m;
}

bool einstein_metric(const json& metric) {
  const std::string kind = metric.at("kind");
  if (kind == "flat") return true;
  if (kind == "pullback") return einstein_metric(metric.at("base"));
  return false;
}

void cmd_validate(Context& c) {
  const std::vector<Vec4> pts = evaluation_points(c);
  for (const auto& p : pts) c.cfg.scenario.metric().require_inside(p);
  const ValidationReport v = validate_morphism(c.cfg.scenario, pts, c.cfg.analysis.tolerance, c.opts.workers);
  for (const auto& r : v.records) {
    c.records.push_back({{"point", to_json(r.point)},
                         {"regular", r.regular},
                         {"lambda2", r.lambda2},
                         {"hwc_defect", r.hwc_defect},
                         {"tension_norm", r.tension_norm}});
  }
  const json common = {{"regular_points", v.regular_count}, {"tolerance", v.tolerance}};
  json e1 = common, e2 = common;
  e1["max_hwc_defect"] = v.max_hwc_defect;
  e2["max_tension_norm"] = v.max_tension;
  c.verdicts.add("hwc_defect", v.regular_count > 0 && v.max_hwc_defect <= v.tolerance, e1);
  c.verdicts.add("tension", v.regular_count > 0 && v.max_tension <= v.tolerance, e2);
}

void cmd_analyze(Context& c) {
  const MorphismScenario& s = c.cfg.scenario;
  const Vec4 m = center_point(c);
  const double tol = c.cfg.analysis.tolerance.value_or(default_validation_tolerance(s));
  const Classification cl = classify_point(s, m, c.cfg.analysis.critical_threshold);
  const HwcResult hwc = hwc_residual(s, m);
  const double tau = tension_norm(s, m);
  json rec = {{"point", to_json(m)},
              {"classification", cl.regular ? "regular" : "critical"},
              {"dilation_sup", cl.dilation},
              {"lambda2", hwc.lambda2},
              {"hwc_defect", hwc.defect},
              {"tension", to_json(tension_field(s, m))}};
  c.verdicts.add("hwc_defect", hwc.defect <= tol, {{"hwc_defect", hwc.defect}, {"tolerance", tol}});
  c.verdicts.add("tension", tau <= tol, {{"tension_norm", tau}, {"tolerance", tol}});
  if (cl.regular) {
    SplitOptions so;
    so.critical_threshold = c.cfg.analysis.critical_threshold;
    const HermitianPair hp = hermitian_pair(s, m, so);
    const PointSplit& sp = hp.split;
    const double res_plus = pseudo_holomorphy_residual(s, m, hp.J_plus);
    const double res_minus = pseudo_holomorphy_residual(s, m, hp.J_minus);
    const Vec4 H = fiber_mean_curvature_exact(s, m);
    rec["lambda"] = sp.lambda;
    rec["singular_values"] = to_json(sp.singular_values);
    rec["frame"] = {{"e1", to_json(sp.e1)}, {"e2", to_json(sp.e2)}, {"v1", to_json(sp.v1)}, {"v2", to_json(sp.v2)}};
    rec["vertical_projection"] = matrix_json(sp.P_V);
    rec["J_plus"] = matrix_json(hp.J_plus);
    rec["J_minus"] = matrix_json(hp.J_minus);
    rec["pseudo_holomorphy_residual"] = {{"plus", res_plus}, {"minus", res_minus}};
    rec["fiber_mean_curvature"] = to_json(H);
    c.verdicts.add("pseudo_holomorphy", std::max(res_plus, res_minus) <= tol,
                   {{"J_plus", res_plus}, {"J_minus", res_minus}, {"tolerance", tol}});
  }
  c.records.push_back(rec);
}

json candidate_json(const StructureCandidate& k) {
  json coeffs = json::array();
  for (const auto& t : k.coefficients) coeffs.push_back({{"i", t.i}, {"j", t.j}, {"re", t.c.real()}, {"im", t.c.imag()}});
  return {{"orientation", k.orientation},
          {"J", matrix_json(k.J)},
          {"frame", matrix_json(k.frame)},
          {"coefficients", coeffs},
          {"antiholomorphic", k.antiholomorphic}};
}

void cmd_symbol(Context& c) {
  const Vec4 m = center_point(c);
  try {
    const SymbolData sd = symbol_polynomial(c.cfg.scenario, m);
    json cands = json::array();
    for (const auto& k : sd.candidates) cands.push_back(candidate_json(k));
    c.records.push_back({{"point", to_json(m)},
                         {"order", sd.order},
                         {"P0", json::array({polynomial_to_json(sd.P0[0]), polynomial_to_json(sd.P0[1])})},
                         {"candidates", cands}});
    json tags = json::array();
    for (const auto& k : sd.candidates) tags.push_back(k.orientation);
    c.verdicts.add("symbol_holomorphic", true,
                   {{"order", sd.order}, {"candidates", sd.candidates.size()}, {"orientations", tags}});
  } catch (const SymbolError& e) {
    c.records.push_back({{"point", to_json(m)}, {"error", e.what()}});
    c.verdicts.add("symbol_holomorphic", false, {{"reason", e.what()}});
  }
}

void cmd_rate(Context& c) {
  const MorphismScenario& s = c.cfg.scenario;
  const AnalysisConfig& a = c.cfg.analysis;
  const Vec4 m = center_point(c);
  const std::vector<Vec4> dirs = seeded_directions(a.directions, a.seed);
  try {
    const MainLemmaReport ml = main_lemma_rate(s, m, dirs, a.radii, a.orientation, c.opts.workers);
    c.fits["main_lemma_deviation"] = fit_json(ml.deviation);
    c.fits["metric_defect"] = fit_json(ml.metric_defect);
    c.fits["skew_defect"] = fit_json(ml.skew_defect);
    c.extra["substitutions"] = ml.substitutions;
    c.verdicts.add("main_lemma_rate", ml.pass,
                   {{"slope", ml.deviation.slope},
                    {"constant", ml.deviation.constant},
                    {"zero_branch", ml.deviation.zero_branch},
                    {"threshold", 0.9}});
    c.verdicts.add("compatibility_defects", ml.defects_pass,
                   {{"metric_slope", ml.metric_defect.slope},
                    {"skew_slope", ml.skew_defect.slope},
                    {"metric_zero_branch", ml.metric_defect.zero_branch},
                    {"skew_zero_branch", ml.skew_defect.zero_branch},
                    {"threshold", 1.9}});
  } catch (const SymbolError& e) {
    c.verdicts.add("main_lemma_rate", false, {{"reason", e.what()}});
  }
  const RemainderRates rr = remainder_rates(s, m, a.radii, dirs, c.opts.workers);
  c.fits["remainder_value"] = fit_json(rr.value);
  c.fits["remainder_differential"] = fit_json(rr.differential);
  c.verdicts.add("remainder_rates", rr.pass,
                 {{"order", rr.order},
                  {"value_slope", rr.value.slope},
                  {"value_threshold", rr.order + 0.9},
                  {"differential_slope", rr.differential.slope},
                  {"differential_threshold", rr.order - 0.1}});
  const DilationRate dr = dilation_lower_rate(s, m, a.radii, dirs, c.opts.workers);
  c.fits["dilation_lower"] = fit_json(dr.fit);
  c.verdicts.add("dilation_lower_bound", dr.pass,
                 {{"order", dr.order},
                  {"slope", dr.fit.slope},
                  {"slope_ceiling", dr.order - 0.9},
                  {"lower_constant", dr.lower_constant},
                  {"excluded_directions", dr.excluded}});
  for (std::size_t i = 0; i < a.radii.size(); ++i) {
    json rec{{"radius", a.radii[i]}};
    for (const auto& [name, fit] : c.fits.items()) {
      if (i < fit["values"].size()) rec[name] = fit["values"][i];
    }
    c.records.push_back(std::move(rec));
  }
}

json weingarten_json(const WeingartenReport& w, bool direct) {
  const Coefficients& k = w.coefficients;
  json r = {{"point", to_json(w.point)},
            {"T", to_json(w.T)},
            {"a", k.a},
            {"b", k.b},
            {"c", k.c},
            {"d", k.d},
            {"R1", w.polar.R1},
            {"theta", w.polar.theta},
            {"R2", w.polar.R2},
            {"alpha", w.polar.alpha},
            {"commutator_norm", w.commutator_norm},
            {"nablaJ_plus_closed", w.norms.plus_closed},
            {"nablaJ_minus_closed", w.norms.minus_closed},
            {"product", w.product},
            {"product_polar", w.product_polar}};
  if (direct) {
    r["nablaJ_plus_direct"] = w.norms.plus_direct;
    r["nablaJ_minus_direct"] = w.norms.minus_direct;
    r["nablaJ_plus_mixed"] = w.norms.plus_mixed;
    r["nablaJ_minus_mixed"] = w.norms.minus_mixed;
  }
  return r;
}

// Relative difference, with values below `floor` treated as absolute.
double relative_gap(double x, double y, double floor) {
  return std::abs(x - y) / std::max({std::abs(x), std::abs(y), floor});
}

void cmd_weingarten_points(Context& c) {
  const MorphismScenario& s = c.cfg.scenario;
  const std::vector<Vec4> pts = evaluation_points(c);
  WeingartenOptions wo;
  wo.angle = c.cfg.analysis.angle;
  std::vector<WeingartenReport> reps(pts.size());
  parallel_for(pts.size(), c.opts.workers, [&](std::size_t i) {
    s.metric().require_inside(pts[i]);
    reps[i] = weingarten_report(s, pts[i], wo, true);
  });
  bool agree = true;
  double worst_gap = 0.0, worst_comm = 0.0, worst_identity = 0.0;
  for (const auto& w : reps) {
    c.records.push_back(weingarten_json(w, true));
    agree = agree && norms_agree(w.norms.plus_closed, w.norms.plus_direct) &&
            norms_agree(w.norms.minus_closed, w.norms.minus_direct);
    worst_gap = std::max({worst_gap, relative_gap(w.norms.plus_closed, w.norms.plus_direct, 1e-5),
                          relative_gap(w.norms.minus_closed, w.norms.minus_direct, 1e-5)});
    worst_comm = std::max(worst_comm, w.commutator_norm);
    worst_identity = std::max(worst_identity, relative_gap(w.product, w.product_polar, 1.0));
  }
  c.verdicts.add("closed_vs_direct_norms", agree,
                 {{"max_relative_gap", worst_gap}, {"relative_tolerance", 1e-3}, {"points", pts.size()}});
  c.verdicts.add("product_polar_identity", worst_identity <= 1e-10,
                 {{"max_relative_gap", worst_identity}, {"tolerance", 1e-10}});
  if (einstein_metric(c.cfg.canonical.at("metric"))) {
    c.verdicts.add("einstein_commutator", worst_comm <= 1e-4, {{"max_norm", worst_comm}, {"tolerance", 1e-4}});
  } else {
    c.extra["max_commutator_norm"] = worst_comm;
  }
}

void cmd_weingarten_scan(Context& c) {
  const AnalysisConfig& a = c.cfg.analysis;
  const Vec4 m = center_point(c);
  const ProductScan scan = product_bound_scan(c.cfg.scenario, m, a.scan_radii,
                                              seeded_directions(a.directions, a.seed), c.opts.workers);
  for (const auto& w : scan.samples) c.records.push_back(weingarten_json(w, false));
  json annuli = json::array();
  for (const auto& an : scan.annuli) {
    annuli.push_back({{"r_outer", an.r_outer},
                      {"r_inner", an.r_inner},
                      {"max_product", an.max_product},
                      {"max_plus", an.max_plus},
                      {"max_minus", an.max_minus},
                      {"samples", an.samples}});
  }
  c.extra["annuli"] = annuli;
  c.verdicts.add("product_bounded", scan.bounded,
                 {{"plateau", scan.plateau}, {"factor", 1.5}, {"zero_floor", kProductZeroFloor}, {"annuli", annuli}});
  c.csv = records_to_csv(c.records);
}

void cmd_twistor(Context& c) {
  const MorphismScenario& s = c.cfg.scenario;
  std::vector<const PatchConfig*> patches;
  if (c.opts.patch) {
    patches.push_back(&c.cfg.patch(*c.opts.patch));
  } else {
    for (const auto& p : c.cfg.patches) patches.push_back(&p);
  }
  if (patches.empty()) throw ConfigError("patches: the scenario defines no surface patches");
  for (const PatchConfig* pc : patches) {
    std::vector<LiftSample> samples(pc->parameters.size());
    parallel_for(samples.size(), c.opts.workers, [&](std::size_t i) {
      s.metric().require_inside(pc->patch.point(pc->parameters[i]));
      samples[i] = lift_sample(s, pc->patch, pc->parameters[i], pc->tag);
    });
    double max_res = 0.0, min_res = std::numeric_limits<double>::infinity();
    double dev_T = 0.0, dev_N = 0.0;
    for (const auto& ls : samples) {
      c.records.push_back({{"patch", pc->name},
                           {"parameter", to_json(ls.parameter)},
                           {"point", to_json(ls.gamma.point)},
                           {"tag", ls.tag},
                           {"fiber", to_json(ls.gamma.fiber)},
                           {"residual", ls.residual},
                           {"horizontal_residual", ls.horizontal_residual},
                           {"vertical_energy", ls.vertical_energy},
                           {"area", {{"hh", ls.area.hh}, {"hv", ls.area.hv}, {"vh", ls.area.vh}, {"vv", ls.area.vv}}},
                           {"omega_T", ls.omega_T},
                           {"omega_N", ls.omega_N}});
      max_res = std::max(max_res, ls.residual);
      min_res = std::min(min_res, ls.residual);
      if (pc->omega_T_abs) dev_T = std::max(dev_T, std::abs(std::abs(ls.omega_T) - *pc->omega_T_abs));
      if (pc->omega_N) dev_N = std::max(dev_N, std::abs(ls.omega_N - *pc->omega_N));
    }
    if (pc->minimal) {
      if (*pc->minimal) {
        c.verdicts.add("lift_holomorphic[" + pc->name + "]", max_res <= 1e-5,
                       {{"max_residual", max_res}, {"tolerance", 1e-5}});
      } else {
        c.verdicts.add("lift_not_holomorphic[" + pc->name + "]", min_res >= 1e-2,
                       {{"min_residual", min_res}, {"threshold", 1e-2}});
      }
    }
    if (pc->omega_T_abs) {
      c.verdicts.add("omega_T[" + pc->name + "]", dev_T <= 1e-4,
                     {{"expected_abs", *pc->omega_T_abs}, {"max_deviation", dev_T}, {"tolerance", 1e-4}});
    }
    if (pc->omega_N) {
      c.verdicts.add("omega_N[" + pc->name + "]", dev_N <= 1e-4,
                     {{"expected", *pc->omega_N}, {"max_deviation", dev_N}, {"tolerance", 1e-4}});
    }
  }
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json command_echo(const RunOptions& o) {
  json args = {{"config", o.config}, {"format", o.format}};
  if (o.point) args["point"] = to_json(*o.point);
  if (o.seed) args["seed"] = *o.seed;
  if (o.fd_step) args["fd_step"] = *o.fd_step;
  if (o.scan) args["scan"] = true;
  if (o.patch) args["patch"] = *o.patch;
  return {{"name", o.command}, {"args", args}};
}

json finish_report(json report) {
  report["fingerprint"] = report_fingerprint(report);
  report["timestamp"] = utc_timestamp();
  return report;
}

void print_verdicts(const json& report, std::ostream& out) {
  const std::string scen = report.contains("scenario") ? report["scenario"]["name"].get<std::string>() : "catalog";
  for (const auto& v : report["verdicts"]) {
    out << v["status"].get<std::string>() << ' ' << report["command"]["name"].get<std::string>() << ' ' << scen << ' '
        << v["check"].get<std::string>() << ' ' << v["evidence"].dump() << '\n';
  }
}

std::string file_stem(const json& report) {
  std::string s = report["command"]["name"].get<std::string>();
  if (report.contains("scenario")) s = report["scenario"]["name"].get<std::string>() + "_" + s;
  if (report["command"]["args"].value("scan", false)) s += "_scan";
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text, RunResult& r) {
  std::ofstream f(path);
  if (!f) throw ConfigError("out: cannot write '" + path.string() + "'");
  f << text;
  r.files.push_back(path.string());
}

RunResult run_catalog(const RunOptions& opts, RunResult r) {
  Verdicts verdicts;
  json entries = json::array();
  std::vector<std::pair<std::string, json>> canon;
  for (const auto& e : catalog_entries()) {
    const ScenarioConfig first = parse_config(catalog_config(e.name));
    const std::string fp = fingerprint(first.canonical);
    const std::string again = fingerprint(parse_config(json::parse(first.canonical.dump())).canonical);
    entries.push_back({{"name", e.name}, {"description", e.description}, {"fingerprint", fp}});
    verdicts.add("round_trip[" + e.name + "]", fp == again, {{"fingerprint", fp}, {"reparsed", again}});
    canon.emplace_back(e.name, first.canonical);
  }
  json report = {{"tool", kToolName},          {"version", kToolVersion}, {"command", command_echo(opts)},
                 {"conventions", conventions()}, {"entries", entries},      {"verdicts", verdicts.list()}};
  r.report = finish_report(std::move(report));
  r.exit_code = verdicts.all() ? 0 : 1;
  if (opts.write_files) {
    const std::filesystem::path dir = std::filesystem::path(opts.out_dir) / "catalog";
    std::filesystem::create_directories(dir);
    for (const auto& [name, j] : canon) write_text(dir / (name + ".json"), j.dump(2) + "\n", r);
  }
  return r;
}

RunResult run_command(const RunOptions& opts) {
  RunResult r;
  if (opts.workers < 1) throw ConfigError("workers: must be at least 1");
  if (opts.format != "json" && opts.format != "csv") throw ConfigError("format: expected 'json' or 'csv'");
  if (opts.command == "catalog") return run_catalog(opts, std::move(r));
  if (opts.config.empty()) throw ConfigError("config: required for command '" + opts.command + "'");

  json raw = resolve_config(opts.config);
  if (!raw.is_object()) throw ConfigError("<root>: expected a JSON object");
  if (opts.seed || opts.fd_step) {
    json& a = raw["analysis"];
    if (a.is_null()) a = json::object();
    if (opts.seed) a["seed"] = *opts.seed;
    if (opts.fd_step) a["fd_step"] = *opts.fd_step;
  }
  const ScenarioConfig cfg = parse_config(raw);

  Context c{opts, cfg, json::array(), json::object(), json::object(), {}, {}};
  if (opts.command == "validate") {
    cmd_validate(c);
  } else if (opts.command == "analyze") {
    cmd_analyze(c);
  } else if (opts.command == "symbol") {
    cmd_symbol(c);
  } else if (opts.command == "rate") {
    cmd_rate(c);
  } else if (opts.command == "weingarten") {
    if (opts.scan) {
      cmd_weingarten_scan(c);
    } else {
      cmd_weingarten_points(c);
    }
  } else if (opts.command == "twistor") {
    cmd_twistor(c);
  } else {
    throw ConfigError("command: unknown command '" + opts.command + "'");
  }
  if (c.csv.empty() && opts.format == "csv") c.csv = records_to_csv(c.records);

  json report = {{"tool", kToolName},
                 {"version", kToolVersion},
                 {"command", command_echo(opts)},
                 {"scenario", {{"name", cfg.scenario.name()}, {"fingerprint", fingerprint(cfg.canonical)}, {"config", cfg.canonical}}},
                 {"conventions", conventions()},
                 {"records", c.records},
                 {"fits", c.fits},
                 {"verdicts", c.verdicts.list()}};
  if (!c.extra.empty()) report["summary"] = c.extra;
  r.report = finish_report(std::move(report));
  r.csv = c.csv;
  r.exit_code = c.verdicts.all() ? 0 : 1;
  if (opts.write_files) {
    const std::filesystem::path dir(opts.out_dir);
    std::filesystem::create_directories(dir);
    const std::string stem = file_stem(r.report);
    write_text(dir / (stem + ".json"), r.report.dump(2) + "\n", r);
    if (!r.csv.empty()) write_text(dir / (stem + ".csv"), r.csv, r);
  }
  return r;
}

void flatten(const std::string& prefix, const json& v, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(prefix.empty() ? k : prefix + "." + k, x, out);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(prefix + "_" + std::to_string(i), v[i], out);
  } else if (v.is_string()) {
    out.emplace_back(prefix, v.get<std::string>());
  } else {
    out.emplace_back(prefix, v.dump());
  }
}

}  // namespace

std::string records_to_csv(const json& records) {
  std::vector<std::string> header;
  std::vector<std::vector<std::pair<std::string, std::string>>> rows;
  for (const auto& rec : records) {
    auto& row = rows.emplace_back();
    flatten("", rec, row);
    for (const auto& [k, v] : row) {
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
    }
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os << ',';
      for (const auto& [k, v] : row) {
        if (k == header[i]) {
          os << (v.find(',') == std::string::npos ? v : "\"" + v + "\"");
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string report_fingerprint(const json& report) {
  json copy = report;
  copy.erase("fingerprint");
  copy.erase("timestamp");
  return fingerprint(copy);
}

Vec4 parse_point(const std::string& text) {
  Vec4 p;
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 4) throw ConfigError("point: expected 4 comma-separated numbers");
    try {
      std::size_t used = 0;
      p[i] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("point: '" + item + "' is not a number");
    }
    ++i;
  }
  if (i != 4) throw ConfigError("point: expected 4 comma-separated numbers");
  return p;
}

RunResult run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    RunResult r = run_command(opts);
    print_verdicts(r.report, out);
    return r;
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = 2;
    r.error = e.what();
    err << "error: " << e.what() << '\n';
    return r;
  } catch (const json::exception& e) {
    RunResult r;
    r.exit_code = 2;
    r.error = e.what();
    err << "error: " << e.what() << '\n';
    return r;
  } catch (const std::filesystem::filesystem_error& e) {
    RunResult r;
    r.exit_code = 2;
    r.error = e.what();
    err << "error: " << e.what() << '\n';
    return r;
  }
}

}  // namespace morpho
