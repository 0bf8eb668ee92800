#include "morphoscope/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "morphoscope/rate_fit.hpp"

namespace morpho {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "required field is missing");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::string string_field(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

int sign_field(const json& v, const std::string& path) {
  const int s = integer(v, path);
  if (s != 1 && s != -1) fail(path, "must be 1 or -1");
  return s;
}

Vec4 vec4(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) fail(path, "expected an array of 4 numbers");
  Vec4 x;
  for (int i = 0; i < 4; ++i) x[i] = number(v[i], path + "[" + std::to_string(i) + "]");
  return x;
}

json vec_json(const Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }

RealPoly parse_polynomial(const json& v, const std::string& path, int max_degree, int variables) {
  if (!v.is_array()) fail(path, "expected an array of terms {exponents, coeff}");
  RealPoly p;
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::string tp = path + "[" + std::to_string(t) + "]";
    const json& ex = require(v[t], "exponents", tp);
    if (!ex.is_array() || ex.size() != 4) fail(tp + ".exponents", "expected 4 integers");
    Exponents e{};
    for (int i = 0; i < 4; ++i) {
      e[i] = integer(ex[i], tp + ".exponents[" + std::to_string(i) + "]");
      if (e[i] < 0) fail(tp + ".exponents", "exponents must be non-negative");
      if (i >= variables && e[i] != 0) fail(tp + ".exponents", "only the first " + std::to_string(variables) + " variables may appear");
    }
    if (total_degree(e) > max_degree) fail(tp + ".exponents", "total degree exceeds " + std::to_string(max_degree));
    p.add_term(e, number(require(v[t], "coeff", tp), tp + ".coeff"));
  }
  return p;
}

std::array<RealPoly, 4> parse_poly4(const json& v, const std::string& path, int max_degree, int variables) {
  if (!v.is_array() || v.size() != 4) fail(path, "expected 4 polynomials");
  std::array<RealPoly, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = parse_polynomial(v[i], path + "[" + std::to_string(i) + "]", max_degree, variables);
  return out;
}

json poly4_json(const std::array<RealPoly, 4>& p) {
  json a = json::array();
  for (const auto& c : p) a.push_back(polynomial_to_json(c));
  return a;
}

Diffeomorphism parse_diffeomorphism(const json& v, const std::string& path, json& canon) {
  const auto comps = parse_poly4(require(v, "components", path), path + ".components", kMaxJetOrder, 4);
  canon = json::object();
  canon["components"] = poly4_json(comps);
  std::optional<std::array<RealPoly, 4>> inv;
  if (const json* iv = optional_field(v, "inverse")) {
    inv = parse_poly4(*iv, path + ".inverse", 12, 4);
    canon["inverse"] = poly4_json(*inv);
  }
  return Diffeomorphism(comps, inv);
}

Box parse_domain(const json& v, const std::string& path, json& canon) {
  if (!v.is_array() || v.size() != 4) fail(path, "expected 4 intervals [lo, hi]");
  Box b;
  canon = json::array();
  for (int i = 0; i < 4; ++i) {
    const std::string ip = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) fail(ip, "expected [lo, hi]");
    b[i] = {number(v[i][0], ip + "[0]"), number(v[i][1], ip + "[1]")};
    if (!(b[i].lo < b[i].hi)) fail(ip, "interval is empty");
    canon.push_back({b[i].lo, b[i].hi});
  }
  return b;
}

Box unbounded_box() {
  Box b;
  b.fill(Interval{-1e6, 1e6});
  return b;
}

ChartMetric parse_metric(const json& v, const std::string& path, const Box& domain, json& canon) {
  const std::string kind = string_field(require(v, "kind", path), path + ".kind");
  canon = json::object();
  canon["kind"] = kind;
  if (kind == "flat") return ChartMetric::flat(domain);
  if (kind == "product_sphere") {
    const double r = number(require(v, "radius", path), path + ".radius");
    if (!(r > 0.0)) fail(path + ".radius", "must be positive");
    canon["radius"] = r;
    return ChartMetric::product_sphere(domain, r);
  }
  if (kind == "explicit") {
    const json& e = require(v, "entries", path);
    if (!e.is_array() || e.size() != 4) fail(path + ".entries", "expected a 4x4 array of polynomials");
    std::array<RealPoly, 16> entries;
    json ce = json::array();
    for (int i = 0; i < 4; ++i) {
      const std::string rp = path + ".entries[" + std::to_string(i) + "]";
      if (!e[i].is_array() || e[i].size() != 4) fail(rp, "expected 4 polynomials");
      json row = json::array();
      for (int j = 0; j < 4; ++j) {
        entries[i * 4 + j] = parse_polynomial(e[i][j], rp + "[" + std::to_string(j) + "]", kMaxJetOrder, 4);
        row.push_back(polynomial_to_json(entries[i * 4 + j]));
      }
      ce.push_back(row);
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if (!(entries[i * 4 + j] - entries[j * 4 + i]).is_zero()) fail(path + ".entries", "matrix must be symmetric");
      }
    }
    canon["entries"] = ce;
    return ChartMetric::explicit_entries(domain, entries);
  }
  if (kind == "pullback") {
    json cb, cd;
    const ChartMetric base = parse_metric(require(v, "base", path), path + ".base", unbounded_box(), cb);
    const Diffeomorphism phi = parse_diffeomorphism(require(v, "diffeomorphism", path), path + ".diffeomorphism", cd);
    canon["base"] = cb;
    canon["diffeomorphism"] = cd;
    return ChartMetric::pullback(domain, base, phi);
  }
  fail(path + ".kind", "unknown metric kind '" + kind + "'");
}

MapSpec parse_map(const json& v, const std::string& path, json& canon) {
  const std::string kind = string_field(require(v, "kind", path), path + ".kind");
  canon = json::object();
  canon["kind"] = kind;
  if (kind == "holomorphic_poly") {
    const json& cs = require(v, "coefficients", path);
    if (!cs.is_array() || cs.empty()) fail(path + ".coefficients", "expected a non-empty array");
    std::vector<HoloTerm> terms;
    json cc = json::array();
    for (std::size_t t = 0; t < cs.size(); ++t) {
      const std::string tp = path + ".coefficients[" + std::to_string(t) + "]";
      HoloTerm h;
      h.i = integer(require(cs[t], "i", tp), tp + ".i");
      h.j = integer(require(cs[t], "j", tp), tp + ".j");
      if (h.i < 0 || h.j < 0) fail(tp, "exponents must be non-negative");
      if (h.i + h.j > kMaxJetOrder) fail(tp, "total degree exceeds 6");
      h.c = {number(require(cs[t], "re", tp), tp + ".re"), number(require(cs[t], "im", tp), tp + ".im")};
      terms.push_back(h);
      cc.push_back({{"i", h.i}, {"j", h.j}, {"re", h.c.real()}, {"im", h.c.imag()}});
    }
    canon["coefficients"] = cc;
    return MapSpec::holomorphic_poly(terms);
  }
  if (kind == "real_poly") {
    const json& cs = require(v, "components", path);
    if (!cs.is_array() || cs.size() != 2) fail(path + ".components", "expected 2 polynomials");
    PolyPair p{parse_polynomial(cs[0], path + ".components[0]", kMaxJetOrder, 4),
               parse_polynomial(cs[1], path + ".components[1]", kMaxJetOrder, 4)};
    canon["components"] = json::array({polynomial_to_json(p[0]), polynomial_to_json(p[1])});
    return MapSpec::real_poly(p);
  }
  if (kind == "pullback_composed") {
    json cb, cd;
    const MapSpec base = parse_map(require(v, "base", path), path + ".base", cb);
    const Diffeomorphism phi = parse_diffeomorphism(require(v, "diffeomorphism", path), path + ".diffeomorphism", cd);
    canon["base"] = cb;
    canon["diffeomorphism"] = cd;
    return MapSpec::pullback_composed(base, phi);
  }
  fail(path + ".kind", "unknown map kind '" + kind + "'");
}

TargetMetric parse_target(const json* v, const std::string& path, json& canon) {
  canon = json::object();
  if (!v) {
    canon["kind"] = "flat";
    return TargetMetric::flat();
  }
  const std::string kind = string_field(require(*v, "kind", path), path + ".kind");
  canon["kind"] = kind;
  if (kind == "flat") return TargetMetric::flat();
  if (kind == "explicit") {
    const json& e = require(*v, "entries", path);
    if (!e.is_array() || e.size() != 3) fail(path + ".entries", "expected [h11, h12, h22]");
    std::array<RealPoly, 3> h;
    json ce = json::array();
    for (int i = 0; i < 3; ++i) {
      h[i] = parse_polynomial(e[i], path + ".entries[" + std::to_string(i) + "]", kMaxJetOrder, 2);
      ce.push_back(polynomial_to_json(h[i]));
    }
    canon["entries"] = ce;
    return TargetMetric::explicit_entries(h[0], h[1], h[2]);
  }
  fail(path + ".kind", "unknown target metric kind '" + kind + "'");
}

SurfacePatch parse_patch_shape(const json& v, const std::string& path, const std::string& name, json& canon) {
  const std::string kind = string_field(require(v, "kind", path), path + ".kind");
  canon["kind"] = kind;
  if (kind == "polynomial") {
    const auto comps = parse_poly4(require(v, "components", path), path + ".components", kMaxJetOrder, 2);
    canon["components"] = poly4_json(comps);
    return SurfacePatch::polynomial(name, comps);
  }
  if (kind == "laurent_graph") {
    const json& ts = require(v, "terms", path);
    if (!ts.is_array() || ts.empty()) fail(path + ".terms", "expected a non-empty array");
    std::vector<std::pair<int, std::complex<double>>> terms;
    json ct = json::array();
    for (std::size_t t = 0; t < ts.size(); ++t) {
      const std::string tp = path + ".terms[" + std::to_string(t) + "]";
      const int p = integer(require(ts[t], "power", tp), tp + ".power");
      if (std::abs(p) > kMaxJetOrder) fail(tp + ".power", "power out of range");
      const std::complex<double> c(number(require(ts[t], "re", tp), tp + ".re"), number(require(ts[t], "im", tp), tp + ".im"));
      terms.emplace_back(p, c);
      ct.push_back({{"power", p}, {"re", c.real()}, {"im", c.imag()}});
    }
    canon["terms"] = ct;
    return SurfacePatch::laurent_graph(name, terms);
  }
  if (kind == "pullback") {
    json cb = json::object(), cd;
    const SurfacePatch base = parse_patch_shape(require(v, "base", path), path + ".base", name, cb);
    const Diffeomorphism phi = parse_diffeomorphism(require(v, "diffeomorphism", path), path + ".diffeomorphism", cd);
    if (!phi.has_inverse()) fail(path + ".diffeomorphism.inverse", "required to pull a patch back");
    canon["base"] = cb;
    canon["diffeomorphism"] = cd;
    return base.pulled_back(phi);
  }
  fail(path + ".kind", "unknown patch kind '" + kind + "'");
}

std::vector<double> parse_radii(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of radii");
  std::vector<double> r;
  for (std::size_t i = 0; i < v.size(); ++i) r.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0)) fail(path + "[" + std::to_string(i) + "]", "radius must be positive");
    if (i > 0 && !(r[i] < r[i - 1])) fail(path + "[" + std::to_string(i) + "]", "radii must be strictly decreasing");
  }
  if (r.size() < 2) fail(path, "at least two radii are required");
  return r;
}

std::vector<double> default_scan_radii() {
  std::vector<double> r(9);
  for (int i = 0; i < 9; ++i) r[i] = 0.1 * std::pow(10.0, -0.25 * i);
  return r;
}

AnalysisConfig parse_analysis(const json* v, const ChartMetric& metric, json& canon) {
  AnalysisConfig a;
  const std::string path = "analysis";
  const json empty = json::object();
  const json& o = v ? *v : empty;
  if (!o.is_object()) fail(path, "expected an object");
  if (const json* x = optional_field(o, "tolerance")) {
    a.tolerance = number(*x, path + ".tolerance");
    if (!(*a.tolerance > 0.0)) fail(path + ".tolerance", "must be positive");
  }
  if (const json* x = optional_field(o, "critical_threshold")) {
    a.critical_threshold = number(*x, path + ".critical_threshold");
    if (!(a.critical_threshold > 0.0)) fail(path + ".critical_threshold", "must be positive");
  }
  if (const json* x = optional_field(o, "center")) a.center = vec4(*x, path + ".center");
  if (!metric.contains(a.center)) fail(path + ".center", "point lies outside the domain");
  a.radii = optional_field(o, "radii") ? parse_radii(o["radii"], path + ".radii") : default_radii();
  a.scan_radii = optional_field(o, "scan_radii") ? parse_radii(o["scan_radii"], path + ".scan_radii") : default_scan_radii();
  if (const json* x = optional_field(o, "directions")) {
    a.directions = integer(*x, path + ".directions");
    if (a.directions < 1) fail(path + ".directions", "must be at least 1");
  }
  if (const json* x = optional_field(o, "seed")) {
    if (!x->is_number_unsigned() && !(x->is_number_integer() && x->get<long long>() >= 0)) {
      fail(path + ".seed", "expected a non-negative integer");
    }
    a.seed = x->get<std::uint64_t>();
  }
  if (const json* x = optional_field(o, "fd_step")) {
    a.fd_step = number(*x, path + ".fd_step");
    if (!(a.fd_step > 0.0 && a.fd_step < 0.1)) fail(path + ".fd_step", "must lie in (0, 0.1)");
  }
  if (const json* x = optional_field(o, "samples")) {
    a.samples = integer(*x, path + ".samples");
    if (a.samples < 1) fail(path + ".samples", "must be at least 1");
  }
  if (const json* x = optional_field(o, "orientation")) a.orientation = sign_field(*x, path + ".orientation");
  if (const json* x = optional_field(o, "angle")) a.angle = number(*x, path + ".angle");
  if (const json* x = optional_field(o, "points")) {
    if (!x->is_array()) fail(path + ".points", "expected an array of points");
    for (std::size_t i = 0; i < x->size(); ++i) {
      const std::string pp = path + ".points[" + std::to_string(i) + "]";
      a.points.push_back(vec4((*x)[i], pp));
      if (!metric.contains(a.points.back())) fail(pp, "point lies outside the domain");
    }
  }

  canon = json::object();
  if (a.tolerance) canon["tolerance"] = *a.tolerance;
  canon["critical_threshold"] = a.critical_threshold;
  canon["center"] = vec_json(a.center);
  canon["radii"] = a.radii;
  canon["scan_radii"] = a.scan_radii;
  canon["directions"] = a.directions;
  canon["seed"] = a.seed;
  canon["fd_step"] = a.fd_step;
  canon["samples"] = a.samples;
  canon["orientation"] = a.orientation;
  canon["angle"] = a.angle;
  json pts = json::array();
  for (const auto& p : a.points) pts.push_back(vec_json(p));
  canon["points"] = pts;
  return a;
}

}  // namespace

json polynomial_to_json(const RealPoly& p) {
  json a = json::array();
  for (const auto& [e, c] : p.terms()) a.push_back({{"exponents", {e[0], e[1], e[2], e[3]}}, {"coeff", c}});
  return a;
}

const PatchConfig& ScenarioConfig::patch(const std::string& name) const {
  for (const auto& p : patches) {
    if (p.name == name) return p;
  }
  throw ConfigError("patches: no patch named '" + name + "'");
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  ScenarioConfig cfg;
  json& c = cfg.canonical;
  c = json::object();

  const std::string name = optional_field(j, "name") ? string_field(j["name"], "name") : std::string("scenario");
  c["name"] = name;
  json cdom, cmet, cmap, ctar, cana;
  const Box domain = parse_domain(require(j, "domain", "<root>"), "domain", cdom);
  ChartMetric metric = parse_metric(require(j, "metric", "<root>"), "metric", domain, cmet);

  std::string derivatives = "exact";
  if (const json* d = optional_field(j, "derivatives")) derivatives = string_field(*d, "derivatives");
  if (derivatives != "exact" && derivatives != "finite_difference") {
    fail("derivatives", "expected 'exact' or 'finite_difference'");
  }
  const MapSpec map = parse_map(require(j, "map", "<root>"), "map", cmap);
  const TargetMetric target = parse_target(optional_field(j, "target_metric"), "target_metric", ctar);
  const int orientation = optional_field(j, "orientation") ? sign_field(j["orientation"], "orientation") : 1;
  const int target_orientation =
      optional_field(j, "target_orientation") ? sign_field(j["target_orientation"], "target_orientation") : 1;
  cfg.analysis = parse_analysis(optional_field(j, "analysis"), metric, cana);
  if (derivatives == "finite_difference") {
    metric = metric.with_derivative_mode(DerivativeMode::finite_difference, cfg.analysis.fd_step);
  }
  cfg.scenario = MorphismScenario(name, metric, map, target, orientation, target_orientation);

  json cpatches = json::array();
  if (const json* ps = optional_field(j, "patches")) {
    if (!ps->is_array()) fail("patches", "expected an array");
    for (std::size_t i = 0; i < ps->size(); ++i) {
      const std::string pp = "patches[" + std::to_string(i) + "]";
      const json& pj = (*ps)[i];
      PatchConfig pc;
      json cp = json::object();
      pc.name = string_field(require(pj, "name", pp), pp + ".name");
      cp["name"] = pc.name;
      pc.patch = parse_patch_shape(pj, pp, pc.name, cp);
      if (const json* t = optional_field(pj, "tag")) pc.tag = sign_field(*t, pp + ".tag");
      cp["tag"] = pc.tag;
      const json& params = require(pj, "parameters", pp);
      if (!params.is_array() || params.empty()) fail(pp + ".parameters", "expected a non-empty array of [u, v]");
      json cparams = json::array();
      for (std::size_t k = 0; k < params.size(); ++k) {
        const std::string kp = pp + ".parameters[" + std::to_string(k) + "]";
        if (!params[k].is_array() || params[k].size() != 2) fail(kp, "expected [u, v]");
        pc.parameters.emplace_back(number(params[k][0], kp + "[0]"), number(params[k][1], kp + "[1]"));
        cparams.push_back({pc.parameters.back()[0], pc.parameters.back()[1]});
      }
      cp["parameters"] = cparams;
      if (const json* x = optional_field(pj, "minimal")) {
        if (!x->is_boolean()) fail(pp + ".minimal", "expected a boolean");
        pc.minimal = x->get<bool>();
        cp["minimal"] = *pc.minimal;
      }
      if (const json* x = optional_field(pj, "omega_T_abs")) cp["omega_T_abs"] = *(pc.omega_T_abs = number(*x, pp + ".omega_T_abs"));
      if (const json* x = optional_field(pj, "omega_N")) cp["omega_N"] = *(pc.omega_N = number(*x, pp + ".omega_N"));
      for (const auto& other : cfg.patches) {
        if (other.name == pc.name) fail(pp + ".name", "duplicate patch name '" + pc.name + "'");
      }
      cfg.patches.push_back(std::move(pc));
      cpatches.push_back(cp);
    }
  }

  c["domain"] = cdom;
  c["metric"] = cmet;
  c["derivatives"] = derivatives;
  c["map"] = cmap;
  c["target_metric"] = ctar;
  c["orientation"] = orientation;
  c["target_orientation"] = target_orientation;
  c["analysis"] = cana;
  c["patches"] = cpatches;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(const json& j) { return fnv1a_hex(j.dump()); }

}  // namespace morpho
