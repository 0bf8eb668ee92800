#include "morphoscope/catalog.hpp"

#include <fstream>
#include <numbers>

namespace morpho {

namespace {

json term(int e1, int e2, int e3, int e4, double c) { return {{"exponents", {e1, e2, e3, e4}}, {"coeff", c}}; }

json holo(int i, int j, double re, double im = 0.0) { return {{"i", i}, {"j", j}, {"re", re}, {"im", im}}; }

json box(double lo, double hi) { return json::array({{lo, hi}, {lo, hi}, {lo, hi}, {lo, hi}}); }

json flat_metric() { return {{"kind", "flat"}}; }

// Phi(x) = x + 0.1 (x2^2, 0, 0, x1 x3) and its polynomial inverse.
json bump_diffeomorphism() {
  json comps = json::array({
      json::array({term(1, 0, 0, 0, 1.0), term(0, 2, 0, 0, 0.1)}),
      json::array({term(0, 1, 0, 0, 1.0)}),
      json::array({term(0, 0, 1, 0, 1.0)}),
      json::array({term(0, 0, 0, 1, 1.0), term(1, 0, 1, 0, 0.1)}),
  });
  json inv = json::array({
      json::array({term(1, 0, 0, 0, 1.0), term(0, 2, 0, 0, -0.1)}),
      json::array({term(0, 1, 0, 0, 1.0)}),
      json::array({term(0, 0, 1, 0, 1.0)}),
      json::array({term(0, 0, 0, 1, 1.0), term(1, 0, 1, 0, -0.1), term(0, 2, 1, 0, 0.01)}),
  });
  return {{"components", comps}, {"inverse", inv}};
}

json uv_patch(const std::string& name, json components, json parameters, bool minimal) {
  return {{"name", name},
          {"kind", "polynomial"},
          {"components", std::move(components)},
          {"tag", 1},
          {"parameters", std::move(parameters)},
          {"minimal", minimal},
          {"omega_T_abs", 0.0},
          {"omega_N", 0.0}};
}

json flat_patches() {
  json plane = uv_patch("plane",
                        json::array({json::array({term(1, 0, 0, 0, 1.0)}), json::array({term(0, 1, 0, 0, 1.0)}),
                                     json::array(), json::array()}),
                        json::array({{0.1, 0.2}, {0.5, -0.3}, {-0.4, 0.7}, {1.0, 1.0}}), true);
  json inverse_fiber = {{"name", "inverse_fiber"},
                        {"kind", "laurent_graph"},
                        {"terms", json::array({{{"power", -1}, {"re", 1.0}, {"im", 0.0}}})},
                        {"tag", 1},
                        {"parameters", json::array({{1.0, 0.0}, {0.8, 0.3}, {1.1, -0.4}, {0.6, 0.6}, {-0.9, 0.2}})},
                        {"minimal", true},
                        {"omega_T_abs", 0.0},
                        {"omega_N", 0.0}};
  json graph = uv_patch("graph_control",
                        json::array({json::array({term(1, 0, 0, 0, 1.0)}), json::array({term(0, 1, 0, 0, 1.0)}),
                                     json::array({term(2, 0, 0, 0, 0.5), term(0, 2, 0, 0, 0.5)}), json::array()}),
                        json::array({{0.1, 0.2}, {0.3, -0.1}, {-0.2, 0.4}, {0.0, 0.0}}), false);
  graph.erase("omega_T_abs");
  graph.erase("omega_N");
  return json::array({plane, inverse_fiber, graph});
}

json pulled_back_patches() {
  json out = json::array();
  for (json p : flat_patches()) {
    json base = {{"kind", p["kind"]}};
    for (const char* key : {"components", "terms"}) {
      if (p.contains(key)) {
        base[key] = p[key];
        p.erase(key);
      }
    }
    p["kind"] = "pullback";
    p["base"] = base;
    p["diffeomorphism"] = bump_diffeomorphism();
    out.push_back(p);
  }
  return out;
}

json analysis(std::optional<double> tolerance, json center = json::array({0.0, 0.0, 0.0, 0.0})) {
  json a = {{"center", std::move(center)}, {"seed", 1}, {"samples", 100}, {"directions", 16}};
  if (tolerance) a["tolerance"] = *tolerance;
  return a;
}

json holomorphic_scenario(const std::string& name, json coefficients) {
  return {{"name", name},
          {"domain", box(-2.0, 2.0)},
          {"metric", flat_metric()},
          {"map", {{"kind", "holomorphic_poly"}, {"coefficients", std::move(coefficients)}}},
          {"orientation", 1},
          {"analysis", analysis(1e-8)}};
}

json real_scenario(const std::string& name, json c1, json c2, std::optional<double> tolerance) {
  return {{"name", name},
          {"domain", box(-2.0, 2.0)},
          {"metric", flat_metric()},
          {"map", {{"kind", "real_poly"}, {"components", json::array({std::move(c1), std::move(c2)})}}},
          {"analysis", analysis(tolerance)}};
}

json build(const std::string& name) {
  if (name == "proj") return holomorphic_scenario(name, json::array({holo(1, 0, 1.0)}));
  if (name == "z1z2") {
    json j = holomorphic_scenario(name, json::array({holo(1, 1, 1.0)}));
    j["patches"] = flat_patches();
    return j;
  }
  if (name == "z1sq") return holomorphic_scenario(name, json::array({holo(2, 0, 1.0)}));
  if (name == "z1z2_cubic") return holomorphic_scenario(name, json::array({holo(1, 1, 1.0), holo(3, 0, 1.0)}));
  if (name == "pullback_z1z2") {
    return {{"name", name},
            {"domain", box(-2.0, 2.0)},
            {"metric", {{"kind", "pullback"}, {"base", flat_metric()}, {"diffeomorphism", bump_diffeomorphism()}}},
            {"map",
             {{"kind", "pullback_composed"},
              {"base", {{"kind", "holomorphic_poly"}, {"coefficients", json::array({holo(1, 1, 1.0)})}}},
              {"diffeomorphism", bump_diffeomorphism()}}},
            {"analysis", analysis(std::nullopt)},
            {"patches", pulled_back_patches()}};
  }
  if (name == "product_sphere") {
    const double half_pi = std::numbers::pi / 2.0;
    json sphere = uv_patch("sphere_factor",
                           json::array({json::array({term(1, 0, 0, 0, 1.0)}), json::array({term(0, 1, 0, 0, 1.0)}),
                                        json::array(), json::array()}),
                           json::array({{1.2, 0.3}, {half_pi, 0.0}, {1.9, -0.5}, {0.9, 0.8}}), true);
    sphere["omega_T_abs"] = 1.0;
    json flat = uv_patch("flat_factor",
                         json::array({json::array({term(0, 0, 0, 0, half_pi)}), json::array(),
                                      json::array({term(1, 0, 0, 0, 1.0)}), json::array({term(0, 1, 0, 0, 1.0)})}),
                         json::array({{0.1, 0.2}, {-0.5, 0.4}, {1.0, -1.0}}), true);
    return {{"name", name},
            {"domain", json::array({{0.5, 2.6}, {-1.5, 1.5}, {-2.0, 2.0}, {-2.0, 2.0}})},
            {"metric", {{"kind", "product_sphere"}, {"radius", 1.0}}},
            {"map",
             {{"kind", "real_poly"},
              {"components", json::array({json::array({term(0, 0, 1, 0, 1.0)}), json::array({term(0, 0, 0, 1, 1.0)})})}}},
            {"analysis", analysis(std::nullopt, json::array({half_pi, 0.0, 0.0, 0.0}))},
            {"patches", json::array({sphere, flat})}};
  }
  if (name == "control_scaled") {
    return real_scenario(name, json::array({term(1, 0, 0, 0, 1.0)}), json::array({term(0, 1, 0, 0, 2.0)}), 1e-8);
  }
  if (name == "control_quadratic") {
    return real_scenario(name, json::array({term(1, 0, 0, 0, 1.0)}),
                         json::array({term(0, 1, 0, 0, 1.0), term(0, 0, 2, 0, 1.0)}), 1e-8);
  }
  throw ConfigError("catalog: unknown scenario '" + name + "'");
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries{
      {"proj", "F = w1 on flat R^4"},
      {"z1z2", "F = w1 w2 on flat R^4, isolated critical point at 0; carries the flat surface patches"},
      {"z1sq", "F = w1^2 on flat R^4, critical along w1 = 0"},
      {"z1z2_cubic", "F = w1 w2 + w1^3 on flat R^4"},
      {"pullback_z1z2", "w1 w2 o Phi on (R^4, Phi^* flat), Phi(x) = x + 0.1 (x2^2, 0, 0, x1 x3)"},
      {"product_sphere", "projection to R^2 on S^2(1) x R^2 in chart (theta, phi, x3, x4)"},
      {"control_scaled", "negative control (x1, 2 x2), not horizontally conformal"},
      {"control_quadratic", "negative control (x1, x2 + x3^2)"},
  };
  return entries;
}

bool in_catalog(const std::string& name) {
  for (const auto& e : catalog_entries()) {
    if (e.name == name) return true;
  }
  return false;
}

json catalog_config(const std::string& name) { return build(name); }

json resolve_config(const std::string& spec) {
  constexpr std::string_view prefix = "catalog:";
  if (spec.starts_with(prefix)) return catalog_config(spec.substr(prefix.size()));
  std::ifstream in(spec);
  if (!in) throw ConfigError("config: cannot open '" + spec + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + spec + "' is not valid JSON: " + e.what());
  }
}

}  // namespace morpho
