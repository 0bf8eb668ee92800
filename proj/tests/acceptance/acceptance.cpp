// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "morphoscope/catalog.hpp"
#include "morphoscope/cli.hpp"
#include "morphoscope/random.hpp"
#include "morphoscope/symbol.hpp"
#include "morphoscope/twistor.hpp"
#include "morphoscope/weingarten.hpp"
#include "support.hpp"

using namespace morpho;
using morpho::testing::catalog;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "!") + what);
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

RunResult quiet(RunOptions o) {
  o.write_files = false;
  std::ostringstream out, err;
  return run(o, out, err);
}

RunOptions opts(const std::string& cmd, const std::string& name, int workers = 1) {
  RunOptions o;
  o.command = cmd;
  o.config = "catalog:" + name;
  o.workers = workers;
  return o;
}

const json& evidence(const json& report, const std::string& check) {
  for (const auto& v : report["verdicts"]) {
    if (v["check"] == check) return v["evidence"];
  }
  throw std::runtime_error("missing verdict " + check);
}

Outcome criterion1() {
  Outcome o;
  for (const char* name : {"z1z2", "z1sq", "z1z2_cubic", "proj"}) {
    const RunResult r = quiet(opts("validate", name));
    const double hwc = evidence(r.report, "hwc_defect")["max_hwc_defect"];
    const double tau = evidence(r.report, "tension")["max_tension_norm"];
    const int n = evidence(r.report, "hwc_defect")["regular_points"];
    o.check(r.exit_code == 0 && n == 100 && hwc <= 1e-8 && tau <= 1e-8,
            std::string(name) + " hwc=" + fmt(hwc) + " tension=" + fmt(tau) + " n=" + std::to_string(n));
  }
  const RunResult c = quiet(opts("validate", "control_scaled"));
  const double defect = evidence(c.report, "hwc_defect")["max_hwc_defect"];
  // G = diag(1, 4): |G - (5/2) I|_F = 3 / sqrt(2).
  o.check(c.exit_code == 1 && std::abs(defect - 3.0 / std::sqrt(2.0)) <= 1e-6, "control defect=" + fmt(defect));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const SymbolData a = symbol_polynomial(catalog("z1z2").scenario, Vec4::Zero());
  o.check(a.order == 2 && a.candidates.size() == 1, "z1z2 k=" + std::to_string(a.order) +
                                                        " candidates=" + std::to_string(a.candidates.size()));
  const SymbolData b = symbol_polynomial(catalog("z1sq").scenario, Vec4::Zero());
  const bool opposite = b.candidates.size() == 2 && b.candidates[0].orientation * b.candidates[1].orientation == -1;
  o.check(b.order == 2 && opposite, "z1sq k=" + std::to_string(b.order) +
                                        " candidates=" + std::to_string(b.candidates.size()));
  const SymbolData c = symbol_polynomial(catalog("z1z2_cubic").scenario, Vec4::Zero());
  // Re(w1 w2) = x1 x3 - x2 x4, Im(w1 w2) = x1 x4 + x2 x3.
  RealPoly re = RealPoly::monomial({1, 0, 1, 0}, 1.0), im = RealPoly::monomial({1, 0, 0, 1}, 1.0);
  re.add_term({0, 1, 0, 1}, -1.0);
  im.add_term({0, 1, 1, 0}, 1.0);
  o.check(c.order == 2 && (c.P0[0] - re).is_zero() && (c.P0[1] - im).is_zero(), "z1z2_cubic P0 = w1 w2");
  std::vector<double> radii;
  for (int i = 0; i < 8; ++i) radii.push_back(0.1 * std::pow(2.0, -i));
  const RemainderRates rr = remainder_rates(catalog("z1z2_cubic").scenario, Vec4::Zero(), radii, seeded_directions(16, 1));
  o.check(rr.value.slope >= 2.9 && rr.differential.slope >= 1.9,
          "remainder slopes " + fmt(rr.value.slope) + ", " + fmt(rr.differential.slope));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto dirs = seeded_directions(16, 1);
  const MainLemmaReport p = main_lemma_rate(catalog("pullback_z1z2").scenario, Vec4::Zero(), dirs, default_radii());
  o.check(!p.deviation.zero_branch && p.deviation.slope >= 0.9 && std::isfinite(p.deviation.constant),
          "pullback slope=" + fmt(p.deviation.slope) + " C=" + fmt(p.deviation.constant));
  o.check(p.metric_defect.slope >= 1.9 && p.skew_defect.slope >= 1.9,
          "defect slopes " + fmt(p.metric_defect.slope) + ", " + fmt(p.skew_defect.slope));
  const MainLemmaReport f = main_lemma_rate(catalog("z1z2").scenario, Vec4::Zero(), dirs, default_radii());
  double worst = 0.0;
  for (double v : f.deviation.values) worst = std::max(worst, v);
  o.check(f.deviation.zero_branch && worst < 1e-12, "z1z2 zero branch max=" + fmt(worst));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const MorphismScenario z = catalog("z1z2").scenario;
  Rng rng(4);
  std::vector<Vec4> sphere;
  for (int i = 0; i < 500; ++i) sphere.push_back(rng.unit_vec4());
  double lo = 1e300, hi = 0.0;
  for (double r : {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3}) {
    double m = 1e300;
    for (const Vec4& d : sphere) m = std::min(m, dilation_sup(z, r * d) / r);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  o.check(lo >= 0.999 && hi <= 1.001, "z1z2 min lambda/r in [" + fmt(lo) + ", " + fmt(hi) + "]");
  const MorphismScenario q = catalog("z1sq").scenario;
  lo = 1e300;
  hi = 0.0;
  for (double r : {1e-1, 1e-2, 1e-3}) {
    for (int k = 0; k < 8; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 8;
      const double v = dilation_sup(q, r * Vec4(std::cos(t), std::sin(t), 0, 0)) / (2 * r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  o.check(lo >= 0.999 && hi <= 1.001, "z1sq lambda/(2r) on z2=0 in [" + fmt(lo) + ", " + fmt(hi) + "]");
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Coefficients k{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto [plus, minus] = closed_form_norms(k);
    const double p = plus * minus;
    const double scale = std::max(1.0, std::abs(p));
    worst = std::max({worst, std::abs(product_identity(k) - p) / scale, std::abs(product_polar(to_polar(k)) - p) / scale});
  }
  o.check(worst <= 1e-12, "product identity gap=" + fmt(worst));

  for (const char* name : {"z1z2", "pullback_z1z2"}) {
    const MorphismScenario s = catalog(name).scenario;
    Rng pts(55);
    int count = 0, agree = 0;
    double comm = 0.0;
    while (count < 20) {
      const Vec4 x = pts.point_in(s.metric().domain(), 0.5);
      if (!classify_point(s, x).regular) continue;
      const NablaJNorms n = nabla_J_norms(s, x);
      agree += norms_agree(n.plus_closed, n.plus_direct) && norms_agree(n.minus_closed, n.minus_direct);
      comm = std::max(comm, commutator_defect(s, x).norm());
      ++count;
    }
    o.check(agree == 20, std::string(name) + " closed=direct at " + std::to_string(agree) + "/20");
    o.check(comm <= 1e-4, std::string(name) + " commutator=" + fmt(comm));
  }

  std::vector<double> radii;
  for (int i = 0; i <= 8; ++i) radii.push_back(0.1 * std::pow(10.0, -0.25 * i));
  const ProductScan scan = product_bound_scan(catalog("pullback_z1z2").scenario, Vec4::Zero(), radii,
                                              seeded_directions(16, 1));
  double top = 0.0;
  for (const auto& a : scan.annuli) top = std::max(top, a.max_product);
  o.check(scan.bounded, "product scan plateau=" + fmt(scan.plateau) + " max=" + fmt(top));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const ScenarioConfig flat = catalog("z1z2");
  for (const char* name : {"plane", "inverse_fiber"}) {
    const PatchConfig& pc = flat.patch(name);
    double worst = 0.0;
    for (const Vec2& uv : pc.parameters) worst = std::max(worst, lift_sample(flat.scenario, pc.patch, uv, 1).residual);
    o.check(worst <= 1e-5, std::string(name) + " residual=" + fmt(worst));
  }
  const PatchConfig& ctrl = flat.patch("graph_control");
  double least = 1e300;
  for (const Vec2& uv : ctrl.parameters) least = std::min(least, lift_sample(flat.scenario, ctrl.patch, uv, 1).residual);
  o.check(least >= 1e-2, "graph_control residual=" + fmt(least));

  const ScenarioConfig ps = catalog("product_sphere");
  double dev = 0.0;
  for (const Vec2& uv : ps.patch("sphere_factor").parameters) {
    const auto [T, N] = curvature_densities(ps.scenario, ps.patch("sphere_factor").patch, uv);
    dev = std::max({dev, std::abs(std::abs(T) - 1.0)});
  }
  o.check(dev <= 1e-4, "sphere |Omega^T| - 1 = " + fmt(dev));
  double flat_dev = 0.0;
  for (const Vec2& uv : ps.patch("flat_factor").parameters) {
    const auto [T, N] = curvature_densities(ps.scenario, ps.patch("flat_factor").patch, uv);
    flat_dev = std::max({flat_dev, std::abs(T), std::abs(N)});
  }
  o.check(flat_dev <= 1e-4, "flat factor densities max=" + fmt(flat_dev));
  return o;
}

// Sum over an orthonormal frame of |nabla_{E_i} J|^2, independent of the frame gauge.
std::pair<double, double> full_nabla_norms(const MorphismScenario& s, const Vec4& x) {
  const HermitianPair hp = hermitian_pair(s, x);
  SplitOptions pinned;
  pinned.vertical_seeds = hp.split.vertical_seeds;
  const TensorField Jp = [&](const Vec4& y) { return hermitian_pair(s, y, pinned).J_plus; };
  const TensorField Jm = [&](const Vec4& y) { return hermitian_pair(s, y, pinned).J_minus; };
  const Mat4 g = s.metric().eval(x);
  const Mat4 E = hp.split.frame();
  double plus = 0.0, minus = 0.0;
  for (int i = 0; i < 4; ++i) {
    plus += tensor_norm2(g, covariant_derivative(s.metric(), Jp, x, E.col(i)));
    minus += tensor_norm2(g, covariant_derivative(s.metric(), Jm, x, E.col(i)));
  }
  return {plus, minus};
}

Outcome criterion7() {
  Outcome o;
  const ScenarioConfig base = catalog("z1z2");
  const ScenarioConfig pulled = catalog("pullback_z1z2");
  const MorphismScenario& b = base.scenario;
  const MorphismScenario& p = pulled.scenario;
  auto gap = [](double u, double v) { return std::abs(u - v) / std::max(1.0, std::max(std::abs(u), std::abs(v))); };
  double lam = 0.0, hwc = 0.0, tau = 0.0, nab = 0.0, lift = 0.0, omega = 0.0;
  Rng rng(7);
  const std::array<const char*, 3> patches{"plane", "inverse_fiber", "graph_control"};
  int n = 0;
  while (n < 50) {
    Box inner;
    inner.fill({-1.0, 1.0});
    const Vec4 x = rng.point_in(inner);
    const Vec4 y = morpho::testing::bump(x);
    if (!classify_point(p, x).regular) continue;
    lam = std::max(lam, gap(dilation_sup(p, x), dilation_sup(b, y)));
    hwc = std::max(hwc, gap(hwc_residual(p, x).defect, hwc_residual(b, y).defect));
    tau = std::max(tau, gap(tension_norm(p, x), tension_norm(b, y)));
    const auto [pp, pm] = full_nabla_norms(p, x);
    const auto [bp, bm] = full_nabla_norms(b, y);
    nab = std::max({nab, gap(pp, bp), gap(pm, bm)});

    const char* name = patches[n % 3];
    Vec2 uv(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
    if (std::string(name) == "inverse_fiber") uv = rng.uniform(0.7, 1.3) * Vec2(std::cos(rng.uniform(0, 6.28)), std::sin(rng.uniform(0, 6.28))).normalized();
    const LiftSample lp = lift_sample(p, pulled.patch(name).patch, uv, 1);
    const LiftSample lb = lift_sample(b, base.patch(name).patch, uv, 1);
    lift = std::max(lift, gap(lp.residual, lb.residual));
    omega = std::max({omega, gap(lp.omega_T, lb.omega_T), gap(lp.omega_N, lb.omega_N)});
    ++n;
  }
  o.check(lam <= 1e-4, "lambda " + fmt(lam));
  o.check(hwc <= 1e-4, "hwc " + fmt(hwc));
  o.check(tau <= 1e-4, "tension " + fmt(tau));
  o.check(nab <= 1e-4, "|nabla J+-| " + fmt(nab));
  o.check(lift <= 1e-4, "lift residual " + fmt(lift));
  o.check(omega <= 1e-4, "Omega " + fmt(omega));
  return o;
}

std::vector<RunOptions> full_suite(int workers) {
  std::vector<RunOptions> suite;
  for (const auto& e : catalog_entries()) suite.push_back(opts("validate", e.name, workers));
  for (const char* n : {"z1z2", "z1sq", "z1z2_cubic", "pullback_z1z2"}) {
    suite.push_back(opts("symbol", n, workers));
    suite.push_back(opts("rate", n, workers));
  }
  for (const char* n : {"z1z2", "pullback_z1z2", "product_sphere"}) {
    suite.push_back(opts("weingarten", n, workers));
    suite.push_back(opts("twistor", n, workers));
  }
  RunOptions scan = opts("weingarten", "pullback_z1z2", workers);
  scan.scan = true;
  suite.push_back(scan);
  RunOptions analyze = opts("analyze", "z1z2", workers);
  analyze.point = Vec4(1, 0, 0, 0);
  suite.push_back(analyze);
  for (auto& s : suite) s.seed = 1;
  return suite;
}

Outcome criterion8() {
  Outcome o;
  const auto one = full_suite(1), eight = full_suite(8);
  int same = 0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    const RunResult a = quiet(one[i]), b = quiet(eight[i]);
    const bool ok = a.exit_code != 2 && a.report["fingerprint"] == b.report["fingerprint"] && a.csv == b.csv;
    same += ok;
    if (!ok) o.check(false, one[i].command + " " + one[i].config + " differs");
  }
  o.check(same == static_cast<int>(one.size()), std::to_string(same) + "/" + std::to_string(one.size()) + " reports identical");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"harmonic-morphism validation", criterion1},
      {"symbol extraction", criterion2},
      {"structure convergence rate", criterion3},
      {"dilation lower bound", criterion4},
      {"Weingarten identities", criterion5},
      {"twistor lifts and curvature densities", criterion6},
      {"pullback invariance", criterion7},
      {"determinism", criterion8},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string notes;
    for (const auto& n : o.notes) notes += (notes.empty() ? "" : "; ") + n;
    std::printf("%s criterion %zu: %s (%.1fs) [%s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                notes.c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
