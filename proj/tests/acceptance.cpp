// Acceptance checks 1-9: one PASS/FAIL line each, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nhssh/charpoly.hpp"
#include "nhssh/matching.hpp"
#include "nhssh/presets.hpp"
#include "nhssh/spectra.hpp"
#include "nhssh/topology.hpp"

using namespace nhssh;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::string first_failure;
  void fail(const std::string& why) {
    if (ok) first_failure = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

int failures = 0;

void report(int id, const char* title, const Check& c, const std::string& detail) {
  std::printf("[%s] %d. %s: %s%s%s\n", c.ok ? "PASS" : "FAIL", id, title, detail.c_str(),
              c.ok ? "" : " | first failure: ", c.ok ? "" : c.first_failure.c_str());
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Spectrum obc_spectrum(const HoppingSet& h, const ChainSpec& c, bool vectors) {
  return eigendecompose(build_obc(h, c), vectors);
}

double max_rel_imag(const std::vector<cplx>& E) {
  double im = 0.0, mag = 0.0;
  for (cplx e : E) {
    im = std::max(im, std::abs(e.imag()));
    mag = std::max(mag, std::abs(e));
  }
  return mag > 0.0 ? im / mag : 0.0;
}

int expected_edges(const TopologyReport& t) {
  return t.parity == Parity::Odd ? std::abs(t.nu_bar) + std::abs(1 - t.nu_bar) : 2 * std::abs(t.nu_bar);
}

// random amplitudes: magnitude in [0.1, 3], a shared sign per bond
HoppingSet random_set(std::mt19937& rng, ModelKind kind, bool signs = true) {
  std::uniform_real_distribution<double> mag(0.1, 3.0);
  std::bernoulli_distribution neg(signs ? 0.25 : 0.0);
  std::vector<double> v;
  const int bonds = kind == ModelKind::SSH ? 2 : 3;
  for (int b = 0; b < bonds; ++b) {
    const double s = neg(rng) ? -1.0 : 1.0;
    v.push_back(s * mag(rng));
    v.push_back(s * mag(rng));
  }
  return HoppingSet::from_flat(kind, v);
}

// ---------------------------------------------------------------------------

void criterion1() {
  Check c;
  double worst = 0.0, slowest = 0.0;
  for (const char* id : {"fig1", "fig2", "fig3", "fig7", "fig8"}) {
    const auto& p = find_preset(id);
    const auto t0 = Clock::now();
    const auto s = obc_spectrum(p.model, p.chain, false);
    const double dt = seconds_since(t0);
    const double rel = max_rel_imag(s.eigenvalues);
    worst = std::max(worst, rel);
    slowest = std::max(slowest, dt);
    c.expect(rel <= 1e-7, std::string(id) + fmt(" max|Im E|/max|E| = %.3e", rel));
    c.expect(dt < 5.0, std::string(id) + fmt(" took %.2f s", dt));
  }
  report(1, "QH reality (fig1,2,3,7,8)", c, fmt("worst max|Im E|/max|E| = %.3e, slowest %.3f s", worst, slowest));
}

void criterion2() {
  Check c;
  struct Case {
    std::string name;
    HoppingSet h;
    Parity parity;
    std::function<CharSpectrum(int)> solve;
    double tol;
  };
  auto eff = [](const char* id) { return effective_params(find_preset(id).model); };
  const auto fig7 = find_preset("fig7").model;
  std::vector<Case> cases;
  cases.push_back({"ssh/fig1", find_preset("fig1").model, Parity::Even,
                   [&](int n) { return ssh_char_spectrum(eff("fig1"), n); }, 1e-6});
  for (const char* id : {"fig2", "fig3"})
    cases.push_back({std::string("qh1/") + id, find_preset(id).model, Parity::Even,
                     [&, id](int n) { return qh_type1_char_spectrum(eff(id), n); }, 1e-6});
  cases.push_back({"qh2/fig7", fig7, Parity::Even, [&](int n) { return qh_type2_char_spectrum(eff("fig7"), n); }, 1e-6});
  cases.push_back({"odd/fig8", find_preset("fig8").model, Parity::Odd,
                   [&](int n) { return qh_odd_char_spectrum(eff("fig8"), n); }, 1e-6});
  cases.push_back({"odd/ext2", fig7, Parity::Odd, [&](int n) { return qh_odd_char_spectrum(eff("fig7"), n); }, 1e-6});
  for (const char* id : {"fig4", "fig5", "fig6"}) {
    const auto h = find_preset(id).model;
    cases.push_back({std::string("gen1/") + id, h, Parity::Even, [h](int n) { return general_type1_char_spectrum(h, n); }, 1e-5});
  }
  for (const char* id : {"fig9", "fig10", "appC1", "appC2", "appC3", "appC4"}) {
    const auto h = find_preset(id).model;
    cases.push_back({std::string("gen2/") + id, h, Parity::Even, [h](int n) { return general_type2_char_spectrum(h, n); }, 1e-5});
  }

  const auto t0 = Clock::now();
  double worst_qh = 0.0, worst_gen = 0.0;
  int runs = 0;
  for (const auto& k : cases)
    for (int n : {2, 3, 5, 10, 20}) {
      try {
        const auto cs = k.solve(n);
        const auto d = obc_spectrum(k.h, {n, k.parity, Boundary::OBC}, false);
        const double rel = match_spectra(cs.energies, d.eigenvalues).max_rel();
        double& worst = k.tol < 1e-5 ? worst_qh : worst_gen;
        worst = std::max(worst, rel);
        c.expect(rel <= k.tol, k.name + " N=" + std::to_string(n) + fmt(" rel = %.3e", rel));
      } catch (const std::exception& e) {
        c.fail(k.name + " N=" + std::to_string(n) + ": " + e.what());
      }
      ++runs;
    }
  const double dt = seconds_since(t0);
  c.expect(dt < 60.0, fmt("total %.1f s", dt));
  report(2, "char-equation vs diagonalization (6 solvers, N in {2,3,5,10,20})", c,
         std::to_string(runs) + " runs" + fmt(", worst QH/SSH rel %.2e", worst_qh) +
             fmt(", worst general rel %.2e", worst_gen) + fmt(", %.2f s", dt));
}

void criterion3() {
  Check c;
  struct Row {
    const char* id;
    int nu, l, r;
  };
  const Row rows[] = {{"fig1", 1, 0, -1},   {"fig2", 2, 2, -1},  {"fig3", 1, 0, -1},  {"fig5", 1, 1, -2},
                      {"fig6", 2, 2, -2},   {"fig7", -1, 0, 1},  {"fig9", 1, 1, -1},  {"fig10", -1, -1, 1},
                      {"appC1", 1, 1, 0},   {"appC2", 1, 0, -1}, {"appC3", 1, 1, -1}, {"appC4", 1, 1, -1}};
  int n = 0;
  for (const auto& x : rows) {
    try {
      const auto& p = find_preset(x.id);
      const auto t = topology_report(p.model, p.chain.parity);
      char got[96];
      std::snprintf(got, sizeof got, "%s got (%d, %d, %d)", x.id, t.nu_bar, t.nu_E_L, t.nu_E_R);
      c.expect(t.nu_bar == x.nu && t.nu_E_L == x.l && t.nu_E_R == x.r, got);
      ++n;
    } catch (const std::exception& e) {
      c.fail(std::string(x.id) + ": " + e.what());
    }
  }
  try {
    const auto t = topology_report(find_preset("fig4").model);
    c.expect(t.nu_bar == 0 && t.nu_E == 0, "fig4 not (0, nu_E = 0)");
    ++n;
  } catch (const std::exception& e) {
    c.fail(std::string("fig4: ") + e.what());
  }
  report(3, "topology table", c, std::to_string(n) + " presets checked");
}

void criterion4() {
  Check c;
  struct Row {
    const char* id;
    int l, r;
  };
  const Row rows[] = {{"fig1", 0, 2}, {"fig2", 3, 1}, {"fig3", 0, 2}, {"fig5", 1, 1}, {"fig6", 2, 2},
                      {"fig7", 2, 0}, {"fig8", 3, 0}, {"fig9", 1, 1}, {"fig10", 1, 1}};
  std::string summary;
  for (const auto& x : rows) {
    try {
      const auto& p = find_preset(x.id);
      const auto t = topology_report(p.model, p.chain.parity);
      const auto s = obc_spectrum(p.model, p.chain, true);
      EdgeOptions opt;
      opt.n_cells = p.chain.n_cells;
      const auto e = detect_edge_states(s, expected_edges(t), opt);
      char got[96];
      std::snprintf(got, sizeof got, "%s %dL+%dR", x.id, e.n_left(), e.n_right());
      c.expect(e.n_left() == x.l && e.n_right() == x.r && e.count == x.l + x.r, got);
      if (std::string(x.id) == "fig8") {
        double scale = 0.0;
        for (cplx z : s.eigenvalues) scale = std::max(scale, std::abs(z));
        int zeros = 0;
        for (cplx z : s.eigenvalues) zeros += std::abs(z) <= 1e-12 * scale ? 1 : 0;
        c.expect(zeros == 1, "fig8 has " + std::to_string(zeros) + " exact zero modes");
        summary += " (fig8 zero modes: " + std::to_string(zeros) + ")";
      }
    } catch (const std::exception& e) {
      c.fail(std::string(x.id) + ": " + e.what());
    }
  }
  report(4, "edge-state counts and sides", c, "9 presets" + summary);
}

void criterion5() {
  Check c;
  double worst = 1.0;
  int states = 0;
  for (const char* id : {"fig1", "fig2", "fig3", "fig7", "fig8"}) {
    const auto& p = find_preset(id);
    const auto t = topology_report(p.model, p.chain.parity);
    const auto s = obc_spectrum(p.model, p.chain, true);
    EdgeOptions opt;
    opt.n_cells = p.chain.n_cells;
    const auto e = detect_edge_states(s, expected_edges(t), opt);
    for (const auto& st : e.states) {
      const double purity = std::max(st.sublattice_weight_A, 1.0 - st.sublattice_weight_A);
      worst = std::min(worst, purity);
      ++states;
      c.expect(purity >= 0.9999, std::string(id) + fmt(" purity %.6f", purity));
    }
  }
  report(5, "sublattice purity after recombination", c,
         std::to_string(states) + " states" + fmt(", worst purity %.8f", worst));
}

void criterion6() {
  Check c;
  double worst = 0.0;
  for (const char* id : {"fig2", "fig5"}) {
    const auto& p = find_preset(id);
    const auto base = obc_spectrum(p.model, p.chain, false);
    for (double rt : {0.5, 2.0}) {
      const auto s = obc_spectrum(scaling_transform(p.model, rt), p.chain, false);
      const double rel = match_spectra(s.eigenvalues, base.eigenvalues).max_rel();
      worst = std::max(worst, rel);
      c.expect(rel <= 1e-8, std::string(id) + fmt(" rt=%.1f rel %.3e", rt, rel));
    }
  }
  report(6, "scaling symmetry", c, fmt("worst rel %.3e", worst));
}

void criterion7() {
  Check c;
  std::mt19937 rng(20240607);
  int sets = 0, skipped = 0;
  double worst = 0.0;
  while (sets < 50) {
    const auto h = random_set(rng, ModelKind::Ext1);
    const auto d = duality_map(h);
    TopologyReport a, b;
    try {
      a = topology_report(h);
      b = topology_report(d);
    } catch (const Error& e) {
      if (e.code() == Errc::NumericalInconsistency) c.fail(e.what());
      ++skipped;  // critical or gapless: invariants undefined
      continue;
    }
    ++sets;
    c.expect(b.nu_E == a.nu_E, "nu_E changed under duality");
    c.expect(b.nu_bar == 1 - a.nu_bar, "nu_bar not mapped to 1 - nu_bar");
    const auto sa = eigendecompose(build_pbc(h, 20), false), sb = eigendecompose(build_pbc(d, 20), false);
    const double rel = match_spectra(sa.eigenvalues, sb.eigenvalues).max_rel();
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-9, fmt("PBC mismatch %.3e", rel));
  }
  report(7, "duality", c,
         "50 random sets (" + std::to_string(skipped) + " critical skipped)" + fmt(", worst PBC rel %.3e", worst));
}

// Compares argument accumulation with root counting for every Laurent factor
// a parameter set produces (f_L, f_R and the t-bar polynomial).
bool windings_agree(const HoppingSet& h, Check& c, const std::string& tag) {
  const auto e = effective_params(h);
  Laurent fb;
  switch (h.kind()) {
    case ModelKind::SSH: fb = make_laurent({{0, e.t0()}, {1, e.t1()}}); break;
    case ModelKind::Ext1: fb = make_laurent({{0, e.t0()}, {1, e.t1()}, {2, e.t3()}}); break;
    case ModelKind::Ext2: fb = make_laurent({{0, e.t0()}, {1, e.t1()}, {-1, e.t3()}}); break;
  }
  const Laurent fs[3] = {factor_L(h), factor_R(h), fb};
  for (const auto& f : fs) {
    const auto count = detail::count_winding(f, 1.0, 1e-6);
    const auto arg = detail::arg_winding(f, 1.0, 4096);
    if (!count || arg.min_abs < 1e-9) return false;  // critical point: excluded
    const long turns = std::lround(arg.turns);
    if (turns != *count || std::abs(arg.turns - turns) > 1e-6) {
      c.fail(tag + ": arg " + std::to_string(arg.turns) + " vs count " + std::to_string(*count));
      return true;
    }
  }
  return true;
}

void criterion8() {
  Check c;
  int checked = 0, excluded = 0;
  for (const auto& p : figure_presets()) {
    if (windings_agree(p.model, c, p.id)) ++checked;
    else c.fail(p.id + " is critical");
  }
  std::mt19937 rng(8);
  const ModelKind kinds[3] = {ModelKind::SSH, ModelKind::Ext1, ModelKind::Ext2};
  for (int k = 0; k < 1000; ++k) {
    const auto h = random_set(rng, kinds[k % 3]);
    if (windings_agree(h, c, "random #" + std::to_string(k))) ++checked;
    else ++excluded;
  }
  report(8, "winding methods agree", c,
         std::to_string(checked) + " sets (14 presets + random), " + std::to_string(excluded) + " critical excluded");
}

void criterion9() {
  Check c;
  // E <-> -E on every preset
  for (const auto& p : figure_presets()) {
    const auto s = obc_spectrum(p.model, p.chain, false);
    std::vector<cplx> neg;
    for (cplx z : s.eigenvalues) neg.push_back(-z);
    const double rel = match_spectra(neg, s.eigenvalues).max_rel();
    c.expect(rel <= 1e-8, p.id + fmt(" chiral mismatch %.3e", rel));
  }
  // Hermitian limit
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> mag(0.1, 3.0);
  for (int k = 0; k < 30; ++k) {
    const double a = mag(rng), b = mag(rng), d = mag(rng);
    for (const auto& h : {HoppingSet::ssh(a, a, b, b), HoppingSet::ext1(a, a, b, b, d, d), HoppingSet::ext2(a, a, b, b, d, d)}) {
      const auto s = obc_spectrum(h, {12, Parity::Even, Boundary::OBC}, false);
      c.expect(max_rel_imag(s.eigenvalues) <= 1e-12, "Hermitian spectrum not real");
    }
  }
  // Chebyshev identity
  double cheb = 0.0;
  for (double th = 0.05; th < std::numbers::pi; th += 0.1)
    for (int n = 0; n <= 200; ++n)
      cheb = std::max(cheb, std::abs(chebyshev_U(n, std::cos(th)) * std::sin(th) - std::sin((n + 1) * th)));
  c.expect(cheb <= 1e-12, fmt("Chebyshev identity error %.3e", cheb));
  // degree accounting
  for (int n : {2, 3, 5, 10, 20}) {
    const auto q1 = qh_type1_char_spectrum(effective_params(find_preset("fig2").model), n);
    const auto q2 = qh_type2_char_spectrum(effective_params(find_preset("fig7").model), n);
    const auto g1 = general_type1_char_spectrum(find_preset("fig5").model, n);
    const auto g2 = general_type2_char_spectrum(find_preset("fig9").model, n);
    for (const auto* q : {&q1, &q2})
      c.expect(q->assembled_degree == 2 * n + 2 && q->quotient_degree == 2 * n,
               "QH degrees at N=" + std::to_string(n));
    for (const auto* g : {&g1, &g2})
      c.expect(g->assembled_degree == 3 * n + 4 && g->quotient_degree == 3 * n,
               "general degrees at N=" + std::to_string(n));
  }
  // additivity: nu_E = nu_E^L + nu_E^R = winding of det H on the unit circle
  int additive = 0;
  auto additivity = [&](const HoppingSet& h, const std::string& tag) {
    WindingPair w;
    try {
      w = spectral_windings(h);
    } catch (const Error&) {
      return;
    }
    const auto fl = factor_L(h), fr = factor_R(h);
    const auto det = detail::arg_winding([&](cplx z) { return fl(z) * fr(z); }, 1.0, 4096);
    const auto circ = winding_on_circle(h, 1.0);
    c.expect(std::lround(det.turns) == w.total() && circ.total() == w.total(), tag + ": additivity broken");
    ++additive;
  };
  for (const auto& p : figure_presets()) additivity(p.model, p.id);
  for (int k = 0; k < 100; ++k) additivity(random_set(rng, k % 2 ? ModelKind::Ext1 : ModelKind::Ext2), "random");
  report(9, "property suite", c,
         fmt("Chebyshev max err %.2e", cheb) + ", additivity on " + std::to_string(additive) + " sets");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  for (auto f : {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8,
                 criterion9}) {
    try {
      f();
    } catch (const std::exception& e) {
      std::printf("[FAIL] unexpected exception: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d of 9 criteria failed (%.2f s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
