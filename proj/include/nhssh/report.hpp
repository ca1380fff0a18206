#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nhssh/charpoly.hpp"
#include "nhssh/hamiltonian.hpp"
#include "nhssh/io.hpp"
#include "nhssh/matching.hpp"
#include "nhssh/model.hpp"
#include "nhssh/presets.hpp"
#include "nhssh/spectra.hpp"
#include "nhssh/topology.hpp"

namespace nhssh {

enum class Analysis { Spectrum, Charpoly, Winding, Edges, Trajectory };

inline const char* analysis_name(Analysis a) {
  switch (a) {
    case Analysis::Spectrum: return "spectrum";
    case Analysis::Charpoly: return "charpoly";
    case Analysis::Winding: return "winding";
    case Analysis::Edges: return "edges";
    case Analysis::Trajectory: return "trajectory";
  }
  return "?";
}

inline Analysis parse_analysis(const std::string& s) {
  for (Analysis a : {Analysis::Spectrum, Analysis::Charpoly, Analysis::Winding, Analysis::Edges,
                     Analysis::Trajectory})
    if (s == analysis_name(a)) return a;
  throw Error(Errc::ConfigError, "unknown analysis '" + s + "'");
}

struct Tolerances {
  double reality = 1e-7;        // max|Im E| / max|E| for quasi-Hermitian inputs
  double pair = 1e-6;           // chiral pairing, relative to ||M||
  double eig_residual = 1e-8;   // ||M v - E v|| / ||M||
  double char_qh = 1e-6;        // char-vs-diag, SSH / QH solvers
  double char_general = 1e-5;   // char-vs-diag, general solvers
  double loc_left = 0.9;
  double loc_right = 0.1;
};

struct ExperimentConfig {
  std::string label;
  HoppingSet model = HoppingSet::ssh(1, 1, 1, 1);
  ChainSpec chain;
  std::set<Analysis> analyses;
  Tolerances tol;
  int resolution = 4096;
  std::string out_dir = "nhssh_out";
  bool svg = true;
  bool enforce_qhc = false;  // only used by sweeps
};

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  ExperimentConfig c;
  static const std::set<std::string> known{"label", "model", "chain", "analyses", "tolerances",
                                           "resolution", "output", "enforce_qhc"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw Error(Errc::ConfigError, "unknown config field '" + it.key() + "'");
  if (!j.contains("model")) throw Error(Errc::ConfigError, "config needs a model");
  if (j.contains("label")) c.label = j.at("label").get<std::string>();
  c.model = hopping_from_json(j.at("model"));
  if (j.contains("chain")) c.chain = chain_from_json(j.at("chain"));
  if (!j.contains("analyses") || !j.at("analyses").is_array() || j.at("analyses").empty())
    throw Error(Errc::ConfigError, "at least one analysis must be requested");
  for (const auto& a : j.at("analyses")) c.analyses.insert(parse_analysis(a.get<std::string>()));
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    std::map<std::string, double*> slots{{"reality", &c.tol.reality},
                                         {"pair", &c.tol.pair},
                                         {"eig_residual", &c.tol.eig_residual},
                                         {"char_qh", &c.tol.char_qh},
                                         {"char_general", &c.tol.char_general},
                                         {"loc_left", &c.tol.loc_left},
                                         {"loc_right", &c.tol.loc_right}};
    for (auto it = t.begin(); it != t.end(); ++it) {
      auto s = slots.find(it.key());
      if (s == slots.end()) throw Error(Errc::ConfigError, "unknown tolerance '" + it.key() + "'");
      const double v = it.value().get<double>();
      if (!(v > 0.0) || !std::isfinite(v))
        throw Error(Errc::ConfigError, "tolerance '" + it.key() + "' must be positive");
      *s->second = v;
    }
  }
  if (j.contains("resolution")) {
    c.resolution = j.at("resolution").get<int>();
    if (c.resolution < 256) throw Error(Errc::ConfigError, "resolution must be >= 256");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("directory")) c.out_dir = o.at("directory").get<std::string>();
    if (o.contains("svg")) c.svg = o.at("svg").get<bool>();
  }
  if (j.contains("enforce_qhc")) c.enforce_qhc = j.at("enforce_qhc").get<bool>();
  return c;
}

inline ExperimentConfig config_from_preset(const FigurePreset& p) {
  ExperimentConfig c;
  c.label = p.id;
  c.model = p.model;
  c.chain = p.chain;
  c.analyses = {Analysis::Spectrum, Analysis::Charpoly, Analysis::Winding, Analysis::Edges,
                Analysis::Trajectory};
  return c;
}

struct ReportBundle {
  json report;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  bool inconsistent = false;
};

namespace detail {

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

inline std::string side_key(Side s) { return side_name(s); }

/// Expected edge-state count from the winding numbers.
inline int expected_edge_count(const TopologyReport& t) {
  if (t.parity == Parity::Odd) return std::abs(t.nu_bar) + std::abs(1 - t.nu_bar);
  return 2 * std::abs(t.nu_bar);
}

// --- minimal SVG ------------------------------------------------------------

struct Frame {
  double x0, x1, y0, y1;  // data bounds
  double ox, oy, w, h;    // panel in px
  double X(double x) const { return ox + (x - x0) / (x1 - x0) * w; }
  double Y(double y) const { return oy + h - (y - y0) / (y1 - y0) * h; }
};

inline Frame fit_frame(const std::vector<cplx>& pts, double ox, double oy, double w, double h) {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  for (auto z : pts) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double px = 0.05 * span;
  if (y1 - y0 < 0.1 * span) {
    y0 -= 0.1 * span;
    y1 += 0.1 * span;
  }
  return {x0 - px, x1 + px, y0 - px, y1 + px, ox, oy, w, h};
}

inline void svg_axes(std::ostream& os, const Frame& f, const char* xl, const char* yl) {
  char b[512];
  std::snprintf(b, sizeof b,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"#444\"/>\n",
                f.ox, f.oy, f.w, f.h);
  os << b;
  if (f.y0 < 0 && f.y1 > 0) {
    std::snprintf(b, sizeof b, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#bbb\"/>\n",
                  f.ox, f.Y(0), f.ox + f.w, f.Y(0));
    os << b;
  }
  if (f.x0 < 0 && f.x1 > 0) {
    std::snprintf(b, sizeof b, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#bbb\"/>\n",
                  f.X(0), f.oy, f.X(0), f.oy + f.h);
    os << b;
  }
  std::snprintf(b, sizeof b,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">%s</text>\n"
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">%s</text>\n"
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\">[%.3g, %.3g] x [%.3g, %.3g]</text>\n",
                f.ox + f.w / 2, f.oy + f.h + 16, xl, f.ox + 4, f.oy + 14, yl, f.ox + 4, f.oy + f.h - 4,
                f.x0, f.x1, f.y0, f.y1);
  os << b;
}

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

inline std::string spectrum_svg(const std::vector<cplx>& diag, const std::vector<cplx>& chr,
                                const std::vector<TrajectorySample>& traj, const std::string& title) {
  std::vector<cplx> all = diag;
  all.insert(all.end(), chr.begin(), chr.end());
  for (const auto& s : traj) {
    all.push_back(s.E);
    all.push_back(-s.E);
  }
  const Frame f = fit_frame(all, 50, 30, 500, 400);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"480\">\n"
     << "<text x=\"300\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";
  svg_axes(os, f, "Re E", "Im E");
  char b[256];
  for (int sign : {1, -1}) {
    if (traj.empty()) break;
    os << "<polyline fill=\"none\" stroke=\"#999\" stroke-width=\"1\" points=\"";
    for (const auto& s : traj) {
      std::snprintf(b, sizeof b, "%.2f,%.2f ", f.X(sign * s.E.real()), f.Y(sign * s.E.imag()));
      os << b;
    }
    os << "\"/>\n";
  }
  for (auto z : diag) {
    std::snprintf(b, sizeof b, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"#1f4e9c\"/>\n", f.X(z.real()),
                  f.Y(z.imag()));
    os << b;
  }
  for (auto z : chr) {
    std::snprintf(b, sizeof b,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4.5\" fill=\"none\" stroke=\"#c0392b\"/>\n",
                  f.X(z.real()), f.Y(z.imag()));
    os << b;
  }
  os << "</svg>\n";
  return os.str();
}

// |psi| per site, A sites blue, B sites red; one panel per resolved state.
inline std::string wavefunction_svg(const EdgeStateReport& rep) {
  const int panels = std::max(1, rep.count);
  const double ph = 120, pw = 560;
  std::ostringstream os;
  char b[256];
  std::snprintf(b, sizeof b, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"%d\">\n",
                static_cast<int>(panels * (ph + 30) + 20));
  os << b;
  for (int k = 0; k < rep.count; ++k) {
    const auto& e = rep.states[k];
    const double oy = 20 + k * (ph + 30);
    const double amax = std::max(e.vector.cwiseAbs().maxCoeff(), 1e-300);
    const double n = static_cast<double>(e.vector.size());
    std::snprintf(b, sizeof b,
                  "<rect x=\"50\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#444\"/>\n"
                  "<text x=\"55\" y=\"%.1f\" font-size=\"11\">state %d: E = %.3e%+.3ei, %s, w_A = %.4f</text>\n",
                  oy, pw, ph, oy + 12, k + 1, e.energy.real(), e.energy.imag(), side_name(e.side),
                  e.sublattice_weight_A);
    os << b;
    for (Eigen::Index i = 0; i < e.vector.size(); ++i) {
      const double x = 50 + (i + 0.5) / n * pw;
      const double y = oy + ph - std::abs(e.vector(i)) / amax * (ph - 18);
      std::snprintf(b, sizeof b, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"3\"/>\n",
                    x, oy + ph, x, y, (i % 2 == 0) ? "#1f4e9c" : "#c0392b");
      os << b;
    }
  }
  os << "</svg>\n";
  return os.str();
}

inline CharSpectrum solve_characteristic(const HoppingSet& h, const ChainSpec& chain, bool qh) {
  const auto e = effective_params(h);
  if (chain.parity == Parity::Odd) {
    if (h.kind() == ModelKind::SSH || !qh)
      throw Error(Errc::NotApplicable, "odd chains are solved for quasi-Hermitian extended models only");
    return qh_odd_char_spectrum(e, chain.n_cells);
  }
  switch (h.kind()) {
    case ModelKind::SSH: return ssh_char_spectrum(e, chain.n_cells);
    case ModelKind::Ext1:
      return qh ? qh_type1_char_spectrum(e, chain.n_cells) : general_type1_char_spectrum(h, chain.n_cells);
    case ModelKind::Ext2:
      return qh ? qh_type2_char_spectrum(e, chain.n_cells) : general_type2_char_spectrum(h, chain.n_cells);
  }
  throw Error(Errc::NotApplicable, "unknown model");
}

inline json prediction_json(const EdgePrediction& p) {
  json c = json::array();
  for (auto& x : p.candidates) c.push_back(json::array({x.first, x.second}));
  return json{{"status", status_name(p.status)}, {"candidates", c}};
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
  json a = json::array();
  for (Analysis x : c.analyses) a.push_back(analysis_name(x));
  return json{{"label", c.label},
              {"model", to_json(c.model)},
              {"chain", to_json(c.chain)},
              {"analyses", a},
              {"tolerances",
               {{"reality", c.tol.reality},
                {"pair", c.tol.pair},
                {"eig_residual", c.tol.eig_residual},
                {"char_qh", c.tol.char_qh},
                {"char_general", c.tol.char_general},
                {"loc_left", c.tol.loc_left},
                {"loc_right", c.tol.loc_right}}},
              {"resolution", c.resolution}};
}

/// Run every requested analysis.  Pure: the caller decides where files go.
inline ReportBundle run_experiment(const ExperimentConfig& cfg) {
  if (cfg.analyses.empty()) throw Error(Errc::ConfigError, "at least one analysis must be requested");
  cfg.chain.validate(cfg.model.kind());
  const auto want = [&](Analysis a) { return cfg.analyses.count(a) > 0; };
  const bool obc = cfg.chain.boundary == Boundary::OBC;

  ReportBundle out;
  json& R = out.report;
  json warnings = json::array();
  R["schema_version"] = 1;
  R["config"] = to_json(cfg);

  const auto eff = effective_params(cfg.model);
  const bool qh = is_quasi_hermitian(cfg.model);
  json e{{"tbar", json::array({eff.tb[0], eff.tb[1]})}, {"r", eff.r}, {"quasi_hermitian", qh}};
  if (cfg.model.kind() != ModelKind::SSH) {
    e["tbar"].push_back(eff.tb[2]);
    e["qhc_residual"] = qhc_residual(cfg.model);
  } else {
    e["qhc_residual"] = 0.0;
  }
  R["effective"] = e;

  // topology (needed by edges as well)
  std::optional<TopologyReport> topo;
  if (want(Analysis::Winding) || want(Analysis::Edges)) {
    try {
      topo = topology_report(cfg.model, cfg.chain.parity, cfg.resolution);
      json zl = json::array(), zr = json::array();
      for (double z : topo->zeros_L) zl.push_back(z);
      for (double z : topo->zeros_R) zr.push_back(z);
      R["topology"] = json{{"nu_bar", topo->nu_bar},
                           {"nu_E_L", topo->nu_E_L},
                           {"nu_E_R", topo->nu_E_R},
                           {"nu_E", topo->nu_E},
                           {"r", topo->r},
                           {"predicted", detail::prediction_json(topo->predicted)},
                           {"factor_zero_moduli_L", zl},
                           {"factor_zero_moduli_R", zr}};
    } catch (const Error& err) {
      if (err.code() == Errc::NumericalInconsistency) out.inconsistent = true;
      R["topology"] = json{{"error", err.what()}};
    }
  }

  // dense spectrum
  std::optional<Spectrum> spec;
  if (want(Analysis::Spectrum) || want(Analysis::Charpoly) || want(Analysis::Edges)) {
    const DenseMatrix M = obc ? build_obc(cfg.model, cfg.chain) : build_pbc(cfg.model, cfg.chain.n_cells);
    try {
      spec = eigendecompose(M, want(Analysis::Edges), cfg.tol.eig_residual);
    } catch (const Error& err) {
      out.inconsistent = true;
      R["spectrum"] = json{{"error", err.what()}};
    }
    if (spec) {
      double emax = 0.0, imax = 0.0, rmax = 0.0;
      for (cplx z : spec->eigenvalues) {
        emax = std::max(emax, std::abs(z));
        imax = std::max(imax, std::abs(z.imag()));
      }
      for (double r : spec->residuals) rmax = std::max(rmax, r);
      const bool real = imax <= cfg.tol.reality * emax;
      // Only open chains inherit a real spectrum from the quasi-Hermitian map.
      const bool expect_real = qh && obc;
      R["spectrum"] = json{{"dimension", spec->dimension()},
                           {"max_abs_E", emax},
                           {"max_abs_imag", imax},
                           {"real", real},
                           {"expected_real", expect_real},
                           {"max_residual", rmax},
                           {"matrix_norm_1", spec->matrix_norm}};
      if (expect_real && !real) {
        out.inconsistent = true;
        warnings.push_back("quasi-Hermitian spectrum is not real within tolerance");
      }
      if (want(Analysis::Spectrum)) {
        std::ostringstream os;
        write_spectrum_csv(os, *spec);
        out.files.emplace_back("spectrum.csv", os.str());
      }
    }
  }

  // characteristic equation
  std::vector<cplx> char_energies;
  if (want(Analysis::Charpoly)) {
    if (!obc) {
      R["charpoly"] = json{{"skipped", "characteristic equations describe open chains"}};
    } else {
      try {
        const auto cs = detail::solve_characteristic(cfg.model, cfg.chain, qh);
        char_energies = cs.energies;
        double rmax = 0.0;
        for (double r : cs.residuals) rmax = std::max(rmax, r);
        json c{{"method", cs.method},
               {"assembled_degree", cs.assembled_degree},
               {"quotient_degree", cs.quotient_degree},
               {"roots", static_cast<int>(cs.roots.size())},
               {"discarded_candidates", static_cast<int>(cs.discarded.size())},
               {"max_residual", rmax}};
        if (spec) {
          const auto m = match_spectra(cs.energies, spec->eigenvalues);
          const bool general = cs.method.rfind("general", 0) == 0;
          const double tol = general ? cfg.tol.char_general : cfg.tol.char_qh;
          c["max_rel_distance"] = m.max_rel();
          c["mean_rel_distance"] = m.mean_rel();
          c["tolerance"] = tol;
          c["pass"] = m.max_rel() <= tol;
          if (m.max_rel() > tol) {
            out.inconsistent = true;
            warnings.push_back("characteristic-equation spectrum deviates from diagonalization");
          }
        }
        R["charpoly"] = c;
        std::ostringstream os;
        write_char_csv(os, cs);
        out.files.emplace_back("charpoly.csv", os.str());
      } catch (const Error& err) {
        if (err.code() == Errc::NumericalInconsistency || err.code() == Errc::DeflationError)
          out.inconsistent = true;
        R["charpoly"] = json{{"error", err.what()}};
      }
    }
  }

  // edge states
  std::optional<EdgeStateReport> edges;
  if (want(Analysis::Edges)) {
    if (!obc) {
      R["edges"] = json{{"skipped", "edge states need open boundaries"}};
    } else if (!topo) {
      R["edges"] = json{{"skipped", "no topology available to fix the expected count"}};
    } else if (spec) {
      EdgeOptions opt;
      opt.pair_tol = cfg.tol.pair;
      opt.thresholds = {cfg.tol.loc_left, cfg.tol.loc_right};
      opt.n_cells = cfg.chain.n_cells;
      edges = detect_edge_states(*spec, detail::expected_edge_count(*topo), opt);
      json states = json::array();
      for (const auto& s : edges->states)
        states.push_back(json{{"energy", detail::cjson(s.energy)},
                              {"side", detail::side_key(s.side)},
                              {"weight_left", s.weight_left},
                              {"sublattice_weight_A", s.sublattice_weight_A},
                              {"decay_factor", s.decay_factor}});
      json pairs = json::array();
      for (auto& p : edges->pairs) pairs.push_back(json::array({p.first, p.second}));
      const bool consistent = topo->predicted.allows(edges->n_left(), edges->n_right());
      if (!consistent) warnings.push_back("detected edge distribution differs from the table prediction");
      R["edges"] = json{{"count", edges->count},
                        {"n_left", edges->n_left()},
                        {"n_right", edges->n_right()},
                        {"gap_ratio", edges->gap_ratio},
                        {"unreliable", edges->unreliable},
                        {"consistent_with_prediction", consistent},
                        {"states", states},
                        {"chiral_pairs", pairs}};
      for (int k = 0; k < edges->count; ++k) {
        std::ostringstream os;
        write_eigenvector_csv(os, edges->states[k].vector);
        out.files.emplace_back("edge_state_" + std::to_string(k + 1) + ".csv", os.str());
      }
    }
  }

  std::vector<TrajectorySample> traj;
  if (want(Analysis::Trajectory)) {
    traj = bloch_trajectory(cfg.model, 1024);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    out.files.emplace_back("trajectory.csv", os.str());
  }

  if (cfg.svg) {
    if (spec) {
      out.files.emplace_back("spectrum.svg",
                             detail::spectrum_svg(spec->eigenvalues, char_energies, traj, cfg.label));
    }
    if (edges && edges->count > 0) out.files.emplace_back("wavefunctions.svg", detail::wavefunction_svg(*edges));
  }

  R["warnings"] = warnings;
  R["status"] = out.inconsistent ? "inconsistent" : "ok";
  out.files.insert(out.files.begin(), {"report.json", dump_json17(R)});
  return out;
}

inline void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : b.files) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + (dir / name).string());
  }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Axis paths: "t.<class>.L", "t.<class>.R" (one amplitude) or
/// "tbar.<class>" (both amplitudes scaled, their ratio kept).
inline HoppingSet apply_axis(const HoppingSet& h, const std::string& axis, double value) {
  auto fail = [&] { return Error(Errc::ConfigError, "axis '" + axis + "' not found"); };
  std::vector<std::string> parts;
  std::stringstream ss(axis);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  if (parts.size() < 2) throw fail();
  int cls = 0;
  try {
    std::size_t used = 0;
    cls = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw fail();
  } catch (const std::invalid_argument&) {
    throw fail();
  }
  if (!h.has(cls)) throw fail();
  const Bond b = h.bond(cls);
  if (parts[0] == "t" && parts.size() == 3 && (parts[2] == "L" || parts[2] == "R"))
    return h.with_bond(cls, parts[2] == "L" ? Bond{value, b.right} : Bond{b.left, value});
  if (parts[0] == "tbar" && parts.size() == 2) {
    const double k = value / b.mean();
    return h.with_bond(cls, Bond{b.left * k, b.right * k});
  }
  throw fail();
}

struct SweepRow {
  double value;
  std::optional<TopologyReport> topo;
  std::string error;
  bool transition = false;
};

inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::string& axis,
                                   const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::ConfigError, "sweep values must be finite");
    SweepRow row{v, std::nullopt, {}, false};
    try {
      // Joint rescaling of a bond keeps the QHC, so enforcing before the axis
      // leaves t-bar axes exact; enforcing after covers single amplitudes.
      const bool enforce = base.enforce_qhc && base.model.kind() != ModelKind::SSH;
      HoppingSet h = apply_axis(enforce ? qhc_enforce(base.model) : base.model, axis, v);
      if (enforce) h = qhc_enforce(h);
      row.topo = topology_report(h, base.chain.parity, base.resolution);
    } catch (const Error& e) {
      if (e.code() == Errc::ConfigError) throw;
      row.error = errc_name(e.code());
    }
    rows.push_back(std::move(row));
  }
  // A transition is any change of the invariants between neighbours
  // (including passing through a critical point).
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto &a = rows[k - 1], &b = rows[k];
    if (!a.topo || !b.topo)
      rows[k].transition = a.topo.has_value() != b.topo.has_value() || a.error != b.error;
    else
      rows[k].transition = a.topo->nu_bar != b.topo->nu_bar || a.topo->nu_E_L != b.topo->nu_E_L ||
                           a.topo->nu_E_R != b.topo->nu_E_R;
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "value,nu_bar,nu_E_L,nu_E_R,nu_E,prediction,n_left,n_right,transition,error\n";
  char b[128];
  for (const auto& r : rows) {
    std::snprintf(b, sizeof b, "%.17g", r.value);
    os << b << ',';
    if (r.topo) {
      const auto& t = *r.topo;
      os << t.nu_bar << ',' << t.nu_E_L << ',' << t.nu_E_R << ',' << t.nu_E << ','
         << status_name(t.predicted.status) << ',' << t.predicted.n_left() << ','
         << t.predicted.n_right() << ',';
    } else {
      os << ",,,,,,,";
    }
    os << (r.transition ? 1 : 0) << ',' << r.error << '\n';
  }
  return os.str();
}

}  // namespace nhssh
