// nhssh: command-line front end for the non-Hermitian SSH toolkit.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhssh/report.hpp"

namespace {

namespace fs = std::filesystem;

// Distinct from nhssh::Error so the exit code can tell them apart.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nhssh::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot open " + path);
  try {
    return nhssh::json::parse(f);
  } catch (const nhssh::json::parse_error& e) {
    throw nhssh::Error(nhssh::Errc::ConfigError, path + ": " + e.what());
  }
}

fs::path output_dir(const std::string& fallback) {
  if (const char* env = std::getenv("NHSSH_OUT"); env && *env) return env;
  return fallback;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::istringstream is(tok);
    is.imbue(std::locale::classic());
    double v = 0.0;
    if (!(is >> v) || !(is >> std::ws).eof())
      throw nhssh::Error(nhssh::Errc::ConfigError, "bad sweep value '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw nhssh::Error(nhssh::Errc::ConfigError, "no sweep values given");
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f || !(f << text)) throw IoFailure("cannot write " + p.string());
}

int finish(const nhssh::ReportBundle& b, const fs::path& dir) {
  try {
    nhssh::write_bundle(b, dir);
  } catch (const std::exception& e) {
    throw IoFailure(e.what());
  }
  const auto& r = b.report;
  std::printf("wrote %s (%s)\n", (dir / "report.json").string().c_str(),
              r.at("status").get<std::string>().c_str());
  if (r.contains("topology") && r["topology"].contains("nu_bar")) {
    const auto& t = r["topology"];
    std::printf("  nu_bar = %d, (nu_E^L, nu_E^R) = (%d, %d)\n", t["nu_bar"].get<int>(),
                t["nu_E_L"].get<int>(), t["nu_E_R"].get<int>());
  }
  if (r.contains("edges") && r["edges"].contains("count"))
    std::printf("  edge states: %d (%d left, %d right)\n", r["edges"]["count"].get<int>(),
                r["edges"]["n_left"].get<int>(), r["edges"]["n_right"].get<int>());
  for (const auto& w : r.at("warnings")) std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
  return b.inconsistent ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian SSH / extended-SSH analysis"};
  app.require_subcommand(1);

  std::string config_path, preset_id, axis, values;
  auto* run = app.add_subcommand("run", "run the analyses of a JSON config");
  run->add_option("config", config_path, "config file")->required();
  auto* rep = app.add_subcommand("reproduce", "run a built-in parameter preset");
  rep->add_option("preset", preset_id, "preset id (see `nhssh presets`)")->required();
  auto* sw = app.add_subcommand("sweep", "topology along one parameter axis");
  sw->add_option("config", config_path, "base config file")->required();
  sw->add_option("--axis", axis, "t.<class>.L | t.<class>.R | tbar.<class>")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  auto* pre = app.add_subcommand("presets", "list built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) {
      for (const auto& p : nhssh::figure_presets()) std::printf("%-6s %s\n", p.id.c_str(), p.summary.c_str());
      return 0;
    }
    if (*run) {
      const auto cfg = nhssh::config_from_json(read_json(config_path));
      return finish(nhssh::run_experiment(cfg), output_dir(cfg.out_dir));
    }
    if (*rep) {
      const auto cfg = nhssh::config_from_preset(nhssh::find_preset(preset_id));
      return finish(nhssh::run_experiment(cfg), output_dir("nhssh_out/" + preset_id));
    }
    if (*sw) {
      const auto cfg = nhssh::config_from_json(read_json(config_path));
      const auto rows = nhssh::sweep(cfg, axis, parse_values(values));
      const fs::path dir = output_dir(cfg.out_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw IoFailure("cannot create " + dir.string());
      write_text(dir / "sweep.csv", nhssh::sweep_csv(rows));
      int transitions = 0;
      for (const auto& r : rows) transitions += r.transition ? 1 : 0;
      std::printf("wrote %s (%zu values, %d transitions flagged)\n", (dir / "sweep.csv").string().c_str(),
                  rows.size(), transitions);
      return 0;
    }
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "nhssh: %s\n", e.what());
    return 1;
  } catch (const nhssh::Error& e) {
    std::fprintf(stderr, "nhssh: %s\n", e.what());
    return e.code() == nhssh::Errc::NumericalInconsistency ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nhssh: %s\n", e.what());
    return 1;
  }
  return 0;
}
