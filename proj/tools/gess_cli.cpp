#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gess/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kOracleFailure = 3;

struct Options {
  std::string config;
  std::string preset;
  std::optional<double> tol;
  std::optional<double> grid;
  std::string out;
  std::optional<unsigned> seed;
  std::vector<double> profile;
};

gess::ScenarioConfig load(const Options& o) {
  gess::ScenarioConfig c = gess::load_config(o.config);
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw gess::ConfigError("--tol", "must be positive");
    c.tolerance = *o.tol;
  }
  if (o.grid) {
    c.grid.resolution = *o.grid;
    try {
      c.grid.invasion_grid().validate();
    } catch (const gess::InvalidInput& e) {
      throw gess::ConfigError("--grid", e.what());
    }
  }
  if (!o.out.empty()) c.out_dir = o.out;
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

int run_solve(const Options& o) {
  const gess::ScenarioConfig c = load(o);
  const gess::ScenarioReport r = gess::run_scenario(c);
  const std::string text = gess::report_json(r).dump(2) + "\n";
  if (c.out_dir.empty()) {
    std::cout << text;
  } else {
    write_file(c.out_dir / c.report_name, text);
    std::cerr << "wrote " << (c.out_dir / c.report_name).string() << "\n";
  }
  return r.all_verified() ? kOk : kOracleFailure;
}

int run_sweep(const Options& o) {
  const gess::ScenarioConfig c = load(o);
  if (!c.sweep) throw gess::ConfigError("/sweep", "sweep needs a sweep range");
  const auto rows = gess::sweep(c);
  const std::string csv = gess::sweep_csv(rows, c.num_groups());
  if (c.out_dir.empty()) {
    std::cout << csv;
  } else {
    write_file(c.out_dir / c.csv_name, csv);
    std::cerr << "wrote " << (c.out_dir / c.csv_name).string() << "\n";
  }
  for (const auto& row : rows) {
    for (const auto& e : row.equilibria) {
      if (!e.oracle_passed) return kOracleFailure;
    }
  }
  return kOk;
}

int run_verify(const Options& o) {
  gess::ScenarioConfig c = load(o);
  if (o.profile.size() != c.num_groups()) {
    throw gess::ConfigError("--profile", "expected " + std::to_string(c.num_groups()) + " values");
  }
  gess::GroupProfile q;
  try {
    q = gess::GroupProfile(o.profile);
  } catch (const gess::InvalidInput& e) {
    throw gess::ConfigError("--profile", e.what());
  }
  if (c.is_mac()) {
    const auto p = c.mac_params();
    const double margin = gess::mac::mac_fprime_margin(q, p, c.grid.resolution);
    const bool passed = margin > -1e-7;
    std::cout << "profile " << gess::to_string(q) << "\n"
              << "F' margin " << margin << (passed ? " pass" : " FAIL") << "\n";
    return passed ? kOk : kOracleFailure;
  }
  const gess::GroupGame g = c.group_game();
  gess::InvasionGrid grid = c.grid.invasion_grid();
  if (o.seed) {
    // Random mutants on top of the regular grid.
    std::mt19937_64 rng(*o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 64; ++k) grid.extra_mutants.push_back(unit(rng));
  }
  const gess::Verdict def = gess::verify_gess_definition(q, g, grid);
  const gess::Verdict cond = gess::verify_conditions(q, g, grid);
  const bool strict = gess::strict_group_nash_check(q, g, c.grid.resolution);
  std::cout << "profile " << gess::to_string(q) << "\n"
            << "definition " << gess::describe(def) << "\n"
            << "conditions " << gess::describe(cond) << "\n"
            << "strict group Nash " << (strict ? "yes" : "no") << "\n";
  return def.passed ? kOk : kOracleFailure;
}

int run_figures(const Options& o) {
  const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("figures") : std::filesystem::path(o.out);
  for (const auto& path : gess::write_figures(o.preset, dir)) std::cerr << "wrote " << path.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group equilibrium stable strategy solver"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "bracket equality tolerance");
    sub->add_option("--grid", o.grid, "deviation grid resolution");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed for randomized mutant sampling");
  };
  auto* solve = app.add_subcommand("solve", "find and verify every equilibrium of a config");
  solve->add_option("config", o.config, "JSON config")->required();
  common(solve);
  auto* sweep = app.add_subcommand("sweep", "solve over the config's sweep range and write CSV");
  sweep->add_option("config", o.config, "JSON config")->required();
  common(sweep);
  auto* verify = app.add_subcommand("verify", "check one profile against the definition");
  verify->add_option("config", o.config, "JSON config")->required();
  verify->add_option("--profile", o.profile, "one probability per group")->required();
  common(verify);
  auto* figures = app.add_subcommand("figures", "write figure datasets for a preset");
  figures->add_option("preset", o.preset, "hawk-dove | stag-hunt | prisoners-dilemma | mac | all")->required();
  common(figures);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*solve) return run_solve(o);
    if (*sweep) return run_sweep(o);
    if (*verify) return run_verify(o);
    return run_figures(o);
  } catch (const gess::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const gess::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
