#ifndef GESS_SCENARIO_HPP
#define GESS_SCENARIO_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gess/core.hpp"
#include "gess/mac.hpp"
#include "gess/oracle.hpp"
#include "gess/solver.hpp"

namespace gess {

// Config rejected; `field` is a JSON pointer or "line N".
class ConfigError : public GessError {
 public:
  ConfigError(std::string field, const std::string& message)
      : GessError(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class GameKind { Generic2x2, HawkDove, StagHunt, PrisonersDilemma, MacAloha };

std::string to_string(GameKind kind);
GameKind parse_game_kind(const std::string& name);

struct SweepRange {
  std::string variable;  // "alpha" or "gamma"
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  std::size_t group = 0;  // swept weight for "alpha"

  std::vector<double> values() const;
};

struct GridSettings {
  double resolution = 0.01;
  double eps_min = 1e-4;
  double eps_max = 0.2;
  std::size_t eps_count = 20;

  InvasionGrid invasion_grid() const;
};

struct MacSettings {
  double delta = 0.2;
  double gamma = 0.0;
  double mu = 1.0;
};

struct ScenarioConfig {
  GameKind game = GameKind::Generic2x2;
  PayoffMatrix2 payoff;
  double hd_value = 2.0;
  double hd_cost = 3.0;
  std::vector<double> weights;
  MacSettings mac;
  std::optional<SweepRange> sweep;
  double tolerance = kBracketTolerance;
  GridSettings grid;
  std::filesystem::path out_dir;
  std::string csv_name = "sweep.csv";
  std::string report_name = "report.json";

  std::size_t num_groups() const { return weights.size(); }
  bool is_mac() const { return game == GameKind::MacAloha; }
  GroupGame group_game() const;
  mac::MacParams mac_params() const;
  // Copy with the swept variable set to `value`.
  ScenarioConfig at(double value) const;
};

// Strict parse: unknown fields and type mismatches raise ConfigError.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Built-in configs for the named examples; `preset` is a game kind name or "mac".
ScenarioConfig preset_config(const std::string& preset);

struct EquilibriumRecord {
  GroupProfile profile;
  std::string kind;
  std::string support;
  std::vector<double> brackets;
  double aggregate = 0.0;
  std::optional<double> success_prob;
  bool oracle_passed = false;
  double oracle_margin = 0.0;
  std::vector<std::string> notes;
};

struct Discrepancy {
  std::string claim;
  std::string finding;
  bool reproduced = false;
};

struct ScenarioReport {
  std::string game;
  std::vector<double> weights;
  std::optional<PayoffMatrix2> payoff;
  std::optional<MacSettings> mac;
  std::optional<mac::MacThresholds> thresholds;
  std::vector<double> single_population_ess;
  bool degenerate = false;
  std::vector<EquilibriumRecord> equilibria;
  std::vector<Discrepancy> discrepancies;

  bool all_verified() const;
};

// Equilibria at one parameter point, each checked by the oracle.
std::vector<EquilibriumRecord> solve_equilibria(const ScenarioConfig& config, bool* degenerate = nullptr);

ScenarioReport run_scenario(const ScenarioConfig& config);
nlohmann::ordered_json report_json(const ScenarioReport& report);

struct SweepRow {
  double value = 0.0;
  std::vector<EquilibriumRecord> equilibria;
};

// Rows in ascending order of the swept value; points are evaluated concurrently.
std::vector<SweepRow> sweep(const ScenarioConfig& config);

// Columns: swept_var, eq_index, kind, q_1..q_N, aggregate, p_S, oracle_margin.
std::string sweep_csv(const std::vector<SweepRow>& rows, std::size_t num_groups);

// Published claims checked against the computed equilibria.
std::vector<Discrepancy> discrepancy_report(const ScenarioConfig& config);

// Writes the CSV datasets behind the example figures; returns the paths written.
std::vector<std::filesystem::path> write_figures(const std::string& preset, const std::filesystem::path& out_dir);

}  // namespace gess

#endif  // GESS_SCENARIO_HPP
