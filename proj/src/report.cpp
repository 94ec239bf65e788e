#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "gess/scenario.hpp"

namespace gess {

namespace {

using nlohmann::ordered_json;

// Oracle margin threshold for MAC results, whose brackets carry no payoff scale.
constexpr double kMacOracleTolerance = 1e-7;

EquilibriumRecord record(const GessResult& r, const GroupGame& g, const InvasionGrid& grid) {
  EquilibriumRecord e;
  e.profile = r.profile;
  e.kind = to_string(r.kind);
  e.support = to_string(r.support);
  e.brackets = r.brackets;
  e.aggregate = aggregate(r.profile, g.weights);
  const Verdict v = verify_gess_definition(r.profile, g, grid);
  e.oracle_passed = v.passed;
  e.oracle_margin = v.worst_violation;
  e.notes = r.notes;
  if (!v.passed) e.notes.push_back("oracle: " + describe(v));
  return e;
}

EquilibriumRecord record(const mac::MacEquilibrium& m, const mac::MacParams& p, double resolution) {
  EquilibriumRecord e;
  e.profile = m.profile;
  e.kind = mac::to_string(m.kind);
  e.support = to_string(m.support);
  e.brackets = m.brackets;
  e.aggregate = aggregate(m.profile, p.weights);
  e.success_prob = m.success_prob;
  e.oracle_margin = mac::mac_fprime_margin(m.profile, p, resolution);
  e.oracle_passed = e.oracle_margin > -kMacOracleTolerance;
  if (!e.oracle_passed) e.notes.push_back("F' sign test fails on the deviation grid");
  return e;
}

std::string csv_num(double x) {
  if (x == 0.0) x = 0.0;
  return fmt::format("{:.10g}", x);
}

ordered_json profile_json(const GroupProfile& q) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < q.size(); ++i) a.push_back(q[i]);
  return a;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw GessError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<EquilibriumRecord> solve_equilibria(const ScenarioConfig& config, bool* degenerate) {
  if (degenerate) *degenerate = false;
  std::vector<EquilibriumRecord> out;
  if (config.is_mac()) {
    const mac::MacParams p = config.mac_params();
    for (const auto& m : mac::mac_find_gess(p)) out.push_back(record(m, p, config.grid.resolution));
    return out;
  }
  const GroupGame g = config.group_game();
  const InvasionGrid grid = config.grid.invasion_grid();
  std::vector<GessResult> results;
  try {
    results = find_all_gess(g, config.tolerance);
  } catch (const DegenerateGame&) {
    if (degenerate) *degenerate = true;
    return out;
  }
  for (const auto& r : results) out.push_back(record(r, g, grid));
  return out;
}

ordered_json report_json(const ScenarioReport& r) {
  ordered_json j;
  j["game"] = r.game;
  j["weights"] = r.weights;
  if (r.payoff) {
    j["payoff"] = {{"a", r.payoff->a}, {"b", r.payoff->b}, {"c", r.payoff->c}, {"d", r.payoff->d},
                   {"delta", r.payoff->delta()}};
    j["single_population_ess"] = r.single_population_ess;
  }
  if (r.mac) j["mac"] = {{"delta", r.mac->delta}, {"gamma", r.mac->gamma}, {"mu", r.mac->mu}};
  if (r.thresholds) {
    j["thresholds"] = {{"gamma_under_closed_form", r.thresholds->gamma_under_closed_form},
                       {"gamma_under_numeric", r.thresholds->gamma_under_numeric},
                       {"gamma_bar", r.thresholds->gamma_bar}};
  }
  j["degenerate"] = r.degenerate;
  ordered_json eqs = ordered_json::array();
  for (const auto& e : r.equilibria) {
    ordered_json x;
    x["profile"] = profile_json(e.profile);
    x["kind"] = e.kind;
    x["support"] = e.support;
    x["brackets"] = e.brackets;
    x["aggregate"] = e.aggregate;
    if (e.success_prob) x["success_probability"] = *e.success_prob;
    x["oracle"] = {{"passed", e.oracle_passed}, {"margin", e.oracle_margin}};
    x["notes"] = e.notes;
    eqs.push_back(std::move(x));
  }
  j["equilibria"] = std::move(eqs);
  ordered_json disc = ordered_json::array();
  for (const auto& d : r.discrepancies) {
    disc.push_back({{"claim", d.claim}, {"finding", d.finding}, {"reproduced", d.reproduced}});
  }
  j["discrepancies"] = std::move(disc);
  j["all_verified"] = r.all_verified();
  return j;
}

std::vector<SweepRow> sweep(const ScenarioConfig& config) {
  if (!config.sweep) throw ConfigError("/sweep", "missing sweep range");
  const std::vector<double> values = config.sweep->values();
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      rows[k].value = values[k];
      rows[k].equilibria = solve_equilibria(config.at(values[k]));
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(1, values.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, std::size_t num_groups) {
  std::string out = "swept_var,eq_index,kind";
  for (std::size_t i = 1; i <= num_groups; ++i) out += fmt::format(",q_{}", i);
  out += ",aggregate,p_S,oracle_margin\n";
  for (const auto& row : rows) {
    if (row.equilibria.empty()) {
      out += csv_num(row.value) + ",,none" + std::string(num_groups + 3, ',') + "\n";
      continue;
    }
    for (std::size_t k = 0; k < row.equilibria.size(); ++k) {
      const auto& e = row.equilibria[k];
      out += fmt::format("{},{},{}", csv_num(row.value), k, e.kind + (e.oracle_passed ? "" : "|discrepancy"));
      for (std::size_t i = 0; i < num_groups; ++i) out += "," + csv_num(e.profile[i]);
      out += "," + csv_num(e.aggregate) + "," + (e.success_prob ? csv_num(*e.success_prob) : "") + "," +
             csv_num(e.oracle_margin) + "\n";
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_figures(const std::string& preset, const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const auto path = out_dir / name;
    write_text(path, text);
    written.push_back(path);
  };
  auto group_figure = [&](const std::string& game, const std::string& name) {
    const ScenarioConfig c = preset_config(game);
    emit(name, sweep_csv(sweep(c), c.num_groups()));
  };
  const bool all = preset == "all";
  bool known = all;
  if (all || preset == "hawk-dove") {
    known = true;
    group_figure("hawk-dove", "hawk_dove_aggressiveness.csv");
  }
  if (all || preset == "stag-hunt") {
    known = true;
    group_figure("stag-hunt", "stag_hunt_cooperation.csv");
  }
  if (all || preset == "prisoners-dilemma") {
    known = true;
    group_figure("prisoners-dilemma", "prisoners_dilemma_collaboration.csv");
  }
  if (all || preset == "mac" || preset == "mac-aloha") {
    known = true;
    ScenarioConfig c = preset_config("mac");
    const auto rows = sweep(c);
    emit("mac_equilibria_alpha0.4.csv", sweep_csv(rows, c.num_groups()));

    std::string ps = "gamma,eq_index,kind,p_S\n";
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.equilibria.size(); ++k) {
        const auto& e = row.equilibria[k];
        ps += fmt::format("{},{},{},{}\n", csv_num(row.value), k, e.kind, csv_num(e.success_prob.value_or(0.0)));
      }
    }
    emit("mac_success_probability.csv", ps);

    std::string ref = "gamma,q_std,gamma_under_closed_form,gamma_under_numeric,gamma_bar\n";
    for (double g : c.sweep->values()) {
      const mac::MacParams p = c.at(g).mac_params();
      const mac::MacThresholds t = mac::mac_thresholds(p);
      ref += fmt::format("{},{},{},{},{}\n", csv_num(g), csv_num(mac::standard_reference_strategy(p)),
                         csv_num(t.gamma_under_closed_form), csv_num(t.gamma_under_numeric), csv_num(t.gamma_bar));
    }
    emit("mac_reference.csv", ref);

    c.weights = {0.85, 0.15};
    emit("mac_pure_mixed_alpha0.85.csv", sweep_csv(sweep(c), c.num_groups()));
  }
  if (!known) throw ConfigError("preset", "unknown preset \"" + preset + "\"");
  return written;
}

}  // namespace gess
