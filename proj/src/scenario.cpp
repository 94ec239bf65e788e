#include "gess/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gess/ess_classic.hpp"

namespace gess {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* name : allowed) known = known || it.key() == name;
    if (!known) throw ConfigError(path + "/" + it.key(), "unknown field");
  }
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  return v;
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + "/" + key, "must be finite");
  return x;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::size_t get_count(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(path + "/" + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

// Rescales the other weights so that weight `group` becomes `value`.
std::vector<double> with_weight(const std::vector<double>& w, std::size_t group, double value) {
  double rest = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (j != group) rest += w[j];
  }
  std::vector<double> out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    out[j] = j == group ? value : w[j] * (1.0 - value) / rest;
  }
  // Absorb rounding into the last free group so the sum stays within 1e-12.
  double sum = 0.0;
  for (double x : out) sum += x;
  const std::size_t fix = group == w.size() - 1 ? 0 : w.size() - 1;
  out[fix] += 1.0 - sum;
  return out;
}

void validate(const ScenarioConfig& c) {
  try {
    GroupWeights check(c.weights);
    (void)check;
  } catch (const InvalidInput& e) {
    throw ConfigError("/weights", e.what());
  }
  if (c.is_mac()) {
    try {
      (void)c.mac_params();
    } catch (const InvalidInput& e) {
      throw ConfigError("/mac", e.what());
    }
  }
  if (c.game == GameKind::HawkDove && !(c.hd_cost > 0.0 && c.hd_value > 0.0)) {
    throw ConfigError("/hawk_dove", "value and cost must be positive");
  }
  if (!(c.tolerance > 0.0)) throw ConfigError("/tolerance", "must be positive");
  try {
    c.grid.invasion_grid().validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("/grid", e.what());
  }
  if (c.sweep) {
    const SweepRange& s = *c.sweep;
    if (!(s.step > 0.0)) throw ConfigError("/sweep/step", "must be positive");
    if (s.variable == "alpha") {
      if (c.num_groups() < 2) throw ConfigError("/sweep/variable", "an alpha sweep needs at least two groups");
      if (s.group >= c.num_groups()) throw ConfigError("/sweep/group", "group index out of range");
      for (double v : s.values()) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("/sweep", "swept weight must stay inside (0,1)");
      }
    } else if (s.variable == "gamma") {
      if (!c.is_mac()) throw ConfigError("/sweep/variable", "gamma sweeps need game mac-aloha");
      for (double v : s.values()) {
        if (!(v >= 0.0 && v < 1.0)) throw ConfigError("/sweep", "swept gamma must stay inside [0,1)");
      }
    } else {
      throw ConfigError("/sweep/variable", "expected \"alpha\" or \"gamma\"");
    }
  }
}

std::string fmt4(double x) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << x;
  return os.str();
}

struct Window {
  bool found = false;
  double lo = 0.0;
  double hi = 0.0;
};

// Parameter interval on which `present` holds, edges refined by bisection.
// Assumes a single interval, which holds for every check below.
template <class Pred>
Window scan_window(double lo, double hi, double step, Pred present) {
  Window w;
  double prev = lo;
  bool prev_in = present(lo);
  if (prev_in) {
    w.found = true;
    w.lo = lo;
    w.hi = lo;
  }
  const auto steps = static_cast<long>(std::llround((hi - lo) / step));
  for (long k = 1; k <= steps; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    const bool in = present(x);
    if (in != prev_in) {
      double a = prev;
      double b = x;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        (present(m) == prev_in ? a : b) = m;
      }
      if (in && !w.found) {
        w.found = true;
        w.lo = b;
      }
      if (!in) w.hi = a;
    }
    if (in) w.hi = x;
    prev = x;
    prev_in = in;
  }
  return w;
}

std::string describe(const Window& w) {
  return w.found ? "(" + fmt4(w.lo) + ", " + fmt4(w.hi) + ")" : "empty";
}

bool has_support(const GroupGame& g, const SupportProfile& s) {
  for (const auto& r : find_all_gess(g)) {
    if (r.support == s) return true;
  }
  return false;
}

GroupGame two_groups(double alpha, const PayoffMatrix2& m) { return {GroupWeights{alpha, 1.0 - alpha}, m}; }

Window alpha_window(const PayoffMatrix2& m, const SupportProfile& s) {
  return scan_window(0.001, 0.999, 0.001, [&](double a) { return has_support(two_groups(a, m), s); });
}

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }

using L = SupportLabel;

void hawk_dove_claims(std::vector<Discrepancy>& out) {
  const PayoffMatrix2 m = PayoffMatrix2::hawk_dove(2.0, 3.0);
  const Window hd = alpha_window(m, {L::PureA, L::PureB});
  out.push_back({"one strong GESS (H,D) for 0<alpha<0.25",
                 "strong (H,D) found on alpha " + describe(hd),
                 hd.found && hd.lo <= 0.001 && near(hd.hi, 0.25, 1e-6)});
  const Window hq = alpha_window(m, {L::PureA, L::Mixer});
  const Window qd = alpha_window(m, {L::Mixer, L::PureB});
  out.push_back({"weak GESS (H,q_2) for 0<alpha<0.37",
                 "(H, mixer) found on alpha " + describe(hq) + "; the mixer-pure equilibrium is (q_1, D) on alpha " +
                     describe(qd),
                 hq.found});
  out.push_back({"interval endpoint 0.37", "upper edge of the (q_1, D) window is " + fmt4(qd.hi) + " (1/3)",
                 qd.found && near(qd.hi, 0.37, 5e-3)});
}

void stag_hunt_claims(std::vector<Discrepancy>& out) {
  const PayoffMatrix2 m = PayoffMatrix2::stag_hunt();
  const Window ss = alpha_window(m, {L::PureA, L::PureA});
  const Window hh = alpha_window(m, {L::PureB, L::PureB});
  out.push_back({"(S,S) and (H,H) are strong GESSs for every alpha",
                 "(S,S) on alpha " + describe(ss) + ", (H,H) on alpha " + describe(hh),
                 ss.found && hh.found && ss.lo <= 0.001 && ss.hi >= 0.999 && hh.lo <= 0.001 && hh.hi >= 0.999});
  const Window sh = alpha_window(m, {L::PureA, L::PureB});
  out.push_back({"strong GESS (S,H) for 0.25<alpha<0.5", "(S,H) found on alpha " + describe(sh),
                 sh.found && near(sh.lo, 0.25, 1e-6) && near(sh.hi, 0.5, 1e-6)});
  bool mixers = false;
  for (int k = 1; k < 100 && !mixers; ++k) {
    for (const auto& r : find_all_gess(two_groups(k / 100.0, m))) {
      mixers = mixers || r.kind != GessKind::Strong;
    }
  }
  out.push_back({"no strict mixed NE", mixers ? "mixed equilibria found" : "no mixer equilibria (delta = 2 > 0)",
                 !mixers});
  out.push_back({"cooperation figure plotted as a function of x",
                 "x is undefined; only the sweep over alpha is emitted", false});
}

void prisoners_dilemma_claims(std::vector<Discrepancy>& out) {
  const PayoffMatrix2 m = PayoffMatrix2::prisoners_dilemma();
  const Window cc = alpha_window(m, {L::PureA, L::PureA});
  out.push_back({"(C,C) is always a GESS", "(C,C) passes the sign test on alpha " + describe(cc), cc.found});
  const Window dd = alpha_window(m, {L::PureB, L::PureB});
  out.push_back({"(D,D) is a GESS for all alpha", "(D,D) passes the sign test on alpha " + describe(dd), dd.found});
  const Window cd = alpha_window(m, {L::PureA, L::PureB});
  const bool strict_cd = strict_group_nash_check(GroupProfile{1.0, 0.0}, two_groups(0.7, m));
  out.push_back({"(C,D) is a GESS and a strict NE for 0.5<alpha<1",
                 "(C,D) found on alpha " + describe(cd) + "; strict group Nash at alpha=0.7: " +
                     (strict_cd ? "yes" : "no"),
                 cd.found && near(cd.lo, 0.5, 1e-6) && cd.hi >= 0.999 && strict_cd});
  const Window dc = alpha_window(m, {L::PureB, L::PureA});
  out.push_back({"(D,C) is a GESS for 0<alpha<0.5", "(D,C) found on alpha " + describe(dc),
                 dc.found && dc.lo <= 0.001 && near(dc.hi, 0.5, 1e-6)});
}

// Checks of the printed strong-GESS interval test against the sign test at the configured weights.
void printed_test_claim(const ScenarioConfig& c, std::vector<Discrepancy>& out) {
  std::vector<GessResult> pure;
  try {
    pure = pure_gess_all(c.group_game(), c.tolerance);
  } catch (const DegenerateGame&) {
    return;
  }
  std::size_t rejected = 0;
  std::size_t strong = 0;
  for (const auto& r : pure) {
    if (r.kind != GessKind::Strong) continue;
    ++strong;
    if (r.diagnostics.printed_interval_test && !*r.diagnostics.printed_interval_test) ++rejected;
  }
  out.push_back({"printed interval test alpha_i(d-c) > H > alpha_i(b-a) characterizes strong GESSs",
                 "rejects " + std::to_string(rejected) + " of " + std::to_string(strong) +
                     " strong equilibria found by the sign test at the configured weights",
                 rejected == 0});
}

void mac_claims(const ScenarioConfig& c, std::vector<Discrepancy>& out) {
  const mac::MacParams p = c.mac_params();
  const mac::MacThresholds t = mac::mac_thresholds(p);
  const bool reference = near(p.delta, 0.2, 1e-12) && p.num_groups() == 2 &&
                         near(std::min(p.weights[0], p.weights[1]), 0.4, 1e-12);
  if (reference) {
    out.push_back({"lower threshold gamma_under = 0.3",
                   "printed formula gives " + fmt4(t.gamma_under_closed_form) +
                       "; the fully mixed profile stays in (0,1) up to gamma = " + fmt4(t.gamma_under_numeric),
                   near(t.gamma_under_closed_form, 0.3, 1e-3) && near(t.gamma_under_numeric, 0.3, 1e-3)});
    out.push_back({"all-T is a GESS for gamma = gamma_bar > 0.53", "gamma_bar = " + fmt4(t.gamma_bar),
                   t.gamma_bar > 0.53 && t.gamma_bar < 0.54});
  }
  const double big = *std::max_element(p.weights.values().begin(), p.weights.values().end());
  if (p.num_groups() == 2 && near(big, 0.85, 1e-12)) {
    const Window w = scan_window(0.0, 0.99, 0.01, [&](double g) {
      const mac::MacParams q(p.delta, g, p.mu, p.weights);
      for (const auto& e : mac::mac_find_gess(q)) {
        if (e.kind == mac::MacKind::PureMixed) return true;
      }
      return false;
    });
    out.push_back({"pure-mixed GESS exists only for 0<=gamma<0.4 at alpha=0.85",
                   "pure-mixed found on gamma " + describe(w), w.found && w.lo <= 0.0 && near(w.hi, 0.4, 5e-3)});
  }
  bool all_s = false;
  for (int k = 0; k < 100 && !all_s; ++k) {
    const mac::MacParams q(p.delta, k / 100.0, p.mu, p.weights);
    for (const auto& e : mac::mac_find_gess(q, false)) {
      bool silent = true;
      for (std::size_t i = 0; i < e.profile.size(); ++i) silent = silent && e.profile[i] == 0.0;
      all_s = all_s || silent;
    }
  }
  out.push_back({"(S,...,S) is never a GESS", all_s ? "all-S found" : "all-S absent for gamma in [0, 0.99]",
                 !all_s});
  if (auto q = mac::mac_fully_mixed(p)) {
    const double cut = (1.0 - p.delta) / 2.0;
    bool contradicted = false;
    for (std::size_t i = 0; i < q->size(); ++i) {
      for (std::size_t j = 0; j < q->size(); ++j) {
        if (i != j && p.weights[j] < p.weights[i] && (*q)[i] > cut && (*q)[j] < 1.0) contradicted = true;
      }
    }
    out.push_back({"if q_i > (1-delta)/2 then all smaller groups transmit",
                   "fully mixed profile " + to_string(*q) + " has a smaller group mixing above the cut " + fmt4(cut),
                   !contradicted});
  }
}

}  // namespace

std::string to_string(GameKind kind) {
  switch (kind) {
    case GameKind::Generic2x2:
      return "generic-2x2";
    case GameKind::HawkDove:
      return "hawk-dove";
    case GameKind::StagHunt:
      return "stag-hunt";
    case GameKind::PrisonersDilemma:
      return "prisoners-dilemma";
    case GameKind::MacAloha:
      return "mac-aloha";
  }
  return "?";
}

GameKind parse_game_kind(const std::string& name) {
  for (GameKind k : {GameKind::Generic2x2, GameKind::HawkDove, GameKind::StagHunt, GameKind::PrisonersDilemma,
                     GameKind::MacAloha}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("/game", "unknown game kind \"" + name + "\"");
}

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  if (!(step > 0.0) || stop < start) return out;
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) {
    // Round away accumulated binary noise so printed values stay short.
    out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return out;
}

InvasionGrid GridSettings::invasion_grid() const {
  return InvasionGrid::log_spaced(eps_min, eps_max, eps_count, resolution);
}

GroupGame ScenarioConfig::group_game() const { return {GroupWeights(weights), payoff}; }

mac::MacParams ScenarioConfig::mac_params() const {
  return mac::MacParams(mac.delta, mac.gamma, mac.mu, GroupWeights(weights));
}

ScenarioConfig ScenarioConfig::at(double value) const {
  ScenarioConfig c = *this;
  if (!sweep) return c;
  if (sweep->variable == "alpha") {
    c.weights = with_weight(weights, sweep->group, value);
  } else {
    c.mac.gamma = value;
  }
  c.sweep.reset();
  return c;
}

ScenarioConfig parse_config(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"game", "payoff", "hawk_dove", "weights", "mac", "sweep", "tolerance", "grid", "output"});
  if (!doc.contains("game")) throw ConfigError("/game", "missing required field");
  ScenarioConfig c;
  c.game = parse_game_kind(get_string(doc, "", "game"));
  switch (c.game) {
    case GameKind::StagHunt:
      c.payoff = PayoffMatrix2::stag_hunt();
      break;
    case GameKind::PrisonersDilemma:
      c.payoff = PayoffMatrix2::prisoners_dilemma();
      break;
    default:
      break;
  }
  if (doc.contains("payoff")) {
    if (c.game != GameKind::Generic2x2) throw ConfigError("/payoff", "only generic-2x2 takes a payoff matrix");
    const auto& m = require_object(doc.at("payoff"), "/payoff");
    reject_unknown(m, "/payoff", {"a", "b", "c", "d"});
    for (const char* k : {"a", "b", "c", "d"}) {
      if (!m.contains(k)) throw ConfigError(std::string("/payoff/") + k, "missing required field");
    }
    c.payoff = PayoffMatrix2(get_number(m, "/payoff", "a"), get_number(m, "/payoff", "b"),
                             get_number(m, "/payoff", "c"), get_number(m, "/payoff", "d"));
  } else if (c.game == GameKind::Generic2x2) {
    throw ConfigError("/payoff", "missing required field for generic-2x2");
  }
  if (doc.contains("hawk_dove")) {
    if (c.game != GameKind::HawkDove) throw ConfigError("/hawk_dove", "only hawk-dove takes value and cost");
    const auto& hd = require_object(doc.at("hawk_dove"), "/hawk_dove");
    reject_unknown(hd, "/hawk_dove", {"value", "cost"});
    c.hd_value = number_or(hd, "/hawk_dove", "value", c.hd_value);
    c.hd_cost = number_or(hd, "/hawk_dove", "cost", c.hd_cost);
  }
  if (c.game == GameKind::HawkDove) c.payoff = PayoffMatrix2::hawk_dove(c.hd_value, c.hd_cost);
  if (!doc.contains("weights")) throw ConfigError("/weights", "missing required field");
  const auto& w = doc.at("weights");
  if (!w.is_array() || w.empty()) throw ConfigError("/weights", "expected a non-empty array");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!w[i].is_number()) throw ConfigError("/weights/" + std::to_string(i), "expected a number");
    c.weights.push_back(w[i].get<double>());
  }
  if (doc.contains("mac")) {
    if (!c.is_mac()) throw ConfigError("/mac", "only mac-aloha takes MAC parameters");
    const auto& m = require_object(doc.at("mac"), "/mac");
    reject_unknown(m, "/mac", {"delta", "gamma", "mu"});
    c.mac.delta = number_or(m, "/mac", "delta", c.mac.delta);
    c.mac.gamma = number_or(m, "/mac", "gamma", c.mac.gamma);
    c.mac.mu = number_or(m, "/mac", "mu", c.mac.mu);
  }
  if (doc.contains("sweep")) {
    const auto& s = require_object(doc.at("sweep"), "/sweep");
    reject_unknown(s, "/sweep", {"variable", "start", "stop", "step", "group"});
    for (const char* k : {"variable", "start", "stop", "step"}) {
      if (!s.contains(k)) throw ConfigError(std::string("/sweep/") + k, "missing required field");
    }
    SweepRange r;
    r.variable = get_string(s, "/sweep", "variable");
    r.start = get_number(s, "/sweep", "start");
    r.stop = get_number(s, "/sweep", "stop");
    r.step = get_number(s, "/sweep", "step");
    if (s.contains("group")) r.group = get_count(s, "/sweep", "group");
    c.sweep = r;
  }
  c.tolerance = number_or(doc, "", "tolerance", c.tolerance);
  if (doc.contains("grid")) {
    const auto& g = require_object(doc.at("grid"), "/grid");
    reject_unknown(g, "/grid", {"resolution", "eps_min", "eps_max", "eps_count"});
    c.grid.resolution = number_or(g, "/grid", "resolution", c.grid.resolution);
    c.grid.eps_min = number_or(g, "/grid", "eps_min", c.grid.eps_min);
    c.grid.eps_max = number_or(g, "/grid", "eps_max", c.grid.eps_max);
    if (g.contains("eps_count")) c.grid.eps_count = get_count(g, "/grid", "eps_count");
  }
  if (doc.contains("output")) {
    const auto& o = require_object(doc.at("output"), "/output");
    reject_unknown(o, "/output", {"dir", "csv", "report"});
    if (o.contains("dir")) c.out_dir = get_string(o, "/output", "dir");
    if (o.contains("csv")) c.csv_name = get_string(o, "/output", "csv");
    if (o.contains("report")) c.report_name = get_string(o, "/output", "report");
  }
  validate(c);
  return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
    throw ConfigError("line " + std::to_string(line), "malformed JSON");
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ScenarioConfig preset_config(const std::string& preset) {
  ScenarioConfig c;
  c.weights = {0.4, 0.6};
  if (preset == "mac" || preset == "mac-aloha") {
    c.game = GameKind::MacAloha;
    c.mac = {0.2, 0.1, 1.0};
    c.sweep = SweepRange{"gamma", 0.0, 0.95, 0.01, 0};
  } else {
    c.game = parse_game_kind(preset);
    if (c.game == GameKind::Generic2x2) throw ConfigError("/game", "generic-2x2 has no preset");
    c.payoff = c.game == GameKind::HawkDove   ? PayoffMatrix2::hawk_dove(c.hd_value, c.hd_cost)
               : c.game == GameKind::StagHunt ? PayoffMatrix2::stag_hunt()
                                              : PayoffMatrix2::prisoners_dilemma();
    c.sweep = SweepRange{"alpha", 0.01, 0.99, 0.01, 0};
  }
  validate(c);
  return c;
}

bool ScenarioReport::all_verified() const {
  return std::all_of(equilibria.begin(), equilibria.end(), [](const auto& e) { return e.oracle_passed; });
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  ScenarioReport r;
  r.game = to_string(config.game);
  r.weights = config.weights;
  if (config.is_mac()) {
    r.mac = config.mac;
    r.thresholds = mac::mac_thresholds(config.mac_params());
  } else {
    r.payoff = config.payoff;
    for (const auto& s : all_ess_2x2(config.payoff)) r.single_population_ess.push_back(s.prob_first_action());
  }
  r.equilibria = solve_equilibria(config, &r.degenerate);
  r.discrepancies = discrepancy_report(config);
  return r;
}

std::vector<Discrepancy> discrepancy_report(const ScenarioConfig& config) {
  std::vector<Discrepancy> out;
  switch (config.game) {
    case GameKind::HawkDove:
      if (config.hd_value == 2.0 && config.hd_cost == 3.0) hawk_dove_claims(out);
      break;
    case GameKind::StagHunt:
      stag_hunt_claims(out);
      break;
    case GameKind::PrisonersDilemma:
      prisoners_dilemma_claims(out);
      break;
    case GameKind::MacAloha:
      mac_claims(config, out);
      break;
    case GameKind::Generic2x2:
      break;
  }
  if (!config.is_mac()) printed_test_claim(config, out);
  return out;
}

}  // namespace gess
