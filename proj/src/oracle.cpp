#include "gess/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace gess {

namespace {

constexpr double kSameStrategy = 1e-12;

double tolerance_for_scale(double scale) { return 1e-7 * std::max(scale, 1e-12); }

// p'Aq on raw spans; callers guarantee matching dimensions.
double bilinear(std::span<const double> p, std::span<const double> q, const PayoffMatrix& m) {
  const std::size_t n = m.num_actions();
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (p[r] == 0.0) continue;
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += m(r, c) * q[c];
    total += p[r] * row;
  }
  return total;
}

double squared_distance(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
  return s;
}

double max_distance(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s = std::max(s, std::abs(p[k] - q[k]));
  return s;
}

void check_general(const GeneralProfile& q, const GeneralGroupGame& g) {
  if (q.size() != g.num_groups()) throw InvalidInput("profile length does not match number of groups");
  for (const auto& s : q) {
    if (s.size() != g.payoff.num_actions()) throw InvalidInput("strategy dimension does not match payoff matrix");
  }
}

// Utility of group i as a function of its own strategy, the rest held fixed:
// U(x) = alpha_i J(x,x) + sum_{j != i} alpha_j J(x, q_j).
class OwnUtility {
 public:
  OwnUtility(std::size_t i, const GeneralProfile& q, const GeneralGroupGame& g)
      : m_(g.payoff), alpha_i_(g.weights[i]), field_(g.payoff.num_actions(), 0.0) {
    const std::size_t n = m_.num_actions();
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j == i) continue;
      for (std::size_t r = 0; r < n; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < n; ++c) row += m_(r, c) * q[j][c];
        field_[r] += g.weights[j] * row;
      }
    }
  }

  double operator()(std::span<const double> x) const {
    double u = alpha_i_ * bilinear(x, x, m_);
    for (std::size_t r = 0; r < x.size(); ++r) u += x[r] * field_[r];
    return u;
  }

 private:
  const PayoffMatrix& m_;
  double alpha_i_;
  std::vector<double> field_;
};

double omega_raw(std::span<const double> p, std::span<const double> q, const PayoffMatrix& m) {
  return bilinear(p, p, m) - bilinear(p, q, m) - bilinear(q, p, m) + bilinear(q, q, m);
}

std::vector<std::vector<double>> mutant_set(std::size_t num_actions, const InvasionGrid& grid) {
  std::vector<std::vector<double>> out;
  for (const auto& pv : simplex_grid(num_actions, grid.deviation_resolution)) {
    out.emplace_back(pv.values().begin(), pv.values().end());
  }
  if (num_actions == 2) {
    for (double x : grid.extra_mutants) {
      if (x >= 0.0 && x <= 1.0) out.push_back({x, 1.0 - x});
    }
  }
  return out;
}

void record(Verdict& v, double margin, std::size_t group, std::span<const double> mutant, double eps) {
  if (margin < v.worst_violation) {
    v.worst_violation = margin;
    v.witness = Witness{group, std::vector<double>(mutant.begin(), mutant.end()), eps};
  }
}

}  // namespace

InvasionGrid InvasionGrid::standard() { return log_spaced(1e-4, 0.2, 20, 0.01); }

InvasionGrid InvasionGrid::log_spaced(double eps_min, double eps_max, std::size_t count, double resolution) {
  if (!(eps_min > 0.0 && eps_max < 1.0 && eps_min <= eps_max) || count == 0) {
    throw InvalidInput("invasion grid needs 0 < eps_min <= eps_max < 1 and at least one point");
  }
  InvasionGrid g;
  g.deviation_resolution = resolution;
  if (count == 1) {
    g.eps_values = {eps_min};
  } else {
    const double lo = std::log(eps_min);
    const double hi = std::log(eps_max);
    for (std::size_t k = 0; k < count; ++k) {
      g.eps_values.push_back(std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1)));
    }
    g.eps_values.back() = eps_max;
  }
  g.validate();
  return g;
}

void InvasionGrid::validate() const {
  if (eps_values.empty()) throw InvalidInput("invasion grid has no eps values");
  for (double e : eps_values) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidInput("eps values must lie strictly inside (0,1)");
  }
  if (!std::is_sorted(eps_values.begin(), eps_values.end())) throw InvalidInput("eps values must be ascending");
  if (!(deviation_resolution > 0.0 && deviation_resolution <= 0.5)) {
    throw InvalidInput("deviation resolution must lie in (0, 0.5]");
  }
}

GeneralProfile to_general(const GroupProfile& q) {
  GeneralProfile out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(ProbabilityVector::from_two_action(q.strategy(i)));
  return out;
}

double oracle_tolerance(const PayoffMatrix& m) { return tolerance_for_scale(m.scale()); }

double deviated_group_utility(std::size_t i, const ProbabilityVector& own, const GeneralProfile& q,
                              const GeneralGroupGame& g) {
  check_general(q, g);
  if (i >= g.num_groups()) throw std::out_of_range("group index out of range");
  double u = 0.0;
  for (std::size_t j = 0; j < g.num_groups(); ++j) {
    u += g.weights[j] * pairwise_payoff(own, j == i ? own : q[j], g.payoff);
  }
  return u;
}

double condition_f(std::size_t i, const ProbabilityVector& p, const GeneralProfile& q, const GeneralGroupGame& g) {
  return g.weights[i] * omega(p, q[i], g.payoff) - deviated_group_utility(i, p, q, g) +
         deviated_group_utility(i, q[i], q, g);
}

Verdict verify_gess_definition(const GeneralProfile& q, const GeneralGroupGame& g, const InvasionGrid& grid) {
  check_general(q, g);
  grid.validate();
  Verdict v;
  v.tolerance = oracle_tolerance(g.payoff);
  v.worst_violation = std::numeric_limits<double>::infinity();
  const double tol = v.tolerance;
  const auto mutants = mutant_set(g.payoff.num_actions(), grid);
  std::vector<double> blend(g.payoff.num_actions());

  for (std::size_t i = 0; i < g.num_groups(); ++i) {
    const OwnUtility utility(i, q, g);
    const auto resident = q[i].values();
    const double u0 = utility(resident);
    for (const auto& p : mutants) {
      if (max_distance(p, resident) < kSameStrategy) continue;
      // Margins are per unit of eps so that the first-order term is comparable to tol.
      std::optional<double> deciding;
      double deciding_eps = grid.eps_values.front();
      double smallest = std::numeric_limits<double>::infinity();
      double barrier = 0.0;
      bool barrier_open = true;
      for (double eps : grid.eps_values) {
        for (std::size_t k = 0; k < blend.size(); ++k) blend[k] = eps * p[k] + (1.0 - eps) * resident[k];
        const double margin = (u0 - utility(blend)) / eps;
        smallest = std::min(smallest, margin);
        if (!deciding && std::abs(margin) >= tol) {
          deciding = margin;
          deciding_eps = eps;
        }
        if (barrier_open) {
          if (margin > -tol) {
            barrier = eps;
          } else {
            barrier_open = false;
          }
        }
      }
      if (!deciding) {
        ++v.equality_count;
        record(v, smallest, i, p, grid.eps_values.front());
        continue;
      }
      record(v, *deciding, i, p, deciding_eps);
      if (*deciding > 0.0) {
        v.min_invasion_barrier = v.min_invasion_barrier ? std::min(*v.min_invasion_barrier, barrier) : barrier;
      }
    }
  }
  if (!std::isfinite(v.worst_violation)) v.worst_violation = 0.0;
  v.passed = v.worst_violation > -tol;
  if (v.passed && v.worst_violation > 0.0 && v.equality_count == 0) {
    // keep the witness only for failures and equalities
    v.witness.reset();
  }
  return v;
}

Verdict verify_gess_definition(const GroupProfile& q, const GroupGame& g, const InvasionGrid& grid) {
  check_profile(q, g);
  return verify_gess_definition(to_general(q), GeneralGroupGame::from(g), grid);
}

Verdict verify_conditions(const GeneralProfile& q, const GeneralGroupGame& g, const InvasionGrid& grid) {
  check_general(q, g);
  grid.validate();
  Verdict v;
  v.tolerance = oracle_tolerance(g.payoff);
  v.worst_violation = std::numeric_limits<double>::infinity();
  const double tol = v.tolerance;
  const auto mutants = mutant_set(g.payoff.num_actions(), grid);

  for (std::size_t i = 0; i < g.num_groups(); ++i) {
    const OwnUtility utility(i, q, g);
    const auto resident = q[i].values();
    const double u0 = utility(resident);
    const double alpha_i = g.weights[i];
    for (const auto& p : mutants) {
      if (max_distance(p, resident) < kSameStrategy) continue;
      const double om = omega_raw(p, resident, g.payoff);
      const double f = alpha_i * om - utility(p) + u0;
      record(v, f, i, p, 1.0);
      if (std::abs(f) <= tol) {
        ++v.equality_count;
        const double curvature = om / squared_distance(p, resident);
        if (!(curvature < -tol)) record(v, -tol - std::max(0.0, curvature), i, p, 1.0);
      }
    }
  }
  if (!std::isfinite(v.worst_violation)) v.worst_violation = 0.0;
  v.passed = v.worst_violation > -tol;
  return v;
}

Verdict verify_conditions(const GroupProfile& q, const GroupGame& g, const InvasionGrid& grid) {
  check_profile(q, g);
  return verify_conditions(to_general(q), GeneralGroupGame::from(g), grid);
}

bool strict_group_nash_check(const GeneralProfile& q, const GeneralGroupGame& g, double resolution) {
  check_general(q, g);
  const double threshold = 1e-12 * std::max(1.0, g.payoff.scale());
  const auto deviations = simplex_grid(g.payoff.num_actions(), resolution);
  for (std::size_t i = 0; i < g.num_groups(); ++i) {
    const OwnUtility utility(i, q, g);
    const auto resident = q[i].values();
    const double u0 = utility(resident);
    for (const auto& p : deviations) {
      if (max_distance(p.values(), resident) < kSameStrategy) continue;
      if (!(u0 - utility(p.values()) > threshold)) return false;
    }
  }
  return true;
}

bool strict_group_nash_check(const GroupProfile& q, const GroupGame& g, double resolution) {
  check_profile(q, g);
  return strict_group_nash_check(to_general(q), GeneralGroupGame::from(g), resolution);
}

std::vector<ProbabilityVector> simplex_grid(std::size_t num_actions, double resolution) {
  if (num_actions == 0) throw InvalidInput("need at least one action");
  if (!(resolution > 0.0 && resolution <= 1.0)) throw InvalidInput("resolution must lie in (0,1]");
  const auto steps = static_cast<int>(std::llround(1.0 / resolution));
  if (steps < 1) throw InvalidInput("resolution too coarse");
  std::vector<ProbabilityVector> out;
  std::vector<int> counts(num_actions, 0);
  // Enumerate compositions of `steps` into num_actions parts.
  auto emit = [&]() {
    std::vector<double> probs(num_actions);
    for (std::size_t k = 0; k < num_actions; ++k) probs[k] = static_cast<double>(counts[k]) / steps;
    // Fix rounding so the components sum to one.
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < num_actions; ++k) rest -= probs[k];
    probs.back() = std::max(0.0, rest);
    out.emplace_back(std::move(probs));
  };
  auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
    if (k + 1 == num_actions) {
      counts[k] = remaining;
      emit();
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[k] = c;
      self(self, k + 1, remaining - c);
    }
  };
  rec(rec, 0, steps);
  return out;
}

std::string describe(const Verdict& v) {
  std::ostringstream os;
  os << (v.passed ? "pass" : "FAIL") << " worst_margin=" << v.worst_violation << " tol=" << v.tolerance
     << " equalities=" << v.equality_count;
  if (v.witness) {
    os << " witness(group=" << v.witness->group + 1 << ", mutant=" << v.witness->mutant.front()
       << ", eps=" << v.witness->eps << ")";
  }
  return os.str();
}

}  // namespace gess
