#ifndef GESS_ORACLE_HPP
#define GESS_ORACLE_HPP

// Definition-level checks of group stability. Nothing in here uses the
// closed-form brackets of the solver; every quantity is assembled from the
// raw pairwise payoff and the group utility.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gess/core.hpp"

namespace gess {

struct InvasionGrid {
  // Mutant shares tested, ascending.
  std::vector<double> eps_values;
  // Spacing of the mutant strategy grid.
  double deviation_resolution = 0.01;
  // Extra mutant strategies (two-action form) probed in addition to the grid.
  std::vector<double> extra_mutants;

  // 20 log-spaced shares from 1e-4 to 0.2, resolution 0.01.
  static InvasionGrid standard();
  static InvasionGrid log_spaced(double eps_min, double eps_max, std::size_t count, double resolution);
  void validate() const;
};

struct Witness {
  std::size_t group = 0;
  std::vector<double> mutant;  // full action distribution
  double eps = 0.0;            // share at which the inequality was decided
};

struct Verdict {
  bool passed = false;
  // Most negative margin found; passed iff worst_violation > -tolerance.
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::optional<Witness> witness;
  // Deviations whose margin vanished within tolerance.
  std::size_t equality_count = 0;
  // Smallest, over mutants that resist, of the largest grid share that still
  // satisfies the invasion inequality.
  std::optional<double> min_invasion_barrier;
};

// Group game over M actions; two-action games embed via PayoffMatrix(PayoffMatrix2).
struct GeneralGroupGame {
  GroupWeights weights;
  PayoffMatrix payoff;

  static GeneralGroupGame from(const GroupGame& g) { return {g.weights, PayoffMatrix(g.payoff)}; }
  std::size_t num_groups() const { return weights.size(); }
};

using GeneralProfile = std::vector<ProbabilityVector>;

GeneralProfile to_general(const GroupProfile& q);

// Vanishing threshold used by the oracle: 1e-7 times the payoff scale.
double oracle_tolerance(const PayoffMatrix& m);

// Group utility with group i's strategy replaced by `own` throughout,
// self interaction included.
double deviated_group_utility(std::size_t i, const ProbabilityVector& own, const GeneralProfile& q,
                              const GeneralGroupGame& g);

// F_i(p_i, q) = alpha_i Omega(p_i,q_i) - U_i(p_i,q_-i) + U_i(q_i,q_-i).
double condition_f(std::size_t i, const ProbabilityVector& p, const GeneralProfile& q, const GeneralGroupGame& g);

// Invasion inequality U_i(eps p + (1-eps) q_i, q_-i) < U_i(q) over the grid.
Verdict verify_gess_definition(const GeneralProfile& q, const GeneralGroupGame& g, const InvasionGrid& grid);
Verdict verify_gess_definition(const GroupProfile& q, const GroupGame& g,
                               const InvasionGrid& grid = InvasionGrid::standard());

// F_i >= 0 over the deviation grid, with Omega < 0 wherever F_i vanishes.
Verdict verify_conditions(const GeneralProfile& q, const GeneralGroupGame& g, const InvasionGrid& grid);
Verdict verify_conditions(const GroupProfile& q, const GroupGame& g,
                          const InvasionGrid& grid = InvasionGrid::standard());

// Whole-group deviations strictly lower every group's utility.
bool strict_group_nash_check(const GeneralProfile& q, const GeneralGroupGame& g, double resolution);
bool strict_group_nash_check(const GroupProfile& q, const GroupGame& g, double resolution = 0.01);

inline constexpr std::size_t kMaxGridSearchGroups = 3;

struct GridSearchResult {
  // One representative per connected cluster of passing grid profiles,
  // in lexicographic order.
  std::vector<GroupProfile> equilibria;
  // All payoffs equal: every profile ties and nothing is stable.
  bool degenerate = false;
};

// Exhaustive search over [0,1]^N at the given resolution, refined locally
// around every cluster. Throws InvalidInput for N > kMaxGridSearchGroups.
GridSearchResult grid_search_equilibria(const GroupGame& g, double resolution = 0.01);

// Enumerates the simplex grid of M actions at the given resolution.
std::vector<ProbabilityVector> simplex_grid(std::size_t num_actions, double resolution);

std::string describe(const Verdict& v);

}  // namespace gess

#endif  // GESS_ORACLE_HPP
