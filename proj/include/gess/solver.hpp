#ifndef GESS_SOLVER_HPP
#define GESS_SOLVER_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gess/core.hpp"
#include "gess/oracle.hpp"

namespace gess {

enum class SupportLabel { PureA, PureB, Mixer };

using SupportProfile = std::vector<SupportLabel>;

enum class GessKind { Strong, Weak, FullyMixed };

std::string to_string(SupportLabel label);
std::string to_string(GessKind kind);
std::string to_string(const SupportProfile& s);

// Closed-form quantities carried alongside a result for comparison with the
// algebra they came from.
struct GessDiagnostics {
  double aggregate = 0.0;  // y = sum_j alpha_j q_j
  // All-pure profiles: H = sum_{A} alpha_j (a-c) + sum_{B} alpha_j (b-d) and the
  // verdict of the printed interval test alpha_i(d-c) > H > alpha_i(b-a) for every group.
  std::optional<double> h_value;
  std::optional<bool> printed_interval_test;
  // Mixed supports: the aggregate as stated in closed form and as derived by
  // summing the mixer indifference equations.
  std::optional<double> y_stated;
  std::optional<double> y_derived;
  bool boundary = false;  // some bracket is zero within tolerance
};

struct GessResult {
  GroupProfile profile;
  GessKind kind = GessKind::Strong;
  SupportProfile support;
  std::vector<double> brackets;
  double delta = 0.0;
  std::optional<Verdict> oracle_verdict;
  GessDiagnostics diagnostics;
  std::vector<std::string> notes;
};

inline constexpr double kBracketTolerance = 1e-9;
inline constexpr std::size_t kMaxSolverGroups = 12;

// Raised when the mixer subsystem cannot be solved.
class SingularSubsystem : public GessError {
 public:
  using GessError::GessError;
};

// B_i(q) = alpha_i (J(q_i,1) - J(q_i,0)) + sum_j alpha_j (J(1,q_j) - J(0,q_j)),
// so that F_i(p_i, q) = (q_i - p_i) B_i(q).
double bracket(std::size_t i, const GroupProfile& profile, const GroupGame& g);
std::vector<double> brackets(const GroupProfile& profile, const GroupGame& g);

// Unique interior profile zeroing every bracket, when delta < 0 and it lies in (0,1)^N.
std::optional<GroupProfile> fully_mixed_gess(const GroupGame& g);

// All-pure profiles with every bracket strictly of the sign its label needs.
// Throws DegenerateGame when a == c and b == d.
std::vector<GessResult> strong_gess_all(const GroupGame& g, double tol = kBracketTolerance);

// All-pure GESS including boundary ones with a vanishing bracket (delta < 0).
std::vector<GessResult> pure_gess_all(const GroupGame& g, double tol = kBracketTolerance);

// Solves the mixer indifference system for a support with at least one Mixer.
std::optional<GessResult> mixed_support_solve(const GroupGame& g, const SupportProfile& s,
                                              double tol = kBracketTolerance);

// Every GESS over all 3^N supports, deduplicated, in lexicographic order of
// (support, profile).
std::vector<GessResult> find_all_gess(const GroupGame& g, double tol = kBracketTolerance);

}  // namespace gess

#endif  // GESS_SOLVER_HPP
