#ifndef GESS_MAC_HPP
#define GESS_MAC_HPP

// Slotted-Aloha game between groups. Each mobile transmits (T) with the
// probability stored in the profile, otherwise stays silent (S). Same-group
// and cross-group encounters use different payoff matrices.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gess/core.hpp"
#include "gess/solver.hpp"

namespace gess::mac {

struct MacParams {
  double delta = 0.2;  // transmission cost, in (0,1)
  double gamma = 0.0;  // probability a mobile is alone, in [0,1)
  double mu = 1.0;     // probability the receiver is in range, > 0
  GroupWeights weights{1.0};

  MacParams(double delta_, double gamma_, double mu_, GroupWeights weights_);
  std::size_t num_groups() const { return weights.size(); }
};

enum class MacKind { Strong, Weak, FullyMixed, PureMixed };
std::string to_string(MacKind kind);

struct MacThresholds {
  double gamma_under_closed_form = 0.0;    // lower threshold from its closed form
  double gamma_under_numeric = 0.0;  // exact upper end of the fully mixed window
  double gamma_bar = 0.0;            // all-T threshold
};

struct MacEquilibrium {
  GroupProfile profile;  // per-group transmit probability
  MacKind kind = MacKind::Strong;
  SupportProfile support;  // PureA = T, PureB = S
  MacThresholds thresholds;
  double success_prob = 0.0;
  std::vector<double> brackets;
  double fprime_margin = 0.0;  // worst F' over the deviation grid
};

// Same-group expected payoff K(q,q).
double intra_payoff(double q, const MacParams& p);
// Cross-group expected payoff J(q_i,q_j).
double inter_payoff(double qi, double qj, const MacParams& p);

// The same two payoffs assembled from the matrices P1 (same group) and
// P2 (other group), the alone probability gamma, and the range probability mu.
double intra_payoff_from_matrix(double q_own, double q_other, const MacParams& p);
double inter_payoff_from_matrix(double qi, double qj, const MacParams& p);

// Closed-form group throughput.
double mac_group_throughput(std::size_t i, const GroupProfile& profile, const MacParams& p);
// alpha_i K(q_i,q_i) + sum_{j != i} alpha_j J(q_i,q_j).
double mac_group_throughput_pairwise(std::size_t i, const GroupProfile& profile, const MacParams& p);

// F'_i(p_i, q) = (q_i - p_i) * mac_bracket(i, q).
double mac_bracket(std::size_t i, const GroupProfile& profile, const MacParams& p);
double mac_fprime(std::size_t i, double deviation, const GroupProfile& profile, const MacParams& p);

MacThresholds mac_thresholds(const MacParams& p);

std::optional<GroupProfile> mac_fully_mixed(const MacParams& p);

// Aggregate transmit rate of the fully mixed profile in closed form.
double mac_fully_mixed_aggregate(const MacParams& p);

// Solves one support; nullopt if the mixer values leave (0,1) or a pure
// group's bracket has the wrong sign.
std::optional<MacEquilibrium> mac_support_solve(const MacParams& p, const SupportProfile& s);

// Enumerates supports, skipping those that contradict the ordering of
// transmitting and silent groups by size when `prune` is set.
std::vector<MacEquilibrium> mac_find_gess(const MacParams& p, bool prune = true);

// Minimum of F'_i over groups and a deviation grid of the given resolution.
double mac_fprime_margin(const GroupProfile& profile, const MacParams& p, double resolution = 0.01);

double success_probability(const GroupProfile& profile, const MacParams& p);
// Pair-type enumeration valid for any N; matches the two-group closed form.
double success_probability_enumerated(const GroupProfile& profile, const MacParams& p);

// min(1, (1-delta)/(1-gamma)).
double standard_reference_strategy(const MacParams& p);

}  // namespace gess::mac

#endif  // GESS_MAC_HPP
