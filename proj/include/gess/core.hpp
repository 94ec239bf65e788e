#ifndef GESS_CORE_HPP
#define GESS_CORE_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gess {

// Base of every error thrown by the library.
class GessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented invariant (bad probabilities, weights, ...).
class InvalidInput : public GessError {
 public:
  using GessError::GessError;
};

// Game is outside the domain of the requested analysis.
class DegenerateGame : public GessError {
 public:
  using GessError::GessError;
};

// Probability of the first action (A) of a two-action game.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  explicit MixedStrategy(double prob_first_action);

  double prob_first_action() const { return p_; }
  double operator()() const { return p_; }

  static MixedStrategy pure_a() { return MixedStrategy(1.0); }
  static MixedStrategy pure_b() { return MixedStrategy(0.0); }

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  double p_ = 0.0;
};

// General mixed strategy over M actions.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> probs);
  static ProbabilityVector from_two_action(MixedStrategy s);
  static ProbabilityVector pure(std::size_t action, std::size_t num_actions);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> values() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// 2x2 payoff of the row player, rows/columns ordered A then B.
struct PayoffMatrix2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  PayoffMatrix2() = default;
  PayoffMatrix2(double a_, double b_, double c_, double d_);

  double delta() const { return a - b - c + d; }
  // max(|a|,|b|,|c|,|d|)
  double scale() const;
  PayoffMatrix2 affine(double s, double t) const;

  static PayoffMatrix2 hawk_dove(double value, double cost);
  static PayoffMatrix2 stag_hunt();
  static PayoffMatrix2 prisoners_dilemma();
};

// Square payoff matrix over M actions, row-major.
class PayoffMatrix {
 public:
  PayoffMatrix(std::size_t num_actions, std::vector<double> entries);
  explicit PayoffMatrix(const PayoffMatrix2& m);

  std::size_t num_actions() const { return m_; }
  double operator()(std::size_t row, std::size_t col) const { return entries_[row * m_ + col]; }
  double scale() const;

 private:
  std::size_t m_;
  std::vector<double> entries_;
};

class GroupWeights {
 public:
  explicit GroupWeights(std::vector<double> alpha);
  GroupWeights(std::initializer_list<double> alpha) : GroupWeights(std::vector<double>(alpha)) {}

  std::size_t size() const { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_[i]; }
  std::span<const double> values() const { return alpha_; }

 private:
  std::vector<double> alpha_;
};

struct GroupGame {
  GroupWeights weights;
  PayoffMatrix2 payoff;

  std::size_t num_groups() const { return weights.size(); }
};

// One two-action mixed strategy per group.
class GroupProfile {
 public:
  GroupProfile() = default;
  explicit GroupProfile(std::vector<MixedStrategy> q) : q_(std::move(q)) {}
  explicit GroupProfile(const std::vector<double>& q);
  GroupProfile(std::initializer_list<double> q) : GroupProfile(std::vector<double>(q)) {}

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i].prob_first_action(); }
  const MixedStrategy& strategy(std::size_t i) const { return q_[i]; }
  std::vector<double> probabilities() const;

  // Copy with group i replaced.
  GroupProfile with(std::size_t i, MixedStrategy s) const;

  friend bool operator==(const GroupProfile&, const GroupProfile&) = default;

 private:
  std::vector<MixedStrategy> q_;
};

// Throws InvalidInput unless profile length matches the number of groups.
void check_profile(const GroupProfile& profile, const GroupGame& g);

// Bilinear payoff p'Aq of the two-action game.
double pairwise_payoff(MixedStrategy p, MixedStrategy q, const PayoffMatrix2& m);
double pairwise_payoff(const ProbabilityVector& p, const ProbabilityVector& q, const PayoffMatrix& m);

// Sum_j alpha_j J(q_i, q_j), self term included.
double group_utility(std::size_t i, const GroupProfile& profile, const GroupGame& g);

// J(p,p) - J(p,q) - J(q,p) + J(q,q).
double omega(MixedStrategy p, MixedStrategy q, const PayoffMatrix2& m);
double omega(const ProbabilityVector& p, const ProbabilityVector& q, const PayoffMatrix& m);

// Utility of group i after a fraction eps of it switches to `mutant`,
// computed from the quadratic-in-eps expansion around the resident profile.
double post_mutation_utility(std::size_t i, MixedStrategy mutant, const GroupProfile& profile,
                             double eps, const GroupGame& g);

// Population share of the first action, sum_i alpha_i q_i.
double aggregate(const GroupProfile& profile, const GroupWeights& w);

std::string to_string(const GroupProfile& profile);

}  // namespace gess

#endif  // GESS_CORE_HPP
