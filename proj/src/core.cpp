#include "gess/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gess {

namespace {

constexpr double kSumTolerance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

MixedStrategy::MixedStrategy(double prob_first_action) : p_(prob_first_action) {
  require(std::isfinite(p_) && p_ >= 0.0 && p_ <= 1.0,
          "mixed strategy probability must lie in [0,1], got " + std::to_string(p_));
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  require(!probs_.empty(), "probability vector must be non-empty");
  for (double x : probs_) {
    require(std::isfinite(x) && x >= 0.0 && x <= 1.0, "probability components must lie in [0,1]");
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  require(std::abs(total - 1.0) <= kSumTolerance, "probability vector must sum to 1");
}

ProbabilityVector ProbabilityVector::from_two_action(MixedStrategy s) {
  const double p = s.prob_first_action();
  return ProbabilityVector({p, 1.0 - p});
}

ProbabilityVector ProbabilityVector::pure(std::size_t action, std::size_t num_actions) {
  require(action < num_actions, "pure action index out of range");
  std::vector<double> v(num_actions, 0.0);
  v[action] = 1.0;
  return ProbabilityVector(std::move(v));
}

PayoffMatrix2::PayoffMatrix2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d),
          "payoff entries must be finite");
}

double PayoffMatrix2::scale() const {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

PayoffMatrix2 PayoffMatrix2::affine(double s, double t) const {
  return PayoffMatrix2(s * a + t, s * b + t, s * c + t, s * d + t);
}

PayoffMatrix2 PayoffMatrix2::hawk_dove(double value, double cost) {
  return PayoffMatrix2(0.5 * (value - cost), value, 0.0, 0.5 * value);
}

PayoffMatrix2 PayoffMatrix2::stag_hunt() { return PayoffMatrix2(2.0, 0.0, 1.0, 1.0); }

PayoffMatrix2 PayoffMatrix2::prisoners_dilemma() { return PayoffMatrix2(2.0, 0.0, 3.0, 1.0); }

PayoffMatrix::PayoffMatrix(std::size_t num_actions, std::vector<double> entries)
    : m_(num_actions), entries_(std::move(entries)) {
  require(m_ > 0 && entries_.size() == m_ * m_, "payoff matrix must be square and non-empty");
  for (double x : entries_) require(std::isfinite(x), "payoff entries must be finite");
}

PayoffMatrix::PayoffMatrix(const PayoffMatrix2& m) : m_(2), entries_{m.a, m.b, m.c, m.d} {}

double PayoffMatrix::scale() const {
  double s = 0.0;
  for (double x : entries_) s = std::max(s, std::abs(x));
  return s;
}

GroupWeights::GroupWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  require(!alpha_.empty(), "at least one group is required");
  for (double a : alpha_) {
    require(std::isfinite(a) && a > 0.0, "group weights must be strictly positive");
  }
  const double total = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
  require(std::abs(total - 1.0) <= kSumTolerance,
          "group weights must sum to 1 (got " + std::to_string(total) + ")");
}

GroupProfile::GroupProfile(const std::vector<double>& q) {
  q_.reserve(q.size());
  for (double x : q) q_.emplace_back(x);
}

std::vector<double> GroupProfile::probabilities() const {
  std::vector<double> out;
  out.reserve(q_.size());
  for (const auto& s : q_) out.push_back(s.prob_first_action());
  return out;
}

GroupProfile GroupProfile::with(std::size_t i, MixedStrategy s) const {
  GroupProfile copy = *this;
  copy.q_.at(i) = s;
  return copy;
}

void check_profile(const GroupProfile& profile, const GroupGame& g) {
  require(profile.size() == g.num_groups(), "profile length " + std::to_string(profile.size()) +
                                                " does not match " + std::to_string(g.num_groups()) +
                                                " groups");
}

double pairwise_payoff(MixedStrategy p, MixedStrategy q, const PayoffMatrix2& m) {
  const double x = p.prob_first_action();
  const double y = q.prob_first_action();
  return x * (y * m.a + (1.0 - y) * m.b) + (1.0 - x) * (y * m.c + (1.0 - y) * m.d);
}

double pairwise_payoff(const ProbabilityVector& p, const ProbabilityVector& q, const PayoffMatrix& m) {
  require(p.size() == m.num_actions() && q.size() == m.num_actions(),
          "strategy dimension does not match payoff matrix");
  double total = 0.0;
  for (std::size_t r = 0; r < m.num_actions(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < m.num_actions(); ++c) row += m(r, c) * q[c];
    total += p[r] * row;
  }
  return total;
}

double group_utility(std::size_t i, const GroupProfile& profile, const GroupGame& g) {
  check_profile(profile, g);
  if (i >= g.num_groups()) throw std::out_of_range("group index out of range");
  double u = 0.0;
  for (std::size_t j = 0; j < g.num_groups(); ++j) {
    u += g.weights[j] * pairwise_payoff(profile.strategy(i), profile.strategy(j), g.payoff);
  }
  return u;
}

double omega(MixedStrategy p, MixedStrategy q, const PayoffMatrix2& m) {
  return pairwise_payoff(p, p, m) - pairwise_payoff(p, q, m) - pairwise_payoff(q, p, m) +
         pairwise_payoff(q, q, m);
}

double omega(const ProbabilityVector& p, const ProbabilityVector& q, const PayoffMatrix& m) {
  return pairwise_payoff(p, p, m) - pairwise_payoff(p, q, m) - pairwise_payoff(q, p, m) +
         pairwise_payoff(q, q, m);
}

double post_mutation_utility(std::size_t i, MixedStrategy mutant, const GroupProfile& profile,
                             double eps, const GroupGame& g) {
  // eps == 1 is admitted: the whole group adopts the mutant.
  if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("eps must lie in (0,1]");
  const double resident = group_utility(i, profile, g);
  const MixedStrategy& qi = profile.strategy(i);
  const auto& m = g.payoff;
  const double alpha_i = g.weights[i];

  double linear = alpha_i * (pairwise_payoff(mutant, qi, m) + pairwise_payoff(qi, mutant, m) -
                             2.0 * pairwise_payoff(qi, qi, m));
  for (std::size_t j = 0; j < g.num_groups(); ++j) {
    if (j == i) continue;
    linear += g.weights[j] *
              (pairwise_payoff(mutant, profile.strategy(j), m) - pairwise_payoff(qi, profile.strategy(j), m));
  }
  return resident + eps * linear + eps * eps * alpha_i * omega(mutant, qi, m);
}

double aggregate(const GroupProfile& profile, const GroupWeights& w) {
  if (profile.size() != w.size()) throw InvalidInput("profile and weights differ in length");
  double y = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) y += w[j] * profile[j];
  return y;
}

std::string to_string(const GroupProfile& profile) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) os << ", ";
    os << profile[i];
  }
  os << ')';
  return os.str();
}

}  // namespace gess
