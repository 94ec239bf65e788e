#include "gess/ess_classic.hpp"

#include <cmath>

namespace gess {

namespace {

// J(1,q) - J(0,q): advantage of playing A against q.
double advantage_a(MixedStrategy q, const PayoffMatrix2& m) {
  return pairwise_payoff(MixedStrategy::pure_a(), q, m) - pairwise_payoff(MixedStrategy::pure_b(), q, m);
}

}  // namespace

bool is_nash_symmetric(MixedStrategy q, const PayoffMatrix2& m) {
  const double self = pairwise_payoff(q, q, m);
  const double best_pure = std::max(pairwise_payoff(MixedStrategy::pure_a(), q, m),
                                    pairwise_payoff(MixedStrategy::pure_b(), q, m));
  return self >= best_pure - kEssTolerance;
}

EssReport is_ess(MixedStrategy q, const PayoffMatrix2& m) {
  EssReport report;
  report.candidate = q;
  report.is_nash = is_nash_symmetric(q, m);
  const double x = q.prob_first_action();
  const double adv = advantage_a(q, m);

  if (!report.is_nash) {
    report.witness = adv > 0.0 ? MixedStrategy::pure_a() : MixedStrategy::pure_b();
    return report;
  }

  const bool tied = std::abs(adv) <= kEssTolerance;
  const bool interior = x > 0.0 && x < 1.0;
  if (!tied && !interior) {
    // Unique best reply: strict equilibrium.
    report.is_ess = true;
    report.strict = true;
    return report;
  }

  // Every p is a best reply; J(p,p) - J(q,p) = (p-q)^2 * delta at indifference.
  const double delta = m.delta();
  report.strict = false;
  report.is_ess = delta < -kEssTolerance;
  if (interior) {
    report.witness = MixedStrategy(x < 0.5 ? 1.0 : 0.0);
  } else {
    report.witness = MixedStrategy(1.0 - x);
  }
  return report;
}

std::vector<MixedStrategy> ess_candidates_2x2(const PayoffMatrix2& m) {
  std::vector<MixedStrategy> out{MixedStrategy::pure_b(), MixedStrategy::pure_a()};
  const double delta = m.delta();
  if (delta != 0.0) {
    const double interior = (m.d - m.b) / delta;
    if (interior > 0.0 && interior < 1.0) out.emplace_back(interior);
  }
  return out;
}

std::vector<MixedStrategy> all_ess_2x2(const PayoffMatrix2& m) {
  std::vector<MixedStrategy> out;
  for (const auto& c : ess_candidates_2x2(m)) {
    if (is_ess(c, m).is_ess) out.push_back(c);
  }
  return out;
}

}  // namespace gess
