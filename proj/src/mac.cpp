#include "gess/mac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gess::mac {

namespace {

constexpr double kTol = 1e-9;

void check_index(std::size_t i, const GroupProfile& profile, const MacParams& p) {
  if (profile.size() != p.num_groups()) throw InvalidInput("profile length does not match number of groups");
  if (i >= p.num_groups()) throw std::out_of_range("group index out of range");
}

// 2x2 bilinear form over (T, S).
double bilinear(double x, double y, double tt, double ts, double st, double ss) {
  return x * (y * tt + (1.0 - y) * ts) + (1.0 - x) * (y * st + (1.0 - y) * ss);
}

}  // namespace

MacParams::MacParams(double delta_, double gamma_, double mu_, GroupWeights weights_)
    : delta(delta_), gamma(gamma_), mu(mu_), weights(std::move(weights_)) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("transmission cost delta must lie in (0,1)");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in [0,1)");
  if (!(mu > 0.0 && std::isfinite(mu))) throw InvalidInput("mu must be positive");
}

std::string to_string(MacKind kind) {
  switch (kind) {
    case MacKind::Strong:
      return "strong";
    case MacKind::Weak:
      return "weak";
    case MacKind::FullyMixed:
      return "fully_mixed";
    case MacKind::PureMixed:
      return "pure_mixed";
  }
  return "?";
}

double intra_payoff(double q, const MacParams& p) {
  return p.mu * q * ((1.0 - p.delta) * (2.0 - p.gamma) - 2.0 * (1.0 - p.gamma) * q);
}

double inter_payoff(double qi, double qj, const MacParams& p) {
  return p.mu * qi * (1.0 - p.delta - (1.0 - p.gamma) * qj);
}

double intra_payoff_from_matrix(double q_own, double q_other, const MacParams& p) {
  const double d = p.delta;
  const double paired = bilinear(q_own, q_other, -2.0 * d, 1.0 - d, 1.0 - d, 0.0);
  return p.mu * (p.gamma * q_own * (1.0 - d) + (1.0 - p.gamma) * paired);
}

double inter_payoff_from_matrix(double qi, double qj, const MacParams& p) {
  const double d = p.delta;
  const double paired = bilinear(qi, qj, -d, 1.0 - d, 0.0, 0.0);
  return p.mu * (p.gamma * qi * (1.0 - d) + (1.0 - p.gamma) * paired);
}

double mac_group_throughput(std::size_t i, const GroupProfile& profile, const MacParams& p) {
  check_index(i, profile, p);
  const double y = aggregate(profile, p.weights);
  const double qi = profile[i];
  return p.mu * qi * (1.0 - p.delta + (1.0 - p.gamma) * (p.weights[i] * (1.0 - p.delta - qi) - y));
}

double mac_group_throughput_pairwise(std::size_t i, const GroupProfile& profile, const MacParams& p) {
  check_index(i, profile, p);
  double u = p.weights[i] * intra_payoff(profile[i], p);
  for (std::size_t j = 0; j < p.num_groups(); ++j) {
    if (j != i) u += p.weights[j] * inter_payoff(profile[i], profile[j], p);
  }
  return u;
}

double mac_bracket(std::size_t i, const GroupProfile& profile, const MacParams& p) {
  check_index(i, profile, p);
  const double y = aggregate(profile, p.weights);
  return 1.0 - p.delta + (1.0 - p.gamma) * (p.weights[i] * (1.0 - p.delta - 2.0 * profile[i]) - y);
}

double mac_fprime(std::size_t i, double deviation, const GroupProfile& profile, const MacParams& p) {
  return (profile[i] - deviation) * mac_bracket(i, profile, p);
}

MacThresholds mac_thresholds(const MacParams& p) {
  const auto n = static_cast<double>(p.num_groups());
  const double d = p.delta;
  MacThresholds t;
  t.gamma_under_closed_form = std::numeric_limits<double>::infinity();
  t.gamma_under_numeric = std::numeric_limits<double>::infinity();
  t.gamma_bar = -std::numeric_limits<double>::infinity();
  for (double a : p.weights.values()) {
    const double k = a * (n + 2.0) * (1.0 + d);
    t.gamma_under_closed_form = std::min(t.gamma_under_closed_form, (k - (1.0 - d)) / (k + (1.0 + d)));
    // q_i* < 1  <=>  gamma < (k - (1-delta)) / (k + (1-delta)); q_i* > 0 always.
    t.gamma_under_numeric = std::min(t.gamma_under_numeric, (k - (1.0 - d)) / (k + (1.0 - d)));
    t.gamma_bar = std::max(t.gamma_bar, 1.0 - (1.0 - d) / (a * (1.0 + d) + 1.0));
  }
  return t;
}

double mac_fully_mixed_aggregate(const MacParams& p) {
  const auto n = static_cast<double>(p.num_groups());
  return (1.0 - p.delta) * (n + 1.0 - p.gamma) / ((1.0 - p.gamma) * (n + 2.0));
}

std::optional<GroupProfile> mac_fully_mixed(const MacParams& p) {
  if (!(p.gamma < 1.0)) return std::nullopt;
  const auto n = static_cast<double>(p.num_groups());
  const double d = p.delta;
  const double g = p.gamma;
  std::vector<double> q(p.num_groups());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a = p.weights[i];
    q[i] = (1.0 - d) * (1.0 + g + (1.0 - g) * (n + 2.0) * a) / (2.0 * (n + 2.0) * (1.0 - g) * a);
    if (!(q[i] > 0.0 && q[i] < 1.0)) return std::nullopt;
  }
  return GroupProfile(q);
}

std::optional<MacEquilibrium> mac_support_solve(const MacParams& p, const SupportProfile& s) {
  const std::size_t n = p.num_groups();
  if (s.size() != n) throw InvalidInput("support length does not match number of groups");
  const double d = p.delta;
  const double g = p.gamma;
  double share_t = 0.0;
  double share_m = 0.0;
  std::size_t mixers = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (s[j] == SupportLabel::PureA) share_t += p.weights[j];
    if (s[j] == SupportLabel::Mixer) {
      share_m += p.weights[j];
      ++mixers;
    }
  }
  const auto k = static_cast<double>(mixers);
  // Summing the mixer indifference equations over the mixer set.
  const double y = (2.0 * (1.0 - g) * share_t + k * (1.0 - d) + (1.0 - g) * (1.0 - d) * share_m) /
                   ((1.0 - g) * (k + 2.0));
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (s[i]) {
      case SupportLabel::PureA:
        q[i] = 1.0;
        break;
      case SupportLabel::PureB:
        q[i] = 0.0;
        break;
      case SupportLabel::Mixer: {
        const double a = p.weights[i];
        q[i] = (1.0 - d + (1.0 - g) * (a * (1.0 - d) - y)) / (2.0 * (1.0 - g) * a);
        if (!(q[i] > 0.0 && q[i] < 1.0)) return std::nullopt;
        break;
      }
    }
  }
  MacEquilibrium eq;
  eq.profile = GroupProfile(q);
  eq.support = s;
  bool boundary = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = mac_bracket(i, eq.profile, p);
    eq.brackets.push_back(b);
    if (s[i] == SupportLabel::PureA) {
      if (b < -kTol) return std::nullopt;
      if (b <= kTol) boundary = true;
    } else if (s[i] == SupportLabel::PureB) {
      if (b > kTol) return std::nullopt;
      if (b >= -kTol) boundary = true;
    }
  }
  if (mixers == n) {
    eq.kind = MacKind::FullyMixed;
  } else if (mixers > 0) {
    eq.kind = MacKind::PureMixed;
  } else {
    eq.kind = boundary ? MacKind::Weak : MacKind::Strong;
  }
  eq.thresholds = mac_thresholds(p);
  eq.success_prob = success_probability(eq.profile, p);
  eq.fprime_margin = mac_fprime_margin(eq.profile, p);
  return eq;
}

std::vector<MacEquilibrium> mac_find_gess(const MacParams& p, bool prune) {
  const std::size_t n = p.num_groups();
  if (n > kMaxSolverGroups) throw InvalidInput("MAC support enumeration supports at most 12 groups");
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  std::vector<MacEquilibrium> out;
  SupportProfile s(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t i = n; i-- > 0;) {
      s[i] = static_cast<SupportLabel>(rest % 3);
      rest /= 3;
    }
    if (prune) {
      // A transmitting group forces every group no larger to transmit; a
      // silent group forces every group no larger to stay silent.
      bool consistent = true;
      for (std::size_t i = 0; i < n && consistent; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || p.weights[i] > p.weights[j]) continue;
          if (s[j] != SupportLabel::Mixer && s[i] != s[j]) {
            consistent = false;
            break;
          }
        }
      }
      if (!consistent) continue;
    }
    if (auto eq = mac_support_solve(p, s)) out.push_back(std::move(*eq));
  }
  return out;
}

double mac_fprime_margin(const GroupProfile& profile, const MacParams& p, double resolution) {
  const auto steps = static_cast<int>(std::llround(1.0 / resolution));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.num_groups(); ++i) {
    const double b = mac_bracket(i, profile, p);
    for (int k = 0; k <= steps; ++k) {
      const double dev = static_cast<double>(k) / steps;
      if (std::abs(dev - profile[i]) < 1e-12) continue;
      worst = std::min(worst, (profile[i] - dev) * b);
    }
  }
  return std::isfinite(worst) ? worst : 0.0;
}

double success_probability(const GroupProfile& profile, const MacParams& p) {
  if (profile.size() != p.num_groups()) throw InvalidInput("profile length does not match number of groups");
  if (p.num_groups() != 2) return success_probability_enumerated(profile, p);
  const double a = p.weights[0];
  const double p1 = profile[0];
  const double p2 = profile[1];
  const double g = p.gamma;
  return p.mu * (g * (a * p1 + (1.0 - a) * p2) +
                 (1.0 - g) * (2.0 * a * a * p1 * (1.0 - p1) + a * (1.0 - a) * ((1.0 - p2) * p1 + (1.0 - p1) * p2) +
                              2.0 * (1.0 - a) * (1.0 - a) * p2 * (1.0 - p2)));
}

double success_probability_enumerated(const GroupProfile& profile, const MacParams& p) {
  if (profile.size() != p.num_groups()) throw InvalidInput("profile length does not match number of groups");
  const std::size_t n = p.num_groups();
  double alone = 0.0;
  double paired = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = p.weights[i];
    const double pi = profile[i];
    alone += ai * pi;
    // Same-group pair: exactly one of the two transmits.
    paired += 2.0 * ai * ai * pi * (1.0 - pi);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pj = profile[j];
      paired += ai * p.weights[j] * (pi * (1.0 - pj) + (1.0 - pi) * pj);
    }
  }
  return p.mu * (p.gamma * alone + (1.0 - p.gamma) * paired);
}

double standard_reference_strategy(const MacParams& p) {
  return std::min(1.0, (1.0 - p.delta) / (1.0 - p.gamma));
}

}  // namespace gess::mac
