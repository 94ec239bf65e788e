#include "gess/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gess {

namespace {

double delta_tolerance(const PayoffMatrix2& m, double tol) { return tol * std::max(1.0, m.scale()); }

bool is_degenerate(const PayoffMatrix2& m) {
  const double eps = 1e-12 * std::max(1.0, m.scale());
  return std::abs(m.a - m.c) <= eps && std::abs(m.b - m.d) <= eps;
}

// Checks the sign each bracket needs for its label. Mixer brackets must vanish.
// Returns false if some condition fails; sets boundary when an equality binds.
bool signs_admissible(const SupportProfile& s, const std::vector<double>& b, double tol, bool& boundary) {
  boundary = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    switch (s[i]) {
      case SupportLabel::PureA:
        if (b[i] < -tol) return false;
        if (b[i] <= tol) boundary = true;
        break;
      case SupportLabel::PureB:
        if (b[i] > tol) return false;
        if (b[i] >= -tol) boundary = true;
        break;
      case SupportLabel::Mixer:
        break;
    }
  }
  return true;
}

GroupProfile pure_profile(const SupportProfile& s) {
  std::vector<double> q(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) q[i] = s[i] == SupportLabel::PureA ? 1.0 : 0.0;
  return GroupProfile(q);
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void fill_pure_diagnostics(const GroupGame& g, const SupportProfile& s, GessResult& r) {
  const auto& m = g.payoff;
  const std::size_t n = g.num_groups();
  double h = 0.0;
  double alpha_max = 0.0;
  double alpha_min = 1.0;
  std::size_t n_a = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a_j = g.weights[j];
    alpha_max = std::max(alpha_max, a_j);
    alpha_min = std::min(alpha_min, a_j);
    if (s[j] == SupportLabel::PureA) {
      h += a_j * (m.a - m.c);
      ++n_a;
    } else {
      h += a_j * (m.b - m.d);
    }
  }
  r.diagnostics.h_value = h;
  bool printed = true;
  if (n_a == n) {
    printed = m.a - m.c > alpha_max * (m.b - m.a);
  } else if (n_a == 0) {
    printed = m.b - m.d < alpha_min * (m.d - m.c);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double a_i = g.weights[i];
      if (!(a_i * (m.d - m.c) > h && h > a_i * (m.b - m.a))) printed = false;
    }
  }
  r.diagnostics.printed_interval_test = printed;
  const bool direct = r.kind == GessKind::Strong;
  if (printed != direct) {
    r.notes.push_back(std::string("printed strong-GESS condition says ") + (printed ? "yes" : "no") +
                      ", direct sign test says " + (direct ? "yes" : "no"));
  }
}

bool lexicographic_less(const GessResult& x, const GessResult& y) {
  if (x.support != y.support) return x.support < y.support;
  return x.profile.probabilities() < y.profile.probabilities();
}

}  // namespace

std::string to_string(SupportLabel label) {
  switch (label) {
    case SupportLabel::PureA:
      return "A";
    case SupportLabel::PureB:
      return "B";
    case SupportLabel::Mixer:
      return "M";
  }
  return "?";
}

std::string to_string(GessKind kind) {
  switch (kind) {
    case GessKind::Strong:
      return "strong";
    case GessKind::Weak:
      return "weak";
    case GessKind::FullyMixed:
      return "fully_mixed";
  }
  return "?";
}

std::string to_string(const SupportProfile& s) {
  std::string out;
  for (auto l : s) out += to_string(l);
  return out;
}

double bracket(std::size_t i, const GroupProfile& profile, const GroupGame& g) {
  check_profile(profile, g);
  if (i >= g.num_groups()) throw std::out_of_range("group index out of range");
  const auto& m = g.payoff;
  const auto one = MixedStrategy::pure_a();
  const auto zero = MixedStrategy::pure_b();
  const auto& qi = profile.strategy(i);
  double b = g.weights[i] * (pairwise_payoff(qi, one, m) - pairwise_payoff(qi, zero, m));
  for (std::size_t j = 0; j < g.num_groups(); ++j) {
    const auto& qj = profile.strategy(j);
    b += g.weights[j] * (pairwise_payoff(one, qj, m) - pairwise_payoff(zero, qj, m));
  }
  return b;
}

std::vector<double> brackets(const GroupProfile& profile, const GroupGame& g) {
  std::vector<double> out(g.num_groups());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bracket(i, profile, g);
  return out;
}

std::optional<GroupProfile> fully_mixed_gess(const GroupGame& g) {
  const auto& m = g.payoff;
  const double delta = m.delta();
  if (!(delta < -delta_tolerance(m, kBracketTolerance))) return std::nullopt;
  const auto n = static_cast<double>(g.num_groups());
  std::vector<double> q(g.num_groups());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a_i = g.weights[i];
    q[i] = (m.d - m.b + ((1.0 + n) * a_i - 1.0) * (m.d - m.c)) / ((n + 1.0) * a_i * delta);
    if (!(q[i] > 0.0 && q[i] < 1.0)) return std::nullopt;
  }
  return GroupProfile(q);
}

std::vector<GessResult> pure_gess_all(const GroupGame& g, double tol) {
  if (is_degenerate(g.payoff)) {
    throw DegenerateGame("a == c and b == d: pure conditions do not separate strategies");
  }
  const std::size_t n = g.num_groups();
  if (n > 20) throw InvalidInput("pure enumeration supports at most 20 groups");
  const double delta = g.payoff.delta();
  const bool curvature_ok = delta < -delta_tolerance(g.payoff, tol);
  std::vector<GessResult> out;
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < total; ++mask) {
    SupportProfile s(n);
    // Bit set means B; mask 0 is all-A, which keeps A-first ordering.
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = (mask >> (n - 1 - i)) & 1U ? SupportLabel::PureB : SupportLabel::PureA;
    }
    GessResult r;
    r.profile = pure_profile(s);
    r.support = s;
    r.brackets = brackets(r.profile, g);
    r.delta = delta;
    bool boundary = false;
    if (!signs_admissible(s, r.brackets, tol, boundary)) continue;
    if (boundary && !curvature_ok) continue;
    r.kind = boundary ? GessKind::Weak : GessKind::Strong;
    r.diagnostics.aggregate = aggregate(r.profile, g.weights);
    r.diagnostics.boundary = boundary;
    if (boundary) r.notes.emplace_back("boundary");
    fill_pure_diagnostics(g, s, r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GessResult> strong_gess_all(const GroupGame& g, double tol) {
  auto all = pure_gess_all(g, tol);
  std::erase_if(all, [](const GessResult& r) { return r.kind != GessKind::Strong; });
  return all;
}

std::optional<GessResult> mixed_support_solve(const GroupGame& g, const SupportProfile& s, double tol) {
  const std::size_t n = g.num_groups();
  if (s.size() != n) throw InvalidInput("support length does not match number of groups");
  const auto mixers = static_cast<std::size_t>(std::count(s.begin(), s.end(), SupportLabel::Mixer));
  if (mixers == 0) throw InvalidInput("support needs at least one mixer group");

  const auto& m = g.payoff;
  const double delta = m.delta();
  // A mixer makes F vanish off the equilibrium, which needs delta < 0.
  if (!(delta < -delta_tolerance(m, tol))) return std::nullopt;

  double share_a = 0.0;
  double share_m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (s[j] == SupportLabel::PureA) share_a += g.weights[j];
    if (s[j] == SupportLabel::Mixer) share_m += g.weights[j];
  }
  const auto k = static_cast<double>(mixers);
  // Summing alpha_i delta q_i + b - d + alpha_i (c - d) + delta y = 0 over mixers.
  const double y = (k * (m.d - m.b) + (m.d - m.c) * share_m + delta * share_a) / (delta * (k + 1.0));
  const double y_stated = (k * (m.d - m.b - share_a) + (m.d - m.c) * share_m) / (delta * (k + 1.0));

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
        const double a_i = g.weights[i];
        q[i] = (m.d - m.b + a_i * (m.d - m.c) - y * delta) / (delta * a_i);
        if (!(q[i] > 0.0 && q[i] < 1.0)) return std::nullopt;
        break;
      }
    }
  }

  GessResult r;
  r.profile = GroupProfile(q);
  r.support = s;
  r.delta = delta;
  r.brackets = brackets(r.profile, g);
  const double residual_tol = 1e-6 * std::max(1.0, m.scale());
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] == SupportLabel::Mixer && std::abs(r.brackets[i]) > residual_tol) {
      throw SingularSubsystem("mixer system for support " + to_string(s) + " left bracket " +
                              format_double(r.brackets[i]) + " for group " + std::to_string(i + 1));
    }
  }
  bool boundary = false;
  if (!signs_admissible(s, r.brackets, tol, boundary)) return std::nullopt;
  r.kind = mixers == n ? GessKind::FullyMixed : GessKind::Weak;
  r.diagnostics.aggregate = aggregate(r.profile, g.weights);
  r.diagnostics.y_derived = y;
  r.diagnostics.y_stated = y_stated;
  r.diagnostics.boundary = boundary;
  if (boundary) r.notes.emplace_back("boundary");
  if (std::abs(y_stated - y) > 1e-9) {
    r.notes.push_back("stated aggregate formula gives y=" + format_double(y_stated) + ", derived y=" +
                      format_double(y));
  }
  return r;
}

std::vector<GessResult> find_all_gess(const GroupGame& g, double tol) {
  const std::size_t n = g.num_groups();
  if (n > kMaxSolverGroups) {
    throw InvalidInput("support enumeration supports at most " + std::to_string(kMaxSolverGroups) + " groups");
  }
  std::vector<GessResult> found = pure_gess_all(g, tol);

  if (auto fm = fully_mixed_gess(g)) {
    auto r = mixed_support_solve(g, SupportProfile(n, SupportLabel::Mixer), tol);
    if (r) {
      // Closed form and aggregate solve must agree.
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs((*fm)[i] - r->profile[i]) > 1e-9) {
          r->notes.push_back("closed form and support solve disagree for group " + std::to_string(i + 1));
        }
      }
      r->profile = *fm;
      found.push_back(std::move(*r));
    }
  }

  // Supports with at least one mixer and one pure group, in base-3 order.
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  SupportProfile s(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t i = n; i-- > 0;) {
      s[i] = static_cast<SupportLabel>(rest % 3);
      rest /= 3;
    }
    const auto mixers = std::count(s.begin(), s.end(), SupportLabel::Mixer);
    if (mixers == 0 || static_cast<std::size_t>(mixers) == n) continue;
    if (auto r = mixed_support_solve(g, s, tol)) found.push_back(std::move(*r));
  }

  std::sort(found.begin(), found.end(), lexicographic_less);
  std::vector<GessResult> unique;
  const double merge = tol * 10.0;
  for (auto& r : found) {
    const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const GessResult& u) {
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(u.profile[i] - r.profile[i]) > merge) return false;
      }
      return true;
    });
    if (!duplicate) unique.push_back(std::move(r));
  }
  return unique;
}

}  // namespace gess
