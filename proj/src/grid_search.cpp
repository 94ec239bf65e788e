// Exhaustive grid discovery of group-stable profiles for two-action games.
//
// A grid point g is kept when every group's raw condition F_i(p, g) >= 0
// holds over the deviation grid, relaxed by how far the nearest true
// equilibrium can sit from g. F_i(p,g)/(g_i - p) is affine in g with slope
// at most |Omega(A,B)| * (1 + alpha_i) per unit of max-norm, so a half-cell
// offset moves it by at most slack_i = res/2 * |Omega(A,B)| * (1 + alpha_i).
// Off-grid equilibria need a vanishing F, which requires Omega < 0; when
// Omega(A,B) >= 0 the slack is zero and the test is exact on the grid.
// Clusters of kept points are refined twice on a 10x finer local grid, which
// removes points that only passed through the slack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "gess/oracle.hpp"

namespace gess {

namespace {

constexpr int kRefineFactor = 10;
constexpr int kRefineLevels = 2;

using Point = std::vector<std::int64_t>;

struct Searcher {
  const GroupGame& game;
  std::size_t n;
  double tol;
  double omega_ab;  // Omega(A,B) from raw payoffs
  std::vector<double> deviations;

  double payoff(double p, double q) const { return pairwise_payoff(MixedStrategy(p), MixedStrategy(q), game.payoff); }

  // F_i(p, g) from the raw definition.
  double condition(std::size_t i, double p, const std::vector<double>& g) const {
    const double alpha_i = game.weights[i];
    const double gi = g[i];
    const double om = payoff(p, p) - payoff(p, gi) - payoff(gi, p) + payoff(gi, gi);
    double up = alpha_i * payoff(p, p);
    double uq = alpha_i * payoff(gi, gi);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      up += game.weights[j] * payoff(p, g[j]);
      uq += game.weights[j] * payoff(gi, g[j]);
    }
    return alpha_i * om - up + uq;
  }

  double slack(std::size_t i, double res) const {
    if (!(omega_ab < -tol)) return 0.0;
    return 0.5 * res * std::abs(omega_ab) * (1.0 + game.weights[i]) * (1.0 + 1e-9);
  }

  bool passes(const std::vector<double>& g, double res) const {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = slack(i, res);
      for (double p : deviations) {
        const double dist = std::abs(g[i] - p);
        if (dist < 1e-12) continue;
        const double f = condition(i, p, g);
        const double allowance = s * dist + tol;
        if (f < -allowance) return false;
        if (std::abs(f) <= allowance) {
          const double om = payoff(p, p) - payoff(p, g[i]) - payoff(g[i], p) + payoff(g[i], g[i]);
          if (!(om / (dist * dist) < -tol)) return false;
        }
      }
    }
    return true;
  }

  // Wrong-sign part of the normalized first-order rate, summed over groups.
  double residual(const std::vector<double>& g) const {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = g[i] > 0.5 ? 0.0 : 1.0;
      const double rate = condition(i, p, g) / (g[i] - p);
      if (g[i] > 0.0 && g[i] < 1.0) {
        r += std::abs(rate);
      } else if (g[i] == 1.0) {
        r += std::max(0.0, -rate);
      } else {
        r += std::max(0.0, rate);
      }
    }
    return r;
  }
};

std::vector<double> to_coords(const Point& k, std::int64_t steps) {
  std::vector<double> g(k.size());
  for (std::size_t d = 0; d < k.size(); ++d) g[d] = static_cast<double>(k[d]) / static_cast<double>(steps);
  return g;
}

// Visits every integer point of the box [lo, hi].
template <typename Fn>
void for_each_point(const Point& lo, const Point& hi, Fn&& fn) {
  Point k = lo;
  while (true) {
    fn(k);
    std::size_t d = 0;
    while (d < k.size()) {
      if (k[d] < hi[d]) {
        ++k[d];
        break;
      }
      k[d] = lo[d];
      ++d;
    }
    if (d == k.size()) return;
  }
}

std::vector<std::vector<Point>> cluster(const std::vector<Point>& points) {
  const std::set<Point> lookup(points.begin(), points.end());
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // points are sorted, so lower_bound gives the index
  auto index = [&](const Point& p) {
    return static_cast<std::size_t>(std::lower_bound(points.begin(), points.end(), p) - points.begin());
  };
  for (std::size_t a = 0; a < points.size(); ++a) {
    Point lo = points[a], hi = points[a];
    for (auto& x : lo) --x;
    for (auto& x : hi) ++x;
    for_each_point(lo, hi, [&](const Point& nb) {
      if (nb == points[a] || !lookup.count(nb)) return;
      parent[find(a)] = find(index(nb));
    });
  }
  std::vector<std::vector<Point>> groups;
  std::vector<std::ptrdiff_t> slot(points.size(), -1);
  for (std::size_t a = 0; a < points.size(); ++a) {
    const std::size_t root = find(a);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[root])].push_back(points[a]);
  }
  return groups;
}

std::vector<Point> scan_box(const Searcher& s, const Point& lo, const Point& hi, std::int64_t steps) {
  std::vector<Point> hits;
  const double res = 1.0 / static_cast<double>(steps);
  for_each_point(lo, hi, [&](const Point& k) {
    if (s.passes(to_coords(k, steps), res)) hits.push_back(k);
  });
  std::sort(hits.begin(), hits.end());
  return hits;
}

void refine(const Searcher& s, const std::vector<Point>& members, std::int64_t steps, int level,
            std::vector<std::vector<double>>& out) {
  if (level == kRefineLevels) {
    const std::vector<double>* best = nullptr;
    std::vector<std::vector<double>> coords;
    coords.reserve(members.size());
    for (const auto& k : members) coords.push_back(to_coords(k, steps));
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& c : coords) {
      const double r = s.residual(c);
      if (r < best_score) {
        best_score = r;
        best = &c;
      }
    }
    out.push_back(*best);
    return;
  }
  const std::int64_t fine = steps * kRefineFactor;
  Point lo(s.n, std::numeric_limits<std::int64_t>::max());
  Point hi(s.n, std::numeric_limits<std::int64_t>::min());
  for (const auto& k : members) {
    for (std::size_t d = 0; d < s.n; ++d) {
      lo[d] = std::min(lo[d], k[d]);
      hi[d] = std::max(hi[d], k[d]);
    }
  }
  for (std::size_t d = 0; d < s.n; ++d) {
    lo[d] = std::max<std::int64_t>(0, (lo[d] - 1) * kRefineFactor);
    hi[d] = std::min<std::int64_t>(fine, (hi[d] + 1) * kRefineFactor);
  }
  for (const auto& sub : cluster(scan_box(s, lo, hi, fine))) refine(s, sub, fine, level + 1, out);
}

}  // namespace

GridSearchResult grid_search_equilibria(const GroupGame& g, double resolution) {
  const std::size_t n = g.num_groups();
  if (n > kMaxGridSearchGroups) {
    throw InvalidInput("grid search supports at most " + std::to_string(kMaxGridSearchGroups) + " groups");
  }
  if (!(resolution > 0.0 && resolution <= 0.5)) throw InvalidInput("grid resolution must lie in (0, 0.5]");
  GridSearchResult result;
  const auto& m = g.payoff;
  const double scale = m.scale();
  if (m.a == m.b && m.b == m.c && m.c == m.d) {
    result.degenerate = true;
    return result;
  }
  const auto steps = static_cast<std::int64_t>(std::llround(1.0 / resolution));

  Searcher s{g, n, 1e-7 * std::max(scale, 1e-12), 0.0, {}};
  s.omega_ab = s.payoff(1.0, 1.0) - s.payoff(1.0, 0.0) - s.payoff(0.0, 1.0) + s.payoff(0.0, 0.0);
  // Endpoints first: most points fail there.
  s.deviations = {0.0, 1.0};
  for (std::int64_t k = 1; k < steps; ++k) s.deviations.push_back(static_cast<double>(k) / static_cast<double>(steps));

  const Point lo(n, 0), hi(n, steps);
  std::vector<std::vector<double>> found;
  for (const auto& members : cluster(scan_box(s, lo, hi, steps))) refine(s, members, steps, 0, found);

  std::sort(found.begin(), found.end());
  const double merge = 2.0 / (static_cast<double>(steps) * std::pow(kRefineFactor, kRefineLevels));
  for (const auto& f : found) {
    const bool duplicate = std::any_of(result.equilibria.begin(), result.equilibria.end(), [&](const GroupProfile& e) {
      for (std::size_t d = 0; d < n; ++d) {
        if (std::abs(e[d] - f[d]) > merge) return false;
      }
      return true;
    });
    if (!duplicate) result.equilibria.emplace_back(f);
  }
  return result;
}

}  // namespace gess
