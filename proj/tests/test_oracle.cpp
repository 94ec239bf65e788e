#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "gess/ess_classic.hpp"
#include "gess/oracle.hpp"
#include "gess/solver.hpp"

using namespace gess;

namespace {

const PayoffMatrix2 kHawkDove = PayoffMatrix2::hawk_dove(2.0, 3.0);
const PayoffMatrix2 kStagHunt = PayoffMatrix2::stag_hunt();
const PayoffMatrix2 kPrisoners = PayoffMatrix2::prisoners_dilemma();

GroupGame two(double alpha, const PayoffMatrix2& m) { return {GroupWeights{alpha, 1.0 - alpha}, m}; }

bool near_any(const std::vector<GroupProfile>& qs, const GroupProfile& q, double tol) {
  return std::any_of(qs.begin(), qs.end(), [&](const GroupProfile& p) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (std::abs(p[i] - q[i]) > tol) return false;
    }
    return true;
  });
}

}  // namespace

TEST_CASE("InvasionGrid validation") {
  const InvasionGrid g = InvasionGrid::standard();
  CHECK(g.eps_values.size() == 20);
  CHECK(g.eps_values.front() == doctest::Approx(1e-4));
  CHECK(g.eps_values.back() == doctest::Approx(0.2));
  CHECK(g.deviation_resolution == 0.01);
  CHECK_NOTHROW(g.validate());
  InvasionGrid bad = g;
  bad.eps_values.push_back(1.0);
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = g;
  bad.deviation_resolution = 0.6;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("verify_gess_definition examples") {
  const GroupGame hd{{0.4, 0.6}, kHawkDove};
  const GroupProfile mixed{4.0 / 9.0, 2.0 / 27.0};
  const Verdict ok = verify_gess_definition(mixed, hd);
  CHECK(ok.passed);
  CHECK(ok.worst_violation > -ok.tolerance);

  CHECK(verify_gess_definition({0.0, 1.0}, two(0.3, kPrisoners)).passed);

  const Verdict bad = verify_gess_definition({1.0, 0.0}, hd);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_violation <= -bad.tolerance);
  REQUIRE(bad.witness);
  CHECK(bad.witness->group == 0);
}

TEST_CASE("verify_conditions examples") {
  CHECK(verify_conditions({1.0, 1.0}, two(0.4, kStagHunt)).passed);
  const Verdict pd = verify_conditions({1.0, 1.0}, two(0.3, kPrisoners));
  CHECK_FALSE(pd.passed);
  REQUIRE(pd.witness);
  CHECK(pd.witness->group == 0);

  // Strict brackets: the worst margin is the smallest |B_i| times one grid step.
  const GroupGame sh = two(0.4, kStagHunt);
  const GroupProfile q{1.0, 1.0};
  const Verdict v = verify_conditions(q, sh);
  const double smallest = std::min(std::abs(bracket(0, q, sh)), std::abs(bracket(1, q, sh)));
  CHECK(v.worst_violation == doctest::Approx(smallest * 0.01).epsilon(1e-9));
}

TEST_CASE("strict_group_nash_check examples") {
  CHECK(strict_group_nash_check({4.0 / 9.0, 2.0 / 27.0}, {{0.4, 0.6}, kHawkDove}));
  CHECK(strict_group_nash_check({1.0, 0.0}, two(0.7, kPrisoners)));
  // U_2(p, 0) = 1.2p^2 - p + 1 reaches 1.2 > 1 at p = 1, so (H,H) is not strict here.
  CHECK_FALSE(strict_group_nash_check({0.0, 0.0}, two(0.4, kStagHunt)));
  CHECK(strict_group_nash_check({1.0, 1.0}, two(0.4, kStagHunt)));
}

TEST_CASE("grid_search_equilibria examples") {
  const auto hd = grid_search_equilibria(two(0.2, kHawkDove), 0.01);
  CHECK_FALSE(hd.degenerate);
  REQUIRE(hd.equilibria.size() == 1);
  CHECK(near_any(hd.equilibria, {1.0, 0.0}, 0.02));

  const auto sh = grid_search_equilibria(two(0.3, kStagHunt), 0.01);
  CHECK(sh.equilibria.size() == 3);
  CHECK(near_any(sh.equilibria, {1.0, 1.0}, 0.02));
  CHECK(near_any(sh.equilibria, {0.0, 0.0}, 0.02));
  CHECK(near_any(sh.equilibria, {1.0, 0.0}, 0.02));

  const auto flat = grid_search_equilibria(two(0.3, PayoffMatrix2(1, 1, 1, 1)), 0.01);
  CHECK(flat.degenerate);
  CHECK(flat.equilibria.empty());

  CHECK_THROWS_AS(grid_search_equilibria({GroupWeights{0.25, 0.25, 0.25, 0.25}, kHawkDove}), InvalidInput);
}

TEST_CASE("three-action oracle sanity") {
  // -I: every action is punished against itself; the uniform mix is stable.
  const PayoffMatrix m(3, {-1, 0, 0, 0, -1, 0, 0, 0, -1});
  const GeneralGroupGame g{GroupWeights{0.5, 0.5}, m};
  InvasionGrid grid = InvasionGrid::standard();
  grid.deviation_resolution = 0.05;
  const ProbabilityVector uniform({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(verify_gess_definition(GeneralProfile{uniform, uniform}, g, grid).passed);
  CHECK(verify_conditions(GeneralProfile{uniform, uniform}, g, grid).passed);
  const ProbabilityVector pure = ProbabilityVector::pure(0, 3);
  const Verdict v = verify_gess_definition(GeneralProfile{pure, uniform}, g, grid);
  CHECK_FALSE(v.passed);
  REQUIRE(v.witness);
  CHECK(v.witness->group == 0);
  CHECK(simplex_grid(3, 0.5).size() == 6);
}

TEST_CASE("extra mutants are probed") {
  // A deviation off the coarse grid still fails the profile.
  const GroupGame hd{{0.4, 0.6}, kHawkDove};
  InvasionGrid grid = InvasionGrid::standard();
  grid.deviation_resolution = 0.5;
  grid.extra_mutants = {0.3};
  const Verdict v = verify_gess_definition({1.0, 0.0}, hd, grid);
  CHECK_FALSE(v.passed);
}

TEST_CASE("property: definition and conditions agree") {
  testing::Gen gen(41);
  int agreed = 0;
  for (int t = 0; t < 150; ++t) {
    const GroupGame g{GroupWeights(gen.weights(2, 0.05)), gen.matrix()};
    std::vector<GroupProfile> candidates = {gen.profile(2), {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}};
    for (const auto& r : find_all_gess(g)) candidates.push_back(r.profile);
    for (const auto& q : candidates) {
      const bool def = verify_gess_definition(q, g).passed;
      const bool cond = verify_conditions(q, g).passed;
      CHECK_MESSAGE(def == cond, to_string(q));
      agreed += def == cond;
    }
  }
  CHECK(agreed > 700);
}

TEST_CASE("property: uniform replication of a single-population ESS is a GESS") {
  testing::Gen gen(42);
  for (int t = 0; t < 150; ++t) {
    const double a = gen.uniform(-5, 5), b = gen.uniform(-5, 5), d = gen.uniform(-5, 5);
    const PayoffMatrix2 m(a, b, b, d);
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 3));
    const GroupGame g{GroupWeights(gen.weights(n, 0.05)), m};
    for (const auto& s : all_ess_2x2(m)) {
      const GroupProfile q(std::vector<double>(n, s.prob_first_action()));
      CHECK_MESSAGE(verify_gess_definition(q, g).passed, to_string(q));
    }
  }
}

TEST_CASE("property: grid search and solver agree on sampled games") {
  testing::Gen gen(43);
  for (int t = 0; t < 30; ++t) {
    const GroupGame g{GroupWeights(gen.weights(2, 0.05)), gen.matrix()};
    std::vector<GroupProfile> solved;
    for (const auto& r : find_all_gess(g)) solved.push_back(r.profile);
    const auto grid = grid_search_equilibria(g, 0.01);
    for (const auto& q : solved) CHECK_MESSAGE(near_any(grid.equilibria, q, 0.02), to_string(q));
    for (const auto& q : grid.equilibria) CHECK_MESSAGE(near_any(solved, q, 0.02), to_string(q));
  }
}
