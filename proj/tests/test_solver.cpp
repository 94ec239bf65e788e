#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "gess/oracle.hpp"
#include "gess/solver.hpp"

using namespace gess;
using L = SupportLabel;

namespace {

const PayoffMatrix2 kHawkDove = PayoffMatrix2::hawk_dove(2.0, 3.0);
const PayoffMatrix2 kStagHunt = PayoffMatrix2::stag_hunt();
const PayoffMatrix2 kPrisoners = PayoffMatrix2::prisoners_dilemma();

GroupGame two(double alpha, const PayoffMatrix2& m) { return {GroupWeights{alpha, 1.0 - alpha}, m}; }

bool contains(const std::vector<GessResult>& rs, const GroupProfile& q, double tol = 1e-9) {
  return std::any_of(rs.begin(), rs.end(), [&](const GessResult& r) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (std::abs(r.profile[i] - q[i]) > tol) return false;
    }
    return true;
  });
}

double max_dist(const GroupProfile& a, const GroupProfile& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void check_result_invariants(const GessResult& r, const GroupGame& g) {
  const double tol = kBracketTolerance * std::max(1.0, g.payoff.scale());
  CHECK(r.diagnostics.aggregate == doctest::Approx(aggregate(r.profile, g.weights)).epsilon(1e-12));
  for (std::size_t i = 0; i < r.support.size(); ++i) {
    const double b = r.brackets[i];
    switch (r.support[i]) {
      case L::PureA:
        CHECK(r.profile[i] == 1.0);
        CHECK(b >= -tol);
        if (r.kind == GessKind::Strong) CHECK(b > tol);
        break;
      case L::PureB:
        CHECK(r.profile[i] == 0.0);
        CHECK(b <= tol);
        if (r.kind == GessKind::Strong) CHECK(b < -tol);
        break;
      case L::Mixer:
        CHECK(r.kind != GessKind::Strong);
        CHECK(std::abs(b) <= 1e-9 * std::max(1.0, g.payoff.scale()));
        CHECK(r.profile[i] > 0.0);
        CHECK(r.profile[i] < 1.0);
        break;
    }
  }
  if (r.kind == GessKind::FullyMixed) {
    CHECK(r.delta < 0.0);
    CHECK(std::all_of(r.support.begin(), r.support.end(), [](L s) { return s == L::Mixer; }));
  }
}

}  // namespace

TEST_CASE("bracket examples") {
  const GroupGame g{{0.4, 0.6}, kHawkDove};
  CHECK(bracket(0, {1.0, 0.0}, g) == doctest::Approx(-0.6));
  CHECK(bracket(1, {1.0, 0.0}, g) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(bracket(2, {1.0, 0.0}, g), std::out_of_range);
  // Single group at the indifference point: the sum term vanishes.
  const GroupGame single{{1.0}, kHawkDove};
  const double q = (kHawkDove.d - kHawkDove.b) / kHawkDove.delta();
  CHECK(bracket(0, {q}, single) ==
        doctest::Approx(q * kHawkDove.delta() + kHawkDove.c - kHawkDove.d).epsilon(1e-12));
}

TEST_CASE("fully_mixed_gess examples") {
  const auto hd = fully_mixed_gess({{0.4, 0.6}, kHawkDove});
  REQUIRE(hd);
  CHECK((*hd)[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK((*hd)[1] == doctest::Approx(2.0 / 27.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(bracket(i, *hd, {{0.4, 0.6}, kHawkDove})) < 1e-9);
  CHECK_FALSE(fully_mixed_gess({{0.4, 0.6}, kStagHunt}));
  CHECK_FALSE(fully_mixed_gess({{0.4, 0.6}, kPrisoners}));
}

TEST_CASE("strong_gess_all examples") {
  const auto sh = strong_gess_all(two(0.4, kStagHunt));
  CHECK(contains(sh, {1.0, 1.0}));
  CHECK(contains(sh, {0.0, 0.0}));
  CHECK(contains(sh, {1.0, 0.0}));
  const auto hd = strong_gess_all(two(0.2, kHawkDove));
  REQUIRE(hd.size() == 1);
  CHECK(hd[0].profile == GroupProfile{1.0, 0.0});
  CHECK(contains(strong_gess_all(two(0.7, kPrisoners)), {1.0, 0.0}));
  for (const auto& r : sh) CHECK(r.kind == GessKind::Strong);
}

TEST_CASE("strong_gess_all rejects the degenerate game") {
  CHECK_THROWS_AS(strong_gess_all(two(0.4, PayoffMatrix2(1, 2, 1, 2))), DegenerateGame);
  CHECK_THROWS_AS(find_all_gess(two(0.4, PayoffMatrix2(3, 3, 3, 3))), DegenerateGame);
}

TEST_CASE("pure profile on a vanishing bracket is weak and annotated") {
  const auto rs = pure_gess_all(two(0.25, kHawkDove));
  bool found = false;
  for (const auto& r : rs) {
    if (r.profile == GroupProfile{1.0, 0.0}) {
      found = true;
      CHECK(r.kind == GessKind::Weak);
      CHECK(r.diagnostics.boundary);
      CHECK(std::find(r.notes.begin(), r.notes.end(), "boundary") != r.notes.end());
    }
  }
  CHECK(found);
  CHECK(strong_gess_all(two(0.25, kHawkDove)).empty());
}

TEST_CASE("mixed_support_solve examples") {
  const auto md = mixed_support_solve(two(0.3, kHawkDove), {L::Mixer, L::PureB});
  REQUIRE(md);
  CHECK(md->profile[0] == doctest::Approx(0.7 / 0.9).epsilon(1e-12));
  CHECK(md->profile[1] == 0.0);
  CHECK(md->kind == GessKind::Weak);
  CHECK_FALSE(mixed_support_solve(two(0.4, kStagHunt), {L::Mixer, L::PureA}));
  CHECK_FALSE(mixed_support_solve(two(0.4, kStagHunt), {L::Mixer, L::Mixer}));
  CHECK_FALSE(mixed_support_solve(two(0.2, kHawkDove), {L::PureA, L::Mixer}));
  CHECK_FALSE(mixed_support_solve(two(0.3, kPrisoners), {L::Mixer, L::PureB}));
  CHECK_THROWS_AS(mixed_support_solve(two(0.3, kHawkDove), {L::PureA, L::PureB}), InvalidInput);
  CHECK_THROWS_AS(mixed_support_solve(two(0.3, kHawkDove), {L::Mixer}), InvalidInput);
}

TEST_CASE("mixed_support_solve window for (q_1, D) in Hawk-Dove") {
  for (double a : {0.26, 0.3, 0.33}) CHECK(mixed_support_solve(two(a, kHawkDove), {L::Mixer, L::PureB}));
  for (double a : {0.2, 0.24, 0.34, 0.37}) CHECK_FALSE(mixed_support_solve(two(a, kHawkDove), {L::Mixer, L::PureB}));
}

TEST_CASE("mixed support diagnostics carry both aggregate formulas") {
  const auto md = mixed_support_solve(two(0.3, kHawkDove), {L::Mixer, L::PureB});
  REQUIRE(md);
  REQUIRE(md->diagnostics.y_derived);
  REQUIRE(md->diagnostics.y_stated);
  CHECK(*md->diagnostics.y_derived == doctest::Approx(md->diagnostics.aggregate).epsilon(1e-12));
}

TEST_CASE("find_all_gess examples") {
  const GroupGame hd{{0.4, 0.6}, kHawkDove};
  const auto a = find_all_gess(hd);
  REQUIRE(a.size() == 1);
  CHECK(a[0].kind == GessKind::FullyMixed);
  CHECK(a[0].profile[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(a[0].profile[1] == doctest::Approx(2.0 / 27.0).epsilon(1e-12));

  const auto pd = find_all_gess(two(0.3, kPrisoners));
  REQUIRE(pd.size() == 1);
  CHECK(pd[0].profile == GroupProfile{0.0, 1.0});

  const auto sh = find_all_gess(two(0.1, kStagHunt));
  REQUIRE(sh.size() == 2);
  CHECK(contains(sh, {1.0, 1.0}));
  CHECK(contains(sh, {0.0, 0.0}));

  CHECK_THROWS_AS(find_all_gess({GroupWeights(std::vector<double>(13, 1.0 / 13.0)), kHawkDove}), InvalidInput);
}

TEST_CASE("find_all_gess output is ordered by support then profile") {
  testing::Gen gen(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 4));
    const GroupGame g{GroupWeights(gen.weights(n)), gen.matrix()};
    const auto rs = find_all_gess(g);
    for (std::size_t k = 1; k < rs.size(); ++k) CHECK(rs[k - 1].support <= rs[k].support);
  }
}

TEST_CASE("property: F_i factorizes as (q_i - p_i) B_i") {
  testing::Gen gen(32);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 5));
    const GroupGame g{GroupWeights(gen.weights(n)), gen.matrix()};
    const GroupProfile q = gen.profile(n);
    const std::size_t i = static_cast<std::size_t>(gen.integer(0, static_cast<int>(n) - 1));
    const double p = gen.prob();
    const double f = condition_f(i, ProbabilityVector::from_two_action(MixedStrategy(p)), to_general(q),
                                 GeneralGroupGame::from(g));
    CHECK(std::abs(f - (q[i] - p) * bracket(i, q, g)) < 1e-10);
  }
}

TEST_CASE("property: every result satisfies the kind invariants and passes the definition oracle") {
  testing::Gen gen(33);
  int checked = 0;
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 3));
    const GroupGame g{GroupWeights(gen.weights(n, 0.05)), gen.matrix()};
    for (const auto& r : find_all_gess(g)) {
      check_result_invariants(r, g);
      const Verdict v = verify_gess_definition(r.profile, g);
      CHECK_MESSAGE(v.passed, describe(v), " at ", to_string(r.profile));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("property: fully mixed result is unique and zeroes every bracket") {
  testing::Gen gen(34);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 5));
    const GroupGame g{GroupWeights(gen.weights(n)), gen.anti_coordination()};
    const auto q = fully_mixed_gess(g);
    if (!q) continue;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(bracket(i, *q, g)) < 1e-9);
    const auto rs = find_all_gess(g);
    const auto fm = std::count_if(rs.begin(), rs.end(), [](const GessResult& r) { return r.kind == GessKind::FullyMixed; });
    CHECK(fm == 1);
  }
}

TEST_CASE("property: swapping group labels permutes the GESS set") {
  testing::Gen gen(35);
  for (int t = 0; t < 200; ++t) {
    const auto w = gen.weights(2);
    const PayoffMatrix2 m = gen.matrix();
    const auto a = find_all_gess({GroupWeights{w[0], w[1]}, m});
    const auto b = find_all_gess({GroupWeights{w[1], w[0]}, m});
    REQUIRE(a.size() == b.size());
    for (const auto& r : a) CHECK(contains(b, {r.profile[1], r.profile[0]}, 1e-9));
  }
}

TEST_CASE("property: positive affine maps preserve the GESS set") {
  testing::Gen gen(36);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 3));
    const GroupWeights w(gen.weights(n));
    const PayoffMatrix2 m = gen.matrix();
    const auto a = find_all_gess({w, m});
    const auto b = find_all_gess({w, m.affine(gen.uniform(0.2, 5.0), gen.uniform(-5.0, 5.0))});
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].support == b[k].support);
      CHECK(max_dist(a[k].profile, b[k].profile) < 1e-9);
    }
  }
}
