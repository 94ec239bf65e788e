#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "gess/mac.hpp"

using namespace gess;
using namespace gess::mac;

namespace {

MacParams params(double gamma, double delta = 0.2, double mu = 1.0, GroupWeights w = {0.4, 0.6}) {
  return MacParams(delta, gamma, mu, std::move(w));
}

bool all_value(const GroupProfile& q, double v) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] != v) return false;
  }
  return true;
}

bool has_profile(const std::vector<MacEquilibrium>& es, const GroupProfile& q, double tol) {
  return std::any_of(es.begin(), es.end(), [&](const MacEquilibrium& e) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (std::abs(e.profile[i] - q[i]) > tol) return false;
    }
    return true;
  });
}

}  // namespace

TEST_CASE("MacParams validation") {
  CHECK_THROWS_AS(params(0.1, 0.0), InvalidInput);
  CHECK_THROWS_AS(params(0.1, 1.0), InvalidInput);
  CHECK_THROWS_AS(params(1.0), InvalidInput);
  CHECK_THROWS_AS(params(-0.1), InvalidInput);
  CHECK_THROWS_AS(params(0.1, 0.2, 0.0), InvalidInput);
}

TEST_CASE("intra_payoff examples") {
  CHECK(intra_payoff(0.0, params(0.3)) == 0.0);
  CHECK(intra_payoff(0.5, params(0.2)) == doctest::Approx(0.32).epsilon(1e-12));
  // gamma must stay below 1; the limit is approached instead.
  CHECK(intra_payoff(1.0, params(1.0 - 1e-9)) == doctest::Approx(0.8).epsilon(1e-7));
}

TEST_CASE("inter_payoff examples") {
  CHECK(inter_payoff(0.0, 0.7, params(0.3)) == 0.0);
  CHECK(inter_payoff(0.5, 0.5, params(0.2)) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(inter_payoff(1.0, 0.0, params(0.4)) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("payoffs assembled from the matrices match the closed forms") {
  testing::Gen gen(51);
  for (int t = 0; t < 300; ++t) {
    const MacParams p = params(gen.uniform(0, 0.99), gen.uniform(0.01, 0.99), gen.uniform(0.1, 2.0));
    const double x = gen.prob(), y = gen.prob();
    CHECK(intra_payoff_from_matrix(x, x, p) == doctest::Approx(intra_payoff(x, p)).epsilon(1e-12));
    CHECK(inter_payoff_from_matrix(x, y, p) == doctest::Approx(inter_payoff(x, y, p)).epsilon(1e-12));
  }
}

TEST_CASE("mac_group_throughput examples") {
  CHECK(mac_group_throughput(0, {0.0, 0.6}, params(0.1)) == 0.0);
  const MacParams one = MacParams(0.2, 0.0, 1.0, GroupWeights{1.0});
  CHECK(mac_group_throughput(0, {1.0}, one) == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(mac_group_throughput(0, {1.0}, one) == doctest::Approx(intra_payoff(1.0, one)).epsilon(1e-12));
  CHECK_THROWS_AS(mac_group_throughput(2, {0.5, 0.5}, params(0.1)), std::out_of_range);
}

TEST_CASE("mac_bracket examples") {
  const MacParams p = params(0.1);
  for (std::size_t i = 0; i < 2; ++i) {
    const double b = mac_bracket(i, {0.0, 0.0}, p);
    CHECK(b == doctest::Approx(0.8 + 0.9 * p.weights[i] * 0.8).epsilon(1e-12));
    CHECK(mac_fprime(i, 0.5, {0.0, 0.0}, p) < 0.0);
  }
  const auto q = mac_fully_mixed(p);
  REQUIRE(q);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(mac_bracket(i, *q, p)) < 1e-9);
  const MacParams high = params(0.6);
  for (std::size_t i = 0; i < 2; ++i) CHECK(mac_bracket(i, {1.0, 1.0}, high) >= 0.0);
}

TEST_CASE("mac_thresholds examples") {
  const MacThresholds t = mac_thresholds(params(0.1));
  CHECK(t.gamma_bar == doctest::Approx(1.0 - 0.8 / 1.72).epsilon(1e-12));
  CHECK(std::abs(t.gamma_bar - 0.5349) < 1e-4);
  CHECK(std::abs(t.gamma_under_closed_form - 0.359) < 1e-3);
  CHECK(std::abs(t.gamma_under_numeric - 0.4118) < 1e-4);
  // The numeric threshold is exactly where the closed form leaves (0,1).
  CHECK(mac_fully_mixed(params(t.gamma_under_numeric - 1e-6)));
  CHECK_FALSE(mac_fully_mixed(params(t.gamma_under_numeric + 1e-6)));
}

TEST_CASE("mac_fully_mixed examples") {
  const MacParams p = params(0.1);
  const auto q = mac_fully_mixed(p);
  REQUIRE(q);
  CHECK(std::abs((*q)[0] - 0.70556) < 1e-5);
  CHECK(std::abs((*q)[1] - 0.60370) < 1e-5);
  CHECK(aggregate(*q, p.weights) == doctest::Approx(mac_fully_mixed_aggregate(p)).epsilon(1e-12));
  CHECK_FALSE(mac_fully_mixed(params(0.5)));
  const auto sym = mac_fully_mixed(params(0.1, 0.2, 1.0, {0.5, 0.5}));
  REQUIRE(sym);
  CHECK((*sym)[0] == (*sym)[1]);
}

TEST_CASE("mac_find_gess examples") {
  const auto high = mac_find_gess(params(0.6));
  CHECK(has_profile(high, {1.0, 1.0}, 0.0));
  const auto low = mac_find_gess(params(0.1));
  const auto q = mac_fully_mixed(params(0.1));
  REQUIRE(q);
  CHECK(has_profile(low, *q, 1e-12));
  for (const auto& e : low) {
    if (e.kind == MacKind::FullyMixed) {
      for (double b : e.brackets) CHECK(std::abs(b) < 1e-9);
    }
    CHECK_FALSE(all_value(e.profile, 0.0));
    CHECK(e.fprime_margin > -1e-9);
  }
}

TEST_CASE("all-T appears exactly above gamma_bar") {
  const double bar = mac_thresholds(params(0.0)).gamma_bar;
  for (double g : {0.0, 0.3, 0.5, 0.53, bar - 1e-6}) CHECK_FALSE(has_profile(mac_find_gess(params(g)), {1.0, 1.0}, 0.0));
  for (double g : {bar + 1e-6, 0.6, 0.9}) CHECK(has_profile(mac_find_gess(params(g)), {1.0, 1.0}, 0.0));
}

TEST_CASE("success_probability examples") {
  CHECK(success_probability({0.0, 0.0}, params(0.3)) == 0.0);
  CHECK(success_probability({0.5, 0.5}, params(0.2)) == doctest::Approx(0.404).epsilon(1e-12));
  const MacParams alone = params(1.0 - 1e-12);
  CHECK(success_probability({0.3, 0.8}, alone) == doctest::Approx(0.4 * 0.3 + 0.6 * 0.8).epsilon(1e-9));
}

TEST_CASE("standard_reference_strategy examples") {
  CHECK(standard_reference_strategy(params(0.2, 0.2)) == 1.0);
  CHECK(standard_reference_strategy(params(0.0, 0.5)) == doctest::Approx(0.5));
  CHECK(standard_reference_strategy(params(0.7, 1e-9)) == 1.0);
}

TEST_CASE("property: closed-form throughput equals the pairwise sum") {
  testing::Gen gen(52);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 5));
    const MacParams p(gen.uniform(0.01, 0.99), gen.uniform(0, 0.99), gen.uniform(0.1, 3.0), GroupWeights(gen.weights(n)));
    const GroupProfile q = gen.profile(n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(mac_group_throughput(i, q, p) - mac_group_throughput_pairwise(i, q, p)) < 1e-12);
    }
  }
}

TEST_CASE("property: mu scaling leaves equilibria unchanged") {
  testing::Gen gen(53);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 3));
    const GroupWeights w(gen.weights(n));
    const double d = gen.uniform(0.05, 0.95), g = gen.uniform(0, 0.95);
    const auto a = mac_find_gess(MacParams(d, g, 1.0, w));
    const auto b = mac_find_gess(MacParams(d, g, gen.uniform(0.05, 0.99), w));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].support == b[k].support);
      CHECK(a[k].profile == b[k].profile);
    }
  }
}

TEST_CASE("property: all-S never appears") {
  testing::Gen gen(54);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 10; ++k) {
        const double d = 0.05 + 0.09 * i, g = 0.099 * j;
        const auto w = gen.weights(2, 0.01 + 0.04 * k);
        for (const auto& e : mac_find_gess(MacParams(d, g, 1.0, GroupWeights(w)), false)) {
          CHECK_FALSE(all_value(e.profile, 0.0));
        }
      }
    }
  }
}

TEST_CASE("property: pruning matches full enumeration and the monotone structure holds") {
  testing::Gen gen(55);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 4));
    const MacParams p(gen.uniform(0.05, 0.95), gen.uniform(0, 0.95), 1.0, GroupWeights(gen.weights(n)));
    const auto pruned = mac_find_gess(p, true);
    const auto full = mac_find_gess(p, false);
    REQUIRE(pruned.size() == full.size());
    for (std::size_t k = 0; k < full.size(); ++k) CHECK(pruned[k].profile == full[k].profile);
    for (const auto& e : full) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || p.weights[i] > p.weights[j]) continue;
          if (e.profile[j] == 1.0) CHECK(e.profile[i] == 1.0);
          if (e.profile[j] == 0.0) CHECK(e.profile[i] == 0.0);
        }
      }
    }
  }
}

TEST_CASE("property: success probability bounds and the general-N extension") {
  testing::Gen gen(56);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 5));
    const double mu = gen.uniform(0.1, 2.0);
    const MacParams p(gen.uniform(0.01, 0.99), gen.uniform(0, 0.99), mu, GroupWeights(gen.weights(n)));
    const GroupProfile q = gen.profile(n);
    const double ps = success_probability(q, p);
    CHECK(ps >= 0.0);
    CHECK(ps <= mu);
    CHECK(success_probability(GroupProfile(std::vector<double>(n, 0.0)), p) == 0.0);
    if (n == 2) CHECK(std::abs(ps - success_probability_enumerated(q, p)) < 1e-12);
  }
}
