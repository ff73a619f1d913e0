#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "popt/reward.hpp"
#include "popt/rng.hpp"

using namespace popt;

namespace {

NodeEconomics node(NodeId id, double u0, double p, double theta,
                   double phi = 0.74) {
  NodeEconomics n;
  n.id = id;
  n.expected_utility = u0;
  n.election_prob = p;
  n.rationality = phi;
  n.avg_volume = theta;
  return n;
}

// root of the willingness function in R, found by bisection; the candidate
// reward must be exactly this zero crossing
double willingness_root(const NodeEconomics& econ, double rate, double hi) {
  double lo = 0.0;
  REQUIRE(willingness(lo, econ, rate) < 0.0);
  REQUIRE(willingness(hi, econ, rate) > 0.0);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (willingness(mid, econ, rate) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("subjective probability") {
  CHECK(subjective_prob(1.0, 0.74) == 1.0);
  CHECK(subjective_prob(0.0, 0.74) == 0.0);
  const double inv_e = std::exp(-1.0);
  CHECK(subjective_prob(inv_e, 0.74) == doctest::Approx(inv_e).epsilon(1e-12));
  // exp(-(ln 100)^0.74), frozen from a high-precision evaluation
  CHECK(subjective_prob(0.01, 0.74) ==
        doctest::Approx(0.045229484584821795).epsilon(1e-12));
}

TEST_CASE("node utility") {
  NodeEconomics n = node(1, 1.0, 0.5, 2.0);
  CHECK(node_utility(0.0, n, 0.01) == 0.0);
  // pi(0.5) R - k R theta with R = 10, k = 0.1
  const double pi_half = subjective_prob(0.5, 0.74);
  CHECK(node_utility(10.0, n, 0.1) ==
        doctest::Approx(10.0 * pi_half - 0.1 * 10.0 * 2.0).epsilon(1e-12));
  // rate exactly at pi/theta: zero slope, zero utility at every reward
  CHECK(node_utility(50.0, n, pi_half / 2.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(node_utility(-1.0, n, 0.01), std::invalid_argument);
}

TEST_CASE("willingness") {
  NodeEconomics n = node(1, 0.0, 0.5, 1.0);
  CHECK(willingness(0.0, n, 0.01) == 0.0);
  // u = 1 exactly when R = 1 / (pi - k theta), against u0 = 0: v(1) = 1
  const double slope = subjective_prob(0.5, 0.74) - 0.01;
  CHECK(willingness(1.0 / slope, n, 0.01) == doctest::Approx(1.0));
  // u = 0 against u0 = 1: a unit loss, v = -lambda
  n.expected_utility = 1.0;
  CHECK(willingness(0.0, n, 0.01) == doctest::Approx(-2.25));
}

TEST_CASE("rate bound") {
  std::vector<NodeEconomics> nodes = {node(1, 1.0, 1.0, 4.0)};
  CHECK(rate_bound(nodes) == doctest::Approx(0.25));
  nodes.push_back(node(2, 1.0, 1.0, 2.0));
  CHECK(rate_bound(nodes) == doctest::Approx(0.25));
  nodes.push_back(node(3, 1.0, 1.0, 10.0));
  CHECK(rate_bound(nodes) == doctest::Approx(0.1));
  CHECK_THROWS_AS(rate_bound(std::span<const NodeEconomics>{}),
                  std::domain_error);
}

TEST_CASE("optimal reward") {
  SUBCASE("single node closed form") {
    std::vector<NodeEconomics> one = {node(1, 1.0, 1.0, 1.0)};
    RewardQuote q = optimal_reward(one, 0.7);  // pi(1) = 1, slope 0.3
    CHECK(q.aggregate == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
    REQUIRE(q.per_node.size() == 1);
    CHECK(q.per_node[0].candidate.has_value());
  }

  SUBCASE("zero expected utility yields a zero candidate") {
    std::vector<NodeEconomics> one = {node(1, 0.0, 0.5, 1.0)};
    CHECK(optimal_reward(one, 0.01).aggregate == 0.0);
  }

  SUBCASE("median aggregation, odd and even") {
    std::vector<NodeEconomics> odd = {node(1, 2.0, 1.0, 1.0),
                                      node(2, 10.0, 1.0, 1.0),
                                      node(3, 3.0, 1.0, 1.0)};
    RewardQuote q = optimal_reward(odd, 0.5);  // slope 0.5 each
    CHECK(q.aggregate == doctest::Approx(6.0));

    std::vector<NodeEconomics> even = {
        node(1, 1.0, 1.0, 1.0), node(2, 2.0, 1.0, 1.0),
        node(3, 4.0, 1.0, 1.0), node(4, 9.0, 1.0, 1.0)};
    CHECK(optimal_reward(even, 0.5).aggregate == doctest::Approx(6.0));
  }

  SUBCASE("median is permutation invariant and outlier robust") {
    std::vector<NodeEconomics> a = {node(1, 1.0, 1.0, 1.0),
                                    node(2, 2.0, 1.0, 1.0),
                                    node(3, 1000.0, 1.0, 1.0)};
    std::vector<NodeEconomics> b = {a[2], a[0], a[1]};
    CHECK(optimal_reward(a, 0.5).aggregate ==
          optimal_reward(b, 0.5).aggregate);
    CHECK(optimal_reward(a, 0.5).aggregate == doctest::Approx(4.0));
  }

  SUBCASE("infeasible rate names the binding node") {
    std::vector<NodeEconomics> nodes = {node(1, 1.0, 1.0, 2.0),
                                        node(7, 1.0, 1.0, 10.0)};
    CHECK_THROWS_AS(optimal_reward(nodes, 0.2), InfeasibleRateError);
    try {
      optimal_reward(nodes, 0.2);
    } catch (const InfeasibleRateError& e) {
      CHECK(e.binding_node() == 7);
    }
    CHECK_THROWS_AS(optimal_reward(std::span<const NodeEconomics>{}, 0.01),
                    std::domain_error);
  }
}

TEST_CASE("candidate reward is the zero crossing of the willingness") {
  Rng rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    NodeEconomics n = node(1, rng.uniform(0.1, 3.0), rng.uniform(0.05, 1.0),
                           rng.uniform(0.5, 2.0));
    const double bound = subjective_prob(n.election_prob, n.rationality) /
                         n.avg_volume;
    const double rate = rng.uniform(0.0, 0.8 * bound);
    std::vector<NodeEconomics> one = {n};
    const double r_star = optimal_reward(one, rate).aggregate;

    CHECK(r_star == doctest::Approx(willingness_root(n, rate, 4.0 * r_star))
                        .epsilon(1e-9));
    // willingness changes sign at the candidate and keeps rising past it
    CHECK(willingness(r_star * 0.99, n, rate) < 0.0);
    CHECK(willingness(r_star * 1.01, n, rate) > 0.0);
    CHECK(willingness(r_star * 1.5, n, rate) >
          willingness(r_star * 1.2, n, rate));
  }
}

TEST_CASE("candidate reward scales linearly with expected utility") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    NodeEconomics n = node(1, rng.uniform(0.1, 2.0), rng.uniform(0.1, 1.0),
                           rng.uniform(0.5, 2.0));
    const double rate = 0.5 * subjective_prob(n.election_prob, n.rationality) /
                        n.avg_volume;
    std::vector<NodeEconomics> one = {n};
    const double base = optimal_reward(one, rate).aggregate;
    const double c = rng.uniform(0.5, 4.0);
    one[0].expected_utility *= c;
    CHECK(optimal_reward(one, rate).aggregate ==
          doctest::Approx(c * base).epsilon(1e-9));
  }
}

TEST_CASE("willingness falls as the reference utility rises") {
  const double r = 20.0;
  double prev = INFINITY;
  for (double u0 = 0.2; u0 <= 2.01; u0 += 0.2) {
    NodeEconomics n = node(1, u0, 0.3, 1.0);
    double w = willingness(r, n, 0.01);
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("quote JSON export") {
  std::vector<NodeEconomics> nodes = {node(4, 1.0, 1.0, 1.0),
                                      node(9, 2.0, 1.0, 1.0)};
  RewardQuote q = optimal_reward(nodes, 0.5);
  std::stringstream ss;
  write_quote_json(ss, q);
  nlohmann::json j = nlohmann::json::parse(ss.str());
  CHECK(j["k"].get<double>() == 0.5);
  CHECK(j["rate_bound"].get<double>() == doctest::Approx(1.0));
  CHECK(j["aggregate"].get<double>() == doctest::Approx(q.aggregate));
  REQUIRE(j["per_node"].size() == 2);
  CHECK(j["per_node"][0]["id"].get<NodeId>() == 4);
  CHECK(j["per_node"][0]["candidate"].get<double>() == doctest::Approx(2.0));
}
