#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "popt/consensus.hpp"

using namespace popt;

namespace {

NodeState make_node(NodeId id, double u0, double p, double theta) {
  NodeState n;
  n.id = id;
  n.econ.id = id;
  n.econ.expected_utility = u0;
  n.econ.election_prob = p;
  n.econ.avg_volume = theta;
  return n;
}

ApplicantSet three_applicants() {
  Eigen::VectorXd pvs(3);
  pvs << 5.0, 1.0, 0.5;
  return ApplicantSet::from_pvs({10, 20, 30}, pvs);
}

ScenarioConfig small_scenario(std::uint64_t seed, int sellers = 6) {
  ScenarioConfig sc;
  sc.sellers = sellers;
  sc.buyers_a = 3;
  sc.buyers_b = 3;
  sc.buyers_c = 3;
  sc.seed = seed;
  return sc;
}

RoundConfig small_round(std::uint64_t seed, Strategy strategy) {
  RoundConfig rc;
  rc.strategy = strategy;
  rc.seed = seed;
  rc.gwo = {12, 25, 0, 1};
  rc.application_rule = ApplicationRule::AllApply;
  return rc;
}

}  // namespace

TEST_CASE("strategy names") {
  for (Strategy s :
       {Strategy::PoPT, Strategy::PoA, Strategy::PoT, Strategy::PoWModel})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(strategy_from_string("posw"), std::invalid_argument);
}

TEST_CASE("round config validation") {
  RoundConfig rc;
  CHECK_NOTHROW(rc.validate());
  rc.commission_rate = -0.1;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
  rc.commission_rate = 0.01;
  rc.pot_top_fraction = 0.0;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
  rc.pot_top_fraction = 0.1;
  rc.tamper_prob = 1.5;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
  rc.tamper_prob = 0.0;
  rc.horizon = 0;
  CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
}

TEST_CASE("application step") {
  std::vector<NodeState> pop = {make_node(1, 0.5, 0.5, 1.0),
                                make_node(2, 2.0, 0.5, 1.0),
                                make_node(3, 8.0, 0.5, 1.0)};
  CHECK(step_apply(pop, 0.0, 0.01).empty());

  // candidate rewards are u0 / slope; a reward between them splits the set
  const double slope = subjective_prob(0.5, 0.74) - 0.01;
  auto mid = step_apply(pop, 4.0 / slope, 0.01);
  REQUIRE(mid.size() == 2);
  CHECK(mid[0] == 0);
  CHECK(mid[1] == 1);
  CHECK(step_apply(pop, 100.0 / slope, 0.01).size() == 3);

  // cross-check against the willingness sign directly
  for (double r : {1.0, 5.0, 20.0, 80.0}) {
    auto apps = step_apply(pop, r, 0.01);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      bool applied = std::find(apps.begin(), apps.end(), i) != apps.end();
      CHECK(applied == (willingness(r, pop[i].econ, 0.01) > 0.0));
    }
  }
}

TEST_CASE("strategy probabilities") {
  ApplicantSet apps = three_applicants();
  MetricWeights equal;
  GwoConfig gwo{12, 30, 3, 1};

  SUBCASE("baselines are uniform") {
    for (Strategy s : {Strategy::PoA, Strategy::PoWModel}) {
      Eigen::VectorXd p = strategy_probabilities(s, apps, equal, gwo, 0.1);
      for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3.0));
    }
  }

  SUBCASE("trust strategy concentrates on the top PV nodes") {
    Eigen::VectorXd p =
        strategy_probabilities(Strategy::PoT, apps, equal, gwo, 0.1);
    CHECK(p[0] == 1.0);  // ceil(0.1 * 3) = 1 slot, highest PV
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 0.0);
    Eigen::VectorXd p2 =
        strategy_probabilities(Strategy::PoT, apps, equal, gwo, 0.6);
    CHECK(p2[0] == doctest::Approx(0.5));
    CHECK(p2[1] == doctest::Approx(0.5));
    CHECK(p2[2] == 0.0);
  }

  SUBCASE("optimized strategy solves on the simplex") {
    ElectionOutcome out;
    Eigen::VectorXd p =
        strategy_probabilities(Strategy::PoPT, apps, equal, gwo, 0.1, &out);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.minCoeff() >= 0.0);
    CHECK(out.comprehensive > 0.0);
  }
}

TEST_CASE("election step") {
  RoundConfig cfg = small_round(1, Strategy::PoA);

  SUBCASE("degenerate probability vector always elects its support") {
    Eigen::VectorXd pvs(3);
    pvs << 100.0, 0.0, 0.0;  // PoT top-1 puts all mass on applicant 10
    ApplicantSet apps = ApplicantSet::from_pvs({10, 20, 30}, pvs);
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
      ElectResult res = step_elect(apps, Strategy::PoT, cfg, 5, rng);
      CHECK(res.elected == 10);
    }
  }

  SUBCASE("uniform election draw is unbiased") {
    ApplicantSet apps = three_applicants();
    Rng rng(33);
    int counts[3] = {0, 0, 0};
    const int draws = 9000;
    for (int i = 0; i < draws; ++i)
      counts[step_elect(apps, Strategy::PoA, cfg, 5, rng).elected_index] += 1;
    // chi-square, 2 dof; 99th percentile ~ 9.21
    double chi2 = 0.0;
    for (int c : counts) {
      double e = draws / 3.0;
      chi2 += (c - e) * (c - e) / e;
    }
    CHECK(chi2 < 9.21);
  }

  SUBCASE("metrics are consistent with the probability vector") {
    ApplicantSet apps = three_applicants();
    Rng rng(11);
    ElectResult res = step_elect(apps, Strategy::PoA, cfg, 5, rng);
    CHECK(res.fairness ==
          doctest::Approx(fairness(apps.shares, res.probabilities)));
    CHECK(res.decentralization ==
          doctest::Approx(decentralization(res.probabilities)));
    CHECK(res.credibility ==
          doctest::Approx(credibility(apps.clamped, res.probabilities)));
  }

  Rng rng(1);
  CHECK_THROWS_AS(step_elect(ApplicantSet{}, Strategy::PoA, cfg, 1, rng),
                  std::invalid_argument);
}

TEST_CASE("interval step") {
  RoundConfig cfg = small_round(1, Strategy::PoPT);
  Rng rng(55);
  CHECK(step_interval(Strategy::PoPT, cfg, rng) == 12.0);
  CHECK(step_interval(Strategy::PoA, cfg, rng) == 12.0);
  CHECK(step_interval(Strategy::PoT, cfg, rng) == 12.0);

  double sum = 0.0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i)
    sum += step_interval(Strategy::PoWModel, cfg, rng);
  CHECK(sum / samples == doctest::Approx(600.0).epsilon(0.05));

  Rng a(77), b(77);
  CHECK(step_interval(Strategy::PoWModel, cfg, a) ==
        step_interval(Strategy::PoWModel, cfg, b));
}

TEST_CASE("simulation") {
  SUBCASE("zero rounds leaves only the genesis block") {
    Simulation sim(small_round(3, Strategy::PoPT), small_scenario(3));
    Chain chain = sim.run(0);
    CHECK(chain.blocks.size() == 1);
    CHECK(chain.blocks[0].height == 0);
    CHECK(chain.snapshots.empty());
  }

  SUBCASE("single seller is always elected, any strategy") {
    for (Strategy s : {Strategy::PoPT, Strategy::PoA, Strategy::PoT,
                       Strategy::PoWModel}) {
      Simulation sim(small_round(5, s), small_scenario(5, 1));
      Chain chain = sim.run(4);
      for (const RoundSnapshot& snap : chain.snapshots) {
        REQUIRE(snap.status == RoundStatus::Linked);
        CHECK(snap.elected == 1);
      }
    }
  }

  SUBCASE("chain safety and reward conservation") {
    Simulation sim(small_round(7, Strategy::PoA), small_scenario(7));
    Chain chain = sim.run(12);
    REQUIRE(chain.blocks.size() >= 2);
    double block_rewards = 0.0;
    for (std::size_t i = 1; i < chain.blocks.size(); ++i) {
      CHECK(chain.blocks[i].height == static_cast<int>(i));
      CHECK(chain.blocks[i].parent_height == chain.blocks[i - 1].height);
      CHECK(chain.blocks[i].integrity_ok);
      CHECK_FALSE(chain.blocks[i].txs.empty());
      block_rewards += chain.blocks[i].reward;
    }
    double snapshot_rewards = 0.0;
    for (const RoundSnapshot& snap : chain.snapshots)
      if (snap.status == RoundStatus::Linked) snapshot_rewards += snap.r_star;
    CHECK(sim.total_rewards_paid() == doctest::Approx(block_rewards));
    CHECK(sim.total_rewards_paid() == doctest::Approx(snapshot_rewards));

    double balances = 0.0;
    std::set<NodeId> recorders;
    for (std::size_t i = 1; i < chain.blocks.size(); ++i)
      recorders.insert(chain.blocks[i].recorder);
    for (NodeId id : recorders) balances += sim.balance(id);
    CHECK(balances == doctest::Approx(sim.total_rewards_paid()));
    CHECK(sim.balance(9999) == 0.0);
  }

  SUBCASE("deterministic for a fixed seed") {
    auto run_once = [] {
      Simulation sim(small_round(11, Strategy::PoPT), small_scenario(11));
      return sim.run(6);
    };
    Chain a = run_once();
    Chain b = run_once();
    REQUIRE(a.blocks.size() == b.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
      CHECK(a.blocks[i].recorder == b.blocks[i].recorder);
      CHECK(a.blocks[i].reward == b.blocks[i].reward);
    }
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
      CHECK(a.snapshots[i].comprehensive == b.snapshots[i].comprehensive);
      CHECK(a.snapshots[i].interval_s == b.snapshots[i].interval_s);
    }
  }

  SUBCASE("universal tampering orphans every round") {
    RoundConfig rc = small_round(13, Strategy::PoA);
    rc.tamper_prob = 1.0;
    Simulation sim(rc, small_scenario(13));
    Chain chain = sim.run(8);
    CHECK(chain.blocks.size() == 1);
    CHECK(chain.orphan_count == 8);
    for (const RoundSnapshot& snap : chain.snapshots)
      CHECK(snap.status == RoundStatus::Orphaned);
    CHECK(sim.total_rewards_paid() == 0.0);
  }

  SUBCASE("partial tampering orphans at a plausible frequency") {
    RoundConfig rc = small_round(17, Strategy::PoA);
    rc.tamper_prob = 0.3;
    Simulation sim(rc, small_scenario(17));
    Chain chain = sim.run(200);
    // Binomial(200, 0.3): +/- 5 sigma around 60
    CHECK(chain.orphan_count > 60 - 33);
    CHECK(chain.orphan_count < 60 + 33);
  }

  SUBCASE("per-node tampering only hurts that node") {
    RoundConfig rc = small_round(19, Strategy::PoA);
    Simulation sim(rc, small_scenario(19));
    sim.set_tamper_prob(2, 1.0);
    Chain chain = sim.run(30);
    for (std::size_t i = 1; i < chain.blocks.size(); ++i)
      CHECK(chain.blocks[i].recorder != 2);
    CHECK(chain.orphan_count > 0);
    CHECK_THROWS_AS(sim.set_tamper_prob(404, 0.5), std::out_of_range);
  }
}

TEST_CASE("snapshot CSV and chain JSONL") {
  Simulation sim(small_round(23, Strategy::PoA), small_scenario(23));
  Chain chain = sim.run(3);

  std::stringstream csv;
  write_snapshots_csv(csv, chain.snapshots);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "round,strategy,N_a,F,D,C,O,R_star,elected_id,interval_s,status");
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line.find("poa") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 3);

  std::stringstream jsonl;
  write_chain_jsonl(jsonl, chain);
  std::size_t blocks = 0;
  while (std::getline(jsonl, line)) {
    nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["height"].get<int>() == static_cast<int>(blocks));
    if (blocks > 0) {
      CHECK(j["parent_height"].get<int>() == static_cast<int>(blocks) - 1);
      CHECK_FALSE(j["txs"].empty());
    }
    ++blocks;
  }
  CHECK(blocks == chain.blocks.size());
}
