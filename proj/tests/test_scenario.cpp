#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "popt/scenario.hpp"

using namespace popt;

TEST_CASE("trader and config validation") {
  TraderProfile seller;
  seller.side = TraderProfile::Side::Seller;
  seller.reference_bid = 0.4;
  CHECK_THROWS_AS(seller.validate(), std::invalid_argument);
  seller.reference_bid = 0.8;
  CHECK_NOTHROW(seller.validate());

  TraderProfile buyer;
  buyer.band_lo = 0.9;
  buyer.band_hi = 0.7;
  CHECK_THROWS_AS(buyer.validate(), std::invalid_argument);
  buyer.band_lo = 0.3;
  CHECK_THROWS_AS(buyer.validate(), std::invalid_argument);
  buyer.band_lo = 0.7;
  buyer.band_hi = 0.9;
  buyer.lambda_override = -1.0;
  CHECK_THROWS_AS(buyer.validate(), std::invalid_argument);

  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.sellers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.sellers = 10;
  cfg.buyers_b = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.buyers_b = 5;
  cfg.seller_rb_lo = 0.3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.seller_rb_lo = 0.5;
  cfg.price_floor = 0.2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("buyer type bands") {
  CHECK(make_buyer(1, 'A').band_lo == 0.5);
  CHECK(make_buyer(1, 'A').band_hi == 0.7);
  CHECK(make_buyer(1, 'B').band_lo == 0.7);
  CHECK(make_buyer(1, 'B').band_hi == 1.0);
  CHECK(make_buyer(1, 'C').band_lo == 1.0);
  CHECK(make_buyer(1, 'C').band_hi == 1.2);
  CHECK_THROWS_AS(make_buyer(1, 'X'), std::invalid_argument);
}

TEST_CASE("scenario generation") {
  ScenarioConfig cfg;
  cfg.sellers = 10;
  cfg.buyers_a = 4;
  cfg.buyers_b = 3;
  cfg.buyers_c = 2;
  cfg.seed = 123;
  SmartGridScenario scenario(cfg);

  CHECK(scenario.sellers().size() == 10);
  CHECK(scenario.buyers().size() == 9);

  SUBCASE("ids are sequential and sides/RBs are well formed") {
    NodeId expect = 1;
    for (const auto& s : scenario.sellers()) {
      CHECK(s.id == expect++);
      CHECK(s.side == TraderProfile::Side::Seller);
      CHECK(s.reference_bid >= cfg.seller_rb_lo);
      CHECK(s.reference_bid <= cfg.seller_rb_hi);
    }
    for (const auto& b : scenario.buyers()) CHECK(b.id == expect++);
  }

  SUBCASE("slot structure") {
    auto recs = scenario.generate_slot(3);
    REQUIRE(recs.size() == 9);
    std::set<NodeId> seller_ids;
    for (const auto& s : scenario.sellers()) seller_ids.insert(s.id);
    std::size_t idx = 0;
    for (const auto& r : recs) {
      CHECK(r.slot == 3);
      CHECK(seller_ids.contains(r.seller));
      CHECK(r.buyer == scenario.buyers()[idx].id);
      CHECK(r.trade_price >= cfg.price_floor);
      const auto& buyer = scenario.buyers()[idx];
      CHECK(r.trade_price <= buyer.band_hi + 1e-12);
      if (buyer.type_tag == 'A') CHECK(r.trade_price <= 0.7 + 1e-12);
      CHECK(r.willingness >= 0.0);
      CHECK(r.willingness <= 1.0);
      CHECK_NOTHROW(r.validate());
      ++idx;
    }
    CHECK_THROWS_AS(scenario.generate_slot(-1), std::invalid_argument);
  }

  SUBCASE("deterministic per (seed, slot); distinct across slots and seeds") {
    auto a = scenario.generate_slot(5);
    auto b = scenario.generate_slot(5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].seller == b[i].seller);
      CHECK(a[i].trade_price == b[i].trade_price);
      CHECK(a[i].willingness == b[i].willingness);
    }
    auto c = scenario.generate_slot(6);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i)
      differs |= (a[i].trade_price != c[i].trade_price);
    CHECK(differs);

    ScenarioConfig other = cfg;
    other.seed = 124;
    auto d = SmartGridScenario(other).generate_slot(5);
    bool seed_differs = false;
    for (std::size_t i = 0; i < a.size(); ++i)
      seed_differs |= (a[i].trade_price != d[i].trade_price);
    CHECK(seed_differs);
  }

  SUBCASE("zero interactions per buyer") {
    ScenarioConfig none = cfg;
    none.interactions_per_buyer = 0;
    CHECK(SmartGridScenario(none).generate_slot(0).empty());
  }
}

TEST_CASE("pv sweep") {
  ProspectParams params;
  std::vector<double> rbs = {0.6, 0.8};
  std::vector<double> lambdas = {1.0, 2.25};
  std::vector<double> bids = {0.6, 0.8, 1.0};
  auto surface = pv_sweep(rbs, lambdas, bids, params, 0.5);
  REQUIRE(surface.size() == rbs.size() * lambdas.size() * bids.size());

  auto at = [&](double rb, double lambda, double bid) {
    for (const auto& p : surface)
      if (p.reference_bid == rb && p.lambda == lambda && p.bid == bid)
        return p.pv;
    FAIL("grid point missing");
    return 0.0;
  };

  // at the reference bid the PV vanishes; above it lambda is irrelevant
  CHECK(at(0.6, 1.0, 0.6) == 0.0);
  CHECK(at(0.6, 2.25, 0.6) == 0.0);
  CHECK(at(0.6, 1.0, 0.8) == at(0.6, 2.25, 0.8));
  CHECK(at(0.6, 1.0, 0.8) > 0.0);
  // -2.25 * 0.2^0.88 * w(0.5), frozen from a high-precision evaluation
  CHECK(at(0.8, 2.25, 0.6) ==
        doctest::Approx(-0.2546604421772295).epsilon(1e-12));
  // losses deepen with lambda; PV rises with the bid, falls with the RB
  CHECK(at(0.8, 2.25, 0.6) < at(0.8, 1.0, 0.6));
  CHECK(at(0.8, 2.25, 0.6) < at(0.8, 2.25, 0.8));
  CHECK(at(0.8, 2.25, 1.0) < at(0.6, 2.25, 1.0));

  CHECK_THROWS_AS(pv_sweep({}, lambdas, bids, params), std::invalid_argument);
}
