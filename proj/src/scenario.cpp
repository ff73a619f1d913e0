#include "popt/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "popt/rng.hpp"

namespace popt {

void TraderProfile::validate() const {
  if (side == Side::Seller) {
    if (reference_bid < kPriceFloor)
      throw std::invalid_argument("TraderProfile: seller RB below price floor");
  } else {
    if (band_lo > band_hi)
      throw std::invalid_argument("TraderProfile: bid band lo > hi");
    if (band_lo < kPriceFloor)
      throw std::invalid_argument("TraderProfile: bid band below price floor");
  }
  if (lambda_override && *lambda_override < 0.0)
    throw std::invalid_argument("TraderProfile: negative lambda override");
}

void ScenarioConfig::validate() const {
  if (sellers < 1) throw std::invalid_argument("ScenarioConfig: sellers < 1");
  if (buyers_a < 0 || buyers_b < 0 || buyers_c < 0)
    throw std::invalid_argument("ScenarioConfig: negative buyer count");
  if (interactions_per_buyer < 0)
    throw std::invalid_argument("ScenarioConfig: interactions_per_buyer < 0");
  if (!(seller_rb_lo >= kPriceFloor && seller_rb_hi >= seller_rb_lo))
    throw std::invalid_argument("ScenarioConfig: bad seller RB range");
  if (price_floor < kPriceFloor)
    throw std::invalid_argument("ScenarioConfig: price floor below 0.5");
  params.validate();
}

TraderProfile make_buyer(NodeId id, char type_tag) {
  TraderProfile p;
  p.id = id;
  p.side = TraderProfile::Side::Buyer;
  p.type_tag = type_tag;
  switch (type_tag) {
    case 'A': p.band_lo = 0.5; p.band_hi = 0.7; break;
    case 'B': p.band_lo = 0.7; p.band_hi = 1.0; break;
    case 'C': p.band_lo = 1.0; p.band_hi = 1.2; break;
    default:
      throw std::invalid_argument("make_buyer: unknown buyer type");
  }
  return p;
}

SmartGridScenario::SmartGridScenario(ScenarioConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(mix_seed(cfg_.seed, 0xC0FFEE));
  NodeId next_id = 1;
  for (int i = 0; i < cfg_.sellers; ++i) {
    TraderProfile p;
    p.id = next_id++;
    p.side = TraderProfile::Side::Seller;
    p.reference_bid = rng.uniform(cfg_.seller_rb_lo, cfg_.seller_rb_hi);
    p.validate();
    sellers_.push_back(p);
  }
  auto add_buyers = [&](int count, char tag) {
    for (int i = 0; i < count; ++i) buyers_.push_back(make_buyer(next_id++, tag));
  };
  add_buyers(cfg_.buyers_a, 'A');
  add_buyers(cfg_.buyers_b, 'B');
  add_buyers(cfg_.buyers_c, 'C');
}

std::vector<InteractionRecord> SmartGridScenario::generate_slot(
    std::int64_t slot) const {
  if (slot < 0) throw std::invalid_argument("generate_slot: negative slot");
  Rng rng(mix_seed(cfg_.seed, static_cast<std::uint64_t>(slot) + 1));
  std::vector<InteractionRecord> out;
  out.reserve(buyers_.size() * static_cast<std::size_t>(cfg_.interactions_per_buyer));
  for (const TraderProfile& buyer : buyers_) {
    for (int k = 0; k < cfg_.interactions_per_buyer; ++k) {
      const TraderProfile& seller = sellers_[rng.uniform_index(sellers_.size())];
      InteractionRecord rec;
      rec.slot = slot;
      rec.seller = seller.id;
      rec.buyer = buyer.id;
      rec.trade_price =
          std::max(cfg_.price_floor, rng.uniform(buyer.band_lo, buyer.band_hi));
      rec.expected_price = seller.reference_bid;
      rec.willingness = rng.uniform();
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<PvSurfacePoint> pv_sweep(std::span<const double> rb_grid,
                                     std::span<const double> lambda_grid,
                                     std::span<const double> bid_grid,
                                     const ProspectParams& params,
                                     double willingness) {
  if (rb_grid.empty() || lambda_grid.empty() || bid_grid.empty())
    throw std::invalid_argument("pv_sweep: empty grid");
  std::vector<PvSurfacePoint> out;
  out.reserve(rb_grid.size() * lambda_grid.size() * bid_grid.size());
  for (double rb : rb_grid) {
    for (double lambda : lambda_grid) {
      ProspectParams p = params;
      p.lambda = lambda;
      for (double bid : bid_grid) {
        InteractionRecord rec;
        rec.slot = 0;
        rec.seller = 1;
        rec.buyer = 2;
        rec.trade_price = bid;
        rec.expected_price = rb;
        rec.willingness = willingness;
        out.push_back({rb, lambda, bid, pairwise_pv(rec, p)});
      }
    }
  }
  return out;
}

}  // namespace popt
