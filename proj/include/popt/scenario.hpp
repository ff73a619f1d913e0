// Smart-grid energy-trading workload: sellers with reference bids, buyer
// types A/B/C with banded bids, and per-slot interaction streams.

#ifndef POPT_SCENARIO_HPP
#define POPT_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "popt/prospect.hpp"
#include "popt/pv_ledger.hpp"

namespace popt {

inline constexpr double kPriceFloor = 0.5;  // national standard price, yuan/kWh

struct TraderProfile {
  enum class Side { Seller, Buyer };
  NodeId id = 0;
  Side side = Side::Buyer;
  double reference_bid = kPriceFloor;  // sellers: expected price (RB)
  double band_lo = kPriceFloor;        // buyers: bid band
  double band_hi = kPriceFloor;
  std::optional<double> lambda_override;
  char type_tag = '-';  // 'A' | 'B' | 'C' | custom

  void validate() const;
};

struct ScenarioConfig {
  int sellers = 100;
  int buyers_a = 20;
  int buyers_b = 20;
  int buyers_c = 20;
  int interactions_per_buyer = 1;  // trades each buyer makes per slot
  double seller_rb_lo = 0.5;
  double seller_rb_hi = 1.0;
  double price_floor = kPriceFloor;
  std::uint64_t seed = 0;
  ProspectParams params;

  void validate() const;
};

/// Standard bid bands for the three buyer types.
TraderProfile make_buyer(NodeId id, char type_tag);

class SmartGridScenario {
 public:
  explicit SmartGridScenario(ScenarioConfig cfg);

  /// Interactions for one slot: every buyer trades with uniformly chosen
  /// sellers; trade price drawn from the buyer's band (floored), willingness
  /// uniform on [0,1]. Deterministic per (config seed, slot).
  std::vector<InteractionRecord> generate_slot(std::int64_t slot) const;

  const std::vector<TraderProfile>& sellers() const { return sellers_; }
  const std::vector<TraderProfile>& buyers() const { return buyers_; }
  const ScenarioConfig& config() const { return cfg_; }

 private:
  ScenarioConfig cfg_;
  std::vector<TraderProfile> sellers_;
  std::vector<TraderProfile> buyers_;
};

struct PvSurfacePoint {
  double reference_bid = 0.0;
  double lambda = 0.0;
  double bid = 0.0;
  double pv = 0.0;
};

/// Tabulate the pairwise PV over (RB, lambda, bid) grids at a fixed
/// willingness; used for the seller-personality sweep.
std::vector<PvSurfacePoint> pv_sweep(std::span<const double> rb_grid,
                                     std::span<const double> lambda_grid,
                                     std::span<const double> bid_grid,
                                     const ProspectParams& params,
                                     double willingness = 0.5);

}  // namespace popt

#endif  // POPT_SCENARIO_HPP
