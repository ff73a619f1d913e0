// Rolling window of per-slot pairwise prospect-value matrices plus each
// node's discounted accumulated PV.

#ifndef POPT_PV_LEDGER_HPP
#define POPT_PV_LEDGER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "popt/prospect.hpp"

namespace popt {

using NodeId = std::int64_t;

/// One trade: buyer j pays trade_price to seller i at a given block slot;
/// expected_price is the seller's reference point, willingness the buyer's
/// probability of agreeing to the trade.
struct InteractionRecord {
  std::int64_t slot = 0;
  NodeId seller = 0;
  NodeId buyer = 0;
  double trade_price = 0.0;
  double expected_price = 0.0;
  double willingness = 0.0;

  void validate() const;
};

/// Raw PV of one interaction: v(trade_price; expected_price) * pi(willingness).
double pairwise_pv(const InteractionRecord& rec, const ProspectParams& params);

/// Scale every nonzero column to unit Euclidean norm; zero columns stay zero.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& raw);

/// Per-slot seller x buyer PV matrix, raw and column-normalized.
struct PvMatrix {
  std::int64_t slot = 0;
  std::vector<NodeId> sellers;
  std::vector<NodeId> buyers;
  Eigen::MatrixXd raw;
  Eigen::MatrixXd normalized;
};

class PvLedger {
 public:
  explicit PvLedger(int horizon = 10, double loss_factor = 0.9);

  int horizon() const { return horizon_; }
  double loss_factor() const { return loss_factor_; }

  /// Build, normalize, and store one slot's matrix from its interactions.
  /// Records must all carry the given slot. An empty slot is a no-op
  /// (idle slots contribute zero).
  void add_slot(std::int64_t slot, std::span<const InteractionRecord> records,
                const ProspectParams& params);

  /// Group a record stream by slot (ascending) and add each slot.
  void ingest(std::span<const InteractionRecord> records,
              const ProspectParams& params);

  /// Discounted window sum: sum over k in (now-T+1 .. now) of
  /// l^(now-k) * (1/J_k) * row-mean of the node's normalized row.
  /// Slots with no matrix, or where the node did not sell, contribute zero.
  double accumulate(NodeId node, std::int64_t now) const;

  const std::set<NodeId>& known_sellers() const { return sellers_seen_; }
  const PvMatrix* slot_matrix(std::int64_t slot) const;

 private:
  int horizon_;
  double loss_factor_;
  std::map<std::int64_t, PvMatrix> window_;  // keyed by slot, pruned to T
  std::set<NodeId> sellers_seen_;
};

/// CSV schema: slot,seller_id,buyer_id,trade_price,expected_price,willingness
std::vector<InteractionRecord> read_interactions_csv(std::istream& in);
void write_interactions_csv(std::ostream& out,
                            std::span<const InteractionRecord> records);

}  // namespace popt

#endif  // POPT_PV_LEDGER_HPP
