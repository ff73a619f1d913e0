// Block-reward engine: per-node willingness, subjective election
// probability, commission, the closed-form candidate reward, median
// aggregation, and the commission-rate feasibility bound.

#ifndef POPT_REWARD_HPP
#define POPT_REWARD_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "popt/prospect.hpp"
#include "popt/pv_ledger.hpp"

namespace popt {

/// Economic view of one node as seen by the reward engine.
struct NodeEconomics {
  NodeId id = 0;
  double expected_utility = 0.0;  // u_i^0
  double election_prob = 0.0;     // p_i in [0,1]
  double rationality = 0.74;      // phi_i
  double avg_volume = 1.0;        // theta_i > 0
  ProspectParams params;

  void validate() const {
    if (expected_utility < 0.0)
      throw std::invalid_argument("NodeEconomics: expected_utility < 0");
    if (!(election_prob >= 0.0 && election_prob <= 1.0))
      throw std::invalid_argument("NodeEconomics: election_prob outside [0,1]");
    if (!(avg_volume > 0.0))
      throw std::invalid_argument("NodeEconomics: avg_volume must be > 0");
    if (!(rationality > 0.0))
      throw std::invalid_argument("NodeEconomics: rationality must be > 0");
  }
};

struct RewardQuote {
  struct PerNode {
    NodeId id = 0;
    std::optional<double> candidate;  // nullopt = infeasible at this rate
  };
  std::vector<PerNode> per_node;
  double aggregate = 0.0;        // median of feasible candidates
  double commission_rate = 0.0;  // k
  double rate_bound = 0.0;       // min_i pi(p_i)/theta_i (exclusive)
};

/// Thrown when the commission rate violates the individual-rationality
/// bound k < min_i pi(p_i)/theta_i.
class InfeasibleRateError : public std::domain_error {
 public:
  InfeasibleRateError(double rate, double bound, NodeId binding_node);
  NodeId binding_node() const { return binding_node_; }

 private:
  NodeId binding_node_;
};

/// Subjective election probability pi(p) with per-node rationality phi_i.
double subjective_prob(double p, double phi_i);

/// Actual utility u_i = pi(p_i) R - k R theta_i.
double node_utility(double reward, const NodeEconomics& econ, double rate);

/// Prospect-shaped willingness of the node around its expected utility.
double willingness(double reward, const NodeEconomics& econ, double rate);

/// Exclusive upper bound on the commission rate: min_i pi(p_i)/theta_i.
double rate_bound(std::span<const NodeEconomics> nodes);

/// Per-node candidate rewards u_i^0 / (pi(p_i) - k theta_i) and their
/// median. Throws InfeasibleRateError when the rate violates the bound.
RewardQuote optimal_reward(std::span<const NodeEconomics> nodes, double rate);

/// JSON: {k, rate_bound, per_node: [{id, candidate|"infeasible"}], aggregate}
void write_quote_json(std::ostream& out, const RewardQuote& quote);

}  // namespace popt

#endif  // POPT_REWARD_HPP
