#include "popt/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"

namespace popt {

InfeasibleRateError::InfeasibleRateError(double rate, double bound,
                                         NodeId binding_node)
    : std::domain_error("commission rate " + std::to_string(rate) +
                        " violates the individual-rationality bound " +
                        std::to_string(bound) + " set by node " +
                        std::to_string(binding_node)),
      binding_node_(binding_node) {}

double subjective_prob(double p, double phi_i) { return weight_fn(p, phi_i); }

double node_utility(double reward, const NodeEconomics& econ, double rate) {
  econ.validate();
  if (reward < 0.0) throw std::invalid_argument("node_utility: reward < 0");
  if (rate < 0.0) throw std::invalid_argument("node_utility: rate < 0");
  const double pi = subjective_prob(econ.election_prob, econ.rationality);
  return pi * reward - rate * reward * econ.avg_volume;
}

double willingness(double reward, const NodeEconomics& econ, double rate) {
  const double u = node_utility(reward, econ, rate);
  return value_fn(u, econ.expected_utility, econ.params);
}

double rate_bound(std::span<const NodeEconomics> nodes) {
  if (nodes.empty()) throw std::domain_error("rate_bound: empty node list");
  double bound = std::numeric_limits<double>::infinity();
  for (const NodeEconomics& n : nodes) {
    n.validate();
    bound = std::min(bound,
                     subjective_prob(n.election_prob, n.rationality) /
                         n.avg_volume);
  }
  return bound;
}

RewardQuote optimal_reward(std::span<const NodeEconomics> nodes, double rate) {
  if (nodes.empty())
    throw std::domain_error("optimal_reward: empty node list");
  if (rate < 0.0)
    throw std::invalid_argument("optimal_reward: negative rate");

  RewardQuote quote;
  quote.commission_rate = rate;
  quote.rate_bound = rate_bound(nodes);
  if (rate >= quote.rate_bound) {
    // name the binding node
    const NodeEconomics* binding = &nodes[0];
    double best = std::numeric_limits<double>::infinity();
    for (const NodeEconomics& n : nodes) {
      double b = subjective_prob(n.election_prob, n.rationality) / n.avg_volume;
      if (b < best) {
        best = b;
        binding = &n;
      }
    }
    throw InfeasibleRateError(rate, quote.rate_bound, binding->id);
  }

  std::vector<double> candidates;
  candidates.reserve(nodes.size());
  for (const NodeEconomics& n : nodes) {
    const double slope =
        subjective_prob(n.election_prob, n.rationality) - rate * n.avg_volume;
    quote.per_node.push_back({n.id, n.expected_utility / slope});
    candidates.push_back(n.expected_utility / slope);
  }

  std::sort(candidates.begin(), candidates.end());
  const std::size_t m = candidates.size();
  quote.aggregate = (m % 2 == 1)
                        ? candidates[m / 2]
                        : 0.5 * (candidates[m / 2 - 1] + candidates[m / 2]);
  return quote;
}

void write_quote_json(std::ostream& out, const RewardQuote& quote) {
  nlohmann::json j;
  j["k"] = quote.commission_rate;
  j["rate_bound"] = quote.rate_bound;
  j["aggregate"] = quote.aggregate;
  j["per_node"] = nlohmann::json::array();
  for (const auto& pn : quote.per_node) {
    nlohmann::json e;
    e["id"] = pn.id;
    if (pn.candidate)
      e["candidate"] = *pn.candidate;
    else
      e["candidate"] = "infeasible";
    j["per_node"].push_back(e);
  }
  out << j.dump(2) << '\n';
}

}  // namespace popt
