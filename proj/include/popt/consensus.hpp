// Round driver for the five-step consensus protocol over a simulated node
// population, with PoA / PoT / PoW-model baseline election strategies.

#ifndef POPT_CONSENSUS_HPP
#define POPT_CONSENSUS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "popt/election.hpp"
#include "popt/reward.hpp"
#include "popt/rng.hpp"
#include "popt/scenario.hpp"

namespace popt {

enum class Strategy { PoPT, PoA, PoT, PoWModel };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

/// How the information contract assigns each ordinary node the election
/// probability entering its willingness: a provisional full-population
/// optimization, or a fixed 1/N prior.
enum class ProbPrior { ProvisionalP1, UniformPrior };

/// Whether rounds gate applications on willingness > 0 or every node
/// applies unconditionally.
enum class ApplicationRule { WillingnessGate, AllApply };

struct NodeState {
  NodeId id = 0;
  NodeEconomics econ;
  double tamper_prob = 0.0;
};

struct Block {
  int height = 0;
  std::int64_t slot = -1;
  NodeId recorder = -1;
  std::vector<InteractionRecord> txs;
  int parent_height = -1;
  bool integrity_ok = true;
  double reward = 0.0;
};

enum class RoundStatus { Linked, Orphaned, Skipped };

struct RoundSnapshot {
  int round = 0;
  Strategy strategy = Strategy::PoPT;
  int num_applicants = 0;
  double fairness = 0.0;
  double decentralization = 0.0;
  double credibility = 0.0;
  double comprehensive = 0.0;
  double r_star = 0.0;
  NodeId elected = -1;
  double interval_s = 0.0;
  RoundStatus status = RoundStatus::Skipped;
};

struct Chain {
  std::vector<Block> blocks;  // blocks[0] is the genesis block
  int orphan_count = 0;
  std::vector<RoundSnapshot> snapshots;
};

struct RoundConfig {
  Strategy strategy = Strategy::PoPT;
  MetricWeights weights;
  GwoConfig gwo;
  double commission_rate = 0.01;
  std::uint64_t seed = 0;
  ProbPrior prior = ProbPrior::UniformPrior;
  ApplicationRule application_rule = ApplicationRule::WillingnessGate;
  double popt_interval_s = 12.0;       // simulated seconds per PoPT block
  double pow_mean_interval_s = 600.0;  // mean of the PoW-model draw
  double pot_top_fraction = 0.1;       // PoT "high reputation" cut
  double tamper_prob = 0.0;
  int horizon = 10;
  double loss_factor = 0.9;
  double u0_lo = 0.5, u0_hi = 2.0;        // expected-utility draw
  double theta_lo = 0.5, theta_hi = 2.0;  // avg-volume draw
  double rationality = 0.74;

  void validate() const;
};

/// Step I: indices of nodes whose willingness at the published (R, k) is
/// strictly positive.
std::vector<std::size_t> step_apply(std::span<const NodeState> population,
                                    double reward, double rate);

struct ElectResult {
  Eigen::VectorXd probabilities;
  std::size_t elected_index = 0;
  NodeId elected = -1;
  double fairness = 0.0;
  double decentralization = 0.0;
  double credibility = 0.0;
  double comprehensive = 0.0;
  ElectionOutcome popt;  // populated only for Strategy::PoPT
};

/// Probability vector a strategy assigns over the applicant set.
Eigen::VectorXd strategy_probabilities(Strategy strategy,
                                       const ApplicantSet& apps,
                                       const MetricWeights& weights,
                                       const GwoConfig& gwo,
                                       double pot_top_fraction,
                                       ElectionOutcome* popt_out = nullptr);

/// Step II: probabilities plus a seeded categorical draw of the recorder.
ElectResult step_elect(const ApplicantSet& apps, Strategy strategy,
                       const RoundConfig& cfg, std::uint64_t election_seed,
                       Rng& draw_rng);

/// Simulated seconds consumed by one round's election.
double step_interval(Strategy strategy, const RoundConfig& cfg, Rng& rng);

class Simulation {
 public:
  Simulation(const RoundConfig& cfg, const ScenarioConfig& scenario_cfg);

  /// Execute `rounds` full protocol rounds and return the resulting chain.
  Chain run(int rounds);

  const std::vector<NodeState>& population() const { return population_; }
  void set_tamper_prob(NodeId id, double q);
  double total_rewards_paid() const { return total_rewards_; }
  double balance(NodeId id) const;

 private:
  RoundConfig cfg_;
  SmartGridScenario scenario_;
  std::vector<NodeState> population_;
  double total_rewards_ = 0.0;
  std::map<NodeId, double> balances_;
};

/// CSV columns:
/// round,strategy,N_a,F,D,C,O,R_star,elected_id,interval_s,status
void write_snapshots_csv(std::ostream& out,
                         std::span<const RoundSnapshot> snapshots);

/// One JSON object per line, one block per line.
void write_chain_jsonl(std::ostream& out, const Chain& chain);

}  // namespace popt

#endif  // POPT_CONSENSUS_HPP
