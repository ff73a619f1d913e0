#include "popt/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "popt/rng.hpp"

namespace popt {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::PoPT: return "popt";
    case Strategy::PoA: return "poa";
    case Strategy::PoT: return "pot";
    case Strategy::PoWModel: return "pow";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "popt") return Strategy::PoPT;
  if (s == "poa") return Strategy::PoA;
  if (s == "pot") return Strategy::PoT;
  if (s == "pow") return Strategy::PoWModel;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

void RoundConfig::validate() const {
  weights.validate();
  gwo.validate();
  if (commission_rate < 0.0)
    throw std::invalid_argument("RoundConfig: negative commission rate");
  if (!(pot_top_fraction > 0.0 && pot_top_fraction <= 1.0))
    throw std::invalid_argument("RoundConfig: pot_top_fraction outside (0,1]");
  if (!(tamper_prob >= 0.0 && tamper_prob <= 1.0))
    throw std::invalid_argument("RoundConfig: tamper_prob outside [0,1]");
  if (popt_interval_s < 0.0 || pow_mean_interval_s <= 0.0)
    throw std::invalid_argument("RoundConfig: bad interval settings");
  if (horizon < 1 || !(loss_factor > 0.0 && loss_factor <= 1.0))
    throw std::invalid_argument("RoundConfig: bad ledger settings");
  if (!(u0_lo >= 0.0 && u0_hi >= u0_lo) || !(theta_lo > 0.0 && theta_hi >= theta_lo))
    throw std::invalid_argument("RoundConfig: bad economics draw ranges");
  if (!(rationality > 0.0))
    throw std::invalid_argument("RoundConfig: rationality must be > 0");
}

std::vector<std::size_t> step_apply(std::span<const NodeState> population,
                                    double reward, double rate) {
  std::vector<std::size_t> applicants;
  for (std::size_t i = 0; i < population.size(); ++i)
    if (willingness(reward, population[i].econ, rate) > 0.0)
      applicants.push_back(i);
  return applicants;
}

Eigen::VectorXd strategy_probabilities(Strategy strategy,
                                       const ApplicantSet& apps,
                                       const MetricWeights& weights,
                                       const GwoConfig& gwo,
                                       double pot_top_fraction,
                                       ElectionOutcome* popt_out) {
  const Eigen::Index n = apps.shares.size();
  switch (strategy) {
    case Strategy::PoPT: {
      ElectionOutcome out = solve_p1(apps, weights, gwo);
      Eigen::VectorXd p = out.probabilities;
      if (popt_out != nullptr) *popt_out = std::move(out);
      return p;
    }
    case Strategy::PoA:
    case Strategy::PoWModel:
      return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    case Strategy::PoT: {
      const Eigen::Index top = std::max<Eigen::Index>(
          1, static_cast<Eigen::Index>(
                 std::ceil(pot_top_fraction * static_cast<double>(n))));
      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return apps.pvs[a] > apps.pvs[b];
                       });
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
      for (Eigen::Index k = 0; k < top; ++k)
        p[order[static_cast<std::size_t>(k)]] = 1.0 / static_cast<double>(top);
      return p;
    }
  }
  throw std::logic_error("strategy_probabilities: unreachable");
}

ElectResult step_elect(const ApplicantSet& apps, Strategy strategy,
                       const RoundConfig& cfg, std::uint64_t election_seed,
                       Rng& draw_rng) {
  if (apps.ids.empty())
    throw std::invalid_argument("step_elect: empty applicant set");
  ElectResult res;
  GwoConfig gwo = cfg.gwo;
  gwo.seed = election_seed;
  if (strategy == Strategy::PoPT) {
    res.probabilities = strategy_probabilities(strategy, apps, cfg.weights,
                                               gwo, cfg.pot_top_fraction,
                                               &res.popt);
    res.fairness = res.popt.fairness;
    res.decentralization = res.popt.decentralization;
    res.credibility = res.popt.credibility;
    res.comprehensive = res.popt.comprehensive;
  } else {
    res.probabilities = strategy_probabilities(strategy, apps, cfg.weights,
                                               gwo, cfg.pot_top_fraction);
    res.fairness = fairness(apps.shares, res.probabilities);
    res.decentralization = decentralization(res.probabilities);
    res.credibility = apps.degenerate
                          ? 1.0
                          : credibility(apps.clamped, res.probabilities);
    res.comprehensive = safe_comprehensive(res.fairness, res.decentralization,
                                           res.credibility, cfg.weights);
  }
  res.elected_index = draw_rng.categorical(
      std::span<const double>(res.probabilities.data(),
                              static_cast<std::size_t>(res.probabilities.size())));
  res.elected = apps.ids[res.elected_index];
  return res;
}

double step_interval(Strategy strategy, const RoundConfig& cfg, Rng& rng) {
  if (strategy == Strategy::PoWModel)
    return rng.exponential(cfg.pow_mean_interval_s);
  return cfg.popt_interval_s;
}

Simulation::Simulation(const RoundConfig& cfg,
                       const ScenarioConfig& scenario_cfg)
    : cfg_(cfg), scenario_(scenario_cfg) {
  cfg_.validate();
  Rng econ_rng(mix_seed(cfg_.seed, 0xEC0ull));
  for (const TraderProfile& seller : scenario_.sellers()) {
    NodeState node;
    node.id = seller.id;
    node.tamper_prob = cfg_.tamper_prob;
    node.econ.id = seller.id;
    node.econ.expected_utility = econ_rng.uniform(cfg_.u0_lo, cfg_.u0_hi);
    node.econ.avg_volume = econ_rng.uniform(cfg_.theta_lo, cfg_.theta_hi);
    node.econ.rationality = cfg_.rationality;
    node.econ.params = scenario_cfg.params;
    node.econ.election_prob = 1.0 / static_cast<double>(scenario_cfg.sellers);
    population_.push_back(node);
  }
}

void Simulation::set_tamper_prob(NodeId id, double q) {
  for (NodeState& n : population_)
    if (n.id == id) {
      n.tamper_prob = q;
      return;
    }
  throw std::out_of_range("set_tamper_prob: unknown node");
}

double Simulation::balance(NodeId id) const {
  auto it = balances_.find(id);
  return it == balances_.end() ? 0.0 : it->second;
}

Chain Simulation::run(int rounds) {
  if (rounds < 0) throw std::invalid_argument("run: negative round count");

  Chain chain;
  chain.blocks.push_back(Block{});  // genesis: height 0, no transactions

  PvLedger ledger(cfg_.horizon, cfg_.loss_factor);
  Rng driver(mix_seed(cfg_.seed, 0xD1Dull));
  const std::size_t n = population_.size();

  for (int round = 0; round < rounds; ++round) {
    const std::int64_t slot = round;
    std::vector<InteractionRecord> txs = scenario_.generate_slot(slot);
    ledger.add_slot(slot, txs, scenario_.config().params);

    Eigen::VectorXd pvs(static_cast<Eigen::Index>(n));
    std::vector<NodeId> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const NodeId id = population_[i].id;
      ids.push_back(id);
      pvs[static_cast<Eigen::Index>(i)] =
          ledger.known_sellers().contains(id) ? ledger.accumulate(id, slot)
                                              : 0.0;
    }

    RoundSnapshot snap;
    snap.round = round;
    snap.strategy = cfg_.strategy;
    snap.interval_s = step_interval(cfg_.strategy, cfg_, driver);

    // information contract: prior probabilities, then the published reward
    if (cfg_.prior == ProbPrior::ProvisionalP1) {
      ApplicantSet full = ApplicantSet::from_pvs(ids, pvs);
      GwoConfig gwo = cfg_.gwo;
      gwo.seed = mix_seed(cfg_.seed, 0xA110ull + static_cast<std::uint64_t>(round));
      ElectionOutcome prior = solve_p1(full, cfg_.weights, gwo);
      for (std::size_t i = 0; i < n; ++i)
        population_[i].econ.election_prob =
            prior.probabilities[static_cast<Eigen::Index>(i)];
    } else {
      for (NodeState& node : population_)
        node.econ.election_prob = 1.0 / static_cast<double>(n);
    }

    // quote over the individually rational nodes only
    std::vector<NodeEconomics> rational;
    for (const NodeState& node : population_) {
      const double slope =
          subjective_prob(node.econ.election_prob, node.econ.rationality) -
          cfg_.commission_rate * node.econ.avg_volume;
      if (slope > 0.0) rational.push_back(node.econ);
    }
    if (rational.empty()) {
      chain.snapshots.push_back(snap);  // skipped: nobody can profit
      continue;
    }
    snap.r_star = optimal_reward(rational, cfg_.commission_rate).aggregate;

    // step I
    std::vector<std::size_t> applicants;
    if (cfg_.application_rule == ApplicationRule::AllApply) {
      applicants.resize(n);
      std::iota(applicants.begin(), applicants.end(), std::size_t{0});
    } else {
      applicants = step_apply(population_, snap.r_star, cfg_.commission_rate);
    }
    snap.num_applicants = static_cast<int>(applicants.size());
    if (applicants.empty()) {
      chain.snapshots.push_back(snap);
      continue;
    }

    // step II
    std::vector<NodeId> app_ids;
    Eigen::VectorXd app_pvs(static_cast<Eigen::Index>(applicants.size()));
    for (std::size_t i = 0; i < applicants.size(); ++i) {
      app_ids.push_back(population_[applicants[i]].id);
      app_pvs[static_cast<Eigen::Index>(i)] =
          pvs[static_cast<Eigen::Index>(applicants[i])];
    }
    ApplicantSet apps = ApplicantSet::from_pvs(std::move(app_ids), app_pvs);
    const std::uint64_t election_seed =
        mix_seed(cfg_.seed, 0xE1Eull + static_cast<std::uint64_t>(round));
    ElectResult elect = step_elect(apps, cfg_.strategy, cfg_, election_seed,
                                   driver);
    snap.fairness = elect.fairness;
    snap.decentralization = elect.decentralization;
    snap.credibility = elect.credibility;
    snap.comprehensive = elect.comprehensive;
    snap.elected = elect.elected;

    // steps III-V: post, validate, link (or orphan)
    const NodeState& recorder = population_[applicants[elect.elected_index]];
    const bool tampered = driver.bernoulli(recorder.tamper_prob);
    if (tampered) {
      chain.orphan_count += 1;
      snap.status = RoundStatus::Orphaned;
    } else {
      Block block;
      block.height = chain.blocks.back().height + 1;
      block.slot = slot;
      block.recorder = recorder.id;
      block.txs = std::move(txs);
      block.parent_height = chain.blocks.back().height;
      block.integrity_ok = true;
      block.reward = snap.r_star;
      chain.blocks.push_back(std::move(block));
      total_rewards_ += snap.r_star;
      balances_[recorder.id] += snap.r_star;
      snap.status = RoundStatus::Linked;
    }
    chain.snapshots.push_back(snap);
  }
  return chain;
}

namespace {
const char* status_name(RoundStatus s) {
  switch (s) {
    case RoundStatus::Linked: return "linked";
    case RoundStatus::Orphaned: return "orphaned";
    case RoundStatus::Skipped: return "skipped";
  }
  return "?";
}
}  // namespace

void write_snapshots_csv(std::ostream& out,
                         std::span<const RoundSnapshot> snapshots) {
  out << "round,strategy,N_a,F,D,C,O,R_star,elected_id,interval_s,status\n";
  char buf[320];
  for (const RoundSnapshot& s : snapshots) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%lld,%.17g,%s\n",
                  s.round, to_string(s.strategy).c_str(), s.num_applicants,
                  s.fairness, s.decentralization, s.credibility,
                  s.comprehensive, s.r_star,
                  static_cast<long long>(s.elected), s.interval_s,
                  status_name(s.status));
    out << buf;
  }
}

void write_chain_jsonl(std::ostream& out, const Chain& chain) {
  for (const Block& b : chain.blocks) {
    nlohmann::json j;
    j["height"] = b.height;
    j["slot"] = b.slot;
    j["recorder"] = b.recorder;
    j["parent_height"] = b.parent_height;
    j["integrity_ok"] = b.integrity_ok;
    j["reward"] = b.reward;
    j["txs"] = nlohmann::json::array();
    for (const InteractionRecord& tx : b.txs)
      j["txs"].push_back({{"slot", tx.slot},
                          {"seller", tx.seller},
                          {"buyer", tx.buyer},
                          {"trade_price", tx.trade_price},
                          {"expected_price", tx.expected_price},
                          {"willingness", tx.willingness}});
    out << j.dump() << '\n';
  }
}

}  // namespace popt
