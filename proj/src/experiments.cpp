#include "popt/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "popt/rng.hpp"

namespace popt {

namespace {

std::ofstream open_out(const std::filesystem::path& dir,
                       const std::string& file) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / file, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + (dir / file).string());
  return out;
}

void write_meta(const ExperimentSpec& spec) {
  nlohmann::json meta;
  meta["experiment"] = spec.name;
  meta["seed"] = spec.seed;
  meta["version"] = kVersion;
  meta["config"] = config_to_json(spec.config);
  auto out = open_out(spec.out_dir, spec.name + ".meta.json");
  out << meta.dump(2) << '\n';
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void run_fig2a(const ExperimentSpec& spec) {
  std::vector<double> rb_grid = {0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> lambda_grid = {1.0, 1.5, 2.25, 3.0};
  std::vector<double> bid_grid;
  for (int i = 0; i <= 70; ++i) bid_grid.push_back(0.5 + 0.01 * i);
  auto surface =
      pv_sweep(rb_grid, lambda_grid, bid_grid, spec.config.prospect);
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "rb,lambda,bid,pv\n";
  for (const auto& p : surface)
    out << fmt(p.reference_bid) << ',' << fmt(p.lambda) << ',' << fmt(p.bid)
        << ',' << fmt(p.pv) << '\n';
}

void run_fig2b(const ExperimentSpec& spec) {
  auto series = buyer_type_series(spec.seed, 50, spec.config);
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "slot,pv_a,pv_b,pv_c\n";
  for (const auto& row : series)
    out << static_cast<long long>(row[0]) << ',' << fmt(row[1]) << ','
        << fmt(row[2]) << ',' << fmt(row[3]) << '\n';
}

void run_fig3(const ExperimentSpec& spec) {
  // one representative node; sweep its expected utility
  NodeEconomics econ;
  econ.id = 1;
  econ.election_prob = 0.1;
  econ.rationality = spec.config.round.rationality;
  econ.avg_volume = 1.0;
  econ.params = spec.config.prospect;
  const double k = spec.config.round.commission_rate;

  // fixed reward for the willingness column: the candidate at u0 = 1
  econ.expected_utility = 1.0;
  const double fixed_reward =
      optimal_reward(std::span<const NodeEconomics>(&econ, 1), k).aggregate;

  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "u0,r_star,willingness_at_fixed_r\n";
  for (int i = 1; i <= 20; ++i) {
    econ.expected_utility = 0.1 * i;
    const double r_star =
        optimal_reward(std::span<const NodeEconomics>(&econ, 1), k).aggregate;
    out << fmt(econ.expected_utility) << ',' << fmt(r_star) << ','
        << fmt(willingness(fixed_reward, econ, k)) << '\n';
  }
}

void run_fig4(const ExperimentSpec& spec) {
  auto rows = share_probability_rows(spec.seed, spec.config, 10);
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "applicant,share,probability,abs_diff\n";
  for (const auto& r : rows)
    out << r.id << ',' << fmt(r.share) << ',' << fmt(r.probability) << ','
        << fmt(std::abs(r.share - r.probability)) << '\n';
}

void run_fig5a(const ExperimentSpec& spec) {
  (void)spec;
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "mu1,mu2,O\n";
  for (int i = 0; i <= 30; ++i) {
    for (int j = 0; j <= 30 - i; ++j) {
      MetricWeights w{i / 30.0, j / 30.0};
      out << fmt(w.mu1) << ',' << fmt(w.mu2) << ','
          << fmt(comprehensive(0.9, 0.5, 0.1, w)) << '\n';
    }
  }
}

void run_fig5b(const ExperimentSpec& spec) {
  auto snaps = consensus_snapshots(Strategy::PoPT, spec.seed, spec.config,
                                   spec.config.rounds);
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  write_snapshots_csv(out, snaps);
}

void run_fig6a(const ExperimentSpec& spec) {
  Rng rng(mix_seed(spec.seed, 0xF16Aull));
  const int samples = 10000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i)
    sum += rng.exponential(spec.config.round.pow_mean_interval_s);
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "strategy,mean_interval_s,samples\n";
  out << "pow," << fmt(sum / samples) << ',' << samples << '\n';
  out << "popt," << fmt(spec.config.round.popt_interval_s) << ",1\n";
}

void run_fig6b(const ExperimentSpec& spec) {
  auto out = open_out(spec.out_dir, spec.name + ".csv");
  out << "strategy,mean_F,mean_D,mean_C\n";
  for (Strategy s : {Strategy::PoPT, Strategy::PoA, Strategy::PoT}) {
    auto snaps =
        consensus_snapshots(s, spec.seed, spec.config, spec.config.rounds);
    MetricMeans m = mean_metrics(snaps);
    out << to_string(s) << ',' << fmt(m.fairness) << ','
        << fmt(m.decentralization) << ',' << fmt(m.credibility) << '\n';
  }
}

using Runner = void (*)(const ExperimentSpec&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> reg = {
      {"fig2a", run_fig2a}, {"fig2b", run_fig2b}, {"fig3", run_fig3},
      {"fig4", run_fig4},   {"fig5a", run_fig5a}, {"fig5b", run_fig5b},
      {"fig6a", run_fig6a}, {"fig6b", run_fig6b},
  };
  return reg;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

void run_experiment(const ExperimentSpec& spec) {
  for (const auto& [name, fn] : registry()) {
    if (name == spec.name) {
      fn(spec);
      write_meta(spec);
      return;
    }
  }
  throw std::invalid_argument("unknown experiment '" + spec.name +
                              "'; registered: fig2a fig2b fig3 fig4 fig5a "
                              "fig5b fig6a fig6b");
}

std::vector<std::array<double, 4>> buyer_type_series(std::uint64_t seed,
                                                     int slots,
                                                     const HarnessConfig& cfg) {
  // The buyers take the accumulating (row) role: each buyer's PV of trading
  // with the one fixed seller is tracked over the window.
  const NodeId seller_id = 100;
  const NodeId buyer_ids[3] = {1, 2, 3};
  const char types[3] = {'A', 'B', 'C'};
  const double rb = 0.8;
  ProspectParams params = cfg.prospect;
  params.lambda = 2.25;

  PvLedger ledger(cfg.round.horizon, cfg.round.loss_factor);
  std::vector<std::array<double, 4>> out;
  for (int t = 0; t < slots; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t) + 0xB2Bull));
    std::vector<InteractionRecord> recs;
    for (int b = 0; b < 3; ++b) {
      TraderProfile buyer = make_buyer(buyer_ids[b], types[b]);
      InteractionRecord rec;
      rec.slot = t;
      rec.seller = buyer_ids[b];  // accumulating node
      rec.buyer = seller_id;
      rec.trade_price =
          std::max(kPriceFloor, rng.uniform(buyer.band_lo, buyer.band_hi));
      rec.expected_price = rb;
      rec.willingness = rng.uniform();
      recs.push_back(rec);
    }
    ledger.add_slot(t, recs, params);
    out.push_back({static_cast<double>(t), ledger.accumulate(buyer_ids[0], t),
                   ledger.accumulate(buyer_ids[1], t),
                   ledger.accumulate(buyer_ids[2], t)});
  }
  return out;
}

std::vector<ShareProbRow> share_probability_rows(std::uint64_t seed,
                                                 const HarnessConfig& cfg,
                                                 int applicants) {
  ScenarioConfig sc = cfg.scenario;
  sc.sellers = applicants;
  sc.seed = seed;
  SmartGridScenario scenario(sc);

  PvLedger ledger(cfg.round.horizon, cfg.round.loss_factor);
  for (int t = 0; t < cfg.round.horizon; ++t)
    ledger.add_slot(t, scenario.generate_slot(t), sc.params);

  std::vector<NodeId> ids;
  Eigen::VectorXd pvs(applicants);
  for (int i = 0; i < applicants; ++i) {
    const NodeId id = scenario.sellers()[static_cast<std::size_t>(i)].id;
    ids.push_back(id);
    pvs[i] = ledger.known_sellers().contains(id)
                 ? ledger.accumulate(id, cfg.round.horizon - 1)
                 : 0.0;
  }
  ApplicantSet apps = ApplicantSet::from_pvs(ids, pvs);
  GwoConfig gwo = cfg.round.gwo;
  gwo.seed = mix_seed(seed, 0xF16ull);
  ElectionOutcome outcome = solve_p1(apps, cfg.round.weights, gwo);

  std::vector<ShareProbRow> rows;
  for (int i = 0; i < applicants; ++i)
    rows.push_back({apps.ids[static_cast<std::size_t>(i)], apps.shares[i],
                    outcome.probabilities[i]});
  return rows;
}

std::vector<RoundSnapshot> consensus_snapshots(Strategy strategy,
                                               std::uint64_t seed,
                                               const HarnessConfig& cfg,
                                               int rounds) {
  RoundConfig rc = cfg.round;
  rc.strategy = strategy;
  rc.seed = seed;
  rc.application_rule = ApplicationRule::AllApply;
  ScenarioConfig sc = cfg.scenario;
  sc.seed = seed;
  Simulation sim(rc, sc);
  return sim.run(rounds).snapshots;
}

MetricMeans mean_metrics(std::span<const RoundSnapshot> snapshots) {
  MetricMeans m;
  int counted = 0;
  for (const RoundSnapshot& s : snapshots) {
    if (s.status == RoundStatus::Skipped) continue;
    m.fairness += s.fairness;
    m.decentralization += s.decentralization;
    m.credibility += s.credibility;
    counted += 1;
  }
  if (counted > 0) {
    m.fairness /= counted;
    m.decentralization /= counted;
    m.credibility /= counted;
  }
  return m;
}

}  // namespace popt
