// Experiment orchestration: the figure-reproduction suite, plot-ready CSV
// emission, and the pieces the acceptance checks reuse.

#ifndef POPT_EXPERIMENTS_HPP
#define POPT_EXPERIMENTS_HPP

#include <array>
#include <string>
#include <vector>

#include "popt/config.hpp"
#include "popt/consensus.hpp"

namespace popt {

inline constexpr const char* kVersion = "popt 0.1.0";

struct ExperimentSpec {
  std::string name;
  HarnessConfig config;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

const std::vector<std::string>& experiment_names();

/// Runs one registered experiment; writes <out_dir>/<name>.csv plus a
/// <name>.meta.json sidecar (seed, parameter snapshot, version) that is
/// sufficient to re-run bit-identically. Throws std::invalid_argument on
/// an unknown name.
void run_experiment(const ExperimentSpec& spec);

// --- reusable experiment cores ------------------------------------------

/// Buyer-type comparison: one seller (RB 0.8, lambda 2.25), one buyer of
/// each type, one trade per buyer per slot. Rows: slot, accumulated PV of
/// type A, B, C buyers (buyers take the accumulating role in the ledger).
std::vector<std::array<double, 4>> buyer_type_series(std::uint64_t seed,
                                                     int slots,
                                                     const HarnessConfig& cfg);

struct ShareProbRow {
  NodeId id = 0;
  double share = 0.0;
  double probability = 0.0;
};

/// Share-vs-probability comparison for a small applicant election drawn
/// from the smart-grid scenario.
std::vector<ShareProbRow> share_probability_rows(std::uint64_t seed,
                                                 const HarnessConfig& cfg,
                                                 int applicants);

/// Per-round snapshots of a full consensus run with the given strategy;
/// all nodes apply unconditionally.
std::vector<RoundSnapshot> consensus_snapshots(Strategy strategy,
                                               std::uint64_t seed,
                                               const HarnessConfig& cfg,
                                               int rounds);

struct MetricMeans {
  double fairness = 0.0;
  double decentralization = 0.0;
  double credibility = 0.0;
};

MetricMeans mean_metrics(std::span<const RoundSnapshot> snapshots);

}  // namespace popt

#endif  // POPT_EXPERIMENTS_HPP
