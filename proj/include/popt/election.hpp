// Fairness / decentralization / credibility metrics and the Grey Wolf
// Optimizer solving for the recorder-probability vector on the simplex.

#ifndef POPT_ELECTION_HPP
#define POPT_ELECTION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "popt/pv_ledger.hpp"

namespace popt {

/// Applicants, their accumulated PVs, and PV shares. Negative PVs are
/// clamped to zero before shares are formed; if every clamped PV is zero
/// the set is flagged degenerate and shares fall back to uniform.
struct ApplicantSet {
  std::vector<NodeId> ids;
  Eigen::VectorXd pvs;      // raw accumulated PVs (may be negative)
  Eigen::VectorXd clamped;  // max(pv, 0)
  Eigen::VectorXd shares;   // clamped / sum, or uniform when degenerate
  bool degenerate = false;

  static ApplicantSet from_pvs(std::vector<NodeId> ids, Eigen::VectorXd pvs);
};

struct MetricWeights {
  double mu1 = 1.0 / 3.0;  // fairness
  double mu2 = 1.0 / 3.0;  // decentralization
  double mu3() const { return 1.0 - mu1 - mu2; }  // credibility
  void validate() const;
};

struct GwoConfig {
  int pack_size = 30;
  int iterations = 200;
  std::uint64_t seed = 0;
  int restarts = 3;
  void validate() const;
};

struct TracePoint {
  int iteration = 0;  // global index across restarts
  double best_o = 0.0;
  double fairness = 0.0;
  double decentralization = 0.0;
  double credibility = 0.0;
};

struct ElectionOutcome {
  Eigen::VectorXd probabilities;
  double fairness = 0.0;
  double decentralization = 0.0;
  double credibility = 0.0;
  double comprehensive = 0.0;
  std::vector<TracePoint> trace;
  bool degenerate = false;
};

/// Expectational fairness: 1 - sum|a_i - p_i| / (N * max|a_i - p_i|).
/// Perfect alignment (max deviation 0) is defined as 1.
double fairness(const Eigen::VectorXd& shares, const Eigen::VectorXd& probs);

/// Normalized Nakamoto index: smallest k such that the k largest
/// probabilities sum to at least 0.5, divided by the applicant count.
double decentralization(const Eigen::VectorXd& probs);

/// Scaled expected PV of the elected recorder: N * sum(pv_i p_i) / sum(pv_i).
double credibility(const Eigen::VectorXd& pvs, const Eigen::VectorXd& probs);

/// Weighted harmonic combination of the three metrics.
double comprehensive(double f, double d, double c, const MetricWeights& w);

/// As comprehensive(), but returns 0 instead of throwing when a metric with
/// nonzero weight vanishes. Used as the optimizer fitness.
double safe_comprehensive(double f, double d, double c,
                          const MetricWeights& w);

/// Clamp negatives to zero and renormalize to the simplex; an all-zero
/// vector falls back to uniform.
Eigen::VectorXd project_to_simplex(Eigen::VectorXd p);

ElectionOutcome solve_p1(const ApplicantSet& apps, const MetricWeights& w,
                         const GwoConfig& cfg);

/// CSV columns: iteration,best_O,F,D,C
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);

}  // namespace popt

#endif  // POPT_ELECTION_HPP
