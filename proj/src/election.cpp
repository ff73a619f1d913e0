#include "popt/election.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "popt/rng.hpp"

namespace popt {

ApplicantSet ApplicantSet::from_pvs(std::vector<NodeId> ids,
                                    Eigen::VectorXd pvs) {
  if (ids.empty() || static_cast<Eigen::Index>(ids.size()) != pvs.size())
    throw std::invalid_argument("ApplicantSet: ids/pvs size mismatch or empty");
  ApplicantSet s;
  s.ids = std::move(ids);
  s.pvs = std::move(pvs);
  s.clamped = s.pvs.cwiseMax(0.0);
  double total = s.clamped.sum();
  if (total > 0.0) {
    s.shares = s.clamped / total;
  } else {
    s.degenerate = true;
    s.shares = Eigen::VectorXd::Constant(
        s.pvs.size(), 1.0 / static_cast<double>(s.pvs.size()));
  }
  return s;
}

void MetricWeights::validate() const {
  if (!(mu1 >= 0.0 && mu1 <= 1.0))
    throw std::invalid_argument("MetricWeights: mu1 outside [0,1]");
  if (!(mu2 >= 0.0 && mu2 <= 1.0))
    throw std::invalid_argument("MetricWeights: mu2 outside [0,1]");
  if (mu1 + mu2 > 1.0 + 1e-12)
    throw std::invalid_argument("MetricWeights: mu1 + mu2 > 1");
}

void GwoConfig::validate() const {
  if (pack_size < 4)
    throw std::invalid_argument("GwoConfig: pack_size must be >= 4");
  if (iterations < 1)
    throw std::invalid_argument("GwoConfig: iterations must be >= 1");
  if (restarts < 1)
    throw std::invalid_argument("GwoConfig: restarts must be >= 1");
}

double fairness(const Eigen::VectorXd& shares, const Eigen::VectorXd& probs) {
  if (shares.size() != probs.size() || shares.size() == 0)
    throw std::invalid_argument("fairness: length mismatch or empty");
  Eigen::VectorXd dev = (shares - probs).cwiseAbs();
  double max_dev = dev.maxCoeff();
  if (max_dev < 1e-15) return 1.0;
  return 1.0 - dev.sum() / (static_cast<double>(shares.size()) * max_dev);
}

double decentralization(const Eigen::VectorXd& probs) {
  if (probs.size() == 0)
    throw std::invalid_argument("decentralization: empty probability vector");
  std::vector<double> p(probs.data(), probs.data() + probs.size());
  std::sort(p.begin(), p.end(), std::greater<>());
  double cum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    cum += p[k];
    if (cum >= 0.5)
      return static_cast<double>(k + 1) / static_cast<double>(p.size());
  }
  return 1.0;  // probabilities summed below 0.5; every node is needed
}

double credibility(const Eigen::VectorXd& pvs, const Eigen::VectorXd& probs) {
  if (pvs.size() != probs.size() || pvs.size() == 0)
    throw std::invalid_argument("credibility: length mismatch or empty");
  double total = pvs.sum();
  if (!(total > 0.0))
    throw std::domain_error("credibility: PVs sum to zero");
  return static_cast<double>(pvs.size()) * pvs.dot(probs) / total;
}

double comprehensive(double f, double d, double c, const MetricWeights& w) {
  w.validate();
  const double w1 = w.mu1 * w.mu1, w2 = w.mu2 * w.mu2,
               w3 = w.mu3() * w.mu3();
  double den = 0.0;
  if (w1 > 0.0) {
    if (!(f > 0.0)) throw std::domain_error("comprehensive: fairness <= 0");
    den += w1 / f;
  }
  if (w2 > 0.0) {
    if (!(d > 0.0))
      throw std::domain_error("comprehensive: decentralization <= 0");
    den += w2 / d;
  }
  if (w3 > 0.0) {
    if (!(c > 0.0)) throw std::domain_error("comprehensive: credibility <= 0");
    den += w3 / c;
  }
  return (w1 + w2 + w3) / den;
}

double safe_comprehensive(double f, double d, double c,
                          const MetricWeights& w) {
  const double w1 = w.mu1 * w.mu1, w2 = w.mu2 * w.mu2,
               w3 = w.mu3() * w.mu3();
  if ((w1 > 0.0 && !(f > 0.0)) || (w2 > 0.0 && !(d > 0.0)) ||
      (w3 > 0.0 && !(c > 0.0)))
    return 0.0;
  return comprehensive(f, d, c, w);
}

Eigen::VectorXd project_to_simplex(Eigen::VectorXd p) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!std::isfinite(p[i]) || p[i] < 0.0) p[i] = 0.0;
  double total = p.sum();
  if (total > 0.0) return p / total;
  return Eigen::VectorXd::Constant(p.size(),
                                   1.0 / static_cast<double>(p.size()));
}

namespace {

struct Fitness {
  double o = 0.0;  // 0 when a weighted metric vanishes
  double f = 0.0, d = 0.0, c = 0.0;
};

Fitness evaluate(const Eigen::VectorXd& p, const ApplicantSet& apps,
                 const MetricWeights& w) {
  Fitness fit;
  fit.f = fairness(apps.shares, p);
  fit.d = decentralization(p);
  fit.c = apps.degenerate ? 1.0 : credibility(apps.clamped, p);
  fit.o = safe_comprehensive(fit.f, fit.d, fit.c, w);
  return fit;
}

Eigen::VectorXd random_simplex_point(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = rng.exponential(1.0);
  return project_to_simplex(std::move(p));
}

// Structured anchor points for the initial pack: the share vector, the
// uniform vector, share/uniform blends, and share vectors with the largest
// entries capped at a quantile (excess spread evenly). The capped family
// trades a little credibility for flatter tops, which is where the
// fairness/decentralization optimum tends to live.
std::vector<Eigen::VectorXd> anchor_points(const ApplicantSet& apps) {
  const Eigen::Index n = apps.shares.size();
  const Eigen::VectorXd uniform =
      Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::vector<Eigen::VectorXd> anchors = {apps.shares, uniform};
  for (double gamma : {0.25, 0.5, 0.75})
    anchors.push_back(gamma * apps.shares + (1.0 - gamma) * uniform);
  std::vector<double> sorted(apps.shares.data(), apps.shares.data() + n);
  std::sort(sorted.begin(), sorted.end());
  for (double q : {0.3, 0.5, 0.7, 0.9}) {
    const double cap =
        sorted[static_cast<std::size_t>(q * static_cast<double>(n - 1))];
    Eigen::VectorXd p = apps.shares.cwiseMin(cap);
    p.array() += (1.0 - p.sum()) / static_cast<double>(n);
    anchors.push_back(project_to_simplex(std::move(p)));
  }
  return anchors;
}

}  // namespace

ElectionOutcome solve_p1(const ApplicantSet& apps, const MetricWeights& w,
                         const GwoConfig& cfg) {
  w.validate();
  cfg.validate();
  const Eigen::Index n = apps.shares.size();

  ElectionOutcome out;
  out.degenerate = apps.degenerate;

  if (n == 1) {
    out.probabilities = Eigen::VectorXd::Ones(1);
    out.fairness = out.decentralization = out.credibility = 1.0;
    out.comprehensive = 1.0;
    return out;
  }
  if (apps.degenerate) {
    out.probabilities =
        Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Fitness fit = evaluate(out.probabilities, apps, w);
    out.fairness = fit.f;
    out.decentralization = fit.d;
    out.credibility = fit.c;
    out.comprehensive = fit.o;
    return out;
  }

  Eigen::VectorXd best_p;
  Fitness best_fit;
  bool have_best = false;
  int trace_iter = 0;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));

    std::vector<Eigen::VectorXd> pack(static_cast<std::size_t>(cfg.pack_size));
    std::vector<Fitness> fit(pack.size());
    const std::vector<Eigen::VectorXd> anchors = anchor_points(apps);
    for (std::size_t i = 0; i < pack.size(); ++i)
      pack[i] = i < anchors.size() ? anchors[i] : random_simplex_point(n, rng);
    for (std::size_t i = 0; i < pack.size(); ++i) {
      fit[i] = evaluate(pack[i], apps, w);
      if (!have_best || fit[i].o > best_fit.o) {
        best_fit = fit[i];
        best_p = pack[i];
        have_best = true;
      }
    }

    for (int it = 0; it < cfg.iterations; ++it) {
      // indices of alpha, beta, delta by fitness
      std::vector<std::size_t> order(pack.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          return fit[a].o > fit[b].o;
                        });
      const Eigen::VectorXd leaders[3] = {pack[order[0]], pack[order[1]],
                                          pack[order[2]]};

      const double a = 2.0 * (1.0 - static_cast<double>(it) /
                                        static_cast<double>(cfg.iterations));
      for (std::size_t i = 0; i < pack.size(); ++i) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
        for (const Eigen::VectorXd& leader : leaders) {
          for (Eigen::Index d = 0; d < n; ++d) {
            const double A = 2.0 * a * rng.uniform() - a;
            const double C = 2.0 * rng.uniform();
            const double dist = std::abs(C * leader[d] - pack[i][d]);
            next[d] += leader[d] - A * dist;
          }
        }
        pack[i] = project_to_simplex(next / 3.0);
        fit[i] = evaluate(pack[i], apps, w);
        if (fit[i].o > best_fit.o) {
          best_fit = fit[i];
          best_p = pack[i];
        }
      }
      out.trace.push_back({trace_iter++, best_fit.o, best_fit.f, best_fit.d,
                           best_fit.c});
    }
  }

  out.probabilities = std::move(best_p);
  out.fairness = best_fit.f;
  out.decentralization = best_fit.d;
  out.credibility = best_fit.c;
  out.comprehensive = best_fit.o;
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  out << "iteration,best_O,F,D,C\n";
  char buf[160];
  for (const TracePoint& t : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", t.iteration,
                  t.best_o, t.fairness, t.decentralization, t.credibility);
    out << buf;
  }
}

}  // namespace popt
