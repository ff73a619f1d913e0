// Prospect-theory primitives: value function, probability weighting,
// and the prospect value of a discrete option.

#ifndef POPT_PROSPECT_HPP
#define POPT_PROSPECT_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace popt {

inline constexpr double kBranchTol = 1e-12;

/// Behavioral coefficients of one agent.
/// alpha/beta: risk-attitude exponents (gain/loss side), open interval (0,1).
/// lambda: loss aversion, >= 0 (values <= 1 mean the agent is not loss-sensitive).
/// phi: probability-distortion exponent, (0,1].
struct ProspectParams {
  double alpha = 0.88;
  double beta = 0.88;
  double lambda = 2.25;
  double phi = 0.74;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("ProspectParams: alpha must be in (0,1), got " +
                                  std::to_string(alpha));
    if (!(beta > 0.0 && beta < 1.0))
      throw std::invalid_argument("ProspectParams: beta must be in (0,1), got " +
                                  std::to_string(beta));
    if (lambda < 0.0)
      throw std::invalid_argument("ProspectParams: lambda must be >= 0, got " +
                                  std::to_string(lambda));
    if (!(phi > 0.0 && phi <= 1.0))
      throw std::invalid_argument("ProspectParams: phi must be in (0,1], got " +
                                  std::to_string(phi));
  }
};

/// One discrete outcome of an option: payoff and objective probability.
struct Outcome {
  double value = 0.0;
  double probability = 0.0;
};

/// S-shaped value function around the reference point x0:
///   (x - x0)^alpha for gains, -lambda * (x0 - x)^beta for losses.
/// Continuous at the reference point with value 0.
template <typename Scalar>
Scalar value_fn(Scalar x, Scalar x0, const ProspectParams& params) {
  if (!std::isfinite(x) || !std::isfinite(x0))
    throw std::domain_error("value_fn: non-finite payoff");
  const Scalar d = x - x0;
  if (std::abs(d) <= static_cast<Scalar>(kBranchTol)) return Scalar(0);
  if (d > Scalar(0)) return std::pow(d, static_cast<Scalar>(params.alpha));
  return -static_cast<Scalar>(params.lambda) *
         std::pow(-d, static_cast<Scalar>(params.beta));
}

/// Prelec weighting function exp(-(-ln rho)^phi) on [0,1].
/// Endpoints are the continuous limits: pi(0) = 0, pi(1) = 1.
template <typename Scalar>
Scalar weight_fn(Scalar rho, Scalar phi) {
  if (!(rho >= Scalar(0) && rho <= Scalar(1)))
    throw std::domain_error("weight_fn: probability outside [0,1]");
  if (rho <= Scalar(0)) return Scalar(0);
  if (rho >= Scalar(1)) return Scalar(1);
  return std::exp(-std::pow(-std::log(rho), phi));
}

/// Prospect value of an option: sum over outcomes of v(x_m) * pi(rho_m).
inline double prospect_value(std::span<const Outcome> option, double x0,
                             const ProspectParams& params) {
  if (option.empty()) throw std::domain_error("prospect_value: empty option");
  double sum = 0.0;
  for (const Outcome& o : option)
    sum += value_fn(o.value, x0, params) * weight_fn(o.probability, params.phi);
  return sum;
}

}  // namespace popt

#endif  // POPT_PROSPECT_HPP
