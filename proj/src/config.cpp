#include "popt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace popt {

HarnessConfig default_config() {
  HarnessConfig cfg;
  cfg.scenario.params = cfg.prospect;
  return cfg;
}

namespace {

class Reader {
 public:
  Reader(const nlohmann::json& doc, std::vector<std::string>& errors)
      : doc_(doc), errors_(errors) {}

  template <typename T>
  void get(const char* section, const char* key, T& out) {
    if (!doc_.contains(section)) return;
    const auto& sec = doc_.at(section);
    if (!sec.is_object()) {
      note(section, "", "must be an object");
      return;
    }
    if (!sec.contains(key)) return;
    try {
      out = sec.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      note(section, key, "has the wrong type");
    }
  }

  void note(const std::string& section, const std::string& key,
            const std::string& msg) {
    std::string path = section;
    if (!key.empty()) path += "." + key;
    errors_.push_back(path + ": " + msg);
  }

 private:
  const nlohmann::json& doc_;
  std::vector<std::string>& errors_;
};

void check(bool ok, const char* path, const char* msg,
           std::vector<std::string>& errors) {
  if (!ok) errors.push_back(std::string(path) + ": " + msg);
}

HarnessConfig parse_impl(const nlohmann::json& doc,
                         std::vector<std::string>& errors) {
  HarnessConfig cfg = default_config();
  if (!doc.is_object()) {
    errors.push_back("(root): config document must be a JSON object");
    return cfg;
  }
  Reader r(doc, errors);

  r.get("prospect", "alpha", cfg.prospect.alpha);
  r.get("prospect", "beta", cfg.prospect.beta);
  r.get("prospect", "lambda", cfg.prospect.lambda);
  r.get("prospect", "phi", cfg.prospect.phi);

  r.get("ledger", "horizon", cfg.round.horizon);
  r.get("ledger", "loss_factor", cfg.round.loss_factor);

  r.get("weights", "mu1", cfg.round.weights.mu1);
  r.get("weights", "mu2", cfg.round.weights.mu2);

  r.get("gwo", "pack_size", cfg.round.gwo.pack_size);
  r.get("gwo", "iterations", cfg.round.gwo.iterations);
  r.get("gwo", "restarts", cfg.round.gwo.restarts);

  r.get("reward", "commission_rate", cfg.round.commission_rate);
  r.get("reward", "rationality", cfg.round.rationality);

  r.get("scenario", "sellers", cfg.scenario.sellers);
  r.get("scenario", "buyers_a", cfg.scenario.buyers_a);
  r.get("scenario", "buyers_b", cfg.scenario.buyers_b);
  r.get("scenario", "buyers_c", cfg.scenario.buyers_c);
  r.get("scenario", "interactions_per_buyer", cfg.scenario.interactions_per_buyer);
  r.get("scenario", "seller_rb_lo", cfg.scenario.seller_rb_lo);
  r.get("scenario", "seller_rb_hi", cfg.scenario.seller_rb_hi);
  r.get("scenario", "price_floor", cfg.scenario.price_floor);

  std::string strategy = to_string(cfg.round.strategy);
  std::string prior =
      cfg.round.prior == ProbPrior::ProvisionalP1 ? "provisional" : "uniform";
  std::string rule = cfg.round.application_rule == ApplicationRule::AllApply
                         ? "all_apply"
                         : "willingness_gate";
  r.get("consensus", "strategy", strategy);
  r.get("consensus", "prior", prior);
  r.get("consensus", "application_rule", rule);
  r.get("consensus", "popt_interval_s", cfg.round.popt_interval_s);
  r.get("consensus", "pow_mean_interval_s", cfg.round.pow_mean_interval_s);
  r.get("consensus", "pot_top_fraction", cfg.round.pot_top_fraction);
  r.get("consensus", "tamper_prob", cfg.round.tamper_prob);
  r.get("consensus", "u0_lo", cfg.round.u0_lo);
  r.get("consensus", "u0_hi", cfg.round.u0_hi);
  r.get("consensus", "theta_lo", cfg.round.theta_lo);
  r.get("consensus", "theta_hi", cfg.round.theta_hi);
  r.get("consensus", "rounds", cfg.rounds);

  try {
    cfg.round.strategy = strategy_from_string(strategy);
  } catch (const std::exception&) {
    r.note("consensus", "strategy", "must be one of popt|poa|pot|pow");
  }
  if (prior == "provisional")
    cfg.round.prior = ProbPrior::ProvisionalP1;
  else if (prior == "uniform")
    cfg.round.prior = ProbPrior::UniformPrior;
  else
    r.note("consensus", "prior", "must be provisional|uniform");
  if (rule == "all_apply")
    cfg.round.application_rule = ApplicationRule::AllApply;
  else if (rule == "willingness_gate")
    cfg.round.application_rule = ApplicationRule::WillingnessGate;
  else
    r.note("consensus", "application_rule",
           "must be willingness_gate|all_apply");

  // field-level invariants
  check(cfg.prospect.alpha > 0.0 && cfg.prospect.alpha < 1.0, "prospect.alpha",
        "must lie in the open interval (0,1)", errors);
  check(cfg.prospect.beta > 0.0 && cfg.prospect.beta < 1.0, "prospect.beta",
        "must lie in the open interval (0,1)", errors);
  check(cfg.prospect.lambda >= 0.0, "prospect.lambda", "must be >= 0", errors);
  check(cfg.prospect.phi > 0.0 && cfg.prospect.phi <= 1.0, "prospect.phi",
        "must lie in (0,1]", errors);
  check(cfg.round.horizon >= 1, "ledger.horizon", "must be >= 1", errors);
  check(cfg.round.loss_factor > 0.0 && cfg.round.loss_factor <= 1.0,
        "ledger.loss_factor", "must lie in (0,1]", errors);
  check(cfg.round.weights.mu1 >= 0.0 && cfg.round.weights.mu1 <= 1.0,
        "weights.mu1", "must lie in [0,1]", errors);
  check(cfg.round.weights.mu2 >= 0.0 && cfg.round.weights.mu2 <= 1.0,
        "weights.mu2", "must lie in [0,1]", errors);
  check(cfg.round.weights.mu1 + cfg.round.weights.mu2 <= 1.0 + 1e-12,
        "weights", "mu1 + mu2 must not exceed 1 (credibility weight is the "
        "remainder)", errors);
  check(cfg.round.gwo.pack_size >= 4, "gwo.pack_size", "must be >= 4", errors);
  check(cfg.round.gwo.iterations >= 1, "gwo.iterations", "must be >= 1",
        errors);
  check(cfg.round.gwo.restarts >= 1, "gwo.restarts", "must be >= 1", errors);
  check(cfg.round.commission_rate >= 0.0, "reward.commission_rate",
        "must be >= 0", errors);
  check(cfg.round.rationality > 0.0, "reward.rationality", "must be > 0",
        errors);
  check(cfg.scenario.sellers >= 1, "scenario.sellers", "must be >= 1", errors);
  check(cfg.scenario.buyers_a >= 0 && cfg.scenario.buyers_b >= 0 &&
            cfg.scenario.buyers_c >= 0,
        "scenario", "buyer counts must be >= 0", errors);
  check(cfg.scenario.interactions_per_buyer >= 0,
        "scenario.interactions_per_buyer", "must be >= 0", errors);
  check(cfg.scenario.price_floor >= 0.5, "scenario.price_floor",
        "must be >= 0.5 (national standard price)", errors);
  check(cfg.scenario.seller_rb_lo >= 0.5 &&
            cfg.scenario.seller_rb_hi >= cfg.scenario.seller_rb_lo,
        "scenario", "seller RB range must satisfy 0.5 <= lo <= hi", errors);
  check(cfg.round.pot_top_fraction > 0.0 && cfg.round.pot_top_fraction <= 1.0,
        "consensus.pot_top_fraction", "must lie in (0,1]", errors);
  check(cfg.round.tamper_prob >= 0.0 && cfg.round.tamper_prob <= 1.0,
        "consensus.tamper_prob", "must lie in [0,1]", errors);
  check(cfg.round.u0_lo >= 0.0 && cfg.round.u0_hi >= cfg.round.u0_lo,
        "consensus", "u0 range must satisfy 0 <= lo <= hi", errors);
  check(cfg.round.theta_lo > 0.0 && cfg.round.theta_hi >= cfg.round.theta_lo,
        "consensus", "theta range must satisfy 0 < lo <= hi", errors);
  check(cfg.rounds >= 0, "consensus.rounds", "must be >= 0", errors);

  // individual-rationality bound on the commission rate, evaluated at the
  // uniform prior p = 1/sellers and the largest configured volume
  if (errors.empty()) {
    const double pi =
        weight_fn(1.0 / static_cast<double>(cfg.scenario.sellers),
                  cfg.round.rationality);
    const double bound = pi / cfg.round.theta_hi;
    if (cfg.round.commission_rate >= bound) {
      std::ostringstream msg;
      msg << "reward.commission_rate: " << cfg.round.commission_rate
          << " violates the individual-rationality bound min pi(p)/theta = "
          << bound << " (no node could profit from participating)";
      errors.push_back(msg.str());
    }
  }

  cfg.scenario.params = cfg.prospect;
  return cfg;
}

}  // namespace

std::vector<std::string> validate_config_json(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  parse_impl(doc, errors);
  return errors;
}

HarnessConfig parse_config(const nlohmann::json& doc) {
  std::vector<std::string> errors;
  HarnessConfig cfg = parse_impl(doc, errors);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

HarnessConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path +
                                " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json config_to_json(const HarnessConfig& cfg) {
  nlohmann::json j;
  j["prospect"] = {{"alpha", cfg.prospect.alpha},
                   {"beta", cfg.prospect.beta},
                   {"lambda", cfg.prospect.lambda},
                   {"phi", cfg.prospect.phi}};
  j["ledger"] = {{"horizon", cfg.round.horizon},
                 {"loss_factor", cfg.round.loss_factor}};
  j["weights"] = {{"mu1", cfg.round.weights.mu1},
                  {"mu2", cfg.round.weights.mu2}};
  j["gwo"] = {{"pack_size", cfg.round.gwo.pack_size},
              {"iterations", cfg.round.gwo.iterations},
              {"restarts", cfg.round.gwo.restarts}};
  j["reward"] = {{"commission_rate", cfg.round.commission_rate},
                 {"rationality", cfg.round.rationality}};
  j["scenario"] = {{"sellers", cfg.scenario.sellers},
                   {"buyers_a", cfg.scenario.buyers_a},
                   {"buyers_b", cfg.scenario.buyers_b},
                   {"buyers_c", cfg.scenario.buyers_c},
                   {"interactions_per_buyer", cfg.scenario.interactions_per_buyer},
                   {"seller_rb_lo", cfg.scenario.seller_rb_lo},
                   {"seller_rb_hi", cfg.scenario.seller_rb_hi},
                   {"price_floor", cfg.scenario.price_floor}};
  j["consensus"] = {
      {"strategy", to_string(cfg.round.strategy)},
      {"prior",
       cfg.round.prior == ProbPrior::ProvisionalP1 ? "provisional" : "uniform"},
      {"application_rule",
       cfg.round.application_rule == ApplicationRule::AllApply
           ? "all_apply"
           : "willingness_gate"},
      {"popt_interval_s", cfg.round.popt_interval_s},
      {"pow_mean_interval_s", cfg.round.pow_mean_interval_s},
      {"pot_top_fraction", cfg.round.pot_top_fraction},
      {"tamper_prob", cfg.round.tamper_prob},
      {"u0_lo", cfg.round.u0_lo},
      {"u0_hi", cfg.round.u0_hi},
      {"theta_lo", cfg.round.theta_lo},
      {"theta_hi", cfg.round.theta_hi},
      {"rounds", cfg.rounds}};
  return j;
}

}  // namespace popt
