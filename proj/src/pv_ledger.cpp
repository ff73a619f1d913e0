#include "popt/pv_ledger.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace popt {

void InteractionRecord::validate() const {
  if (slot < 0) throw std::invalid_argument("InteractionRecord: slot < 0");
  if (seller == buyer)
    throw std::invalid_argument("InteractionRecord: seller == buyer");
  if (!(willingness >= 0.0 && willingness <= 1.0))
    throw std::invalid_argument("InteractionRecord: willingness outside [0,1]");
  if (!std::isfinite(trade_price) || !std::isfinite(expected_price))
    throw std::invalid_argument("InteractionRecord: non-finite price");
}

double pairwise_pv(const InteractionRecord& rec, const ProspectParams& params) {
  rec.validate();
  return value_fn(rec.trade_price, rec.expected_price, params) *
         weight_fn(rec.willingness, params.phi);
}

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& raw) {
  if (!raw.allFinite())
    throw std::invalid_argument("normalize_columns: non-finite entry");
  Eigen::MatrixXd out = raw;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

PvLedger::PvLedger(int horizon, double loss_factor)
    : horizon_(horizon), loss_factor_(loss_factor) {
  if (horizon < 1) throw std::invalid_argument("PvLedger: horizon < 1");
  if (!(loss_factor > 0.0 && loss_factor <= 1.0))
    throw std::invalid_argument("PvLedger: loss factor outside (0,1]");
}

void PvLedger::add_slot(std::int64_t slot,
                        std::span<const InteractionRecord> records,
                        const ProspectParams& params) {
  if (records.empty()) return;

  std::vector<NodeId> sellers, buyers;
  std::unordered_map<NodeId, Eigen::Index> srow, bcol;
  for (const auto& rec : records) {
    if (rec.slot != slot)
      throw std::invalid_argument("PvLedger::add_slot: record from wrong slot");
    if (srow.emplace(rec.seller, sellers.size()).second)
      sellers.push_back(rec.seller);
    if (bcol.emplace(rec.buyer, buyers.size()).second)
      buyers.push_back(rec.buyer);
  }

  PvMatrix m;
  m.slot = slot;
  m.sellers = std::move(sellers);
  m.buyers = std::move(buyers);
  m.raw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.sellers.size()),
                                static_cast<Eigen::Index>(m.buyers.size()));
  for (const auto& rec : records)
    m.raw(srow.at(rec.seller), bcol.at(rec.buyer)) += pairwise_pv(rec, params);
  m.normalized = normalize_columns(m.raw);

  for (NodeId id : m.sellers) sellers_seen_.insert(id);
  window_[slot] = std::move(m);

  // keep only the last T distinct slots
  std::int64_t newest = window_.rbegin()->first;
  while (!window_.empty() && window_.begin()->first <= newest - horizon_)
    window_.erase(window_.begin());
}

void PvLedger::ingest(std::span<const InteractionRecord> records,
                      const ProspectParams& params) {
  std::map<std::int64_t, std::vector<InteractionRecord>> by_slot;
  for (const auto& rec : records) by_slot[rec.slot].push_back(rec);
  for (auto& [slot, recs] : by_slot) add_slot(slot, recs, params);
}

const PvMatrix* PvLedger::slot_matrix(std::int64_t slot) const {
  auto it = window_.find(slot);
  return it == window_.end() ? nullptr : &it->second;
}

double PvLedger::accumulate(NodeId node, std::int64_t now) const {
  if (!sellers_seen_.contains(node))
    throw std::out_of_range("PvLedger::accumulate: unknown node " +
                            std::to_string(node));
  double total = 0.0;
  for (std::int64_t k = now - horizon_ + 1; k <= now; ++k) {
    const PvMatrix* m = slot_matrix(k);
    if (m == nullptr) continue;
    auto it = std::find(m->sellers.begin(), m->sellers.end(), node);
    if (it == m->sellers.end()) continue;
    Eigen::Index row = it - m->sellers.begin();
    double mean = m->normalized.row(row).mean();
    total += std::pow(loss_factor_, static_cast<double>(now - k)) * mean;
  }
  return total;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("interaction CSV: bad ") + what +
                                " value '" + s + "'");
  }
}

std::int64_t parse_int(const std::string& s, const char* what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument(std::string("interaction CSV: bad ") + what +
                                " value '" + s + "'");
  return v;
}

}  // namespace

std::vector<InteractionRecord> read_interactions_csv(std::istream& in) {
  static const char* kHeader =
      "slot,seller_id,buyer_id,trade_price,expected_price,willingness";
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("interaction CSV: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw std::invalid_argument("interaction CSV: bad header '" + line + "'");

  std::vector<InteractionRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6)
      throw std::invalid_argument("interaction CSV: expected 6 fields, got " +
                                  std::to_string(f.size()));
    InteractionRecord rec;
    rec.slot = parse_int(f[0], "slot");
    rec.seller = parse_int(f[1], "seller_id");
    rec.buyer = parse_int(f[2], "buyer_id");
    rec.trade_price = parse_double(f[3], "trade_price");
    rec.expected_price = parse_double(f[4], "expected_price");
    rec.willingness = parse_double(f[5], "willingness");
    rec.validate();
    out.push_back(rec);
  }
  return out;
}

void write_interactions_csv(std::ostream& out,
                            std::span<const InteractionRecord> records) {
  out << "slot,seller_id,buyer_id,trade_price,expected_price,willingness\n";
  char buf[256];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%lld,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(rec.slot),
                  static_cast<long long>(rec.seller),
                  static_cast<long long>(rec.buyer), rec.trade_price,
                  rec.expected_price, rec.willingness);
    out << buf;
  }
}

}  // namespace popt
