#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "regmkt/cost.hpp"
#include "regmkt/market.hpp"

namespace regmkt {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Worst-case cost of a cleared schedule under an arbitrary curve: the
// horizon closed form when the curve is EDCR, otherwise full-deployment
// order-of-cheapest billing interval by interval along the cleared path.
double schedule_cost(const StorageBid& bid, const ClearingResult& r, std::size_t i) {
  if (bid.check_edcr())
    return edcr_cost(bid, r.storage_soc[i][0], r.storage_reg_up[i], r.storage_reg_down[i]);
  double total = 0.0;
  for (std::size_t t = 0; t < r.storage_reg_up[i].size(); ++t)
    total += two_route_cost(bid, r.storage_soc[i][t], r.storage_reg_up[i][t],
                            r.storage_reg_down[i][t]);
  return total;
}

} // namespace

SettlementReport settle(const ClearingProblem& p, const ClearingResult& r,
                        const std::vector<StorageBid>& true_bids) {
  if (true_bids.size() != p.storages.size())
    throw std::invalid_argument("settle: need one true bid per storage");
  if (r.storage_reg_up.size() != p.storages.size() || r.price_up.empty())
    throw std::invalid_argument("settle: clearing result carries no schedule");

  SettlementReport rep;
  rep.system_cost = r.objective;
  double bid_total = 0.0, true_total = 0.0;
  for (std::size_t i = 0; i < p.storages.size(); ++i) {
    StorageSettlement s;
    for (std::size_t t = 0; t < r.price_up.size(); ++t)
      s.payment += r.price_up[t] * r.storage_reg_up[i][t] +
                   r.price_down[t] * r.storage_reg_down[i][t];
    s.bid_cost = schedule_cost(p.storages[i].bid, r, i);
    s.true_cost = schedule_cost(true_bids[i], r, i);
    s.bid_profit = s.payment - s.bid_cost;
    s.true_profit = s.payment - s.true_cost;
    bid_total += s.bid_cost;
    true_total += s.true_cost;
    rep.storages.push_back(s);
  }
  rep.true_system_cost = r.objective - bid_total + true_total;
  return rep;
}

void write_schedule_csv(const ClearingProblem& p, const ClearingResult& r, std::ostream& os) {
  os << "entity,kind,t,energy,reg_up,reg_down,soc\n";
  for (std::size_t i = 0; i < p.generators.size(); ++i)
    for (std::size_t t = 0; t < r.gen_energy[i].size(); ++t)
      os << p.generators[i].name << ",generator," << (t + 1) << "," << num(r.gen_energy[i][t])
         << "," << num(r.gen_reg_up[i][t]) << "," << num(r.gen_reg_down[i][t]) << ",\n";
  for (std::size_t i = 0; i < p.storages.size(); ++i)
    for (std::size_t t = 0; t < r.storage_reg_up[i].size(); ++t)
      os << p.storages[i].name << ",storage," << (t + 1) << ",," << num(r.storage_reg_up[i][t])
         << "," << num(r.storage_reg_down[i][t]) << "," << num(r.storage_soc[i][t + 1]) << "\n";
}

void write_prices_csv(const ClearingResult& r, std::ostream& os) {
  os << "t,price_up,price_down\n";
  for (std::size_t t = 0; t < r.price_up.size(); ++t)
    os << (t + 1) << "," << num(r.price_up[t]) << "," << num(r.price_down[t]) << "\n";
}

void write_settlement_csv(const ClearingProblem& p, const SettlementReport& rep,
                          std::ostream& os) {
  os << "entity,payment,bid_cost,bid_profit,true_cost,true_profit\n";
  double pay = 0.0, bc = 0.0, bp = 0.0, tc = 0.0, tp = 0.0;
  for (std::size_t i = 0; i < rep.storages.size(); ++i) {
    const StorageSettlement& s = rep.storages[i];
    os << p.storages[i].name << "," << num(s.payment) << "," << num(s.bid_cost) << ","
       << num(s.bid_profit) << "," << num(s.true_cost) << "," << num(s.true_profit) << "\n";
    pay += s.payment;
    bc += s.bid_cost;
    bp += s.bid_profit;
    tc += s.true_cost;
    tp += s.true_profit;
  }
  os << "total," << num(pay) << "," << num(bc) << "," << num(bp) << "," << num(tc) << ","
     << num(tp) << "\n";
}

} // namespace regmkt
