#include "core/portfolio.hpp"

#include <algorithm>
#include <string>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace momlab {

RankedGroups rank_and_group(const ScoreVector& scores, int group_count) {
  const int n = int(scores.entries.size());
  if (group_count < 2)
    throw Error(ErrorCode::InvalidParams, "group count must be >= 2");
  if (n < group_count)
    throw Error(ErrorCode::TooFewInstruments,
                std::to_string(n) + " scored instruments for " + std::to_string(group_count) +
                    " groups");

  std::vector<std::pair<int, double>> sorted = scores.entries;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;  // instrument id breaks ties deterministically
  });

  RankedGroups out;
  out.formation_ord = scores.formation_ord;
  out.groups.resize(size_t(group_count));
  for (int g = 0; g < group_count; ++g) {
    const int lo = int(int64_t(g) * n / group_count);
    const int hi = int(int64_t(g + 1) * n / group_count);
    auto& group = out.groups[size_t(g)];
    group.reserve(size_t(hi - lo));
    for (int i = lo; i < hi; ++i) group.push_back(sorted[size_t(i)].first);
    std::sort(group.begin(), group.end());
  }
  return out;
}

LongShortPortfolio build_long_short(const RankedGroups& groups) {
  if (groups.groups.size() < 2)
    throw Error(ErrorCode::InvalidParams, "need at least 2 groups");
  const auto& bottom = groups.groups.front();
  const auto& top = groups.groups.back();
  if (bottom.empty() || top.empty())
    throw Error(ErrorCode::EmptyExtremeGroup, "extreme group is empty");

  LongShortPortfolio p;
  p.formation_ord = groups.formation_ord;
  const double wl = 1.0 / double(top.size());
  const double ws = -1.0 / double(bottom.size());
  p.longs.reserve(top.size());
  for (int inst : top) p.longs.push_back({inst, wl});
  p.shorts.reserve(bottom.size());
  for (int inst : bottom) p.shorts.push_back({inst, ws});
  return p;
}

double constituent_return(const PriceStore& store, int inst, int t0_ord, int t1_ord,
                          bool require_fresh_t0) {
  const int e0 = store.last_priced_at_or_before(inst, t0_ord);
  if (e0 < 0)
    throw Error(ErrorCode::NoPriceAvailable,
                store.instruments()[size_t(inst)] + " unpriced at formation");
  if (require_fresh_t0 && t0_ord - e0 > store.options().staleness_limit_days)
    throw Error(ErrorCode::StaleData,
                store.instruments()[size_t(inst)] + " stale at formation");
  const int e1 = store.last_priced_at_or_before(inst, t1_ord);
  if (e1 == e0) return 0.0;  // no new print: position realized earlier or flat
  return store.adj_close(inst, e1) / store.adj_close(inst, e0) - 1.0;
}

double portfolio_return(const LongShortPortfolio& portfolio, const PriceStore& store,
                        int t0_ord, int t1_ord) {
  double total = 0.0;
  const bool fresh = t0_ord == portfolio.formation_ord;
  for (const auto& pos : portfolio.longs)
    total += pos.weight * constituent_return(store, pos.instrument, t0_ord, t1_ord, fresh);
  for (const auto& pos : portfolio.shorts)
    total += pos.weight * constituent_return(store, pos.instrument, t0_ord, t1_ord, fresh);
  return total;
}

void write_portfolio_csv(const LongShortPortfolio& portfolio, const PriceStore& store,
                         const std::filesystem::path& path) {
  std::string out = "formation_date,side,instrument,weight\n";
  const std::string date = format_date(store.calendar().dates[size_t(portfolio.formation_ord)]);
  for (const auto& pos : portfolio.longs)
    out += date + ",long," + store.instruments()[size_t(pos.instrument)] + "," +
           format_double(pos.weight) + "\n";
  for (const auto& pos : portfolio.shorts)
    out += date + ",short," + store.instruments()[size_t(pos.instrument)] + "," +
           format_double(pos.weight) + "\n";
  atomic_write_file(path, out);
}

}  // namespace momlab
