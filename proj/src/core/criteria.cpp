#include "core/criteria.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace momlab {

Criterion parse_criterion(std::string_view name) {
  if (name == "momentum") return {Criterion::Kind::cumulative_return, FlowGroup::individual};
  if (name == "size") return {Criterion::Kind::market_cap, FlowGroup::individual};
  if (name == "liquidity") return {Criterion::Kind::fractional_volume, FlowGroup::individual};
  if (name == "flow:individual") return {Criterion::Kind::net_flow, FlowGroup::individual};
  if (name == "flow:institutional") return {Criterion::Kind::net_flow, FlowGroup::institutional};
  if (name == "flow:foreign") return {Criterion::Kind::net_flow, FlowGroup::foreign_investors};
  throw Error(ErrorCode::UnknownCriterion, "'" + std::string(name) + "'");
}

std::string criterion_name(Criterion c) {
  switch (c.kind) {
    case Criterion::Kind::cumulative_return: return "momentum";
    case Criterion::Kind::market_cap: return "size";
    case Criterion::Kind::fractional_volume: return "liquidity";
    case Criterion::Kind::net_flow:
      switch (c.group) {
        case FlowGroup::individual: return "flow:individual";
        case FlowGroup::institutional: return "flow:institutional";
        case FlowGroup::foreign_investors: return "flow:foreign";
      }
  }
  return "?";
}

LookbackWindow lookback_window(const std::vector<int>& marks, int p, int lookback_periods) {
  if (lookback_periods < 1)
    throw Error(ErrorCode::InvalidParams, "lookback must be >= 1");
  if (p < lookback_periods || size_t(p) >= marks.size())
    throw Error(ErrorCode::InsufficientHistory,
                "formation mark " + std::to_string(p) + " needs " +
                    std::to_string(lookback_periods) + " periods of history");
  LookbackWindow w;
  w.anchor = marks[size_t(p - lookback_periods)];
  w.first = w.anchor + 1;
  w.last = marks[size_t(p)];
  return w;
}

double score_cumulative_return(const PriceStore& store, int inst, const LookbackWindow& w) {
  return period_return(store, inst, w.anchor, w.last);
}

namespace {

// Last priced ordinal at or before `ord` under the staleness rule.
int fresh_print(const PriceStore& store, int inst, int ord) {
  const int e = store.last_priced_at_or_before(inst, ord);
  if (e < 0)
    throw Error(ErrorCode::NoPriceAvailable,
                store.instruments()[size_t(inst)] + " unpriced at " +
                    format_date(store.calendar().dates[size_t(ord)]));
  if (ord - e > store.options().staleness_limit_days)
    throw Error(ErrorCode::StaleData, store.instruments()[size_t(inst)] + " stale at " +
                                          format_date(store.calendar().dates[size_t(ord)]));
  return e;
}

}  // namespace

double score_market_cap(const PriceStore& store, int inst, int formation_ord) {
  return store.market_cap(inst, fresh_print(store, inst, formation_ord));
}

double score_fractional_volume(const PriceStore& store, int inst, const LookbackWindow& w) {
  double sum = 0.0;
  int days = 0;
  for (int d = w.first; d <= w.last; ++d) {
    if (!store.priced(inst, d)) continue;
    sum += double(store.volume(inst, d)) / double(store.shares_outstanding(inst, d));
    ++days;
  }
  if (days == 0)
    throw Error(ErrorCode::NoPriceAvailable,
                store.instruments()[size_t(inst)] + " has no bars in the lookback window");
  return sum / double(days);
}

double score_net_flow(const PriceStore& store, FlowGroup group, int inst,
                      const LookbackWindow& w) {
  if (!store.instrument_has_flows(inst))
    throw Error(ErrorCode::NoFlowData, store.has_flows()
                                           ? store.instruments()[size_t(inst)] + " has no flow records"
                                           : std::string("no flow data loaded"));
  int64_t sum = 0;
  for (int d = w.first; d <= w.last; ++d) sum += store.net_flow(group, inst, d);
  const int64_t shares = store.shares_outstanding(inst, fresh_print(store, inst, w.last));
  return double(sum) / double(shares);
}

ScoreVector build_scores(const PriceStore& store, const MembershipCalendar& calendar,
                         const UniverseExpr& expr, Criterion criterion,
                         const std::vector<int>& marks, int p, int lookback_periods) {
  const LookbackWindow w = lookback_window(marks, p, lookback_periods);
  if (criterion.kind == Criterion::Kind::net_flow && !store.has_flows())
    throw Error(ErrorCode::NoFlowData, "flow criterion requires loaded flow data");
  ScoreVector out;
  out.formation_ord = w.last;

  const auto ids = members(expr, calendar, w.last);
  for (int inst : ids) {
    if (!eligible(store, inst, w.first, w.last)) {
      ++out.ineligible_count;
      continue;
    }
    double score = 0.0;
    try {
      switch (criterion.kind) {
        case Criterion::Kind::cumulative_return:
          score = score_cumulative_return(store, inst, w);
          break;
        case Criterion::Kind::market_cap:
          score = score_market_cap(store, inst, w.last);
          break;
        case Criterion::Kind::fractional_volume:
          score = score_fractional_volume(store, inst, w);
          break;
        case Criterion::Kind::net_flow:
          score = score_net_flow(store, criterion.group, inst, w);
          break;
      }
    } catch (const Error& e) {
      // A member whose score cannot be computed from the available data is
      // removed for this formation only, same as the eligibility gate.
      if (e.code() == ErrorCode::NoPriceAvailable || e.code() == ErrorCode::StaleData ||
          e.code() == ErrorCode::NoFlowData) {
        ++out.ineligible_count;
        continue;
      }
      throw;
    }
    if (!std::isfinite(score))
      throw Error(ErrorCode::Internal,
                  "non-finite score for " + store.instruments()[size_t(inst)]);
    out.entries.emplace_back(inst, score);
  }

  if (out.entries.empty())
    throw Error(ErrorCode::EmptyUniverse,
                "universe '" + expr.label + "' has no eligible members at " +
                    format_date(store.calendar().dates[size_t(w.last)]));
  return out;
}

}  // namespace momlab
