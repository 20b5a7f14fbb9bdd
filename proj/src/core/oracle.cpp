#include "core/oracle.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <set>

#include "core/errors.hpp"

namespace momlab {

namespace {

// Period-end marks recomputed from scratch.
std::vector<int> oracle_marks(const TradingCalendar& cal, Frequency f) {
  std::vector<int> marks;
  for (size_t i = 0; i < cal.dates.size(); ++i) {
    const int key = f == Frequency::monthly ? month_key(cal.dates[i]) : iso_week_key(cal.dates[i]);
    if (i + 1 == cal.dates.size()) {
      marks.push_back(int(i));
    } else {
      const int next = f == Frequency::monthly ? month_key(cal.dates[i + 1])
                                               : iso_week_key(cal.dates[i + 1]);
      if (next != key) marks.push_back(int(i));
    }
  }
  return marks;
}

// Membership evaluated directly from raw interval records.
std::set<int> oracle_index_members(const MembershipCalendar& mc, IndexId id, Date on) {
  std::set<int> out;
  for (const auto& iv : mc.intervals())
    if (iv.index == id && iv.start <= on && on <= iv.end) out.insert(iv.instrument);
  return out;
}

std::set<int> oracle_eval(const UniverseExpr& expr, int node, const MembershipCalendar& mc,
                          Date on) {
  const auto& n = expr.nodes[size_t(node)];
  switch (n.op) {
    case UniverseExpr::Op::base:
      return oracle_index_members(mc, n.base, on);
    case UniverseExpr::Op::intersect: {
      const auto a = oracle_eval(expr, n.lhs, mc, on);
      const auto b = oracle_eval(expr, n.rhs, mc, on);
      std::set<int> out;
      for (int x : a)
        if (b.count(x)) out.insert(x);
      return out;
    }
    case UniverseExpr::Op::unite: {
      auto a = oracle_eval(expr, n.lhs, mc, on);
      const auto b = oracle_eval(expr, n.rhs, mc, on);
      a.insert(b.begin(), b.end());
      return a;
    }
    case UniverseExpr::Op::complement: {
      const auto t = oracle_index_members(mc, IndexId::T, on);
      const auto a = oracle_eval(expr, n.lhs, mc, on);
      std::set<int> out;
      for (int x : t)
        if (!a.count(x)) out.insert(x);
      return out;
    }
  }
  throw Error(ErrorCode::Internal, "bad node");
}

// Last priced ordinal <= ord by backward scan; -1 if none.
int scan_last_print(const PriceStore& store, int inst, int ord) {
  for (int d = ord; d >= 0; --d)
    if (store.priced(inst, d)) return d;
  return -1;
}

bool oracle_eligible(const PriceStore& store, int inst, int first, int last) {
  if (!store.priced(inst, last)) return false;
  int count = 0;
  for (int d = first; d <= last; ++d)
    if (store.priced(inst, d)) ++count;
  const int len = last - first + 1;
  return double(count) + 1e-9 >= store.options().eligibility_threshold * double(len);
}

// Forward-filled close with the staleness rule; NaN when unusable.
double fill_or_nan(const PriceStore& store, int inst, int ord) {
  const int e = scan_last_print(store, inst, ord);
  if (e < 0) return std::numeric_limits<double>::quiet_NaN();
  if (ord - e > store.options().staleness_limit_days)
    return std::numeric_limits<double>::quiet_NaN();
  return store.adj_close(inst, e);
}

}  // namespace

BacktestResult oracle_backtest(const BacktestSpec& spec, const PriceStore& store,
                               const MembershipCalendar& membership) {
  if (spec.overlap != OverlapMode::sequential)
    throw Error(ErrorCode::InvalidParams, "oracle supports sequential mode only");
  validate_spec(spec);

  const auto marks = oracle_marks(store.calendar(), spec.frequency);
  const int J = spec.lookback;
  const int K = spec.holding;
  if (int(marks.size()) < J + K + 1)
    throw Error(ErrorCode::InsufficientHistory, "oracle: not enough period marks");

  BacktestResult result;
  result.spec = spec;
  int candidates = 0;

  for (int p = J; p + K <= int(marks.size()) - 1; p += K) {
    ++candidates;
    const int anchor = marks[size_t(p - J)];
    const int formation = marks[size_t(p)];
    const int liquidation = marks[size_t(p + K)];
    const Date formation_date = store.calendar().dates[size_t(formation)];

    // Scores for eligible members.
    std::vector<std::pair<double, int>> scored;  // (score, instrument)
    for (int inst : oracle_eval(spec.universe, spec.universe.root, membership, formation_date)) {
      if (!oracle_eligible(store, inst, anchor + 1, formation)) continue;
      double score = std::numeric_limits<double>::quiet_NaN();
      switch (spec.criterion.kind) {
        case Criterion::Kind::cumulative_return: {
          const double p0 = fill_or_nan(store, inst, anchor);
          const double p1 = fill_or_nan(store, inst, formation);
          if (!std::isnan(p0) && !std::isnan(p1)) score = p1 / p0 - 1.0;
          break;
        }
        case Criterion::Kind::market_cap: {
          const int e = scan_last_print(store, inst, formation);
          if (e >= 0 && formation - e <= store.options().staleness_limit_days)
            score = store.market_cap(inst, e);
          break;
        }
        case Criterion::Kind::fractional_volume: {
          double sum = 0.0;
          int days = 0;
          for (int d = anchor + 1; d <= formation; ++d) {
            if (!store.priced(inst, d)) continue;
            sum += double(store.volume(inst, d)) / double(store.shares_outstanding(inst, d));
            ++days;
          }
          if (days > 0) score = sum / double(days);
          break;
        }
        case Criterion::Kind::net_flow: {
          if (!store.instrument_has_flows(inst)) break;
          int64_t sum = 0;
          for (int d = anchor + 1; d <= formation; ++d)
            sum += store.net_flow(spec.criterion.group, inst, d);
          const int e = scan_last_print(store, inst, formation);
          if (e >= 0 && formation - e <= store.options().staleness_limit_days)
            score = double(sum) / double(store.shares_outstanding(inst, e));
          break;
        }
      }
      if (std::isnan(score)) continue;  // temporarily removed
      scored.emplace_back(score, inst);
    }

    const int n = int(scored.size());
    if (n < spec.group_count) continue;  // skipped formation

    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });

    // Explicit decile boundaries: losers [0, floor(N/G)), winners
    // [floor((G-1)N/G), N).
    std::vector<int> losers, winners;
    const int g_last = spec.group_count - 1;
    for (int i = 0; i < n; ++i) {
      if (i < int(int64_t(n) / spec.group_count)) losers.push_back(scored[size_t(i)].second);
      if (i >= int(int64_t(g_last) * n / spec.group_count))
        winners.push_back(scored[size_t(i)].second);
    }
    std::sort(losers.begin(), losers.end());
    std::sort(winners.begin(), winners.end());

    // Buy-and-hold raw return with the delisting rule.
    auto leg_return = [&](int inst) {
      const double basis = fill_or_nan(store, inst, formation);
      if (std::isnan(basis))
        throw Error(ErrorCode::StaleData, "oracle: constituent unpriced at formation");
      const int e1 = scan_last_print(store, inst, liquidation);
      const int e0 = scan_last_print(store, inst, formation);
      if (e1 == e0) return 0.0;
      return store.adj_close(inst, e1) / store.adj_close(inst, e0) - 1.0;
    };
    double total = 0.0;
    for (int inst : winners) total += leg_return(inst) / double(winners.size());
    for (int inst : losers) total -= leg_return(inst) / double(losers.size());

    CohortRecord cohort;
    cohort.formation_ord = formation;
    cohort.liquidation_ord = liquidation;
    cohort.raw_return_total = total;
    cohort.portfolio.formation_ord = formation;
    for (int inst : winners)
      cohort.portfolio.longs.push_back({inst, 1.0 / double(winners.size())});
    for (int inst : losers)
      cohort.portfolio.shorts.push_back({inst, -1.0 / double(losers.size())});
    result.cohorts.push_back(std::move(cohort));
    result.series_ords.push_back(liquidation);
    result.series_raw.push_back(total / double(K));
  }

  if (result.cohorts.empty())
    throw Error(ErrorCode::EmptyUniverse,
                "oracle: no portfolio at any of " + std::to_string(candidates) + " formations");

  // Inline summary formulas.
  const auto& xs = result.series_raw;
  const int nobs = int(xs.size());
  if (nobs < 2) throw Error(ErrorCode::SeriesTooShort, "oracle: series too short");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(nobs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / double(nobs - 1));

  BacktestSummary s;
  s.n_periods = nobs;
  s.mean_raw = mean;
  s.volatility = sd;
  s.zero_mean = mean == 0.0;
  s.profitability = mean < 0.0 ? -1.0 : 1.0;
  s.implemented_return = std::abs(mean) - 2.0 * spec.cost_per_basket / double(K);
  if (sd > 0.0) {
    s.sharpe = s.implemented_return / sd;
    s.t_stat = mean / (sd / std::sqrt(double(nobs)));
    const boost::math::students_t dist{double(nobs - 1)};
    s.reject_at_95 = std::abs(s.t_stat) > boost::math::quantile(dist, 0.975);
  } else {
    s.zero_volatility = true;
    s.reject_at_95 = mean != 0.0;
  }
  result.summary = s;
  return result;
}

}  // namespace momlab
