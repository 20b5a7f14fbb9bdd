// engine.hpp — (J,K) backtests, grid sweeps and universe comparisons.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "core/criteria.hpp"
#include "core/market_data.hpp"
#include "core/portfolio.hpp"
#include "core/stats.hpp"
#include "core/universe.hpp"

namespace momlab {

/// sequential: non-overlapping cohorts stepped every K periods; each cohort
/// contributes one per-period observation (its K-period return amortized by
/// K). composite: a new cohort forms every period and the month-t strategy
/// return averages the K active cohorts' month-t returns.
enum class OverlapMode { sequential, composite };

OverlapMode parse_overlap(std::string_view name);
const char* overlap_name(OverlapMode mode);

struct BacktestSpec {
  UniverseExpr universe;
  Criterion criterion;
  int lookback = 6;  // J, periods
  int holding = 6;   // K, periods
  Frequency frequency = Frequency::monthly;
  int group_count = 10;
  double cost_per_basket = 0.0035;  // 35 bps per winner/loser basket
  OverlapMode overlap = OverlapMode::sequential;
};

void validate_spec(const BacktestSpec& spec);

/// Amortized per-period transaction cost: one round trip (2 baskets) per
/// cohort spread over K periods.
inline double amortized_cost(double cost_per_basket, int holding) {
  return 2.0 * cost_per_basket / double(holding);
}

struct CohortRecord {
  int formation_ord = 0;
  int liquidation_ord = 0;       // formation + K period marks
  double raw_return_total = 0.0; // buy-and-hold over the K periods
  LongShortPortfolio portfolio;
};

struct BacktestResult {
  BacktestSpec spec;
  std::vector<int> series_ords;   // observation dates (ordinals), increasing
  std::vector<double> series_raw; // per-period raw returns, cost-free
  std::vector<CohortRecord> cohorts;
  BacktestSummary summary;
  std::vector<std::string> warnings;  // skipped formations etc.
};

BacktestResult run_backtest(const BacktestSpec& spec, const PriceStore& store,
                            const MembershipCalendar& membership);

struct GridSpec {
  BacktestSpec base;  // lookback/holding replaced per cell
  int j_min = 1, j_max = 12;
  int k_min = 1, k_max = 12;
  int threads = 0;  // <= 0: hardware concurrency, capped by MOMLAB_THREADS
};

/// Runs every (J,K) cell independently; per-cell errors are recorded in the
/// cell. Results are identical for any thread count.
GridResult run_grid(const GridSpec& spec, const PriceStore& store,
                    const MembershipCalendar& membership);

struct ComparisonResult {
  std::vector<std::string> labels;   // [0] = baseline
  std::vector<GridResult> grids;     // same order as labels
  std::vector<RelativeGrid> rel_return;  // one per non-baseline universe
  std::vector<RelativeGrid> rel_sharpe;
};

ComparisonResult run_universe_comparison(const GridSpec& spec,
                                         const std::vector<UniverseExpr>& universes,
                                         const PriceStore& store,
                                         const MembershipCalendar& membership);

/// Mean per-period raw return of every ranked group (not just the extremes),
/// sequential stepping. Group 0 = lowest scores.
std::vector<double> run_group_profile(const BacktestSpec& spec, const PriceStore& store,
                                      const MembershipCalendar& membership);

/// Effective worker count: `requested` (or hardware concurrency when <= 0),
/// capped by the MOMLAB_THREADS environment variable.
int resolve_threads(int requested);

}  // namespace momlab
