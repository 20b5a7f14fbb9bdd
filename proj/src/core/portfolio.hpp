// portfolio.hpp — quantile grouping and the dollar-neutral long-short book.
#pragma once

#include <filesystem>
#include <vector>

#include "core/criteria.hpp"
#include "core/market_data.hpp"

namespace momlab {

/// G ordered groups, group 0 = lowest scores .. group G-1 = highest. Groups
/// partition the scored instruments; within-group order is ascending by
/// (score, instrument id).
struct RankedGroups {
  int formation_ord = 0;
  std::vector<std::vector<int>> groups;
};

/// Sorts ascending by (score, instrument id) and cuts at boundaries
/// floor(g*N/G), so group sizes differ by at most one. Requires N >= G >= 2.
RankedGroups rank_and_group(const ScoreVector& scores, int group_count);

struct Position {
  int instrument = 0;
  double weight = 0.0;
};

/// Long the top group at +1/|top| each, short the bottom group at -1/|bottom|
/// each: equal cash legs, dollar-neutral.
struct LongShortPortfolio {
  int formation_ord = 0;
  std::vector<Position> longs;
  std::vector<Position> shorts;  // negative weights
};

LongShortPortfolio build_long_short(const RankedGroups& groups);

/// Buy-and-hold return of one constituent over (t0, t1]: forward-filled at
/// both ends; a constituent whose prints stop realizes to its last print and
/// sits in cash afterwards (returns 0 once no new print arrives).
/// `require_fresh_t0` enforces the formation staleness check.
double constituent_return(const PriceStore& store, int inst, int t0_ord, int t1_ord,
                          bool require_fresh_t0);

/// Weighted raw return of the book over (t0, t1]. Propagates StaleData /
/// NoPriceAvailable only when a constituent has no usable price at formation.
double portfolio_return(const LongShortPortfolio& portfolio, const PriceStore& store,
                        int t0_ord, int t1_ord);

/// Debug dump: `formation_date,side,instrument,weight`.
void write_portfolio_csv(const LongShortPortfolio& portfolio, const PriceStore& store,
                         const std::filesystem::path& path);

}  // namespace momlab
