// criteria.hpp — scalar ranking scores per instrument over a lookback window.
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/market_data.hpp"
#include "core/universe.hpp"

namespace momlab {

struct Criterion {
  enum class Kind { cumulative_return, market_cap, fractional_volume, net_flow };
  Kind kind = Kind::cumulative_return;
  FlowGroup group = FlowGroup::individual;  // meaningful for net_flow only

  bool operator==(const Criterion&) const = default;
};

/// Names: momentum, size, liquidity, flow:individual, flow:institutional,
/// flow:foreign.
Criterion parse_criterion(std::string_view name);
std::string criterion_name(Criterion c);

/// Lookback window for a formation at period mark p with J lookback periods:
/// `anchor` is the mark J periods earlier (the price base for cumulative
/// returns) and the window days are the trading ordinals (anchor, last].
struct LookbackWindow {
  int anchor = 0;  // ordinal of period mark p-J
  int first = 0;   // anchor + 1
  int last = 0;    // ordinal of the formation mark p
};

/// Builds the window for formation mark index p; requires p >= J.
LookbackWindow lookback_window(const std::vector<int>& marks, int p, int lookback_periods);

/// Cumulative simple return over the window.
double score_cumulative_return(const PriceStore& store, int inst, const LookbackWindow& w);

/// Market capitalization at the last priced date <= formation (staleness rule
/// shared with prices).
double score_market_cap(const PriceStore& store, int inst, int formation_ord);

/// Mean daily turnover (volume / shares outstanding) over the window days
/// with bars.
double score_fractional_volume(const PriceStore& store, int inst, const LookbackWindow& w);

/// Net fractional buying: the group's summed net volume over the window
/// divided by shares outstanding at the window end.
double score_net_flow(const PriceStore& store, FlowGroup group, int inst,
                      const LookbackWindow& w);

struct ScoreVector {
  int formation_ord = 0;
  std::vector<std::pair<int, double>> entries;  // (instrument id, score)
  int ineligible_count = 0;
};

/// Scores every eligible member of the universe at the formation mark.
/// Members failing the eligibility gate, or whose score cannot be computed
/// from the available data, are omitted and counted (the temporary-removal
/// rule). Throws EmptyUniverse when nothing survives.
ScoreVector build_scores(const PriceStore& store, const MembershipCalendar& calendar,
                         const UniverseExpr& expr, Criterion criterion,
                         const std::vector<int>& marks, int p, int lookback_periods);

}  // namespace momlab
