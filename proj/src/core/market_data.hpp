// market_data.hpp — trading calendar and the immutable price/volume/flow panel.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/dates.hpp"

namespace momlab {

enum class Frequency { monthly, weekly };

Frequency parse_frequency(std::string_view name);
const char* frequency_name(Frequency f);

/// Strictly increasing trading dates plus the period-end marks for both
/// supported frequencies. Period marks are ordinals into `dates`; consecutive
/// marks delimit non-overlapping, exhaustive periods.
struct TradingCalendar {
  std::vector<Date> dates;
  std::vector<int> monthly_marks;
  std::vector<int> weekly_marks;

  size_t size() const { return dates.size(); }
  const std::vector<int>& marks(Frequency f) const {
    return f == Frequency::monthly ? monthly_marks : weekly_marks;
  }

  /// Ordinal of an exact trading date, -1 if the date is not in the calendar.
  int ordinal(Date d) const;
  /// Ordinal of the first trading date >= d, or size() if none.
  int first_at_or_after(Date d) const;
  /// Ordinal of the last trading date <= d, or -1 if none.
  int last_at_or_before(Date d) const;

  std::unordered_map<int32_t, int> ordinal_index;  // date.days -> ordinal
};

struct PriceRow {
  Date date;
  std::string instrument;
  double adj_close = 0.0;
  int64_t volume = 0;
  int64_t shares_outstanding = 0;
  double market_cap = 0.0;
};

struct FlowRow {
  Date date;
  std::string instrument;
  int64_t institutional_net = 0;
  int64_t foreign_net = 0;
};

enum class FlowGroup { individual, institutional, foreign_investors };

struct LoadOptions {
  int staleness_limit_days = 10;       // max forward-fill distance, trading days
  double eligibility_threshold = 0.9;  // min fraction of priced days in a lookback window
};

/// Immutable daily panel: adjusted close, volume, shares outstanding, market
/// cap, and optional investor-group net flows, all indexed by (instrument,
/// calendar ordinal). Safe for unsynchronized concurrent reads after load.
class PriceStore {
 public:
  static constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

  const TradingCalendar& calendar() const { return calendar_; }
  const LoadOptions& options() const { return options_; }
  const std::vector<std::string>& instruments() const { return instruments_; }
  size_t n_instruments() const { return instruments_.size(); }
  size_t n_dates() const { return calendar_.dates.size(); }

  /// -1 when the code is unknown. Instrument ids are indexes into
  /// instruments(), which is sorted, so id order == lexicographic code order.
  int instrument_index(std::string_view code) const;

  bool priced(int inst, int ord) const { return !std::isnan(closes_[at(inst, ord)]); }
  double adj_close(int inst, int ord) const { return closes_[at(inst, ord)]; }
  int64_t volume(int inst, int ord) const { return volumes_[at(inst, ord)]; }
  int64_t shares_outstanding(int inst, int ord) const { return shares_[at(inst, ord)]; }
  double market_cap(int inst, int ord) const { return mcaps_[at(inst, ord)]; }

  /// Ordinal of the last priced bar at or before `ord`, -1 if none.
  int last_priced_at_or_before(int inst, int ord) const { return last_print_[at(inst, ord)]; }
  /// Number of priced bars in the inclusive ordinal range [first, last].
  int priced_count(int inst, int first, int last) const {
    return priced_prefix_[size_t(inst) * (n_dates() + 1) + size_t(last) + 1] -
           priced_prefix_[size_t(inst) * (n_dates() + 1) + size_t(first)];
  }

  bool has_flows() const { return has_flows_; }
  bool instrument_has_flows(int inst) const {
    return has_flows_ && instrument_has_flows_[size_t(inst)] != 0;
  }
  int64_t institutional_net(int inst, int ord) const { return ins_net_[at(inst, ord)]; }
  int64_t foreign_net(int inst, int ord) const { return for_net_[at(inst, ord)]; }
  /// Derived leg: the exact negation forced by the zero-sum identity.
  int64_t individual_net(int inst, int ord) const {
    return -(institutional_net(inst, ord) + foreign_net(inst, ord));
  }
  int64_t net_flow(FlowGroup g, int inst, int ord) const {
    switch (g) {
      case FlowGroup::institutional: return institutional_net(inst, ord);
      case FlowGroup::foreign_investors: return foreign_net(inst, ord);
      case FlowGroup::individual: return individual_net(inst, ord);
    }
    return 0;
  }

 private:
  size_t at(int inst, int ord) const { return size_t(inst) * n_dates() + size_t(ord); }

  TradingCalendar calendar_;
  LoadOptions options_;
  std::vector<std::string> instruments_;
  std::unordered_map<std::string, int> instrument_ids_;
  std::vector<double> closes_;
  std::vector<int64_t> volumes_;
  std::vector<int64_t> shares_;
  std::vector<double> mcaps_;
  std::vector<int32_t> last_print_;
  std::vector<int32_t> priced_prefix_;
  bool has_flows_ = false;
  std::vector<uint8_t> instrument_has_flows_;
  std::vector<int64_t> ins_net_;
  std::vector<int64_t> for_net_;

  friend PriceStore build_price_store(const std::vector<PriceRow>&, const LoadOptions&);
  friend PriceStore attach_flows(const PriceStore&, const std::vector<FlowRow>&);
};

/// Builds the immutable store from rows (calendar = union of observed dates).
PriceStore build_price_store(const std::vector<PriceRow>& rows, const LoadOptions& options = {});

/// Loads prices.csv: `date,instrument,adj_close,volume,shares_outstanding,market_cap`.
PriceStore load_prices(const std::filesystem::path& path, const LoadOptions& options = {});

/// Returns a copy of `store` with flows attached; the input is not mutated.
PriceStore attach_flows(const PriceStore& store, const std::vector<FlowRow>& rows);

/// Loads flows.csv: `date,instrument,institutional_net,foreign_net`. The
/// individual leg is always derived, never read.
PriceStore load_flows(const std::filesystem::path& path, const PriceStore& store);

/// Simple holding-period return adj_close(t1)/adj_close(t0) - 1 with
/// forward-fill at both endpoints, limited by options().staleness_limit_days.
/// Throws NoPriceAvailable / StaleData.
double period_return(const PriceStore& store, int inst, int t0_ord, int t1_ord);

/// Paper-style temporary-removal gate: the instrument must be priced on at
/// least `eligibility_threshold` of the trading days in [first, last] and have
/// a bar on the formation date (= last). Unknown instrument (-1) -> false.
bool eligible(const PriceStore& store, int inst, int first, int last);

}  // namespace momlab
