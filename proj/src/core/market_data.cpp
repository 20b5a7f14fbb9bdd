#include "core/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace momlab {

Frequency parse_frequency(std::string_view name) {
  if (name == "monthly") return Frequency::monthly;
  if (name == "weekly") return Frequency::weekly;
  throw Error(ErrorCode::InvalidParams, "unknown frequency '" + std::string(name) + "'");
}

const char* frequency_name(Frequency f) {
  return f == Frequency::monthly ? "monthly" : "weekly";
}

int TradingCalendar::ordinal(Date d) const {
  const auto it = ordinal_index.find(d.days);
  return it == ordinal_index.end() ? -1 : it->second;
}

int TradingCalendar::first_at_or_after(Date d) const {
  const auto it = std::lower_bound(dates.begin(), dates.end(), d);
  return int(it - dates.begin());
}

int TradingCalendar::last_at_or_before(Date d) const {
  const auto it = std::upper_bound(dates.begin(), dates.end(), d);
  return int(it - dates.begin()) - 1;
}

int PriceStore::instrument_index(std::string_view code) const {
  const auto it = instrument_ids_.find(std::string(code));
  return it == instrument_ids_.end() ? -1 : it->second;
}

namespace {

TradingCalendar build_calendar(const std::set<Date>& observed) {
  TradingCalendar cal;
  cal.dates.assign(observed.begin(), observed.end());
  cal.ordinal_index.reserve(cal.dates.size());
  for (size_t i = 0; i < cal.dates.size(); ++i)
    cal.ordinal_index.emplace(cal.dates[i].days, int(i));
  const int n = int(cal.dates.size());
  for (int i = 0; i < n; ++i) {
    if (i + 1 == n || month_key(cal.dates[i + 1]) != month_key(cal.dates[i]))
      cal.monthly_marks.push_back(i);
    if (i + 1 == n || iso_week_key(cal.dates[i + 1]) != iso_week_key(cal.dates[i]))
      cal.weekly_marks.push_back(i);
  }
  return cal;
}

}  // namespace

PriceStore build_price_store(const std::vector<PriceRow>& rows, const LoadOptions& options) {
  if (rows.empty()) throw Error(ErrorCode::EmptyDataset, "no price rows");
  if (options.staleness_limit_days < 0 || options.eligibility_threshold < 0.0 ||
      options.eligibility_threshold > 1.0)
    throw Error(ErrorCode::InvalidParams, "bad load options");

  std::set<Date> observed;
  std::set<std::string> codes;
  for (const auto& r : rows) {
    if (r.instrument.empty())
      throw Error(ErrorCode::MalformedRow, "empty instrument code");
    if (!(r.adj_close > 0.0))
      throw Error(ErrorCode::NonPositivePrice,
                  r.instrument + " @ " + format_date(r.date) + ": adj_close must be > 0");
    if (!(r.market_cap > 0.0))
      throw Error(ErrorCode::NonPositivePrice,
                  r.instrument + " @ " + format_date(r.date) + ": market_cap must be > 0");
    if (r.shares_outstanding <= 0)
      throw Error(ErrorCode::NonPositivePrice,
                  r.instrument + " @ " + format_date(r.date) + ": shares_outstanding must be > 0");
    if (r.volume < 0)
      throw Error(ErrorCode::MalformedRow,
                  r.instrument + " @ " + format_date(r.date) + ": negative volume");
    observed.insert(r.date);
    codes.insert(r.instrument);
  }

  PriceStore store;
  store.options_ = options;
  store.calendar_ = build_calendar(observed);
  store.instruments_.assign(codes.begin(), codes.end());
  for (size_t i = 0; i < store.instruments_.size(); ++i)
    store.instrument_ids_.emplace(store.instruments_[i], int(i));

  const size_t n_inst = store.instruments_.size();
  const size_t n_dates = store.calendar_.dates.size();
  store.closes_.assign(n_inst * n_dates, PriceStore::kAbsent);
  store.volumes_.assign(n_inst * n_dates, 0);
  store.shares_.assign(n_inst * n_dates, 0);
  store.mcaps_.assign(n_inst * n_dates, PriceStore::kAbsent);

  for (const auto& r : rows) {
    const int inst = store.instrument_ids_.at(r.instrument);
    const int ord = store.calendar_.ordinal(r.date);
    const size_t k = size_t(inst) * n_dates + size_t(ord);
    if (!std::isnan(store.closes_[k]))
      throw Error(ErrorCode::DuplicateBar, r.instrument + " @ " + format_date(r.date));
    store.closes_[k] = r.adj_close;
    store.volumes_[k] = r.volume;
    store.shares_[k] = r.shares_outstanding;
    store.mcaps_[k] = r.market_cap;
  }

  store.last_print_.assign(n_inst * n_dates, -1);
  store.priced_prefix_.assign(n_inst * (n_dates + 1), 0);
  for (size_t i = 0; i < n_inst; ++i) {
    int32_t last = -1;
    for (size_t d = 0; d < n_dates; ++d) {
      const size_t k = i * n_dates + d;
      const bool has = !std::isnan(store.closes_[k]);
      if (has) last = int32_t(d);
      store.last_print_[k] = last;
      store.priced_prefix_[i * (n_dates + 1) + d + 1] =
          store.priced_prefix_[i * (n_dates + 1) + d] + (has ? 1 : 0);
    }
  }
  return store;
}

PriceStore load_prices(const std::filesystem::path& path, const LoadOptions& options) {
  std::vector<PriceRow> rows;
  read_csv(path, "date,instrument,adj_close,volume,shares_outstanding,market_cap",
           [&](size_t line, const std::vector<std::string_view>& f) {
             PriceRow r;
             try {
               r.date = parse_date(f[0]);
             } catch (const Error& e) {
               throw Error(ErrorCode::MalformedRow,
                           path.string() + ":" + std::to_string(line) + ": " + e.what());
             }
             r.instrument = std::string(f[1]);
             r.adj_close = parse_double_field(f[2], line, "adj_close");
             r.volume = parse_int_field64(f[3], line, "volume");
             r.shares_outstanding = parse_int_field64(f[4], line, "shares_outstanding");
             r.market_cap = parse_double_field(f[5], line, "market_cap");
             rows.push_back(std::move(r));
           });
  return build_price_store(rows, options);
}

PriceStore attach_flows(const PriceStore& store, const std::vector<FlowRow>& rows) {
  PriceStore out = store;  // the input store is never mutated
  const size_t n_inst = out.n_instruments();
  const size_t n_dates = out.n_dates();
  out.ins_net_.assign(n_inst * n_dates, 0);
  out.for_net_.assign(n_inst * n_dates, 0);
  out.instrument_has_flows_.assign(n_inst, 0);
  for (const auto& r : rows) {
    const int inst = out.instrument_index(r.instrument);
    if (inst < 0)
      throw Error(ErrorCode::UnknownInstrument, r.instrument + " (flows)");
    const int ord = out.calendar_.ordinal(r.date);
    if (ord < 0)
      throw Error(ErrorCode::DateOutsideCalendar,
                  r.instrument + " @ " + format_date(r.date) + " (flows)");
    const size_t k = size_t(inst) * n_dates + size_t(ord);
    out.ins_net_[k] += r.institutional_net;
    out.for_net_[k] += r.foreign_net;
    out.instrument_has_flows_[size_t(inst)] = 1;
  }
  out.has_flows_ = true;
  return out;
}

PriceStore load_flows(const std::filesystem::path& path, const PriceStore& store) {
  std::vector<FlowRow> rows;
  read_csv(path, "date,instrument,institutional_net,foreign_net",
           [&](size_t line, const std::vector<std::string_view>& f) {
             FlowRow r;
             try {
               r.date = parse_date(f[0]);
             } catch (const Error& e) {
               throw Error(ErrorCode::MalformedRow,
                           path.string() + ":" + std::to_string(line) + ": " + e.what());
             }
             r.instrument = std::string(f[1]);
             r.institutional_net = parse_int_field64(f[2], line, "institutional_net");
             r.foreign_net = parse_int_field64(f[3], line, "foreign_net");
             rows.push_back(std::move(r));
           });
  return attach_flows(store, rows);
}

namespace {

// Forward-filled price at `ord`; throws if absent or stale.
double filled_close(const PriceStore& store, int inst, int ord) {
  const int e = store.last_priced_at_or_before(inst, ord);
  if (e < 0)
    throw Error(ErrorCode::NoPriceAvailable,
                store.instruments()[size_t(inst)] + " has no bar at or before " +
                    format_date(store.calendar().dates[size_t(ord)]));
  if (ord - e > store.options().staleness_limit_days)
    throw Error(ErrorCode::StaleData,
                store.instruments()[size_t(inst)] + " last print " + std::to_string(ord - e) +
                    " trading days before " + format_date(store.calendar().dates[size_t(ord)]));
  return store.adj_close(inst, e);
}

}  // namespace

double period_return(const PriceStore& store, int inst, int t0_ord, int t1_ord) {
  if (inst < 0 || size_t(inst) >= store.n_instruments())
    throw Error(ErrorCode::UnknownInstrument, "instrument id " + std::to_string(inst));
  if (t0_ord < 0 || t1_ord < t0_ord || size_t(t1_ord) >= store.n_dates())
    throw Error(ErrorCode::InvalidParams, "period_return wants 0 <= t0 <= t1 < n_dates");
  const double p0 = filled_close(store, inst, t0_ord);
  const double p1 = filled_close(store, inst, t1_ord);
  return p1 / p0 - 1.0;
}

bool eligible(const PriceStore& store, int inst, int first, int last) {
  if (inst < 0 || size_t(inst) >= store.n_instruments()) return false;
  if (first < 0 || last < first || size_t(last) >= store.n_dates()) return false;
  if (!store.priced(inst, last)) return false;  // must have a bar on the formation date
  const int len = last - first + 1;
  const int count = store.priced_count(inst, first, last);
  return double(count) + 1e-9 >= store.options().eligibility_threshold * double(len);
}

}  // namespace momlab
