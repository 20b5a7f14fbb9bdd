#include "core/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "core/csv.hpp"
#include "core/errors.hpp"

#include "json.hpp"

namespace momlab {

namespace {

// Platform-stable normal deviates: mt19937_64 (fully specified by the
// standard) plus an explicit Box-Muller transform. std::normal_distribution
// is implementation-defined and would break byte-identical output.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() {  // (0, 1)
    return (double(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::vector<Date> business_days(int start_year, int n_years) {
  namespace chr = std::chrono;
  std::vector<Date> out;
  const chr::sys_days start{chr::year_month_day{chr::year{start_year}, chr::January, chr::day{1}}};
  const chr::sys_days end{
      chr::year_month_day{chr::year{start_year + n_years}, chr::January, chr::day{1}}};
  for (chr::sys_days d = start; d < end; d += chr::days{1}) {
    const chr::weekday wd{d};
    if (wd == chr::Saturday || wd == chr::Sunday) continue;
    out.push_back(Date{int32_t(d.time_since_epoch().count())});
  }
  return out;
}

std::string instrument_code(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", i + 1);
  return std::string(buf);
}

void validate(const SynthParams& p) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidParams, m); };
  if (p.n_instruments < 2) bad("n_instruments must be >= 2");
  if (p.n_years < 1) bad("n_years must be >= 1");
  if (p.momentum_strength < -1.0 || p.momentum_strength > 1.0)
    bad("momentum_strength must be in [-1, 1]");
  if (p.vol_daily < 0.0) bad("vol_daily must be >= 0");
  if (p.drift_sigma < 0.0) bad("drift_sigma must be >= 0");
  if (p.cap_sigma_log < 0.0) bad("cap_sigma_log must be >= 0");
  if (p.flow_scale < 0.0) bad("flow_scale must be >= 0");
  for (double rho : {p.flow_pred_individual, p.flow_pred_institutional, p.flow_pred_foreign})
    if (rho < -1.0 || rho > 1.0) bad("flow predictiveness must be in [-1, 1]");
  if (p.rebalance_months < 1) bad("rebalance_months must be >= 1");
  const bool carrier_all = p.carrier_lo == 0 && p.carrier_hi == 0;
  if (!carrier_all && (p.carrier_lo < 1 || p.carrier_hi < p.carrier_lo ||
                       p.carrier_hi > p.n_instruments))
    bad("carrier range must be 0,0 (all) or 1 <= lo <= hi <= n_instruments");
  if (p.index_f_count < 0 || p.index_f_count > p.n_instruments) bad("bad index_f_count");
  if (p.index_h_count < 0 || p.index_h_count > p.n_instruments) bad("bad index_h_count");
}

}  // namespace

int effective_f_count(const SynthParams& p) {
  if (p.index_f_count > 0) return p.index_f_count;
  return std::min(50, std::max(1, p.n_instruments / 4));
}

int effective_h_count(const SynthParams& p) {
  if (p.index_h_count > 0) return p.index_h_count;
  return std::min(100, std::max(2, p.n_instruments / 2));
}

SynthMarket generate_market(const SynthParams& params) {
  validate(params);
  const int n = params.n_instruments;
  const int f_count = effective_f_count(params);
  const int h_count = effective_h_count(params);
  const double phi = params.momentum_strength;
  const bool carrier_all = params.carrier_lo == 0 && params.carrier_hi == 0;

  Rng rng(params.seed);
  const auto days = business_days(2000, params.n_years);

  // Per-instrument constants.
  constexpr double kBasePrice = 10000.0;
  std::vector<double> price(size_t(n), kBasePrice);
  std::vector<int64_t> shares(size_t(n), 0);
  std::vector<double> turn_base(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double cap0 = std::exp(params.cap_mu_log + params.cap_sigma_log * rng.normal());
    shares[size_t(i)] = std::max<int64_t>(1, std::llround(cap0 / kBasePrice));
  }
  for (int i = 0; i < n; ++i)
    turn_base[size_t(i)] = std::exp(std::log(0.004) + 0.5 * rng.normal());

  // Monthly drift state; mu_next is pre-drawn so flows can see one month ahead.
  const double innov_sd =
      std::abs(phi) < 1.0 ? params.drift_sigma * std::sqrt(1.0 - phi * phi) : 0.0;
  std::vector<double> mu(size_t(n), 0.0);
  std::vector<double> mu_next(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) mu[size_t(i)] = params.drift_sigma * rng.normal();
  for (int i = 0; i < n; ++i)
    mu_next[size_t(i)] = phi * mu[size_t(i)] + innov_sd * rng.normal();

  std::vector<uint8_t> carrier(size_t(n), 1);
  std::vector<uint8_t> in_f(size_t(n), 0), in_h(size_t(n), 0);

  // Membership segments: open[index][inst] = segment start date, -1 if closed.
  std::vector<int32_t> open_since[3];
  for (auto& v : open_since) v.assign(size_t(n), -1);
  SynthMarket market;
  market.params = params;
  auto close_segment = [&](int index, int inst, Date end) {
    market.membership.push_back(MembershipRow{IndexId(index), instrument_code(inst),
                                              Date{open_since[index][size_t(inst)]}, end});
    open_since[index][size_t(inst)] = -1;
  };

  const double rho_ind = params.flow_pred_individual;
  const double rho_ins = params.flow_pred_institutional;
  const double rho_for = params.flow_pred_foreign;
  const double mix_ind = std::sqrt(1.0 - rho_ind * rho_ind);
  const double mix_ins = std::sqrt(1.0 - rho_ins * rho_ins);
  const double mix_for = std::sqrt(1.0 - rho_for * rho_for);

  market.prices.reserve(days.size() * size_t(n));
  market.flows.reserve(days.size() * size_t(n));

  int month = -1;
  int month_index = -1;
  for (size_t d = 0; d < days.size(); ++d) {
    const Date date = days[d];
    const int mk = month_key(date);
    if (mk != month) {
      month = mk;
      ++month_index;
      if (month_index > 0) {
        mu = mu_next;
        for (int i = 0; i < n; ++i)
          mu_next[size_t(i)] = phi * mu[size_t(i)] + innov_sd * rng.normal();
      }
      if (month_index % params.rebalance_months == 0) {
        // Re-rank by current market cap (descending, code ascending on ties).
        std::vector<int> order(size_t(n), 0);
        for (int i = 0; i < n; ++i) order[size_t(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
          const double ca = price[size_t(a)] * double(shares[size_t(a)]);
          const double cb = price[size_t(b)] * double(shares[size_t(b)]);
          if (ca != cb) return ca > cb;
          return a < b;
        });
        std::vector<int> rank(size_t(n), 0);
        for (int r = 0; r < n; ++r) rank[size_t(order[size_t(r)])] = r + 1;
        for (int i = 0; i < n; ++i) {
          in_f[size_t(i)] = rank[size_t(i)] <= f_count;
          in_h[size_t(i)] = rank[size_t(i)] <= h_count;
          carrier[size_t(i)] = carrier_all || (rank[size_t(i)] >= params.carrier_lo &&
                                               rank[size_t(i)] <= params.carrier_hi);
        }
        // Update membership segments effective from this trading date.
        const Date prev = d > 0 ? days[d - 1] : date;
        for (int i = 0; i < n; ++i) {
          const uint8_t want[3] = {in_f[size_t(i)], in_h[size_t(i)], 1};
          for (int x = 0; x < 3; ++x) {
            const bool is_open = open_since[x][size_t(i)] >= 0;
            if (want[x] && !is_open) open_since[x][size_t(i)] = date.days;
            if (!want[x] && is_open) close_segment(x, i, prev);
          }
        }
      }
    }

    for (int i = 0; i < n; ++i) {
      const double drift_m =
          carrier[size_t(i)] ? params.carrier_drift + mu[size_t(i)] : 0.0;
      const double r =
          std::max(-0.5, drift_m / 21.0 + params.vol_daily * rng.normal());
      price[size_t(i)] *= 1.0 + r;

      const double turnover = turn_base[size_t(i)] * std::exp(0.4 * rng.normal());
      const int64_t volume = std::max<int64_t>(0, std::llround(double(shares[size_t(i)]) * turnover));

      PriceRow row;
      row.date = date;
      row.instrument = instrument_code(i);
      row.adj_close = price[size_t(i)];
      row.volume = volume;
      row.shares_outstanding = shares[size_t(i)];
      row.market_cap = price[size_t(i)] * double(shares[size_t(i)]);
      market.prices.push_back(std::move(row));

      // Flow signal: standardized next-month drift of carrier names.
      const double s = (carrier[size_t(i)] && params.drift_sigma > 0.0)
                           ? mu_next[size_t(i)] / params.drift_sigma
                           : 0.0;
      const double ind_target = rho_ind * s + mix_ind * rng.normal();
      const double x_ins = rho_ins * s + mix_ins * rng.normal() - ind_target / 2.0;
      const double x_for = rho_for * s + mix_for * rng.normal() - ind_target / 2.0;
      const double unit = double(shares[size_t(i)]) * params.flow_scale;
      FlowRow flow;
      flow.date = date;
      flow.instrument = instrument_code(i);
      flow.institutional_net = std::llround(unit * x_ins);
      flow.foreign_net = std::llround(unit * x_for);
      market.flows.push_back(std::move(flow));
    }
  }

  const Date last = days.back();
  for (int x = 0; x < 3; ++x)
    for (int i = 0; i < n; ++i)
      if (open_since[x][size_t(i)] >= 0) close_segment(x, i, last);

  std::sort(market.membership.begin(), market.membership.end(),
            [](const MembershipRow& a, const MembershipRow& b) {
              if (a.index != b.index) return int(a.index) < int(b.index);
              if (a.instrument != b.instrument) return a.instrument < b.instrument;
              return a.start < b.start;
            });
  return market;
}

PriceStore SynthMarket::build_store(const LoadOptions& options) const {
  return build_price_store(prices, options);
}

PriceStore SynthMarket::build_store_with_flows(const LoadOptions& options) const {
  return attach_flows(build_price_store(prices, options), flows);
}

MembershipCalendar SynthMarket::build_membership(const PriceStore& store) const {
  return momlab::build_membership(membership, store);
}

void SynthMarket::write(const std::filesystem::path& dir) const {
  std::string out = "date,instrument,adj_close,volume,shares_outstanding,market_cap\n";
  for (const auto& r : prices) {
    out += format_date(r.date);
    out += ',';
    out += r.instrument;
    out += ',';
    out += format_double(r.adj_close);
    out += ',';
    out += std::to_string(r.volume);
    out += ',';
    out += std::to_string(r.shares_outstanding);
    out += ',';
    out += format_double(r.market_cap);
    out += '\n';
  }
  atomic_write_file(dir / "prices.csv", out);

  out = "date,instrument,institutional_net,foreign_net\n";
  for (const auto& r : flows) {
    out += format_date(r.date);
    out += ',';
    out += r.instrument;
    out += ',';
    out += std::to_string(r.institutional_net);
    out += ',';
    out += std::to_string(r.foreign_net);
    out += '\n';
  }
  atomic_write_file(dir / "flows.csv", out);

  out = "index,instrument,start_date,end_date\n";
  for (const auto& r : membership) {
    out += index_token(r.index);
    out += ',';
    out += r.instrument;
    out += ',';
    out += format_date(r.start);
    out += ',';
    out += format_date(r.end);
    out += '\n';
  }
  atomic_write_file(dir / "membership.csv", out);

  nlohmann::json manifest;
  manifest["generator"] = "momlab synth";
  manifest["rng"] = "mt19937_64 + Box-Muller";
  manifest["params"] = {
      {"n_instruments", params.n_instruments},
      {"n_years", params.n_years},
      {"seed", params.seed},
      {"momentum_strength", params.momentum_strength},
      {"carrier_lo", params.carrier_lo},
      {"carrier_hi", params.carrier_hi},
      {"carrier_drift", params.carrier_drift},
      {"drift_sigma", params.drift_sigma},
      {"vol_daily", params.vol_daily},
      {"cap_mu_log", params.cap_mu_log},
      {"cap_sigma_log", params.cap_sigma_log},
      {"flow_pred_individual", params.flow_pred_individual},
      {"flow_pred_institutional", params.flow_pred_institutional},
      {"flow_pred_foreign", params.flow_pred_foreign},
      {"flow_scale", params.flow_scale},
      {"rebalance_months", params.rebalance_months},
      {"index_f_count", effective_f_count(params)},
      {"index_h_count", effective_h_count(params)},
  };
  atomic_write_file(dir / "synth_manifest.json", manifest.dump(2) + "\n");
}

}  // namespace momlab
