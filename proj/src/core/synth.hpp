// synth.hpp — synthetic markets with controllable momentum, size structure,
// flows and nested index membership.
#pragma once

#include <cstdint>
#include <filesystem>

#include "core/market_data.hpp"
#include "core/universe.hpp"

namespace momlab {

/// Generation model, in brief: each instrument carries a monthly drift that
/// follows an AR(1) with per-period persistence `momentum_strength`; the
/// drift (plus a constant `carrier_drift` level) is applied only to the
/// carrier set, re-evaluated by market-cap rank every `rebalance_months`
/// together with index membership (top f_count -> F, top h_count -> H,
/// everyone -> T, so F ⊂ H ⊂ T always). Daily returns add idiosyncratic
/// noise `vol_daily`. Investor-group flows mix a standardized next-month
/// drift signal with noise at the configured predictiveness; the individual
/// leg is implied by the zero-sum identity.
///
/// Randomness: mt19937_64 seeded with `seed`, normals via Box-Muller on
/// explicitly mapped uniforms, so output is reproducible for fixed params.
struct SynthParams {
  int n_instruments = 200;
  int n_years = 12;
  uint64_t seed = 1;

  double momentum_strength = 0.0;  // phi in [-1, 1]
  int carrier_lo = 0;              // cap ranks from the largest; 0,0 = all
  int carrier_hi = 0;
  double carrier_drift = 0.006;    // mean monthly drift of carrier names
  double drift_sigma = 0.025;      // stationary sd of the monthly drift
  double vol_daily = 0.013;        // idiosyncratic daily return sd

  double cap_mu_log = 27.6;        // log-normal initial market caps
  double cap_sigma_log = 1.2;

  double flow_pred_individual = 0.0;  // each in [-1, 1]
  double flow_pred_institutional = 0.0;
  double flow_pred_foreign = 0.0;
  double flow_scale = 0.001;       // daily |net flow| scale, fraction of shares

  int rebalance_months = 6;        // index re-ranking cadence
  int index_f_count = 0;           // 0 = min(50, max(1, n/4))
  int index_h_count = 0;           // 0 = min(100, max(2, n/2))
};

struct SynthMarket {
  SynthParams params;
  std::vector<PriceRow> prices;          // (date, instrument) order
  std::vector<FlowRow> flows;
  std::vector<MembershipRow> membership; // (index, instrument, start) order

  PriceStore build_store(const LoadOptions& options = {}) const;
  PriceStore build_store_with_flows(const LoadOptions& options = {}) const;
  MembershipCalendar build_membership(const PriceStore& store) const;

  /// Writes prices.csv, membership.csv, flows.csv and synth_manifest.json.
  void write(const std::filesystem::path& dir) const;
};

SynthMarket generate_market(const SynthParams& params);

int effective_f_count(const SynthParams& params);
int effective_h_count(const SynthParams& params);

}  // namespace momlab
