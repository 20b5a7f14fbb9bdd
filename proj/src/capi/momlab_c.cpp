// momlab_c.cpp — extern-C shim over the C++ core.
#include "momlab/momlab.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/engine.hpp"
#include "core/errors.hpp"
#include "core/report.hpp"
#include "core/synth.hpp"

using namespace momlab;

namespace {

thread_local std::string g_last_error;

momlab_status set_error(const std::string& message, momlab_status status) {
  g_last_error = message;
  return status;
}

momlab_status from_exception() {
  try {
    throw;
  } catch (const Error& e) {
    return set_error(e.what(), momlab_status(int(e.error_category())));
  } catch (const std::exception& e) {
    return set_error(e.what(), MOMLAB_E_INTERNAL);
  } catch (...) {
    return set_error("unknown error", MOMLAB_E_INTERNAL);
  }
}

nlohmann::json params_json(const momlab_backtest_params& p) {
  return {
      {"universe", p.universe ? p.universe : ""},
      {"criterion", p.criterion ? p.criterion : ""},
      {"lookback", p.lookback},
      {"holding", p.holding},
      {"groups", p.groups},
      {"cost_per_basket", p.cost_per_basket},
      {"overlap", p.overlap ? p.overlap : ""},
  };
}

}  // namespace

struct momlab_dataset {
  PriceStore store;
  MembershipCalendar membership;
  std::string warnings;
  nlohmann::json manifest_inputs;
};

struct momlab_backtest {
  BacktestResult result;
  const momlab_dataset* dataset;
  nlohmann::json manifest;
  std::string warnings;
};

struct momlab_grid {
  GridResult grid;
  ReportOptions report;
  nlohmann::json manifest;
};

struct momlab_compare {
  ComparisonResult comparison;
  ReportOptions report;
  nlohmann::json manifest;
};

namespace {

BacktestSpec to_spec(const momlab_dataset* dataset, const momlab_backtest_params& p) {
  BacktestSpec spec;
  spec.universe = parse_universe(p.universe ? p.universe : "");
  spec.criterion = parse_criterion(p.criterion ? p.criterion : "");
  spec.lookback = p.lookback;
  spec.holding = p.holding;
  spec.frequency = parse_frequency(dataset->manifest_inputs.value("frequency", "monthly"));
  spec.group_count = p.groups;
  spec.cost_per_basket = p.cost_per_basket;
  spec.overlap = parse_overlap(p.overlap ? p.overlap : "sequential");
  return spec;
}

void fill_summary(const BacktestSummary& s, momlab_summary* out) {
  out->mean_raw = s.mean_raw;
  out->volatility = s.volatility;
  out->profitability = s.profitability;
  out->implemented_return = s.implemented_return;
  out->sharpe = s.sharpe;
  out->t_stat = s.t_stat;
  out->t_stat_nw = s.t_stat_nw.value_or(0.0);
  out->has_t_stat_nw = s.t_stat_nw.has_value();
  out->n_periods = s.n_periods;
  out->zero_volatility = s.zero_volatility;
  out->zero_mean = s.zero_mean;
  out->reject_at_95 = s.reject_at_95;
}

GridSpec to_grid_spec(const momlab_dataset* dataset, const momlab_grid_params& p) {
  GridSpec spec;
  spec.base = to_spec(dataset, p.base);
  spec.j_min = p.lookback_min;
  spec.j_max = p.lookback_max;
  spec.k_min = p.holding_min;
  spec.k_max = p.holding_max;
  spec.threads = p.base.threads;
  return spec;
}

nlohmann::json grid_params_json(const momlab_grid_params& p) {
  auto j = params_json(p.base);
  j.erase("lookback");
  j.erase("holding");
  j["lookback_range"] = {p.lookback_min, p.lookback_max};
  j["holding_range"] = {p.holding_min, p.holding_max};
  j["heat_return_bound"] = p.heat_return_bound;
  j["matrix_csv"] = bool(p.matrix_csv);
  return j;
}

}  // namespace

extern "C" {

const char* momlab_version(void) { return "0.1.0"; }

const char* momlab_last_error(void) { return g_last_error.c_str(); }

void momlab_dataset_opts_init(momlab_dataset_opts* opts) {
  opts->frequency = "monthly";
  opts->staleness_days = 10;
  opts->eligibility_threshold = 0.9;
}

momlab_status momlab_dataset_open(const char* prices_csv, const char* membership_csv,
                                  const char* flows_csv, const momlab_dataset_opts* opts,
                                  momlab_dataset** out) {
  if (!out) return set_error("out is null", MOMLAB_E_CONFIG);
  *out = nullptr;
  if (!prices_csv || !membership_csv)
    return set_error("prices_csv and membership_csv are required", MOMLAB_E_CONFIG);
  try {
    momlab_dataset_opts defaults;
    momlab_dataset_opts_init(&defaults);
    if (!opts) opts = &defaults;
    LoadOptions load;
    load.staleness_limit_days = opts->staleness_days;
    load.eligibility_threshold = opts->eligibility_threshold;
    parse_frequency(opts->frequency ? opts->frequency : "monthly");  // validate

    auto ds = std::make_unique<momlab_dataset>();
    ds->store = load_prices(prices_csv, load);
    if (flows_csv && flows_csv[0] != '\0') ds->store = load_flows(flows_csv, ds->store);
    ds->membership = load_membership(membership_csv, ds->store);
    for (const auto& w : ds->membership.warnings()) {
      ds->warnings += w;
      ds->warnings += '\n';
    }
    ds->manifest_inputs = {
        {"prices", prices_csv},
        {"membership", membership_csv},
        {"flows", flows_csv ? flows_csv : ""},
        {"frequency", opts->frequency ? opts->frequency : "monthly"},
        {"staleness_days", opts->staleness_days},
        {"eligibility_threshold", opts->eligibility_threshold},
    };
    *out = ds.release();
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

void momlab_dataset_close(momlab_dataset* dataset) { delete dataset; }

int momlab_dataset_instruments(const momlab_dataset* dataset) {
  return dataset ? int(dataset->store.n_instruments()) : 0;
}

int momlab_dataset_periods(const momlab_dataset* dataset) {
  if (!dataset) return 0;
  const Frequency f =
      parse_frequency(dataset->manifest_inputs.value("frequency", "monthly"));
  return int(dataset->store.calendar().marks(f).size());
}

const char* momlab_dataset_warnings(const momlab_dataset* dataset) {
  return dataset ? dataset->warnings.c_str() : "";
}

void momlab_backtest_params_init(momlab_backtest_params* params) {
  params->universe = "200";
  params->criterion = "momentum";
  params->lookback = 6;
  params->holding = 6;
  params->groups = 10;
  params->cost_per_basket = 0.0035;
  params->overlap = "sequential";
  params->threads = 0;
}

momlab_status momlab_backtest_run(const momlab_dataset* dataset,
                                  const momlab_backtest_params* params, momlab_backtest** out) {
  if (!out) return set_error("out is null", MOMLAB_E_CONFIG);
  *out = nullptr;
  if (!dataset || !params) return set_error("null argument", MOMLAB_E_CONFIG);
  try {
    auto bt = std::make_unique<momlab_backtest>();
    bt->dataset = dataset;
    bt->result = run_backtest(to_spec(dataset, *params), dataset->store, dataset->membership);
    for (const auto& w : bt->result.warnings) {
      bt->warnings += w;
      bt->warnings += '\n';
    }
    bt->manifest = {{"command", "backtest"},
                    {"version", momlab_version()},
                    {"params", params_json(*params)},
                    {"inputs", dataset->manifest_inputs}};
    *out = bt.release();
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

momlab_status momlab_backtest_summary(const momlab_backtest* backtest, momlab_summary* out) {
  if (!backtest || !out) return set_error("null argument", MOMLAB_E_CONFIG);
  fill_summary(backtest->result.summary, out);
  return MOMLAB_OK;
}

const char* momlab_backtest_warnings(const momlab_backtest* backtest) {
  return backtest ? backtest->warnings.c_str() : "";
}

int momlab_backtest_series_len(const momlab_backtest* backtest) {
  return backtest ? int(backtest->result.series_raw.size()) : 0;
}

int momlab_backtest_series(const momlab_backtest* backtest, double* values, int cap) {
  if (!backtest || !values || cap <= 0) return 0;
  const int n = std::min(cap, int(backtest->result.series_raw.size()));
  std::memcpy(values, backtest->result.series_raw.data(), size_t(n) * sizeof(double));
  return n;
}

momlab_status momlab_backtest_write(const momlab_backtest* backtest, const char* out_dir) {
  if (!backtest || !out_dir) return set_error("null argument", MOMLAB_E_CONFIG);
  try {
    write_backtest_outputs(backtest->result, backtest->dataset->store, out_dir,
                           backtest->manifest);
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

void momlab_backtest_free(momlab_backtest* backtest) { delete backtest; }

void momlab_grid_params_init(momlab_grid_params* params) {
  momlab_backtest_params_init(&params->base);
  params->lookback_min = 1;
  params->lookback_max = 12;
  params->holding_min = 1;
  params->holding_max = 12;
  params->heat_return_bound = 0.025;
  params->matrix_csv = 0;
}

momlab_status momlab_grid_run(const momlab_dataset* dataset, const momlab_grid_params* params,
                              momlab_grid** out) {
  if (!out) return set_error("out is null", MOMLAB_E_CONFIG);
  *out = nullptr;
  if (!dataset || !params) return set_error("null argument", MOMLAB_E_CONFIG);
  try {
    auto g = std::make_unique<momlab_grid>();
    g->grid = run_grid(to_grid_spec(dataset, *params), dataset->store, dataset->membership);
    g->report.heat_return_bound = params->heat_return_bound;
    g->report.matrix_csv = params->matrix_csv != 0;
    g->manifest = {{"command", "grid"},
                   {"version", momlab_version()},
                   {"params", grid_params_json(*params)},
                   {"inputs", dataset->manifest_inputs}};
    *out = g.release();
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

momlab_status momlab_grid_cell(const momlab_grid* grid, int lookback, int holding,
                               momlab_summary* out) {
  if (!grid || !out) return set_error("null argument", MOMLAB_E_CONFIG);
  const auto& g = grid->grid;
  if (lookback < g.j_min || lookback > g.j_max || holding < g.k_min || holding > g.k_max)
    return set_error("cell out of range", MOMLAB_E_CONFIG);
  const auto& cell = g.cell(lookback, holding);
  if (!cell.summary) return set_error(cell.error, MOMLAB_E_DATA);
  fill_summary(*cell.summary, out);
  return MOMLAB_OK;
}

momlab_status momlab_grid_write(const momlab_grid* grid, const char* out_dir) {
  if (!grid || !out_dir) return set_error("null argument", MOMLAB_E_CONFIG);
  try {
    write_grid_outputs(grid->grid, out_dir, grid->report, grid->manifest);
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

void momlab_grid_free(momlab_grid* grid) { delete grid; }

momlab_status momlab_compare_run(const momlab_dataset* dataset, const momlab_grid_params* params,
                                 const char* const* universes, int n_universes,
                                 momlab_compare** out) {
  if (!out) return set_error("out is null", MOMLAB_E_CONFIG);
  *out = nullptr;
  if (!dataset || !params || !universes)
    return set_error("null argument", MOMLAB_E_CONFIG);
  if (n_universes < 2)
    return set_error("comparison needs >= 2 universes (first is baseline)", MOMLAB_E_CONFIG);
  try {
    std::vector<UniverseExpr> exprs;
    exprs.reserve(size_t(n_universes));
    for (int i = 0; i < n_universes; ++i)
      exprs.push_back(parse_universe(universes[i] ? universes[i] : ""));
    auto c = std::make_unique<momlab_compare>();
    c->comparison = run_universe_comparison(to_grid_spec(dataset, *params), exprs,
                                            dataset->store, dataset->membership);
    c->report.heat_return_bound = params->heat_return_bound;
    c->report.matrix_csv = params->matrix_csv != 0;
    auto j = grid_params_json(*params);
    j.erase("universe");
    nlohmann::json names = nlohmann::json::array();
    for (const auto& e : exprs) names.push_back(e.label);
    j["universes"] = names;
    c->manifest = {{"command", "compare"},
                   {"version", momlab_version()},
                   {"params", j},
                   {"inputs", dataset->manifest_inputs}};
    *out = c.release();
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

momlab_status momlab_compare_write(const momlab_compare* compare, const char* out_dir) {
  if (!compare || !out_dir) return set_error("null argument", MOMLAB_E_CONFIG);
  try {
    write_compare_outputs(compare->comparison, out_dir, compare->report, compare->manifest);
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

void momlab_compare_free(momlab_compare* compare) { delete compare; }

void momlab_synth_params_init(momlab_synth_params* params) {
  const SynthParams d;
  params->n_instruments = d.n_instruments;
  params->n_years = d.n_years;
  params->seed = d.seed;
  params->momentum_strength = d.momentum_strength;
  params->carrier_lo = d.carrier_lo;
  params->carrier_hi = d.carrier_hi;
  params->carrier_drift = d.carrier_drift;
  params->drift_sigma = d.drift_sigma;
  params->vol_daily = d.vol_daily;
  params->cap_mu_log = d.cap_mu_log;
  params->cap_sigma_log = d.cap_sigma_log;
  params->flow_pred_individual = d.flow_pred_individual;
  params->flow_pred_institutional = d.flow_pred_institutional;
  params->flow_pred_foreign = d.flow_pred_foreign;
  params->flow_scale = d.flow_scale;
  params->rebalance_months = d.rebalance_months;
}

momlab_status momlab_synth_generate(const momlab_synth_params* params, const char* out_dir) {
  if (!params || !out_dir) return set_error("null argument", MOMLAB_E_CONFIG);
  try {
    SynthParams p;
    p.n_instruments = params->n_instruments;
    p.n_years = params->n_years;
    p.seed = params->seed;
    p.momentum_strength = params->momentum_strength;
    p.carrier_lo = params->carrier_lo;
    p.carrier_hi = params->carrier_hi;
    p.carrier_drift = params->carrier_drift;
    p.drift_sigma = params->drift_sigma;
    p.vol_daily = params->vol_daily;
    p.cap_mu_log = params->cap_mu_log;
    p.cap_sigma_log = params->cap_sigma_log;
    p.flow_pred_individual = params->flow_pred_individual;
    p.flow_pred_institutional = params->flow_pred_institutional;
    p.flow_pred_foreign = params->flow_pred_foreign;
    p.flow_scale = params->flow_scale;
    p.rebalance_months = params->rebalance_months;
    generate_market(p).write(out_dir);
    return MOMLAB_OK;
  } catch (...) {
    return from_exception();
  }
}

}  // extern "C"
