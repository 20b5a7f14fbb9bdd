// momlab — backtests of ranked long-short portfolios over index subuniverses.
//
// Thin shell over the momlab C API: flags in, files out. No statistic is
// computed here.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "momlab/momlab.h"

namespace {

int fail(momlab_status status) {
  std::fprintf(stderr, "momlab: error: %s\n", momlab_last_error());
  return int(status);
}

struct DatasetArgs {
  std::string prices;
  std::string membership;
  std::string flows;
  std::string frequency = "monthly";
  int staleness_days = 10;
  double eligibility = 0.9;

  void attach(CLI::App* cmd) {
    cmd->add_option("--prices", prices, "prices.csv path")->required();
    cmd->add_option("--membership", membership, "membership.csv path")->required();
    cmd->add_option("--flows", flows, "flows.csv path (required for flow criteria)");
    cmd->add_option("--frequency", frequency, "monthly|weekly")
        ->check(CLI::IsMember({"monthly", "weekly"}));
    cmd->add_option("--staleness-days", staleness_days, "forward-fill limit, trading days");
    cmd->add_option("--eligibility", eligibility, "min priced-day fraction in lookback");
  }

  momlab_status open(momlab_dataset** out) const {
    momlab_dataset_opts opts;
    momlab_dataset_opts_init(&opts);
    opts.frequency = frequency.c_str();
    opts.staleness_days = staleness_days;
    opts.eligibility_threshold = eligibility;
    const momlab_status rc = momlab_dataset_open(
        prices.c_str(), membership.c_str(), flows.empty() ? nullptr : flows.c_str(), &opts, out);
    if (rc == MOMLAB_OK) {
      const char* warnings = momlab_dataset_warnings(*out);
      if (warnings[0] != '\0') std::fprintf(stderr, "momlab: warning:\n%s", warnings);
    }
    return rc;
  }
};

struct StrategyArgs {
  std::string universe = "200";
  std::string criterion = "momentum";
  std::string lookback = "6";
  std::string holding = "6";
  int groups = 10;
  double cost_bps = 35.0;
  std::string overlap = "sequential";
  int threads = 0;

  void attach(CLI::App* cmd, bool with_universe = true) {
    if (with_universe)
      cmd->add_option("--universe", universe,
                      "universe expression, e.g. 200, 100-50, 200-100+50");
    cmd->add_option("--criterion", criterion,
                    "momentum|size|liquidity|flow:individual|flow:institutional|flow:foreign");
    cmd->add_option("--lookback", lookback, "J or range A..B");
    cmd->add_option("--holding", holding, "K or range A..B");
    cmd->add_option("--groups", groups, "ranked group count G");
    cmd->add_option("--cost-bps", cost_bps, "transaction cost per basket, basis points");
    cmd->add_option("--overlap", overlap, "sequential|composite")
        ->check(CLI::IsMember({"sequential", "composite"}));
    cmd->add_option("--threads", threads, "worker threads (0 = auto; MOMLAB_THREADS caps)");
  }

  void fill(momlab_backtest_params* p) const {
    p->universe = universe.c_str();
    p->criterion = criterion.c_str();
    p->groups = groups;
    p->cost_per_basket = cost_bps / 10000.0;
    p->overlap = overlap.c_str();
    p->threads = threads;
  }
};

// "6" -> [6,6]; "1..12" -> [1,12].
bool parse_range(const std::string& text, int* lo, int* hi) {
  const size_t dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      *lo = *hi = std::stoi(text);
    } else {
      *lo = std::stoi(text.substr(0, dots));
      *hi = std::stoi(text.substr(dots + 2));
    }
  } catch (...) {
    return false;
  }
  return *lo >= 1 && *hi >= *lo;
}

int bad_range(const std::string& what, const std::string& text) {
  std::fprintf(stderr, "momlab: error: bad %s range '%s' (want N or A..B)\n", what.c_str(),
               text.c_str());
  return int(MOMLAB_E_CONFIG);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"momentum-universe backtesting lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", momlab_version());

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic market (three CSVs)");
  momlab_synth_params sp;
  momlab_synth_params_init(&sp);
  std::string synth_out;
  std::string carrier = "all";
  unsigned long long seed = sp.seed;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--instruments", sp.n_instruments, "instrument count");
  synth->add_option("--years", sp.n_years, "calendar years");
  synth->add_option("--momentum-strength", sp.momentum_strength, "drift persistence phi [-1,1]");
  synth->add_option("--carrier", carrier, "momentum carrier: all or cap rank range LO..HI");
  synth->add_option("--carrier-drift", sp.carrier_drift, "mean monthly drift of carrier names");
  synth->add_option("--drift-sigma", sp.drift_sigma, "stationary sd of monthly drift");
  synth->add_option("--vol-daily", sp.vol_daily, "idiosyncratic daily volatility");
  synth->add_option("--cap-mu-log", sp.cap_mu_log, "log-normal cap location");
  synth->add_option("--cap-sigma-log", sp.cap_sigma_log, "log-normal cap scale");
  synth->add_option("--flow-pred-individual", sp.flow_pred_individual,
                    "individual flow predictiveness [-1,1]");
  synth->add_option("--flow-pred-institutional", sp.flow_pred_institutional,
                    "institutional flow predictiveness [-1,1]");
  synth->add_option("--flow-pred-foreign", sp.flow_pred_foreign,
                    "foreign flow predictiveness [-1,1]");
  synth->add_option("--flow-scale", sp.flow_scale, "daily net flow scale, fraction of shares");
  synth->add_option("--rebalance-months", sp.rebalance_months, "index re-ranking cadence");

  // --- backtest --------------------------------------------------------------
  auto* backtest = app.add_subcommand("backtest", "run one (J,K) backtest");
  DatasetArgs bt_data;
  StrategyArgs bt_strat;
  std::string bt_out;
  bt_data.attach(backtest);
  bt_strat.attach(backtest);
  backtest->add_option("--out", bt_out, "output directory")->required();

  // --- grid ------------------------------------------------------------------
  auto* grid = app.add_subcommand("grid", "sweep the (J,K) grid");
  DatasetArgs gr_data;
  StrategyArgs gr_strat;
  gr_strat.lookback = "1..12";
  gr_strat.holding = "1..12";
  std::string gr_out;
  double heat_bound = 0.025;
  bool matrix = false;
  gr_data.attach(grid);
  gr_strat.attach(grid);
  grid->add_option("--out", gr_out, "output directory")->required();
  grid->add_option("--heat-return-bound", heat_bound, "return heatmap color bound");
  grid->add_flag("--matrix", matrix, "also emit matrix-orientation CSVs");

  // --- compare -----------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "compare universes against a baseline");
  DatasetArgs cp_data;
  StrategyArgs cp_strat;
  cp_strat.lookback = "1..12";
  cp_strat.holding = "1..12";
  std::string cp_out;
  std::string baseline = "200";
  std::vector<std::string> cp_universes;
  double cp_heat_bound = 0.025;
  bool cp_matrix = false;
  cp_data.attach(compare);
  cp_strat.attach(compare, /*with_universe=*/false);
  compare->add_option("--universe", cp_universes, "universe expression (repeatable)")
      ->required();
  compare->add_option("--baseline", baseline, "baseline universe expression");
  compare->add_option("--out", cp_out, "output directory")->required();
  compare->add_option("--heat-return-bound", cp_heat_bound, "return heatmap color bound");
  compare->add_flag("--matrix", cp_matrix, "also emit matrix-orientation CSVs");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    sp.seed = seed;
    if (carrier == "all") {
      sp.carrier_lo = sp.carrier_hi = 0;
    } else if (!parse_range(carrier, &sp.carrier_lo, &sp.carrier_hi)) {
      return bad_range("carrier", carrier);
    }
    const momlab_status rc = momlab_synth_generate(&sp, synth_out.c_str());
    return rc == MOMLAB_OK ? 0 : fail(rc);
  }

  if (backtest->parsed()) {
    momlab_backtest_params p;
    momlab_backtest_params_init(&p);
    bt_strat.fill(&p);
    int lo = 0, hi = 0;
    if (!parse_range(bt_strat.lookback, &lo, &hi) || lo != hi)
      return bad_range("lookback (single value for backtest)", bt_strat.lookback);
    p.lookback = lo;
    if (!parse_range(bt_strat.holding, &lo, &hi) || lo != hi)
      return bad_range("holding (single value for backtest)", bt_strat.holding);
    p.holding = lo;

    momlab_dataset* ds = nullptr;
    momlab_status rc = bt_data.open(&ds);
    if (rc != MOMLAB_OK) return fail(rc);
    momlab_backtest* bt = nullptr;
    rc = momlab_backtest_run(ds, &p, &bt);
    if (rc == MOMLAB_OK) {
      const char* warnings = momlab_backtest_warnings(bt);
      if (warnings[0] != '\0') std::fprintf(stderr, "momlab: warning:\n%s", warnings);
      rc = momlab_backtest_write(bt, bt_out.c_str());
    }
    momlab_backtest_free(bt);
    momlab_dataset_close(ds);
    return rc == MOMLAB_OK ? 0 : fail(rc);
  }

  if (grid->parsed()) {
    momlab_grid_params p;
    momlab_grid_params_init(&p);
    gr_strat.fill(&p.base);
    if (!parse_range(gr_strat.lookback, &p.lookback_min, &p.lookback_max))
      return bad_range("lookback", gr_strat.lookback);
    if (!parse_range(gr_strat.holding, &p.holding_min, &p.holding_max))
      return bad_range("holding", gr_strat.holding);
    p.heat_return_bound = heat_bound;
    p.matrix_csv = matrix;

    momlab_dataset* ds = nullptr;
    momlab_status rc = gr_data.open(&ds);
    if (rc != MOMLAB_OK) return fail(rc);
    momlab_grid* g = nullptr;
    rc = momlab_grid_run(ds, &p, &g);
    if (rc == MOMLAB_OK) rc = momlab_grid_write(g, gr_out.c_str());
    momlab_grid_free(g);
    momlab_dataset_close(ds);
    return rc == MOMLAB_OK ? 0 : fail(rc);
  }

  // compare
  {
    momlab_grid_params p;
    momlab_grid_params_init(&p);
    cp_strat.fill(&p.base);
    if (!parse_range(cp_strat.lookback, &p.lookback_min, &p.lookback_max))
      return bad_range("lookback", cp_strat.lookback);
    if (!parse_range(cp_strat.holding, &p.holding_min, &p.holding_max))
      return bad_range("holding", cp_strat.holding);
    p.heat_return_bound = cp_heat_bound;
    p.matrix_csv = cp_matrix;

    std::vector<const char*> names;
    names.push_back(baseline.c_str());
    for (const auto& u : cp_universes)
      if (u != baseline) names.push_back(u.c_str());

    momlab_dataset* ds = nullptr;
    momlab_status rc = cp_data.open(&ds);
    if (rc != MOMLAB_OK) return fail(rc);
    momlab_compare* c = nullptr;
    rc = momlab_compare_run(ds, &p, names.data(), int(names.size()), &c);
    if (rc == MOMLAB_OK) rc = momlab_compare_write(c, cp_out.c_str());
    momlab_compare_free(c);
    momlab_dataset_close(ds);
    return rc == MOMLAB_OK ? 0 : fail(rc);
  }
}
