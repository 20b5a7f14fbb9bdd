/* momlab.h — C API for the momlab backtesting engine.
 *
 * All entry points return momlab_status; non-zero means failure and
 * momlab_last_error() holds a thread-local message describing it. Objects
 * are opaque handles created by the _open and _run calls and released by the
 * matching _close and _free calls; handles are immutable after creation and
 * safe to read from multiple threads.
 */
#ifndef MOMLAB_H
#define MOMLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MOMLAB_API __declspec(dllexport)
#else
#define MOMLAB_API __attribute__((visibility("default")))
#endif

/* Status values double as process exit codes in the CLI. */
typedef enum momlab_status {
  MOMLAB_OK = 0,
  MOMLAB_E_DATA = 2,     /* malformed/missing/inconsistent input data */
  MOMLAB_E_CONFIG = 3,   /* invalid parameters or expressions */
  MOMLAB_E_INTERNAL = 4, /* should not happen */
} momlab_status;

MOMLAB_API const char* momlab_version(void);

/* Message for the most recent failure on this thread. */
MOMLAB_API const char* momlab_last_error(void);

/* ----- dataset -------------------------------------------------------- */

typedef struct momlab_dataset momlab_dataset;

typedef struct momlab_dataset_opts {
  const char* frequency;        /* "monthly" (default) or "weekly" */
  int staleness_days;           /* forward-fill limit, trading days (10) */
  double eligibility_threshold; /* min priced-day fraction in lookback (0.9) */
} momlab_dataset_opts;

MOMLAB_API void momlab_dataset_opts_init(momlab_dataset_opts* opts);

/* flows_csv may be NULL; flow criteria then fail with MOMLAB_E_DATA. */
MOMLAB_API momlab_status momlab_dataset_open(const char* prices_csv,
                                             const char* membership_csv,
                                             const char* flows_csv,
                                             const momlab_dataset_opts* opts,
                                             momlab_dataset** out);
MOMLAB_API void momlab_dataset_close(momlab_dataset* dataset);

MOMLAB_API int momlab_dataset_instruments(const momlab_dataset* dataset);
MOMLAB_API int momlab_dataset_periods(const momlab_dataset* dataset);

/* Membership nesting warnings (F ⊆ H ⊆ T violations), one per line; empty
 * string when clean. */
MOMLAB_API const char* momlab_dataset_warnings(const momlab_dataset* dataset);

/* ----- single backtest ------------------------------------------------- */

typedef struct momlab_backtest_params {
  const char* universe;  /* e.g. "200", "200-100+50" */
  const char* criterion; /* momentum | size | liquidity | flow:individual |
                            flow:institutional | flow:foreign */
  int lookback;          /* J, periods */
  int holding;           /* K, periods */
  int groups;            /* ranked group count G (default 10) */
  double cost_per_basket; /* fraction per winner/loser basket (0.0035) */
  const char* overlap;   /* "sequential" (default) or "composite" */
  int threads;           /* grid parallelism; <=0 = auto */
} momlab_backtest_params;

MOMLAB_API void momlab_backtest_params_init(momlab_backtest_params* params);

typedef struct momlab_summary {
  double mean_raw;
  double volatility;
  double profitability; /* +1 or -1 */
  double implemented_return;
  double sharpe; /* undefined when zero_volatility */
  double t_stat; /* undefined when zero_volatility */
  double t_stat_nw;
  int has_t_stat_nw;
  int n_periods;
  int zero_volatility;
  int zero_mean;
  int reject_at_95;
} momlab_summary;

typedef struct momlab_backtest momlab_backtest;

MOMLAB_API momlab_status momlab_backtest_run(const momlab_dataset* dataset,
                                             const momlab_backtest_params* params,
                                             momlab_backtest** out);
MOMLAB_API momlab_status momlab_backtest_summary(const momlab_backtest* backtest,
                                                 momlab_summary* out);
/* Skipped-formation warnings, one per line; empty string when clean. */
MOMLAB_API const char* momlab_backtest_warnings(const momlab_backtest* backtest);
MOMLAB_API int momlab_backtest_series_len(const momlab_backtest* backtest);
/* Copies up to cap per-period raw returns; returns the count copied. */
MOMLAB_API int momlab_backtest_series(const momlab_backtest* backtest, double* values, int cap);
/* Writes summary.csv, series.csv and manifest.json into out_dir. */
MOMLAB_API momlab_status momlab_backtest_write(const momlab_backtest* backtest,
                                               const char* out_dir);
MOMLAB_API void momlab_backtest_free(momlab_backtest* backtest);

/* ----- (J,K) grid sweep ------------------------------------------------ */

typedef struct momlab_grid_params {
  momlab_backtest_params base; /* lookback/holding fields are ignored */
  int lookback_min, lookback_max;
  int holding_min, holding_max;
  double heat_return_bound; /* return heatmap color bound (0.025) */
  int matrix_csv;           /* also emit matrix-orientation CSVs */
} momlab_grid_params;

MOMLAB_API void momlab_grid_params_init(momlab_grid_params* params);

typedef struct momlab_grid momlab_grid;

MOMLAB_API momlab_status momlab_grid_run(const momlab_dataset* dataset,
                                         const momlab_grid_params* params, momlab_grid** out);
/* MOMLAB_E_DATA when that cell failed; the cell's error text goes to
 * momlab_last_error(). */
MOMLAB_API momlab_status momlab_grid_cell(const momlab_grid* grid, int lookback, int holding,
                                          momlab_summary* out);
/* Writes grid.csv, grid_errors.csv, four SVG heatmaps and manifest.json. */
MOMLAB_API momlab_status momlab_grid_write(const momlab_grid* grid, const char* out_dir);
MOMLAB_API void momlab_grid_free(momlab_grid* grid);

/* ----- universe comparison --------------------------------------------- */

typedef struct momlab_compare momlab_compare;

/* universes[0] is the baseline; n_universes >= 2. */
MOMLAB_API momlab_status momlab_compare_run(const momlab_dataset* dataset,
                                            const momlab_grid_params* params,
                                            const char* const* universes, int n_universes,
                                            momlab_compare** out);
MOMLAB_API momlab_status momlab_compare_write(const momlab_compare* compare,
                                              const char* out_dir);
MOMLAB_API void momlab_compare_free(momlab_compare* compare);

/* ----- synthetic market generator --------------------------------------- */

typedef struct momlab_synth_params {
  int n_instruments;
  int n_years;
  unsigned long long seed;
  double momentum_strength; /* phi in [-1,1] */
  int carrier_lo, carrier_hi; /* cap ranks from largest; 0,0 = all */
  double carrier_drift;
  double drift_sigma;
  double vol_daily;
  double cap_mu_log, cap_sigma_log;
  double flow_pred_individual, flow_pred_institutional, flow_pred_foreign;
  double flow_scale;
  int rebalance_months;
} momlab_synth_params;

MOMLAB_API void momlab_synth_params_init(momlab_synth_params* params);

/* Writes prices.csv, flows.csv, membership.csv and synth_manifest.json.
 * Byte-identical output for identical params. */
MOMLAB_API momlab_status momlab_synth_generate(const momlab_synth_params* params,
                                               const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MOMLAB_H */
