// stats.hpp — per-period summary statistics and grid containers.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace momlab {

/// Summary of a per-period raw-return series. mean_raw and volatility are in
/// per-period units; implemented_return = |mean_raw| - c_eff where c_eff is
/// the amortized per-period transaction cost; sharpe = implemented_return /
/// volatility.
struct BacktestSummary {
  double mean_raw = 0.0;
  double volatility = 0.0;            // sample (n-1) standard deviation
  double profitability = 1.0;         // sign of mean_raw, +1 or -1
  double implemented_return = 0.0;
  double sharpe = 0.0;                // meaningless when zero_volatility
  double t_stat = 0.0;                // plain one-sample t, meaningless when zero_volatility
  std::optional<double> t_stat_nw;    // Newey-West corrected (overlapping cohorts)
  int n_periods = 0;
  bool zero_volatility = false;
  bool zero_mean = false;             // mean_raw was exactly 0; PF=+1 by convention
  bool reject_at_95 = false;
};

/// Mean, sample sd, PF, implemented return, Sharpe and t against a zero-mean
/// null. nw_lag > 0 additionally computes a Newey-West t with that Bartlett
/// lag. Throws SeriesTooShort for n < 2.
BacktestSummary summarize(std::span<const double> series, double c_eff, int nw_lag = 0);

struct TTestResult {
  double t_stat = 0.0;
  bool reject_at_95 = false;
  bool zero_volatility = false;
};

/// Two-sided one-sample t-test of zero mean at 95%. A zero-volatility series
/// is flagged; it rejects by convention unless the mean is exactly zero.
TTestResult t_test_zero_mean(std::span<const double> series);

/// 97.5% Student-t quantile with `dof` degrees of freedom.
double student_t_quantile_975(int dof);

/// Newey-West t statistic with Bartlett weights up to `lag`.
double newey_west_t(std::span<const double> series, int lag);

/// One (J,K) cell of a sweep; failed cells carry the error text instead.
struct GridCell {
  int lookback = 0;
  int holding = 0;
  std::optional<BacktestSummary> summary;
  std::string error;
};

struct GridResult {
  int j_min = 0, j_max = 0, k_min = 0, k_max = 0;
  std::string universe_label;
  std::string criterion_name;
  std::vector<GridCell> cells;  // row-major, J outer, K inner

  int n_j() const { return j_max - j_min + 1; }
  int n_k() const { return k_max - k_min + 1; }
  const GridCell& cell(int j, int k) const {
    return cells[size_t(j - j_min) * size_t(n_k()) + size_t(k - k_min)];
  }
  GridCell& cell(int j, int k) {
    return cells[size_t(j - j_min) * size_t(n_k()) + size_t(k - k_min)];
  }
};

enum class GridMetric { implemented_return, sharpe };

/// Cellwise metric difference sub - base; cells missing on either side stay
/// missing. Throws ShapeMismatch when the (J,K) ranges differ.
struct RelativeGrid {
  int j_min = 0, j_max = 0, k_min = 0, k_max = 0;
  std::string sub_label, base_label;
  GridMetric metric = GridMetric::implemented_return;
  std::vector<std::optional<double>> values;  // row-major, J outer

  std::optional<double> at(int j, int k) const {
    return values[size_t(j - j_min) * size_t(k_max - k_min + 1) + size_t(k - k_min)];
  }
};

RelativeGrid relative_grid(const GridResult& sub, const GridResult& base, GridMetric metric);

}  // namespace momlab
