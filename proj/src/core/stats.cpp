#include "core/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "core/errors.hpp"

namespace momlab {

double student_t_quantile_975(int dof) {
  const boost::math::students_t dist{double(dof)};
  return boost::math::quantile(dist, 0.975);
}

double newey_west_t(std::span<const double> series, int lag) {
  const int n = int(series.size());
  if (n < 2) throw Error(ErrorCode::SeriesTooShort, "need >= 2 observations");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= double(n);

  auto gamma = [&](int l) {
    double s = 0.0;
    for (int i = 0; i + l < n; ++i) s += (series[size_t(i)] - mean) * (series[size_t(i + l)] - mean);
    return s / double(n);
  };

  double lrv = gamma(0);
  const int max_lag = std::min(lag, n - 1);
  for (int l = 1; l <= max_lag; ++l)
    lrv += 2.0 * (1.0 - double(l) / double(max_lag + 1)) * gamma(l);
  if (lrv <= 0.0) return 0.0;
  return mean / std::sqrt(lrv / double(n));
}

BacktestSummary summarize(std::span<const double> series, double c_eff, int nw_lag) {
  const int n = int(series.size());
  if (n < 2)
    throw Error(ErrorCode::SeriesTooShort,
                "need >= 2 per-period observations, got " + std::to_string(n));

  BacktestSummary s;
  s.n_periods = n;

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= double(n);
  double ss = 0.0;
  for (double x : series) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / double(n - 1));

  s.mean_raw = mean;
  s.volatility = sd;
  if (mean > 0.0) {
    s.profitability = 1.0;
  } else if (mean < 0.0) {
    s.profitability = -1.0;
  } else {
    s.profitability = 1.0;  // PF undefined at r = 0; +1 by convention, flagged
    s.zero_mean = true;
  }
  s.implemented_return = std::abs(mean) - c_eff;

  if (sd > 0.0) {
    s.sharpe = s.implemented_return / sd;
    s.t_stat = mean / (sd / std::sqrt(double(n)));
    s.reject_at_95 = std::abs(s.t_stat) > student_t_quantile_975(n - 1);
    if (nw_lag > 0) s.t_stat_nw = newey_west_t(series, nw_lag);
  } else {
    s.zero_volatility = true;
    s.reject_at_95 = mean != 0.0;  // a constant nonzero mean rejects by convention
  }
  return s;
}

TTestResult t_test_zero_mean(std::span<const double> series) {
  const auto s = summarize(series, 0.0);
  return {s.t_stat, s.reject_at_95, s.zero_volatility};
}

RelativeGrid relative_grid(const GridResult& sub, const GridResult& base, GridMetric metric) {
  if (sub.j_min != base.j_min || sub.j_max != base.j_max || sub.k_min != base.k_min ||
      sub.k_max != base.k_max)
    throw Error(ErrorCode::ShapeMismatch, "grids cover different (J,K) ranges");

  RelativeGrid out;
  out.j_min = sub.j_min;
  out.j_max = sub.j_max;
  out.k_min = sub.k_min;
  out.k_max = sub.k_max;
  out.sub_label = sub.universe_label;
  out.base_label = base.universe_label;
  out.metric = metric;
  out.values.resize(size_t(sub.n_j()) * size_t(sub.n_k()));

  for (int j = sub.j_min; j <= sub.j_max; ++j) {
    for (int k = sub.k_min; k <= sub.k_max; ++k) {
      const auto& cs = sub.cell(j, k);
      const auto& cb = base.cell(j, k);
      auto& slot = out.values[size_t(j - sub.j_min) * size_t(sub.n_k()) + size_t(k - sub.k_min)];
      if (!cs.summary || !cb.summary) continue;  // missing propagates
      if (metric == GridMetric::sharpe &&
          (cs.summary->zero_volatility || cb.summary->zero_volatility))
        continue;
      const double vs = metric == GridMetric::implemented_return
                            ? cs.summary->implemented_return
                            : cs.summary->sharpe;
      const double vb = metric == GridMetric::implemented_return
                            ? cb.summary->implemented_return
                            : cb.summary->sharpe;
      slot = vs - vb;
    }
  }
  return out;
}

}  // namespace momlab
