#include "core/engine.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "core/errors.hpp"

namespace momlab {

OverlapMode parse_overlap(std::string_view name) {
  if (name == "sequential") return OverlapMode::sequential;
  if (name == "composite") return OverlapMode::composite;
  throw Error(ErrorCode::InvalidParams, "unknown overlap mode '" + std::string(name) + "'");
}

const char* overlap_name(OverlapMode mode) {
  return mode == OverlapMode::sequential ? "sequential" : "composite";
}

void validate_spec(const BacktestSpec& spec) {
  if (spec.lookback < 1) throw Error(ErrorCode::InvalidParams, "lookback must be >= 1");
  if (spec.holding < 1) throw Error(ErrorCode::InvalidParams, "holding must be >= 1");
  if (spec.group_count < 2) throw Error(ErrorCode::InvalidParams, "groups must be >= 2");
  if (spec.cost_per_basket < 0.0)
    throw Error(ErrorCode::InvalidParams, "cost_per_basket must be >= 0");
  if (spec.universe.root < 0)
    throw Error(ErrorCode::InvalidParams, "universe expression is empty");
}

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : int(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("MOMLAB_THREADS")) {
    int cap = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc{} && ptr == s.data() + s.size() && cap >= 1) n = std::min(n, cap);
  }
  return n;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min(threads, count);
  pool.reserve(size_t(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct FormationOutcome {
  bool formed = false;
  LongShortPortfolio portfolio;
  std::string skip_reason;
};

// One formation attempt: scores -> deciles -> dollar-neutral book. Formations
// with too few eligible names are skipped, not fatal.
FormationOutcome form_portfolio(const BacktestSpec& spec, const PriceStore& store,
                                const MembershipCalendar& membership,
                                const std::vector<int>& marks, int p) {
  FormationOutcome out;
  ScoreVector scores;
  try {
    scores = build_scores(store, membership, spec.universe, spec.criterion, marks, p,
                          spec.lookback);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyUniverse) {
      out.skip_reason = e.what();
      return out;
    }
    throw;
  }
  if (int(scores.entries.size()) < spec.group_count) {
    out.skip_reason = "formation " +
                      format_date(store.calendar().dates[size_t(scores.formation_ord)]) +
                      ": " + std::to_string(scores.entries.size()) +
                      " eligible names for " + std::to_string(spec.group_count) + " groups";
    return out;
  }
  out.portfolio = build_long_short(rank_and_group(scores, spec.group_count));
  out.formed = true;
  return out;
}

}  // namespace

BacktestResult run_backtest(const BacktestSpec& spec, const PriceStore& store,
                            const MembershipCalendar& membership) {
  validate_spec(spec);
  const auto& marks = store.calendar().marks(spec.frequency);
  const int n_marks = int(marks.size());
  const int J = spec.lookback;
  const int K = spec.holding;
  if (n_marks < J + K + 1)
    throw Error(ErrorCode::InsufficientHistory,
                std::to_string(n_marks) + " period marks, need at least " +
                    std::to_string(J + K + 1));

  BacktestResult result;
  result.spec = spec;
  int candidates = 0;

  if (spec.overlap == OverlapMode::sequential) {
    for (int p = J; p + K <= n_marks - 1; p += K) {
      ++candidates;
      auto outcome = form_portfolio(spec, store, membership, marks, p);
      if (!outcome.formed) {
        result.warnings.push_back("skipped: " + outcome.skip_reason);
        continue;
      }
      CohortRecord cohort;
      cohort.formation_ord = marks[size_t(p)];
      cohort.liquidation_ord = marks[size_t(p + K)];
      cohort.raw_return_total =
          portfolio_return(outcome.portfolio, store, cohort.formation_ord,
                           cohort.liquidation_ord);
      cohort.portfolio = std::move(outcome.portfolio);
      // One observation per cohort at per-period scale.
      result.series_ords.push_back(cohort.liquidation_ord);
      result.series_raw.push_back(cohort.raw_return_total / double(K));
      result.cohorts.push_back(std::move(cohort));
    }
  } else {
    // Overlapping construction: cohorts at every mark, complete cohorts only.
    const int first_form = J;
    const int last_form = n_marks - 1 - K;
    std::vector<int> formed_at;                      // formation mark index
    std::vector<std::vector<double>> period_returns; // [cohort][period 0..K-1]
    for (int p = first_form; p <= last_form; ++p) {
      ++candidates;
      auto outcome = form_portfolio(spec, store, membership, marks, p);
      if (!outcome.formed) {
        result.warnings.push_back("skipped: " + outcome.skip_reason);
        continue;
      }
      CohortRecord cohort;
      cohort.formation_ord = marks[size_t(p)];
      cohort.liquidation_ord = marks[size_t(p + K)];
      cohort.raw_return_total =
          portfolio_return(outcome.portfolio, store, cohort.formation_ord,
                           cohort.liquidation_ord);
      std::vector<double> per_period(size_t(K), 0.0);
      for (int t = 0; t < K; ++t)
        per_period[size_t(t)] = portfolio_return(outcome.portfolio, store,
                                                 marks[size_t(p + t)], marks[size_t(p + t + 1)]);
      cohort.portfolio = std::move(outcome.portfolio);
      formed_at.push_back(p);
      period_returns.push_back(std::move(per_period));
      result.cohorts.push_back(std::move(cohort));
    }
    // Month t averages the K cohorts formed at t-K .. t-1; emitted only for
    // months where all K contributing cohorts are complete.
    for (int t = J + K; t - 1 <= last_form; ++t) {
      double sum = 0.0;
      int active = 0;
      for (size_t c = 0; c < formed_at.size(); ++c) {
        const int p = formed_at[c];
        if (p >= t - K && p <= t - 1) {
          sum += period_returns[c][size_t(t - 1 - p)];
          ++active;
        }
      }
      if (active == 0) continue;
      result.series_ords.push_back(marks[size_t(t)]);
      result.series_raw.push_back(sum / double(active));
    }
  }

  if (result.cohorts.empty())
    throw Error(ErrorCode::EmptyUniverse,
                "universe '" + spec.universe.label + "' produced no portfolio at any of " +
                    std::to_string(candidates) + " candidate formations");

  const int nw_lag = spec.overlap == OverlapMode::composite ? K - 1 : 0;
  result.summary = summarize(result.series_raw, amortized_cost(spec.cost_per_basket, K), nw_lag);
  return result;
}

GridResult run_grid(const GridSpec& spec, const PriceStore& store,
                    const MembershipCalendar& membership) {
  if (spec.j_min < 1 || spec.j_max < spec.j_min || spec.k_min < 1 || spec.k_max < spec.k_min)
    throw Error(ErrorCode::InvalidParams, "bad (J,K) ranges");

  GridResult grid;
  grid.j_min = spec.j_min;
  grid.j_max = spec.j_max;
  grid.k_min = spec.k_min;
  grid.k_max = spec.k_max;
  grid.universe_label = spec.base.universe.label;
  grid.criterion_name = criterion_name(spec.base.criterion);
  grid.cells.resize(size_t(grid.n_j()) * size_t(grid.n_k()));

  const int n_cells = int(grid.cells.size());
  parallel_for(n_cells, resolve_threads(spec.threads), [&](int idx) {
    const int j = spec.j_min + idx / grid.n_k();
    const int k = spec.k_min + idx % grid.n_k();
    GridCell& cell = grid.cells[size_t(idx)];
    cell.lookback = j;
    cell.holding = k;
    BacktestSpec cell_spec = spec.base;
    cell_spec.lookback = j;
    cell_spec.holding = k;
    try {
      cell.summary = run_backtest(cell_spec, store, membership).summary;
    } catch (const Error& e) {
      cell.error = e.what();
    }
  });
  return grid;
}

ComparisonResult run_universe_comparison(const GridSpec& spec,
                                         const std::vector<UniverseExpr>& universes,
                                         const PriceStore& store,
                                         const MembershipCalendar& membership) {
  if (universes.size() < 2)
    throw Error(ErrorCode::InvalidParams, "comparison needs >= 2 universes (first is baseline)");

  ComparisonResult out;
  for (const auto& u : universes) {
    GridSpec g = spec;
    g.base.universe = u;
    out.labels.push_back(u.label);
    out.grids.push_back(run_grid(g, store, membership));
  }
  for (size_t i = 1; i < out.grids.size(); ++i) {
    out.rel_return.push_back(
        relative_grid(out.grids[i], out.grids[0], GridMetric::implemented_return));
    out.rel_sharpe.push_back(relative_grid(out.grids[i], out.grids[0], GridMetric::sharpe));
  }
  return out;
}

std::vector<double> run_group_profile(const BacktestSpec& spec, const PriceStore& store,
                                      const MembershipCalendar& membership) {
  validate_spec(spec);
  const auto& marks = store.calendar().marks(spec.frequency);
  const int n_marks = int(marks.size());
  const int J = spec.lookback;
  const int K = spec.holding;
  if (n_marks < J + K + 1)
    throw Error(ErrorCode::InsufficientHistory, "not enough period marks");

  std::vector<double> sums(size_t(spec.group_count), 0.0);
  int formations = 0;
  for (int p = J; p + K <= n_marks - 1; p += K) {
    ScoreVector scores;
    try {
      scores = build_scores(store, membership, spec.universe, spec.criterion, marks, p,
                            spec.lookback);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmptyUniverse) continue;
      throw;
    }
    if (int(scores.entries.size()) < spec.group_count) continue;
    const auto groups = rank_and_group(scores, spec.group_count);
    const int t0 = marks[size_t(p)];
    const int t1 = marks[size_t(p + K)];
    for (int g = 0; g < spec.group_count; ++g) {
      double acc = 0.0;
      for (int inst : groups.groups[size_t(g)])
        acc += constituent_return(store, inst, t0, t1, true);
      sums[size_t(g)] += acc / double(groups.groups[size_t(g)].size()) / double(K);
    }
    ++formations;
  }
  if (formations == 0)
    throw Error(ErrorCode::EmptyUniverse, "no usable formation for group profile");
  for (auto& s : sums) s /= double(formations);
  return sums;
}

}  // namespace momlab
