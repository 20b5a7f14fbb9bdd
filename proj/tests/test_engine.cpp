#include "doctest.h"

#include <cstdlib>

#include "core/engine.hpp"
#include "core/errors.hpp"
#include "core/synth.hpp"
#include "tests/test_support.hpp"

using namespace momlab;
using namespace momlab::testing;

namespace {

// Four instruments over `months` month-end marks with perfectly persistent
// monthly returns: A,B compound at +10%, C,D at -10%.
struct PersistentMarket {
  PriceStore store;
  MembershipCalendar membership;

  explicit PersistentMarket(int months) {
    const char* codes[] = {"A", "B", "C", "D"};
    const double rates[] = {0.10, 0.10, -0.10, -0.10};
    std::vector<PriceRow> rows;
    double px[4] = {100.0, 100.0, 100.0, 100.0};
    for (int m = 0; m < months; ++m) {
      char buf[11];
      std::snprintf(buf, sizeof(buf), "20%02d-%02d-28", 10 + m / 12, 1 + m % 12);
      for (int i = 0; i < 4; ++i) {
        rows.push_back(bar(buf, codes[i], px[i]));
        px[i] *= 1.0 + rates[i];
      }
    }
    store = build_price_store(rows);
    membership = build_membership(all_in_t({"A", "B", "C", "D"}, "2000-01-01", "2030-12-31"),
                                  store);
  }
};

BacktestSpec persistent_spec() {
  BacktestSpec spec;
  spec.universe = parse_universe("200");
  spec.criterion = parse_criterion("momentum");
  spec.lookback = 1;
  spec.holding = 1;
  spec.group_count = 2;
  spec.cost_per_basket = 0.0035;
  return spec;
}

}  // namespace

TEST_CASE("run_backtest: persistent four-name market earns 0.20 per cohort") {
  PersistentMarket market(4);
  const auto result = run_backtest(persistent_spec(), market.store, market.membership);
  REQUIRE(result.cohorts.size() == 2);  // formations at marks 1 and 2
  for (const auto& c : result.cohorts)
    CHECK(c.raw_return_total == doctest::Approx(0.20).epsilon(1e-12));
  for (double r : result.series_raw) CHECK(r == doctest::Approx(0.20).epsilon(1e-12));
  CHECK(result.summary.profitability == 1.0);
  CHECK(result.summary.mean_raw == doctest::Approx(0.20).epsilon(1e-12));
  // Winners are A and B at +0.5 each; losers C and D at -0.5.
  CHECK(result.cohorts[0].portfolio.longs[0].instrument == market.store.instrument_index("A"));
  CHECK(result.cohorts[0].portfolio.shorts[0].instrument == market.store.instrument_index("C"));
}

TEST_CASE("run_backtest: one shared return path nets zero raw, -2c implemented") {
  std::vector<PriceRow> rows;
  double px = 100.0;
  for (int m = 0; m < 5; ++m) {
    char buf[11];
    std::snprintf(buf, sizeof(buf), "2010-%02d-28", 1 + m);
    for (const char* code : {"A", "B", "C", "D"}) rows.push_back(bar(buf, code, px));
    px *= 1.03;
  }
  const auto store = build_price_store(rows);
  const auto membership =
      build_membership(all_in_t({"A", "B", "C", "D"}, "2000-01-01", "2030-12-31"), store);
  const auto result = run_backtest(persistent_spec(), store, membership);
  for (double r : result.series_raw) CHECK(r == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(result.summary.mean_raw == 0.0);
  CHECK(result.summary.zero_mean);
  CHECK(result.summary.implemented_return ==
        doctest::Approx(-2.0 * 0.0035).epsilon(1e-15));
}

TEST_CASE("run_backtest: cost never touches the raw series") {
  PersistentMarket market(8);
  auto spec = persistent_spec();
  spec.cost_per_basket = 0.0;
  const auto free_run = run_backtest(spec, market.store, market.membership);
  spec.cost_per_basket = 0.01;
  const auto costly = run_backtest(spec, market.store, market.membership);
  REQUIRE(free_run.series_raw.size() == costly.series_raw.size());
  for (size_t i = 0; i < free_run.series_raw.size(); ++i)
    CHECK(free_run.series_raw[i] == costly.series_raw[i]);
  CHECK(free_run.summary.mean_raw == costly.summary.mean_raw);
  CHECK(free_run.summary.implemented_return > costly.summary.implemented_return);
}

TEST_CASE("run_backtest: sequential cohort accounting") {
  SynthParams params;
  params.n_instruments = 24;
  params.n_years = 3;
  params.seed = 42;
  params.momentum_strength = 0.5;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  const auto membership = market.build_membership(store);

  BacktestSpec spec = persistent_spec();
  spec.group_count = 4;
  spec.lookback = 2;
  spec.holding = 3;
  const auto result = run_backtest(spec, store, membership);

  // One observation per cohort, at per-period scale, dated at liquidation.
  REQUIRE(result.series_raw.size() == result.cohorts.size());
  const int expected =
      (int(store.calendar().monthly_marks.size()) - 1 - spec.lookback) / spec.holding;
  CHECK(int(result.cohorts.size()) == expected);
  for (size_t i = 0; i < result.cohorts.size(); ++i) {
    CHECK(result.series_ords[i] == result.cohorts[i].liquidation_ord);
    CHECK(std::abs(result.series_raw[i] * spec.holding -
                   result.cohorts[i].raw_return_total) <= 1e-12);
  }
  for (size_t i = 1; i < result.series_ords.size(); ++i)
    CHECK(result.series_ords[i] > result.series_ords[i - 1]);
  // Liquidation is exactly K period marks after formation.
  const auto& marks = store.calendar().monthly_marks;
  for (const auto& c : result.cohorts) {
    const auto f = std::find(marks.begin(), marks.end(), c.formation_ord);
    REQUIRE(f != marks.end());
    CHECK(*(f + spec.holding) == c.liquidation_ord);
  }
}

TEST_CASE("run_backtest: composite overlapping construction") {
  PersistentMarket market(10);
  auto spec = persistent_spec();
  spec.overlap = OverlapMode::composite;
  spec.holding = 2;
  spec.lookback = 1;
  const auto result = run_backtest(spec, market.store, market.membership);

  // Months J+K .. M-K, all K cohorts active: every month averages 0.20.
  const int m = int(market.store.calendar().monthly_marks.size());
  CHECK(int(result.series_raw.size()) == m - spec.lookback - 2 * spec.holding + 1);
  for (double r : result.series_raw) CHECK(r == doctest::Approx(0.20).epsilon(1e-12));
  // One cohort per formation month.
  CHECK(int(result.cohorts.size()) == m - spec.lookback - spec.holding);
  REQUIRE(result.summary.t_stat_nw.has_value());  // overlapping mode adds the corrected t
}

TEST_CASE("run_backtest: errors and warnings") {
  SUBCASE("insufficient history") {
    PersistentMarket market(3);
    auto spec = persistent_spec();
    spec.lookback = 4;
    try {
      run_backtest(spec, market.store, market.membership);
      FAIL("expected InsufficientHistory");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientHistory);
    }
  }
  SUBCASE("universe empty at every formation") {
    PersistentMarket market(6);
    const auto never = build_membership(
        all_in_t({"A", "B", "C", "D"}, "1990-01-01", "1990-12-31"), market.store);
    try {
      run_backtest(persistent_spec(), market.store, never);
      FAIL("expected EmptyUniverse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyUniverse);
    }
  }
  SUBCASE("a formation with too few eligible names is skipped with a warning") {
    PersistentMarket market(8);
    auto spec = persistent_spec();
    spec.group_count = 4;  // exactly 4 names: any missing member skips the formation
    // Membership starts only at month 4, so early formations are empty.
    std::vector<MembershipRow> rows =
        all_in_t({"A", "B", "C", "D"}, "2010-04-01", "2030-12-31");
    const auto membership = build_membership(rows, market.store);
    const auto result = run_backtest(spec, market.store, membership);
    CHECK_FALSE(result.warnings.empty());
    CHECK_FALSE(result.cohorts.empty());
  }
}

TEST_CASE("run_backtest: no look-ahead") {
  SynthParams params;
  params.n_instruments = 12;
  params.n_years = 2;
  params.seed = 5;
  params.momentum_strength = 0.3;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  const auto membership = market.build_membership(store);

  BacktestSpec spec = persistent_spec();
  spec.group_count = 3;
  const auto base = run_backtest(spec, store, membership);
  REQUIRE(base.cohorts.size() >= 3);
  const auto& probe = base.cohorts[1];

  // Bump one price strictly after this cohort's liquidation date.
  auto rows = market.prices;
  const Date cutoff = store.calendar().dates[size_t(probe.liquidation_ord)];
  bool bumped = false;
  for (auto& r : rows) {
    if (!bumped && r.date > cutoff) {
      r.adj_close *= 7.5;
      r.market_cap *= 7.5;
      bumped = true;
    }
  }
  REQUIRE(bumped);
  const auto store2 = build_price_store(rows);
  const auto membership2 = market.build_membership(store2);
  const auto perturbed = run_backtest(spec, store2, membership2);

  const auto& probe2 = perturbed.cohorts[1];
  CHECK(probe.formation_ord == probe2.formation_ord);
  CHECK(probe.liquidation_ord == probe2.liquidation_ord);
  CHECK(probe.raw_return_total == probe2.raw_return_total);
  REQUIRE(probe.portfolio.longs.size() == probe2.portfolio.longs.size());
  for (size_t i = 0; i < probe.portfolio.longs.size(); ++i)
    CHECK(probe.portfolio.longs[i].instrument == probe2.portfolio.longs[i].instrument);
}

TEST_CASE("amortized cost is nonincreasing in K") {
  for (int k = 1; k < 12; ++k)
    CHECK(amortized_cost(0.0035, k + 1) <= amortized_cost(0.0035, k));
}

TEST_CASE("run_grid") {
  SynthParams params;
  params.n_instruments = 20;
  params.n_years = 2;
  params.seed = 77;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  const auto membership = market.build_membership(store);

  GridSpec grid;
  grid.base = persistent_spec();
  grid.base.group_count = 4;

  SUBCASE("a 1x1 grid equals the single backtest") {
    grid.j_min = grid.j_max = 2;
    grid.k_min = grid.k_max = 2;
    const auto g = run_grid(grid, store, membership);
    REQUIRE(g.cells.size() == 1);
    REQUIRE(g.cell(2, 2).summary.has_value());
    auto spec = grid.base;
    spec.lookback = 2;
    spec.holding = 2;
    const auto direct = run_backtest(spec, store, membership);
    CHECK(g.cell(2, 2).summary->mean_raw == direct.summary.mean_raw);
    CHECK(g.cell(2, 2).summary->t_stat == direct.summary.t_stat);
  }
  SUBCASE("per-cell failures are recorded, not fatal") {
    grid.j_min = 1;
    grid.j_max = 12;  // J=12,K=12 does not fit in 24 months
    grid.k_min = 1;
    grid.k_max = 12;
    const auto g = run_grid(grid, store, membership);
    CHECK(g.cells.size() == 144);
    CHECK(g.cell(1, 1).summary.has_value());
    CHECK_FALSE(g.cell(12, 12).summary.has_value());
    CHECK(g.cell(12, 12).error.find("InsufficientHistory") != std::string::npos);
  }
  SUBCASE("serial and parallel runs are bitwise identical") {
    grid.j_min = 1;
    grid.j_max = 6;
    grid.k_min = 1;
    grid.k_max = 6;
    grid.threads = 1;
    const auto serial = run_grid(grid, store, membership);
    grid.threads = 8;
    const auto parallel = run_grid(grid, store, membership);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (size_t i = 0; i < serial.cells.size(); ++i) {
      CHECK(serial.cells[i].summary.has_value() == parallel.cells[i].summary.has_value());
      if (serial.cells[i].summary) {
        CHECK(serial.cells[i].summary->mean_raw == parallel.cells[i].summary->mean_raw);
        CHECK(serial.cells[i].summary->volatility == parallel.cells[i].summary->volatility);
        CHECK(serial.cells[i].summary->t_stat == parallel.cells[i].summary->t_stat);
      }
    }
  }
}

TEST_CASE("run_universe_comparison: identical universes difference to zero") {
  SynthParams params;
  params.n_instruments = 20;
  params.n_years = 2;
  params.seed = 11;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  const auto membership = market.build_membership(store);

  GridSpec grid;
  grid.base = persistent_spec();
  grid.base.group_count = 4;
  grid.j_min = 1;
  grid.j_max = 3;
  grid.k_min = 1;
  grid.k_max = 3;
  const auto cmp = run_universe_comparison(
      grid, {parse_universe("200"), parse_universe("200")}, store, membership);
  REQUIRE(cmp.rel_return.size() == 1);
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k) {
      REQUIRE(cmp.rel_return[0].at(j, k).has_value());
      CHECK(*cmp.rel_return[0].at(j, k) == 0.0);
      CHECK(*cmp.rel_sharpe[0].at(j, k) == 0.0);
    }
  CHECK_THROWS_AS(
      run_universe_comparison(grid, {parse_universe("200")}, store, membership), Error);
}

TEST_CASE("weekly frequency runs off ISO-week marks") {
  SynthParams params;
  params.n_instruments = 12;
  params.n_years = 1;
  params.seed = 3;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  const auto membership = market.build_membership(store);

  BacktestSpec spec = persistent_spec();
  spec.frequency = Frequency::weekly;
  spec.group_count = 3;
  spec.lookback = 4;
  spec.holding = 2;
  const auto result = run_backtest(spec, store, membership);
  CHECK(result.cohorts.size() >= 20);  // ~52 weekly marks, step 2
}

TEST_CASE("run_group_profile orders groups by the criterion") {
  // Size criterion on a market where big caps compound up and small caps down.
  std::vector<PriceRow> rows;
  double big = 100.0, small = 100.0;
  for (int m = 0; m < 6; ++m) {
    char buf[11];
    std::snprintf(buf, sizeof(buf), "2010-%02d-28", 1 + m);
    for (const char* code : {"B1", "B2"}) rows.push_back(bar(buf, code, big, 100, 100000));
    for (const char* code : {"S1", "S2"}) rows.push_back(bar(buf, code, small, 100, 10));
    big *= 1.10;
    small *= 0.90;
  }
  const auto store = build_price_store(rows);
  const auto membership = build_membership(
      all_in_t({"B1", "B2", "S1", "S2"}, "2000-01-01", "2030-12-31"), store);
  BacktestSpec spec = persistent_spec();
  spec.criterion = parse_criterion("size");
  spec.group_count = 2;
  const auto profile = run_group_profile(spec, store, membership);
  REQUIRE(profile.size() == 2);
  CHECK(profile[0] == doctest::Approx(-0.10).epsilon(1e-12));  // small caps
  CHECK(profile[1] == doctest::Approx(0.10).epsilon(1e-12));   // big caps
}

TEST_CASE("resolve_threads honors the MOMLAB_THREADS cap") {
  ::setenv("MOMLAB_THREADS", "2", 1);
  CHECK(resolve_threads(8) == 2);
  CHECK(resolve_threads(1) == 1);
  ::setenv("MOMLAB_THREADS", "0", 1);  // invalid cap is ignored
  CHECK(resolve_threads(4) == 4);
  ::unsetenv("MOMLAB_THREADS");
  CHECK(resolve_threads(4) == 4);
}
