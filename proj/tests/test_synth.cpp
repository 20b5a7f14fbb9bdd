#include "doctest.h"

#include <cmath>

#include "core/engine.hpp"
#include "core/errors.hpp"
#include "core/synth.hpp"
#include "tests/test_support.hpp"

using namespace momlab;
using namespace momlab::testing;

TEST_CASE("generate_market: identical params give byte-identical CSVs") {
  SynthParams params;
  params.n_instruments = 15;
  params.n_years = 1;
  params.seed = 424242;
  params.momentum_strength = 0.4;
  params.flow_pred_foreign = 0.5;
  const auto a = temp_dir("synth-a");
  const auto b = temp_dir("synth-b");
  generate_market(params).write(a);
  generate_market(params).write(b);
  for (const char* f : {"prices.csv", "flows.csv", "membership.csv", "synth_manifest.json"}) {
    INFO(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  // A different seed changes the panel.
  params.seed = 7;
  const auto c = temp_dir("synth-c");
  generate_market(params).write(c);
  CHECK(slurp(a / "prices.csv") != slurp(c / "prices.csv"));
}

TEST_CASE("generate_market: CSV round trip reproduces the in-memory panel exactly") {
  SynthParams params;
  params.n_instruments = 8;
  params.n_years = 1;
  params.seed = 99;
  const auto market = generate_market(params);
  const auto dir = temp_dir("synth-rt");
  market.write(dir);

  const auto direct = market.build_store_with_flows();
  const auto loaded = load_flows(dir / "flows.csv", load_prices(dir / "prices.csv"));
  REQUIRE(direct.n_instruments() == loaded.n_instruments());
  REQUIRE(direct.n_dates() == loaded.n_dates());
  for (size_t i = 0; i < direct.n_instruments(); ++i)
    for (size_t d = 0; d < direct.n_dates(); d += 7) {
      CHECK(direct.adj_close(int(i), int(d)) == loaded.adj_close(int(i), int(d)));
      CHECK(direct.market_cap(int(i), int(d)) == loaded.market_cap(int(i), int(d)));
      CHECK(direct.volume(int(i), int(d)) == loaded.volume(int(i), int(d)));
      CHECK(direct.institutional_net(int(i), int(d)) == loaded.institutional_net(int(i), int(d)));
    }
  const auto m1 = market.build_membership(direct);
  const auto m2 = load_membership(dir / "membership.csv", loaded);
  CHECK(m1.intervals().size() == m2.intervals().size());
}

TEST_CASE("generate_market: structural invariants") {
  SynthParams params;
  params.n_instruments = 40;
  params.n_years = 2;
  params.seed = 31;
  params.momentum_strength = 0.6;
  const auto market = generate_market(params);
  const auto store = market.build_store_with_flows();
  const auto membership = market.build_membership(store);

  SUBCASE("row count = instruments x trading days; all bars present") {
    CHECK(market.prices.size() == store.n_instruments() * store.n_dates());
    for (size_t i = 0; i < store.n_instruments(); ++i)
      CHECK(store.priced_count(int(i), 0, int(store.n_dates()) - 1) == int(store.n_dates()));
  }
  SUBCASE("nesting F ⊂ H ⊂ T holds at every date") {
    CHECK(membership.warnings().empty());
    const int f = effective_f_count(params);
    const int h = effective_h_count(params);
    for (size_t d = 0; d < store.n_dates(); ++d) {
      const auto& fs = membership.members_at(IndexId::F, int(d));
      const auto& hs = membership.members_at(IndexId::H, int(d));
      const auto& ts = membership.members_at(IndexId::T, int(d));
      CHECK(int(fs.count()) == f);
      CHECK(int(hs.count()) == h);
      CHECK(int(ts.count()) == params.n_instruments);
      CHECK((fs - hs).none());
      CHECK((hs - ts).none());
    }
  }
  SUBCASE("flows satisfy the zero-sum identity by construction") {
    for (size_t i = 0; i < store.n_instruments(); i += 5)
      for (size_t d = 0; d < store.n_dates(); d += 11)
        CHECK(store.institutional_net(int(i), int(d)) + store.foreign_net(int(i), int(d)) +
                  store.individual_net(int(i), int(d)) ==
              0);
  }
  SUBCASE("prices and caps positive, volumes nonnegative") {
    for (const auto& r : market.prices) {
      CHECK(r.adj_close > 0.0);
      CHECK(r.market_cap > 0.0);
      CHECK(r.volume >= 0);
      CHECK(r.shares_outstanding > 0);
    }
  }
}

TEST_CASE("generate_market: 200 names x 12 years covers the full grid span") {
  SynthParams params;
  params.n_instruments = 200;
  params.n_years = 12;
  params.seed = 1;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  CHECK(store.calendar().monthly_marks.size() == 144);
  CHECK(effective_f_count(params) == 50);
  CHECK(effective_h_count(params) == 100);
  CHECK(market.prices.size() == 200 * store.n_dates());
}

TEST_CASE("generate_market: momentum strength is detectable") {
  SynthParams params;
  params.n_instruments = 100;
  params.n_years = 10;
  params.seed = 17;
  params.momentum_strength = 0.9;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  const auto membership = market.build_membership(store);

  BacktestSpec spec;
  spec.universe = parse_universe("200");
  spec.criterion = parse_criterion("momentum");
  spec.lookback = 6;
  spec.holding = 6;
  const auto strong = run_backtest(spec, store, membership);
  CHECK(strong.summary.mean_raw > 0.0);
  CHECK(strong.summary.t_stat > 2.0);

  params.momentum_strength = 0.0;
  params.seed = 18;
  const auto null_market = generate_market(params);
  const auto null_store = null_market.build_store();
  const auto null_membership = null_market.build_membership(null_store);
  const auto weak = run_backtest(spec, null_store, null_membership);
  CHECK(std::abs(weak.summary.t_stat) < 4.0);
}

TEST_CASE("generate_market: flow predictiveness shows up as forecast correlation") {
  auto correlation = [](const SynthParams& params, FlowGroup group) {
    const auto market = generate_market(params);
    const auto store = market.build_store_with_flows();
    const auto& marks = store.calendar().monthly_marks;
    std::vector<double> xs, ys;
    for (size_t p = 1; p + 1 < marks.size(); ++p) {
      for (size_t i = 0; i < store.n_instruments(); ++i) {
        int64_t flow = 0;
        for (int d = marks[p - 1] + 1; d <= marks[p]; ++d) flow += store.net_flow(group, int(i), d);
        xs.push_back(double(flow) / double(store.shares_outstanding(int(i), marks[p])));
        ys.push_back(store.adj_close(int(i), marks[p + 1]) / store.adj_close(int(i), marks[p]) -
                     1.0);
      }
    }
    const size_t n = xs.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };

  SynthParams params;
  params.n_instruments = 60;
  params.n_years = 6;
  params.seed = 77;
  params.momentum_strength = 0.5;
  params.flow_pred_foreign = 0.9;
  CHECK(correlation(params, FlowGroup::foreign_investors) > 0.2);

  params.flow_pred_foreign = 0.0;
  params.seed = 78;
  CHECK(std::abs(correlation(params, FlowGroup::foreign_investors)) < 0.1);
}

TEST_CASE("generate_market: parameter validation") {
  SynthParams params;
  params.n_instruments = 1;
  CHECK_THROWS_AS(generate_market(params), Error);
  params = SynthParams{};
  params.momentum_strength = 1.5;
  CHECK_THROWS_AS(generate_market(params), Error);
  params = SynthParams{};
  params.carrier_lo = 10;
  params.carrier_hi = 5;
  CHECK_THROWS_AS(generate_market(params), Error);
  params = SynthParams{};
  params.flow_pred_individual = -2.0;
  try {
    generate_market(params);
    FAIL("expected InvalidParams");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParams);
  }
}
