#include "doctest.h"

#include <thread>

#include "core/errors.hpp"
#include "core/market_data.hpp"
#include "core/synth.hpp"
#include "tests/test_support.hpp"

using namespace momlab;
using namespace momlab::testing;

TEST_CASE("load_prices: minimal well-formed file") {
  const auto dir = temp_dir("md");
  spit(dir / "prices.csv",
       "date,instrument,adj_close,volume,shares_outstanding,market_cap\n"
       "2020-01-06,X,100,10,1000,100000\n"
       "2020-01-07,X,101,10,1000,101000\n"
       "2020-01-08,X,102,10,1000,102000\n");
  const auto store = load_prices(dir / "prices.csv");
  CHECK(store.n_instruments() == 1);
  CHECK(store.n_dates() == 3);
  CHECK(store.adj_close(0, 1) == doctest::Approx(101.0));
}

TEST_CASE("load_prices: error taxonomy") {
  const auto dir = temp_dir("md");

  SUBCASE("zero price is NonPositivePrice") {
    spit(dir / "p.csv",
         "date,instrument,adj_close,volume,shares_outstanding,market_cap\n"
         "2020-01-06,X,0,10,1000,100000\n");
    CHECK_THROWS_WITH_AS(load_prices(dir / "p.csv"), doctest::Contains("NonPositivePrice"),
                         Error);
  }
  SUBCASE("duplicate instrument+date is DuplicateBar") {
    spit(dir / "p.csv",
         "date,instrument,adj_close,volume,shares_outstanding,market_cap\n"
         "2020-01-06,X,100,10,1000,100000\n"
         "2020-01-06,X,101,10,1000,101000\n");
    CHECK_THROWS_WITH_AS(load_prices(dir / "p.csv"), doctest::Contains("DuplicateBar"), Error);
  }
  SUBCASE("short row reports its line number") {
    spit(dir / "p.csv",
         "date,instrument,adj_close,volume,shares_outstanding,market_cap\n"
         "2020-01-06,X,100,10,1000,100000\n"
         "2020-01-07,X,100\n");
    CHECK_THROWS_WITH_AS(load_prices(dir / "p.csv"), doctest::Contains(":3:"), Error);
  }
  SUBCASE("bad number reports its line number") {
    spit(dir / "p.csv",
         "date,instrument,adj_close,volume,shares_outstanding,market_cap\n"
         "2020-01-06,X,abc,10,1000,100000\n");
    CHECK_THROWS_WITH_AS(load_prices(dir / "p.csv"), doctest::Contains("line 2"), Error);
  }
  SUBCASE("header-only file is EmptyDataset") {
    spit(dir / "p.csv", "date,instrument,adj_close,volume,shares_outstanding,market_cap\n");
    try {
      load_prices(dir / "p.csv");
      FAIL("expected EmptyDataset");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyDataset);
    }
  }
  SUBCASE("missing file is FileNotFound") {
    try {
      load_prices(dir / "nope.csv");
      FAIL("expected FileNotFound");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FileNotFound);
      CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
  }
  SUBCASE("negative volume is MalformedRow") {
    CHECK_THROWS_AS(build_price_store({bar("2020-01-06", "X", 100.0, -5)}), Error);
  }
}

TEST_CASE("calendar: 12 synthetic years give 144 monthly period marks") {
  SynthParams params;
  params.n_instruments = 200;
  params.n_years = 12;
  params.seed = 7;
  const auto market = generate_market(params);
  const auto store = market.build_store();
  CHECK(store.n_instruments() == 200);
  CHECK(store.calendar().monthly_marks.size() == 144);
  // Period marks partition the calendar: last mark is the last date.
  CHECK(store.calendar().monthly_marks.back() == int(store.n_dates()) - 1);
}

TEST_CASE("calendar: weekly marks are ISO-week ends") {
  std::vector<PriceRow> rows;
  // Mon 2020-01-06 .. Fri 2020-01-17, two full ISO weeks.
  for (const char* d : {"2020-01-06", "2020-01-07", "2020-01-08", "2020-01-09", "2020-01-10",
                        "2020-01-13", "2020-01-14", "2020-01-15", "2020-01-16", "2020-01-17"})
    rows.push_back(bar(d, "X", 100.0));
  const auto store = build_price_store(rows);
  REQUIRE(store.calendar().weekly_marks.size() == 2);
  CHECK(format_date(store.calendar().dates[size_t(store.calendar().weekly_marks[0])]) ==
        "2020-01-10");
  CHECK(format_date(store.calendar().dates[size_t(store.calendar().weekly_marks[1])]) ==
        "2020-01-17");
}

TEST_CASE("period_return basics") {
  const auto store = build_price_store({
      bar("2020-01-06", "X", 100.0),
      bar("2020-01-07", "X", 110.0),
      bar("2020-01-08", "X", 99.0),
  });
  CHECK(period_return(store, 0, 0, 1) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(period_return(store, 0, 1, 1) == 0.0);  // identity at a priced date
  // Compounding: 100 -> 110 -> 99 over two periods is -1% total.
  CHECK(period_return(store, 0, 0, 2) == doctest::Approx(-0.01).epsilon(1e-12));
  const double lhs = (1.0 + period_return(store, 0, 0, 1)) * (1.0 + period_return(store, 0, 1, 2));
  CHECK(lhs == doctest::Approx(1.0 + period_return(store, 0, 0, 2)).epsilon(1e-12));
}

TEST_CASE("period_return: forward fill and staleness") {
  std::vector<PriceRow> rows;
  rows.push_back(bar("2020-03-02", "X", 100.0));
  // Calendar carried by a second instrument; X goes quiet for a while.
  for (int i = 0; i < 30; ++i) {
    char buf[11];
    std::snprintf(buf, sizeof(buf), "2020-03-%02d", 2 + i);
    Date d;
    try {
      d = parse_date(buf);
    } catch (const Error&) {
      continue;
    }
    rows.push_back(bar(buf, "CAL", 50.0));
  }
  auto store = build_price_store(rows);
  const int x = store.instrument_index("X");
  REQUIRE(x >= 0);
  // Within the 10-trading-day limit the last price is carried forward.
  CHECK(period_return(store, x, 0, 5) == doctest::Approx(0.0));
  // Beyond it the data is stale.
  try {
    period_return(store, x, 0, int(store.n_dates()) - 1);
    FAIL("expected StaleData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StaleData);
  }
  // Before the first bar there is no price at all.
  const auto store2 = build_price_store({
      bar("2020-03-02", "CAL", 50.0),
      bar("2020-03-03", "CAL", 50.0),
      bar("2020-03-03", "X", 10.0),
  });
  try {
    period_return(store2, store2.instrument_index("X"), 0, 1);
    FAIL("expected NoPriceAvailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPriceAvailable);
  }
}

TEST_CASE("eligible: coverage threshold and formation bar") {
  // Ten trading days carried by CAL; X listed mid-window.
  std::vector<PriceRow> rows;
  const char* days[] = {"2020-01-06", "2020-01-07", "2020-01-08", "2020-01-09", "2020-01-10",
                        "2020-01-13", "2020-01-14", "2020-01-15", "2020-01-16", "2020-01-17"};
  for (const char* d : days) rows.push_back(bar(d, "CAL", 50.0));
  for (int i = 5; i < 10; ++i) rows.push_back(bar(days[i], "X", 10.0));  // 50% coverage
  for (int i = 1; i < 10; ++i) rows.push_back(bar(days[i], "Y", 10.0));  // 90% coverage
  const auto store = build_price_store(rows);

  CHECK(eligible(store, store.instrument_index("CAL"), 0, 9));
  CHECK_FALSE(eligible(store, store.instrument_index("X"), 0, 9));
  CHECK(eligible(store, store.instrument_index("Y"), 0, 9));  // exactly at the 90% threshold
  CHECK_FALSE(eligible(store, -1, 0, 9));                     // absent instrument
  // Missing formation bar fails even with full earlier coverage.
  std::vector<PriceRow> rows2 = rows;
  std::erase_if(rows2, [&](const PriceRow& r) {
    return r.instrument == "CAL" && format_date(r.date) == "2020-01-17";
  });
  const auto store2 = build_price_store(rows2);
  CHECK_FALSE(eligible(store2, store2.instrument_index("CAL"), 0, 9));
}

TEST_CASE("flows: derived individual leg and zero-sum invariant") {
  auto store = build_price_store({
      bar("2020-01-06", "X", 100.0),
      bar("2020-01-07", "X", 100.0),
  });

  SUBCASE("individual leg is the exact negation") {
    const auto with = attach_flows(store, {{parse_date("2020-01-06"), "X", 100, -40}});
    CHECK(with.individual_net(0, 0) == -60);
    CHECK(with.institutional_net(0, 0) == 100);
    CHECK(with.foreign_net(0, 0) == -40);
    const auto zero = attach_flows(store, {{parse_date("2020-01-06"), "X", 0, 0}});
    CHECK(zero.individual_net(0, 0) == 0);
  }

  SUBCASE("zero-sum holds exactly over random integer flows") {
    TestRng rng(11);
    std::vector<FlowRow> rows;
    for (int i = 0; i < 500; ++i) {
      const int64_t ins = int64_t(rng.raw() % 2000001) - 1000000;
      const int64_t forn = int64_t(rng.raw() % 2000001) - 1000000;
      rows.push_back({parse_date(i % 2 == 0 ? "2020-01-06" : "2020-01-07"), "X", ins, forn});
    }
    const auto with = attach_flows(store, rows);
    for (int d = 0; d < 2; ++d)
      CHECK(with.institutional_net(0, d) + with.foreign_net(0, d) + with.individual_net(0, d) ==
            0);
  }

  SUBCASE("unknown instrument rejected") {
    CHECK_THROWS_AS(attach_flows(store, {{parse_date("2020-01-06"), "NOPE", 1, 1}}), Error);
  }
  SUBCASE("date outside calendar rejected") {
    try {
      attach_flows(store, {{parse_date("2021-06-01"), "X", 1, 1}});
      FAIL("expected DateOutsideCalendar");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DateOutsideCalendar);
    }
  }
  SUBCASE("attach does not mutate the source store") {
    CHECK_FALSE(store.has_flows());
    const auto with = attach_flows(store, {{parse_date("2020-01-06"), "X", 5, 5}});
    CHECK(with.has_flows());
    CHECK_FALSE(store.has_flows());
  }
}

TEST_CASE("store supports concurrent readers") {
  SynthParams params;
  params.n_instruments = 20;
  params.n_years = 2;
  params.seed = 3;
  const auto store = generate_market(params).build_store();
  const double expected = period_return(store, 0, 0, int(store.n_dates()) - 1);
  std::vector<std::thread> readers;
  std::vector<double> got(8, 0.0);
  for (int t = 0; t < 8; ++t)
    readers.emplace_back([&, t] {
      for (int rep = 0; rep < 200; ++rep)
        got[size_t(t)] = period_return(store, 0, 0, int(store.n_dates()) - 1);
    });
  for (auto& t : readers) t.join();
  for (double g : got) CHECK(g == expected);
}
