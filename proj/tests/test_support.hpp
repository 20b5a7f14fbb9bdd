// Shared helpers for the unit and acceptance suites.
#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "core/market_data.hpp"
#include "core/universe.hpp"

namespace momlab::testing {

inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("momlab-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void spit(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline bool is_weekend(Date d) {
  const int dow = ((d.days % 7) + 7) % 7;  // 1970-01-01 was a Thursday: 0 = Thu
  return dow == 2 || dow == 3;             // Sat, Sun
}

inline PriceRow bar(const char* date, const char* code, double close, int64_t volume = 1000,
                    int64_t shares = 10000, double cap = -1.0) {
  PriceRow r;
  r.date = parse_date(date);
  r.instrument = code;
  r.adj_close = close;
  r.volume = volume;
  r.shares_outstanding = shares;
  r.market_cap = cap > 0.0 ? cap : close * double(shares);
  return r;
}

inline MembershipRow member(IndexId index, const char* code, const char* start,
                            const char* end) {
  return MembershipRow{index, code, parse_date(start), parse_date(end)};
}

/// Membership rows placing every instrument in T over [start, end].
inline std::vector<MembershipRow> all_in_t(const std::vector<std::string>& codes,
                                           const char* start, const char* end) {
  std::vector<MembershipRow> rows;
  for (const auto& c : codes)
    rows.push_back(MembershipRow{IndexId::T, c, parse_date(start), parse_date(end)});
  return rows;
}

/// Deterministic normal sampler for test-side oracles (independent of synth).
class TestRng {
 public:
  explicit TestRng(uint64_t seed) : gen_(seed) {}
  uint64_t raw() { return gen_(); }
  double uniform() { return (double(gen_() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + int(gen_() % uint64_t(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace momlab::testing
