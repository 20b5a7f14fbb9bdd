// universe.hpp — point-in-time index membership and universe set algebra.
#pragma once

#include <boost/dynamic_bitset.hpp>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core/market_data.hpp"

namespace momlab {

/// The three base indexes: F = "50", H = "100", T = "200" (the full pool).
enum class IndexId { F = 0, H = 1, T = 2 };

IndexId parse_index_token(std::string_view token, size_t position);
const char* index_token(IndexId id);

struct MembershipRow {
  IndexId index;
  std::string instrument;
  Date start;
  Date end;  // inclusive; open-ended membership uses 9999-12-31
};

/// Interval-based constituency compiled to one member bitset per (index,
/// trading date) for O(1) point-in-time queries. Immutable after build.
class MembershipCalendar {
 public:
  using Bits = boost::dynamic_bitset<>;

  const Bits& members_at(IndexId id, int ord) const {
    return sets_[size_t(id)][size_t(ord)];
  }

  struct Interval {
    IndexId index;
    int instrument;
    Date start;
    Date end;
  };
  /// Raw interval records, kept for consumers that want to re-derive
  /// membership without going through the compiled bitsets.
  const std::vector<Interval>& intervals() const { return intervals_; }

  /// Nesting (F ⊆ H ⊆ T) is validated at build; violations are warnings,
  /// not errors, so near-miss real change logs still load.
  const std::vector<std::string>& warnings() const { return warnings_; }

  size_t n_dates() const { return sets_[0].size(); }
  size_t n_instruments() const { return n_instruments_; }

 private:
  std::vector<Bits> sets_[3];
  std::vector<Interval> intervals_;
  std::vector<std::string> warnings_;
  size_t n_instruments_ = 0;

  friend MembershipCalendar build_membership(const std::vector<MembershipRow>&,
                                             const PriceStore&);
};

MembershipCalendar build_membership(const std::vector<MembershipRow>& rows,
                                    const PriceStore& store);

/// Loads membership.csv: `index,instrument,start_date,end_date`, index in
/// {50,100,200}.
MembershipCalendar load_membership(const std::filesystem::path& path, const PriceStore& store);

/// Expression tree over the base indexes. Surface syntax:
///   term ::= "50" | "100" | "200"
///   expr ::= term (("-" | "+") term)*      (left-associative)
/// "-" is set difference within T (A - B = A ∩ Bᶜ, complement relative to T)
/// and "+" is union, so "200-100+50" is (T ∩ Hᶜ) ∪ F.
struct UniverseExpr {
  enum class Op { base, intersect, unite, complement };
  struct Node {
    Op op = Op::base;
    IndexId base = IndexId::T;
    int lhs = -1;
    int rhs = -1;
  };
  std::vector<Node> nodes;
  int root = -1;
  std::string label;  // normalized source text, used in file names and CSV
};

UniverseExpr parse_universe(std::string_view text);

MembershipCalendar::Bits evaluate_universe(const UniverseExpr& expr,
                                           const MembershipCalendar& calendar, int ord);

/// Member instrument ids at a date, ascending (deterministic).
std::vector<int> members(const UniverseExpr& expr, const MembershipCalendar& calendar, int ord);

}  // namespace momlab
