#include "core/universe.hpp"

#include <algorithm>
#include <map>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace momlab {

IndexId parse_index_token(std::string_view token, size_t position) {
  if (token == "50") return IndexId::F;
  if (token == "100") return IndexId::H;
  if (token == "200") return IndexId::T;
  throw Error(ErrorCode::UnknownIndexToken,
              "'" + std::string(token) + "' at position " + std::to_string(position) +
                  " (want 50, 100 or 200)");
}

const char* index_token(IndexId id) {
  switch (id) {
    case IndexId::F: return "50";
    case IndexId::H: return "100";
    case IndexId::T: return "200";
  }
  return "?";
}

MembershipCalendar build_membership(const std::vector<MembershipRow>& rows,
                                    const PriceStore& store) {
  MembershipCalendar cal;
  cal.n_instruments_ = store.n_instruments();

  for (const auto& r : rows) {
    const int inst = store.instrument_index(r.instrument);
    if (inst < 0)
      throw Error(ErrorCode::UnknownInstrument, r.instrument + " (membership)");
    if (r.end < r.start)
      throw Error(ErrorCode::EndBeforeStart,
                  index_token(r.index) + std::string("/") + r.instrument + ": " +
                      format_date(r.end) + " < " + format_date(r.start));
    cal.intervals_.push_back({r.index, inst, r.start, r.end});
  }

  // Non-overlap check per (index, instrument).
  std::map<std::pair<int, int>, std::vector<std::pair<Date, Date>>> grouped;
  for (const auto& iv : cal.intervals_)
    grouped[{int(iv.index), iv.instrument}].emplace_back(iv.start, iv.end);
  for (auto& [key, spans] : grouped) {
    std::sort(spans.begin(), spans.end());
    for (size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first <= spans[i - 1].second)
        throw Error(ErrorCode::OverlappingInterval,
                    std::string(index_token(IndexId(key.first))) + "/" +
                        store.instruments()[size_t(key.second)] + " at " +
                        format_date(spans[i].first));
    }
  }

  const size_t n_dates = store.n_dates();
  for (auto& sets : cal.sets_)
    sets.assign(n_dates, MembershipCalendar::Bits(store.n_instruments()));
  const auto& calendar = store.calendar();
  for (const auto& iv : cal.intervals_) {
    const int first = calendar.first_at_or_after(iv.start);
    const int last = calendar.last_at_or_before(iv.end);
    for (int d = first; d <= last; ++d)
      cal.sets_[size_t(iv.index)][size_t(d)].set(size_t(iv.instrument));
  }

  // Nesting validation: warn on the first violating date per pair.
  auto check_nested = [&](IndexId inner, IndexId outer) {
    for (size_t d = 0; d < n_dates; ++d) {
      const auto stray = cal.sets_[size_t(inner)][d] - cal.sets_[size_t(outer)][d];
      if (stray.any()) {
        cal.warnings_.push_back(std::string(index_token(inner)) + " not a subset of " +
                                index_token(outer) + " on " +
                                format_date(calendar.dates[d]) + " (" +
                                std::to_string(stray.count()) + " instruments)");
        return;
      }
    }
  };
  check_nested(IndexId::F, IndexId::H);
  check_nested(IndexId::H, IndexId::T);
  return cal;
}

MembershipCalendar load_membership(const std::filesystem::path& path, const PriceStore& store) {
  std::vector<MembershipRow> rows;
  read_csv(path, "index,instrument,start_date,end_date",
           [&](size_t line, const std::vector<std::string_view>& f) {
             MembershipRow r;
             try {
               r.index = parse_index_token(f[0], 0);
               r.start = parse_date(f[2]);
               r.end = parse_date(f[3]);
             } catch (const Error& e) {
               // In a data file a bad index token is a malformed row, not a
               // config error.
               throw Error(ErrorCode::MalformedRow,
                           path.string() + ":" + std::to_string(line) + ": " + e.what());
             }
             r.instrument = std::string(f[1]);
             rows.push_back(std::move(r));
           });
  return build_membership(rows, store);
}

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;

  void skip_spaces() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }

  std::string_view term() {
    skip_spaces();
    const size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start)
      throw Error(ErrorCode::SyntaxError,
                  "expected index term at position " + std::to_string(start) + " in '" +
                      std::string(text) + "'");
    return text.substr(start, pos - start);
  }
};

}  // namespace

UniverseExpr parse_universe(std::string_view text) {
  UniverseExpr expr;
  Parser p{text};

  auto add = [&](UniverseExpr::Node n) {
    expr.nodes.push_back(n);
    return int(expr.nodes.size()) - 1;
  };

  const size_t first_pos = p.pos;
  int lhs = add({UniverseExpr::Op::base, parse_index_token(p.term(), first_pos), -1, -1});
  while (true) {
    p.skip_spaces();
    if (p.pos == p.text.size()) break;
    const char op = p.text[p.pos];
    if (op != '-' && op != '+')
      throw Error(ErrorCode::SyntaxError, "unexpected '" + std::string(1, op) +
                                              "' at position " + std::to_string(p.pos) +
                                              " in '" + std::string(text) + "'");
    ++p.pos;
    const size_t term_pos = p.pos;
    const int rhs = add({UniverseExpr::Op::base, parse_index_token(p.term(), term_pos), -1, -1});
    if (op == '-') {
      const int comp = add({UniverseExpr::Op::complement, IndexId::T, rhs, -1});
      lhs = add({UniverseExpr::Op::intersect, IndexId::T, lhs, comp});
    } else {
      lhs = add({UniverseExpr::Op::unite, IndexId::T, lhs, rhs});
    }
  }
  expr.root = lhs;

  expr.label.reserve(text.size());
  for (char c : text)
    if (c != ' ') expr.label.push_back(c);
  return expr;
}

namespace {

MembershipCalendar::Bits eval_node(const UniverseExpr& expr, int node,
                                   const MembershipCalendar& calendar, int ord) {
  const auto& n = expr.nodes[size_t(node)];
  switch (n.op) {
    case UniverseExpr::Op::base:
      return calendar.members_at(n.base, ord);
    case UniverseExpr::Op::intersect:
      return eval_node(expr, n.lhs, calendar, ord) & eval_node(expr, n.rhs, calendar, ord);
    case UniverseExpr::Op::unite:
      return eval_node(expr, n.lhs, calendar, ord) | eval_node(expr, n.rhs, calendar, ord);
    case UniverseExpr::Op::complement:
      // Complement is always relative to T, the full pool.
      return calendar.members_at(IndexId::T, ord) - eval_node(expr, n.lhs, calendar, ord);
  }
  throw Error(ErrorCode::Internal, "bad universe node");
}

}  // namespace

MembershipCalendar::Bits evaluate_universe(const UniverseExpr& expr,
                                           const MembershipCalendar& calendar, int ord) {
  if (expr.root < 0) throw Error(ErrorCode::Internal, "empty universe expression");
  if (ord < 0 || size_t(ord) >= calendar.n_dates())
    throw Error(ErrorCode::DateOutsideCalendar, "ordinal " + std::to_string(ord));
  return eval_node(expr, expr.root, calendar, ord);
}

std::vector<int> members(const UniverseExpr& expr, const MembershipCalendar& calendar, int ord) {
  const auto bits = evaluate_universe(expr, calendar, ord);
  std::vector<int> out;
  out.reserve(bits.count());
  for (size_t i = bits.find_first(); i != MembershipCalendar::Bits::npos; i = bits.find_next(i))
    out.push_back(int(i));
  return out;
}

}  // namespace momlab
