// oracle.hpp — brute-force reference backtest for verifying the engine.
#pragma once

#include "core/engine.hpp"

namespace momlab {

/// Recomputes a sequential-mode backtest by direct, unoptimized enumeration:
/// its own period marks, membership evaluation from raw intervals, naive
/// forward-fill scans, explicit sort and boundary indexes, per-constituent
/// return products and inline summary formulas. Shares only the data types
/// with the engine, none of its code paths. Meant for tiny instances.
BacktestResult oracle_backtest(const BacktestSpec& spec, const PriceStore& store,
                               const MembershipCalendar& membership);

}  // namespace momlab
