#pragma once

// Order sequences and book states used as exact replay references.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "bse/exchange.hpp"

namespace bse::testing {

using Ladder = std::vector<std::pair<Price, int>>;

/// The six-order sequence of the worked LOB example, then the order that lifts the ask.
inline std::vector<LimitOrder> worked_example_orders() {
  return {
      {"T11", Side::Bid, 22, 1, 2},  {"T02", Side::Bid, 27, 1, 6},  {"T08", Side::Ask, 77, 1, 7},
      {"T01", Side::Bid, 27, 1, 10}, {"T03", Side::Ask, 62, 1, 18}, {"T11", Side::Bid, 30, 1, 21},
      {"T02", Side::Bid, 67, 1, 25},
  };
}

inline void register_worked_example_traders(Exchange& ex) {
  for (const char* tid : {"T01", "T02", "T03", "T08", "T11"}) ex.register_trader(tid);
}

/// XYZ book: 10 bids at 152, 60 at 150, 20 asks at 155, 50 at 162, one unit per trader.
inline void build_xyz_book(Exchange& ex) {
  int n = 0;
  auto place = [&](Side side, Price price, int count, const char* prefix) {
    for (int i = 0; i < count; ++i, ++n) {
      TraderId tid = fmt::format("{}{:03d}", prefix, n);
      ex.register_trader(tid);
      ex.submit_order(0.0, LimitOrder{tid, side, price, 1, 0.0});
    }
  };
  place(Side::Bid, 150, 60, "B");
  place(Side::Bid, 152, 10, "B");
  place(Side::Ask, 155, 20, "S");
  place(Side::Ask, 162, 50, "S");
}

inline Ladder ascending(Ladder l) {
  std::sort(l.begin(), l.end());
  return l;
}

}  // namespace bse::testing
