#pragma once

// Single-security limit order book with replace-then-match semantics.
//
// Every trader has at most one resting order. A new order from a trader first
// deletes that trader's previous order, then either crosses the opposite best
// (executing one unit at the resting order's price) or rests at the back of
// its price level. Quantities are always 1, so a crossing order never rests.

#include <cstdint>
#include <iosfwd>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bse/types.hpp"

namespace bse {

struct PublishedHalf {
  std::optional<Price> best;
  Price worst = 0;
  std::size_t n_orders = 0;
  /// (price, total quantity). Bids descending, asks ascending.
  std::vector<std::pair<Price, int>> ladder;

  bool operator==(const PublishedHalf&) const = default;
};

struct LastTrade {
  SimTime time = 0.0;
  Price price = 0;

  bool operator==(const LastTrade&) const = default;
};

/// Anonymized two-sided snapshot handed to traders.
struct PublishedLOB {
  SimTime time = 0.0;
  PublishedHalf bids;
  PublishedHalf asks;
  std::optional<LastTrade> last_trade;

  std::optional<Price> spread() const;

  bool operator==(const PublishedLOB&) const = default;
};

/// JSON rendering of the snapshot (contains no trader identities).
std::string to_json_string(const PublishedLOB& lob);

struct TapeEntry {
  SimTime time = 0.0;
  Price price = 0;
  int qty = 1;
};

class Exchange {
 public:
  explicit Exchange(PriceBand band = {});

  const PriceBand& band() const noexcept { return band_; }

  void register_trader(const TraderId& tid);
  bool is_registered(const TraderId& tid) const;

  /// Throws ExchangeError (book untouched) for unknown tid, out-of-band price or qty != 1.
  std::optional<Trade> submit_order(SimTime time, const LimitOrder& order);

  bool cancel_order(SimTime time, const TraderId& tid);

  PublishedLOB publish_lob(SimTime time) const;

  const std::vector<TapeEntry>& tape() const noexcept { return tape_; }

  std::optional<Price> best_bid() const;
  std::optional<Price> best_ask() const;

  /// Price of tid's resting order, if it has one.
  std::optional<Price> resting_price(const TraderId& tid) const;
  std::size_t order_count(Side side) const;

 private:
  struct Resting {
    TraderId tid;
    SimTime time;
    std::uint64_t seq;
  };
  using Level = std::list<Resting>;
  // Keyed so that begin() is the best price on each side.
  using BidBook = std::map<Price, Level, std::greater<>>;
  using AskBook = std::map<Price, Level, std::less<>>;

  struct Locator {
    Side side;
    Price price;
    Level::iterator it;
  };

  void remove_resting(const TraderId& tid);
  void rest(const LimitOrder& order, SimTime time);
  template <typename Book>
  Trade execute_against_best(Book& book, SimTime time, const LimitOrder& incoming);
  void invalidate() noexcept { snapshot_.reset(); }

  PriceBand band_;
  BidBook bids_;
  AskBook asks_;
  std::unordered_map<TraderId, std::optional<Locator>> orders_;
  std::vector<TapeEntry> tape_;
  std::uint64_t next_seq_ = 0;

  mutable std::optional<PublishedLOB> snapshot_;
};

/// One `TRD,<time>,<price>` row per trade.
void write_tape_csv(std::ostream& out, const std::vector<TapeEntry>& tape);

}  // namespace bse
