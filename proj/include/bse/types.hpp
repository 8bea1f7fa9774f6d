#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bse {

/// Prices are integer pennies; tick size is one penny.
using Price = std::int64_t;

/// Simulated seconds since the session opened.
using SimTime = double;

using TraderId = std::string;

enum class Side : std::uint8_t { Bid, Ask };

constexpr Side opposite(Side s) noexcept { return s == Side::Bid ? Side::Ask : Side::Bid; }

constexpr std::string_view to_string(Side s) noexcept { return s == Side::Bid ? "bid" : "ask"; }

/// System-wide allowable price band. Stub quotes sit at its edges.
struct PriceBand {
  Price min = 1;
  Price max = 1000;

  constexpr bool contains(Price p) const noexcept { return p >= min && p <= max; }
  constexpr Price clamp(Price p) const noexcept { return p < min ? min : (p > max ? max : p); }
};

struct LimitOrder {
  TraderId tid;
  Side side = Side::Bid;
  Price price = 0;
  int qty = 1;
  SimTime time = 0.0;
};

struct Trade {
  SimTime time = 0.0;
  Price price = 0;
  int qty = 1;
  TraderId party_standing;
  TraderId party_crossing;
  Side crossing_side = Side::Bid;

  const TraderId& buyer() const noexcept {
    return crossing_side == Side::Bid ? party_crossing : party_standing;
  }
  const TraderId& seller() const noexcept {
    return crossing_side == Side::Ask ? party_crossing : party_standing;
  }
};

/// What traders learn about the most recently processed order.
struct MarketEvent {
  SimTime time = 0.0;
  Side quote_side = Side::Bid;
  Price quote_price = 0;
  std::optional<Trade> trade;
};

/// Round half-up to the nearest integer penny.
Price round_half_up(double x) noexcept;

class ExchangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bse
