#pragma once

// Robot sales-traders. Each works at most one customer limit order
// (an Assignment) and never quotes through that order's limit.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "bse/exchange.hpp"
#include "bse/types.hpp"

namespace bse {

using Rng = std::mt19937_64;

enum class TraderType : std::uint8_t { GVWY, ZIC, SHVR, SNPR, ZIP };

std::string_view to_string(TraderType t) noexcept;
std::optional<TraderType> parse_trader_type(std::string_view name) noexcept;

/// A customer order. Side::Bid is a buy, Side::Ask a sell.
struct Assignment {
  std::uint64_t id = 0;
  Side side = Side::Bid;
  Price limit = 0;
  int qty = 1;
  SimTime issue_time = 0.0;
};

enum class TradeRole : std::uint8_t { Standing, Crossing };

struct BlotterEntry {
  SimTime time = 0.0;
  Price price = 0;
  int qty = 1;
  TradeRole role = TradeRole::Standing;
  std::uint64_t assignment_id = 0;
  Price profit = 0;
};

class Trader {
 public:
  Trader(TraderId tid, TraderType type, Side job, PriceBand band);
  virtual ~Trader() = default;

  Trader(const Trader&) = delete;
  Trader& operator=(const Trader&) = delete;

  const TraderId& tid() const noexcept { return tid_; }
  TraderType type() const noexcept { return type_; }
  Side job() const noexcept { return job_; }
  const PriceBand& band() const noexcept { return band_; }
  Price balance() const noexcept { return balance_; }
  const std::vector<BlotterEntry>& blotter() const noexcept { return blotter_; }
  const std::optional<Assignment>& assignment() const noexcept { return assignment_; }
  std::size_t n_quotes() const noexcept { return n_quotes_; }

  /// Replaces any held assignment. Returns true when the trader had a live
  /// exchange order for the old one, which the caller must then cancel.
  bool assign_order(const Assignment& a);

  std::optional<LimitOrder> getorder(SimTime time, double time_left, const PublishedLOB& lob, Rng& rng);

  virtual void respond(SimTime time, const PublishedLOB& lob, const MarketEvent& event, Rng& rng);

  /// Books a fill of the held assignment; returns the profit in pennies.
  Price bookkeep(const Trade& trade, SimTime time);

  /// Set by the session once this trader's quote rests on the book.
  void mark_live_order(bool live) noexcept { live_order_ = live; }
  bool has_live_order() const noexcept { return live_order_; }

 protected:
  /// Strategy pricing for the held assignment; nullopt abstains.
  virtual std::optional<Price> quote_price(double time_left, const PublishedLOB& lob, Rng& rng) = 0;

 private:
  TraderId tid_;
  TraderType type_;
  Side job_;
  PriceBand band_;
  Price balance_ = 0;
  std::vector<BlotterEntry> blotter_;
  std::optional<Assignment> assignment_;
  std::size_t n_quotes_ = 0;
  bool live_order_ = false;
};

/// Quotes the limit price.
class Giveaway final : public Trader {
 public:
  Giveaway(TraderId tid, Side job, PriceBand band) : Trader(std::move(tid), TraderType::GVWY, job, band) {}

 protected:
  std::optional<Price> quote_price(double, const PublishedLOB&, Rng&) override;
};

/// Budget-constrained uniform random quoting.
class ZeroIntelligenceConstrained final : public Trader {
 public:
  ZeroIntelligenceConstrained(TraderId tid, Side job, PriceBand band)
      : Trader(std::move(tid), TraderType::ZIC, job, band) {}

 protected:
  std::optional<Price> quote_price(double, const PublishedLOB&, Rng& rng) override;
};

/// Improves the own-side best by one penny, never past the limit.
class Shaver : public Trader {
 public:
  Shaver(TraderId tid, Side job, PriceBand band) : Trader(std::move(tid), TraderType::SHVR, job, band) {}

 protected:
  Shaver(TraderId tid, TraderType type, Side job, PriceBand band) : Trader(std::move(tid), type, job, band) {}

  std::optional<Price> quote_price(double, const PublishedLOB& lob, Rng&) override { return shaved(lob, 1); }
  Price shaved(const PublishedLOB& lob, Price amount) const;
};

/// Silent until the last quarter of the session, then shaves by a growing amount.
class Sniper final : public Shaver {
 public:
  static constexpr double kLurkThreshold = 0.25;

  Sniper(TraderId tid, Side job, PriceBand band) : Shaver(std::move(tid), TraderType::SNPR, job, band) {}

  /// Pennies shaved at the given fraction of session remaining (1 to 4).
  static Price shave_amount(double time_left) noexcept;

 protected:
  std::optional<Price> quote_price(double time_left, const PublishedLOB& lob, Rng&) override;
};

struct ZipState {
  double margin = 0.0;      // buyers <= 0, sellers >= 0
  double beta = 0.3;        // learning rate
  double gamma = 0.05;      // momentum
  double prev_change = 0.0; // pennies
  std::optional<MarketEvent> last_event;

  /// Draws a fresh state for a trader working the given side.
  static ZipState random_init(Side job, Rng& rng);
};

/// Adapts its profit margin with a Widrow-Hoff update plus momentum.
class ZeroIntelligencePlus final : public Trader {
 public:
  ZeroIntelligencePlus(TraderId tid, Side job, PriceBand band, ZipState state);

  const ZipState& state() const noexcept { return state_; }

  /// Unrounded price implied by the current margin; requires an assignment.
  double raw_quote() const;

  void respond(SimTime time, const PublishedLOB& lob, const MarketEvent& event, Rng& rng) override;

 protected:
  std::optional<Price> quote_price(double, const PublishedLOB&, Rng&) override;

 private:
  void move_toward(double target, double current);

  ZipState state_;
};

std::unique_ptr<Trader> make_trader(TraderType type, TraderId tid, Side job, PriceBand band, Rng& rng);

/// One `<tid>,<time>,<price>,<assignment_id>,<profit>` row per blotter entry.
void write_blotter_csv(std::ostream& out, const Trader& trader);

}  // namespace bse
