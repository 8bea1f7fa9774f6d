#pragma once

// One market session: populate the traders, then repeatedly hand out
// customer orders, poll one randomly chosen trader for a quote, match it,
// and let every trader react to the outcome.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bse/exchange.hpp"
#include "bse/metrics.hpp"
#include "bse/order_flow.hpp"
#include "bse/traders.hpp"

namespace bse {

struct TraderPopulationSpec {
  std::vector<std::pair<TraderType, std::size_t>> buyers;
  std::vector<std::pair<TraderType, std::size_t>> sellers;

  std::size_t n_buyers() const noexcept;
  std::size_t n_sellers() const noexcept;

  /// Throws ConfigError unless both sides have at least one trader.
  void validate() const;
};

using Population = std::vector<std::unique_ptr<Trader>>;

/// Buyers are B00, B01, ... and sellers S00, S01, ... in spec order.
Population populate_market(const TraderPopulationSpec& spec, const PriceBand& band, Rng& rng);

struct SessionConfig {
  std::string session_id = "trial0000001";
  SimTime start_time = 0.0;
  SimTime end_time = 300.0;
  TraderPopulationSpec population;
  OrderSchedule schedule;
  std::uint64_t seed = 0;
  /// Defaults to 1 / (number of traders).
  std::optional<SimTime> timestep;
  PriceBand band;

  void validate() const;
  SimTime effective_timestep() const;
};

struct TypeBalance {
  TraderType type = TraderType::GVWY;
  Price total_balance = 0;
  std::size_t trader_count = 0;
  double mean_balance = 0.0;
};

struct SessionStats {
  std::string session_id;
  SimTime end_time = 0.0;
  /// Ordered by type name.
  std::vector<TypeBalance> per_type;
  std::optional<Price> best_bid;
  std::optional<Price> best_ask;
  std::size_t trade_count = 0;
  std::vector<TapeEntry> tape;
  std::vector<ExecutedTrade> trades;
  std::vector<IssuedAssignment> assignments;
};

struct SessionOutcome {
  SessionStats stats;
  Population traders;
};

/// Runs the session and keeps the final trader population (for blotters).
SessionOutcome run_session(const SessionConfig& config);

SessionStats market_session(const SessionConfig& config);

/// Buyer and seller limits of the assignments issued at exactly `issue_time`.
std::pair<std::vector<Price>, std::vector<Price>> limits_issued_at(const SessionStats& stats, SimTime issue_time);

/// The per-session balances row (no trailing newline).
std::string balances_row(const SessionStats& stats);

}  // namespace bse
