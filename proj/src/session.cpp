#include "bse/session.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

namespace bse {

namespace {

std::size_t total(const std::vector<std::pair<TraderType, std::size_t>>& side) {
  std::size_t n = 0;
  for (const auto& [_, count] : side) n += count;
  return n;
}

}  // namespace

std::size_t TraderPopulationSpec::n_buyers() const noexcept { return total(buyers); }
std::size_t TraderPopulationSpec::n_sellers() const noexcept { return total(sellers); }

void TraderPopulationSpec::validate() const {
  if (n_buyers() == 0 || n_sellers() == 0) {
    throw ConfigError(fmt::format("population needs at least one buyer and one seller (got {} and {})", n_buyers(),
                                  n_sellers()));
  }
}

Population populate_market(const TraderPopulationSpec& spec, const PriceBand& band, Rng& rng) {
  spec.validate();
  Population traders;
  traders.reserve(spec.n_buyers() + spec.n_sellers());
  auto add_side = [&](const auto& side, char prefix, Side job) {
    std::size_t i = 0;
    for (const auto& [type, count] : side) {
      for (std::size_t k = 0; k < count; ++k, ++i) {
        traders.push_back(make_trader(type, fmt::format("{}{:02d}", prefix, i), job, band, rng));
      }
    }
  };
  add_side(spec.buyers, 'B', Side::Bid);
  add_side(spec.sellers, 'S', Side::Ask);
  return traders;
}

void SessionConfig::validate() const {
  if (!(start_time < end_time)) throw ConfigError(fmt::format("start {} must precede end {}", start_time, end_time));
  if (timestep && !(*timestep > 0.0)) throw ConfigError("timestep must be positive");
  if (band.min > band.max) throw ConfigError("price band is empty");
  population.validate();
  schedule.validate();
}

SimTime SessionConfig::effective_timestep() const {
  if (timestep) return *timestep;
  return 1.0 / static_cast<double>(population.n_buyers() + population.n_sellers());
}

SessionOutcome run_session(const SessionConfig& config) {
  config.validate();

  // Draw order from the single session stream: trader construction, then per
  // step customer orders, trader choice, quote pricing, and trader responses.
  Rng rng(config.seed);
  Exchange exchange(config.band);
  Population traders = populate_market(config.population, config.band, rng);
  std::unordered_map<TraderId, Trader*> by_tid;
  for (const auto& t : traders) {
    exchange.register_trader(t->tid());
    by_tid.emplace(t->tid(), t.get());
  }
  CustomerOrderFlow flow(config.schedule, config.band, config.start_time);

  SessionStats stats;
  stats.session_id = config.session_id;
  stats.end_time = config.end_time;

  const SimTime dt = config.effective_timestep();
  const SimTime duration = config.end_time - config.start_time;
  std::uniform_int_distribution<std::size_t> pick(0, traders.size() - 1);

  for (std::uint64_t step = 0;; ++step) {
    const SimTime time = config.start_time + static_cast<double>(step) * dt;
    if (time >= config.end_time) break;
    const double time_left = (config.end_time - time) / duration;

    CustomerOrderBatch batch = flow.customer_orders(time, traders, rng);
    for (const auto& tid : batch.cancellations) exchange.cancel_order(time, tid);
    std::move(batch.issued.begin(), batch.issued.end(), std::back_inserter(stats.assignments));

    Trader& actor = *traders[pick(rng)];
    PublishedLOB lob = exchange.publish_lob(time);
    std::optional<LimitOrder> order = actor.getorder(time, time_left, lob, rng);
    if (!order) continue;

    std::optional<Trade> trade = exchange.submit_order(time, *order);
    if (trade) {
      Trader& buyer = *by_tid.at(trade->buyer());
      Trader& seller = *by_tid.at(trade->seller());
      ExecutedTrade rec{time, trade->price, buyer.tid(), seller.tid(), buyer.assignment()->limit,
                        seller.assignment()->limit};
      buyer.bookkeep(*trade, time);
      seller.bookkeep(*trade, time);
      stats.trades.push_back(std::move(rec));
    } else {
      actor.mark_live_order(true);
    }

    lob = exchange.publish_lob(time);
    MarketEvent event{time, order->side, order->price, trade};
    for (const auto& t : traders) t->respond(time, lob, event, rng);
  }

  std::map<std::string_view, TypeBalance> per_type;
  for (const auto& t : traders) {
    auto& tb = per_type[to_string(t->type())];
    tb.type = t->type();
    tb.total_balance += t->balance();
    ++tb.trader_count;
  }
  for (auto& [_, tb] : per_type) {
    tb.mean_balance = static_cast<double>(tb.total_balance) / static_cast<double>(tb.trader_count);
    stats.per_type.push_back(tb);
  }
  stats.best_bid = exchange.best_bid();
  stats.best_ask = exchange.best_ask();
  stats.tape = exchange.tape();
  stats.trade_count = stats.tape.size();
  return SessionOutcome{std::move(stats), std::move(traders)};
}

SessionStats market_session(const SessionConfig& config) { return run_session(config).stats; }

std::pair<std::vector<Price>, std::vector<Price>> limits_issued_at(const SessionStats& stats, SimTime issue_time) {
  std::pair<std::vector<Price>, std::vector<Price>> out;
  for (const auto& ia : stats.assignments) {
    if (ia.assignment.issue_time != issue_time) continue;
    (ia.assignment.side == Side::Bid ? out.first : out.second).push_back(ia.assignment.limit);
  }
  return out;
}

std::string balances_row(const SessionStats& stats) {
  std::string row = fmt::format("{},{:.6f}", stats.session_id, stats.end_time);
  for (const auto& tb : stats.per_type) {
    row += fmt::format(",{},{},{},{:.2f}", to_string(tb.type), tb.total_balance, tb.trader_count, tb.mean_balance);
  }
  row += stats.best_bid ? fmt::format(",{}", *stats.best_bid) : std::string(",");
  row += stats.best_ask ? fmt::format(",{}", *stats.best_ask) : std::string(",");
  return row;
}

}  // namespace bse
