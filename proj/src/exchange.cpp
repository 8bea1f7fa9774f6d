#include "bse/exchange.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"

namespace bse {

Price round_half_up(double x) noexcept { return static_cast<Price>(std::floor(x + 0.5)); }

std::optional<Price> PublishedLOB::spread() const {
  if (!bids.best || !asks.best) return std::nullopt;
  return *asks.best - *bids.best;
}

namespace {

nlohmann::json half_to_json(const PublishedHalf& h) {
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& [price, qty] : h.ladder) ladder.push_back({price, qty});
  return {{"best", h.best ? nlohmann::json(*h.best) : nlohmann::json(nullptr)},
          {"worst", h.worst},
          {"n", h.n_orders},
          {"lob", std::move(ladder)}};
}

template <typename Book>
PublishedHalf anonymize(const Book& book, Price worst) {
  PublishedHalf half;
  half.worst = worst;
  for (const auto& [price, level] : book) {
    if (level.empty()) continue;
    half.ladder.emplace_back(price, static_cast<int>(level.size()));
    half.n_orders += level.size();
  }
  if (!half.ladder.empty()) half.best = half.ladder.front().first;
  return half;
}

}  // namespace

std::string to_json_string(const PublishedLOB& lob) {
  nlohmann::json j{{"time", lob.time}, {"bids", half_to_json(lob.bids)}, {"asks", half_to_json(lob.asks)}};
  if (lob.last_trade) {
    j["last_trade"] = {{"time", lob.last_trade->time}, {"price", lob.last_trade->price}};
  } else {
    j["last_trade"] = nullptr;
  }
  return j.dump();
}

Exchange::Exchange(PriceBand band) : band_(band) {
  if (band_.min > band_.max) throw ExchangeError("price band is empty");
}

void Exchange::register_trader(const TraderId& tid) { orders_.try_emplace(tid, std::nullopt); }

bool Exchange::is_registered(const TraderId& tid) const { return orders_.contains(tid); }

std::optional<Price> Exchange::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<Price> Exchange::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

std::optional<Price> Exchange::resting_price(const TraderId& tid) const {
  auto it = orders_.find(tid);
  if (it == orders_.end() || !it->second) return std::nullopt;
  return it->second->price;
}

std::size_t Exchange::order_count(Side side) const {
  std::size_t n = 0;
  if (side == Side::Bid) {
    for (const auto& [_, level] : bids_) n += level.size();
  } else {
    for (const auto& [_, level] : asks_) n += level.size();
  }
  return n;
}

void Exchange::remove_resting(const TraderId& tid) {
  auto& slot = orders_.at(tid);
  if (!slot) return;
  auto erase_from = [&](auto& book) {
    auto level = book.find(slot->price);
    level->second.erase(slot->it);
    if (level->second.empty()) book.erase(level);
  };
  if (slot->side == Side::Bid) {
    erase_from(bids_);
  } else {
    erase_from(asks_);
  }
  slot.reset();
  invalidate();
}

void Exchange::rest(const LimitOrder& order, SimTime time) {
  auto push = [&](auto& book) {
    auto& level = book[order.price];
    level.push_back(Resting{order.tid, time, next_seq_++});
    return std::prev(level.end());
  };
  auto it = order.side == Side::Bid ? push(bids_) : push(asks_);
  orders_.at(order.tid) = Locator{order.side, order.price, it};
  invalidate();
}

template <typename Book>
Trade Exchange::execute_against_best(Book& book, SimTime time, const LimitOrder& incoming) {
  auto level = book.begin();
  Resting standing = level->second.front();
  Trade trade{.time = time,
              .price = level->first,
              .qty = 1,
              .party_standing = standing.tid,
              .party_crossing = incoming.tid,
              .crossing_side = incoming.side};
  remove_resting(standing.tid);
  tape_.push_back(TapeEntry{time, trade.price, 1});
  return trade;
}

std::optional<Trade> Exchange::submit_order(SimTime time, const LimitOrder& order) {
  if (!is_registered(order.tid)) throw ExchangeError(fmt::format("unknown trader id '{}'", order.tid));
  if (order.qty != 1) throw ExchangeError(fmt::format("order quantity must be 1, got {}", order.qty));
  if (!band_.contains(order.price)) {
    throw ExchangeError(fmt::format("price {} outside [{}, {}]", order.price, band_.min, band_.max));
  }

  remove_resting(order.tid);

  if (order.side == Side::Bid && !asks_.empty() && order.price >= asks_.begin()->first) {
    return execute_against_best(asks_, time, order);
  }
  if (order.side == Side::Ask && !bids_.empty() && order.price <= bids_.begin()->first) {
    return execute_against_best(bids_, time, order);
  }
  rest(order, time);
  return std::nullopt;
}

bool Exchange::cancel_order(SimTime /*time*/, const TraderId& tid) {
  auto it = orders_.find(tid);
  if (it == orders_.end()) throw ExchangeError(fmt::format("unknown trader id '{}'", tid));
  if (!it->second) return false;
  remove_resting(tid);
  return true;
}

PublishedLOB Exchange::publish_lob(SimTime time) const {
  if (!snapshot_) {
    PublishedLOB lob;
    lob.bids = anonymize(bids_, band_.min);
    lob.asks = anonymize(asks_, band_.max);
    if (!tape_.empty()) lob.last_trade = LastTrade{tape_.back().time, tape_.back().price};
    snapshot_ = std::move(lob);
  }
  PublishedLOB out = *snapshot_;
  out.time = time;
  return out;
}

void write_tape_csv(std::ostream& out, const std::vector<TapeEntry>& tape) {
  for (const auto& e : tape) out << fmt::format("TRD,{:.6f},{}\n", e.time, e.price);
}

}  // namespace bse
