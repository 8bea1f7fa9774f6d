#include "bse/traders.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace bse {

namespace {

constexpr std::array<std::pair<TraderType, std::string_view>, 5> kTypeNames{{
    {TraderType::GVWY, "GVWY"},
    {TraderType::ZIC, "ZIC"},
    {TraderType::SHVR, "SHVR"},
    {TraderType::SNPR, "SNPR"},
    {TraderType::ZIP, "ZIP"},
}};

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace

std::string_view to_string(TraderType t) noexcept {
  for (const auto& [type, name] : kTypeNames) {
    if (type == t) return name;
  }
  return "?";
}

std::optional<TraderType> parse_trader_type(std::string_view name) noexcept {
  for (const auto& [type, n] : kTypeNames) {
    if (n == name) return type;
  }
  return std::nullopt;
}

Trader::Trader(TraderId tid, TraderType type, Side job, PriceBand band)
    : tid_(std::move(tid)), type_(type), job_(job), band_(band) {}

bool Trader::assign_order(const Assignment& a) {
  if (a.qty != 1) throw TraderError(fmt::format("{}: assignment quantity must be 1", tid_));
  if (!band_.contains(a.limit)) {
    throw TraderError(fmt::format("{}: limit {} outside [{}, {}]", tid_, a.limit, band_.min, band_.max));
  }
  if (a.side != job_) {
    throw TraderError(fmt::format("{}: works {} orders, got a {} assignment", tid_, to_string(job_), to_string(a.side)));
  }
  bool cancel = live_order_;
  assignment_ = a;
  live_order_ = false;
  return cancel;
}

std::optional<LimitOrder> Trader::getorder(SimTime time, double time_left, const PublishedLOB& lob, Rng& rng) {
  if (!assignment_) return std::nullopt;
  auto price = quote_price(time_left, lob, rng);
  if (!price) return std::nullopt;
  // Never quote through the customer's limit.
  Price p = assignment_->side == Side::Bid ? std::min(*price, assignment_->limit) : std::max(*price, assignment_->limit);
  p = band_.clamp(p);
  ++n_quotes_;
  return LimitOrder{tid_, assignment_->side, p, 1, time};
}

void Trader::respond(SimTime, const PublishedLOB&, const MarketEvent&, Rng&) {}

Price Trader::bookkeep(const Trade& trade, SimTime time) {
  TradeRole role;
  if (trade.party_standing == tid_) {
    role = TradeRole::Standing;
  } else if (trade.party_crossing == tid_) {
    role = TradeRole::Crossing;
  } else {
    throw TraderError(fmt::format("{} is not a party to the trade at {}", tid_, trade.price));
  }
  if (!assignment_) throw TraderError(fmt::format("{} traded without holding an assignment", tid_));

  Price profit = assignment_->side == Side::Bid ? assignment_->limit - trade.price : trade.price - assignment_->limit;
  balance_ += profit;
  blotter_.push_back(BlotterEntry{time, trade.price, trade.qty, role, assignment_->id, profit});
  assignment_.reset();
  live_order_ = false;
  return profit;
}

std::optional<Price> Giveaway::quote_price(double, const PublishedLOB&, Rng&) { return assignment()->limit; }

std::optional<Price> ZeroIntelligenceConstrained::quote_price(double, const PublishedLOB&, Rng& rng) {
  const Price limit = assignment()->limit;
  Price lo = assignment()->side == Side::Bid ? band().min : limit;
  Price hi = assignment()->side == Side::Bid ? limit : band().max;
  if (lo == hi) return lo;
  return std::uniform_int_distribution<Price>(lo, hi)(rng);
}

Price Shaver::shaved(const PublishedLOB& lob, Price amount) const {
  const Price limit = assignment()->limit;
  if (assignment()->side == Side::Bid) {
    if (!lob.bids.best) return std::min(lob.bids.worst, limit);
    return std::min(*lob.bids.best + amount, limit);
  }
  if (!lob.asks.best) return std::max(lob.asks.worst, limit);
  return std::max(*lob.asks.best - amount, limit);
}

Price Sniper::shave_amount(double time_left) noexcept {
  double frac = std::clamp((kLurkThreshold - time_left) / kLurkThreshold, 0.0, 1.0);
  return 1 + static_cast<Price>(std::floor(3.0 * frac));
}

std::optional<Price> Sniper::quote_price(double time_left, const PublishedLOB& lob, Rng&) {
  if (time_left > kLurkThreshold) return std::nullopt;
  return shaved(lob, shave_amount(time_left));
}

ZipState ZipState::random_init(Side job, Rng& rng) {
  ZipState s;
  double m = uniform(rng, 0.05, 0.35);
  s.margin = job == Side::Bid ? -m : m;
  s.beta = uniform(rng, 0.1, 0.5);
  s.gamma = uniform(rng, 0.0, 0.1);
  s.prev_change = 0.0;
  return s;
}

ZeroIntelligencePlus::ZeroIntelligencePlus(TraderId tid, Side job, PriceBand band, ZipState state)
    : Trader(std::move(tid), TraderType::ZIP, job, band), state_(state) {
  if (job == Side::Bid ? state_.margin > 0.0 : state_.margin < 0.0) {
    throw TraderError("ZIP margin sign does not match the trader's side");
  }
}

double ZeroIntelligencePlus::raw_quote() const {
  if (!assignment()) throw TraderError(fmt::format("{}: no assignment to price", tid()));
  return static_cast<double>(assignment()->limit) * (1.0 + state_.margin);
}

std::optional<Price> ZeroIntelligencePlus::quote_price(double, const PublishedLOB&, Rng&) {
  return round_half_up(raw_quote());
}

void ZeroIntelligencePlus::move_toward(double target, double current) {
  double delta = state_.beta * (target - current);
  double change = state_.gamma * state_.prev_change + (1.0 - state_.gamma) * delta;
  state_.prev_change = change;
  double margin = (current + change) / static_cast<double>(assignment()->limit) - 1.0;
  state_.margin = job() == Side::Bid ? std::clamp(margin, -1.0, 0.0) : std::max(margin, 0.0);
}

void ZeroIntelligencePlus::respond(SimTime, const PublishedLOB&, const MarketEvent& event, Rng& rng) {
  state_.last_event = event;
  if (!assignment()) return;

  auto target_up = [&](double q) { return uniform(rng, 1.0, 1.05) * q + uniform(rng, 0.0, 5.0); };
  auto target_down = [&](double q) { return uniform(rng, 0.95, 1.0) * q + uniform(rng, -5.0, 0.0); };

  const double p = raw_quote();
  if (event.trade) {
    const double q = static_cast<double>(event.trade->price);
    // The accepted shout is the one that was resting on the book.
    const Side accepted = opposite(event.trade->crossing_side);
    if (job() == Side::Ask) {
      if (p <= q) {
        move_toward(target_up(q), p);
      } else if (accepted == Side::Bid) {
        move_toward(target_down(q), p);
      }
    } else {
      if (p >= q) {
        move_toward(target_down(q), p);
      } else if (accepted == Side::Ask) {
        move_toward(target_up(q), p);
      }
    }
    return;
  }

  const double q = static_cast<double>(event.quote_price);
  if (job() == Side::Ask && event.quote_side == Side::Ask && p >= q) {
    move_toward(target_down(q), p);
  } else if (job() == Side::Bid && event.quote_side == Side::Bid && p <= q) {
    move_toward(target_up(q), p);
  }
}

std::unique_ptr<Trader> make_trader(TraderType type, TraderId tid, Side job, PriceBand band, Rng& rng) {
  switch (type) {
    case TraderType::GVWY:
      return std::make_unique<Giveaway>(std::move(tid), job, band);
    case TraderType::ZIC:
      return std::make_unique<ZeroIntelligenceConstrained>(std::move(tid), job, band);
    case TraderType::SHVR:
      return std::make_unique<Shaver>(std::move(tid), job, band);
    case TraderType::SNPR:
      return std::make_unique<Sniper>(std::move(tid), job, band);
    case TraderType::ZIP:
      return std::make_unique<ZeroIntelligencePlus>(std::move(tid), job, band, ZipState::random_init(job, rng));
  }
  throw TraderError("unknown trader type");
}

void write_blotter_csv(std::ostream& out, const Trader& trader) {
  for (const auto& e : trader.blotter()) {
    out << fmt::format("{},{:.6f},{},{},{}\n", trader.tid(), e.time, e.price, e.assignment_id, e.profit);
  }
}

}  // namespace bse
