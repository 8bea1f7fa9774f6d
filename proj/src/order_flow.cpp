#include "bse/order_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace bse {

namespace {

// Tolerance for comparing accumulated loop times against scheduled issue times.
constexpr double kTimeEps = 1e-9;

constexpr std::array<std::pair<TimeMode, std::string_view>, 4> kTimeModes{{
    {TimeMode::Periodic, "periodic"},
    {TimeMode::DripFixed, "drip-fixed"},
    {TimeMode::DripJittered, "drip-jittered"},
    {TimeMode::DripPoisson, "drip-poisson"},
}};

constexpr std::array<std::pair<StepMode, std::string_view>, 3> kStepModes{{
    {StepMode::Fixed, "fixed"},
    {StepMode::Jittered, "jittered"},
    {StepMode::Random, "random"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [v, n] : table) {
    if (v == e) return n;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
  for (const auto& [v, n] : table) {
    if (n == s) return v;
  }
  return std::nullopt;
}

struct OffsetEvaluator {
  double elapsed;

  double operator()(const NoOffset&) const { return 0.0; }
  double operator()(const LinearRamp& f) const { return f.slope * elapsed; }
  double operator()(const Sinusoid& f) const {
    return f.amplitude * std::sin(2.0 * std::numbers::pi * elapsed / f.period);
  }
  double operator()(const RandomWalk& f) const {
    Rng walk(f.seed);
    std::uniform_int_distribution<int> step(-1, 1);
    auto n = static_cast<long>(std::floor(elapsed));
    long total = 0;
    for (long i = 0; i < n; ++i) total += step(walk);
    return static_cast<double>(total);
  }
  double operator()(const TabulatedOffset& f) const {
    const auto& k = f.knots;
    if (k.empty()) return 0.0;
    if (elapsed <= k.front().first) return k.front().second;
    if (elapsed >= k.back().first) return k.back().second;
    auto hi = std::upper_bound(k.begin(), k.end(), elapsed, [](double t, const auto& knot) { return t < knot.first; });
    auto lo = std::prev(hi);
    double w = (elapsed - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }
};

void validate_side(const std::vector<ScheduleSegment>& side, std::string_view name) {
  if (side.empty()) throw ScheduleError(fmt::format("{} schedule has no segments", name));
  for (std::size_t i = 0; i < side.size(); ++i) {
    const auto& s = side[i];
    if (!(s.t_start < s.t_end)) {
      throw ScheduleError(fmt::format("{} segment {}: start {} not before end {}", name, i, s.t_start, s.t_end));
    }
    if (s.price_lo > s.price_hi) {
      throw ScheduleError(fmt::format("{} segment {}: lo {} above hi {}", name, i, s.price_lo, s.price_hi));
    }
    if (i > 0 && side[i - 1].t_end > s.t_start) {
      throw ScheduleError(fmt::format("{} segments {} and {} overlap or are out of order", name, i - 1, i));
    }
    if (const auto* sine = std::get_if<Sinusoid>(&s.offset); sine && !(sine->period > 0.0)) {
      throw ScheduleError(fmt::format("{} segment {}: sinusoid period must be positive", name, i));
    }
    if (const auto* tab = std::get_if<TabulatedOffset>(&s.offset)) {
      for (std::size_t k = 1; k < tab->knots.size(); ++k) {
        if (!(tab->knots[k - 1].first < tab->knots[k].first)) {
          throw ScheduleError(fmt::format("{} segment {}: offset table times must increase", name, i));
        }
      }
    }
  }
}

}  // namespace

std::string_view to_string(TimeMode m) noexcept { return name_of(kTimeModes, m); }
std::string_view to_string(StepMode m) noexcept { return name_of(kStepModes, m); }
std::optional<TimeMode> parse_time_mode(std::string_view s) noexcept { return value_of(kTimeModes, s); }
std::optional<StepMode> parse_step_mode(std::string_view s) noexcept { return value_of(kStepModes, s); }

void OrderSchedule::validate() const {
  if (!(interval > 0.0)) throw ScheduleError("interval must be positive");
  validate_side(demand, "demand");
  validate_side(supply, "supply");
}

Price offset_at(const ScheduleSegment& seg, SimTime time) {
  if (!seg.covers(time)) {
    throw ScheduleError(fmt::format("time {} outside segment [{}, {})", time, seg.t_start, seg.t_end));
  }
  return round_half_up(std::visit(OffsetEvaluator{time - seg.t_start}, seg.offset));
}

const ScheduleSegment& segment_at(const std::vector<ScheduleSegment>& side, SimTime time) {
  for (const auto& s : side) {
    if (s.covers(time)) return s;
  }
  throw ScheduleError(fmt::format("no schedule segment covers time {}", time));
}

std::vector<Price> limit_prices_for_side(const ScheduleSegment& seg, std::size_t n_traders, StepMode mode, SimTime time,
                                         const PriceBand& band, Rng& rng) {
  if (n_traders == 0) throw ScheduleError("limit prices requested for zero traders");
  const Price off = offset_at(seg, time);
  const Price lo = std::max(seg.price_lo + off, band.min);
  const Price hi = std::min(seg.price_hi + off, band.max);
  if (lo > hi) {
    throw ScheduleError(fmt::format("range [{}, {}] shifted by {} leaves the price band", seg.price_lo, seg.price_hi, off));
  }

  std::vector<Price> prices(n_traders);
  const double width = static_cast<double>(hi - lo);
  const double step = n_traders > 1 ? width / static_cast<double>(n_traders - 1) : width;
  auto even = [&](std::size_t i) {
    return n_traders == 1 ? static_cast<double>(lo + hi) / 2.0 : static_cast<double>(lo) + step * static_cast<double>(i);
  };

  switch (mode) {
    case StepMode::Fixed:
      for (std::size_t i = 0; i < n_traders; ++i) prices[i] = round_half_up(even(i));
      break;
    case StepMode::Jittered: {
      std::uniform_real_distribution<double> jitter(-step / 2.0, step / 2.0);
      for (std::size_t i = 0; i < n_traders; ++i) {
        double j = step > 0.0 ? jitter(rng) : 0.0;
        prices[i] = std::clamp(round_half_up(even(i) + j), lo, hi);
      }
      break;
    }
    case StepMode::Random: {
      std::uniform_int_distribution<Price> pick(lo, hi);
      for (auto& p : prices) p = pick(rng);
      break;
    }
  }
  return prices;
}

CustomerOrderFlow::CustomerOrderFlow(OrderSchedule schedule, PriceBand band, SimTime start_time)
    : schedule_(std::move(schedule)), band_(band), start_time_(start_time) {
  schedule_.validate();
}

SimTime CustomerOrderFlow::next_drip_arrival(DripState& st, std::size_t n, Rng& rng) const {
  const double slot = schedule_.interval / static_cast<double>(n);
  const auto k = static_cast<double>(st.arrivals + 1);
  switch (schedule_.timemode) {
    case TimeMode::DripFixed:
      return start_time_ + k * slot;
    case TimeMode::DripJittered:
      return start_time_ + k * slot + std::uniform_real_distribution<double>(-slot / 2.0, slot / 2.0)(rng);
    case TimeMode::DripPoisson:
      return st.next_arrival + std::exponential_distribution<double>(1.0 / slot)(rng);
    case TimeMode::Periodic:
      break;
  }
  throw ScheduleError("drip arrival requested in periodic mode");
}

void CustomerOrderFlow::issue_side(Side side, SimTime issue_time, const std::vector<Trader*>& side_traders,
                                   std::optional<std::size_t> only, CustomerOrderBatch& out, Rng& rng) {
  if (side_traders.empty()) return;
  const auto& segs = side == Side::Bid ? schedule_.demand : schedule_.supply;
  const auto& seg = segment_at(segs, issue_time);
  auto limits = limit_prices_for_side(seg, side_traders.size(), schedule_.stepmode, issue_time, band_, rng);

  auto give = [&](std::size_t i) {
    Assignment a{next_assignment_id_++, side, limits[i], 1, issue_time};
    Trader& t = *side_traders[i];
    if (t.assign_order(a)) out.cancellations.push_back(t.tid());
    out.issued.push_back(IssuedAssignment{t.tid(), a});
  };
  if (only) {
    give(*only);
  } else {
    for (std::size_t i = 0; i < side_traders.size(); ++i) give(i);
  }
}

CustomerOrderBatch CustomerOrderFlow::customer_orders(SimTime time, const std::vector<std::unique_ptr<Trader>>& traders,
                                                      Rng& rng) {
  CustomerOrderBatch batch;
  if (time + kTimeEps < start_time_) return batch;

  const bool periodic = schedule_.timemode == TimeMode::Periodic;
  auto due = [&] {
    if (!opened_) return true;
    if (periodic) return next_period_ <= time + kTimeEps;
    return drip_[0].next_arrival <= time + kTimeEps || drip_[1].next_arrival <= time + kTimeEps;
  };
  if (!due()) return batch;

  std::vector<Trader*> sides[2];
  for (const auto& t : traders) sides[t->job() == Side::Bid ? 0 : 1].push_back(t.get());

  if (!opened_) {
    opened_ = true;
    issue_side(Side::Bid, start_time_, sides[0], std::nullopt, batch, rng);
    issue_side(Side::Ask, start_time_, sides[1], std::nullopt, batch, rng);
    if (periodic) {
      next_period_ = start_time_ + schedule_.interval;
    } else {
      for (int s = 0; s < 2; ++s) {
        drip_[s] = DripState{start_time_, 0};
        drip_[s].next_arrival = sides[s].empty() ? INFINITY : next_drip_arrival(drip_[s], sides[s].size(), rng);
      }
    }
  }

  if (periodic) {
    while (next_period_ <= time + kTimeEps) {
      issue_side(Side::Bid, next_period_, sides[0], std::nullopt, batch, rng);
      issue_side(Side::Ask, next_period_, sides[1], std::nullopt, batch, rng);
      next_period_ += schedule_.interval;
    }
    return batch;
  }

  for (int s = 0; s < 2; ++s) {
    auto& st = drip_[s];
    const std::size_t n = sides[s].size();
    while (st.next_arrival <= time + kTimeEps) {
      issue_side(s == 0 ? Side::Bid : Side::Ask, st.next_arrival, sides[s], st.arrivals % n, batch, rng);
      ++st.arrivals;
      st.next_arrival = next_drip_arrival(st, n, rng);
    }
  }
  return batch;
}

}  // namespace bse
