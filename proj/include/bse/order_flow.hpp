#pragma once

// Customer order generation: limit prices come from piecewise supply and
// demand schedules, arrival times from periodic or drip-feed processes.

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bse/traders.hpp"
#include "bse/types.hpp"

namespace bse {

struct NoOffset {};

/// slope pennies per second, measured from the segment start.
struct LinearRamp {
  double slope = 0.0;
};

struct Sinusoid {
  double amplitude = 0.0;
  double period = 1.0;
};

/// One step of -1, 0 or +1 pennies per elapsed second, reproducible from the seed.
struct RandomWalk {
  std::uint64_t seed = 0;
};

/// (seconds since segment start, offset) knots, linearly interpolated and
/// held flat outside the first and last knot.
struct TabulatedOffset {
  std::vector<std::pair<double, double>> knots;
};

using OffsetFunction = std::variant<NoOffset, LinearRamp, Sinusoid, RandomWalk, TabulatedOffset>;

struct ScheduleSegment {
  SimTime t_start = 0.0;
  SimTime t_end = 0.0;
  Price price_lo = 0;
  Price price_hi = 0;
  OffsetFunction offset = NoOffset{};

  bool covers(SimTime t) const noexcept { return t >= t_start && t < t_end; }
};

enum class TimeMode : std::uint8_t { Periodic, DripFixed, DripJittered, DripPoisson };
enum class StepMode : std::uint8_t { Fixed, Jittered, Random };

std::string_view to_string(TimeMode m) noexcept;
std::string_view to_string(StepMode m) noexcept;
std::optional<TimeMode> parse_time_mode(std::string_view s) noexcept;
std::optional<StepMode> parse_step_mode(std::string_view s) noexcept;

struct OrderSchedule {
  std::vector<ScheduleSegment> demand;
  std::vector<ScheduleSegment> supply;
  SimTime interval = 30.0;
  TimeMode timemode = TimeMode::Periodic;
  StepMode stepmode = StepMode::Fixed;

  /// Throws ScheduleError on a malformed schedule.
  void validate() const;
};

/// Signed penny offset of the segment's range at `time`.
Price offset_at(const ScheduleSegment& seg, SimTime time);

/// The unique segment containing `time`; throws ScheduleError if none does.
const ScheduleSegment& segment_at(const std::vector<ScheduleSegment>& side, SimTime time);

/// n_traders limit prices from the segment's (offset-shifted) range.
/// Position i belongs to the side's i-th trader.
std::vector<Price> limit_prices_for_side(const ScheduleSegment& seg, std::size_t n_traders, StepMode mode, SimTime time,
                                         const PriceBand& band, Rng& rng);

struct IssuedAssignment {
  TraderId tid;
  Assignment assignment;
};

struct CustomerOrderBatch {
  std::vector<IssuedAssignment> issued;
  /// Traders whose resting exchange order belongs to a replaced assignment.
  std::vector<TraderId> cancellations;
};

/// Stateful customer-order source for one session.
class CustomerOrderFlow {
 public:
  CustomerOrderFlow(OrderSchedule schedule, PriceBand band, SimTime start_time);

  const OrderSchedule& schedule() const noexcept { return schedule_; }

  /// Issues every assignment due at or before `time` to the matching traders.
  CustomerOrderBatch customer_orders(SimTime time, const std::vector<std::unique_ptr<Trader>>& traders, Rng& rng);

 private:
  struct DripState {
    SimTime next_arrival = 0.0;
    std::uint64_t arrivals = 0;
  };

  void issue_side(Side side, SimTime issue_time, const std::vector<Trader*>& side_traders,
                  std::optional<std::size_t> only, CustomerOrderBatch& out, Rng& rng);
  SimTime next_drip_arrival(DripState& st, std::size_t n, Rng& rng) const;

  OrderSchedule schedule_;
  PriceBand band_;
  SimTime start_time_;
  bool opened_ = false;
  SimTime next_period_ = 0.0;
  DripState drip_[2];
  std::uint64_t next_assignment_id_ = 1;
};

}  // namespace bse
