#include "bse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bse {

namespace {

struct Curves {
  std::vector<Price> demand;  // descending
  std::vector<Price> supply;  // ascending
  std::size_t q0 = 0;
};

Curves stepped_curves(std::span<const Price> buyer_limits, std::span<const Price> seller_limits) {
  Curves c{{buyer_limits.begin(), buyer_limits.end()}, {seller_limits.begin(), seller_limits.end()}, 0};
  std::sort(c.demand.begin(), c.demand.end(), std::greater<>());
  std::sort(c.supply.begin(), c.supply.end());
  const std::size_t n = std::min(c.demand.size(), c.supply.size());
  // D is non-increasing and S non-decreasing, so the crossing set is a prefix.
  while (c.q0 < n && c.demand[c.q0] >= c.supply[c.q0]) ++c.q0;
  return c;
}

}  // namespace

Equilibrium equilibrium_price(std::span<const Price> buyer_limits, std::span<const Price> seller_limits) {
  Curves c = stepped_curves(buyer_limits, seller_limits);
  Equilibrium eq{std::nullopt, c.q0};
  if (c.q0 > 0) {
    eq.price = round_half_up(static_cast<double>(c.demand[c.q0 - 1] + c.supply[c.q0 - 1]) / 2.0);
  }
  return eq;
}

double smiths_alpha(std::span<const TapeEntry> tape, std::optional<Price> p0) {
  if (tape.empty()) throw MetricError("Smith's alpha needs at least one trade");
  if (!p0) throw MetricError("Smith's alpha needs a defined equilibrium price");
  if (*p0 == 0) throw MetricError("Smith's alpha is undefined for a zero equilibrium price");
  double sum_sq = 0.0;
  for (const auto& e : tape) {
    double d = static_cast<double>(e.price - *p0);
    sum_sq += d * d;
  }
  return 100.0 * std::sqrt(sum_sq / static_cast<double>(tape.size())) / static_cast<double>(*p0);
}

Price max_surplus(std::span<const Price> buyer_limits, std::span<const Price> seller_limits) {
  Curves c = stepped_curves(buyer_limits, seller_limits);
  Price total = 0;
  for (std::size_t q = 0; q < c.q0; ++q) total += c.demand[q] - c.supply[q];
  return total;
}

double allocative_efficiency(std::span<const ExecutedTrade> trades, std::span<const Price> buyer_limits,
                             std::span<const Price> seller_limits) {
  const Price best = max_surplus(buyer_limits, seller_limits);
  if (best == 0) throw MetricError("maximum surplus is zero; efficiency is undefined");
  Price realized = 0;
  for (const auto& t : trades) realized += t.buyer_limit - t.seller_limit;
  return static_cast<double>(realized) / static_cast<double>(best);
}

}  // namespace bse
