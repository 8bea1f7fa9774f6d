#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bse/exchange.hpp"
#include "bse/types.hpp"

namespace bse {

/// A trade together with the customer limits of both counterparties.
struct ExecutedTrade {
  SimTime time = 0.0;
  Price price = 0;
  TraderId buyer;
  TraderId seller;
  Price buyer_limit = 0;
  Price seller_limit = 0;
};

struct Equilibrium {
  std::optional<Price> price;  // undefined when the curves never cross
  std::size_t quantity = 0;
};

/// Intersection of the stepped demand (limits descending) and supply
/// (limits ascending) curves. The price is the midpoint of the marginal
/// pair, rounded half-up.
Equilibrium equilibrium_price(std::span<const Price> buyer_limits, std::span<const Price> seller_limits);

/// RMS deviation of trade prices from p0, as a percentage of p0.
double smiths_alpha(std::span<const TapeEntry> tape, std::optional<Price> p0);

/// Largest total surplus the limits admit: the sum of D(q) - S(q) up to the equilibrium quantity.
Price max_surplus(std::span<const Price> buyer_limits, std::span<const Price> seller_limits);

/// Realized surplus over max_surplus. Extramarginal trades are reported as-is.
double allocative_efficiency(std::span<const ExecutedTrade> trades, std::span<const Price> buyer_limits,
                             std::span<const Price> seller_limits);

}  // namespace bse
