#include <array>
#include <cmath>
#include <sstream>

#include "bse/traders.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bse;

namespace {

Assignment buy(Price limit, std::uint64_t id = 1) { return Assignment{id, Side::Bid, limit, 1, 0.0}; }
Assignment sell(Price limit, std::uint64_t id = 1) { return Assignment{id, Side::Ask, limit, 1, 0.0}; }

PublishedLOB xyz_lob() {
  Exchange ex;
  testing::build_xyz_book(ex);
  return ex.publish_lob(0);
}

PublishedLOB empty_lob(const PriceBand& band = {}) { return Exchange(band).publish_lob(0); }

Trade trade_between(const TraderId& standing, const TraderId& crossing, Side crossing_side, Price price) {
  return Trade{10.0, price, 1, standing, crossing, crossing_side};
}

// Random book with a handful of levels on each side, uncrossed.
PublishedLOB random_lob(Rng& rng, const PriceBand& band) {
  Exchange ex(band);
  std::uniform_int_distribution<int> n(0, 6);
  std::uniform_int_distribution<Price> mid(band.min + 1, band.max - 1);
  const Price m = mid(rng);
  int id = 0;
  for (int i = n(rng); i > 0; --i) {
    TraderId t = "b" + std::to_string(id++);
    ex.register_trader(t);
    ex.submit_order(0, {t, Side::Bid, std::uniform_int_distribution<Price>(band.min, m)(rng), 1, 0});
  }
  for (int i = n(rng); i > 0; --i) {
    TraderId t = "a" + std::to_string(id++);
    ex.register_trader(t);
    auto bb = ex.best_bid();
    ex.submit_order(0, {t, Side::Ask, std::uniform_int_distribution<Price>(bb ? *bb + 1 : m, band.max)(rng), 1, 0});
  }
  return ex.publish_lob(0);
}

}  // namespace

TEST_CASE("trader type names round-trip") {
  for (auto t : {TraderType::GVWY, TraderType::ZIC, TraderType::SHVR, TraderType::SNPR, TraderType::ZIP}) {
    CHECK(parse_trader_type(to_string(t)) == t);
  }
  CHECK_FALSE(parse_trader_type("AA"));
}

TEST_CASE("assign_order") {
  Giveaway g("B00", Side::Bid, PriceBand{});
  SUBCASE("fresh trader") {
    CHECK_FALSE(g.assign_order(buy(150)));
    CHECK(g.assignment()->limit == 150);
  }
  SUBCASE("replacing an assignment with a live order asks for a cancel") {
    Giveaway s("S00", Side::Ask, PriceBand{});
    s.assign_order(sell(200, 1));
    s.mark_live_order(true);
    CHECK(s.assign_order(sell(180, 2)));
    CHECK(s.assignment()->limit == 180);
    CHECK_FALSE(s.has_live_order());
  }
  SUBCASE("re-issue replaces with a new id") {
    g.assign_order(buy(150, 7));
    CHECK_FALSE(g.assign_order(buy(150, 8)));
    CHECK(g.assignment()->id == 8);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(g.assign_order(buy(0)), TraderError);
    CHECK_THROWS_AS(g.assign_order(buy(1001)), TraderError);
    CHECK_THROWS_AS(g.assign_order(sell(100)), TraderError);
  }
}

TEST_CASE("getorder examples") {
  Rng rng(1);
  const PriceBand band{};
  SUBCASE("no assignment, no quote") {
    Giveaway g("B00", Side::Bid, band);
    CHECK_FALSE(g.getorder(0, 1.0, xyz_lob(), rng));
  }
  SUBCASE("GVWY quotes its limit") {
    Giveaway g("B00", Side::Bid, band);
    g.assign_order(buy(152));
    auto o = g.getorder(3, 0.5, xyz_lob(), rng);
    REQUIRE(o);
    CHECK(o->price == 152);
    CHECK(o->side == Side::Bid);
    CHECK(o->qty == 1);
    CHECK(o->tid == "B00");
    CHECK(o->time == 3.0);
    CHECK(g.n_quotes() == 1);
  }
  SUBCASE("SHVR seller undercuts the best ask by a penny") {
    Shaver s("S00", Side::Ask, band);
    s.assign_order(sell(140));
    CHECK(s.getorder(0, 1.0, xyz_lob(), rng)->price == 154);
  }
  SUBCASE("SHVR buyer capped at its limit") {
    Shaver s("B00", Side::Bid, band);
    s.assign_order(buy(152));
    CHECK(s.getorder(0, 1.0, xyz_lob(), rng)->price == 152);
  }
  SUBCASE("SHVR stub quotes on an empty side") {
    Shaver b("B00", Side::Bid, band);
    b.assign_order(buy(90));
    CHECK(b.getorder(0, 1.0, empty_lob(), rng)->price == band.min);
    Shaver s("S00", Side::Ask, band);
    s.assign_order(sell(90));
    CHECK(s.getorder(0, 1.0, empty_lob(), rng)->price == band.max);
  }
  SUBCASE("ZIC with the limit at the band floor") {
    ZeroIntelligenceConstrained z("B00", Side::Bid, band);
    z.assign_order(buy(band.min));
    for (int i = 0; i < 10; ++i) CHECK(z.getorder(0, 1.0, xyz_lob(), rng)->price == band.min);
  }
  SUBCASE("SNPR lurks at half time") {
    Sniper s("B00", Side::Bid, band);
    s.assign_order(buy(200));
    CHECK_FALSE(s.getorder(0, 0.5, xyz_lob(), rng));
    CHECK(s.n_quotes() == 0);
  }
  SUBCASE("SNPR shaves more as the close nears") {
    Sniper s("B00", Side::Bid, band);
    s.assign_order(buy(200));
    CHECK(s.getorder(0, 0.25, xyz_lob(), rng)->price == 153);
    CHECK(s.getorder(0, 0.10, xyz_lob(), rng)->price == 154);
    CHECK(s.getorder(0, 0.01, xyz_lob(), rng)->price == 155);
    CHECK(s.getorder(0, 0.0, xyz_lob(), rng)->price == 156);
  }
}

TEST_CASE("sniper shave schedule") {
  CHECK(Sniper::shave_amount(0.25) == 1);
  CHECK(Sniper::shave_amount(0.20) == 1);
  CHECK(Sniper::shave_amount(1.0 / 6.0) == 2);
  CHECK(Sniper::shave_amount(0.10) == 2);
  CHECK(Sniper::shave_amount(0.05) == 3);
  CHECK(Sniper::shave_amount(0.0) == 4);
  Price prev = 0;
  for (int i = 250; i >= 0; --i) {
    Price s = Sniper::shave_amount(i / 1000.0);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("SNPR is silent whenever time remaining exceeds the threshold") {
  Rng rng(5);
  const PriceBand band{};
  Sniper b("B00", Side::Bid, band), s("S00", Side::Ask, band);
  std::uniform_real_distribution<double> tl(Sniper::kLurkThreshold, 1.0);
  std::uniform_int_distribution<Price> lim(band.min, band.max);
  for (int i = 0; i < 2000; ++i) {
    b.assign_order(buy(lim(rng)));
    s.assign_order(sell(lim(rng)));
    double t = std::nextafter(tl(rng), 2.0);
    auto lob = random_lob(rng, band);
    REQUIRE_FALSE(b.getorder(0, t, lob, rng));
    REQUIRE_FALSE(s.getorder(0, t, lob, rng));
  }
}

TEST_CASE("quotes never go through the limit") {
  Rng rng(2024);
  const PriceBand band{1, 400};
  const std::array types{TraderType::GVWY, TraderType::ZIC, TraderType::SHVR, TraderType::SNPR, TraderType::ZIP};
  std::uniform_int_distribution<Price> lim(band.min, band.max);
  std::uniform_real_distribution<double> tl(0.0, 1.0);
  for (auto type : types) {
    CAPTURE(to_string(type));
    for (Side job : {Side::Bid, Side::Ask}) {
      auto trader = make_trader(type, "X", job, band, rng);
      int quotes = 0;
      for (int i = 0; i < 10000; ++i) {
        trader->assign_order(Assignment{static_cast<std::uint64_t>(i), job, lim(rng), 1, 0.0});
        auto lob = random_lob(rng, band);
        auto o = trader->getorder(0, tl(rng), lob, rng);
        if (!o) continue;
        ++quotes;
        const Price limit = trader->assignment()->limit;
        REQUIRE(band.contains(o->price));
        if (job == Side::Bid) REQUIRE(o->price <= limit);
        if (job == Side::Ask) REQUIRE(o->price >= limit);
        if (type == TraderType::ZIP) {
          // Exercise adaptation between quotes.
          MarketEvent ev{0, o->side, o->price, std::nullopt};
          trader->respond(0, lob, ev, rng);
        }
      }
      CHECK(quotes > 0);
    }
  }
}

TEST_CASE("ZIC quotes are uniform over the budget-constrained range") {
  Rng rng(77);
  const PriceBand band{1, 1000};
  ZeroIntelligenceConstrained z("B00", Side::Bid, band);
  z.assign_order(buy(20));
  std::array<int, 20> counts{};
  const int draws = 10000;
  auto lob = empty_lob(band);
  for (int i = 0; i < draws; ++i) {
    Price p = z.getorder(0, 1.0, lob, rng)->price;
    REQUIRE(p >= 1);
    REQUIRE(p <= 20);
    ++counts[static_cast<std::size_t>(p - 1)];
  }
  const double expected = draws / 20.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99th percentile of chi-square with 19 degrees of freedom.
  CHECK(chi2 < 36.191);

  ZeroIntelligenceConstrained s("S00", Side::Ask, band);
  s.assign_order(sell(991));
  std::array<int, 10> sc{};
  for (int i = 0; i < draws; ++i) ++sc[static_cast<std::size_t>(s.getorder(0, 1.0, lob, rng)->price - 991)];
  double chi2s = 0.0;
  for (int c : sc) chi2s += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
  CHECK(chi2s < 21.666);  // df = 9
}

TEST_CASE("ZIP seller raises its margin after a trade above its quote") {
  Rng rng(9);
  ZeroIntelligencePlus z("S00", Side::Ask, PriceBand{}, ZipState{0.10, 0.3, 0.05, 0.0, {}});
  z.assign_order(sell(100));
  CHECK(z.getorder(0, 1.0, empty_lob(), rng)->price == 110);
  MarketEvent ev{1.0, Side::Bid, 125, trade_between("S01", "B00", Side::Bid, 120)};
  z.respond(1.0, empty_lob(), ev, rng);
  // target in [120, 131]; step 0.95 * 0.3 * (target - 110) lands the quote in [112.85, 115.985].
  CHECK(z.raw_quote() >= 112.85 - 1e-9);
  CHECK(z.raw_quote() <= 115.985 + 1e-9);
  Price next = z.getorder(1, 1.0, empty_lob(), rng)->price;
  CHECK(next > 110);
  CHECK(z.state().margin > 0.10);
}

TEST_CASE("ZIP buyer raises its bid after an untraded higher bid") {
  Rng rng(10);
  ZeroIntelligencePlus z("B00", Side::Bid, PriceBand{}, ZipState{130.0 / 150.0 - 1.0, 0.3, 0.05, 0.0, {}});
  z.assign_order(buy(150));
  CHECK(z.getorder(0, 1.0, empty_lob(), rng)->price == 130);
  MarketEvent ev{1.0, Side::Bid, 135, std::nullopt};
  z.respond(1.0, empty_lob(), ev, rng);
  CHECK(z.raw_quote() >= 131.425 - 1e-9);
  CHECK(z.raw_quote() <= 134.77 + 1e-9);
  Price next = z.getorder(1, 1.0, empty_lob(), rng)->price;
  CHECK(next >= 130);
  CHECK(next <= 150);
}

TEST_CASE("ZIP seller lowers its margin when a bid below its quote is hit") {
  Rng rng(11);
  ZeroIntelligencePlus z("S00", Side::Ask, PriceBand{}, ZipState{0.30, 0.3, 0.0, 0.0, {}});
  z.assign_order(sell(100));
  // A seller hit a resting bid at 115; our ask at 130 would have missed.
  MarketEvent ev{1.0, Side::Ask, 110, trade_between("B03", "S07", Side::Ask, 115)};
  z.respond(1.0, empty_lob(), ev, rng);
  CHECK(z.raw_quote() < 130.0);
  CHECK(z.state().margin >= 0.0);
}

TEST_CASE("ZIP margins keep their sign under random events") {
  Rng rng(31337);
  const PriceBand band{1, 500};
  std::uniform_int_distribution<Price> px(band.min, band.max);
  std::uniform_int_distribution<int> coin(0, 1);
  for (Side job : {Side::Bid, Side::Ask}) {
    auto zs = ZipState::random_init(job, rng);
    ZeroIntelligencePlus z("Z", job, band, zs);
    for (int i = 0; i < 20000; ++i) {
      if (i % 50 == 0) z.assign_order(Assignment{static_cast<std::uint64_t>(i), job, px(rng), 1, 0.0});
      Side qs = coin(rng) ? Side::Bid : Side::Ask;
      std::optional<Trade> tr;
      if (coin(rng)) tr = trade_between("P", "Q", qs, px(rng));
      z.respond(0, empty_lob(band), MarketEvent{0, qs, px(rng), tr}, rng);
      if (job == Side::Bid) {
        REQUIRE(z.state().margin <= 0.0);
        REQUIRE(z.state().margin >= -1.0);
      } else {
        REQUIRE(z.state().margin >= 0.0);
      }
    }
  }
}

TEST_CASE("ZIP initial state ranges") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto b = ZipState::random_init(Side::Bid, rng);
    auto s = ZipState::random_init(Side::Ask, rng);
    CHECK(b.margin <= -0.05);
    CHECK(b.margin >= -0.35);
    CHECK(s.margin >= 0.05);
    CHECK(s.margin <= 0.35);
    CHECK(s.beta >= 0.1);
    CHECK(s.beta <= 0.5);
    CHECK(s.gamma >= 0.0);
    CHECK(s.gamma <= 0.1);
    CHECK(s.prev_change == 0.0);
  }
}

TEST_CASE("non-ZIP respond is a no-op") {
  Rng rng(1);
  Giveaway g("B00", Side::Bid, PriceBand{});
  g.assign_order(buy(100));
  g.respond(1, xyz_lob(), MarketEvent{1, Side::Bid, 99, trade_between("B00", "S00", Side::Ask, 99)}, rng);
  CHECK(g.assignment()->limit == 100);
  CHECK(g.balance() == 0);
  CHECK(g.blotter().empty());
}

TEST_CASE("bookkeep") {
  const PriceBand wide{1, 5000};
  SUBCASE("seller at a 5% margin") {
    Giveaway s("S00", Side::Ask, wide);
    s.assign_order(sell(1000, 4));
    CHECK(s.bookkeep(trade_between("S00", "B00", Side::Bid, 1050), 10) == 50);
    CHECK(s.balance() == 50);
    REQUIRE(s.blotter().size() == 1);
    CHECK(s.blotter()[0].role == TradeRole::Standing);
    CHECK(s.blotter()[0].assignment_id == 4);
    CHECK_FALSE(s.assignment());
  }
  SUBCASE("buyer keeps the difference") {
    Giveaway b("B00", Side::Bid, wide);
    b.assign_order(buy(1500));
    CHECK(b.bookkeep(trade_between("S00", "B00", Side::Bid, 1300), 10) == 200);
    CHECK(b.blotter()[0].role == TradeRole::Crossing);
  }
  SUBCASE("GVWY filled at its own limit earns nothing") {
    Rng rng(0);
    Giveaway b("B00", Side::Bid, wide);
    b.assign_order(buy(120));
    Price p = b.getorder(0, 1, empty_lob(wide), rng)->price;
    CHECK(b.bookkeep(trade_between("B00", "S00", Side::Ask, p), 10) == 0);
  }
  SUBCASE("errors") {
    Giveaway b("B00", Side::Bid, wide);
    b.assign_order(buy(100));
    CHECK_THROWS_AS(b.bookkeep(trade_between("S00", "B01", Side::Bid, 90), 1), TraderError);
    Giveaway idle("B02", Side::Bid, wide);
    CHECK_THROWS_AS(idle.bookkeep(trade_between("S00", "B02", Side::Bid, 90), 1), TraderError);
  }
}

TEST_CASE("blotter export") {
  Giveaway s("S03", Side::Ask, PriceBand{});
  s.assign_order(sell(100, 12));
  s.bookkeep(trade_between("B01", "S03", Side::Ask, 104), 17.5);
  std::ostringstream out;
  write_blotter_csv(out, s);
  CHECK(out.str() == "S03,17.500000,104,12,4\n");
}
