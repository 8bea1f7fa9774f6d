// Command-line front end: `bse session` runs one market session,
// `bse sweep` runs a trader-ratio sweep.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "bse/config.hpp"
#include "bse/experiment.hpp"
#include "bse/metrics.hpp"
#include "bse/session.hpp"

namespace {

struct ScheduleFlags {
  std::string schedule_file;
  std::string demand = "0:300:50:150";
  std::string supply = "0:300:50:150";
  std::string timemode = "periodic";
  std::string stepmode = "fixed";
  double interval = 30.0;
};

struct SessionFlags {
  double start = 0.0;
  double duration = 300.0;
  std::optional<double> timestep;
  bse::Price price_min = 1;
  bse::Price price_max = 1000;
  ScheduleFlags schedule;
};

void add_session_flags(CLI::App& cmd, SessionFlags& f) {
  cmd.add_option("--start", f.start, "Session start time (simulated seconds)")->capture_default_str();
  cmd.add_option("--duration", f.duration, "Session length (simulated seconds)")->capture_default_str();
  cmd.add_option("--timestep", f.timestep, "Loop timestep; default 1/(number of traders)");
  cmd.add_option("--price-min", f.price_min, "Lowest allowable price (pennies)")->capture_default_str();
  cmd.add_option("--price-max", f.price_max, "Highest allowable price (pennies)")->capture_default_str();
  cmd.add_option("--schedule-file", f.schedule.schedule_file, "JSON schedule; overrides the segment flags")
      ->check(CLI::ExistingFile);
  cmd.add_option("--demand", f.schedule.demand, "Demand segments FROM:TO:LO:HI[:OFFSET...],...")
      ->capture_default_str();
  cmd.add_option("--supply", f.schedule.supply, "Supply segments FROM:TO:LO:HI[:OFFSET...],...")
      ->capture_default_str();
  cmd.add_option("--timemode", f.schedule.timemode, "periodic | drip-fixed | drip-jittered | drip-poisson")
      ->capture_default_str();
  cmd.add_option("--stepmode", f.schedule.stepmode, "fixed | jittered | random")->capture_default_str();
  cmd.add_option("--interval", f.schedule.interval, "Replenishment interval (seconds)")->capture_default_str();
}

bse::OrderSchedule build_schedule(const ScheduleFlags& f) {
  if (!f.schedule_file.empty()) return bse::load_schedule_file(f.schedule_file);
  bse::OrderSchedule s;
  s.demand = bse::parse_segments(f.demand);
  s.supply = bse::parse_segments(f.supply);
  s.interval = f.interval;
  auto tm = bse::parse_time_mode(f.timemode);
  auto sm = bse::parse_step_mode(f.stepmode);
  if (!tm) throw bse::ConfigError(fmt::format("unknown timemode '{}'", f.timemode));
  if (!sm) throw bse::ConfigError(fmt::format("unknown stepmode '{}'", f.stepmode));
  s.timemode = *tm;
  s.stepmode = *sm;
  s.validate();
  return s;
}

bse::SessionConfig build_session(const SessionFlags& f) {
  bse::SessionConfig cfg;
  cfg.start_time = f.start;
  cfg.end_time = f.start + f.duration;
  cfg.timestep = f.timestep;
  cfg.band = bse::PriceBand{f.price_min, f.price_max};
  cfg.schedule = build_schedule(f.schedule);
  return cfg;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", p.string()));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit-order-book exchange simulator with robot traders"};
  app.set_config("--config", "", "TOML file mirroring the command-line flags");
  app.require_subcommand(1);
  // lets --config appear after the subcommand name too
  app.fallthrough();

  SessionFlags session_flags;
  std::string session_id = "trial0000001";
  std::string buyers = "GVWY:10,SHVR:10,ZIC:10,ZIP:10";
  std::string sellers = "GVWY:10,SHVR:10,ZIC:10,ZIP:10";
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool blotters = false;

  auto* session = app.add_subcommand("session", "Run one market session");
  add_session_flags(*session, session_flags);
  session->add_option("--id", session_id, "Session id used in output names")->capture_default_str();
  session->add_option("--buyers", buyers, "Buyer population TYPE:COUNT,...")->capture_default_str();
  session->add_option("--sellers", sellers, "Seller population TYPE:COUNT,...")->capture_default_str();
  session->add_option("--seed", seed, "RNG seed")->capture_default_str();
  session->add_option("--out", out_dir, "Output directory")->capture_default_str();
  session->add_flag("--blotters", blotters, "Also write per-trader blotters");

  SessionFlags sweep_flags;
  std::string types = "GVWY,SHVR,ZIC,ZIP";
  std::size_t n_per_side = 16;
  std::size_t min_n = 1;
  std::size_t trials = 50;
  std::uint64_t base_seed = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string sweep_out = ".";
  bool dump_tapes = false;
  bool dump_prices = false;

  auto* sweep = app.add_subcommand("sweep", "Run every trader-type ratio for a number of trials");
  add_session_flags(*sweep, sweep_flags);
  sweep->add_option("--types", types, "Trader types to mix, comma separated")->capture_default_str();
  sweep->add_option("--n-per-side", n_per_side, "Traders per side")->capture_default_str();
  sweep->add_option("--min-n", min_n, "Minimum traders of each type")->capture_default_str();
  sweep->add_option("--trials", trials, "Trials per ratio")->capture_default_str();
  sweep->add_option("--base-seed", base_seed, "Trial n uses seed base+n")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep->add_flag("--dump-tapes", dump_tapes, "Write tape_<trial>.csv per trial");
  sweep->add_flag("--dump-prices", dump_prices, "Write prices_<trial>.csv per trial");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*session) {
      bse::SessionConfig cfg = build_session(session_flags);
      cfg.session_id = session_id;
      cfg.seed = seed;
      cfg.population.buyers = bse::parse_trader_counts(buyers);
      cfg.population.sellers = bse::parse_trader_counts(sellers);
      bse::SessionOutcome outcome = bse::run_session(cfg);
      const auto& stats = outcome.stats;

      std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      open_out(dir / fmt::format("balances_{}.csv", session_id)) << bse::balances_row(stats) << '\n';
      bse::dump_session_files(stats, dir, true, true);
      if (blotters) {
        auto f = open_out(dir / fmt::format("blotters_{}.csv", session_id));
        for (const auto& t : outcome.traders) bse::write_blotter_csv(f, *t);
      }

      auto [demand, supply] = bse::limits_issued_at(stats, cfg.start_time);
      auto eq = bse::equilibrium_price(demand, supply);
      std::cout << fmt::format("{}: {} trades", stats.session_id, stats.trade_count);
      if (eq.price) {
        std::cout << fmt::format(", opening P0 {} (Q0 {})", *eq.price, eq.quantity);
        if (!stats.tape.empty()) std::cout << fmt::format(", alpha {:.2f}%", bse::smiths_alpha(stats.tape, eq.price));
      }
      std::cout << '\n' << bse::balances_row(stats) << '\n';
    } else {
      bse::SweepSpec spec;
      spec.trader_types = bse::parse_trader_types(types);
      spec.n_per_side = n_per_side;
      spec.min_n = min_n;
      spec.trials_per_ratio = trials;
      spec.base_seed = base_seed;
      spec.session = build_session(sweep_flags);
      spec.dump_tapes = dump_tapes;
      spec.dump_prices = dump_prices;
      auto summary = bse::run_sweep(spec, sweep_out, jobs);
      std::cout << fmt::format("{} compositions x {} trials = {} sessions -> {}\n", summary.compositions, trials,
                               summary.sessions, summary.balances_path.string());
    }
  } catch (const bse::SweepError& e) {
    std::cerr << "sweep failed at " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
