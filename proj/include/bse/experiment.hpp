#pragma once

// Batch harness: enumerate trader-type ratios, run many independent
// sessions (optionally on a worker pool), write CSV results in trial order.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bse/session.hpp"

namespace bse {

struct SweepSpec {
  std::vector<TraderType> trader_types;
  std::size_t n_per_side = 16;
  std::size_t min_n = 1;
  std::size_t trials_per_ratio = 50;
  std::uint64_t base_seed = 0;
  /// Shared session parameters; population, seed and id are set per trial.
  SessionConfig session;
  bool dump_tapes = false;
  bool dump_prices = false;

  void validate() const;
  std::size_t equal_ratio_n() const { return n_per_side / trader_types.size(); }
};

class SweepError : public std::runtime_error {
 public:
  SweepError(std::string trial_id, const std::string& what)
      : std::runtime_error(trial_id + ": " + what), trial_id_(std::move(trial_id)) {}
  const std::string& trial_id() const noexcept { return trial_id_; }

 private:
  std::string trial_id_;
};

/// Number of compositions of n into k parts each >= min_n.
std::uint64_t composition_count(std::size_t n, std::size_t k, std::size_t min_n);

/// Every composition in nested-loop order (first type slowest); sellers mirror buyers.
std::vector<TraderPopulationSpec> enumerate_ratio_sweep(const SweepSpec& spec);

std::string trial_id(std::uint64_t trial_number);

std::string balances_filename(const SweepSpec& spec);

struct SweepSummary {
  std::size_t compositions = 0;
  std::size_t sessions = 0;
  std::filesystem::path balances_path;
};

/// Runs every (composition, trial) with seed base_seed + trial_number and
/// writes one balances row per trial, in trial-number order, whatever the
/// parallelism. Throws SweepError naming the first failing trial.
SweepSummary run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, unsigned parallelism);

/// One `<time>,<price>` row per trade.
void emit_price_series(std::span<const TapeEntry> tape, std::ostream& out);

/// Writes tape_<id>.csv and/or prices_<id>.csv for one finished session.
void dump_session_files(const SessionStats& stats, const std::filesystem::path& out_dir, bool tape, bool prices);

}  // namespace bse
