#include "bse/experiment.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

namespace bse {

namespace {

void enumerate_from(std::size_t type_index, std::size_t remaining, const SweepSpec& spec,
                    std::vector<std::size_t>& counts, std::vector<TraderPopulationSpec>& out) {
  const std::size_t k = spec.trader_types.size();
  if (type_index + 1 == k) {
    if (remaining < spec.min_n) return;
    counts[type_index] = remaining;
    TraderPopulationSpec pop;
    for (std::size_t i = 0; i < k; ++i) pop.buyers.emplace_back(spec.trader_types[i], counts[i]);
    pop.sellers = pop.buyers;
    out.push_back(std::move(pop));
    return;
  }
  for (std::size_t c = spec.min_n; c <= remaining; ++c) {
    counts[type_index] = c;
    enumerate_from(type_index + 1, remaining - c, spec, counts, out);
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  return out;
}

}  // namespace

void SweepSpec::validate() const {
  if (trader_types.empty()) throw ConfigError("sweep needs at least one trader type");
  if (min_n < 1) throw ConfigError("min_n must be at least 1");
  if (n_per_side < min_n * trader_types.size()) {
    throw ConfigError(fmt::format("infeasible sweep: {} types x min {} exceeds {} per side", trader_types.size(), min_n,
                                  n_per_side));
  }
}

std::uint64_t composition_count(std::size_t n, std::size_t k, std::size_t min_n) {
  if (k == 0 || n < k * min_n) return 0;
  // C(n - k*min_n + k - 1, k - 1)
  std::uint64_t top = n - k * min_n + k - 1;
  std::uint64_t r = k - 1;
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) c = c * (top - r + i) / i;
  return c;
}

std::vector<TraderPopulationSpec> enumerate_ratio_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<TraderPopulationSpec> out;
  std::vector<std::size_t> counts(spec.trader_types.size());
  enumerate_from(0, spec.n_per_side, spec, counts, out);
  return out;
}

std::string trial_id(std::uint64_t trial_number) { return fmt::format("trial{:07d}", trial_number); }

std::string balances_filename(const SweepSpec& spec) { return fmt::format("balances_{:03d}.csv", spec.equal_ratio_n()); }

void emit_price_series(std::span<const TapeEntry> tape, std::ostream& out) {
  for (const auto& e : tape) out << fmt::format("{:.6f},{}\n", e.time, e.price);
}

void dump_session_files(const SessionStats& stats, const std::filesystem::path& out_dir, bool tape, bool prices) {
  if (tape) {
    auto f = open_output(out_dir / fmt::format("tape_{}.csv", stats.session_id));
    write_tape_csv(f, stats.tape);
  }
  if (prices) {
    auto f = open_output(out_dir / fmt::format("prices_{}.csv", stats.session_id));
    emit_price_series(stats.tape, f);
  }
}

SweepSummary run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, unsigned parallelism) {
  const auto compositions = enumerate_ratio_sweep(spec);
  std::filesystem::create_directories(out_dir);

  SweepSummary summary;
  summary.compositions = compositions.size();
  summary.sessions = compositions.size() * spec.trials_per_ratio;
  summary.balances_path = out_dir / balances_filename(spec);
  auto balances = open_output(summary.balances_path);

  const std::size_t n_jobs = summary.sessions;
  auto make_config = [&](std::size_t job) {
    SessionConfig cfg = spec.session;
    const std::uint64_t number = job + 1;
    cfg.population = compositions[job / spec.trials_per_ratio];
    cfg.seed = spec.base_seed + number;
    cfg.session_id = trial_id(number);
    return cfg;
  };

  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<std::string>> rows(n_jobs);
  std::optional<std::pair<std::size_t, std::string>> failure;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs || stop.load()) return;
      try {
        SessionStats stats = market_session(make_config(job));
        if (spec.dump_tapes || spec.dump_prices) dump_session_files(stats, out_dir, spec.dump_tapes, spec.dump_prices);
        std::string row = balances_row(stats);
        std::lock_guard lock(mu);
        rows[job] = std::move(row);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (!failure || job < failure->first) failure.emplace(job, e.what());
        stop = true;
      }
      cv.notify_one();
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(std::max<std::size_t>(n_jobs, 1))));
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);

  // Stream rows out in trial order as the prefix completes.
  std::size_t written = 0;
  {
    std::unique_lock lock(mu);
    while (written < n_jobs) {
      cv.wait(lock, [&] { return rows[written].has_value() || stop.load(); });
      if (stop && !rows[written]) break;
      while (written < n_jobs && rows[written]) {
        balances << *rows[written] << '\n';
        rows[written].reset();
        ++written;
      }
    }
  }
  pool.clear();

  if (failure) throw SweepError(trial_id(failure->first + 1), failure->second);
  balances.flush();
  if (!balances) throw std::runtime_error(fmt::format("write failed for {}", summary.balances_path.string()));
  return summary;
}

}  // namespace bse
