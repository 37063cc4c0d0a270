#include "mdcpp/batch.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "mdcpp/output.hpp"

namespace mdcpp {

namespace {

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace

bool BatchSummary::any_aborted() const {
  for (const auto& r : rows) {
    if (r.aborted) return true;
  }
  return false;
}

BatchSummary run_batch(const std::vector<ScenarioConfig>& configs, const BatchOptions& options) {
  if (options.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (options.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (options.strategies.empty()) throw std::invalid_argument("no strategies selected");

  struct Job {
    const ScenarioConfig* cfg;
    Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& cfg : configs) {
    for (auto s : options.strategies) {
      for (int r = 0; r < options.repeats; ++r) jobs.push_back({&cfg, s, options.seed_base + static_cast<std::uint64_t>(r)});
    }
  }

  BatchSummary summary;
  summary.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        ScenarioConfig cfg = *jobs[i].cfg;
        cfg.seed = jobs[i].seed;
        RunLog log;
        const auto res = run(cfg, jobs[i].strategy, options.out_root ? &log : nullptr);
        if (options.out_root) {
          write_run(run_directory(*options.out_root, cfg.name, jobs[i].strategy, cfg.seed), cfg, jobs[i].strategy,
                    res, log);
        }
        summary.rows[i] = {cfg.name, jobs[i].strategy, cfg.seed, res.completion_time, res.total_path_length,
                           res.partition_events, res.aborted};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const int n_threads = std::min<int>(options.jobs, static_cast<int>(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const auto per_group = static_cast<std::size_t>(options.repeats);
  for (std::size_t g = 0; g < summary.rows.size(); g += per_group) {
    std::vector<double> times;
    std::vector<double> lengths;
    AggregateRow agg;
    agg.scenario = summary.rows[g].scenario;
    agg.strategy = summary.rows[g].strategy;
    for (std::size_t i = g; i < g + per_group; ++i) {
      const auto& r = summary.rows[i];
      ++agg.runs;
      if (r.aborted) {
        ++agg.aborted;
        continue;
      }
      times.push_back(r.completion_time);
      lengths.push_back(r.total_path_length);
    }
    std::tie(agg.mean_time, agg.stddev_time) = mean_stddev(times);
    std::tie(agg.mean_path_length, agg.stddev_path_length) = mean_stddev(lengths);
    summary.aggregates.push_back(agg);
  }

  if (options.out_root) write_batch_tables(*options.out_root, summary);
  return summary;
}

void write_batch_tables(const std::filesystem::path& root, const BatchSummary& summary) {
  std::filesystem::create_directories(root);
  for (const char* name : {"batch_rows.tsv", "batch_aggregate.tsv"}) {
    if (std::filesystem::exists(root / name)) {
      throw OutputError("refusing to overwrite " + (root / name).string());
    }
  }
  {
    std::ofstream out(root / "batch_rows.tsv", std::ios::binary);
    out << "# one row per run; aborted runs hit the max_sim_time watchdog\n"
        << "scenario\tstrategy\tseed\tcompletion_time\ttotal_path_length\tpartition_events\taborted\n";
    for (const auto& r : summary.rows) {
      out << r.scenario << '\t' << to_string(r.strategy) << '\t' << r.seed << '\t' << format_number(r.completion_time)
          << '\t' << format_number(r.total_path_length) << '\t' << r.partition_events << '\t' << (r.aborted ? 1 : 0)
          << '\n';
    }
  }
  {
    std::ofstream out(root / "batch_aggregate.tsv", std::ios::binary);
    out << "# mean and sample stddev over completed runs\n"
        << "scenario\tstrategy\truns\taborted\tmean_time\tstddev_time\tmean_path_length\tstddev_path_length\n";
    for (const auto& a : summary.aggregates) {
      out << a.scenario << '\t' << to_string(a.strategy) << '\t' << a.runs << '\t' << a.aborted << '\t'
          << format_number(a.mean_time) << '\t' << format_number(a.stddev_time) << '\t'
          << format_number(a.mean_path_length) << '\t' << format_number(a.stddev_path_length) << '\n';
    }
  }
}

}  // namespace mdcpp
