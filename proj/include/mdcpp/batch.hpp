#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdcpp/engine.hpp"
#include "mdcpp/scenario.hpp"

namespace mdcpp {

struct BatchRow {
  std::string scenario;
  Strategy strategy = Strategy::Mdcpp;
  std::uint64_t seed = 0;
  double completion_time = 0.0;
  double total_path_length = 0.0;
  int partition_events = 0;
  bool aborted = false;
};

struct AggregateRow {
  std::string scenario;
  Strategy strategy = Strategy::Mdcpp;
  int runs = 0;
  int aborted = 0;
  double mean_time = 0.0;
  double stddev_time = 0.0;
  double mean_path_length = 0.0;
  double stddev_path_length = 0.0;
};

struct BatchSummary {
  /// One row per (config, strategy, seed), in that nesting order.
  std::vector<BatchRow> rows;
  /// One row per (config, strategy).
  std::vector<AggregateRow> aggregates;

  bool any_aborted() const;
};

struct BatchOptions {
  std::vector<Strategy> strategies = {Strategy::Mdcpp, Strategy::DynamicNoPrediction, Strategy::Sweeping};
  int repeats = 5;
  std::uint64_t seed_base = 1;
  /// When set, every run is written below this root (see write_run) and
  /// the batch tables go to <root>/batch_rows.tsv and batch_aggregate.tsv.
  std::optional<std::filesystem::path> out_root;
  /// Worker threads; results do not depend on this.
  int jobs = 1;
};

/// Runs every config x strategy x seed_base + r. Aborted runs are
/// reported in their row and the batch carries on. Sample stddev (n - 1);
/// 0 for a single run.
BatchSummary run_batch(const std::vector<ScenarioConfig>& configs, const BatchOptions& options);

void write_batch_tables(const std::filesystem::path& root, const BatchSummary& summary);

}  // namespace mdcpp
