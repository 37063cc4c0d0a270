#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdcpp/engine.hpp"
#include "mdcpp/scenario.hpp"

namespace mdcpp {

/// Raised for anything that prevents reading or writing result files,
/// including an attempt to overwrite an existing run directory.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// <root>/<scenario>/<strategy>/seed_<seed>
std::filesystem::path run_directory(const std::filesystem::path& root, const std::string& scenario,
                                    Strategy strategy, std::uint64_t seed);

/// Writes every per-run file into `dir`. Throws OutputError if `dir`
/// already exists.
///
/// Files (tab separated, '#' comment lines first, then a column header):
///   config.json      scenario as run
///   summary.tsv      scenario strategy seed completion_time total_path_length partition_events aborted end_time
///   robots.tsv       robot path_length finish_time
///   trajectory.tsv   time robot x y
///   partitions.tsv   snapshot time cell col row owner
///   paths.tsv        time robot order cell x y
///   swd.tsv          time swd
///   traffic.tsv      time sent dropped
///   density.tsv      cell col row x y truth predicted
void write_run(const std::filesystem::path& dir, const ScenarioConfig& cfg, Strategy strategy,
               const ScenarioResult& result, const RunLog& log);

/// Fixed-format number used in every result file.
std::string format_number(double v);

inline constexpr const char* kPlotKinds[] = {"trajectories", "partitions", "swd_curve", "density_heatmaps",
                                             "summary_bars"};

/// Converts the files of a run (or batch) directory into plot-ready
/// tables under `out_dir`. Returns the files written, in order.
///
///   trajectories      trajectory_robot_<id>.tsv: time x y
///   partitions        partition_<k>.tsv: a height x width grid of owner ids, -1 for covered cells
///   swd_curve         swd_curve.tsv: time swd
///   density_heatmaps  density_truth.tsv, density_predicted.tsv: height x width grids, top row first
///   summary_bars      summary_bars.tsv: scenario strategy mean_time mean_path_length
///
/// Throws std::invalid_argument for an unknown kind (the message lists
/// the valid kinds) and OutputError when input files are missing.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& run_dir, const std::string& kind,
                                                  const std::filesystem::path& out_dir);

}  // namespace mdcpp
