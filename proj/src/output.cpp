#include "mdcpp/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mdcpp {

namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

class TsvWriter {
 public:
  TsvWriter(const fs::path& path, const std::string& comment, const std::vector<std::string>& columns)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw OutputError("cannot write " + path.string());
    out_ << "# " << comment << '\n';
    row(columns);
  }

  template <typename... Ts>
  void line(const Ts&... values) {
    std::vector<std::string> cells;
    (cells.push_back(cell(values)), ...);
    row(cells);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "\t" : "") << cells[i];
    out_ << '\n';
    if (!out_) throw OutputError("write failed for " + path_.string());
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  template <typename T>
    requires std::is_integral_v<T>
  static std::string cell(T v) {
    return std::to_string(v);
  }

  std::ofstream out_;
  fs::path path_;
};

// Rows of a result file, keyed by the column header.
struct TsvFile {
  std::vector<std::string> columns;
  Table rows;

  std::size_t col(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw OutputError("missing column " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, '\t')) out.push_back(item);
  return out;
}

TsvFile read_tsv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot read " + path.string());
  TsvFile f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (f.columns.empty()) {
      f.columns = split_tabs(line);
    } else {
      f.rows.push_back(split_tabs(line));
    }
  }
  if (f.columns.empty()) throw OutputError("no header in " + path.string());
  return f;
}

double num(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw OutputError("not a number: '" + s + "'");
  }
}

void write_grid(const fs::path& path, const std::string& comment, int width, int height,
                const std::vector<std::string>& values) {
  std::vector<std::string> columns;
  for (int c = 0; c < width; ++c) columns.push_back("col" + std::to_string(c));
  TsvWriter w(path, comment + "; one line per row, top row first", columns);
  for (int row = height - 1; row >= 0; --row) {
    std::vector<std::string> cells(values.begin() + static_cast<std::ptrdiff_t>(row) * width,
                                   values.begin() + static_cast<std::ptrdiff_t>(row + 1) * width);
    w.row(cells);
  }
}

std::pair<int, int> grid_shape(const TsvFile& density) {
  int w = 0;
  int h = 0;
  for (const auto& r : density.rows) {
    w = std::max(w, static_cast<int>(num(r[density.col("col")])) + 1);
    h = std::max(h, static_cast<int>(num(r[density.col("row")])) + 1);
  }
  return {w, h};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

fs::path run_directory(const fs::path& root, const std::string& scenario, Strategy strategy, std::uint64_t seed) {
  return root / scenario / to_string(strategy) / ("seed_" + std::to_string(seed));
}

void write_run(const fs::path& dir, const ScenarioConfig& cfg, Strategy strategy, const ScenarioResult& result,
               const RunLog& log) {
  if (fs::exists(dir)) throw OutputError("refusing to overwrite existing run directory " + dir.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());

  {
    std::ofstream out(dir / "config.json", std::ios::binary);
    out << serialize_scenario(cfg);
  }
  {
    TsvWriter w(dir / "summary.tsv", "run summary; times in s, lengths in m",
                {"scenario", "strategy", "seed", "completion_time", "total_path_length", "partition_events",
                 "aborted", "end_time"});
    w.line(cfg.name, to_string(strategy), cfg.seed, result.completion_time, result.total_path_length,
           result.partition_events, result.aborted, result.end_time);
  }
  {
    TsvWriter w(dir / "robots.tsv", "per-robot totals", {"robot", "path_length", "finish_time"});
    for (const auto& [id, len] : result.per_robot_path_length) w.line(id, len, result.per_robot_finish_time.at(id));
  }
  {
    TsvWriter w(dir / "trajectory.tsv", "robot positions at cell centroids and goals", {"time", "robot", "x", "y"});
    for (const auto& p : log.trajectory) w.line(p.time, p.robot, p.at.x, p.at.y);
  }
  const GridSpec& grid = cfg.grid;
  {
    TsvWriter w(dir / "partitions.tsv", "owner of every uncovered cell at each partition event",
                {"snapshot", "time", "cell", "col", "row", "owner"});
    for (std::size_t k = 0; k < log.partitions.size(); ++k) {
      for (const auto& [cell, owner] : log.partitions[k].owner) {
        w.line(k, log.partitions[k].time, cell, grid.col(cell), grid.row(cell), owner);
      }
    }
  }
  {
    TsvWriter w(dir / "paths.tsv", "planned coverage paths", {"time", "robot", "order", "cell", "x", "y"});
    for (const auto& rec : log.paths) {
      for (std::size_t i = 0; i < rec.waypoints.size(); ++i) {
        w.line(rec.time, rec.robot, i, rec.waypoints[i].cell, rec.waypoints[i].at.x, rec.waypoints[i].at.y);
      }
    }
  }
  {
    TsvWriter w(dir / "swd.tsv", "sliced Wasserstein distance between predicted and true density", {"time", "swd"});
    for (const auto& s : result.swd_series) w.line(s.time, s.value);
  }
  {
    TsvWriter w(dir / "traffic.tsv", "cumulative message counts per partition event", {"time", "sent", "dropped"});
    for (const auto& t : log.traffic) w.line(t.time, t.sent, t.dropped);
  }
  {
    TsvWriter w(dir / "density.tsv", "true and final predicted density per cell",
                {"cell", "col", "row", "x", "y", "truth", "predicted"});
    for (std::size_t c = 0; c < log.truth_density.size(); ++c) {
      const Point p = grid.centroid(c);
      const double pred = c < log.predicted_density.size() ? log.predicted_density[c] : 0.0;
      w.line(c, grid.col(c), grid.row(c), p.x, p.y, log.truth_density[c], pred);
    }
  }
}

std::vector<fs::path> emit_plot_data(const fs::path& run_dir, const std::string& kind, const fs::path& out_dir) {
  if (std::find(std::begin(kPlotKinds), std::end(kPlotKinds), kind) == std::end(kPlotKinds)) {
    std::string valid;
    for (const char* k : kPlotKinds) valid += (valid.empty() ? "" : ", ") + std::string(k);
    throw std::invalid_argument("unknown plot kind '" + kind + "'; valid kinds: " + valid);
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw OutputError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;

  if (kind == "trajectories") {
    const auto t = read_tsv(run_dir / "trajectory.tsv");
    std::map<std::string, std::vector<const std::vector<std::string>*>> by_robot;
    for (const auto& r : t.rows) by_robot[r[t.col("robot")]].push_back(&r);
    std::vector<std::pair<int, std::string>> ids;
    for (const auto& [id, rows] : by_robot) ids.push_back({std::stoi(id), id});
    std::sort(ids.begin(), ids.end());
    for (const auto& [n, id] : ids) {
      const auto path = out_dir / ("trajectory_robot_" + id + ".tsv");
      TsvWriter w(path, "trajectory of robot " + id, {"time", "x", "y"});
      for (const auto* r : by_robot[id]) w.row({(*r)[t.col("time")], (*r)[t.col("x")], (*r)[t.col("y")]});
      written.push_back(path);
    }
  } else if (kind == "partitions") {
    const auto p = read_tsv(run_dir / "partitions.tsv");
    const auto [w, h] = grid_shape(read_tsv(run_dir / "density.tsv"));
    std::map<int, std::pair<std::string, std::vector<std::string>>> snaps;
    for (const auto& r : p.rows) {
      auto& [time, cells] = snaps[std::stoi(r[p.col("snapshot")])];
      if (cells.empty()) cells.assign(static_cast<std::size_t>(w * h), "-1");
      time = r[p.col("time")];
      cells[std::stoul(r[p.col("cell")])] = r[p.col("owner")];
    }
    for (const auto& [k, snap] : snaps) {
      const auto path = out_dir / ("partition_" + std::to_string(k) + ".tsv");
      write_grid(path, "cell owners at t=" + snap.first + ", -1 covered", w, h, snap.second);
      written.push_back(path);
    }
  } else if (kind == "swd_curve") {
    const auto s = read_tsv(run_dir / "swd.tsv");
    const auto path = out_dir / "swd_curve.tsv";
    TsvWriter w(path, "SWD against simulated time", {"time", "swd"});
    for (const auto& r : s.rows) w.row({r[s.col("time")], r[s.col("swd")]});
    written.push_back(path);
  } else if (kind == "density_heatmaps") {
    const auto d = read_tsv(run_dir / "density.tsv");
    const auto [w, h] = grid_shape(d);
    for (const char* which : {"truth", "predicted"}) {
      std::vector<std::string> cells(static_cast<std::size_t>(w * h), "0");
      for (const auto& r : d.rows) cells[std::stoul(r[d.col("cell")])] = r[d.col(which)];
      const auto path = out_dir / (std::string("density_") + which + ".tsv");
      write_grid(path, std::string(which) + " density per cell", w, h, cells);
      written.push_back(path);
    }
  } else {
    const auto path = out_dir / "summary_bars.tsv";
    TsvWriter w(path, "mean completion time and total path length", {"scenario", "strategy", "mean_time",
                                                                       "mean_path_length"});
    if (fs::exists(run_dir / "batch_aggregate.tsv")) {
      const auto a = read_tsv(run_dir / "batch_aggregate.tsv");
      for (const auto& r : a.rows) {
        w.row({r[a.col("scenario")], r[a.col("strategy")], r[a.col("mean_time")], r[a.col("mean_path_length")]});
      }
    } else {
      const auto s = read_tsv(run_dir / "summary.tsv");
      for (const auto& r : s.rows) {
        w.row({r[s.col("scenario")], r[s.col("strategy")], r[s.col("completion_time")],
               r[s.col("total_path_length")]});
      }
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace mdcpp
