#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdcpp/batch.hpp"
#include "mdcpp/output.hpp"

using namespace mdcpp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("mdcpp_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every file under root, relative path -> bytes.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MDCPP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t data_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("batch over the four comparison scenarios") {
  std::vector<ScenarioConfig> configs;
  for (const char* n : {"ld_2c", "ld_3c", "sd_2c", "sd_3c"}) configs.push_back(preset(n));
  BatchOptions opts;
  opts.repeats = 5;
  const auto s = run_batch(configs, opts);
  CHECK(s.rows.size() == 60);
  CHECK(s.aggregates.size() == 12);
  CHECK_FALSE(s.any_aborted());
  for (const auto& a : s.aggregates) {
    CHECK(a.runs == 5);
    if (a.scenario == "ld_2c" && a.strategy == Strategy::Mdcpp) {
      for (const auto& b : s.aggregates) {
        if (b.scenario == "ld_2c" && b.strategy == Strategy::Sweeping) CHECK(a.mean_time < b.mean_time);
      }
    }
  }
}

TEST_CASE("batch output is byte-identical across reruns and thread counts") {
  TempDir tmp("batch");
  std::vector<ScenarioConfig> configs{preset("table1"), preset("sd_2c")};
  BatchOptions opts;
  opts.repeats = 2;
  opts.seed_base = 11;
  opts.out_root = tmp.path / "a";
  run_batch(configs, opts);
  opts.out_root = tmp.path / "b";
  opts.jobs = 3;
  run_batch(configs, opts);
  const auto a = tree(tmp.path / "a");
  const auto b = tree(tmp.path / "b");
  CHECK(a.size() == 2 + 2 * 3 * 2 * 9);
  CHECK(a == b);
  CHECK(data_lines(tmp.path / "a" / "batch_rows.tsv") == 12);
  CHECK(data_lines(tmp.path / "a" / "batch_aggregate.tsv") == 6);
  opts.out_root = tmp.path / "a";
  CHECK_THROWS_AS(run_batch(configs, opts), OutputError);
}

TEST_CASE("batch keeps going past a watchdog abort") {
  auto quick = preset("ld_2c");
  quick.max_sim_time = 100.0;
  BatchOptions opts;
  opts.repeats = 2;
  opts.strategies = {Strategy::Sweeping};
  const auto s = run_batch({quick, preset("table1")}, opts);
  REQUIRE(s.rows.size() == 4);
  CHECK(s.rows[0].aborted);
  CHECK(s.rows[1].aborted);
  CHECK_FALSE(s.rows[2].aborted);
  CHECK(s.any_aborted());
  CHECK(s.aggregates[0].aborted == 2);
  CHECK_THROWS(run_batch({quick}, BatchOptions{.repeats = 0}));
}

TEST_CASE("run files and plot data") {
  TempDir tmp("plot");
  auto cfg = preset("ld_3c");
  RunLog log;
  const auto res = run(cfg, Strategy::Mdcpp, &log);
  const auto dir = run_directory(tmp.path, cfg.name, Strategy::Mdcpp, cfg.seed);
  CHECK(dir == tmp.path / "ld_3c" / "mdcpp" / "seed_1");
  write_run(dir, cfg, Strategy::Mdcpp, res, log);
  CHECK_THROWS_AS(write_run(dir, cfg, Strategy::Mdcpp, res, log), OutputError);
  CHECK(load_scenario((dir / "config.json").string()) == cfg);

  const auto out = tmp.path / "plots";
  SUBCASE("trajectories: one file per robot") {
    const auto files = emit_plot_data(dir, "trajectories", out);
    CHECK(files.size() == 4);
    for (const auto& f : files) CHECK(data_lines(f) > 1);
  }
  SUBCASE("swd curve has a monotone time column") {
    const auto files = emit_plot_data(dir, "swd_curve", out);
    REQUIRE(files.size() == 1);
    std::ifstream in(files[0]);
    std::string line;
    double last = -1.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("time", 0) == 0) continue;
      const double t = std::stod(line.substr(0, line.find('\t')));
      CHECK(t >= last);
      last = t;
      ++rows;
    }
    CHECK(rows == res.swd_series.size());
  }
  SUBCASE("density heatmaps are two grids of the same shape") {
    const auto files = emit_plot_data(dir, "density_heatmaps", out);
    REQUIRE(files.size() == 2);
    CHECK(data_lines(files[0]) == 20);
    CHECK(data_lines(files[1]) == 20);
  }
  SUBCASE("partitions: one grid per snapshot") {
    const auto files = emit_plot_data(dir, "partitions", out);
    CHECK(files.size() == log.partitions.size());
  }
  SUBCASE("summary bars") {
    const auto files = emit_plot_data(dir, "summary_bars", out);
    REQUIRE(files.size() == 1);
    CHECK(data_lines(files[0]) == 1);
  }
  SUBCASE("unknown kind lists the valid ones") {
    try {
      emit_plot_data(dir, "histogram", out);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      for (const char* k : kPlotKinds) CHECK(msg.find(k) != std::string::npos);
    }
  }
  SUBCASE("missing run directory") {
    CHECK_THROWS_AS(emit_plot_data(tmp.path / "missing", "swd_curve", out), OutputError);
  }
}

TEST_CASE("same seed, byte-identical run files") {
  TempDir tmp("det");
  for (const char* sub : {"a", "b"}) {
    auto cfg = preset("table1");
    RunLog log;
    const auto res = run(cfg, Strategy::Mdcpp, &log);
    write_run(tmp.path / sub, cfg, Strategy::Mdcpp, res, log);
  }
  CHECK(tree(tmp.path / "a") == tree(tmp.path / "b"));
}

TEST_CASE("command line") {
  TempDir tmp("cli");
  const std::string out = tmp.path.string();
  CHECK(cli("validate --scenario preset:ld_2c") == 0);
  CHECK(cli("validate --scenario " + std::string(MDCPP_SOURCE_DIR) + "/scenarios/sd_3c.json") == 0);
  CHECK(cli("validate --scenario /nonexistent.json") == 1);
  CHECK(cli("validate --scenario preset:ld_2c --comm-range nowhere") == 1);
  CHECK(cli("validate --scenario preset:ld_2c --comm-range 20") == 0);
  CHECK(cli("run --scenario preset:table1 --strategy sweeping --seed 4 --out " + out) == 0);
  CHECK(fs::exists(tmp.path / "table1" / "sweeping" / "seed_4" / "summary.tsv"));
  CHECK(cli("run --scenario preset:table1 --strategy sweeping --seed 4 --out " + out) == 1);
  CHECK(cli("run --scenario preset:table1 --strategy bogus") == 1);
  CHECK(cli("run --scenario preset:ld_2c --max-sim-time 30") == 2);
  CHECK(cli("batch --scenario preset:table1 --strategy sweeping --repeats 2 --out " + out + "/batch") == 0);
  CHECK(data_lines(tmp.path / "batch" / "batch_rows.tsv") == 2);
  CHECK(cli("plot-data --run " + out + "/table1/sweeping/seed_4 --kind trajectories --out " + out + "/p") == 0);
  CHECK(cli("plot-data --run " + out + "/table1/sweeping/seed_4 --kind nope --out " + out + "/p") == 1);
  CHECK(cli("plot-data --run " + out + "/batch --kind summary_bars --out " + out + "/bars") == 0);
  CHECK(data_lines(tmp.path / "bars" / "summary_bars.tsv") == 1);
  CHECK(cli("") == 1);
  CHECK(cli("preset ld_2c") == 0);
}
