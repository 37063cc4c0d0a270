#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mdcpp/batch.hpp"
#include "mdcpp/engine.hpp"
#include "mdcpp/output.hpp"
#include "mdcpp/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAborted = 2;

// "unlimited" or a non-negative number of meters.
mdcpp::NetworkConfig parse_comm_range(const std::string& text) {
  if (text == "unlimited") return mdcpp::NetworkConfig::unlimited();
  std::size_t used = 0;
  double r = 0.0;
  try {
    r = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(r >= 0.0)) {
    throw mdcpp::ConfigError("--comm-range: expected meters or 'unlimited', got '" + text + "'");
  }
  return mdcpp::NetworkConfig::limited(r);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> comm_range;
  std::optional<double> max_sim_time;

  void apply(mdcpp::ScenarioConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (comm_range) cfg.network = parse_comm_range(*comm_range);
    if (max_sim_time) cfg.max_sim_time = *max_sim_time;
    cfg.validate();
  }
};

void print_result(const mdcpp::ScenarioConfig& cfg, mdcpp::Strategy strategy, const mdcpp::ScenarioResult& r) {
  std::cout << "scenario\t" << cfg.name << "\n"
            << "strategy\t" << mdcpp::to_string(strategy) << "\n"
            << "seed\t" << cfg.seed << "\n"
            << "completion_time\t" << mdcpp::format_number(r.completion_time) << "\n"
            << "total_path_length\t" << mdcpp::format_number(r.total_path_length) << "\n"
            << "partition_events\t" << r.partition_events << "\n"
            << "aborted\t" << (r.aborted ? 1 : 0) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot dynamic coverage path planning simulator"};
  app.require_subcommand(1);

  Overrides ov;
  std::string scenario;
  std::vector<std::string> scenarios;
  std::vector<std::string> strategies;
  std::string strategy_name;
  std::string out_dir;
  int repeats = 5;
  int jobs = 1;
  std::string run_dir;
  std::string kind;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--seed", ov.seed, "RNG seed (overrides the config)");
    sub->add_option("--comm-range", ov.comm_range, "Communication range in meters, or 'unlimited'");
    sub->add_option("--max-sim-time", ov.max_sim_time, "Watchdog limit in simulated seconds");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one scenario with one strategy");
  run_cmd->add_option("--scenario", scenario, "Scenario file or preset:<name>")->required();
  run_cmd->add_option("--strategy", strategy_name, "mdcpp | dynamic | sweeping (default: from config)");
  run_cmd->add_option("--out", out_dir, "Write result files below this directory");
  add_overrides(run_cmd);

  auto* batch_cmd = app.add_subcommand("batch", "Run scenarios x strategies x seeds");
  batch_cmd->add_option("--scenario", scenarios, "Scenario files or preset:<name> (repeatable)")->required();
  batch_cmd->add_option("--strategy", strategies, "Strategies to include (repeatable; default all)");
  batch_cmd->add_option("--repeats", repeats, "Seeds per scenario and strategy")->check(CLI::PositiveNumber);
  batch_cmd->add_option("--seed", ov.seed, "First seed (default 1)");
  batch_cmd->add_option("--comm-range", ov.comm_range, "Communication range in meters, or 'unlimited'");
  batch_cmd->add_option("--max-sim-time", ov.max_sim_time, "Watchdog limit in simulated seconds");
  batch_cmd->add_option("--out", out_dir, "Write per-run files and batch tables below this directory");
  batch_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* plot_cmd = app.add_subcommand("plot-data", "Turn run files into plot-ready tables");
  plot_cmd->add_option("--run", run_dir, "Run directory (or batch root for summary_bars)")->required();
  plot_cmd->add_option("--kind", kind, "trajectories | partitions | swd_curve | density_heatmaps | summary_bars")
      ->required();
  plot_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file without running it");
  validate_cmd->add_option("--scenario", scenario, "Scenario file or preset:<name>")->required();
  add_overrides(validate_cmd);

  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "Print a built-in scenario as JSON");
  preset_cmd->add_option("name", preset_name, "Preset name (omit to list)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run_cmd) {
      auto cfg = mdcpp::load_scenario(scenario);
      ov.apply(cfg);
      const auto strategy = strategy_name.empty() ? cfg.strategy : mdcpp::parse_strategy(strategy_name);
      const auto dir = mdcpp::run_directory(out_dir, cfg.name, strategy, cfg.seed);
      if (!out_dir.empty() && std::filesystem::exists(dir)) {
        throw mdcpp::OutputError("refusing to overwrite existing run directory " + dir.string());
      }
      mdcpp::RunLog log;
      const auto result = mdcpp::run(cfg, strategy, &log);
      print_result(cfg, strategy, result);
      if (!out_dir.empty()) {
        mdcpp::write_run(dir, cfg, strategy, result, log);
        std::cout << "output\t" << dir.string() << "\n";
      }
      if (result.aborted) {
        std::cerr << "watchdog: coverage incomplete at t=" << result.end_time << " s\n";
        return kExitAborted;
      }
      return kExitOk;
    }
    if (*batch_cmd) {
      std::vector<mdcpp::ScenarioConfig> configs;
      for (const auto& s : scenarios) {
        auto cfg = mdcpp::load_scenario(s);
        Overrides no_seed = ov;
        no_seed.seed.reset();
        no_seed.apply(cfg);
        configs.push_back(std::move(cfg));
      }
      mdcpp::BatchOptions opts;
      if (!strategies.empty()) {
        opts.strategies.clear();
        for (const auto& s : strategies) opts.strategies.push_back(mdcpp::parse_strategy(s));
      }
      opts.repeats = repeats;
      opts.seed_base = ov.seed.value_or(1);
      opts.jobs = jobs;
      if (!out_dir.empty()) opts.out_root = out_dir;
      const auto summary = mdcpp::run_batch(configs, opts);
      std::cout << "scenario\tstrategy\truns\taborted\tmean_time\tstddev_time\tmean_path_length\tstddev_path_length\n";
      for (const auto& a : summary.aggregates) {
        std::cout << a.scenario << '\t' << mdcpp::to_string(a.strategy) << '\t' << a.runs << '\t' << a.aborted << '\t'
                  << mdcpp::format_number(a.mean_time) << '\t' << mdcpp::format_number(a.stddev_time) << '\t'
                  << mdcpp::format_number(a.mean_path_length) << '\t'
                  << mdcpp::format_number(a.stddev_path_length) << '\n';
      }
      for (const auto& r : summary.rows) {
        if (r.aborted) {
          std::cerr << "watchdog: " << r.scenario << ' ' << mdcpp::to_string(r.strategy) << " seed " << r.seed
                    << " aborted\n";
        }
      }
      return summary.any_aborted() ? kExitAborted : kExitOk;
    }
    if (*plot_cmd) {
      for (const auto& p : mdcpp::emit_plot_data(run_dir, kind, out_dir)) std::cout << p.string() << "\n";
      return kExitOk;
    }
    if (*validate_cmd) {
      auto cfg = mdcpp::load_scenario(scenario);
      ov.apply(cfg);
      std::cout << "ok\t" << cfg.name << "\n";
      return kExitOk;
    }
    if (*preset_cmd) {
      if (preset_name.empty()) {
        for (const auto& n : mdcpp::preset_names()) std::cout << n << "\n";
      } else {
        std::cout << mdcpp::serialize_scenario(mdcpp::preset(preset_name));
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
