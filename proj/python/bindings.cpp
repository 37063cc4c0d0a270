#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mdcpp/assignment.hpp"
#include "mdcpp/batch.hpp"
#include "mdcpp/engine.hpp"
#include "mdcpp/estimator.hpp"
#include "mdcpp/output.hpp"
#include "mdcpp/planner.hpp"
#include "mdcpp/scenario.hpp"

namespace py = pybind11;
using namespace mdcpp;

namespace {

std::pair<double, double> to_pair(Point p) { return {p.x, p.y}; }

py::dict result_dict(const ScenarioResult& r) {
  py::dict d;
  d["completion_time"] = r.completion_time;
  d["total_path_length"] = r.total_path_length;
  d["per_robot_path_length"] = r.per_robot_path_length;
  d["per_robot_finish_time"] = r.per_robot_finish_time;
  py::list swd;
  for (const auto& s : r.swd_series) swd.append(py::make_tuple(s.time, s.value));
  d["swd_series"] = swd;
  d["partition_events"] = r.partition_events;
  d["aborted"] = r.aborted;
  d["end_time"] = r.end_time;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mdcpp, m) {
  m.doc() = "Multi-robot dynamic coverage path planning simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<OutputError>(m, "OutputError", PyExc_OSError);

  py::enum_<Strategy>(m, "Strategy")
      .value("MDCPP", Strategy::Mdcpp)
      .value("DYNAMIC", Strategy::DynamicNoPrediction)
      .value("SWEEPING", Strategy::Sweeping);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("n0", &ScenarioConfig::n0)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("max_sim_time", &ScenarioConfig::max_sim_time)
      .def_property(
          "comm_range", [](const ScenarioConfig& c) { return c.network.comm_range; },
          [](ScenarioConfig& c, std::optional<double> r) {
            c.network = r ? NetworkConfig::limited(*r) : NetworkConfig::unlimited();
          },
          "Communication range in meters; None means unlimited.")
      .def_property_readonly("strategy", [](const ScenarioConfig& c) { return c.strategy; })
      .def_property_readonly("robot_ids",
                             [](const ScenarioConfig& c) {
                               std::vector<RobotId> ids;
                               for (const auto& r : c.robots) ids.push_back(r.id);
                               return ids;
                             })
      .def("validate", &ScenarioConfig::validate)
      .def("to_json", &serialize_scenario)
      .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; })
      .def("__repr__", [](const ScenarioConfig& c) { return "<ScenarioConfig " + c.name + ">"; });

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<string>");
  m.def("load_scenario", &load_scenario, py::arg("path"), "Load a scenario file or 'preset:<name>'.");
  m.def("preset", &preset, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def("parse_strategy", &parse_strategy);

  m.def(
      "run",
      [](const ScenarioConfig& cfg, std::optional<Strategy> strategy, std::optional<std::string> out_dir) {
        const Strategy s = strategy.value_or(cfg.strategy);
        RunLog log;
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg, s, &log);
        }
        if (out_dir) write_run(run_directory(*out_dir, cfg.name, s, cfg.seed), cfg, s, r, log);
        return result_dict(r);
      },
      py::arg("config"), py::arg("strategy") = py::none(), py::arg("out_dir") = py::none(),
      "Run one scenario to completion; optionally write the run files below out_dir.");

  m.def(
      "run_batch",
      [](const std::vector<ScenarioConfig>& configs, int repeats, std::uint64_t seed_base,
         std::optional<std::vector<Strategy>> strategies, std::optional<std::string> out_dir, int jobs) {
        BatchOptions o;
        o.repeats = repeats;
        o.seed_base = seed_base;
        if (strategies) o.strategies = *strategies;
        if (out_dir) o.out_root = *out_dir;
        o.jobs = jobs;
        BatchSummary s;
        {
          py::gil_scoped_release release;
          s = run_batch(configs, o);
        }
        py::list rows, aggs;
        for (const auto& r : s.rows) {
          rows.append(py::dict(py::arg("scenario") = r.scenario, py::arg("strategy") = r.strategy,
                               py::arg("seed") = r.seed, py::arg("completion_time") = r.completion_time,
                               py::arg("total_path_length") = r.total_path_length,
                               py::arg("partition_events") = r.partition_events, py::arg("aborted") = r.aborted));
        }
        for (const auto& a : s.aggregates) {
          aggs.append(py::dict(py::arg("scenario") = a.scenario, py::arg("strategy") = a.strategy,
                               py::arg("runs") = a.runs, py::arg("aborted") = a.aborted,
                               py::arg("mean_time") = a.mean_time, py::arg("stddev_time") = a.stddev_time,
                               py::arg("mean_path_length") = a.mean_path_length,
                               py::arg("stddev_path_length") = a.stddev_path_length));
        }
        return py::make_tuple(rows, aggs);
      },
      py::arg("configs"), py::arg("repeats") = 5, py::arg("seed_base") = 1, py::arg("strategies") = py::none(),
      py::arg("out_dir") = py::none(), py::arg("jobs") = 1, "Returns (rows, aggregates).");

  m.def("emit_plot_data", &emit_plot_data, py::arg("run_dir"), py::arg("kind"), py::arg("out_dir"));

  m.def(
      "largest_remainder",
      [](std::size_t total, const std::vector<double>& w) { return largest_remainder(total, w); },
      py::arg("total"), py::arg("weights"));

  m.def(
      "nearest_neighbor_path",
      [](std::pair<double, double> start, const std::vector<std::pair<double, double>>& pts) {
        std::vector<Waypoint> w;
        for (std::size_t i = 0; i < pts.size(); ++i) w.push_back({i, {pts[i].first, pts[i].second}});
        const auto p = nearest_neighbor_path({start.first, start.second}, w);
        std::vector<std::size_t> order;
        for (const auto& x : p.cells) order.push_back(x.cell);
        return py::make_tuple(order, p.total_length);
      },
      py::arg("start"), py::arg("points"), "Returns (visit order as input indices, length).");

  m.def(
      "kmeans",
      [](const std::vector<std::pair<double, double>>& pts, int k, std::uint64_t seed) {
        std::vector<Point> p;
        for (const auto& [x, y] : pts) p.push_back({x, y});
        Rng rng(seed);
        const auto r = kmeans(p, k, rng);
        std::vector<std::pair<double, double>> c;
        for (const auto& q : r.centroids) c.push_back(to_pair(q));
        return py::make_tuple(r.labels, c, r.wcss);
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, "Returns (labels, centroids, wcss).");

  m.def(
      "sliced_wasserstein",
      [](const std::vector<double>& a, const std::vector<double>& b,
         const std::vector<std::pair<double, double>>& support, int n_projections, std::uint64_t seed) {
        std::vector<Point> s;
        for (const auto& [x, y] : support) s.push_back({x, y});
        Rng rng(seed);
        return sliced_wasserstein(a, b, s, n_projections, rng);
      },
      py::arg("a"), py::arg("b"), py::arg("support"), py::arg("n_projections") = 50, py::arg("seed") = 0);
}
