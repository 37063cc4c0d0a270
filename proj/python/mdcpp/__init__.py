"""Python front end for the mdcpp coverage simulator."""

from ._mdcpp import (
    ConfigError,
    OutputError,
    ScenarioConfig,
    Strategy,
    emit_plot_data,
    kmeans,
    largest_remainder,
    load_scenario,
    nearest_neighbor_path,
    parse_scenario,
    parse_strategy,
    preset,
    preset_names,
    run,
    run_batch,
    sliced_wasserstein,
)

__all__ = [
    "ConfigError",
    "OutputError",
    "ScenarioConfig",
    "Strategy",
    "emit_plot_data",
    "kmeans",
    "largest_remainder",
    "load_scenario",
    "nearest_neighbor_path",
    "parse_scenario",
    "parse_strategy",
    "preset",
    "preset_names",
    "run",
    "run_batch",
    "sliced_wasserstein",
]
