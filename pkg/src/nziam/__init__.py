"""Reduced-form two-region integrated assessment of net-zero pathways with
direct air capture, BECCS, and afforestation."""

from .config import (
    CapPath,
    PolicyLinkage,
    ScenarioConfig,
    TimeGrid,
    luc_price_fraction,
    nt2nz_cap,
    parse_scenario,
    serialize_scenario,
)
from .errors import ConfigError, InfeasibleError, NziamError, StorageExhaustedError
from .report import RunReport, run_scenario
from .solver import RunResult, net_emissions_at_price, run_path, solve_carbon_price
from .sweep import SweepSpec, parse_sweep_spec, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CapPath",
    "ConfigError",
    "InfeasibleError",
    "NziamError",
    "PolicyLinkage",
    "RunReport",
    "RunResult",
    "ScenarioConfig",
    "StorageExhaustedError",
    "SweepSpec",
    "TimeGrid",
    "luc_price_fraction",
    "net_emissions_at_price",
    "nt2nz_cap",
    "parse_scenario",
    "parse_sweep_spec",
    "run_path",
    "run_scenario",
    "run_sweep",
    "serialize_scenario",
    "solve_carbon_price",
]
