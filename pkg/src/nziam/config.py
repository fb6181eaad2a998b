"""Scenario configuration: parsing, validation, policy trajectories.

A scenario is one YAML file (plus CSV calibration tables it references).
Files may extend a base file; sensitivity variants replace individual values
through dotted-path overrides which are recorded in run metadata.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping, Sequence

import yaml

from .climate import ClimateParams
from .energy import ChoiceParams, SectorDemand
from .errors import ConfigError
from .landwater import LandConfig, LandUse, validate_uses
from .series import Series
from .technoecon import DacParams, StorageSupplyCurve, Technology

_LINES = "__lines__"


# ---------------------------------------------------------------------------
# Policy types and trajectory operations


@dataclass(frozen=True)
class TimeGrid:
    start_year: int
    end_year: int
    step: int = 5

    def __post_init__(self):
        if self.start_year >= self.end_year:
            raise ValueError("start_year must precede end_year")
        if self.step <= 0 or (self.end_year - self.start_year) % self.step != 0:
            raise ValueError("step must divide the horizon")

    def years(self) -> list[int]:
        return list(range(self.start_year, self.end_year + 1, self.step))

    def __contains__(self, year: int) -> bool:
        return (
            self.start_year <= year <= self.end_year
            and (year - self.start_year) % self.step == 0
        )


@dataclass(frozen=True)
class PolicyLinkage:
    """Ramp linking the land-use-change carbon price to the fossil price."""

    start_year: int = 2025
    start_fraction: float = 0.0
    full_fraction_year: int = 2100

    def __post_init__(self):
        if not 0.0 <= self.start_fraction <= 1.0:
            raise ValueError("start_fraction must be within [0, 1]")
        if self.start_year >= self.full_fraction_year:
            raise ValueError("start_year must precede full_fraction_year")


def luc_price_fraction(linkage: PolicyLinkage, year: int | float) -> float:
    """Fraction of the fossil carbon price applied to land carbon, clamped to [start, 1]."""
    if year <= linkage.start_year:
        return linkage.start_fraction
    if year >= linkage.full_fraction_year:
        return 1.0
    span = linkage.full_fraction_year - linkage.start_year
    return linkage.start_fraction + (1.0 - linkage.start_fraction) * (
        (year - linkage.start_year) / span
    )


@dataclass(frozen=True)
class CapPath:
    """Per-period net-CO2 ceiling (GtCO2/yr), linearly interpolated between knots."""

    knots: tuple[tuple[int, float], ...]

    @property
    def start_year(self) -> int:
        return self.knots[0][0]

    def value_at(self, year: int | float) -> float:
        if year < self.start_year:
            raise KeyError(f"cap undefined before {self.start_year}")
        return Series(self.knots).at(year)


def nt2nz_cap(
    base_emissions: float, base_year: int, net_zero_year: int, grid: TimeGrid
) -> CapPath:
    """Linearly declining cap from `base_emissions` at `base_year` to zero at
    `net_zero_year`, held at zero afterwards."""
    if base_year >= net_zero_year:
        raise ValueError("base_year must precede net_zero_year")
    if base_emissions < 0:
        raise ValueError("base_emissions must be non-negative")
    span = net_zero_year - base_year
    knots: list[tuple[int, float]] = [(base_year, base_emissions)]
    for y in grid.years():
        if base_year < y < net_zero_year:
            knots.append((y, base_emissions * (net_zero_year - y) / span))
    knots.append((net_zero_year, 0.0))
    for y in grid.years():
        if y > net_zero_year:
            knots.append((y, 0.0))
    return CapPath(knots=tuple(sorted(set(knots))))


def validate_nt2nz(cap: CapPath, net_zero_year: int, label: str = "cap") -> None:
    """A net-zero-tagged cap must be non-increasing and exactly zero from the
    net-zero year onward."""
    values = list(cap.knots)
    for (y0, v0), (y1, v1) in zip(values, values[1:]):
        if v1 > v0 + 1e-12:
            raise ValueError(f"{label}: ceiling increases between {y0} and {y1}")
    tail = [v for y, v in values if y >= net_zero_year]
    if not tail or any(abs(v) > 0.0 for v in tail):
        raise ValueError(
            f"{label}: net-zero path must reach exactly 0 at {net_zero_year} and stay there"
        )


@dataclass(frozen=True)
class CapSpec:
    """Recipe for one region's cap. base_emissions is None when it should be
    anchored to the region's own unpriced emissions at base_year."""

    base_year: int
    net_zero_year: int
    base_emissions: float | None = None
    explicit: CapPath | None = None


# ---------------------------------------------------------------------------
# Remaining configuration blocks


@dataclass(frozen=True)
class RegionSocio:
    population: Series  # millions
    gdp_per_capita: Series  # thousand 2015USD per person
    municipal_water_m3_per_capita: Series
    service_growth_scale: float = 1.0


@dataclass(frozen=True)
class BiomassConfig:
    base_price: Mapping[str, float]  # $/GJ at the calibration year
    harvest_cost: float = 2.5  # $/GJ production cost net of land rent
    price_floor: float = 0.5
    price_ceiling: float = 100.0
    residue_supply: Mapping[str, Series] = field(default_factory=dict)  # EJ/yr


@dataclass(frozen=True)
class LandSettings:
    bio_weight_ratio: Mapping[str, float] = field(default_factory=dict)
    food_rent_feedback: float = 2.0  # scarcity exponent for the crop price index
    food_demand_index: Mapping[str, Series] = field(default_factory=dict)
    yield_growth_rate: float = 0.007  # /yr bioenergy yield improvement
    yield_growth_until: int = 2060
    luc_emission_tco2_km2: float = 20000.0  # stock released when forest converts away


@dataclass(frozen=True)
class SolverSettings:
    fixed_point_rounds: int = 50
    fixed_point_tol: float = 1e-6
    damping: float = 0.5
    bio_adjust_exponent: float = 0.25
    max_bisection_iters: int = 60


@dataclass(frozen=True)
class Override:
    path: str
    value: Any


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    grid: TimeGrid
    regions: tuple[str, ...]
    base_year: int
    caps: Mapping[str, CapSpec]
    price_ceiling: float
    luc_linkage: PolicyLinkage
    dac: DacParams
    storage: Mapping[str, StorageSupplyCurve]
    technologies: tuple[Technology, ...]
    demand: Mapping[str, Mapping[str, SectorDemand]]
    base_shares: Mapping[str, Mapping[str, Mapping[str, float]]]
    entrant_weights: Mapping[str, Mapping[str, Mapping[str, float]]]
    choice: ChoiceParams
    fuel_prices: Mapping[str, Mapping[str, Series]]
    elec_margin: float
    biomass: BiomassConfig
    land: Mapping[str, LandConfig]
    land_settings: LandSettings
    socioecon: Mapping[str, RegionSocio]
    climate: ClimateParams
    solver: SolverSettings
    overrides: tuple[Override, ...]

    def techs_by_sector(self) -> dict[str, list[Technology]]:
        out: dict[str, list[Technology]] = {}
        for t in self.technologies:
            out.setdefault(t.sector, []).append(t)
        return out

    @property
    def config_hash(self) -> str:
        return config_hash(self)


# ---------------------------------------------------------------------------
# YAML loading with line marks


class _MarkedLoader(yaml.SafeLoader):
    pass


def _construct_marked_mapping(loader: _MarkedLoader, node: yaml.MappingNode) -> dict:
    mapping: dict = {}
    lines: dict = {"__self__": node.start_mark.line + 1}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        mapping[key] = loader.construct_object(value_node, deep=True)
        lines[key] = key_node.start_mark.line + 1
    mapping[_LINES] = lines
    return mapping


_MarkedLoader.add_constructor(
    yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_marked_mapping
)


def _strip_marks(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _strip_marks(v) for k, v in obj.items() if k != _LINES}
    if isinstance(obj, list):
        return [_strip_marks(v) for v in obj]
    return obj


def _line_of(mapping: Any, key: Any) -> int | None:
    if isinstance(mapping, dict):
        lines = mapping.get(_LINES, {})
        return lines.get(key, lines.get("__self__"))
    return None


def _deep_merge(base: Any, override: Any) -> Any:
    if isinstance(base, dict) and isinstance(override, dict):
        merged = dict(base)
        for k, v in override.items():
            merged[k] = _deep_merge(base[k], v) if k in base else v
        return merged
    return override


def _apply_override(raw: dict, path: str, value: Any) -> None:
    parts = path.split(".")
    node = raw
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError("override path does not resolve against the schema", path)
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError("override path does not resolve against the schema", path)
    node[leaf] = value


# ---------------------------------------------------------------------------
# Validated access helpers


def _req(mapping: Any, key: str, path: str) -> Any:
    if not isinstance(mapping, dict):
        raise ConfigError("expected a mapping", path)
    if key not in mapping:
        raise ConfigError(f"missing required key '{key}'", f"{path}.{key}" if path else key,
                          _line_of(mapping, key))
    return mapping[key]

def _opt(mapping: Any, key: str, default: Any) -> Any:
    if not isinstance(mapping, dict):
        return default
    return mapping.get(key, default)


def _as_float(value: Any, path: str, line: int | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path, line)
    return float(value)


def _as_int(value: Any, path: str, line: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path, line)
    return value


def _as_series(value: Any, path: str) -> Series:
    if not isinstance(value, dict):
        raise ConfigError("expected a {year: value} mapping", path)
    try:
        return Series.from_mapping({k: v for k, v in value.items() if k != _LINES})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), path) from None


def _check_keys(mapping: Any, allowed: set[str], path: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError("expected a mapping", path)
    for key in mapping:
        if key == _LINES:
            continue
        if key not in allowed:
            raise ConfigError(
                f"unknown key '{key}' (allowed: {sorted(allowed)})",
                f"{path}.{key}" if path else str(key),
                _line_of(mapping, key),
            )


# ---------------------------------------------------------------------------
# CSV table ingestion


def _load_table(spec: Any, base_dir: str | None, path: str) -> list[dict]:
    """A table is either {csv: relative/path.csv} or {rows: [...]}."""
    if isinstance(spec, dict) and "rows" in spec:
        return [_strip_marks(r) for r in spec["rows"]]
    if isinstance(spec, dict) and "csv" in spec:
        rel = spec["csv"]
        full = rel if os.path.isabs(rel) else os.path.join(base_dir or ".", rel)
        if not os.path.exists(full):
            raise ConfigError(f"table file not found: {full}", path)
        with open(full, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    raise ConfigError("table must provide 'csv' or 'rows'", path)


def _row_float(row: dict, col: str, path: str, default: float | None = None) -> float:
    v = row.get(col, "")
    if v in ("", None):
        if default is None:
            raise ConfigError(f"missing column '{col}'", path)
        return default
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"column '{col}': expected number, got {v!r}", path) from None


def _row_int(row: dict, col: str, path: str, default: int | None = None) -> int:
    return int(_row_float(row, col, path, None if default is None else float(default)))


def _build_technologies(rows: list[dict], path: str) -> tuple[Technology, ...]:
    grouped: dict[str, dict] = {}
    order: list[str] = []
    for i, row in enumerate(rows):
        rpath = f"{path}[{i}]"
        name = row.get("name") or ""
        if not name:
            raise ConfigError("technology row without a name", rpath)
        fuel = (row.get("fuel") or "none").strip()
        entry = grouped.get(name)
        if entry is None:
            entry = {
                "sector": row.get("sector") or "",
                "fuels": [],
                "nonenergy_usd": _row_float(row, "nonenergy_usd", rpath),
                "emission_factor": _row_float(row, "emission_factor", rpath),
                "capture_fraction": _row_float(row, "capture_fraction", rpath, 0.0),
                "water_m3": _row_float(row, "water_m3", rpath, 0.0),
                "lifetime_yr": _row_int(row, "lifetime_yr", rpath),
                "available_from": _row_int(row, "available_from", rpath),
                "nonenergy_decline": _row_float(row, "nonenergy_decline", rpath, 0.0),
                "intensity_decline": _row_float(row, "intensity_decline", rpath, 0.0),
                "decline_until": _row_int(row, "decline_until", rpath, 2050),
            }
            grouped[name] = entry
            order.append(name)
        if fuel.lower() not in ("", "none"):
            entry["fuels"].append((fuel, _row_float(row, "gj_per_unit", rpath)))
    techs = []
    for name in order:
        e = grouped[name]
        if not 0.0 <= e["capture_fraction"] <= 1.0:
            raise ConfigError(f"technology '{name}': capture fraction outside [0, 1]", path)
        if e["lifetime_yr"] <= 0:
            raise ConfigError(f"technology '{name}': lifetime must be positive", path)
        if any(gj < 0 for _, gj in e["fuels"]):
            raise ConfigError(f"technology '{name}': fuel inputs must be non-negative", path)
        techs.append(
            Technology(
                name=name,
                sector=e["sector"],
                fuels=tuple(e["fuels"]),
                nonenergy_cost=e["nonenergy_usd"],
                emission_factor=e["emission_factor"],
                capture_fraction=e["capture_fraction"],
                water_m3=e["water_m3"],
                lifetime_yr=e["lifetime_yr"],
                available_from=e["available_from"],
                nonenergy_decline=e["nonenergy_decline"],
                intensity_decline=e["intensity_decline"],
                decline_until=e["decline_until"],
            )
        )
    return tuple(techs)


# ---------------------------------------------------------------------------
# Scenario assembly


def parse_scenario(
    path: str, extra_overrides: Sequence[Override] | None = None
) -> ScenarioConfig:
    """Load, override, and validate one scenario file."""
    raw, base_dir = _load_resolved(path)
    return _finish(raw, base_dir, extra_overrides or ())


def parse_mapping(
    mapping: Mapping[str, Any],
    base_dir: str | None = None,
    extra_overrides: Sequence[Override] | None = None,
) -> ScenarioConfig:
    """Build a scenario from an in-memory mapping (tables inline or relative to base_dir)."""
    import copy

    return _finish(copy.deepcopy(dict(mapping)), base_dir, extra_overrides or ())


def _load_resolved(path: str) -> tuple[dict, str]:
    if not os.path.exists(path):
        raise ConfigError(f"scenario file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            raw = yaml.load(fh, Loader=_MarkedLoader)
        except yaml.YAMLError as exc:
            raise ConfigError(f"not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must contain a mapping")
    base_dir = os.path.dirname(os.path.abspath(path))
    _absolutize_tables(raw, base_dir)
    parent_rel = raw.pop("extends", None)
    if parent_rel is not None:
        parent_path = parent_rel if os.path.isabs(parent_rel) else os.path.join(base_dir, parent_rel)
        parent, _ = _load_resolved(parent_path)
        parent_overrides = parent.pop("overrides", [])
        child_overrides = raw.pop("overrides", [])
        raw = _deep_merge(parent, raw)
        raw["overrides"] = list(parent_overrides) + list(child_overrides)
    return raw, base_dir


def _absolutize_tables(node: Any, base_dir: str) -> None:
    if isinstance(node, dict):
        if "csv" in node and isinstance(node["csv"], str) and not os.path.isabs(node["csv"]):
            node["csv"] = os.path.normpath(os.path.join(base_dir, node["csv"]))
        for v in node.values():
            _absolutize_tables(v, base_dir)
    elif isinstance(node, list):
        for v in node:
            _absolutize_tables(v, base_dir)


def _finish(
    raw: dict, base_dir: str | None, extra_overrides: Sequence[Override]
) -> ScenarioConfig:
    file_overrides = raw.pop("overrides", []) or []
    applied_before = raw.pop("applied_overrides", []) or []
    overrides: list[Override] = []
    for item in applied_before:
        item = _strip_marks(item)
        overrides.append(Override(path=item["path"], value=item["value"]))
    for item in list(file_overrides) + [
        {"path": o.path, "value": o.value} for o in extra_overrides
    ]:
        item = _strip_marks(item) if isinstance(item, dict) else item
        if not isinstance(item, dict) or "path" not in item or "value" not in item:
            raise ConfigError("each override needs 'path' and 'value'", "overrides")
        _apply_override(raw, item["path"], item["value"])
        overrides.append(Override(path=item["path"], value=item["value"]))
    return _build(raw, base_dir, tuple(overrides))


def _build(raw: dict, base_dir: str | None, overrides: tuple[Override, ...]) -> ScenarioConfig:
    _check_keys(
        raw,
        {
            "name", "description", "grid", "regions", "policy", "dac", "storage",
            "energy", "land", "socioecon", "climate", "solver",
        },
        "",
    )
    name = _req(raw, "name", "")
    if not isinstance(name, str) or not name:
        raise ConfigError("scenario name must be a non-empty string", "name")

    gm = _req(raw, "grid", "")
    _check_keys(gm, {"start_year", "end_year", "step"}, "grid")
    try:
        grid = TimeGrid(
            start_year=_as_int(_req(gm, "start_year", "grid"), "grid.start_year"),
            end_year=_as_int(_req(gm, "end_year", "grid"), "grid.end_year"),
            step=_as_int(_opt(gm, "step", 5), "grid.step"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "grid", _line_of(raw, "grid")) from None

    regions_raw = _req(raw, "regions", "")
    if not isinstance(regions_raw, list) or not regions_raw:
        raise ConfigError("regions must be a non-empty list", "regions", _line_of(raw, "regions"))
    regions = tuple(str(r) for r in regions_raw)

    # --- policy ------------------------------------------------------------
    pm = _opt(raw, "policy", {})
    _check_keys(pm, {"caps", "price_ceiling", "luc_linkage"}, "policy")
    caps: dict[str, CapSpec] = {}
    caps_raw = _opt(pm, "caps", None)
    if caps_raw:
        for region, cm in caps_raw.items():
            if region == _LINES:
                continue
            cpath = f"policy.caps.{region}"
            if region not in regions:
                raise ConfigError(f"cap for unknown region '{region}'", cpath)
            _check_keys(cm, {"base_year", "net_zero_year", "base_emissions", "values"}, cpath)
            base_year = _as_int(_req(cm, "base_year", cpath), f"{cpath}.base_year")
            nz_year = _as_int(_req(cm, "net_zero_year", cpath), f"{cpath}.net_zero_year")
            if base_year >= nz_year:
                raise ConfigError("base_year must precede net_zero_year", cpath, _line_of(cm, "base_year"))
            base_emissions: float | None
            be = _opt(cm, "base_emissions", "auto")
            if be == "auto":
                base_emissions = None
            else:
                base_emissions = _as_float(be, f"{cpath}.base_emissions", _line_of(cm, "base_emissions"))
                if base_emissions < 0:
                    raise ConfigError("base_emissions must be non-negative", f"{cpath}.base_emissions")
            explicit = None
            if _opt(cm, "values", None):
                values = {
                    _as_int(y, f"{cpath}.values"): _as_float(v, f"{cpath}.values")
                    for y, v in cm["values"].items()
                    if y != _LINES
                }
                explicit = CapPath(knots=tuple(sorted(values.items())))
                try:
                    validate_nt2nz(explicit, nz_year, label=cpath)
                except ValueError as exc:
                    raise ConfigError(str(exc), cpath, _line_of(cm, "values")) from None
            caps[region] = CapSpec(
                base_year=base_year,
                net_zero_year=nz_year,
                base_emissions=base_emissions,
                explicit=explicit,
            )
    price_ceiling = _as_float(_opt(pm, "price_ceiling", 5000.0), "policy.price_ceiling")
    lm = _opt(pm, "luc_linkage", {})
    _check_keys(lm, {"start_year", "start_fraction", "full_fraction_year"}, "policy.luc_linkage")
    try:
        luc_linkage = PolicyLinkage(
            start_year=_as_int(_opt(lm, "start_year", 2025), "policy.luc_linkage.start_year"),
            start_fraction=_as_float(_opt(lm, "start_fraction", 0.0), "policy.luc_linkage.start_fraction"),
            full_fraction_year=_as_int(_opt(lm, "full_fraction_year", 2100), "policy.luc_linkage.full_fraction_year"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "policy.luc_linkage") from None

    # --- DAC ----------------------------------------------------------------
    dm = _opt(raw, "dac", {})
    _check_keys(
        dm,
        {
            "enabled", "available_from", "gas_2020", "gas_2050", "elec_2020", "elec_2050",
            "nonenergy_2020", "nonenergy_2050", "water_m3_per_t", "lifetime_yr",
            "heat_capture_fraction", "supply_slope",
        },
        "dac",
    )
    slope_raw = _opt(dm, "supply_slope", {})
    supply_slope = {
        r: _as_float(v, f"dac.supply_slope.{r}")
        for r, v in slope_raw.items()
        if r != _LINES
    }
    dac = DacParams(
        gas_2020=_as_float(_opt(dm, "gas_2020", 8.1), "dac.gas_2020"),
        gas_2050=_as_float(_opt(dm, "gas_2050", 5.3), "dac.gas_2050"),
        elec_2020=_as_float(_opt(dm, "elec_2020", 1.8), "dac.elec_2020"),
        elec_2050=_as_float(_opt(dm, "elec_2050", 1.3), "dac.elec_2050"),
        nonenergy_2020=_as_float(_opt(dm, "nonenergy_2020", 300.0), "dac.nonenergy_2020"),
        nonenergy_2050=_as_float(_opt(dm, "nonenergy_2050", 180.0), "dac.nonenergy_2050"),
        water_m3_per_t=_as_float(_opt(dm, "water_m3_per_t", 4.7), "dac.water_m3_per_t"),
        lifetime_yr=_as_int(_opt(dm, "lifetime_yr", 40), "dac.lifetime_yr"),
        enabled=bool(_opt(dm, "enabled", False)),
        available_from=_as_int(_opt(dm, "available_from", 2030), "dac.available_from"),
        heat_capture_fraction=_as_float(_opt(dm, "heat_capture_fraction", 1.0), "dac.heat_capture_fraction"),
        supply_slope=supply_slope,
    )
    for fname in ("gas_2020", "gas_2050", "elec_2020", "elec_2050", "nonenergy_2020",
                  "nonenergy_2050", "water_m3_per_t"):
        if getattr(dac, fname) <= 0:
            raise ConfigError(f"{fname} must be positive", f"dac.{fname}", _line_of(dm, fname))
    for pair in (("gas_2050", "gas_2020"), ("elec_2050", "elec_2020"), ("nonenergy_2050", "nonenergy_2020")):
        if getattr(dac, pair[0]) > getattr(dac, pair[1]):
            raise ConfigError(f"{pair[0]} must not exceed {pair[1]}", f"dac.{pair[0]}", _line_of(dm, pair[0]))
    if dac.lifetime_yr <= 0:
        raise ConfigError("lifetime_yr must be positive", "dac.lifetime_yr")
    if dac.enabled:
        for region in regions:
            if region in caps and region not in supply_slope:
                raise ConfigError(f"dac enabled but no supply_slope for region '{region}'", "dac.supply_slope")

    # --- storage ------------------------------------------------------------
    sm = _req(raw, "storage", "")
    _check_keys(sm, {"table", "cost_multiplier", "capacity_multiplier"}, "storage")
    cost_mult = _as_float(_opt(sm, "cost_multiplier", 1.0), "storage.cost_multiplier")
    cap_mult = _as_float(_opt(sm, "capacity_multiplier", 1.0), "storage.capacity_multiplier")
    storage_rows = _load_table(_req(sm, "table", "storage"), base_dir, "storage.table")
    tiers_by_region: dict[str, list[tuple[float, float]]] = {}
    for i, row in enumerate(storage_rows):
        rpath = f"storage.table[{i}]"
        region = row.get("region") or ""
        tiers_by_region.setdefault(region, []).append(
            (_row_float(row, "capacity_gt", rpath), _row_float(row, "cost_usd_t", rpath))
        )
    storage: dict[str, StorageSupplyCurve] = {}
    for region, tiers in tiers_by_region.items():
        caps_list = [c for c, _ in tiers]
        costs_list = [c for _, c in tiers]
        if sorted(caps_list) != caps_list or len(set(caps_list)) != len(caps_list):
            raise ConfigError(f"storage capacities must be strictly increasing ({region})", "storage.table")
        if sorted(costs_list) != costs_list or len(set(costs_list)) != len(costs_list):
            raise ConfigError(f"storage costs must be strictly increasing ({region})", "storage.table")
        storage[region] = StorageSupplyCurve(tiers=tuple(tiers)).scaled(cost_mult, cap_mult)
    for region in caps:
        if region not in storage:
            raise ConfigError(f"region '{region}' has a cap but no storage curve", "storage.table")

    # --- energy ---------------------------------------------------------------
    em = _req(raw, "energy", "")
    _check_keys(
        em,
        {"base_year", "technologies", "demand", "shares", "choice", "fuel_prices",
         "elec_margin", "biomass"},
        "energy",
    )
    base_year = _as_int(_opt(em, "base_year", 2020), "energy.base_year")
    if base_year not in grid:
        raise ConfigError("energy.base_year must lie on the grid", "energy.base_year")
    technologies = _build_technologies(
        _load_table(_req(em, "technologies", "energy"), base_dir, "energy.technologies"),
        "energy.technologies",
    )
    tech_names = {t.name for t in technologies}

    demand_rows = _load_table(_req(em, "demand", "energy"), base_dir, "energy.demand")
    shares_rows = _load_table(_req(em, "shares", "energy"), base_dir, "energy.shares")

    cm = _opt(em, "choice", {})
    _check_keys(cm, {"default_gamma", "gammas", "gamma_land", "cost_floor"}, "energy.choice")
    choice = ChoiceParams(
        default_gamma=_as_float(_opt(cm, "default_gamma", 3.0), "energy.choice.default_gamma"),
        gammas={
            k: _as_float(v, f"energy.choice.gammas.{k}")
            for k, v in _opt(cm, "gammas", {}).items()
            if k != _LINES
        },
        gamma_land=_as_float(_opt(cm, "gamma_land", 1.0), "energy.choice.gamma_land"),
        cost_floor=_as_float(_opt(cm, "cost_floor", 0.1), "energy.choice.cost_floor"),
    )
    if choice.default_gamma <= 0 or choice.gamma_land <= 0:
        raise ConfigError("logit exponents must be positive", "energy.choice")

    fp_raw = _req(em, "fuel_prices", "energy")
    fuel_prices: dict[str, dict[str, Series]] = {}
    for region, fuels in fp_raw.items():
        if region == _LINES:
            continue
        fuel_prices[region] = {
            f: _as_series(s, f"energy.fuel_prices.{region}.{f}")
            for f, s in fuels.items()
            if f != _LINES
        }
    elec_margin = _as_float(_opt(em, "elec_margin", 4.0), "energy.elec_margin")

    bm = _opt(em, "biomass", {})
    _check_keys(
        bm,
        {"base_price", "harvest_cost", "price_floor", "price_ceiling", "residue_supply_ej"},
        "energy.biomass",
    )
    biomass = BiomassConfig(
        base_price={
            r: _as_float(v, f"energy.biomass.base_price.{r}")
            for r, v in _opt(bm, "base_price", {}).items()
            if r != _LINES
        },
        harvest_cost=_as_float(_opt(bm, "harvest_cost", 2.5), "energy.biomass.harvest_cost"),
        price_floor=_as_float(_opt(bm, "price_floor", 0.5), "energy.biomass.price_floor"),
        price_ceiling=_as_float(_opt(bm, "price_ceiling", 100.0), "energy.biomass.price_ceiling"),
        residue_supply={
            r: _as_series(s, f"energy.biomass.residue_supply_ej.{r}")
            for r, s in _opt(bm, "residue_supply_ej", {}).items()
            if r != _LINES
        },
    )

    # --- socioecon (needed to anchor demand) ---------------------------------
    so = _req(raw, "socioecon", "")
    socioecon: dict[str, RegionSocio] = {}
    for region in regions:
        rm = _req(so, region, "socioecon")
        rpath = f"socioecon.{region}"
        _check_keys(
            rm,
            {"population", "gdp_per_capita", "municipal_water_m3_per_capita", "service_growth_scale"},
            rpath,
        )
        socio = RegionSocio(
            population=_as_series(_req(rm, "population", rpath), f"{rpath}.population"),
            gdp_per_capita=_as_series(_req(rm, "gdp_per_capita", rpath), f"{rpath}.gdp_per_capita"),
            municipal_water_m3_per_capita=_as_series(
                _opt(rm, "municipal_water_m3_per_capita", {2020: 0.0}),
                f"{rpath}.municipal_water_m3_per_capita",
            ),
            service_growth_scale=_as_float(
                _opt(rm, "service_growth_scale", 1.0), f"{rpath}.service_growth_scale"
            ),
        )
        for label, series in (
            ("population", socio.population),
            ("gdp_per_capita", socio.gdp_per_capita),
        ):
            if series.knots[0][0] > grid.start_year or series.knots[-1][0] < grid.end_year:
                raise ConfigError(
                    f"{label} series must cover the full grid "
                    f"({grid.start_year}-{grid.end_year})",
                    f"{rpath}.{label}",
                )
        socioecon[region] = socio

    demand: dict[str, dict[str, SectorDemand]] = {r: {} for r in regions}
    for i, row in enumerate(demand_rows):
        rpath = f"energy.demand[{i}]"
        region = row.get("region") or ""
        if region not in regions:
            raise ConfigError(f"demand row for unknown region '{region}'", rpath)
        sector = row.get("sector") or ""
        socio = socioecon[region]
        demand[region][sector] = SectorDemand(
            sector=sector,
            base_demand=_row_float(row, "base_demand_ej", rpath),
            income_elasticity=_row_float(row, "income_elasticity", rpath),
            price_elasticity=_row_float(row, "price_elasticity", rpath),
            base_gdp_per_capita=socio.gdp_per_capita.at(base_year),
            base_population=socio.population.at(base_year),
            base_price=1.0,  # replaced by the calibrated composite at runtime
        )

    base_shares: dict[str, dict[str, dict[str, float]]] = {r: {} for r in regions}
    entrant_weights: dict[str, dict[str, dict[str, float]]] = {r: {} for r in regions}
    for i, row in enumerate(shares_rows):
        rpath = f"energy.shares[{i}]"
        region = row.get("region") or ""
        if region not in regions:
            raise ConfigError(f"share row for unknown region '{region}'", rpath)
        sector = row.get("sector") or ""
        tech = row.get("tech") or ""
        if tech not in tech_names:
            raise ConfigError(f"share references unknown technology '{tech}'", rpath)
        share = _row_float(row, "base_share", rpath, 0.0)
        if share > 0.0:
            base_shares[region].setdefault(sector, {})[tech] = share
        w = row.get("weight", "")
        if w not in ("", None):
            entrant_weights[region].setdefault(sector, {})[tech] = float(w)
    for region in regions:
        for sector, shares in base_shares[region].items():
            if sector not in demand[region] and sector != "electricity":
                raise ConfigError(
                    f"shares given for sector '{sector}' with no demand entry",
                    f"energy.shares ({region})",
                )
            total = sum(shares.values())
            if abs(total - 1.0) > 1e-6:
                raise ConfigError(
                    f"base shares for {region}/{sector} sum to {total:.6f}, expected 1",
                    "energy.shares",
                )
            base_shares[region][sector] = {t: s / total for t, s in shares.items()}
        for sector in demand[region]:
            if sector not in base_shares[region]:
                raise ConfigError(
                    f"no base shares for sector '{sector}' in region '{region}'",
                    "energy.shares",
                )

    # --- land -----------------------------------------------------------------
    lraw = _req(raw, "land", "")
    _check_keys(
        lraw,
        {"table", "protection_fraction", "bio_weight_ratio", "food_rent_feedback",
         "food_demand_index", "yield_growth_rate", "yield_growth_until",
         "luc_emission_tco2_km2"},
        "land",
    )
    protection = _as_float(_opt(lraw, "protection_fraction", 0.90), "land.protection_fraction")
    if not 0.0 <= protection <= 1.0:
        raise ConfigError("protection_fraction must be within [0, 1]", "land.protection_fraction",
                          _line_of(lraw, "protection_fraction"))
    land_rows = _load_table(_req(lraw, "table", "land"), base_dir, "land.table")
    uses_by_region: dict[str, list[LandUse]] = {}
    for i, row in enumerate(land_rows):
        rpath = f"land.table[{i}]"
        region = row.get("region") or ""
        uses_by_region.setdefault(region, []).append(
            LandUse(
                name=row.get("use") or "",
                base_area_km2=_row_float(row, "base_area_km2", rpath),
                base_rent=_row_float(row, "base_rent_usd_km2", rpath),
                uptake_tco2_km2=_row_float(row, "uptake_tco2_km2", rpath, 0.0),
                yield_gj_km2=_row_float(row, "yield_gj_km2", rpath, 0.0),
                irrigation_m3_km2=_row_float(row, "irrigation_m3_km2", rpath, 0.0),
                non_commercial=_row_int(row, "non_commercial", rpath, 0) == 1,
            )
        )
    land: dict[str, LandConfig] = {}
    for region in regions:
        if region not in uses_by_region:
            raise ConfigError(f"no land table rows for region '{region}'", "land.table")
        try:
            validate_uses(uses_by_region[region])
        except ValueError as exc:
            raise ConfigError(str(exc), f"land.table ({region})") from None
        land[region] = LandConfig(uses=tuple(uses_by_region[region]), protection_fraction=protection)
    bwr_raw = _opt(lraw, "bio_weight_ratio", 1.0)
    if isinstance(bwr_raw, dict):
        bio_weight_ratio = {
            r: _as_float(v, f"land.bio_weight_ratio.{r}")
            for r, v in bwr_raw.items()
            if r != _LINES
        }
    else:
        bio_weight_ratio = {
            r: _as_float(bwr_raw, "land.bio_weight_ratio") for r in regions
        }
    land_settings = LandSettings(
        bio_weight_ratio=bio_weight_ratio,
        food_rent_feedback=_as_float(_opt(lraw, "food_rent_feedback", 2.0), "land.food_rent_feedback"),
        food_demand_index={
            r: _as_series(s, f"land.food_demand_index.{r}")
            for r, s in _opt(lraw, "food_demand_index", {}).items()
            if r != _LINES
        },
        yield_growth_rate=_as_float(_opt(lraw, "yield_growth_rate", 0.007), "land.yield_growth_rate"),
        yield_growth_until=_as_int(_opt(lraw, "yield_growth_until", 2060), "land.yield_growth_until"),
        luc_emission_tco2_km2=_as_float(
            _opt(lraw, "luc_emission_tco2_km2", 20000.0), "land.luc_emission_tco2_km2"
        ),
    )

    # --- climate ----------------------------------------------------------------
    km = _opt(raw, "climate", {})
    _check_keys(
        km,
        {"pool_fractions", "pool_timescales", "c0_ppm", "gtc_per_ppm", "f2x", "ecs",
         "heat_capacity_fast", "heat_capacity_slow", "heat_exchange", "ch4_lifetime",
         "ch4_efficiency", "leakage_rate", "gas_energy_density_mj_per_kg",
         "coal_ch4_mt_per_ej", "oil_ch4_mt_per_ej", "forcing_offset",
         "exogenous_forcing", "nonenergy_ch4_mt", "history_start", "history_co2",
         "history_ch4"},
        "climate",
    )
    fractions = tuple(
        _as_float(v, "climate.pool_fractions")
        for v in _opt(km, "pool_fractions", [0.2173, 0.2240, 0.2824, 0.2763])
    )
    timescales = tuple(
        _as_float(v, "climate.pool_timescales")
        for v in _opt(km, "pool_timescales", [394.4, 36.54, 4.304])
    )
    if len(fractions) != 4 or abs(sum(fractions) - 1.0) > 1e-12:
        raise ConfigError("pool fractions must be 4 values summing to 1", "climate.pool_fractions",
                          _line_of(km, "pool_fractions"))
    if len(timescales) != 3 or any(t <= 0 for t in timescales):
        raise ConfigError("pool timescales must be 3 positive values", "climate.pool_timescales")
    leakage = _as_float(_opt(km, "leakage_rate", 0.015), "climate.leakage_rate")
    if not 0.0 <= leakage <= 0.1:
        raise ConfigError("leakage_rate must be within [0, 0.1]", "climate.leakage_rate",
                          _line_of(km, "leakage_rate"))
    climate = ClimateParams(
        pool_fractions=fractions,  # type: ignore[arg-type]
        pool_timescales=timescales,  # type: ignore[arg-type]
        c0_ppm=_as_float(_opt(km, "c0_ppm", 278.0), "climate.c0_ppm"),
        gtc_per_ppm=_as_float(_opt(km, "gtc_per_ppm", 2.124), "climate.gtc_per_ppm"),
        f2x=_as_float(_opt(km, "f2x", 3.7), "climate.f2x"),
        ecs=_as_float(_opt(km, "ecs", 2.7), "climate.ecs"),
        heat_capacity_fast=_as_float(_opt(km, "heat_capacity_fast", 8.0), "climate.heat_capacity_fast"),
        heat_capacity_slow=_as_float(_opt(km, "heat_capacity_slow", 110.0), "climate.heat_capacity_slow"),
        heat_exchange=_as_float(_opt(km, "heat_exchange", 0.67), "climate.heat_exchange"),
        ch4_lifetime=_as_float(_opt(km, "ch4_lifetime", 12.0), "climate.ch4_lifetime"),
        ch4_efficiency=_as_float(_opt(km, "ch4_efficiency", 2.6e-4), "climate.ch4_efficiency"),
        leakage_rate=leakage,
        gas_energy_density_mj_per_kg=_as_float(
            _opt(km, "gas_energy_density_mj_per_kg", 50.0), "climate.gas_energy_density_mj_per_kg"
        ),
        coal_ch4_mt_per_ej=_as_float(_opt(km, "coal_ch4_mt_per_ej", 0.30), "climate.coal_ch4_mt_per_ej"),
        oil_ch4_mt_per_ej=_as_float(_opt(km, "oil_ch4_mt_per_ej", 0.12), "climate.oil_ch4_mt_per_ej"),
        forcing_offset=_as_float(_opt(km, "forcing_offset", 0.0), "climate.forcing_offset"),
        exogenous_forcing=_as_series(_opt(km, "exogenous_forcing", {1850: 0.0}), "climate.exogenous_forcing"),
        nonenergy_ch4=_as_series(_opt(km, "nonenergy_ch4_mt", {1850: 0.0}), "climate.nonenergy_ch4_mt"),
        history_start=_as_int(_opt(km, "history_start", 1850), "climate.history_start"),
        history_co2=_as_series(_opt(km, "history_co2", {1850: 0.0}), "climate.history_co2"),
        history_ch4=_as_series(_opt(km, "history_ch4", {1850: 0.0}), "climate.history_ch4"),
    )

    # --- solver -------------------------------------------------------------------
    sv = _opt(raw, "solver", {})
    _check_keys(
        sv,
        {"fixed_point_rounds", "fixed_point_tol", "damping", "bio_adjust_exponent",
         "max_bisection_iters"},
        "solver",
    )
    solver = SolverSettings(
        fixed_point_rounds=_as_int(_opt(sv, "fixed_point_rounds", 50), "solver.fixed_point_rounds"),
        fixed_point_tol=_as_float(_opt(sv, "fixed_point_tol", 1e-6), "solver.fixed_point_tol"),
        damping=_as_float(_opt(sv, "damping", 0.5), "solver.damping"),
        bio_adjust_exponent=_as_float(_opt(sv, "bio_adjust_exponent", 0.25), "solver.bio_adjust_exponent"),
        max_bisection_iters=_as_int(_opt(sv, "max_bisection_iters", 60), "solver.max_bisection_iters"),
    )

    # cross-checks that need several blocks at once
    for region in regions:
        if region not in fuel_prices:
            raise ConfigError(f"no fuel prices for region '{region}'", "energy.fuel_prices")
        if region not in biomass.base_price:
            raise ConfigError(f"no base biomass price for region '{region}'", "energy.biomass.base_price")
    for t in technologies:
        if t.sector not in {"electricity"} | {
            s for r in regions for s in demand[r]
        }:
            raise ConfigError(
                f"technology '{t.name}' serves unknown sector '{t.sector}'",
                "energy.technologies",
            )

    return ScenarioConfig(
        name=name,
        grid=grid,
        regions=regions,
        base_year=base_year,
        caps=caps,
        price_ceiling=price_ceiling,
        luc_linkage=luc_linkage,
        dac=dac,
        storage=storage,
        technologies=technologies,
        demand=demand,
        base_shares=base_shares,
        entrant_weights=entrant_weights,
        choice=choice,
        fuel_prices=fuel_prices,
        elec_margin=elec_margin,
        biomass=biomass,
        land=land,
        land_settings=land_settings,
        socioecon=socioecon,
        climate=climate,
        solver=solver,
        overrides=overrides,
    )


# ---------------------------------------------------------------------------
# Serialization and hashing


def serialize_scenario(config: ScenarioConfig) -> dict:
    """Canonical plain mapping: parse_mapping(serialize_scenario(c)) == c."""
    tech_rows = []
    for t in config.technologies:
        base = {
            "name": t.name, "sector": t.sector, "nonenergy_usd": t.nonenergy_cost,
            "emission_factor": t.emission_factor, "capture_fraction": t.capture_fraction,
            "water_m3": t.water_m3, "lifetime_yr": t.lifetime_yr,
            "available_from": t.available_from, "nonenergy_decline": t.nonenergy_decline,
            "intensity_decline": t.intensity_decline, "decline_until": t.decline_until,
        }
        if t.fuels:
            for fuel, gj in t.fuels:
                tech_rows.append({**base, "fuel": fuel, "gj_per_unit": gj})
        else:
            tech_rows.append({**base, "fuel": "none", "gj_per_unit": 0.0})
    demand_rows = [
        {
            "region": r, "sector": s, "base_demand_ej": d.base_demand,
            "income_elasticity": d.income_elasticity, "price_elasticity": d.price_elasticity,
        }
        for r in config.regions
        for s, d in sorted(config.demand[r].items())
    ]
    share_rows = []
    for r in config.regions:
        sectors = sorted(set(config.base_shares[r]) | set(config.entrant_weights[r]))
        for s in sectors:
            shares = config.base_shares[r].get(s, {})
            weights = config.entrant_weights[r].get(s, {})
            for tech in sorted(set(shares) | set(weights)):
                row = {"region": r, "sector": s, "tech": tech,
                       "base_share": shares.get(tech, 0.0)}
                if tech in weights:
                    row["weight"] = weights[tech]
                share_rows.append(row)
    storage_rows = [
        {"region": r, "capacity_gt": cap, "cost_usd_t": cost}
        for r in sorted(config.storage)
        for cap, cost in config.storage[r].tiers
    ]
    land_rows = [
        {
            "region": r, "use": u.name, "base_area_km2": u.base_area_km2,
            "base_rent_usd_km2": u.base_rent, "uptake_tco2_km2": u.uptake_tco2_km2,
            "yield_gj_km2": u.yield_gj_km2, "irrigation_m3_km2": u.irrigation_m3_km2,
            "non_commercial": 1 if u.non_commercial else 0,
        }
        for r in config.regions
        for u in config.land[r].uses
    ]

    caps_out = {}
    for r, spec in config.caps.items():
        entry: dict[str, Any] = {
            "base_year": spec.base_year,
            "net_zero_year": spec.net_zero_year,
            "base_emissions": "auto" if spec.base_emissions is None else spec.base_emissions,
        }
        if spec.explicit is not None:
            entry["values"] = {y: v for y, v in spec.explicit.knots}
        caps_out[r] = entry

    cl = config.climate
    some_region = config.regions[0]
    return {
        "name": config.name,
        "grid": {"start_year": config.grid.start_year, "end_year": config.grid.end_year,
                 "step": config.grid.step},
        "regions": list(config.regions),
        "policy": {
            "caps": caps_out,
            "price_ceiling": config.price_ceiling,
            "luc_linkage": {
                "start_year": config.luc_linkage.start_year,
                "start_fraction": config.luc_linkage.start_fraction,
                "full_fraction_year": config.luc_linkage.full_fraction_year,
            },
        },
        "dac": {
            "enabled": config.dac.enabled,
            "available_from": config.dac.available_from,
            "gas_2020": config.dac.gas_2020, "gas_2050": config.dac.gas_2050,
            "elec_2020": config.dac.elec_2020, "elec_2050": config.dac.elec_2050,
            "nonenergy_2020": config.dac.nonenergy_2020,
            "nonenergy_2050": config.dac.nonenergy_2050,
            "water_m3_per_t": config.dac.water_m3_per_t,
            "lifetime_yr": config.dac.lifetime_yr,
            "heat_capture_fraction": config.dac.heat_capture_fraction,
            "supply_slope": dict(sorted(config.dac.supply_slope.items())),
        },
        "storage": {"table": {"rows": storage_rows}},
        "energy": {
            "base_year": config.base_year,
            "technologies": {"rows": tech_rows},
            "demand": {"rows": demand_rows},
            "shares": {"rows": share_rows},
            "choice": {
                "default_gamma": config.choice.default_gamma,
                "gammas": dict(sorted(config.choice.gammas.items())),
                "gamma_land": config.choice.gamma_land,
                "cost_floor": config.choice.cost_floor,
            },
            "fuel_prices": {
                r: {f: s.to_mapping() for f, s in sorted(config.fuel_prices[r].items())}
                for r in sorted(config.fuel_prices)
            },
            "elec_margin": config.elec_margin,
            "biomass": {
                "base_price": dict(sorted(config.biomass.base_price.items())),
                "harvest_cost": config.biomass.harvest_cost,
                "price_floor": config.biomass.price_floor,
                "price_ceiling": config.biomass.price_ceiling,
                "residue_supply_ej": {
                    r: s.to_mapping() for r, s in sorted(config.biomass.residue_supply.items())
                },
            },
        },
        "land": {
            "table": {"rows": land_rows},
            "protection_fraction": config.land[some_region].protection_fraction,
            "bio_weight_ratio": dict(sorted(config.land_settings.bio_weight_ratio.items())),
            "food_rent_feedback": config.land_settings.food_rent_feedback,
            "food_demand_index": {
                r: s.to_mapping() for r, s in sorted(config.land_settings.food_demand_index.items())
            },
            "yield_growth_rate": config.land_settings.yield_growth_rate,
            "yield_growth_until": config.land_settings.yield_growth_until,
            "luc_emission_tco2_km2": config.land_settings.luc_emission_tco2_km2,
        },
        "socioecon": {
            r: {
                "population": config.socioecon[r].population.to_mapping(),
                "gdp_per_capita": config.socioecon[r].gdp_per_capita.to_mapping(),
                "municipal_water_m3_per_capita": config.socioecon[r].municipal_water_m3_per_capita.to_mapping(),
                "service_growth_scale": config.socioecon[r].service_growth_scale,
            }
            for r in config.regions
        },
        "climate": {
            "pool_fractions": list(cl.pool_fractions),
            "pool_timescales": list(cl.pool_timescales),
            "c0_ppm": cl.c0_ppm, "gtc_per_ppm": cl.gtc_per_ppm, "f2x": cl.f2x,
            "ecs": cl.ecs, "heat_capacity_fast": cl.heat_capacity_fast,
            "heat_capacity_slow": cl.heat_capacity_slow, "heat_exchange": cl.heat_exchange,
            "ch4_lifetime": cl.ch4_lifetime, "ch4_efficiency": cl.ch4_efficiency,
            "leakage_rate": cl.leakage_rate,
            "gas_energy_density_mj_per_kg": cl.gas_energy_density_mj_per_kg,
            "coal_ch4_mt_per_ej": cl.coal_ch4_mt_per_ej,
            "oil_ch4_mt_per_ej": cl.oil_ch4_mt_per_ej,
            "forcing_offset": cl.forcing_offset,
            "exogenous_forcing": cl.exogenous_forcing.to_mapping(),
            "nonenergy_ch4_mt": cl.nonenergy_ch4.to_mapping(),
            "history_start": cl.history_start,
            "history_co2": cl.history_co2.to_mapping(),
            "history_ch4": cl.history_ch4.to_mapping(),
        },
        "solver": {
            "fixed_point_rounds": config.solver.fixed_point_rounds,
            "fixed_point_tol": config.solver.fixed_point_tol,
            "damping": config.solver.damping,
            "bio_adjust_exponent": config.solver.bio_adjust_exponent,
            "max_bisection_iters": config.solver.max_bisection_iters,
        },
        "applied_overrides": [{"path": o.path, "value": o.value} for o in config.overrides],
    }


def config_hash(config: ScenarioConfig) -> str:
    canonical = json.dumps(serialize_scenario(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def shipped_path(kind: str, name: str) -> str:
    """Absolute path of a packaged scenario/sweep/calibration file."""
    root = resources.files("nziam").joinpath("data")
    candidate = root.joinpath(kind).joinpath(name)
    return str(candidate)
