"""Run a scenario end to end and write its result tables.

Every run directory gets the same set of CSVs plus a metadata sidecar with
the config hash, applied overrides, and headline summary metrics. Floats are
written with repr so that re-reading them reproduces the exact values and
reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .config import ScenarioConfig, parse_scenario, serialize_scenario
from .landwater import LAND_USES
from .solver import RunResult, run_path

SCHEMA_VERSION = 1

PRIMARY_CATEGORIES = (
    "coal", "coal_ccs", "gas", "gas_ccs", "oil",
    "biomass", "biomass_ccs", "nuclear", "renewable",
)

LEDGER_COLUMNS = (
    "scenario", "region", "year", "carbon_price_usd_t", "cap_gtco2", "slack",
    "gross_gtco2", "beccs_gtco2", "dac_gtco2", "afforestation_gtco2",
    "luc_gtco2", "net_gtco2", "ch4_mt", "fossil_captured_gtco2",
    "storage_injected_gtco2", "cumulative_storage_gtco2", "storage_cost_usd_t",
)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, header: tuple[str, ...] | list[str], rows: list) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


@dataclass
class RunReport:
    scenario: str
    config_hash: str
    overrides: list[dict]
    out_dir: str
    paths: dict[str, str]
    summary: dict


def run_scenario(config_or_path: ScenarioConfig | str, out_dir: str) -> RunReport:
    """Execute one scenario and write all result CSVs into `out_dir`."""
    if isinstance(config_or_path, ScenarioConfig):
        config = config_or_path
    else:
        config = parse_scenario(config_or_path)
    result = run_path(config)
    return write_report(result, out_dir)


def write_report(result: RunResult, out_dir: str) -> RunReport:
    config = result.config
    os.makedirs(out_dir, exist_ok=True)
    name = config.name

    # ledger ----------------------------------------------------------------
    ledger_rows = []
    cumulative: dict[str, float] = {r: 0.0 for r in config.regions}
    for row in result.rows:
        cumulative[row.region] += row.storage_injected * config.grid.step
        ledger_rows.append(
            (
                name, row.region, row.year, row.carbon_price,
                "" if row.cap is None else repr(row.cap), row.slack,
                row.gross, row.beccs, row.dac_removal, row.afforestation,
                row.luc, row.net, row.ch4_mt, row.fossil_captured,
                row.storage_injected, cumulative[row.region], row.storage_cost,
            )
        )

    # energy ------------------------------------------------------------------
    energy_header = ["scenario", "region", "year"] + list(PRIMARY_CATEGORIES) + [
        "dac_heat", "total",
    ]
    energy_rows = []
    for row in result.rows:
        cats = [row.primary.get(c, 0.0) for c in PRIMARY_CATEGORIES]
        energy_rows.append(
            (name, row.region, row.year, *cats, row.dac_heat_ej, sum(cats))
        )

    # water ---------------------------------------------------------------------
    water_rows = [
        (
            name, row.region, row.year, row.water.food_irrigation,
            row.water.bioenergy_irrigation, row.water.municipal,
            row.water.industrial_power, row.water.dac, row.water.total,
        )
        for row in result.rows
    ]

    # land ----------------------------------------------------------------------
    land_rows = []
    for row in result.rows:
        base = {u.name: u.base_area_km2 for u in config.land[row.region].uses}
        for use in LAND_USES:
            area = row.land_areas.get(use, 0.0)
            land_rows.append((name, row.region, row.year, use, area, area - base[use]))

    # sectors ---------------------------------------------------------------------
    sector_rows = []
    for row in result.rows:
        for sector in sorted(row.sector_gross):
            sector_rows.append(
                (
                    name, row.region, row.year, sector, row.sector_gross[sector],
                    row.demands.get(sector, 0.0), row.composites.get(sector, 0.0),
                )
            )

    # prices ----------------------------------------------------------------------
    price_rows = []
    for row in result.rows:
        for fuel in sorted(row.prices):
            price_rows.append((name, row.region, row.year, fuel, row.prices[fuel]))

    # climate -----------------------------------------------------------------------
    net_by_year = result.global_net_co2()
    climate_rows = [
        (
            name, r.year, r.co2_ppm, r.forcing_w_m2, r.anomaly_k, r.ch4_mt,
            net_by_year.get(r.year, 0.0),
        )
        for r in result.climate_rows
    ]

    paths = {
        "ledger": os.path.join(out_dir, "ledger.csv"),
        "energy": os.path.join(out_dir, "energy.csv"),
        "water": os.path.join(out_dir, "water.csv"),
        "land": os.path.join(out_dir, "land.csv"),
        "sectors": os.path.join(out_dir, "sectors.csv"),
        "prices": os.path.join(out_dir, "prices.csv"),
        "climate": os.path.join(out_dir, "climate.csv"),
    }
    write_csv(paths["ledger"], LEDGER_COLUMNS, ledger_rows)
    write_csv(paths["energy"], energy_header, energy_rows)
    write_csv(
        paths["water"],
        ("scenario", "region", "year", "food_irrigation_km3", "bioenergy_irrigation_km3",
         "municipal_km3", "industrial_power_km3", "dac_km3", "total_km3"),
        water_rows,
    )
    write_csv(
        paths["land"],
        ("scenario", "region", "year", "use", "area_km2", "delta_from_base_km2"),
        land_rows,
    )
    write_csv(
        paths["sectors"],
        ("scenario", "region", "year", "sector", "gross_gtco2", "demand_ej", "composite_usd_gj"),
        sector_rows,
    )
    write_csv(
        paths["prices"],
        ("scenario", "region", "year", "fuel", "usd_per_gj"),
        price_rows,
    )
    write_csv(
        paths["climate"],
        ("scenario", "year", "co2_ppm", "forcing_w_m2", "anomaly_k", "ch4_excess_mt",
         "global_net_co2_gt"),
        climate_rows,
    )

    summary = summarize(result)
    report = RunReport(
        scenario=name,
        config_hash=config.config_hash,
        overrides=[{"path": o.path, "value": o.value} for o in config.overrides],
        out_dir=out_dir,
        paths=paths,
        summary=summary,
    )
    metadata = {
        "schema_version": SCHEMA_VERSION,
        "scenario": name,
        "config_hash": report.config_hash,
        "overrides": report.overrides,
        "summary": summary,
        "paths": {k: os.path.basename(v) for k, v in paths.items()},
        "max_bisection_iters": result.max_bisection_iters,
        "config": serialize_scenario(config),
    }
    meta_path = os.path.join(out_dir, "run_metadata.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    report.paths["metadata"] = meta_path
    return report


def summarize(result: RunResult) -> dict:
    config = result.config
    years = config.grid.years()
    summary: dict = {"regions": {}}
    y_mid = 2060 if 2060 in years else years[-1]
    y_end = years[-1]
    for region in config.regions:
        try:
            mid = result.row(region, y_mid)
        except KeyError:
            continue
        negatives = mid.beccs + mid.dac_removal + mid.afforestation
        base = result.row(region, config.base_year)
        base_total = sum(base.primary.get(c, 0.0) for c in PRIMARY_CATEGORIES)
        coal_share = (
            (base.primary.get("coal", 0.0) + base.primary.get("coal_ccs", 0.0)) / base_total
            if base_total > 0
            else 0.0
        )
        summary["regions"][region] = {
            f"dac_gt_{y_mid}": mid.dac_removal,
            f"carbon_price_{y_mid}": mid.carbon_price,
            f"negative_emissions_gt_{y_mid}": negatives,
            f"net_gt_{y_mid}": mid.net,
            f"coal_share_{config.base_year}": coal_share,
        }
    if result.climate_rows:
        summary[f"anomaly_{y_end}_k"] = result.climate_rows[-1].anomaly_k
        summary[f"co2_ppm_{y_end}"] = result.climate_rows[-1].co2_ppm
    summary["max_bisection_iters"] = result.max_bisection_iters
    return summary
