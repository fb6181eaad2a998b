"""Figure-ready datasets and rendered plots from completed run directories.

Reads the CSVs a run wrote, merges scenarios, and emits one tidy CSV per
figure plus a PNG render. The primary-energy table reports DAC process heat
as its own fuel category and subtracts it from gas CCS so the stack has no
double counting.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import NziamError
from .landwater import LAND_USES
from .report import PRIMARY_CATEGORIES, write_csv

WATER_CATEGORIES = (
    "food_irrigation", "bioenergy_irrigation", "municipal", "industrial_power", "dac",
)

FIG3_CATEGORIES = tuple(PRIMARY_CATEGORIES) + ("dac_heat",)


def _read_csv(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_run(run_dir: str) -> dict:
    meta_path = os.path.join(run_dir, "run_metadata.json")
    if not os.path.exists(meta_path):
        raise NziamError(f"not a run directory (no run_metadata.json): {run_dir}")
    with open(meta_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    data = {"meta": meta, "dir": run_dir}
    for table in ("ledger", "energy", "water", "land", "sectors", "climate"):
        data[table] = _read_csv(os.path.join(run_dir, f"{table}.csv"))
    return data


def emit_figure_data(run_dirs: list[str], out_dir: str, region: str = "china") -> dict[str, str]:
    """Build the per-figure CSV bundle and render PNGs; returns output paths."""
    runs = [load_run(d) for d in run_dirs]
    if not runs:
        raise NziamError("no run directories given")
    os.makedirs(out_dir, exist_ok=True)
    scenarios = [r["meta"]["scenario"] for r in runs]
    if len(set(scenarios)) != len(scenarios):
        raise NziamError(f"duplicate scenario names in bundle: {scenarios}")
    paths: dict[str, str] = {}

    # Fig 1: climate panels -------------------------------------------------
    fig1_rows = []
    for r in runs:
        for row in r["climate"]:
            fig1_rows.append(
                (
                    r["meta"]["scenario"], int(row["year"]),
                    float(row["global_net_co2_gt"]), float(row["co2_ppm"]),
                    float(row["anomaly_k"]),
                )
            )
    paths["fig1"] = os.path.join(out_dir, "fig1_climate.csv")
    write_csv(
        paths["fig1"],
        ("scenario", "year", "global_net_co2_gt", "co2_ppm", "anomaly_k"),
        fig1_rows,
    )

    # Fig 2: sectoral emissions and removals ---------------------------------
    fig2_rows = []
    for r in runs:
        scen = r["meta"]["scenario"]
        for row in r["sectors"]:
            if row["region"] != region:
                continue
            fig2_rows.append(
                (scen, region, int(row["year"]), row["sector"], float(row["gross_gtco2"]))
            )
        for row in r["ledger"]:
            if row["region"] != region:
                continue
            year = int(row["year"])
            fig2_rows.append((scen, region, year, "luc", float(row["luc_gtco2"])))
            for source, col in (
                ("beccs", "beccs_gtco2"),
                ("dac", "dac_gtco2"),
                ("afforestation", "afforestation_gtco2"),
            ):
                fig2_rows.append((scen, region, year, source, -float(row[col])))
            fig2_rows.append((scen, region, year, "net", float(row["net_gtco2"])))
    paths["fig2"] = os.path.join(out_dir, "fig2_emissions.csv")
    write_csv(paths["fig2"], ("scenario", "region", "year", "source", "gtco2"), fig2_rows)

    # Fig 3: primary energy with the DAC heat correction ----------------------
    fig3_rows = []
    for r in runs:
        scen = r["meta"]["scenario"]
        for row in r["energy"]:
            if row["region"] != region:
                continue
            year = int(row["year"])
            dac_heat = float(row["dac_heat"])
            for cat in PRIMARY_CATEGORIES:
                value = float(row[cat])
                if cat == "gas_ccs":
                    value -= dac_heat  # reported net of DAC process heat
                fig3_rows.append((scen, region, year, cat, value))
            fig3_rows.append((scen, region, year, "dac_heat", dac_heat))
    paths["fig3"] = os.path.join(out_dir, "fig3_primary_energy.csv")
    write_csv(paths["fig3"], ("scenario", "region", "year", "category", "ej"), fig3_rows)

    # Fig 4: water ledger -------------------------------------------------------
    fig4_rows = []
    for r in runs:
        scen = r["meta"]["scenario"]
        for row in r["water"]:
            if row["region"] != region:
                continue
            year = int(row["year"])
            for cat in WATER_CATEGORIES:
                fig4_rows.append((scen, region, year, cat, float(row[f"{cat}_km3"])))
    paths["fig4"] = os.path.join(out_dir, "fig4_water.csv")
    write_csv(paths["fig4"], ("scenario", "region", "year", "category", "km3"), fig4_rows)

    # Fig 5: land-use change ------------------------------------------------------
    fig5_rows = []
    for r in runs:
        scen = r["meta"]["scenario"]
        for row in r["land"]:
            if row["region"] != region:
                continue
            fig5_rows.append(
                (scen, region, int(row["year"]), row["use"], float(row["delta_from_base_km2"]))
            )
    paths["fig5"] = os.path.join(out_dir, "fig5_land.csv")
    write_csv(paths["fig5"], ("scenario", "region", "year", "use", "delta_km2"), fig5_rows)

    _render_all(runs, region, out_dir, paths)
    return paths


def _by_scenario(rows: list[tuple], key_idx: int, year_idx: int, val_idx: int):
    out: dict[str, dict[str, dict[int, float]]] = {}
    for row in rows:
        out.setdefault(row[0], {}).setdefault(row[key_idx], {})[row[year_idx]] = row[val_idx]
    return out


def _render_all(runs: list[dict], region: str, out_dir: str, paths: dict[str, str]) -> None:
    scenarios = [r["meta"]["scenario"] for r in runs]

    # fig1: three panels
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    for r in runs:
        years = [int(x["year"]) for x in r["climate"]]
        axes[0].plot(years, [float(x["anomaly_k"]) for x in r["climate"]], label=r["meta"]["scenario"])
        axes[1].plot(years, [float(x["co2_ppm"]) for x in r["climate"]])
        axes[2].plot(years, [float(x["global_net_co2_gt"]) for x in r["climate"]])
    axes[0].set_ylabel("Temperature anomaly (K)")
    axes[1].set_ylabel("CO$_2$ concentration (ppm)")
    axes[2].set_ylabel("Global net CO$_2$ (Gt/yr)")
    axes[2].axhline(0.0, color="k", lw=0.5)
    for ax in axes:
        ax.set_xlabel("Year")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "fig1_climate.png"), dpi=150)
    plt.close(fig)
    paths["fig1_png"] = os.path.join(out_dir, "fig1_climate.png")

    # fig2: stacked emissions per scenario
    fig, axes = plt.subplots(1, len(runs), figsize=(4.5 * len(runs), 4), squeeze=False)
    for ax, r in zip(axes[0], runs):
        rows = [x for x in r["sectors"] if x["region"] == region]
        years = sorted({int(x["year"]) for x in rows})
        sectors = sorted({x["sector"] for x in rows})
        series = {
            s: [sum(float(x["gross_gtco2"]) for x in rows if x["sector"] == s and int(x["year"]) == y) for y in years]
            for s in sectors
        }
        ax.stackplot(years, series.values(), labels=series.keys())
        led = {int(x["year"]): x for x in r["ledger"] if x["region"] == region}
        removals = {
            "beccs": [-float(led[y]["beccs_gtco2"]) for y in years],
            "dac": [-float(led[y]["dac_gtco2"]) for y in years],
            "afforestation": [-float(led[y]["afforestation_gtco2"]) for y in years],
        }
        ax.stackplot(years, removals.values(), labels=removals.keys(), alpha=0.7)
        ax.plot(years, [float(led[y]["net_gtco2"]) for y in years], "k-", lw=1.5, label="net")
        ax.set_title(r["meta"]["scenario"], fontsize=9)
        ax.set_ylabel("GtCO$_2$/yr")
        ax.axhline(0.0, color="k", lw=0.5)
    axes[0][0].legend(fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "fig2_emissions.png"), dpi=150)
    plt.close(fig)
    paths["fig2_png"] = os.path.join(out_dir, "fig2_emissions.png")

    # fig3: primary energy stacks
    fig, axes = plt.subplots(1, len(runs), figsize=(4.5 * len(runs), 4), squeeze=False)
    for ax, r in zip(axes[0], runs):
        rows = [x for x in r["energy"] if x["region"] == region]
        years = [int(x["year"]) for x in rows]
        stacks = []
        for cat in FIG3_CATEGORIES:
            if cat == "dac_heat":
                stacks.append([float(x["dac_heat"]) for x in rows])
            elif cat == "gas_ccs":
                stacks.append([float(x["gas_ccs"]) - float(x["dac_heat"]) for x in rows])
            else:
                stacks.append([float(x[cat]) for x in rows])
        ax.stackplot(years, stacks, labels=FIG3_CATEGORIES)
        ax.set_title(r["meta"]["scenario"], fontsize=9)
        ax.set_ylabel("Primary energy (EJ/yr)")
    axes[0][0].legend(fontsize=6, ncol=2)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "fig3_primary_energy.png"), dpi=150)
    plt.close(fig)
    paths["fig3_png"] = os.path.join(out_dir, "fig3_primary_energy.png")

    # fig4: water stacks
    fig, axes = plt.subplots(1, len(runs), figsize=(4.5 * len(runs), 4), squeeze=False)
    for ax, r in zip(axes[0], runs):
        rows = [x for x in r["water"] if x["region"] == region]
        years = [int(x["year"]) for x in rows]
        ax.stackplot(
            years,
            [[float(x[f"{c}_km3"]) for x in rows] for c in WATER_CATEGORIES],
            labels=WATER_CATEGORIES,
        )
        ax.set_title(r["meta"]["scenario"], fontsize=9)
        ax.set_ylabel("Water consumption (km$^3$/yr)")
    axes[0][0].legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "fig4_water.png"), dpi=150)
    plt.close(fig)
    paths["fig4_png"] = os.path.join(out_dir, "fig4_water.png")

    # fig5: land-use change lines
    fig, axes = plt.subplots(1, len(runs), figsize=(4.5 * len(runs), 4), squeeze=False)
    for ax, r in zip(axes[0], runs):
        rows = [x for x in r["land"] if x["region"] == region]
        years = sorted({int(x["year"]) for x in rows})
        for use in LAND_USES:
            vals = [
                float(x["delta_from_base_km2"])
                for y in years
                for x in rows
                if int(x["year"]) == y and x["use"] == use
            ]
            ax.plot(years, vals, label=use)
        ax.set_title(r["meta"]["scenario"], fontsize=9)
        ax.set_ylabel("Land-use change (km$^2$)")
        ax.axhline(0.0, color="k", lw=0.5)
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "fig5_land.png"), dpi=150)
    plt.close(fig)
    paths["fig5_png"] = os.path.join(out_dir, "fig5_land.png")


def render_tornado(tornado_csv: str, out_path: str) -> None:
    rows = _read_csv(tornado_csv)
    rows = [r for r in rows if r["status"] == "ok" and r["pct_change_vs_base"] != ""]
    rows.sort(key=lambda r: abs(float(r["pct_change_vs_base"])))
    names = [r["variant"] for r in rows]
    values = [float(r["pct_change_vs_base"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 0.5 * max(len(rows), 4) + 1))
    colors = ["#b2182b" if v < 0 else "#2166ac" for v in values]
    ax.barh(names, values, color=colors)
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("Change in 2060 DAC deployment vs base (%)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
