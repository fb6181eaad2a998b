"""One-at-a-time sensitivity sweep producing a tornado table.

Each variant reruns the base scenario with its declared overrides applied;
the response metric (by default DAC removal in a chosen region and year) is
compared against the base run. Variants run in separate processes.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import yaml

from .config import Override, parse_scenario, serialize_scenario
from .errors import ConfigError, NziamError
from .report import RunReport, run_scenario, write_csv


@dataclass(frozen=True)
class SweepMetric:
    region: str = "china"
    field: str = "dac_removal"
    year: int = 2060


@dataclass(frozen=True)
class SweepVariant:
    name: str
    overrides: tuple[Override, ...] = ()


@dataclass(frozen=True)
class SweepSpec:
    name: str
    base_path: str
    metric: SweepMetric = SweepMetric()
    variants: tuple[SweepVariant, ...] = ()


@dataclass
class VariantOutcome:
    name: str
    status: str  # ok | failed
    metric: float | None = None
    pct_change: float | None = None
    error: str = ""
    report: RunReport | None = None
    extra_diff_sections: list[str] = field(default_factory=list)


def parse_sweep_spec(path: str) -> SweepSpec:
    if not os.path.exists(path):
        raise ConfigError(f"sweep spec not found: {path}")
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError("sweep spec must be a mapping")
    for key in ("name", "base", "variants"):
        if key not in raw:
            raise ConfigError(f"sweep spec missing '{key}'", key)
    base_dir = os.path.dirname(os.path.abspath(path))
    base_path = raw["base"]
    if not os.path.isabs(base_path):
        base_path = os.path.normpath(os.path.join(base_dir, base_path))
    m = raw.get("metric", {}) or {}
    metric = SweepMetric(
        region=m.get("region", "china"),
        field=m.get("field", "dac_removal"),
        year=int(m.get("year", 2060)),
    )
    variants = []
    seen = set()
    for i, v in enumerate(raw["variants"]):
        vname = v.get("name")
        if not vname:
            raise ConfigError(f"variant [{i}] missing name", "variants")
        if vname in seen:
            raise ConfigError(f"duplicate variant name '{vname}'", "variants")
        seen.add(vname)
        overrides = tuple(
            Override(path=o["path"], value=o["value"]) for o in v.get("overrides", [])
        )
        variants.append(SweepVariant(name=vname, overrides=overrides))
    return SweepSpec(
        name=raw["name"], base_path=base_path, metric=metric, variants=tuple(variants)
    )


def _metric_value(report: RunReport, metric: SweepMetric) -> float:
    region = report.summary["regions"].get(metric.region)
    if region is None:
        raise NziamError(f"metric region '{metric.region}' missing from summary")
    key_map = {
        "dac_removal": f"dac_gt_{metric.year}",
        "carbon_price": f"carbon_price_{metric.year}",
        "negative_emissions": f"negative_emissions_gt_{metric.year}",
    }
    key = key_map.get(metric.field, metric.field)
    if key not in region:
        raise NziamError(f"metric '{key}' missing from summary")
    return float(region[key])


def _flatten(node, prefix="") -> dict[str, object]:
    out = {}
    if isinstance(node, dict):
        for k, v in node.items():
            out.update(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(node, list):
        for i, v in enumerate(node):
            out.update(_flatten(v, f"{prefix}[{i}]"))
    else:
        out[prefix] = node
    return out


def config_diff_sections(base_config_map: dict, variant_config_map: dict) -> list[str]:
    """Top-level config sections whose resolved values differ."""
    a = _flatten(base_config_map)
    b = _flatten(variant_config_map)
    sections = set()
    for key in set(a) | set(b):
        if a.get(key, "__missing__") != b.get(key, "__missing__"):
            top = key.split(".", 1)[0].split("[", 1)[0]
            if top not in ("applied_overrides", "name"):
                sections.add(top)
    return sorted(sections)


def _run_variant(args: tuple) -> dict:
    """Worker entry point: run one variant in its own directory."""
    base_path, overrides, out_dir = args
    try:
        config = parse_scenario(
            base_path, extra_overrides=[Override(**o) for o in overrides]
        )
        report = run_scenario(config, out_dir)
        return {
            "status": "ok",
            "summary": report.summary,
            "config_hash": report.config_hash,
            "config_map": serialize_scenario(config),
            "report": {
                "scenario": report.scenario,
                "config_hash": report.config_hash,
                "overrides": report.overrides,
                "out_dir": report.out_dir,
                "paths": report.paths,
                "summary": report.summary,
            },
        }
    except NziamError as exc:
        return {"status": "failed", "error": str(exc)}


def run_sweep(spec: SweepSpec, out_dir: str, workers: int = 1) -> list[VariantOutcome]:
    """Run the base plus every variant; return the tornado table rows.

    Failed variants are reported and skipped, never fatal. Rows are sorted by
    absolute percent change, largest first.
    """
    os.makedirs(out_dir, exist_ok=True)
    base_config = parse_scenario(spec.base_path)
    base_report = run_scenario(base_config, os.path.join(out_dir, "base"))
    base_metric = _metric_value(base_report, spec.metric)
    base_map = serialize_scenario(base_config)

    jobs = [
        (
            spec.base_path,
            [{"path": o.path, "value": o.value} for o in v.overrides],
            os.path.join(out_dir, v.name),
        )
        for v in spec.variants
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw_results = list(pool.map(_run_variant, jobs))
    else:
        raw_results = [_run_variant(j) for j in jobs]

    outcomes: list[VariantOutcome] = []
    for variant, res in zip(spec.variants, raw_results):
        if res["status"] != "ok":
            outcomes.append(
                VariantOutcome(name=variant.name, status="failed", error=res["error"])
            )
            continue
        rep = RunReport(**res["report"])
        value = _metric_value(rep, spec.metric)
        pct = (value - base_metric) / base_metric * 100.0 if base_metric != 0.0 else 0.0
        declared = {o.path.split(".", 1)[0] for o in variant.overrides}
        extra = [
            s for s in config_diff_sections(base_map, res["config_map"]) if s not in declared
        ]
        outcomes.append(
            VariantOutcome(
                name=variant.name,
                status="ok",
                metric=value,
                pct_change=pct,
                report=rep,
                extra_diff_sections=extra,
            )
        )

    outcomes.sort(key=lambda o: -(abs(o.pct_change) if o.pct_change is not None else -1.0))
    rows = [
        (
            o.name, o.status,
            "" if o.metric is None else repr(o.metric),
            "" if o.pct_change is None else repr(o.pct_change),
            o.error,
        )
        for o in outcomes
    ]
    write_csv(
        os.path.join(out_dir, "tornado.csv"),
        ("variant", "status", "metric", "pct_change_vs_base", "error"),
        rows,
    )
    meta = {
        "sweep": spec.name,
        "base": {"config_hash": base_report.config_hash, "metric": base_metric},
        "metric": {
            "region": spec.metric.region,
            "field": spec.metric.field,
            "year": spec.metric.year,
        },
        "variants": [
            {
                "name": o.name,
                "status": o.status,
                "metric": o.metric,
                "pct_change": o.pct_change,
                "error": o.error,
                "extra_diff_sections": o.extra_diff_sections,
            }
            for o in outcomes
        ],
    }
    with open(os.path.join(out_dir, "sweep_metadata.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return outcomes
