"""Service demand, logit technology competition, and vintage stock turnover.

The per-period dispatch is a pure function: surviving vintages operate at
their build-year coefficients, new capacity fills the demand gap and is
allocated across available technologies by a calibrated logit over levelized
costs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .technoecon import (
    Technology,
    captured_factor,
    net_emission_factor,
    tech_levelized_cost,
)


@dataclass(frozen=True)
class ChoiceParams:
    """Logit exponents per decision node plus the share-computation cost floor."""

    default_gamma: float = 3.0
    gammas: Mapping[str, float] = field(default_factory=dict)
    gamma_land: float = 1.0
    cost_floor: float = 0.1  # $/unit; keeps removal credits from flipping costs negative

    def gamma_for(self, node: str) -> float:
        return self.gammas.get(node, self.default_gamma)


@dataclass(frozen=True)
class SectorDemand:
    """Base-year service demand with income and price elasticities."""

    sector: str
    base_demand: float  # EJ service/yr at the calibration year
    income_elasticity: float
    price_elasticity: float
    base_gdp_per_capita: float = 1.0
    base_population: float = 1.0
    base_price: float = 1.0


@dataclass(frozen=True)
class Vintage:
    tech: str
    build_year: int
    capacity: float  # units of output/yr
    lifetime_yr: int


@dataclass(frozen=True)
class VintageStock:
    entries: tuple[Vintage, ...] = ()

    def total_capacity(self) -> float:
        return sum(v.capacity for v in self.entries)

    def add(self, vintages: Sequence[Vintage]) -> "VintageStock":
        return VintageStock(entries=self.entries + tuple(v for v in vintages if v.capacity > 0.0))


def retire_and_roll(stock: VintageStock, year: int) -> VintageStock:
    """Drop vintages whose age has reached their lifetime; keep the rest unchanged."""
    return VintageStock(
        entries=tuple(v for v in stock.entries if (year - v.build_year) < v.lifetime_yr)
    )


def logit_shares(
    costs: Sequence[float], weights: Sequence[float], gamma: float
) -> list[float]:
    """share_i = w_i c_i^-gamma / sum_j w_j c_j^-gamma.

    Costs must be positive wherever the weight is positive.
    """
    if len(costs) != len(weights):
        raise ValueError("costs and weights must have equal length")
    terms = []
    for c, w in zip(costs, weights):
        if w < 0:
            raise ValueError("weights must be non-negative")
        if w == 0.0:
            terms.append(0.0)
            continue
        if c <= 0.0:
            raise ValueError(f"non-positive cost {c} with positive weight")
        terms.append(w * c**-gamma)
    total = sum(terms)
    if total <= 0.0:
        raise ValueError("at least one option needs a positive weight")
    return [t / total for t in terms]


def calibrate_weights(
    base_shares: Mapping[str, float],
    costs: Mapping[str, float],
    gamma: float,
    explicit_weights: Mapping[str, float] | None = None,
) -> dict[str, float]:
    """Invert the logit so base-year costs reproduce base-year shares.

    An explicit weight (for later entrants, or to override the calibrated
    inertia of a young incumbent) replaces the share-derived value; it is
    expressed relative to the normalized incumbent weights.
    """
    weights: dict[str, float] = {}
    for tech, share in base_shares.items():
        if share <= 0.0:
            continue
        weights[tech] = share / costs[tech] ** -gamma
    total = sum(weights.values())
    if total <= 0.0:
        raise ValueError("no positive base shares to calibrate against")
    weights = {t: w / total for t, w in weights.items()}
    for tech, w in (explicit_weights or {}).items():
        weights[tech] = w
    return weights


def service_demand(
    sector: SectorDemand,
    gdp_per_capita: float,
    population: float,
    composite_price: float,
) -> float:
    """Demand scaled from the calibration year by income, population, and price."""
    if gdp_per_capita <= 0 or population <= 0 or composite_price <= 0:
        raise ValueError("demand drivers must be positive")
    income_ratio = gdp_per_capita / sector.base_gdp_per_capita
    pop_ratio = population / sector.base_population
    price_ratio = composite_price / sector.base_price
    return (
        sector.base_demand
        * pop_ratio
        * income_ratio**sector.income_elasticity
        * price_ratio**sector.price_elasticity
    )


@dataclass
class SectorDispatch:
    """Per-sector outcome of one period's dispatch."""

    sector: str
    demand: float
    activity: dict[str, float]  # tech -> units/yr (vintage + new)
    new_builds: dict[str, float]  # tech -> units/yr of new capacity
    fuel_use: dict[str, float]  # fuel -> EJ/yr
    gross_co2: float  # GtCO2/yr emitted to atmosphere (fossil, >= 0)
    removal_co2: float  # GtCO2/yr net removals from negative-emission techs
    captured_co2: float  # GtCO2/yr to storage (fossil capture + bio capture)
    fossil_captured: float  # GtCO2/yr fossil share of captured
    water_km3: float
    composite_price: float  # activity-weighted $/unit


def dispatch_sector(
    sector_name: str,
    year: int,
    demand: float,
    techs: Sequence[Technology],
    stock: VintageStock,
    weights: Mapping[str, float],
    fuel_prices: Mapping[str, float],
    carbon_price: float,
    storage_cost: float,
    choice: ChoiceParams,
) -> SectorDispatch:
    """Operate surviving vintages, allocate the demand gap to new capacity by logit."""
    available = [t for t in techs if t.available_from <= year]
    if demand > 0.0 and not available:
        raise ValueError(f"no feasible technology for sector '{sector_name}' in {year}")
    by_name = {t.name: t for t in techs}

    surviving = stock.total_capacity()
    if demand >= surviving:
        utilization = 1.0
        gap = demand - surviving
    else:
        utilization = demand / surviving if surviving > 0.0 else 0.0
        gap = 0.0

    new_builds: dict[str, float] = {}
    costs: dict[str, float] = {}
    if gap > 0.0:
        names = [t.name for t in available]
        weight_vec = [weights.get(n, 0.0) for n in names]
        cost_vec = []
        for t in available:
            c = tech_levelized_cost(t, year, fuel_prices, carbon_price, storage_cost)
            costs[t.name] = c
            cost_vec.append(max(c, choice.cost_floor))
        shares = logit_shares(cost_vec, weight_vec, choice.gamma_for(sector_name))
        new_builds = {n: s * gap for n, s in zip(names, shares) if s > 0.0}

    activity: dict[str, float] = {}
    fuel_use: dict[str, float] = {}
    gross = removal = captured = fossil_captured = water = 0.0
    cost_weighted = 0.0

    def account(tech: Technology, coeff_year: int, amount: float) -> None:
        nonlocal gross, removal, captured, fossil_captured, water, cost_weighted
        if amount <= 0.0:
            return
        activity[tech.name] = activity.get(tech.name, 0.0) + amount
        for fuel, gj in tech.fuels_at(coeff_year):
            fuel_use[fuel] = fuel_use.get(fuel, 0.0) + gj * amount  # EJ = GJ/unit x EJ-units
        net_ef = net_emission_factor(tech, coeff_year)
        cap = captured_factor(tech, coeff_year)
        if net_ef >= 0.0:
            gross += net_ef * amount
        else:
            removal += -net_ef * amount
        captured += cap * amount
        if tech.emission_factor_at(coeff_year) >= 0.0:
            fossil_captured += cap * amount
        water += tech.water_m3 * amount
        cost = tech_levelized_cost(
            tech, year, fuel_prices, carbon_price, storage_cost, coeff_year=coeff_year
        )
        cost_weighted += cost * amount

    for v in stock.entries:
        account(by_name[v.tech], v.build_year, v.capacity * utilization)
    for name, amount in new_builds.items():
        account(by_name[name], year, amount)

    total_activity = sum(activity.values())
    if total_activity > 0.0:
        composite = cost_weighted / total_activity
    elif costs:
        composite = min(costs.values())
    else:
        composite = min(
            (tech_levelized_cost(t, year, fuel_prices, carbon_price, storage_cost) for t in available),
            default=1.0,
        )
    composite = max(composite, choice.cost_floor)

    return SectorDispatch(
        sector=sector_name,
        demand=demand,
        activity=activity,
        new_builds=new_builds,
        fuel_use=fuel_use,
        gross_co2=gross,
        removal_co2=removal,
        captured_co2=captured,
        fossil_captured=fossil_captured,
        water_km3=water,
        composite_price=composite,
    )


def dispatch_period(
    year: int,
    demand_levels: Mapping[str, float],
    techs_by_sector: Mapping[str, Sequence[Technology]],
    stocks: Mapping[str, VintageStock],
    weights: Mapping[str, Mapping[str, float]],
    fuel_prices: Mapping[str, float],
    carbon_price: float,
    storage_cost: float,
    choice: ChoiceParams,
) -> dict[str, SectorDispatch]:
    """Dispatch every demand sector for one period. Pure: no state is mutated."""
    results: dict[str, SectorDispatch] = {}
    for sector in demand_levels:
        results[sector] = dispatch_sector(
            sector,
            year,
            demand_levels[sector],
            techs_by_sector.get(sector, ()),
            stocks.get(sector, VintageStock()),
            weights.get(sector, {}),
            fuel_prices,
            carbon_price,
            storage_cost,
            choice,
        )
    return results
