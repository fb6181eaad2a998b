"""Per-period carbon-price equilibrium and the recursive-dynamic run loop.

Each capped period solves, by bisection, for the carbon price at which net
CO2 (gross + land-use change - BECCS - DAC - afforestation) meets the cap.
Within a period, electricity and biomass prices are resolved by a damped
fixed-point iteration; DAC deploys as a quasi-backstop whose new capacity
scales with the margin between the carbon price and its levelized cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .climate import ClimateRow, energy_ch4, methane_series, run_climate
from .config import CapPath, ScenarioConfig, luc_price_fraction, nt2nz_cap
from .energy import (
    SectorDemand,
    Vintage,
    VintageStock,
    calibrate_weights,
    logit_shares,
    retire_and_roll,
    service_demand,
)
from .errors import InfeasibleError
from .landwater import (
    BIOENERGY,
    FOOD,
    FOREST,
    WaterLedger,
    afforestation_sink,
    calibrate_land_weights,
    forest_rent,
    land_allocate,
    water_account,
)
from .series import Series
from .technoecon import (
    Technology,
    captured_factor,
    dac_levelized_cost,
    dac_params_at,
    net_emission_factor,
    storage_marginal_cost,
)

GAS_CO2_T_PER_GJ = 0.0561  # combustion CO2 of natural gas, used for DAC process heat

PRIMARY_FUELS = ("coal", "gas", "oil", "biomass", "uranium", "renewable")


def emission_tolerance(cap: float) -> float:
    return max(1e-4, 1e-6 * abs(cap))


# ---------------------------------------------------------------------------
# State


@dataclass
class RegionState:
    stocks: dict[str, VintageStock]
    dac_stock: VintageStock
    cumulative_storage: float
    forest_area: float
    food_area: float
    weights: dict[str, dict[str, float]]
    land_weights: dict[str, float]
    base_composites: dict[str, float]
    base_elec_demand: float
    base_bio_price: float
    price_guess: dict[str, float]  # electricity / biomass warm start


@dataclass
class SystemState:
    regions: dict[str, RegionState]
    rows: list["PeriodSnapshot"] = field(default_factory=list)

    def row(self, region: str, year: int) -> "PeriodSnapshot":
        for r in self.rows:
            if r.region == region and r.year == year:
                return r
        raise KeyError((region, year))


@dataclass
class PeriodSnapshot:
    """Everything one region did in one period at one carbon price."""

    region: str
    year: int
    carbon_price: float
    cap: float | None
    slack: bool
    gross: float  # GtCO2/yr fossil + industrial to atmosphere
    beccs: float  # GtCO2/yr
    dac_removal: float
    afforestation: float
    luc: float
    net: float
    ch4_mt: float
    fossil_captured: float  # GtCO2/yr incl. DAC process-heat capture
    storage_injected: float  # GtCO2/yr total injection
    storage_cost: float  # $/t marginal this period
    fuel_use: dict[str, float]  # fuel -> EJ/yr, all sectors + DAC
    primary: dict[str, float]  # category -> EJ/yr (coal, coal_ccs, ... dac heat in gas_ccs)
    dac_heat_ej: float
    dac_elec_ej: float
    dac_new_capacity: float
    sector_gross: dict[str, float]
    sector_activity: dict[str, dict[str, float]]
    sector_new_builds: dict[str, dict[str, float]]
    demands: dict[str, float]
    land_areas: dict[str, float]  # reported areas incl. protected portion
    water: WaterLedger
    prices: dict[str, float]
    composites: dict[str, float]  # sector -> $/unit service
    crop_price_index: float
    fixed_point_rounds: int
    bisection_iters: int = 0
    calibrated_weights: dict | None = None


# ---------------------------------------------------------------------------
# Per-period evaluation machinery


IDLE_RAMP = 3.0  # vintages phase out between 1x and 3x the replacement benchmark


class _SectorAgg:
    """Surviving vintages of one sector, one entry per (tech, build year).

    A vintage operates only while its operating cost (fuel + carbon +
    storage, capital sunk) stays below the cheapest available new-build
    total cost; utilization ramps to zero at IDLE_RAMP times that benchmark.
    Idled capacity stays in the stock and retires on schedule.
    """

    __slots__ = ("entries",)

    def __init__(self, techs: dict[str, Technology], stock: VintageStock):
        self.entries: list[tuple[_TechCoeffs, float]] = []
        for v in stock.entries:
            tech = techs[v.tech]
            self.entries.append((_TechCoeffs.at(tech, v.build_year), v.capacity))

    def utilizations(
        self,
        prices: dict[str, float],
        carbon_price: float,
        storage_cost: float,
        benchmark: float,
    ) -> list[float]:
        out = []
        hi = benchmark * IDLE_RAMP
        for tc, _cap in self.entries:
            op = tc.cost(prices, carbon_price, storage_cost) - tc.nonenergy
            if op <= benchmark:
                out.append(1.0)
            elif op >= hi:
                out.append(0.0)
            else:
                out.append((hi - op) / (hi - benchmark))
        return out


def _primary_category(tech: Technology, fuel: str) -> str | None:
    if fuel == "electricity":
        return None
    if fuel in ("uranium", "renewable"):
        return fuel if fuel == "renewable" else "nuclear"
    if tech.capture_fraction > 0.0 or tech.emission_factor < 0.0:
        return f"{fuel}_ccs"
    return fuel


@dataclass
class _TechCoeffs:
    tech: Technology
    fuels: tuple[tuple[str, float], ...]
    nonenergy: float
    net_ef: float
    captured: float
    fossil_captured: float
    categories: tuple[tuple[str, float], ...]

    @classmethod
    def at(cls, tech: Technology, year: int) -> "_TechCoeffs":
        nef = net_emission_factor(tech, year)
        cf = captured_factor(tech, year)
        cats = []
        for fuel, gj in tech.fuels_at(year):
            cat = _primary_category(tech, fuel)
            if cat:
                cats.append((cat, gj))
        return cls(
            tech=tech,
            fuels=tech.fuels_at(year),
            nonenergy=tech.nonenergy_at(year),
            net_ef=nef,
            captured=cf,
            fossil_captured=cf if tech.emission_factor_at(year) >= 0.0 else 0.0,
            categories=tuple(cats),
        )

    def cost(self, prices: dict[str, float], carbon_price: float, storage_cost: float) -> float:
        c = self.nonenergy + self.net_ef * carbon_price + self.captured * storage_cost
        for fuel, gj in self.fuels:
            c += gj * prices[fuel]
        return c


@dataclass
class _DacVintageAgg:
    build_year: int
    capacity: float
    gas_gj: float
    elec_gj: float
    nonenergy: float
    storage_per_t: float

    def levelized(self, gas_price: float, elec_price: float, storage_cost: float) -> float:
        return (
            self.nonenergy
            + self.gas_gj * gas_price
            + self.elec_gj * elec_price
            + storage_cost * self.storage_per_t
        )

    def utilization(self, carbon_price: float, lcod: float) -> float:
        """Fleet share operating at the given price: full cost recovery at the
        levelized cost, ramping to zero at 90% of it (fleet heterogeneity)."""
        if carbon_price >= lcod:
            return 1.0
        lo = 0.9 * lcod
        if carbon_price <= lo:
            return 0.0
        return (carbon_price - lo) / (lcod - lo)


class PeriodEvaluator:
    """Evaluates one region-period at any carbon price.

    Vintage aggregates are precomputed once; each evaluation runs the
    within-period fixed point on electricity and biomass prices from the
    committed warm start, so the result is a pure function of the price.
    """

    def __init__(self, config: ScenarioConfig, state: SystemState, region: str, year: int):
        self.config = config
        self.region = region
        self.year = year
        self.rstate = state.regions[region]
        self.techs = {t.name: t for t in config.technologies}
        self.techs_by_sector = config.techs_by_sector()
        self.sectors = sorted(config.demand[region])
        self.aggs = {
            s: _SectorAgg(self.techs, self.rstate.stocks.get(s, VintageStock()))
            for s in self.sectors + ["electricity"]
        }
        self.new_coeffs = {
            s: [
                _TechCoeffs.at(t, year)
                for t in self.techs_by_sector.get(s, ())
                if t.available_from <= year
            ]
            for s in self.sectors + ["electricity"]
        }
        socio = config.socioecon[region]
        self.population = socio.population.at(year)
        self.gdp_pc = socio.gdp_per_capita.at(year)
        self.growth_scale = socio.service_growth_scale
        self.exo_prices = {
            f: s.at(year) for f, s in config.fuel_prices[region].items()
        }
        self.storage_cost = storage_marginal_cost(
            config.storage[region], self.rstate.cumulative_storage
        ) if region in config.storage else 0.0
        self.storage_headroom = (
            config.storage[region].total_capacity - self.rstate.cumulative_storage
            if region in config.storage
            else float("inf")
        )
        land = config.land[region]
        self.land = land
        ls = config.land_settings
        self.luc_fraction = luc_price_fraction(config.luc_linkage, year)
        self.yield_gj = land.use(BIOENERGY).yield_gj_km2 * (
            (1.0 + ls.yield_growth_rate)
            ** (min(year, ls.yield_growth_until) - config.base_year)
        )
        self.food_index = (
            ls.food_demand_index[region].at(year)
            if region in ls.food_demand_index
            else 1.0
        )
        self.residue_ej = (
            config.biomass.residue_supply[region].at(year)
            if region in config.biomass.residue_supply
            else 0.0
        )
        self.dac_vintages = []
        for v in self.rstate.dac_stock.entries:
            gas_gj, elec_gj, nonenergy = dac_params_at(config.dac, v.build_year)
            self.dac_vintages.append(
                _DacVintageAgg(
                    build_year=v.build_year,
                    capacity=v.capacity,
                    gas_gj=gas_gj,
                    elec_gj=elec_gj,
                    nonenergy=nonenergy,
                    storage_per_t=1.0
                    + gas_gj * GAS_CO2_T_PER_GJ * config.dac.heat_capture_fraction,
                )
            )
        self.dac_active = (
            config.dac.enabled
            and year >= config.dac.available_from
            and region in config.dac.supply_slope
        )
        self.dac_slope = config.dac.supply_slope.get(region, 0.0)

    # -- demand levels ------------------------------------------------------

    def _demand(self, sector: str, composite: float) -> float:
        d: SectorDemand = self.config.demand[self.region][sector]
        base_price = self.rstate.base_composites.get(sector, d.base_price)
        anchored = replace(d, base_price=base_price)
        raw = service_demand(anchored, self.gdp_pc, self.population, composite)
        if self.growth_scale == 1.0:
            return raw
        price_part = (composite / base_price) ** d.price_elasticity
        growth = raw / (d.base_demand * price_part)
        return d.base_demand * (1.0 + self.growth_scale * (growth - 1.0)) * price_part

    # -- land market pieces ----------------------------------------------------

    def _rents(self, carbon_price: float, p_bio: float, food_area: float) -> dict[str, float]:
        cfg = self.config
        rents = {}
        for u in self.land.uses:
            if u.name == BIOENERGY:
                rents[u.name] = max(
                    max(p_bio - cfg.biomass.harvest_cost, 1e-4) * self.yield_gj, 1.0
                )
            elif u.name == FOOD:
                scarcity = (
                    self.land.use(FOOD).base_area_km2 / max(food_area, 1.0)
                ) ** cfg.land_settings.food_rent_feedback
                rents[u.name] = u.base_rent * self.food_index * scarcity
            elif u.name == FOREST:
                rents[u.name] = forest_rent(
                    carbon_price, self.luc_fraction, u.uptake_tco2_km2, u.base_rent
                )
            else:
                rents[u.name] = u.base_rent
        return rents

    def _bio_clearing_price(self, bio_demand: float, rents: dict[str, float]) -> float:
        """Invert the land supply curve: price at which bioenergy area grown on
        the rent market plus residues meets `bio_demand`."""
        cfg = self.config
        floor, ceiling = cfg.biomass.price_floor, cfg.biomass.price_ceiling
        area_needed = (bio_demand - self.residue_ej) * 1e9 / self.yield_gj  # km2
        if area_needed <= 0.0:
            return floor
        gamma = cfg.choice.gamma_land
        weights = self.rstate.land_weights
        pool = self.land.available_area
        share = area_needed / pool
        if share >= 0.95:
            return ceiling
        denom_other = sum(
            weights.get(u.name, 0.0) * rents[u.name] ** gamma
            for u in self.land.uses
            if u.name != BIOENERGY
        )
        w_bio = weights.get(BIOENERGY, 0.0)
        if w_bio <= 0.0:
            return ceiling
        term = denom_other * share / (1.0 - share)
        rent = (term / w_bio) ** (1.0 / gamma)
        price = cfg.biomass.harvest_cost + rent / self.yield_gj
        return min(max(price, floor), ceiling)

    # -- one full evaluation ----------------------------------------------------

    def evaluate(self, carbon_price: float, calibrating: bool = False) -> PeriodSnapshot:
        """Fixed point over electricity price, biomass price, and food area.

        Each variable relaxes toward its market-consistent target; a step
        that overshoots (sign flip of the update) halves that variable's
        step share, which keeps the steep biomass supply curve stable.
        """
        cfg = self.config
        solver = cfg.solver
        p_elec = self.rstate.price_guess.get("electricity", 15.0)
        p_bio = self.rstate.price_guess.get("biomass", self.rstate.base_bio_price)
        food_area = self.rstate.food_area
        composites = dict(self.rstate.base_composites)
        weights = self.rstate.weights
        sc = self.storage_cost
        result: dict | None = None
        rounds_used = solver.fixed_point_rounds
        step = {"elec": 1.0 - solver.damping, "bio": 1.0 - solver.damping, "food": 1.0 - solver.damping}
        last_delta = {"elec": 0.0, "bio": 0.0, "food": 0.0}

        for rnd in range(solver.fixed_point_rounds):
            prices = dict(self.exo_prices)
            prices["electricity"] = p_elec
            prices["biomass"] = p_bio

            if calibrating:
                weights = self._calibrate_weights(prices, carbon_price)

            dac_removal, dac_gas, dac_elec, dac_storage, dac_new = self._dac(
                carbon_price, prices, result
            )

            sector_out: dict[str, dict] = {}
            elec_demand = dac_elec
            bio_demand = 0.0
            for s in self.sectors:
                if calibrating:
                    demand = cfg.demand[self.region][s].base_demand
                else:
                    comp = composites.get(s) or 10.0
                    demand = self._demand(s, comp)
                out = self._dispatch(s, demand, prices, carbon_price, sc, weights, calibrating)
                sector_out[s] = out
                composites[s] = out["composite"]
                elec_demand += out["fuel"].get("electricity", 0.0)
                bio_demand += out["fuel"].get("biomass", 0.0)
            elec_out = self._dispatch(
                "electricity", elec_demand, prices, carbon_price, sc, weights, calibrating
            )
            sector_out["electricity"] = elec_out
            bio_demand += elec_out["fuel"].get("biomass", 0.0)

            rents = self._rents(carbon_price, p_bio, food_area)
            allocated = land_allocate(
                rents, self.rstate.land_weights, cfg.choice.gamma_land, self.land.available_area
            )

            target_elec = elec_out["benchmark"] + cfg.elec_margin
            target_bio = self._bio_clearing_price(bio_demand, rents)
            target_food = allocated[FOOD]

            rel = max(
                abs(target_elec - p_elec) / max(p_elec, 1e-9),
                abs(target_bio - p_bio) / max(p_bio, 1e-9),
                abs(target_food - food_area) / max(food_area, 1.0),
            )
            result = {
                "sector_out": sector_out,
                "allocated": allocated,
                "dac": (dac_removal, dac_gas, dac_elec, dac_storage, dac_new),
                "prices": dict(prices),
                "weights": weights,
                "composites": dict(composites),
                "rents": rents,
                "calibrating": calibrating,
            }
            if rel < solver.fixed_point_tol:
                rounds_used = rnd + 1
                break

            for key, current, target in (
                ("elec", p_elec, target_elec),
                ("bio", p_bio, target_bio),
                ("food", food_area, target_food),
            ):
                delta = target - current
                if delta * last_delta[key] < 0.0:
                    step[key] = max(step[key] * 0.5, 0.02)
                elif delta * last_delta[key] > 0.0:
                    step[key] = min(step[key] * 1.4, 0.7)
                last_delta[key] = delta
            p_elec += step["elec"] * (target_elec - p_elec)
            p_bio += step["bio"] * (target_bio - p_bio)
            food_area += step["food"] * (target_food - food_area)

        assert result is not None
        return self._snapshot(carbon_price, result, rounds_used)

    def _calibrate_weights(self, prices: dict[str, float], carbon_price: float) -> dict:
        weights = {}
        for s in self.sectors + ["electricity"]:
            shares = self.config.base_shares[self.region].get(s, {})
            costs = {}
            for tc in self.new_coeffs[s]:
                costs[tc.tech.name] = max(
                    tc.cost(prices, carbon_price, self.storage_cost),
                    self.config.choice.cost_floor,
                )
            entrants = self.config.entrant_weights[self.region].get(s, {})
            weights[s] = calibrate_weights(
                shares, costs, self.config.choice.gamma_for(s), entrants
            )
        return weights

    def _dispatch(
        self,
        sector: str,
        demand: float,
        prices: dict[str, float],
        carbon_price: float,
        storage_cost: float,
        weights: dict,
        calibrating: bool,
    ) -> dict:
        floor = self.config.choice.cost_floor
        coeffs = self.new_coeffs[sector]
        cost_vec = [max(tc.cost(prices, carbon_price, storage_cost), floor) for tc in coeffs]
        costs = {tc.tech.name: c for tc, c in zip(coeffs, cost_vec)}
        # replacement benchmark: what new capacity would cost at current choice shares
        new_shares: list[float] | None = None
        if cost_vec:
            w = weights.get(sector, {})
            weight_vec = [w.get(tc.tech.name, 0.0) for tc in coeffs]
            if sum(weight_vec) > 0.0:
                new_shares = logit_shares(
                    cost_vec, weight_vec, self.config.choice.gamma_for(sector)
                )
                benchmark = sum(s * c for s, c in zip(new_shares, cost_vec))
            else:
                benchmark = min(cost_vec)
        else:
            benchmark = float("inf")

        agg = self.aggs[sector]
        if calibrating or not agg.entries:
            utils: list[float] = []
            operating = 0.0
        else:
            utils = agg.utilizations(prices, carbon_price, storage_cost, benchmark)
            operating = sum(cap * u for (_, cap), u in zip(agg.entries, utils))

        if demand >= operating:
            u_scale = 1.0
            gap = demand - operating
        else:
            u_scale = demand / operating if operating > 0.0 else 0.0
            gap = 0.0

        new_builds: dict[str, float] = {}
        if gap > 0.0:
            if not coeffs:
                raise InfeasibleError(
                    f"no feasible technology for sector '{sector}'",
                    year=self.year, region=self.region,
                )
            if new_shares is None:
                raise InfeasibleError(
                    f"no weighted technology available for sector '{sector}'",
                    year=self.year, region=self.region,
                )
            new_builds = {
                tc.tech.name: s * gap
                for tc, s in zip(coeffs, new_shares)
                if s > 0.0
            }

        fuel: dict[str, float] = {}
        categories: dict[str, float] = {}
        activity: dict[str, float] = {}
        gross = removal = captured = fossil_captured = water = 0.0
        cost_total = 0.0

        def account(tc: _TechCoeffs, amount: float, cost: float) -> None:
            nonlocal gross, removal, captured, fossil_captured, water, cost_total
            activity[tc.tech.name] = activity.get(tc.tech.name, 0.0) + amount
            for f, gj in tc.fuels:
                fuel[f] = fuel.get(f, 0.0) + gj * amount
            for cat, gj in tc.categories:
                categories[cat] = categories.get(cat, 0.0) + gj * amount
            if tc.net_ef >= 0.0:
                gross += tc.net_ef * amount
            else:
                removal += -tc.net_ef * amount
            captured += tc.captured * amount
            fossil_captured += tc.fossil_captured * amount
            water += tc.tech.water_m3 * amount
            cost_total += cost * amount

        for (tc, cap), u in zip(agg.entries, utils):
            amount = cap * u * u_scale
            if amount > 0.0:
                account(tc, amount, tc.cost(prices, carbon_price, storage_cost))
        by_name = {tc.tech.name: tc for tc in coeffs}
        for name, amount in new_builds.items():
            account(by_name[name], amount, costs[name])

        total_activity = operating * u_scale + sum(new_builds.values())
        if total_activity > 0.0:
            composite = cost_total / total_activity
        elif cost_vec:
            composite = benchmark
        else:
            composite = 1.0
        composite = max(composite, floor)

        return {
            "demand": demand,
            "activity": activity,
            "new_builds": new_builds,
            "fuel": fuel,
            "categories": categories,
            "gross": gross,
            "removal": removal,
            "captured": captured,
            "fossil_captured": fossil_captured,
            "water": water,
            "composite": composite,
            "benchmark": benchmark if benchmark != float("inf") else composite,
        }

    def _dac(
        self,
        carbon_price: float,
        prices: dict[str, float],
        prev_result: dict | None,
    ) -> tuple[float, float, float, float, float]:
        """(removal Gt/yr, gas EJ, elec EJ, storage Gt/yr, new capacity Gt/yr)."""
        if not self.dac_active and not self.dac_vintages:
            return 0.0, 0.0, 0.0, 0.0, 0.0
        gas_price = prices.get("gas", 0.0)
        elec_price = prices.get("electricity", 0.0)
        removal = gas = elec = storage = 0.0
        for v in self.dac_vintages:
            lcod_v = v.levelized(gas_price, elec_price, self.storage_cost)
            used = v.capacity * v.utilization(carbon_price, lcod_v)
            if used > 0.0:
                removal += used
                gas += used * v.gas_gj
                elec += used * v.elec_gj
                storage += used * v.storage_per_t
        new_capacity = 0.0
        if self.dac_active:
            per_t = 1.0 + dac_params_at(self.config.dac, self.year)[0] * GAS_CO2_T_PER_GJ * self.config.dac.heat_capture_fraction
            lcod = dac_levelized_cost(
                self.config.dac, self.year, gas_price, elec_price, self.storage_cost * per_t
            )
            margin = carbon_price - lcod
            if margin > 0.0:
                new_capacity = self.dac_slope * margin
                # storage availability bound for the whole period
                sector_injection = 0.0
                if prev_result is not None:
                    so = prev_result["sector_out"]
                    sector_injection = sum(o["captured"] for o in so.values())
                step = self.config.grid.step
                headroom_rate = self.storage_headroom / step - sector_injection - storage
                if headroom_rate < new_capacity * per_t:
                    new_capacity = max(0.0, headroom_rate / per_t)
                gp = dac_params_at(self.config.dac, self.year)
                removal += new_capacity
                gas += new_capacity * gp[0]
                elec += new_capacity * gp[1]
                storage += new_capacity * per_t
        return removal, gas, elec, storage, new_capacity

    def _snapshot(self, carbon_price: float, result: dict, rounds: int) -> PeriodSnapshot:
        cfg = self.config
        sector_out = result["sector_out"]
        allocated = result["allocated"]
        dac_removal, dac_gas, dac_elec, dac_storage, dac_new = result["dac"]
        prices = result["prices"]

        fuel_use: dict[str, float] = {}
        primary: dict[str, float] = {}
        gross = removal = captured = fossil_captured = tech_water = 0.0
        sector_gross: dict[str, float] = {}
        sector_activity: dict[str, dict[str, float]] = {}
        sector_new: dict[str, dict[str, float]] = {}
        demands: dict[str, float] = {}
        for s, out in sector_out.items():
            for f, ej in out["fuel"].items():
                fuel_use[f] = fuel_use.get(f, 0.0) + ej
            for c, ej in out["categories"].items():
                primary[c] = primary.get(c, 0.0) + ej
            gross += out["gross"]
            removal += out["removal"]
            captured += out["captured"]
            fossil_captured += out["fossil_captured"]
            tech_water += out["water"]  # m3/GJ x EJ = km3
            sector_gross[s] = out["gross"]
            sector_activity[s] = out["activity"]
            sector_new[s] = out["new_builds"]
            demands[s] = out["demand"]

        # DAC contributions
        fuel_use["gas"] = fuel_use.get("gas", 0.0) + dac_gas
        primary["gas_ccs"] = primary.get("gas_ccs", 0.0) + dac_gas
        fuel_use["electricity"] = fuel_use.get("electricity", 0.0) + dac_elec
        dac_process_capture = dac_storage - dac_removal
        dac_heat_emission = dac_gas * GAS_CO2_T_PER_GJ * (1.0 - cfg.dac.heat_capture_fraction)
        gross += dac_heat_emission
        fossil_captured += dac_process_capture
        storage_injected = captured + dac_storage

        # land outcomes
        land = self.land
        forest_now = allocated[FOREST]
        affor = afforestation_sink(
            forest_now - land.use(FOREST).base_area_km2, land.use(FOREST).uptake_tco2_km2
        )
        deforest = max(self.rstate.forest_area - forest_now, 0.0)
        luc = deforest * cfg.land_settings.luc_emission_tco2_km2 / cfg.grid.step * 1e-9

        net = gross + luc - removal - dac_removal - affor

        reported_areas = {}
        for u in land.uses:
            reported_areas[u.name] = allocated.get(u.name, 0.0) + land.protected_area(u.name)

        socio = cfg.socioecon[self.region]
        water = water_account(
            {
                "food_cropland_km2": reported_areas[FOOD],
                "bioenergy_cropland_km2": reported_areas[BIOENERGY],
                "population_millions": self.population,
                "energy_water_km3": tech_water,
                "dac_removal_gt": dac_removal,
            },
            {
                "food_irrigation_m3_km2": land.use(FOOD).irrigation_m3_km2,
                "bioenergy_irrigation_m3_km2": land.use(BIOENERGY).irrigation_m3_km2,
                "municipal_m3_per_capita": socio.municipal_water_m3_per_capita.at(self.year),
                "dac_m3_per_t": cfg.dac.water_m3_per_t,
            },
        )

        ch4 = energy_ch4(
            cfg.climate,
            fuel_use.get("coal", 0.0),
            fuel_use.get("gas", 0.0),
            fuel_use.get("oil", 0.0),
        )

        crop_index = self.food_index * (
            land.use(FOOD).base_area_km2 / max(allocated[FOOD], 1.0)
        ) ** cfg.land_settings.food_rent_feedback

        return PeriodSnapshot(
            region=self.region,
            year=self.year,
            carbon_price=carbon_price,
            cap=None,
            slack=False,
            gross=gross,
            beccs=removal,
            dac_removal=dac_removal,
            afforestation=affor,
            luc=luc,
            net=net,
            ch4_mt=ch4,
            fossil_captured=fossil_captured,
            storage_injected=storage_injected,
            storage_cost=self.storage_cost,
            fuel_use=fuel_use,
            primary=primary,
            dac_heat_ej=dac_gas,
            dac_elec_ej=dac_elec,
            dac_new_capacity=dac_new,
            sector_gross=sector_gross,
            sector_activity=sector_activity,
            sector_new_builds=sector_new,
            demands=demands,
            land_areas=reported_areas,
            water=water,
            prices={**prices, "storage": self.storage_cost},
            composites=dict(result["composites"]),
            crop_price_index=crop_index,
            fixed_point_rounds=rounds,
            calibrated_weights=result.get("weights") if result.get("calibrating") else None,
        )


# ---------------------------------------------------------------------------
# Spec-level operations


def net_emissions_at_price(
    state: SystemState, config: ScenarioConfig, region: str, year: int, carbon_price: float
) -> tuple[float, PeriodSnapshot]:
    """Net CO2 (GtCO2/yr) and the full candidate period snapshot at a given price."""
    if carbon_price < 0:
        raise ValueError("carbon price must be non-negative")
    snap = PeriodEvaluator(config, state, region, year).evaluate(carbon_price)
    return snap.net, snap


def bisect_price(
    net_at: "callable",
    cap: float,
    ceiling: float,
    max_iters: int = 60,
) -> tuple[float, int]:
    """Find the lowest price where net emissions meet `cap`, by bisection.

    `net_at` must be monotone non-increasing. Returns (price, iterations).
    """
    tol = emission_tolerance(cap)
    n0 = net_at(0.0)
    if n0 <= cap + tol:
        return 0.0, 0
    nc = net_at(ceiling)
    if nc > cap + tol:
        raise InfeasibleError(
            f"cap {cap:.4f} Gt unreachable: net({ceiling:.0f}) = {nc:.4f} Gt, net(0) = {n0:.4f} Gt"
        )
    lo, hi = 0.0, ceiling
    iters = 0
    for _ in range(max_iters):
        iters += 1
        mid = 0.5 * (lo + hi)
        nm = net_at(mid)
        if abs(nm - cap) <= tol:
            return mid, iters
        if nm > cap:
            lo = mid
        else:
            hi = mid
    return hi, iters


def solve_carbon_price(
    state: SystemState, config: ScenarioConfig, region: str, year: int, cap: float
) -> tuple[float, PeriodSnapshot]:
    """Clearing carbon price for one region-period, plus its committed snapshot."""
    evaluator = PeriodEvaluator(config, state, region, year)

    def net_at(price: float) -> float:
        return evaluator.evaluate(price).net

    try:
        price, iters = bisect_price(
            net_at, cap, config.price_ceiling, config.solver.max_bisection_iters
        )
    except InfeasibleError as exc:
        raise InfeasibleError(str(exc), year=year, region=region) from None
    snap = evaluator.evaluate(price)
    snap.cap = cap
    snap.slack = price == 0.0 and snap.net < cap - emission_tolerance(cap)
    snap.bisection_iters = iters
    return price, snap


# ---------------------------------------------------------------------------
# Run loop


@dataclass
class RunResult:
    config: ScenarioConfig
    caps: dict[str, CapPath]
    state: SystemState
    climate_rows: list[ClimateRow]
    max_bisection_iters: int

    @property
    def rows(self) -> list[PeriodSnapshot]:
        return self.state.rows

    def row(self, region: str, year: int) -> PeriodSnapshot:
        return self.state.row(region, year)

    def global_fuel_use(self) -> dict[int, dict[str, float]]:
        out: dict[int, dict[str, float]] = {}
        for row in self.rows:
            by_fuel = out.setdefault(row.year, {})
            for f, ej in row.fuel_use.items():
                by_fuel[f] = by_fuel.get(f, 0.0) + ej
        return out

    def global_net_co2(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for row in self.rows:
            out[row.year] = out.get(row.year, 0.0) + row.net
        return out


def _init_state(config: ScenarioConfig) -> SystemState:
    """Calibrate logit weights at the base year and lay down initial vintages."""
    regions: dict[str, RegionState] = {}
    for region in config.regions:
        land = config.land[region]
        land_weights = calibrate_land_weights(
            land,
            config.choice.gamma_land,
            config.land_settings.bio_weight_ratio.get(region, 1.0),
        )
        rstate = RegionState(
            stocks={},
            dac_stock=VintageStock(),
            cumulative_storage=0.0,
            forest_area=land.use(FOREST).base_area_km2,
            food_area=land.use(FOOD).base_area_km2,
            weights={},
            land_weights=land_weights,
            base_composites={},
            base_elec_demand=0.0,
            base_bio_price=config.biomass.base_price[region],
            price_guess={
                "electricity": 15.0,
                "biomass": config.biomass.base_price[region],
            },
        )
        regions[region] = rstate
    state = SystemState(regions=regions)

    for region in config.regions:
        rstate = state.regions[region]
        evaluator = PeriodEvaluator(config, state, region, config.base_year)
        snap = evaluator.evaluate(0.0, calibrating=True)
        rstate.weights = snap.calibrated_weights or {}
        rstate.base_composites = dict(snap.composites)
        rstate.base_elec_demand = snap.demands.get("electricity", 0.0)
        rstate.price_guess = {
            "electricity": snap.prices["electricity"],
            "biomass": snap.prices["biomass"],
        }

        # initial vintages at the grid start, uniformly aged
        start = config.grid.start_year
        socio = config.socioecon[region]
        comps = rstate.base_composites
        elec_base = rstate.base_elec_demand
        elec_scale_num = elec_scale_den = 0.0
        stocks: dict[str, VintageStock] = {}
        for sector, d in config.demand[region].items():
            anchored = replace(d, base_price=comps.get(sector, 1.0))
            demand_start = service_demand(
                anchored,
                socio.gdp_per_capita.at(start),
                socio.population.at(start),
                comps.get(sector, 1.0),
            )
            stocks[sector] = _seed_stock(
                config, region, sector, demand_start, start
            )
            base_elec_use = _sector_elec_use(config, region, sector)
            elec_scale_num += base_elec_use * (demand_start / d.base_demand)
            elec_scale_den += base_elec_use
        elec_scale = elec_scale_num / elec_scale_den if elec_scale_den > 0 else 1.0
        stocks["electricity"] = _seed_stock(
            config, region, "electricity", elec_base * elec_scale, start
        )
        rstate.stocks = stocks
    return state


def _sector_elec_use(config: ScenarioConfig, region: str, sector: str) -> float:
    shares = config.base_shares[region].get(sector, {})
    techs = {t.name: t for t in config.technologies}
    use = 0.0
    for name, share in shares.items():
        for fuel, gj in techs[name].fuels:
            if fuel == "electricity":
                use += share * gj
    return use


def _seed_stock(
    config: ScenarioConfig, region: str, sector: str, total: float, start_year: int
) -> VintageStock:
    shares = config.base_shares[region].get(sector, {})
    techs = {t.name: t for t in config.technologies}
    entries: list[Vintage] = []
    step = config.grid.step
    for name in sorted(shares):
        tech = techs[name]
        capacity = total * shares[name]
        buckets = max(1, math.ceil(tech.lifetime_yr / step))
        for i in range(buckets):
            entries.append(
                Vintage(
                    tech=name,
                    build_year=start_year - i * step,
                    capacity=capacity / buckets,
                    lifetime_yr=tech.lifetime_yr,
                )
            )
    return VintageStock(entries=tuple(entries))


def materialize_caps(config: ScenarioConfig) -> dict[str, CapPath]:
    """Build cap paths; 'auto' anchors to the unpriced run's base-year emissions."""
    if not config.caps:
        return {}
    anchors: dict[str, float] = {}
    need_auto = [r for r, s in config.caps.items() if s.base_emissions is None]
    if need_auto:
        baseline = _run(config, {}, with_climate=False)
        for region in need_auto:
            spec = config.caps[region]
            nets = {
                row.year: row.net for row in baseline.rows if row.region == region
            }
            anchors[region] = Series.from_mapping(nets).at(spec.base_year)
    caps: dict[str, CapPath] = {}
    for region, spec in config.caps.items():
        if spec.explicit is not None:
            caps[region] = spec.explicit
            continue
        base = spec.base_emissions if spec.base_emissions is not None else anchors[region]
        caps[region] = nt2nz_cap(base, spec.base_year, spec.net_zero_year, config.grid)
    return caps


def run_path(config: ScenarioConfig) -> RunResult:
    """Solve every period in order and emulate the climate response."""
    caps = materialize_caps(config)
    return _run(config, caps, with_climate=True)


def _run(
    config: ScenarioConfig, caps: dict[str, CapPath], with_climate: bool
) -> RunResult:
    state = _init_state(config)
    max_iters = 0
    for year in config.grid.years():
        for region in config.regions:
            rstate = state.regions[region]
            rstate.stocks = {
                s: retire_and_roll(stock, year) for s, stock in rstate.stocks.items()
            }
            rstate.dac_stock = retire_and_roll(rstate.dac_stock, year)

            cap_value: float | None = None
            if region in caps and year > config.base_year and year >= caps[region].start_year:
                cap_value = caps[region].value_at(year)

            if cap_value is None:
                snap = PeriodEvaluator(config, state, region, year).evaluate(0.0)
                snap.cap = None
            else:
                price, snap = solve_carbon_price(state, config, region, year, cap_value)
                max_iters = max(max_iters, snap.bisection_iters)
            _commit(config, state, region, snap)
            state.rows.append(snap)

    climate_rows: list[ClimateRow] = []
    if with_climate:
        ch4 = methane_series(config.climate, {
            y: f for y, f in run_fuel_totals(state).items()
        })
        climate_rows = run_climate(
            config.climate,
            co2_by_year={y: v for y, v in global_net(state).items()},
            ch4_by_year=ch4,
            report_years=config.grid.years(),
        )
    return RunResult(
        config=config,
        caps=caps,
        state=state,
        climate_rows=climate_rows,
        max_bisection_iters=max_iters,
    )


def run_fuel_totals(state: SystemState) -> dict[int, dict[str, float]]:
    out: dict[int, dict[str, float]] = {}
    for row in state.rows:
        by_fuel = out.setdefault(row.year, {})
        for f, ej in row.fuel_use.items():
            by_fuel[f] = by_fuel.get(f, 0.0) + ej
    return out


def global_net(state: SystemState) -> dict[int, float]:
    out: dict[int, float] = {}
    for row in state.rows:
        out[row.year] = out.get(row.year, 0.0) + row.net
    return out


def _commit(
    config: ScenarioConfig, state: SystemState, region: str, snap: PeriodSnapshot
) -> None:
    rstate = state.regions[region]
    techs = {t.name: t for t in config.technologies}
    for sector, new in snap.sector_new_builds.items():
        vintages = [
            Vintage(
                tech=name,
                build_year=snap.year,
                capacity=amount,
                lifetime_yr=techs[name].lifetime_yr,
            )
            for name, amount in sorted(new.items())
            if amount > 0.0
        ]
        stock = rstate.stocks.get(sector, VintageStock())
        rstate.stocks[sector] = stock.add(vintages)
    if snap.dac_new_capacity > 0.0:
        rstate.dac_stock = rstate.dac_stock.add(
            [
                Vintage(
                    tech="dac",
                    build_year=snap.year,
                    capacity=snap.dac_new_capacity,
                    lifetime_yr=config.dac.lifetime_yr,
                )
            ]
        )
    rstate.cumulative_storage += snap.storage_injected * config.grid.step
    rstate.forest_area = snap.land_areas[FOREST]
    rstate.food_area = snap.land_areas[FOOD]
    rstate.price_guess = {
        "electricity": snap.prices["electricity"],
        "biomass": snap.prices["biomass"],
    }
