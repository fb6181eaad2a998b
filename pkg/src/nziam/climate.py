"""Reduced-form climate emulation.

A four-pool impulse-response carbon cycle (one non-decaying pool), a
single-box methane burden, logarithmic CO2 forcing plus linear CH4 forcing,
and a two-box energy-balance temperature model. Pools track anthropogenic
carbon above preindustrial; the CH4 burden is likewise the excess over the
preindustrial level, so zero state means zero forcing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

from .series import Series

CO2_TO_C = 12.011 / 44.009  # GtCO2 -> GtC


@dataclass(frozen=True)
class ClimateParams:
    pool_fractions: tuple[float, float, float, float] = (0.2173, 0.2240, 0.2824, 0.2763)
    pool_timescales: tuple[float, float, float] = (394.4, 36.54, 4.304)
    c0_ppm: float = 278.0
    gtc_per_ppm: float = 2.124
    f2x: float = 3.7
    ecs: float = 2.7  # equilibrium warming per CO2 doubling, K
    heat_capacity_fast: float = 8.0  # W yr m-2 K-1
    heat_capacity_slow: float = 110.0
    heat_exchange: float = 0.67  # W m-2 K-1 between boxes
    ch4_lifetime: float = 12.0  # yr
    ch4_efficiency: float = 2.6e-4  # W m-2 per Mt excess burden
    leakage_rate: float = 0.015  # fraction of natural-gas throughput leaked as CH4
    gas_energy_density_mj_per_kg: float = 50.0
    coal_ch4_mt_per_ej: float = 0.30
    oil_ch4_mt_per_ej: float = 0.12
    forcing_offset: float = 0.0  # scenario-specific non-CO2 adjustment, W m-2
    exogenous_forcing: Series = field(default_factory=lambda: Series(((1850, 0.0),)))
    nonenergy_ch4: Series = field(default_factory=lambda: Series(((1850, 0.0),)))
    history_start: int = 1850
    history_co2: Series = field(default_factory=lambda: Series(((1850, 0.0),)))
    history_ch4: Series = field(default_factory=lambda: Series(((1850, 0.0),)))

    @property
    def feedback(self) -> float:
        """Climate feedback lambda, W m-2 K-1."""
        return self.f2x / self.ecs


@dataclass(frozen=True)
class ClimateState:
    pools: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)  # GtC above preindustrial
    ch4_burden: float = 0.0  # Mt above preindustrial
    temp_fast: float = 0.0  # K
    temp_slow: float = 0.0


def step_carbon(
    state: ClimateState, params: ClimateParams, co2_emissions_gt: float, dt: float
) -> ClimateState:
    """Advance the carbon pools by dt years at a constant emission rate (GtCO2/yr).

    Each pool gains its partition fraction of the emitted carbon, then the
    decaying pools relax by exp(-dt/tau).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    added = co2_emissions_gt * dt * CO2_TO_C
    pools = list(state.pools)
    for i, a in enumerate(params.pool_fractions):
        pools[i] += a * added
        if i > 0:
            pools[i] *= math.exp(-dt / params.pool_timescales[i - 1])
    return replace(state, pools=tuple(pools))


def step_ch4(
    state: ClimateState, params: ClimateParams, ch4_emissions_mt: float, dt: float
) -> ClimateState:
    """Single-box methane with fixed lifetime; exact for a constant emission rate."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    tau = params.ch4_lifetime
    decay = math.exp(-dt / tau)
    burden = state.ch4_burden * decay + ch4_emissions_mt * tau * (1.0 - decay)
    return replace(state, ch4_burden=burden)


def concentration_ppm(state: ClimateState, params: ClimateParams) -> float:
    return params.c0_ppm + sum(state.pools) / params.gtc_per_ppm


def radiative_forcing(
    params: ClimateParams, co2_ppm: float, ch4_burden: float, exogenous: float
) -> float:
    """W/m2 from CO2 (logarithmic), CH4 (linear in excess burden), and exogenous species."""
    if co2_ppm <= 0:
        raise ValueError("CO2 concentration must be positive")
    co2 = params.f2x * math.log(co2_ppm / params.c0_ppm) / math.log(2.0)
    return co2 + params.ch4_efficiency * ch4_burden + exogenous


def step_temperature(
    state: ClimateState, params: ClimateParams, forcing: float, dt: float
) -> ClimateState:
    """Two-box energy balance, Euler with internal annual substeps."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    tf, ts = state.temp_fast, state.temp_slow
    lam, k = params.feedback, params.heat_exchange
    n = max(1, int(math.ceil(dt)))
    h = dt / n
    for _ in range(n):
        dtf = (forcing - lam * tf - k * (tf - ts)) / params.heat_capacity_fast
        dts = k * (tf - ts) / params.heat_capacity_slow
        tf += dtf * h
        ts += dts * h
    return replace(state, temp_fast=tf, temp_slow=ts)


def fugitive_methane(gas_use_ej: float, params: ClimateParams) -> float:
    """Mt CH4/yr leaked from the natural-gas supply chain serving `gas_use_ej`."""
    if gas_use_ej < 0:
        raise ValueError("gas use cannot be negative")
    gas_mass_mt = gas_use_ej * 1000.0 / params.gas_energy_density_mj_per_kg
    return params.leakage_rate * gas_mass_mt


def energy_ch4(
    params: ClimateParams, coal_ej: float, gas_ej: float, oil_ej: float
) -> float:
    """Mt CH4/yr from fossil-fuel supply chains (mining, venting, leakage)."""
    return (
        fugitive_methane(gas_ej, params)
        + coal_ej * params.coal_ch4_mt_per_ej
        + oil_ej * params.oil_ch4_mt_per_ej
    )


def methane_series(
    params: ClimateParams, fuel_use: Mapping[int, Mapping[str, float]]
) -> dict[int, float]:
    """Total anthropogenic CH4 (Mt/yr) per model year from fuel use + non-energy sources."""
    out = {}
    for year in sorted(fuel_use):
        f = fuel_use[year]
        out[year] = energy_ch4(
            params, f.get("coal", 0.0), f.get("gas", 0.0), f.get("oil", 0.0)
        ) + params.nonenergy_ch4.at(year)
    return out


@dataclass(frozen=True)
class ClimateRow:
    year: int
    co2_ppm: float
    forcing_w_m2: float
    anomaly_k: float
    ch4_mt: float  # excess burden


def run_climate(
    params: ClimateParams,
    co2_by_year: Mapping[int, float],
    ch4_by_year: Mapping[int, float],
    report_years: list[int],
) -> list[ClimateRow]:
    """Spin up over the historical series, then emulate the model era.

    Model-era emissions are linearly interpolated between grid years; the
    integration is annual throughout. Reported values are the state at the
    start of each report year.
    """
    model_years = sorted(co2_by_year)
    model_start = model_years[0]
    co2_knots = {y: v for y, v in params.history_co2.to_mapping().items() if y < model_start}
    co2_knots.update({y: co2_by_year[y] for y in model_years})
    ch4_knots = {y: v for y, v in params.history_ch4.to_mapping().items() if y < model_start}
    ch4_knots.update({y: ch4_by_year[y] for y in model_years})
    co2 = Series.from_mapping(co2_knots)
    ch4 = Series.from_mapping(ch4_knots)

    state = ClimateState()
    rows: dict[int, ClimateRow] = {}
    wanted = set(report_years)
    end = max(report_years)
    for year in range(params.history_start, end + 1):
        if year in wanted:
            ppm = concentration_ppm(state, params)
            forcing = radiative_forcing(
                params,
                ppm,
                state.ch4_burden,
                params.exogenous_forcing.at(year) + params.forcing_offset,
            )
            rows[year] = ClimateRow(
                year=year,
                co2_ppm=ppm,
                forcing_w_m2=forcing,
                anomaly_k=state.temp_fast,
                ch4_mt=state.ch4_burden,
            )
        if year == end:
            break
        f = radiative_forcing(
            params,
            concentration_ppm(state, params),
            state.ch4_burden,
            params.exogenous_forcing.at(year) + params.forcing_offset,
        )
        state = step_carbon(state, params, co2.at(year + 0.5), 1.0)
        state = step_ch4(state, params, ch4.at(year + 0.5), 1.0)
        state = step_temperature(state, params, f, 1.0)
    return [rows[y] for y in report_years]
