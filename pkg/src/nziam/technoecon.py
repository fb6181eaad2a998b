"""Technology cost and resource accounting.

Levelized costs per unit of output, direct-air-capture parameter
interpolation, and graded geologic storage supply curves. All costs are in
2015 USD; energy in GJ, CO2 in tonnes unless a field name says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import StorageExhaustedError


@dataclass(frozen=True)
class Technology:
    """One conversion technology serving a sector.

    ``fuels`` maps fuel name -> GJ consumed per unit of output.
    ``emission_factor`` is tCO2 per unit output; negative values denote net
    removals (bio + capture), in which case ``capture_fraction`` scales the
    tonnage sent to geologic storage.
    Cost and intensity decline rates are fractional per-year improvements
    applied from 2020 until ``decline_until``, after which coefficients are
    held constant.
    """

    name: str
    sector: str
    fuels: tuple[tuple[str, float], ...]
    nonenergy_cost: float  # $/unit output at 2020
    emission_factor: float  # tCO2/unit output at 2020
    capture_fraction: float
    water_m3: float  # m3/unit output
    lifetime_yr: int
    available_from: int
    nonenergy_decline: float = 0.0
    intensity_decline: float = 0.0
    decline_until: int = 2050

    def _improvement(self, rate: float, year: int | float) -> float:
        if rate == 0.0:
            return 1.0
        y = min(max(year, 2020), self.decline_until)
        return (1.0 - rate) ** (y - 2020)

    def nonenergy_at(self, year: int | float) -> float:
        return self.nonenergy_cost * self._improvement(self.nonenergy_decline, year)

    def fuels_at(self, year: int | float) -> tuple[tuple[str, float], ...]:
        f = self._improvement(self.intensity_decline, year)
        return tuple((name, gj * f) for name, gj in self.fuels)

    def emission_factor_at(self, year: int | float) -> float:
        # Emissions track fuel input, so the intensity improvement applies.
        return self.emission_factor * self._improvement(self.intensity_decline, year)


@dataclass(frozen=True)
class DacParams:
    """Direct air capture coefficients with 2020/2050 interpolation endpoints.

    Energy inputs are GJ per tCO2 net removal; non-energy cost is $ per tCO2.
    The deployment fields below the coefficient block are scenario plumbing:
    ``supply_slope`` gives new capacity (GtCO2/yr) added per $/tCO2 of margin
    between the carbon price and the levelized cost of removal.
    """

    gas_2020: float = 8.1
    gas_2050: float = 5.3
    elec_2020: float = 1.8
    elec_2050: float = 1.3
    nonenergy_2020: float = 300.0
    nonenergy_2050: float = 180.0
    water_m3_per_t: float = 4.7
    lifetime_yr: int = 40
    enabled: bool = True
    available_from: int = 2030
    heat_capture_fraction: float = 1.0
    supply_slope: Mapping[str, float] = field(default_factory=dict)


def dac_params_at(dac: DacParams, year: int | float) -> tuple[float, float, float]:
    """(gas GJ/t, electricity GJ/t, non-energy $/t) for plants built in `year`.

    Coefficients decline linearly between the 2020 and 2050 endpoints and are
    constant after 2050.
    """
    if year < 2020:
        raise ValueError(f"DAC coefficients undefined before 2020 (got {year})")
    t = min(year - 2020, 30) / 30.0
    gas = dac.gas_2020 + (dac.gas_2050 - dac.gas_2020) * t
    elec = dac.elec_2020 + (dac.elec_2050 - dac.elec_2020) * t
    nonenergy = dac.nonenergy_2020 + (dac.nonenergy_2050 - dac.nonenergy_2020) * t
    return gas, elec, nonenergy


def dac_levelized_cost(
    dac: DacParams,
    year: int | float,
    gas_price: float,
    elec_price: float,
    storage_cost: float,
) -> float:
    """All-in $ per tCO2 removed for a plant built in `year`."""
    if gas_price < 0 or elec_price < 0 or storage_cost < 0:
        raise ValueError("prices must be non-negative")
    gas, elec, nonenergy = dac_params_at(dac, year)
    return nonenergy + gas * gas_price + elec * elec_price + storage_cost


@dataclass(frozen=True)
class StorageSupplyCurve:
    """Graded geologic storage: (cumulative capacity GtCO2, marginal $/tCO2) tiers.

    Capacities are cumulative breakpoints; costs must be strictly increasing.
    """

    tiers: tuple[tuple[float, float], ...]

    @property
    def total_capacity(self) -> float:
        return self.tiers[-1][0]

    def scaled(self, cost_multiplier: float = 1.0, capacity_multiplier: float = 1.0) -> "StorageSupplyCurve":
        return StorageSupplyCurve(
            tiers=tuple((cap * capacity_multiplier, cost * cost_multiplier) for cap, cost in self.tiers)
        )


def storage_marginal_cost(curve: StorageSupplyCurve, cumulative: float) -> float:
    """Marginal cost of the tier containing `cumulative` injected GtCO2.

    Left-continuous step function: a tier covers injection up to and
    including its capacity breakpoint.
    """
    if cumulative < 0:
        raise ValueError("cumulative injection cannot be negative")
    for cap, cost in curve.tiers:
        if cumulative <= cap:
            return cost
    raise StorageExhaustedError(
        f"cumulative injection {cumulative:.3f} Gt exceeds total storage capacity "
        f"{curve.total_capacity:.3f} Gt"
    )


def tech_levelized_cost(
    tech: Technology,
    year: int | float,
    fuel_prices: Mapping[str, float],
    carbon_price: float,
    storage_cost: float,
    coeff_year: int | float | None = None,
) -> float:
    """Levelized $ per unit output at current prices.

    `coeff_year` selects the coefficient vintage (defaults to `year`); costs
    always use current prices. Removal technologies (negative emission
    factor) earn the full carbon credit and pay storage on the captured
    tonnage.
    """
    cy = year if coeff_year is None else coeff_year
    cost = tech.nonenergy_at(cy)
    for fuel, gj in tech.fuels_at(cy):
        try:
            price = fuel_prices[fuel]
        except KeyError:
            raise LookupError(f"no price for fuel '{fuel}' (technology '{tech.name}')") from None
        cost += gj * price
    ef = tech.emission_factor_at(cy)
    net_ef = ef if ef < 0 else ef * (1.0 - tech.capture_fraction)
    captured = abs(ef) * tech.capture_fraction
    cost += net_ef * carbon_price + captured * storage_cost
    return cost


def net_emission_factor(tech: Technology, coeff_year: int | float) -> float:
    """tCO2 emitted to atmosphere per unit output (negative for removals)."""
    ef = tech.emission_factor_at(coeff_year)
    return ef if ef < 0 else ef * (1.0 - tech.capture_fraction)


def captured_factor(tech: Technology, coeff_year: int | float) -> float:
    """tCO2 sent to geologic storage per unit output."""
    return abs(tech.emission_factor_at(coeff_year)) * tech.capture_fraction


def dac_storage_per_tonne(dac: DacParams, build_year: int | float, gas_co2_per_gj: float) -> float:
    """tCO2 injected per tonne removed: the tonne itself plus captured process-heat CO2."""
    gas, _, _ = dac_params_at(dac, build_year)
    return 1.0 + gas * gas_co2_per_gj * dac.heat_capture_fraction
