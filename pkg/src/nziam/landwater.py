"""Rent-based land allocation, afforestation carbon, and water accounting.

Land competes in a single logit nest per region over five uses: food
cropland, bioenergy cropland, forest, grassland, and other natural land.
A configurable fraction of non-commercial land (grassland + other) is
protected and excluded from the market.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

FOOD = "food_crops"
BIOENERGY = "bioenergy"
FOREST = "forest"
GRASSLAND = "grassland"
OTHER = "other"
LAND_USES = (FOOD, BIOENERGY, FOREST, GRASSLAND, OTHER)


@dataclass(frozen=True)
class LandUse:
    name: str
    base_area_km2: float
    base_rent: float  # $/km2/yr
    uptake_tco2_km2: float  # carbon uptake for forest, 0 elsewhere
    yield_gj_km2: float  # bioenergy yield at 2020, 0 elsewhere
    irrigation_m3_km2: float
    non_commercial: bool


@dataclass(frozen=True)
class LandConfig:
    """One region's land base and market settings."""

    uses: tuple[LandUse, ...]
    protection_fraction: float = 0.90

    def use(self, name: str) -> LandUse:
        for u in self.uses:
            if u.name == name:
                return u
        raise KeyError(name)

    @property
    def total_area(self) -> float:
        return sum(u.base_area_km2 for u in self.uses)

    def protected_area(self, name: str) -> float:
        u = self.use(name)
        return u.base_area_km2 * self.protection_fraction if u.non_commercial else 0.0

    def allocatable_base(self, name: str) -> float:
        u = self.use(name)
        return u.base_area_km2 - self.protected_area(name)

    @property
    def available_area(self) -> float:
        """Land open to the rent market after protection."""
        return sum(self.allocatable_base(u.name) for u in self.uses)


@dataclass(frozen=True)
class WaterLedger:
    """Annual water consumption by category, km3/yr."""

    food_irrigation: float = 0.0
    bioenergy_irrigation: float = 0.0
    municipal: float = 0.0
    industrial_power: float = 0.0
    dac: float = 0.0

    @property
    def total(self) -> float:
        return (
            self.food_irrigation
            + self.bioenergy_irrigation
            + self.municipal
            + self.industrial_power
            + self.dac
        )


def land_allocate(
    rents: Mapping[str, float],
    weights: Mapping[str, float],
    gamma_land: float,
    available: float,
) -> dict[str, float]:
    """Split `available` km2 across uses with share_i proportional to w_i * rent_i^gamma."""
    if available <= 0.0:
        raise ValueError("available land must be positive")
    terms: dict[str, float] = {}
    for use, rent in rents.items():
        w = weights.get(use, 0.0)
        if w <= 0.0:
            terms[use] = 0.0
            continue
        if rent <= 0.0:
            raise ValueError(f"non-positive rent for land use '{use}' with positive weight")
        terms[use] = w * rent**gamma_land
    total = sum(terms.values())
    if total <= 0.0:
        raise ValueError("all rents non-positive")
    return {use: available * t / total for use, t in terms.items()}


def calibrate_land_weights(
    land: LandConfig, gamma_land: float, bio_weight_ratio: float = 1.0
) -> dict[str, float]:
    """Weights that reproduce the base allocation at base rents.

    Bioenergy starts from (near) zero area, so its weight is pegged to the
    land classes it can be grown on (cropland, grassland, other) rather than
    being share-calibrated; releasing protected land therefore expands the
    bioenergy supply curve.
    """
    pool = land.available_area
    weights: dict[str, float] = {}
    for u in land.uses:
        if u.name == BIOENERGY:
            continue
        share = land.allocatable_base(u.name) / pool
        if share <= 0.0:
            continue
        weights[u.name] = share / u.base_rent**gamma_land
    total = sum(weights.values())
    weights = {n: w / total for n, w in weights.items()}
    if BIOENERGY in [u.name for u in land.uses]:
        convertible = (
            weights.get(FOOD, 0.0) + weights.get(GRASSLAND, 0.0) + weights.get(OTHER, 0.0)
        )
        weights[BIOENERGY] = convertible * bio_weight_ratio
    return weights


def forest_rent(
    carbon_price: float, luc_fraction: float, uptake: float, base_rent: float
) -> float:
    """Forest rent with the land-carbon subsidy channel: base + P*phi*uptake."""
    if min(carbon_price, luc_fraction, uptake, base_rent) < 0:
        raise ValueError("forest rent inputs must be non-negative")
    return base_rent + carbon_price * luc_fraction * uptake


def afforestation_sink(forest_area_delta_km2: float, uptake_tco2_km2: float) -> float:
    """GtCO2/yr removed by forest gained since the base year (deforestation clamps to 0)."""
    if uptake_tco2_km2 < 0:
        raise ValueError("uptake must be non-negative")
    return max(forest_area_delta_km2, 0.0) * uptake_tco2_km2 * 1e-9


def water_account(
    activities: Mapping[str, float], coefficients: Mapping[str, float]
) -> WaterLedger:
    """Multiply activity levels by water coefficients into the category ledger.

    activities: food_cropland_km2, bioenergy_cropland_km2, population_millions,
    energy_water_km3 (pre-aggregated technology water), dac_removal_gt.
    coefficients: food_irrigation_m3_km2, bioenergy_irrigation_m3_km2,
    municipal_m3_per_capita, dac_m3_per_t.
    """
    for k, v in activities.items():
        if v < 0:
            raise ValueError(f"negative activity '{k}'")
    food = activities.get("food_cropland_km2", 0.0) * coefficients.get("food_irrigation_m3_km2", 0.0)
    bio = activities.get("bioenergy_cropland_km2", 0.0) * coefficients.get(
        "bioenergy_irrigation_m3_km2", 0.0
    )
    municipal = (
        activities.get("population_millions", 0.0)
        * 1e6
        * coefficients.get("municipal_m3_per_capita", 0.0)
    )
    industrial = activities.get("energy_water_km3", 0.0)
    dac = activities.get("dac_removal_gt", 0.0) * 1e9 * coefficients.get("dac_m3_per_t", 0.0)
    # m3 -> km3
    return WaterLedger(
        food_irrigation=food * 1e-9,
        bioenergy_irrigation=bio * 1e-9,
        municipal=municipal * 1e-9,
        industrial_power=industrial,
        dac=dac * 1e-9,
    )


def validate_uses(uses: Sequence[LandUse]) -> None:
    names = [u.name for u in uses]
    missing = [n for n in LAND_USES if n not in names]
    if missing:
        raise ValueError(f"land table missing uses: {missing}")
    extra = [n for n in names if n not in LAND_USES]
    if extra:
        raise ValueError(f"unknown land uses: {extra}")
