"""Piecewise-linear time series keyed by calendar year.

Used for all exogenous paths in scenario configs (fuel prices, population,
GDP, forcing histories). Values are linearly interpolated between knots and
clamped to the end values outside the knot range.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass


@dataclass(frozen=True)
class Series:
    knots: tuple[tuple[int, float], ...]  # sorted by year, unique years

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Series":
        items = sorted((int(y), float(v)) for y, v in mapping.items())
        if not items:
            raise ValueError("series needs at least one knot")
        years = [y for y, _ in items]
        if len(set(years)) != len(years):
            raise ValueError("duplicate years in series")
        return cls(knots=tuple(items))

    def at(self, year: float) -> float:
        ks = self.knots
        if year <= ks[0][0]:
            return ks[0][1]
        if year >= ks[-1][0]:
            return ks[-1][1]
        years = [y for y, _ in ks]
        i = bisect_right(years, year)
        y0, v0 = ks[i - 1]
        y1, v1 = ks[i]
        return v0 + (v1 - v0) * (year - y0) / (y1 - y0)

    def to_mapping(self) -> dict[int, float]:
        return {y: v for y, v in self.knots}
