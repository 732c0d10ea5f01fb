"""Dekad calendar arithmetic.

A year splits into 36 dekads: for each month, days 1-10, days 11-20 and
day 21 to the end of the month. Dekad 1 is Jan 1-10, dekad 36 is Dec
21-31. Growing seasons that straddle the calendar boundary are labeled
by harvest year: dekads of November/December of year t-1 belong to the
season harvested in year t.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass

from .errors import InfeasibleSpec

DEKADS_PER_YEAR = 36
DEKADS_PER_MONTH = 3

_MONTH_ABBR = ["Jan", "Feb", "Mar", "Apr", "May", "Jun",
               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]


@dataclass(frozen=True, order=True)
class DekadIndex:
    """A (year, dekad) pair; ordering is lexicographic."""

    year: int
    dekad: int

    def __post_init__(self):
        if not 1 <= self.dekad <= DEKADS_PER_YEAR:
            raise ValueError(f"dekad must be in [1, 36], got {self.dekad}")

    @property
    def month(self) -> int:
        return month_of_dekad(self.dekad)

    def next(self) -> "DekadIndex":
        if self.dekad == DEKADS_PER_YEAR:
            return DekadIndex(self.year + 1, 1)
        return DekadIndex(self.year, self.dekad + 1)

    def first_day(self) -> _dt.date:
        slot = (self.dekad - 1) % 3
        return _dt.date(self.year, self.month, 1 + 10 * slot)


def month_of_dekad(dekad: int) -> int:
    """Calendar month (1-12) containing a dekad-of-year (1-36)."""
    return (dekad - 1) // DEKADS_PER_MONTH + 1


def dekads_of_month(month: int) -> tuple[int, int, int]:
    first = (month - 1) * DEKADS_PER_MONTH + 1
    return (first, first + 1, first + 2)


def month_abbr(month: int) -> str:
    return _MONTH_ABBR[month - 1]


def dekad_of_date(date: _dt.date) -> DekadIndex:
    """Dekad containing a calendar date (day 1-10 / 11-20 / 21-end)."""
    if date.day <= 10:
        slot = 1
    elif date.day <= 20:
        slot = 2
    else:
        slot = 3
    return DekadIndex(date.year, 3 * (date.month - 1) + slot)


def season_dekads(sos: int, eos: int) -> list[int]:
    """Dekads-of-year from sos through eos, wrapping over the year end.

    A window that wraps (sos > eos) lists the pre-January part first,
    mirroring chronological order within one season.
    """
    if sos <= eos:
        return list(range(sos, eos + 1))
    return list(range(sos, DEKADS_PER_YEAR + 1)) + list(range(1, eos + 1))


def window_length(sos: int, eos: int) -> int:
    return len(season_dekads(sos, eos))


@dataclass(frozen=True)
class SeasonWindow:
    """Common season axis: start/end dekad-of-year plus their spread.

    ``sos`` and ``eos`` are whole dekads of year (1-36). When the season
    crosses the calendar boundary (sos > eos), the dekads >= sos fall in
    the year before harvest.
    """

    sos: int
    eos: int
    sos_sd: float = 0.0
    eos_sd: float = 0.0

    def __post_init__(self):
        for d in (self.sos, self.eos):
            if not 1 <= d <= DEKADS_PER_YEAR:
                raise InfeasibleSpec(f"season dekad {d} outside [1, 36]")
        n = window_length(self.sos, self.eos)
        if not 3 <= n <= DEKADS_PER_YEAR:
            raise InfeasibleSpec(f"season window of {n} dekads outside [3, 36]")
        if self.sos_sd < 0 or self.eos_sd < 0:
            raise InfeasibleSpec("season spread must be nonnegative")

    @property
    def n_dekads(self) -> int:
        return window_length(self.sos, self.eos)

    def dekads(self) -> list[int]:
        return season_dekads(self.sos, self.eos)

    def months(self) -> list[int]:
        """Calendar months touched by the window, in season order."""
        seen: list[int] = []
        for d in self.dekads():
            m = month_of_dekad(d)
            if not seen or seen[-1] != m:
                seen.append(m)
        return seen

    @property
    def n_months(self) -> int:
        return len(self.months())

    def dekad_indices(self, harvest_year: int) -> list[DekadIndex]:
        """Absolute dekads of the window for one harvest year.

        Dekads at or after ``sos`` in a wrapping window belong to
        ``harvest_year - 1``.
        """
        out = []
        wrapped = self.sos > self.eos
        for d in self.dekads():
            year = harvest_year - 1 if wrapped and d >= self.sos else harvest_year
            out.append(DekadIndex(year, d))
        return out

    def month_dekad_indices(self, harvest_year: int, months: int | None = None) -> list[DekadIndex]:
        """Absolute dekads of the first ``months`` full calendar months
        touched by the window (all 36ths of each month, not clipped to
        the window edges). ``months=None`` means every window month."""
        month_seq = self.months()
        if months is not None:
            month_seq = month_seq[:months]
        wrapped = self.sos > self.eos
        start_month = month_of_dekad(self.sos)
        out = []
        for m in month_seq:
            year_off = -1 if wrapped and m >= start_month else 0
            for d in dekads_of_month(m):
                out.append(DekadIndex(harvest_year + year_off, d))
        return out

    def month_labels(self) -> list[str]:
        return [month_abbr(m) for m in self.months()]


def circular_mean_dekad(dekads: list[float]) -> tuple[float, float]:
    """Mean and spread of dekads-of-year on the 36-dekad circle.

    Returns (mean dekad in (0, 36], circular standard deviation in
    dekads). The mean of an empty resultant (perfectly spread inputs)
    falls back to the arithmetic mean.
    """
    if not dekads:
        raise ValueError("no dekads to average")
    step = 2.0 * math.pi / DEKADS_PER_YEAR
    s = sum(math.sin(d * step) for d in dekads) / len(dekads)
    c = sum(math.cos(d * step) for d in dekads) / len(dekads)
    r = math.hypot(s, c)
    if r < 1e-12:
        mean = sum(dekads) / len(dekads)
        return mean % DEKADS_PER_YEAR or DEKADS_PER_YEAR, float("inf")
    mean = math.atan2(s, c) / step
    mean %= DEKADS_PER_YEAR
    if mean == 0.0:
        mean = float(DEKADS_PER_YEAR)
    sd = math.sqrt(max(0.0, -2.0 * math.log(r))) / step
    return mean, sd


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))
