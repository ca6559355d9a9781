"""Rate-selection scheme parameter types shared by the 1-D and 2-D paths."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Backoff:
    """Rate scaled down from the outage capacity at the estimated location."""

    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("backoff factor must lie in (0, 1]")


@dataclass(frozen=True)
class Interval:
    """Minimum outage capacity over a covariance-shaped confidence region."""

    q: float

    def __post_init__(self):
        if self.q < 0.0:
            raise ValueError("interval size q must be nonnegative")


@dataclass(frozen=True)
class Distance:
    """Minimum outage capacity over a fixed-radius disk, in meters."""

    radius: float

    def __post_init__(self):
        if self.radius < 0.0:
            raise ValueError("disk radius must be nonnegative")


RateScheme = Backoff | Interval | Distance
