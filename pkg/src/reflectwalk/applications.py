"""Gambler's-ruin durations as boundary-crossing times, plus sweep presets."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import HALF, Boundary, DomainError, StoppingTimeDist, WalkKind, WalkParams, exact_prob
from .exact_engine import stopping_time_dist
from .order import OrderReport, survival_monotone_sweep


class StartMode(str, enum.Enum):
    EQUAL_CAPITALS = "equal"        # z = a/2, a even
    RANDOM_PLUS_MINUS_ONE = "pm1"   # z = a/2 +- 1 each w.p. 1/2, a even
    RANDOM_ODD_SPLIT = "odd"        # z = (a -+ 1)/2 each w.p. 1/2, a odd


@dataclass(frozen=True)
class RuinScenario:
    a: int
    start_mode: StartMode
    p: Fraction

    def __post_init__(self):
        mode = StartMode(self.start_mode)
        object.__setattr__(self, "start_mode", mode)
        object.__setattr__(self, "p", exact_prob(self.p))
        if self.a < 1:
            raise DomainError("total capital must be positive")
        if mode is StartMode.RANDOM_ODD_SPLIT:
            if self.a % 2 == 0:
                raise DomainError("odd split needs odd total capital")
        elif self.a % 2:
            raise DomainError(f"{mode.value} start needs even total capital")

    def walk(self) -> tuple[WalkKind, int]:
        """Reflected walk and constant threshold whose crossing time is the duration."""
        if self.start_mode is StartMode.EQUAL_CAPITALS:
            return WalkKind.S, self.a // 2
        if self.start_mode is StartMode.RANDOM_PLUS_MINUS_ONE:
            return WalkKind.U, self.a // 2
        # doubling the stakes turns (a-+1)/2 into a-+1, i.e. the |V| walk against a
        return WalkKind.V, self.a


def ruin_duration_dist(scenario: RuinScenario, horizon: int) -> StoppingTimeDist:
    kind, level = scenario.walk()
    return stopping_time_dist(WalkParams(kind, p=scenario.p), Boundary.constant(level, horizon), horizon)


def truncated_expected_duration(scenario: RuinScenario, horizon: int) -> Fraction:
    """E[min(duration, horizon)]; the survival mass is reported separately."""
    return ruin_duration_dist(scenario, horizon).truncated_mean()


def exact_grid(lo, hi, count: int) -> list[Fraction]:
    """``count`` equally spaced exact rationals from lo to hi inclusive."""
    lo, hi = Fraction(lo), Fraction(hi)
    if count < 1:
        raise DomainError("grid needs at least one point")
    if count == 1:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def duration_sweep(a: int, mode, p_grid: Sequence, horizon: int) -> list[dict]:
    """Truncated mean and tail mass of the duration for each p on the grid."""
    rows = []
    for p in p_grid:
        dist = ruin_duration_dist(RuinScenario(a, mode, p), horizon)
        rows.append({"p": exact_prob(p), "truncated_mean": dist.truncated_mean(),
                     "survival_at_horizon": dist.survival_at_horizon})
    return rows


def ruin_monotonicity_preset(a: int, mode, horizon: int, grid_points: int = 11) -> OrderReport:
    """Duration survival nondecreasing in p on an exact grid over [0, 1/2]."""
    kind, level = RuinScenario(a, mode, HALF).walk()
    grid = exact_grid(0, HALF, grid_points)
    return survival_monotone_sweep(kind, Boundary.constant(level, horizon), grid, horizon)


def maximizer_on_grid(rows: list[dict]) -> Fraction:
    """The p whose truncated mean duration is largest (first one on ties)."""
    best = max(rows, key=lambda r: r["truncated_mean"])
    return best["p"]
