"""One-step transition laws of the reflected Bernoulli chains.

|S| is Markov on {0, 1, ...}. |U| becomes Markov once the state carries a
flag recording whether 0 has been visited. |V| is a time-inhomogeneous chain
on the odd integers whose kernel depends on the parity of (k - 1)/2 against
the time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import HALF, DomainError, InvalidStateError, exact_prob


@dataclass(frozen=True)
class KernelReport:
    """Two-point (or one-point) law of the next reflected state."""

    up_probability: Fraction
    down_probability: Fraction
    target_up: int
    target_down: int | None = None
    zero_visited_next_up: bool = False
    zero_visited_next_down: bool = False

    def __post_init__(self):
        if self.up_probability + self.down_probability != 1:
            raise DomainError("kernel masses must sum to 1")
        if self.target_down is None:
            if self.down_probability != 0:
                raise DomainError("one-point kernel with positive down mass")
        elif self.target_down >= self.target_up:
            raise DomainError("target_up must exceed target_down")

    def law(self) -> dict[int, Fraction]:
        """Next-state masses, zero entries dropped."""
        out = {}
        if self.target_down is not None and self.down_probability:
            out[self.target_down] = self.down_probability
        if self.up_probability:
            out[self.target_up] = self.up_probability
        return out


def _two_point(up: Fraction, k_up: int, k_down: int, **flags) -> KernelReport:
    return KernelReport(up, 1 - up, k_up, k_down, **flags)


@lru_cache(maxsize=None)
def power_sum_ratio(k: int, p: Fraction) -> Fraction:
    """(p^(k+1) + q^(k+1)) / (p^k + q^k) with q = 1 - p."""
    if k < 1:
        raise DomainError("power_sum_ratio needs k >= 1")
    p = Fraction(p)
    q = 1 - p
    return (p ** (k + 1) + q ** (k + 1)) / (p**k + q**k)


def weighted_power_sum(p, l: int, m: int) -> Fraction:
    """(pq)^l (p^m + q^m); a weight, not a probability, so it may exceed 1."""
    if l < 0 or m < 0:
        raise DomainError("exponents must be nonnegative")
    p = exact_prob(p)
    q = 1 - p
    return (p * q) ** l * (p**m + q**m)


def bernoulli_abs_up_prob(k: int, p) -> KernelReport:
    """Kernel of |S|: from 0 the walk moves to 1; from k >= 1 it goes up w.p.
    power_sum_ratio(k, p)."""
    if k < 0:
        raise DomainError("state must be nonnegative")
    p = exact_prob(p)
    if k == 0:
        return KernelReport(Fraction(1), Fraction(0), 1, None)
    return _two_point(power_sum_ratio(k, p), k + 1, k - 1)


def u_walk_up_prob(k: int, zero_visited: bool, p) -> KernelReport:
    """Kernel of |U| given the current value and whether 0 was visited.

    After a zero visit the walk behaves like |S|. Before it, the up
    probability is (p^k + q^k) / (p^(k-1) + q^(k-1)), which is 1/2 at k = 1
    for every p.
    """
    if k < 0:
        raise DomainError("state must be nonnegative")
    p = exact_prob(p)
    if k == 0:
        if not zero_visited:
            raise InvalidStateError("|U| = 0 is only reachable by visiting 0")
        return KernelReport(Fraction(1), Fraction(0), 1, None, True, True)
    if zero_visited:
        up = power_sum_ratio(k, p)
        return _two_point(up, k + 1, k - 1, zero_visited_next_up=True, zero_visited_next_down=True)
    up = HALF if k == 1 else power_sum_ratio(k - 1, p)
    return _two_point(up, k + 1, k - 1, zero_visited_next_down=(k == 1))


def v_walk_up_prob(k: int, time: int, p) -> KernelReport:
    """Kernel of |V| at ``time`` from odd state ``k``.

    With j = (k - 1)/2: if j and ``time`` share parity (no net sign change
    so far) the up probability is (p^(j+1)+q^(j+1))/(p^j+q^j), otherwise
    (p^(j+2)+q^(j+2))/(p^(j+1)+q^(j+1)). From k = 1 the down move stays at 1.
    """
    if k < 1 or k % 2 == 0:
        raise DomainError(f"|V| lives on odd positive integers, got {k}")
    if time < 0 or k > 2 * time + 1:
        raise InvalidStateError(f"|V| cannot be {k} at time {time}")
    p = exact_prob(p)
    j = (k - 1) // 2
    if j % 2 == time % 2:
        up = HALF if j == 0 else power_sum_ratio(j, p)
    else:
        up = power_sum_ratio(j + 1, p)
    return _two_point(up, k + 2, max(k - 2, 1))
