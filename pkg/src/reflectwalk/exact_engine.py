"""Exact laws of the reflected Bernoulli walks.

Three independent routes are provided and cross-checked by the tests:

* ``evolve_pmf``: forward steps of the reflected-chain kernels, with |U|
  carried on the augmented state (value, zero_visited).
* a signed-lattice dynamic program in integer arithmetic, used for stopping
  times and survival probabilities (fast, polynomial in p).
* ``brute_force_pmf`` / ``brute_force_stopping_time_dist``: total
  enumeration of increment vectors.

The lattice path-counting machinery (``path_set_counts``, the gamma/delta
decompositions, boundary canonicalization) also lives here.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .core import (
    HALF,
    Boundary,
    DomainError,
    EnumerationTooLargeError,
    Pmf,
    StoppingTimeDist,
    UnsupportedKindError,
    WalkKind,
    WalkParams,
    as_boundary,
    exact_prob,
)
from .kernels import bernoulli_abs_up_prob, u_walk_up_prob, v_walk_up_prob

BRUTE_FORCE_MAX_N = 14


def _require_bernoulli(params: WalkParams):
    if not params.kind.is_bernoulli:
        raise UnsupportedKindError("Gaussian walks are handled by reflectwalk.gaussian")


# ------------------------------------------------------------ kernel-driven DP


def _initial_augmented(kind: WalkKind) -> dict:
    if kind is WalkKind.S:
        return {0: Fraction(1)}
    if kind is WalkKind.U:
        return {(1, False): Fraction(1)}
    return {1: Fraction(1)}


def _augmented_step(kind: WalkKind, dist: dict, time: int, p: Fraction) -> dict:
    out: dict = defaultdict(Fraction)
    for state, mass in dist.items():
        if kind is WalkKind.S:
            rep = bernoulli_abs_up_prob(state, p)
            out[rep.target_up] += mass * rep.up_probability
            if rep.target_down is not None:
                out[rep.target_down] += mass * rep.down_probability
        elif kind is WalkKind.U:
            value, flag = state
            rep = u_walk_up_prob(value, flag, p)
            out[(rep.target_up, rep.zero_visited_next_up)] += mass * rep.up_probability
            if rep.target_down is not None:
                out[(rep.target_down, rep.zero_visited_next_down)] += mass * rep.down_probability
        else:
            rep = v_walk_up_prob(state, time, p)
            out[rep.target_up] += mass * rep.up_probability
            out[rep.target_down] += mass * rep.down_probability
    return {k: v for k, v in out.items() if v}


def evolve_augmented(params: WalkParams, n: int) -> list[dict]:
    """Laws on the augmented state space at times 0..n.

    States are plain values for S and V and (value, zero_visited) pairs for U.
    """
    _require_bernoulli(params)
    if n < 0:
        raise DomainError("n must be nonnegative")
    dist = _initial_augmented(params.kind)
    laws = [dist]
    for t in range(n):
        dist = _augmented_step(params.kind, dist, t, params.p)
        laws.append(dist)
    return laws


def _marginal(kind: WalkKind, dist: dict) -> Pmf:
    if kind is not WalkKind.U:
        return Pmf.from_weights(dist)
    acc: dict = defaultdict(Fraction)
    for (value, _flag), mass in dist.items():
        acc[value] += mass
    return Pmf.from_weights(acc)


def evolve_pmf_sequence(params: WalkParams, n: int) -> list[Pmf]:
    """Marginal laws of the reflected walk at every time 0..n."""
    return [_marginal(params.kind, d) for d in evolve_augmented(params, n)]


def evolve_pmf(params: WalkParams, n: int) -> Pmf:
    """Exact law of |S_n|, |U_n| or |V_n| by n kernel steps."""
    return evolve_pmf_sequence(params, n)[-1]


# ---------------------------------------------------------------- brute force


def _start_values(kind: WalkKind) -> tuple:
    return (0,) if kind is WalkKind.S else (1, -1)


def _step_size(kind: WalkKind) -> int:
    return 2 if kind is WalkKind.V else 1


@lru_cache(maxsize=256)
def _endpoint_counts(kind: WalkKind, n: int) -> dict:
    # (|final|, number of +1 increments) -> number of paths; X0 weight applied later
    counts: dict = defaultdict(int)
    step = _step_size(kind)
    for start in _start_values(kind):
        for incs in itertools.product((1, -1), repeat=n):
            final = start + step * sum(incs)
            counts[(abs(final), incs.count(1))] += 1
    return dict(counts)


def _path_weight(kind: WalkKind, ups: int, n: int, p: Fraction) -> Fraction:
    w = p**ups * (1 - p) ** (n - ups)
    return w if kind is WalkKind.S else w * HALF


def _check_enumerable(params: WalkParams, n: int):
    _require_bernoulli(params)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > BRUTE_FORCE_MAX_N:
        raise EnumerationTooLargeError(
            f"refusing to enumerate horizon {n} > {BRUTE_FORCE_MAX_N}"
        )


def brute_force_pmf(params: WalkParams, n: int) -> Pmf:
    """Law of the reflected walk at time n by enumerating every increment vector."""
    _check_enumerable(params, n)
    acc: dict = defaultdict(Fraction)
    for (value, ups), count in _endpoint_counts(params.kind, n).items():
        acc[value] += count * _path_weight(params.kind, ups, n, params.p)
    return Pmf.from_weights(acc)


@lru_cache(maxsize=256)
def _first_passage_counts(kind: WalkKind, thresholds: tuple, horizon: int) -> dict:
    # (hitting time or None, number of +1 increments) -> number of paths
    step = _step_size(kind)
    counts: dict = defaultdict(int)
    for start in _start_values(kind):
        for incs in itertools.product((1, -1), repeat=horizon):
            pos, hit = start, None
            for i, x in enumerate(incs, start=1):
                pos += step * x
                if abs(pos) >= thresholds[i - 1]:
                    hit = i
                    break
            counts[(hit, incs.count(1))] += 1
    return dict(counts)


def brute_force_stopping_time_dist(params: WalkParams, boundary, horizon: int) -> StoppingTimeDist:
    """First-passage law by enumerating all increment vectors of length ``horizon``."""
    _check_enumerable(params, horizon)
    b = as_boundary(boundary)
    if len(b) < horizon:
        raise DomainError("boundary shorter than horizon")
    counts = _first_passage_counts(params.kind, tuple(b.thresholds[:horizon]), horizon)
    pmf: dict = defaultdict(Fraction)
    survival = Fraction(0)
    for (hit, ups), count in counts.items():
        w = count * _path_weight(params.kind, ups, horizon, params.p)
        if hit is None:
            survival += w
        else:
            pmf[hit] += w
    return StoppingTimeDist(dict(pmf), survival, horizon)


# ------------------------------------------------------- signed lattice DP

# Probabilities on the signed lattice are kept as integer numerators over a
# shared denominator den0 * d**t, where p = a/d in lowest terms.


class _Lattice:
    __slots__ = ("a", "b", "d", "step", "num", "den")

    def __init__(self, kind: WalkKind, p: Fraction):
        p = exact_prob(p)
        self.a, self.d = p.numerator, p.denominator
        self.b = self.d - self.a
        self.step = _step_size(kind)
        if kind is WalkKind.S:
            self.num, self.den = {0: 1}, 1
        else:
            self.num, self.den = {1: 1, -1: 1}, 2

    def advance(self):
        a, b, s = self.a, self.b, self.step
        new: dict = defaultdict(int)
        for pos, w in self.num.items():
            if a:
                new[pos + s] += a * w
            if b:
                new[pos - s] += b * w
        self.num = new
        self.den *= self.d

    def remove(self, predicate) -> int:
        """Drop positions satisfying ``predicate``; return their total numerator."""
        gone = 0
        keep = {}
        for pos, w in self.num.items():
            if predicate(pos):
                gone += w
            elif w:
                keep[pos] = w
        self.num = keep
        return gone

    def mass(self) -> Fraction:
        return Fraction(sum(self.num.values()), self.den)


def stopping_time_dist(params: WalkParams, boundary, horizon: int) -> StoppingTimeDist:
    """Exact law of inf{n >= 1 : |walk_n| >= b_n}, truncated at ``horizon``."""
    _require_bernoulli(params)
    b = as_boundary(boundary)
    if horizon < 1:
        raise DomainError("horizon must be at least 1")
    if len(b) < horizon:
        raise DomainError(f"boundary has {len(b)} thresholds, horizon is {horizon}")
    if not b.is_integer:
        raise DomainError("Bernoulli boundaries must be integers")
    if params.kind is WalkKind.V and any(x % 2 == 0 for x in b.thresholds[:horizon]):
        raise DomainError("V-walk thresholds must be odd")
    lat = _Lattice(params.kind, params.p)
    pmf = {}
    for n in range(1, horizon + 1):
        lat.advance()
        bn = b.at(n)
        hit = lat.remove(lambda pos: abs(pos) >= bn)
        if hit:
            pmf[n] = Fraction(hit, lat.den)
    return StoppingTimeDist(pmf, lat.mass(), horizon, meta={"kind": params.kind.value})


def survival_curve(params: WalkParams, boundary, horizon: int) -> list[Fraction]:
    """[P(T > 0), ..., P(T > horizon)]."""
    return stopping_time_dist(params, boundary, horizon).survival_curve()


def u_survival_prob(c: Sequence[int], p) -> Fraction:
    """P(|U_i| <= c_i for i = 1..n) with n = len(c)."""
    lat = _Lattice(WalkKind.U, exact_prob(p))
    for ci in c:
        lat.advance()
        lat.remove(lambda pos: abs(pos) > ci)
    return lat.mass()


def u_constrained_endpoint_prob(c: Sequence[int], n: int, k: int, p) -> Fraction:
    """P(|U_i| <= c_i for i < n, U_n = k) by lattice DP; ``c`` has length n - 1."""
    if len(c) != n - 1:
        raise DomainError("need exactly n - 1 constraints")
    lat = _Lattice(WalkKind.U, exact_prob(p))
    for ci in c:
        lat.advance()
        lat.remove(lambda pos: abs(pos) > ci)
    lat.advance()
    return Fraction(lat.num.get(k, 0), lat.den)


# ------------------------------------------------------------ path counting


@dataclass(frozen=True)
class PathSetCounts:
    """Numbers of +-1 paths (w_0, ..., w_n) with |w_0 + ... + w_i| <= c_i for
    0 < i < n ending at k, split by the sign of w_0."""

    n: int
    constraints: tuple
    plus_counts: dict
    minus_counts: dict

    def plus(self, k: int) -> int:
        return self.plus_counts.get(k, 0)

    def minus(self, k: int) -> int:
        return self.minus_counts.get(k, 0)

    def total(self, k: int) -> int:
        return self.plus(k) + self.minus(k)


def _count_from(start: int, c: Sequence[int], n: int) -> dict:
    counts = {start: 1}
    for i in range(1, n + 1):
        nxt: dict = defaultdict(int)
        for pos, w in counts.items():
            nxt[pos + 1] += w
            nxt[pos - 1] += w
        if i < n:
            ci = c[i - 1]
            nxt = {pos: w for pos, w in nxt.items() if abs(pos) <= ci}
        counts = dict(nxt)
    return {k: v for k, v in counts.items() if v}


def path_set_counts(c: Sequence[int], n: int) -> PathSetCounts:
    if n < 1:
        raise DomainError("n must be at least 1")
    if len(c) != n - 1:
        raise DomainError(f"need n - 1 = {n - 1} constraints, got {len(c)}")
    if any(ci < 0 for ci in c):
        raise DomainError("constraints must be nonnegative")
    return PathSetCounts(n, tuple(c), _count_from(1, c, n), _count_from(-1, c, n))


def path_count_probability(counts: PathSetCounts, k: int, p) -> Fraction:
    """P(history lies in the constrained set ending at k), from the counts alone.

    Each plus-started path has probability p^((n+k-1)/2) q^((n-k+1)/2) / 2 and
    each minus-started one p^((n+k+1)/2) q^((n-k-1)/2) / 2.
    """
    p = exact_prob(p)
    q = 1 - p
    n = counts.n
    if (k - n) % 2 == 0:
        return Fraction(0)
    total = Fraction(0)
    if counts.plus(k):
        total += counts.plus(k) * p ** ((n + k - 1) // 2) * q ** ((n - k + 1) // 2)
    if counts.minus(k):
        total += counts.minus(k) * p ** ((n + k + 1) // 2) * q ** ((n - k - 1) // 2)
    return total / 2


def odd_horizon_survival_closed_form(c: Sequence[int], p) -> Fraction:
    """P(|U_i| <= c_i, i <= n) for odd n with c_n = 0, via |S+^0| (pq)^((n-1)/2) / 2."""
    n = len(c)
    if n % 2 == 0 or c[-1] != 0:
        raise DomainError("closed form needs odd n and c_n = 0")
    p = exact_prob(p)
    counts = path_set_counts(c[:-1], n)
    return Fraction(counts.plus(0)) * (p * (1 - p)) ** ((n - 1) // 2) / 2


# ------------------------------------------------------------- canonical c


def is_canonical(c: Sequence[int]) -> bool:
    """Opposite parity to the index, capped at 1 + i, unit steps."""
    for i, ci in enumerate(c, start=1):
        if ci < 0 or (ci - i) % 2 == 0 or ci > i + 1:
            return False
    return all(abs(c[i + 1] - c[i]) == 1 for i in range(len(c) - 1))


def canonicalize_boundary(c: Sequence[int]) -> tuple:
    """Canonical caps with the same |U|-survival probability for every p.

    Entries of the wrong parity drop by one, then each entry is lowered to
    min(1 + i, c_i, c_(i-1) + 1, c_(i+1) + 1) until nothing changes. Raises
    DomainError when the survival probability is identically zero (some cap
    falls below 0).
    """
    if any(ci < 0 for ci in c):
        raise DomainError("caps must be nonnegative")
    out = [ci - 1 if (ci - i) % 2 == 0 else ci for i, ci in enumerate(c, start=1)]
    changed = True
    while changed:
        changed = False
        for j in range(len(out)):
            cands = [out[j], j + 2]
            if j > 0:
                cands.append(out[j - 1] + 1)
            if j + 1 < len(out):
                cands.append(out[j + 1] + 1)
            low = min(cands)
            if low != out[j]:
                out[j] = low
                changed = True
        if any(v < 0 for v in out):
            raise DomainError("boundary infeasible: survival probability is zero for every p")
    return tuple(out)


# ---------------------------------------------------------- decompositions


@dataclass(frozen=True)
class DecompositionReport:
    lhs: Fraction
    rhs: Fraction
    gamma_or_delta: Fraction
    which: str
    equal: bool


def _check_decomposable(c: Sequence[int], m: int, which: str):
    if which not in ("gamma", "delta"):
        raise DomainError("which must be 'gamma' or 'delta'")
    if m < 1 or len(c) < m + 1:
        raise DomainError("need caps c_1..c_(m+1) with m >= 1")
    if not is_canonical(c[: m + 1]):
        raise DomainError(f"caps {tuple(c[: m + 1])} are not canonical")
    cm = c[m - 1]
    if c[m] != cm - 1:
        raise DomainError("decomposition needs c_(m+1) = c_m - 1")
    if which == "gamma" and cm < 2:
        raise DomainError("gamma decomposition needs c_m >= 2")


def decomposition_check(c: Sequence[int], m: int, p, which: str) -> DecompositionReport:
    """Verify the one-step survival decomposition at step m exactly.

    gamma: P(caps c up to m+1) = P(caps c with c_m lowered by 2, up to m) + gamma.
    delta: P(caps c up to m)   = P(caps c up to m+1) + delta.
    The left-hand sides and the probability terms come from the lattice DP;
    gamma and delta come from the path-count closed forms.
    """
    _check_decomposable(c, m, which)
    p = exact_prob(p)
    q = 1 - p
    pq = p * q
    cm = c[m - 1]
    counts = path_set_counts(c[: m - 1], m)
    plus, minus = counts.plus(cm), counts.minus(cm)
    if which == "gamma":
        term = Fraction(plus, 2) * pq ** ((m - cm + 3) // 2) * (p ** (cm - 2) + q ** (cm - 2))
        term += Fraction(minus, 2) * pq ** ((m - cm + 1) // 2) * (p**cm + q**cm)
        lhs = u_survival_prob(c[: m + 1], p)
        lowered = list(c[:m])
        lowered[m - 1] = cm - 2
        rhs = u_survival_prob(lowered, p) + term
    else:
        term = Fraction(plus, 2) * pq ** ((m - cm + 1) // 2) * (p**cm + q**cm)
        if minus:
            term += Fraction(minus, 2) * pq ** ((m - cm - 1) // 2) * (p ** (cm + 2) + q ** (cm + 2))
        lhs = u_survival_prob(c[:m], p)
        rhs = u_survival_prob(c[: m + 1], p) + term
    return DecompositionReport(lhs, rhs, term, which, lhs == rhs)
