"""Stochastic-order verdicts, the conditional-dominance hypothesis check, and a
constructive monotone coupling of two reflected chains."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .core import (
    HALF,
    DomainError,
    ReflectWalkError,
    UnsupportedKindError,
    WalkKind,
    WalkParams,
    as_boundary,
    exact_prob,
    jsonable,
)
from .exact_engine import stopping_time_dist
from .kernels import KernelReport, bernoulli_abs_up_prob, u_walk_up_prob, v_walk_up_prob


class HypothesisViolatedError(ReflectWalkError):
    def __init__(self, report: "OrderReport"):
        super().__init__(f"conditional dominance fails: {report.witness}")
        self.report = report


@dataclass(frozen=True)
class OrderReport:
    holds: bool
    witness: dict | None
    comparisons_checked: int
    horizon: int | None = None
    detail: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise DomainError("a failing report must carry a witness")

    def to_json(self) -> dict:
        return jsonable(
            {
                "holds": self.holds,
                "witness": self.witness,
                "comparisons_checked": self.comparisons_checked,
                "horizon": self.horizon,
            }
        )


# ---------------------------------------------------------------- dominance


def first_dominance_violation(lower: Mapping, upper: Mapping):
    """Smallest threshold t with P_lower(X >= t) > P_upper(X >= t), or None."""
    points = sorted(set(lower) | set(upper))
    tail_lo = sum(lower.values(), Fraction(0))
    tail_hi = sum(upper.values(), Fraction(0))
    for t in points:
        if tail_lo > tail_hi:
            return t
        tail_lo -= lower.get(t, 0)
        tail_hi -= upper.get(t, 0)
    return None


def dominates_pmf(lower: Mapping, upper: Mapping) -> bool:
    """True iff ``upper`` first-order dominates ``lower`` (exact tail sums)."""
    return first_dominance_violation(lower, upper) is None


# ------------------------------------------------------- history classes


def _kernel(kind: WalkKind, cls, time: int, p: Fraction) -> KernelReport:
    if kind is WalkKind.S:
        return bernoulli_abs_up_prob(cls, p)
    if kind is WalkKind.U:
        return u_walk_up_prob(cls[0], cls[1], p)
    return v_walk_up_prob(cls, time, p)


def _value(kind: WalkKind, cls) -> int:
    return cls[0] if kind is WalkKind.U else cls


def _successors(kind: WalkKind, cls, time: int, p: Fraction):
    """(next class, probability) pairs, structural successors included even at zero mass."""
    rep = _kernel(kind, cls, time, p)
    out = []
    if kind is WalkKind.U:
        out.append(((rep.target_up, rep.zero_visited_next_up), rep.up_probability))
        if rep.target_down is not None:
            out.append(((rep.target_down, rep.zero_visited_next_down), rep.down_probability))
    else:
        out.append((rep.target_up, rep.up_probability))
        if rep.target_down is not None and rep.target_down != rep.target_up:
            out.append((rep.target_down, rep.down_probability))
    return out


def _start_class(kind: WalkKind):
    return {WalkKind.S: 0, WalkKind.U: (1, False), WalkKind.V: 1}[kind]


def _validate_pair(lower: WalkParams, upper: WalkParams):
    if lower.kind != upper.kind:
        raise DomainError("both chains must be of the same kind")
    if not lower.kind.is_bernoulli:
        raise UnsupportedKindError("lattice chains only")


def check_lemma2_hypothesis(lower: WalkParams, upper: WalkParams, horizon: int) -> OrderReport:
    """Check one-step conditional dominance over all ordered history pairs.

    Pairs of history classes are propagated jointly, keeping only those
    whose histories stay ordered (lower <= upper) at every time. For each
    surviving pair at times 0..horizon-1 the lower chain's next-state law
    must be dominated by the upper chain's. The witness records one
    representative history for each side.
    """
    _validate_pair(lower, upper)
    kind = lower.kind
    start = _start_class(kind)
    frontier = {(start, start): ((_value(kind, start),), (_value(kind, start),))}
    checked = 0
    for n in range(horizon):
        for (lc, uc), (lh, uh) in sorted(frontier.items(), key=lambda kv: kv[1]):
            checked += 1
            lo_law = _kernel(kind, lc, n, lower.p).law()
            hi_law = _kernel(kind, uc, n, upper.p).law()
            t = first_dominance_violation(lo_law, hi_law)
            if t is not None:
                witness = {
                    "time": n,
                    "threshold": t,
                    "lower_history": lh,
                    "upper_history": uh,
                    "lower_up": _kernel(kind, lc, n, lower.p).up_probability,
                    "upper_up": _kernel(kind, uc, n, upper.p).up_probability,
                }
                return OrderReport(False, witness, checked, horizon)
        nxt: dict = {}
        for (lc, uc), (lh, uh) in sorted(frontier.items(), key=lambda kv: kv[1]):
            for ln, _ in _successors(kind, lc, n, lower.p):
                for un, _ in _successors(kind, uc, n, upper.p):
                    if _value(kind, ln) <= _value(kind, un) and (ln, un) not in nxt:
                        nxt[(ln, un)] = (lh + (_value(kind, ln),), uh + (_value(kind, un),))
        frontier = nxt
    return OrderReport(True, None, checked, horizon)


# ---------------------------------------------------------------- coupling


@dataclass(frozen=True)
class CouplingStep:
    """Joint law of the two next states under the shared-uniform coupling."""

    joint: dict
    monotone: bool

    def marginals(self) -> tuple[dict, dict]:
        lo: dict = {}
        hi: dict = {}
        for (a, b), w in self.joint.items():
            lo[a] = lo.get(a, 0) + w
            hi[b] = hi.get(b, 0) + w
        return lo, hi


def quantile_coupling(lower: Mapping, upper: Mapping) -> CouplingStep:
    """Couple two finite laws through one uniform U: each side takes its
    U-quantile. Monotone whenever ``upper`` dominates ``lower``."""
    lo_items = sorted((k, v) for k, v in lower.items() if v)
    hi_items = sorted((k, v) for k, v in upper.items() if v)
    joint: dict = {}
    i = j = 0
    rem_lo, rem_hi = lo_items[0][1], hi_items[0][1]
    while i < len(lo_items) and j < len(hi_items):
        w = min(rem_lo, rem_hi)
        key = (lo_items[i][0], hi_items[j][0])
        joint[key] = joint.get(key, Fraction(0)) + w
        rem_lo -= w
        rem_hi -= w
        if rem_lo == 0:
            i += 1
            if i < len(lo_items):
                rem_lo = lo_items[i][1]
        if rem_hi == 0:
            j += 1
            if j < len(hi_items):
                rem_hi = hi_items[j][1]
    monotone = all(a <= b for a, b in joint)
    return CouplingStep(joint, monotone)


def _encode(kind: WalkKind, cls) -> int:
    if kind is WalkKind.U:
        return 2 * cls[0] + int(cls[1])
    return cls


def _decode_value(kind: WalkKind, code):
    return code // 2 if kind is WalkKind.U else code


class MonotoneCoupling:
    """Shared-uniform coupling of two reflected chains up to ``horizon``.

    ``step(n, lower_class, upper_class)`` gives the exact one-step joint law;
    ``sample`` draws coupled trajectories with one uniform per step.
    """

    def __init__(self, lower: WalkParams, upper: WalkParams, horizon: int):
        _validate_pair(lower, upper)
        if lower.kind is WalkKind.U and lower.p != upper.p and HALF not in (lower.p, upper.p):
            # the hypothesis breaks by time 2 whenever neither chain is symmetric
            report = check_lemma2_hypothesis(lower, upper, max(horizon, 3))
            if report.holds:
                raise DomainError("U-kind coupling needs one chain at p = 1/2")
            raise HypothesisViolatedError(report)
        report = check_lemma2_hypothesis(lower, upper, horizon)
        if not report.holds:
            raise HypothesisViolatedError(report)
        self.lower, self.upper, self.horizon = lower, upper, horizon
        self.kind = lower.kind
        self.hypothesis = report
        self._tables = None

    def step(self, n: int, lower_class, upper_class) -> CouplingStep:
        kind = self.kind
        lo = {_value(kind, c): w for c, w in _successors(kind, lower_class, n, self.lower.p)}
        hi = {_value(kind, c): w for c, w in _successors(kind, upper_class, n, self.upper.p)}
        return quantile_coupling(lo, hi)

    def _chain_tables(self, params: WalkParams):
        """Per-time transition tables over integer state codes for the sampler."""
        kind, n_steps = self.kind, self.horizon
        size = 2 * (2 * n_steps + 3) + 2
        down_p = np.ones((n_steps, size))
        nxt_down = np.zeros((n_steps, size), dtype=np.int64)
        nxt_up = np.zeros((n_steps, size), dtype=np.int64)
        frontier = {_start_class(kind)}
        for n in range(n_steps):
            new = set()
            for cls in frontier:
                code = _encode(kind, cls)
                rep = _kernel(kind, cls, n, params.p)
                if kind is WalkKind.U:
                    up_cls = (rep.target_up, rep.zero_visited_next_up)
                    dn_cls = (rep.target_down, rep.zero_visited_next_down) if rep.target_down is not None else up_cls
                else:
                    up_cls = rep.target_up
                    dn_cls = rep.target_down if rep.target_down is not None else up_cls
                down_p[n, code] = float(rep.down_probability)
                nxt_up[n, code] = _encode(kind, up_cls)
                nxt_down[n, code] = _encode(kind, dn_cls)
                new.update({up_cls, dn_cls})
            frontier = new
        return down_p, nxt_down, nxt_up

    def sample(self, n_paths: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
        """Coupled reflected-state trajectories, shape (n_paths, horizon + 1)."""
        if self._tables is None:
            self._tables = (self._chain_tables(self.lower), self._chain_tables(self.upper))
        (dl, ndl, nul), (du, ndu, nuu) = self._tables
        rng = np.random.default_rng(seed)
        uniforms = rng.random((n_paths, self.horizon))
        start = _encode(self.kind, _start_class(self.kind))
        lo_codes, hi_codes = _kernels.coupled_paths(uniforms, dl, ndl, nul, du, ndu, nuu, start, start)
        return _decode_value(self.kind, lo_codes), _decode_value(self.kind, hi_codes)


def build_monotone_coupling(lower: WalkParams, upper: WalkParams, horizon: int) -> MonotoneCoupling:
    return MonotoneCoupling(lower, upper, horizon)


# ------------------------------------------------------- stopping-time orders


def lr_order_stopping_time(boundary, p, p_prime, horizon: int) -> OrderReport:
    """Likelihood-ratio order of the |S| first-passage time between p and p'.

    Requires 0 < p <= p' <= 1/2 and a nonincreasing boundary. The ratio
    P'(T = n) / P(T = n) must be nondecreasing across the common support up
    to ``horizon``. A support mismatch is reported as a failing verdict.
    """
    b = as_boundary(boundary)
    p, p_prime = exact_prob(p), exact_prob(p_prime)
    if not (0 < p <= p_prime <= HALF):
        raise DomainError("need 0 < p <= p' <= 1/2")
    if not b.is_nonincreasing:
        raise DomainError("boundary must be nonincreasing")
    lo = stopping_time_dist(WalkParams(WalkKind.S, p=p), b, horizon)
    hi = stopping_time_dist(WalkParams(WalkKind.S, p=p_prime), b, horizon)
    if lo.support != hi.support:
        witness = {"reason": "support_mismatch", "support_p": lo.support, "support_p_prime": hi.support}
        return OrderReport(False, witness, 0, horizon)
    ratios = {n: hi.prob(n) / lo.prob(n) for n in lo.support}
    support = lo.support
    checked = 0
    for a, c in zip(support, support[1:]):
        checked += 1
        if ratios[c] < ratios[a]:
            witness = {"n": a, "n_next": c, "ratio": ratios[a], "ratio_next": ratios[c]}
            return OrderReport(False, witness, checked, horizon, {"ratios": ratios})
    return OrderReport(True, None, checked, horizon, {"ratios": ratios})


def survival_monotone_sweep(kind, boundary, p_grid: Sequence, horizon: int) -> OrderReport:
    """Check that P(T > n) is nondecreasing along an increasing grid in [0, 1/2]
    for every n <= horizon."""
    kind = WalkKind(kind)
    grid = [exact_prob(p) for p in p_grid]
    if any(g > HALF for g in grid) or grid != sorted(grid):
        raise DomainError("grid must be sorted within [0, 1/2]")
    curves = [stopping_time_dist(WalkParams(kind, p=p), boundary, horizon).survival_curve() for p in grid]
    checked = 0
    for i in range(len(grid) - 1):
        for n in range(1, horizon + 1):
            checked += 1
            if curves[i + 1][n] < curves[i][n]:
                witness = {
                    "n": n,
                    "p_low": grid[i],
                    "p_high": grid[i + 1],
                    "survival_low": curves[i][n],
                    "survival_high": curves[i + 1][n],
                }
                return OrderReport(False, witness, checked, horizon)
    detail = {"grid": grid, "survival": {str(g): c for g, c in zip(grid, curves)}}
    return OrderReport(True, None, checked, horizon, detail)
