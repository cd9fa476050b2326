from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reflectwalk.core import HALF, DomainError, WalkKind, WalkParams
from reflectwalk.exact_engine import evolve_pmf, evolve_pmf_sequence, stopping_time_dist
from reflectwalk.order import (HypothesisViolatedError, MonotoneCoupling, _start_class, _successors,
                               build_monotone_coupling, check_lemma2_hypothesis, dominates_pmf,
                               first_dominance_violation, lr_order_stopping_time, quantile_coupling,
                               survival_monotone_sweep)

P = WalkParams.bernoulli
HALF_GRID = [Fraction(k, 20) for k in range(11)]


def test_dominance_examples():
    a = {0: HALF, 2: HALF}
    b = {0: Fraction(1, 4), 2: Fraction(3, 4)}
    assert dominates_pmf(a, b)
    assert dominates_pmf(a, a)
    assert not dominates_pmf(b, a)
    assert first_dominance_violation(b, a) == 2


@pytest.mark.parametrize("kind, lo, hi", [
    ("S", Fraction(2, 5), Fraction(3, 10)),
    ("V", Fraction(2, 5), Fraction(3, 10)),
    ("U", HALF, Fraction(3, 10)),
    ("S", Fraction(1, 3), Fraction(1, 3)),
])
def test_hypothesis_holds(kind, lo, hi):
    report = check_lemma2_hypothesis(P(kind, lo), P(kind, hi), 10)
    assert report.holds and report.witness is None and report.comparisons_checked > 0


def test_hypothesis_counterexample():
    report = check_lemma2_hypothesis(P("U", Fraction(2, 5)), P("U", Fraction(3, 10)), 3)
    assert not report.holds
    w = report.witness
    assert w["lower_history"] == (1, 0, 1) and w["upper_history"] == (1, 2, 1)
    assert w["lower_up"] == Fraction(13, 25) and w["upper_up"] == HALF
    assert report.to_json()["witness"]["lower_up"] == "13/25"


def test_hypothesis_mixed_kinds_rejected():
    with pytest.raises(DomainError):
        check_lemma2_hypothesis(P("S", HALF), P("V", HALF), 3)


def test_quantile_coupling_example():
    step = quantile_coupling({0: HALF, 2: HALF}, {0: Fraction(21, 50), 2: Fraction(29, 50)})
    assert step.joint == {(0, 0): Fraction(21, 50), (0, 2): Fraction(2, 25), (2, 2): HALF}
    assert step.monotone
    lo, hi = step.marginals()
    assert lo == {0: HALF, 2: HALF} and hi == {0: Fraction(21, 50), 2: Fraction(29, 50)}


def test_identical_params_give_diagonal_coupling():
    coupling = build_monotone_coupling(P("S", Fraction(1, 3)), P("S", Fraction(1, 3)), 6)
    step = coupling.step(1, 1, 1)
    assert all(a == b for a, b in step.joint)
    lo, hi = coupling.sample(500, seed=3)
    assert np.array_equal(lo, hi)


@pytest.mark.parametrize("kind, lo, hi", [
    ("S", Fraction(2, 5), Fraction(3, 10)),
    ("V", Fraction(2, 5), Fraction(3, 10)),
    ("U", HALF, Fraction(3, 10)),
])
def test_coupling_steps_are_exact_and_monotone(kind, lo, hi):
    coupling = MonotoneCoupling(P(kind, lo), P(kind, hi), 6)
    kind = WalkKind(kind)
    frontier = {(_start_class(kind), _start_class(kind))}
    for n in range(6):
        nxt = set()
        for lc, uc in frontier:
            step = coupling.step(n, lc, uc)
            assert step.monotone
            m_lo, m_hi = step.marginals()
            assert m_lo == {(c[0] if kind is WalkKind.U else c): w
                            for c, w in _successors(kind, lc, n, coupling.lower.p) if w}
            assert m_hi == {(c[0] if kind is WalkKind.U else c): w
                            for c, w in _successors(kind, uc, n, coupling.upper.p) if w}
            for a, _ in _successors(kind, lc, n, coupling.lower.p):
                for b, _ in _successors(kind, uc, n, coupling.upper.p):
                    av = a[0] if kind is WalkKind.U else a
                    bv = b[0] if kind is WalkKind.U else b
                    if av <= bv:
                        nxt.add((a, b))
        frontier = nxt


def test_coupling_sampler_small():
    lo, hi = build_monotone_coupling(P("S", Fraction(2, 5)), P("S", Fraction(3, 10)), 20).sample(20_000, seed=1)
    assert lo.shape == (20_000, 21)
    assert np.all(lo <= hi)
    exact = evolve_pmf(P("S", Fraction(3, 10)), 20)
    assert abs(np.mean(hi[:, 20]) - float(exact.mean())) < 0.1


def test_coupling_rejects_failing_hypothesis():
    with pytest.raises(HypothesisViolatedError) as info:
        MonotoneCoupling(P("U", Fraction(2, 5)), P("U", Fraction(3, 10)), 20)
    assert info.value.report.witness["lower_history"] == (1, 0, 1)


def test_lr_examples():
    report = lr_order_stopping_time([2] * 8, Fraction(3, 10), HALF, 8)
    assert report.holds
    ratios = report.detail["ratios"]
    assert ratios[2] == Fraction(25, 29) and ratios[4] == Fraction(625, 609)
    same = lr_order_stopping_time([3, 2, 2, 2, 2], Fraction(1, 5), Fraction(1, 5), 5)
    assert same.holds and set(same.detail["ratios"].values()) == {1}
    assert lr_order_stopping_time([3] + [2] * 9, Fraction(1, 5), Fraction(2, 5), 10).holds


def test_lr_preconditions():
    with pytest.raises(DomainError):
        lr_order_stopping_time([2, 3], Fraction(1, 5), Fraction(2, 5), 2)
    with pytest.raises(DomainError):
        lr_order_stopping_time([2, 2], Fraction(2, 5), Fraction(1, 5), 2)
    with pytest.raises(DomainError):
        lr_order_stopping_time([2, 2], 0, Fraction(1, 5), 2)


def test_sweep_examples():
    report = survival_monotone_sweep("S", [2] * 20, HALF_GRID, 20)
    assert report.holds
    curves = report.detail["survival"]
    assert curves[str(HALF)][2] == HALF == max(c[2] for c in curves.values())
    u = survival_monotone_sweep("U", [1], HALF_GRID, 1)
    assert len({c[1] for c in u.detail["survival"].values()}) == 1
    v = survival_monotone_sweep("V", [3], HALF_GRID, 1)
    assert {c[1] for c in v.detail["survival"].values()} == {HALF}


def test_sweep_rejects_bad_grid():
    with pytest.raises(DomainError):
        survival_monotone_sweep("S", [2] * 4, [Fraction(1, 4), Fraction(1, 5)], 4)
    with pytest.raises(DomainError):
        survival_monotone_sweep("S", [2] * 4, [Fraction(3, 5)], 4)


probs_half = st.fractions(min_value=0, max_value=HALF, max_denominator=20)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["S", "V"]), probs_half, probs_half)
def test_marginal_dominance_property(kind, a, b):
    near, far = max(a, b), min(a, b)
    lo_seq = evolve_pmf_sequence(P(kind, near), 10)
    hi_seq = evolve_pmf_sequence(P(kind, far), 10)
    assert all(dominates_pmf(x, y) for x, y in zip(lo_seq, hi_seq))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["S", "U", "V"]), st.lists(st.integers(1, 6), min_size=10, max_size=10), probs_half)
def test_survival_symmetry(kind, raw, p):
    b = [2 * x + 1 for x in raw] if kind == "V" else raw
    assert stopping_time_dist(P(kind, p), b, 10) == stopping_time_dist(P(kind, 1 - p), b, 10)
