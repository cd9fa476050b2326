import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reflectwalk.core import HALF, DomainError, EnumerationTooLargeError, Pmf, UnsupportedKindError, WalkKind, WalkParams
from reflectwalk.exact_engine import (brute_force_pmf, brute_force_stopping_time_dist, canonicalize_boundary,
                                      decomposition_check, evolve_augmented, evolve_pmf, evolve_pmf_sequence,
                                      is_canonical, odd_horizon_survival_closed_form, path_count_probability,
                                      path_set_counts, stopping_time_dist, survival_curve,
                                      u_constrained_endpoint_prob, u_survival_prob)

P = WalkParams.bernoulli
GRID = [Fraction(k, 10) for k in range(11)]
kinds = st.sampled_from(["S", "U", "V"])
probs = st.fractions(min_value=0, max_value=1, max_denominator=12)


def naive_survival(c, p):
    """P(|U_i| <= c_i, i = 1..n) straight from increment vectors."""
    p = Fraction(p)
    total = Fraction(0)
    for start in (1, -1):
        for incs in itertools.product((1, -1), repeat=len(c)):
            pos, ok = start, True
            for x, ci in zip(incs, c):
                pos += x
                if abs(pos) > ci:
                    ok = False
                    break
            if ok:
                ups = incs.count(1)
                total += HALF * p**ups * (1 - p) ** (len(c) - ups)
    return total


def test_evolve_examples():
    assert evolve_pmf(P("S", HALF), 2) == Pmf({0: HALF, 2: HALF})
    assert evolve_pmf(P("S", Fraction(1, 3)), 1) == Pmf({1: 1})
    assert evolve_pmf(P("S", Fraction(1, 3)), 2) == Pmf({0: Fraction(4, 9), 2: Fraction(5, 9)})
    assert evolve_pmf(P("V", HALF), 1) == Pmf({1: HALF, 3: HALF})
    assert brute_force_pmf(P("U", HALF), 0) == Pmf({1: 1})
    assert brute_force_pmf(P("V", Fraction(1, 3)), 1) == Pmf({1: HALF, 3: HALF})


def test_augmented_u_carries_flag():
    dist = evolve_augmented(P("U", Fraction(1, 3)), 2)[-1]
    assert set(dist) == {(1, True), (1, False), (3, False)}
    assert sum(dist.values()) == 1


@settings(max_examples=40, deadline=None)
@given(kinds, probs, st.integers(0, 10))
def test_evolve_matches_brute_force(kind, p, n):
    assert evolve_pmf(P(kind, p), n) == brute_force_pmf(P(kind, p), n)


@settings(max_examples=25, deadline=None)
@given(kinds, probs)
def test_sequence_is_consistent(kind, p):
    seq = evolve_pmf_sequence(P(kind, p), 6)
    assert len(seq) == 7
    assert seq[4] == evolve_pmf(P(kind, p), 4)


def test_brute_force_limits():
    with pytest.raises(EnumerationTooLargeError):
        brute_force_pmf(P("S", HALF), 15)
    with pytest.raises(UnsupportedKindError):
        evolve_pmf(WalkParams.gaussian(0.5), 3)


def test_stopping_time_examples():
    d = stopping_time_dist(P("S", Fraction(1, 3)), [2, 2, 2, 2], 4)
    assert d.pmf == {2: Fraction(5, 9), 4: Fraction(20, 81)}
    assert d.survival_at_horizon == Fraction(16, 81)
    d = stopping_time_dist(P("S", 0), [3] * 6, 6)
    assert d.pmf == {3: 1}
    d = stopping_time_dist(P("S", HALF), [2] * 12, 12)
    assert all(d.prob(2 * k) == Fraction(1, 2**k) for k in range(1, 7))


@settings(max_examples=30, deadline=None)
@given(kinds, probs, st.lists(st.integers(1, 5), min_size=8, max_size=8))
def test_stopping_time_matches_brute_force(kind, p, raw):
    b = [2 * x + 1 for x in raw] if kind == "V" else raw
    assert stopping_time_dist(P(kind, p), b, 8) == brute_force_stopping_time_dist(P(kind, p), b, 8)


def test_survival_curve_and_errors():
    curve = survival_curve(P("S", Fraction(1, 3)), [2] * 4, 4)
    assert curve[0] == 1 and curve[-1] == Fraction(16, 81)
    with pytest.raises(DomainError):
        stopping_time_dist(P("V", HALF), [2, 3], 2)
    with pytest.raises(DomainError):
        stopping_time_dist(P("S", HALF), [2], 3)
    with pytest.raises(DomainError):
        stopping_time_dist(P("S", HALF), [Fraction(3, 2)], 1)


def test_u_survival_examples():
    for p in GRID:
        assert u_survival_prob([0], p) == HALF
    assert u_survival_prob([0, 1, 0], Fraction(1, 3)) == Fraction(2, 9)
    # |U_2| = 3 has probability 1/4 at p = 1/2, so the caps (2, 2) are not slack
    assert u_survival_prob([2, 2], HALF) == Fraction(3, 4)
    assert u_survival_prob([2, 3], HALF) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=9), probs)
def test_u_survival_matches_enumeration(c, p):
    assert u_survival_prob(c, p) == naive_survival(c, p)


def test_path_set_counts_examples():
    counts = path_set_counts([], 1)
    assert counts.plus(0) == 1
    counts = path_set_counts([1], 2)
    assert counts.plus(1) == counts.plus(-1) == counts.minus(1) == counts.minus(-1) == 1
    with pytest.raises(DomainError):
        path_set_counts([1, 1], 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.data())
def test_path_counts_mirror_and_probability(n, data):
    c = data.draw(st.lists(st.integers(0, n + 1), min_size=n - 1, max_size=n - 1))
    p = data.draw(probs)
    counts = path_set_counts(c, n)
    for k in range(-n - 1, n + 2):
        assert counts.plus(k) == counts.minus(-k)
        assert path_count_probability(counts, k, p) == u_constrained_endpoint_prob(c, n, k, p)


def test_odd_closed_form():
    for c in ([0], [1, 2, 0], [2, 1, 2, 1, 0], [1, 0, 1, 2, 0]):
        for p in GRID:
            assert odd_horizon_survival_closed_form(c, p) == u_survival_prob(c, p)
    with pytest.raises(DomainError):
        odd_horizon_survival_closed_form([1, 0], HALF)


def test_canonicalize_examples():
    # parity fixing lowers c_1 and c_3; the min rule then pulls c_2 down
    assert canonicalize_boundary([1, 2, 1]) == (0, 1, 0)
    assert canonicalize_boundary([1, 3, 1]) == (0, 1, 0)
    assert canonicalize_boundary([3, 3, 3]) == (2, 3, 2)
    assert canonicalize_boundary([2, 3, 4]) == (2, 3, 4)
    assert is_canonical(canonicalize_boundary([5, 5, 5, 5]))
    with pytest.raises(DomainError):
        canonicalize_boundary([0, 0])


def test_canonicalize_preserves_survival():
    rng = random.Random(11)
    for _ in range(60):
        c = [rng.randint(0, 8) for _ in range(rng.randint(1, 10))]
        try:
            canon = canonicalize_boundary(c)
        except DomainError:
            assert all(u_survival_prob(c, p) == 0 for p in GRID)
            continue
        assert is_canonical(canon)
        for p in GRID:
            assert u_survival_prob(c, p) == u_survival_prob(canon, p)


def test_decomposition_examples():
    for p in GRID:
        assert decomposition_check([2, 1], 1, p, "gamma").equal
        assert decomposition_check([2, 1], 1, p, "delta").equal
        assert decomposition_check([2, 3, 2, 1], 3, p, "delta").equal
        assert decomposition_check([2, 3, 4, 3], 3, p, "gamma").equal
    # with c_m = m + 1 no minus-started path reaches c_m, so delta has one term
    rep = decomposition_check([2, 3, 4, 3], 3, Fraction(1, 3), "delta")
    assert path_set_counts([2, 3], 3).minus(4) == 0 and rep.equal


def test_decomposition_preconditions():
    with pytest.raises(DomainError):
        decomposition_check([2, 3], 1, HALF, "delta")  # c_2 != c_1 - 1
    with pytest.raises(DomainError):
        decomposition_check([0, 1, 0], 2, HALF, "gamma")  # c_2 < 2
    with pytest.raises(DomainError):
        decomposition_check([1, 0], 1, HALF, "delta")  # not canonical
    with pytest.raises(DomainError):
        decomposition_check([2, 1], 1, HALF, "beta")
