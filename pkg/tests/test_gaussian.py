import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from reflectwalk.core import DomainError, EnumerationTooLargeError
from reflectwalk.gaussian import (Functional, brownian_functional_mc, brownian_order_mc, folded_kernel_cdf,
                                  folded_kernel_density, folded_kernel_mixture_form, joint_density_brute_force,
                                  joint_density_factorization_check, kernel_normalization, lr_ratio_monotone_check,
                                  mixture_density, mixture_weight, order_consistent, piecewise_linear_embed,
                                  sample_abs_walk, sample_folded_step)

phi = stats.norm.pdf


def test_kernel_examples():
    ys = np.linspace(0.0, 5.0, 51)
    assert np.allclose(folded_kernel_density(ys, 0.0, 0.0), 2 * phi(ys), rtol=1e-14, atol=0)
    assert folded_kernel_density(1e-300, 0.0, 0.0) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-12)
    assert np.allclose(folded_kernel_density(ys, 1.3, 0.0), phi(ys - 1.3) + phi(ys + 1.3), rtol=1e-13, atol=0)
    assert abs(kernel_normalization(2.0, 0.7) - 1.0) < 1e-8


def test_kernel_rejects_negative_y():
    with pytest.raises(DomainError):
        folded_kernel_density(-0.1, 1.0, 0.5)


def test_mixture_examples():
    comps = folded_kernel_mixture_form(0.0, 0.0)
    assert [w for w, _ in comps] == [0.5] * 4
    ys = np.arange(0.01, 6.0001, 0.01)
    assert np.max(np.abs(folded_kernel_density(ys, 1.0, 0.5) - mixture_density(ys, 1.0, 0.5))) < 1e-12
    assert 0 < mixture_weight(0.3, 0.2) < 1
    assert mixture_weight(10.0, 10.0) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 4), st.floats(-3, 3))
def test_normalization_property(x, mu):
    assert abs(kernel_normalization(x, mu) - 1.0) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 4), st.floats(-3, 3), st.floats(0, 8))
def test_kernel_even_in_mu(x, mu, y):
    assert folded_kernel_density(y, x, mu) == pytest.approx(folded_kernel_density(y, x, -mu), rel=1e-12, abs=1e-300)


def test_cdf_matches_quadrature_and_sampler():
    from scipy import integrate
    val, _ = integrate.quad(folded_kernel_density, 0, 1.7, args=(1.2, 0.8))
    assert folded_kernel_cdf(1.7, 1.2, 0.8) == pytest.approx(val, abs=1e-10)
    rng = np.random.default_rng(5)
    draws = sample_folded_step(1.2, 0.8, 20_000, rng)
    result = stats.kstest(draws, lambda y: folded_kernel_cdf(y, 1.2, 0.8))
    assert result.pvalue > 1e-3


def test_factorization_examples():
    assert joint_density_factorization_check([1.0], 0.3) < 1e-14
    assert joint_density_factorization_check([0.5, 1.5], 0.0) < 1e-13
    rng = np.random.default_rng(9)
    assert joint_density_factorization_check(rng.uniform(0.01, 3.0, 8), 1.2) < 1e-11
    assert joint_density_brute_force([1.0], 0.0) == pytest.approx(2 * phi(1.0))
    with pytest.raises(EnumerationTooLargeError):
        joint_density_factorization_check([1.0] * 11, 0.0)
    with pytest.raises(DomainError):
        joint_density_factorization_check([1.0, -0.5], 0.0)


def test_lr_ratio_examples():
    grid = np.arange(0.01, 8.0001, 0.01)
    assert lr_ratio_monotone_check(1.0, 1.0, 0.0, 1.0, grid).holds
    same = lr_ratio_monotone_check(1.0, 1.0, 0.7, 0.7, grid)
    assert same.holds and same.detail["min_step"] == 0.0
    assert lr_ratio_monotone_check(0.5, 2.0, 0.2, 1.5, grid).holds
    with pytest.raises(DomainError):
        lr_ratio_monotone_check(2.0, 0.5, 0.0, 1.0, grid)


def test_lr_ratio_detects_decrease():
    # ratio of rho(.; x=0, mu=0) to rho(.; x=2, mu=0) decreases in y
    report = lr_ratio_monotone_check(0.0, 0.0, 0.0, 0.0, [0.5, 1.0])
    assert report.holds
    from reflectwalk import gaussian
    grid = np.linspace(0.1, 5, 50)
    log_ratio = gaussian.log_folded_kernel_density(grid, 0.0, 0.0) - gaussian.log_folded_kernel_density(grid, 2.0, 0.0)
    assert np.all(np.diff(log_ratio) < 0)


def test_sample_abs_walk():
    path = sample_abs_walk(0.5, 0, seed=1)
    assert list(path.values) == [0.0]
    path = sample_abs_walk(2.0, 100, seed=2)
    assert len(path.values) == 101 and np.all(path.values >= 0)
    assert abs(path.values[100] / 100 - 2.0) < 3 / math.sqrt(100)
    squares = [sample_abs_walk(0.0, 10_000, seed=s).values[-1] ** 2 / 10_000 for s in range(200)]
    se = np.std(squares, ddof=1) / math.sqrt(len(squares))
    assert abs(np.mean(squares) - 1.0) < 3 * se
    assert np.array_equal(sample_abs_walk(1.0, 50, 7).values, sample_abs_walk(1.0, 50, 7).values)


def test_embedding():
    zero = piecewise_linear_embed([0.0, 0.0, 0.0])
    assert np.all(zero.grid(11)[1] == 0)
    single = piecewise_linear_embed([1.0], 1)
    assert single(0.3) == pytest.approx(0.3)
    vals = np.array([1.0, 3.0, 2.0, 5.0])
    emb = piecewise_linear_embed(vals)
    knots = np.concatenate(([0.0], vals))
    for i in range(1, 5):
        assert emb(0.5 * (i - 1) / 4 + 0.5 * i / 4) == pytest.approx(0.5 * (knots[i - 1] + knots[i]))
    assert emb.sup_abs() == 5.0
    assert emb.to_csv().splitlines()[0] == "t,x"
    with pytest.raises(DomainError):
        emb(1.5)
    with pytest.raises(DomainError):
        piecewise_linear_embed([1.0, 2.0], 3)


def test_mc_equal_drifts_identical():
    rep = brownian_order_mc(0.0, 0.0, n_steps=100, n_paths=2000, seed=3)
    assert rep.estimates[0] == rep.estimates[1]


def test_mc_order_and_functionals():
    rep = brownian_order_mc(0.0, 1.0, n_steps=200, n_paths=20_000, seed=4)
    assert rep.estimates[1] > rep.estimates[0] + 10 * rep.diff_stderr[0]
    assert order_consistent(rep)
    term = brownian_functional_mc([0.0, 1.0], Functional.TERMINAL_ABS, n_steps=50, n_paths=20_000, seed=4)
    assert term.estimates[0] == pytest.approx(math.sqrt(2 / math.pi), abs=4 * term.stderr[0])
    far = brownian_functional_mc([0.0, 0.2], "threshold_exceedance", n_steps=100, n_paths=5000, seed=1, threshold=10.0)
    assert far.estimates == (0.0, 0.0)


def test_mc_batching_is_deterministic():
    a = brownian_functional_mc([0.0, 0.5], n_steps=50, n_paths=3000, seed=8, batch_size=1000)
    b = brownian_functional_mc([0.0, 0.5], n_steps=50, n_paths=3000, seed=8, batch_size=1000)
    assert a.estimates == b.estimates
    assert a.to_json()["mu_pairs"] == [[0.0, 0.5]]


def test_mc_errors():
    with pytest.raises(DomainError):
        brownian_functional_mc([0.0], "threshold_exceedance", n_steps=10, n_paths=10)
    with pytest.raises(DomainError):
        brownian_order_mc(1.0, 0.5, n_steps=10, n_paths=10)
