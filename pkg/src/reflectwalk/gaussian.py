"""Reflected Gaussian walk |W^mu|: its folded-normal transition kernel,
samplers, the piecewise-linear path embedding, and Monte Carlo ordering
experiments with common random numbers.

Everything here is floating point.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from . import _kernels
from .core import DomainError, EnumerationTooLargeError
from .order import OrderReport

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)
FACTORIZATION_MAX_N = 10


def _log_2cosh(t):
    """log(e^t + e^-t) without overflow."""
    a = np.abs(t)
    return a + np.log1p(np.exp(-2.0 * a))


def log_folded_kernel_density(y, x, mu):
    """Log of the transition density of |W_{n+1}| at y given |W_n| = x.

    rho(y; x, mu) = (2 pi)^(-1/2) exp(-(mu^2 + x^2 + y^2)/2)
                    (e^{xy} + e^{-xy}) (e^{mu y} + e^{-mu y}) / (e^{mu x} + e^{-mu x})
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("density is defined for y >= 0")
    return (
        -LOG_SQRT_2PI
        - 0.5 * (mu * mu + x * x + y * y)
        + _log_2cosh(x * y)
        + _log_2cosh(mu * y)
        - _log_2cosh(mu * x)
    )


def folded_kernel_density(y, x, mu):
    """rho(y; x, mu); underflows to 0.0 far in the tails. Scalar or array ``y``."""
    out = np.exp(log_folded_kernel_density(y, x, mu))
    return float(out) if out.ndim == 0 else out


def mixture_weight(x: float, mu: float) -> float:
    """e^{mu x} / (e^{mu x} + e^{-mu x})."""
    return float(special.expit(2.0 * mu * x))


def folded_kernel_mixture_form(x: float, mu: float) -> list[tuple[float, float]]:
    """The kernel as sum(weight * phi(y - location)) over four normal components.

    Completing the square in each of the four sign terms gives
    w [phi(y - (x+mu)) + phi(y + (x+mu))] + (1-w) [phi(y - (x-mu)) + phi(y + (x-mu))].
    """
    w = mixture_weight(x, mu)
    return [(w, x + mu), (w, -(x + mu)), (1 - w, x - mu), (1 - w, -(x - mu))]


def mixture_density(y, x: float, mu: float):
    y = np.asarray(y, dtype=float)
    total = sum(w * stats.norm.pdf(y - loc) for w, loc in folded_kernel_mixture_form(x, mu))
    return float(total) if np.ndim(total) == 0 else total


def folded_kernel_cdf(y, x: float, mu: float):
    """P(|W_{n+1}| <= y | |W_n| = x) via the standard normal CDF."""
    y = np.asarray(y, dtype=float)
    w = mixture_weight(x, mu)

    def folded(a):
        return special.ndtr(y - a) - special.ndtr(-y - a)

    out = w * folded(x + mu) + (1 - w) * folded(x - mu)
    return float(out) if out.ndim == 0 else out


def sample_folded_step(x: float, mu: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw |W_{n+1}| given |W_n| = x: pick centre x + mu w.p. w, else x - mu,
    then reflect a unit normal about 0."""
    w = mixture_weight(x, mu)
    centre = np.where(rng.random(size) < w, x + mu, x - mu)
    return np.abs(centre + rng.standard_normal(size))


def kernel_normalization(x: float, mu: float, epsabs: float = 1e-10) -> float:
    """Integral of the kernel over (0, inf) by adaptive quadrature."""
    reach = abs(x) + abs(mu)
    upper = reach + 40.0
    peaks = sorted({abs(x + mu), abs(x - mu)})
    value, _ = integrate.quad(
        folded_kernel_density, 0.0, upper, args=(x, mu), points=peaks,
        epsabs=epsabs, epsrel=1e-12, limit=200,
    )
    return value


def _signed_joint_density(values: np.ndarray, mu: float) -> float:
    incs = np.diff(np.concatenate(([0.0], values))) - mu
    return float(np.exp(-0.5 * np.dot(incs, incs) - len(values) * LOG_SQRT_2PI))


def joint_density_brute_force(xs, mu: float) -> float:
    """Density of (|W_1|, ..., |W_n|) as the sum of 2^n signed Gaussian densities."""
    xs = np.asarray(xs, dtype=float)
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=len(xs)):
        total += _signed_joint_density(np.asarray(signs) * xs, mu)
    return total


def joint_density_kernel_chain(xs, mu: float) -> float:
    dens = folded_kernel_density(xs[0], 0.0, mu)
    for a, b in zip(xs, xs[1:]):
        dens *= folded_kernel_density(b, a, mu)
    return dens


def joint_density_factorization_check(xs, mu: float) -> float:
    """Largest |brute force - kernel chain| over all prefixes of ``xs``."""
    xs = [float(v) for v in xs]
    if not xs or len(xs) > FACTORIZATION_MAX_N:
        raise EnumerationTooLargeError(f"need 1 <= n <= {FACTORIZATION_MAX_N}")
    if any(v <= 0 for v in xs):
        raise DomainError("points must be positive")
    worst = 0.0
    for k in range(1, len(xs) + 1):
        worst = max(worst, abs(joint_density_brute_force(xs[:k], mu) - joint_density_kernel_chain(xs[:k], mu)))
    return worst


def lr_ratio_monotone_check(x_lo, x_hi, mu_lo, mu_hi, y_grid, slack: float = 1e-12) -> OrderReport:
    """Check that rho(y; x_hi, mu_hi) / rho(y; x_lo, mu_lo) is nondecreasing in y.

    Works on log ratios; consecutive differences must be >= -slack.
    """
    if not (0 <= mu_lo <= mu_hi) or not (0 <= x_lo <= x_hi):
        raise DomainError("need 0 <= mu' <= mu'' and 0 <= x' <= x''")
    y = np.asarray(y_grid, dtype=float)
    if np.any(np.diff(y) <= 0) or np.any(y <= 0):
        raise DomainError("y grid must be positive and increasing")
    log_ratio = log_folded_kernel_density(y, x_hi, mu_hi) - log_folded_kernel_density(y, x_lo, mu_lo)
    steps = np.diff(log_ratio)
    bad = np.flatnonzero(steps < -slack)
    if bad.size:
        i = int(bad[0])
        witness = {"y": float(y[i]), "y_next": float(y[i + 1]), "log_ratio_drop": float(-steps[i])}
        return OrderReport(False, witness, len(steps))
    return OrderReport(True, None, len(steps), detail={"min_step": float(steps.min()) if steps.size else 0.0})


# ---------------------------------------------------------------- sampling


@dataclass(frozen=True)
class SampledPath:
    values: np.ndarray
    seed: int
    mu: float


def sample_abs_walk(mu: float, n: int, seed: int) -> SampledPath:
    """|W_0|, ..., |W_n| for unit-variance normal increments with mean mu."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    steps = rng.standard_normal(n) + mu
    values = np.abs(np.concatenate(([0.0], np.cumsum(steps))))
    return SampledPath(values, seed, float(mu))


@dataclass(frozen=True)
class EmbeddedPath:
    """Piecewise-linear function on [0, 1] through (i/n, x_i) with x(0) = 0."""

    knots_t: np.ndarray
    knots_x: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < 0) | (t > 1)):
            raise DomainError("embedded paths live on [0, 1]")
        out = np.interp(t, self.knots_t, self.knots_x)
        return float(out) if out.ndim == 0 else out

    def grid(self, points: int = 1001) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(0.0, 1.0, points)
        return t, self(t)

    def sup_abs(self) -> float:
        return float(np.max(np.abs(self.knots_x)))

    def to_csv(self, points: int | None = None) -> str:
        t, x = (self.knots_t, self.knots_x) if points is None else self.grid(points)
        rows = ["t,x"] + [f"{a:.17g},{b:.17g}" for a, b in zip(t, x)]
        return "\n".join(rows) + "\n"


def piecewise_linear_embed(walk_values, n: int | None = None) -> EmbeddedPath:
    """Embed x_1..x_n as the polygon through (i/n, x_i), starting from (0, 0)."""
    vals = np.asarray(walk_values, dtype=float)
    n = len(vals) if n is None else n
    if n < 1 or len(vals) != n:
        raise DomainError("need n >= 1 values")
    t = np.arange(n + 1) / n
    return EmbeddedPath(t, np.concatenate(([0.0], vals)))


# -------------------------------------------------------- Monte Carlo order


class Functional(str, enum.Enum):
    SUP_ABS = "sup_abs_on_01"
    TERMINAL_ABS = "terminal_abs"
    THRESHOLD = "threshold_exceedance"


@dataclass(frozen=True)
class MCReport:
    functional: str
    mus: tuple
    estimates: tuple
    stderr: tuple
    diff_stderr: tuple
    n_paths: int
    n_steps: int
    seed: int
    threshold: float | None = None
    backend: str = field(default="", compare=False)

    def to_json(self) -> dict:
        return {
            "functional": self.functional,
            "mu_pairs": [[a, b] for a, b in zip(self.mus, self.mus[1:])],
            "mus": list(self.mus),
            "estimates": list(self.estimates),
            "stderr": list(self.stderr),
            "diff_stderr": list(self.diff_stderr),
            "n_paths": self.n_paths,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "threshold": self.threshold,
        }

    def ordered(self, k: float = 2.0) -> bool:
        """Consecutive estimates increase by more than k combined standard errors."""
        for i in range(len(self.mus) - 1):
            gap = self.estimates[i + 1] - self.estimates[i]
            combined = math.hypot(self.stderr[i], self.stderr[i + 1])
            if gap <= k * combined:
                return False
        return True


def brownian_functional_mc(mus, functional="sup_abs_on_01", n_steps: int = 1000,
                           n_paths: int = 100_000, seed: int = 0, threshold: float | None = None,
                           batch_size: int = 5000, backend: str | None = None) -> MCReport:
    """Estimate E[functional(|B^mu|) on [0,1]] for each drift with common random numbers.

    Each path uses one array of standard normal innovations shared by every
    drift; the scaled walk is n^{-1/2} * cumsum(z + mu / sqrt(n)). Batches
    draw from child seeds of ``seed`` and are concatenated in order, so the
    result does not depend on batch scheduling.
    """
    functional = Functional(functional)
    if functional is Functional.THRESHOLD and threshold is None:
        raise DomainError("threshold_exceedance needs a threshold")
    mus = tuple(float(m) for m in mus)
    scale = 1.0 / math.sqrt(n_steps)
    drifts = np.array(mus) * scale
    n_batches = -(-n_paths // batch_size)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    chunks = []
    for b, child in enumerate(children):
        size = min(batch_size, n_paths - b * batch_size)
        z = np.random.default_rng(child).standard_normal((size, n_steps))
        sup, term = _kernels.walk_functionals(z, drifts, scale, backend=backend)
        if functional is Functional.SUP_ABS:
            chunks.append(sup)
        elif functional is Functional.TERMINAL_ABS:
            chunks.append(term)
        else:
            chunks.append((sup >= threshold).astype(float))
    values = np.concatenate(chunks)
    est = values.mean(axis=0)
    se = values.std(axis=0, ddof=1) / math.sqrt(n_paths)
    diffs = np.diff(values, axis=1)
    diff_se = diffs.std(axis=0, ddof=1) / math.sqrt(n_paths) if diffs.size else np.array([])
    return MCReport(
        functional.value, mus, tuple(float(v) for v in est), tuple(float(v) for v in se),
        tuple(float(v) for v in diff_se), n_paths, n_steps, seed, threshold,
        backend or _kernels.BACKEND,
    )


def brownian_order_mc(mu_lo: float, mu_hi: float, functional="sup_abs_on_01", n_steps: int = 1000,
                      n_paths: int = 100_000, seed: int = 0, threshold: float | None = None,
                      backend: str | None = None) -> MCReport:
    if mu_lo < 0 or mu_hi < mu_lo:
        raise DomainError("need 0 <= mu' <= mu''")
    return brownian_functional_mc((mu_lo, mu_hi), functional, n_steps, n_paths, seed, threshold,
                                  backend=backend)


def order_consistent(report: MCReport, k: float = 2.0) -> bool:
    """estimate(mu'') >= estimate(mu') - k * combined stderr for each consecutive pair."""
    for i in range(len(report.mus) - 1):
        combined = math.hypot(report.stderr[i], report.stderr[i + 1])
        if report.estimates[i + 1] < report.estimates[i] - k * combined:
            return False
    return True
