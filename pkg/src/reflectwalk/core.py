"""Shared types: exact probabilities, walk parameters, laws and their serialization.

All Bernoulli-side quantities are :class:`fractions.Fraction` values. Gaussian
quantities are plain floats.
"""
from __future__ import annotations

import csv
import enum
import io
import json
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

ExactProb = Fraction
Number = Union[int, Fraction, str]

HALF = Fraction(1, 2)


class ReflectWalkError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ReflectWalkError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidStateError(DomainError):
    """A walk state that no history can produce."""


class UnsupportedKindError(DomainError):
    """The walk kind is not handled by the requested operation."""


class EnumerationTooLargeError(DomainError):
    """Brute-force enumeration was asked for more paths than it will visit."""


def exact_prob(value: Number) -> Fraction:
    """Convert ``value`` to an exact probability in [0, 1].

    Accepts ints, Fractions and strings of the form ``"num/den"`` or a
    terminating decimal. Floats are refused: they are rarely the number the
    caller meant.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise DomainError(f"probability must be exact, got {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch.isalpha() and ch not in "eE" for ch in text):
            raise DomainError(f"cannot parse probability {value!r}")
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse probability {value!r}") from exc
    else:
        frac = Fraction(value)
    if not 0 <= frac <= 1:
        raise DomainError(f"probability {frac} outside [0, 1]")
    return frac


def complement(p: Fraction) -> Fraction:
    return 1 - p


class WalkKind(str, enum.Enum):
    """Which reflected walk: |S| from 0, |U| and |V| from a random +-1 start, or Gaussian |W|."""

    S = "S"
    U = "U"
    V = "V"
    W = "W"

    @property
    def is_bernoulli(self) -> bool:
        return self is not WalkKind.W


@dataclass(frozen=True)
class WalkParams:
    kind: WalkKind
    p: Fraction | None = None
    mu: float | None = None

    def __post_init__(self):
        kind = WalkKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind.is_bernoulli:
            if self.p is None or self.mu is not None:
                raise DomainError(f"kind {kind.value} takes p and no mu")
            object.__setattr__(self, "p", exact_prob(self.p))
        else:
            if self.mu is None or self.p is not None:
                raise DomainError("Gaussian kind takes mu and no p")
            object.__setattr__(self, "mu", float(self.mu))

    @classmethod
    def bernoulli(cls, kind, p) -> "WalkParams":
        return cls(WalkKind(kind), p=exact_prob(p))

    @classmethod
    def gaussian(cls, mu: float) -> "WalkParams":
        return cls(WalkKind.W, mu=float(mu))

    def mirrored(self) -> "WalkParams":
        """Parameters with p replaced by 1 - p (or mu by -mu)."""
        if self.kind.is_bernoulli:
            return WalkParams(self.kind, p=1 - self.p)
        return WalkParams(self.kind, mu=-self.mu)


@dataclass(frozen=True)
class WalkState:
    """A reflected-walk state, validated against what some history can reach."""

    kind: WalkKind
    value: int
    time: int
    zero_visited: bool = False

    def __post_init__(self):
        kind = WalkKind(self.kind)
        object.__setattr__(self, "kind", kind)
        v, t = self.value, self.time
        if t < 0 or v < 0:
            raise InvalidStateError(f"negative value or time in {self}")
        if kind is WalkKind.S:
            if v > t or (v - t) % 2:
                raise InvalidStateError(f"|S| cannot be {v} at time {t}")
        elif kind is WalkKind.U:
            if v > t + 1 or (v - t) % 2 == 0:
                raise InvalidStateError(f"|U| cannot be {v} at time {t}")
            if v == 0 and not self.zero_visited:
                raise InvalidStateError("|U| = 0 implies zero_visited")
            if self.zero_visited and v > t - 1:
                raise InvalidStateError(f"|U| = {v} at time {t} cannot follow a zero visit")
        elif kind is WalkKind.V:
            if v % 2 == 0 or v > 2 * t + 1:
                raise InvalidStateError(f"|V| cannot be {v} at time {t}")
        else:
            raise UnsupportedKindError("WalkState is lattice-only")

    @property
    def phase_matches_time(self) -> bool:
        """For V: whether (value - 1)/2 has the parity of the time."""
        return ((self.value - 1) // 2) % 2 == self.time % 2


class Pmf(Mapping):
    """Finitely supported law on the integers with exact, strictly positive masses."""

    __slots__ = ("_items",)

    def __init__(self, masses: Mapping[int, Number] | Iterable[tuple[int, Number]]):
        items = masses.items() if isinstance(masses, Mapping) else masses
        cleaned: dict[int, Fraction] = {}
        for state, mass in items:
            frac = exact_prob(mass)
            if frac == 0:
                raise DomainError(f"zero mass at state {state}; use Pmf.from_weights")
            if int(state) in cleaned:
                raise DomainError(f"duplicate state {state}")
            cleaned[int(state)] = frac
        total = sum(cleaned.values(), Fraction(0))
        if total != 1:
            raise DomainError(f"masses sum to {total}, not 1")
        self._items = dict(sorted(cleaned.items()))

    @classmethod
    def from_weights(cls, weights: Mapping[int, Fraction]) -> "Pmf":
        """Build from a mapping that may contain zero entries."""
        return cls({k: v for k, v in weights.items() if v != 0})

    def __getitem__(self, state: int) -> Fraction:
        return self._items[state]

    def __iter__(self) -> Iterator[int]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self):
        return hash(tuple(self._items.items()))

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self._items.items())
        return f"Pmf({{{body}}})"

    def get(self, state, default=Fraction(0)):
        return self._items.get(state, default)

    def tail(self, threshold: int) -> Fraction:
        """P(X >= threshold)."""
        return sum((v for k, v in self._items.items() if k >= threshold), Fraction(0))

    def mean(self) -> Fraction:
        return sum((k * v for k, v in self._items.items()), Fraction(0))


@dataclass(frozen=True)
class Boundary:
    """Thresholds b_1..b_N; ``at(n)`` is 1-based."""

    thresholds: tuple

    def __post_init__(self):
        values = tuple(self.thresholds)
        if not values:
            raise DomainError("a boundary needs at least one threshold")
        if any(b < 0 for b in values):
            raise DomainError("thresholds must be nonnegative")
        object.__setattr__(self, "thresholds", values)

    @classmethod
    def constant(cls, value, length: int) -> "Boundary":
        return cls((value,) * length)

    def __len__(self) -> int:
        return len(self.thresholds)

    def at(self, n: int):
        return self.thresholds[n - 1]

    @property
    def is_integer(self) -> bool:
        return all(isinstance(b, int) for b in self.thresholds)

    @property
    def is_nonincreasing(self) -> bool:
        t = self.thresholds
        return all(t[i + 1] <= t[i] for i in range(len(t) - 1))

    def shifted(self, offset: int) -> tuple:
        """Thresholds minus ``offset``; b - 1 gives the survival caps c_n."""
        return tuple(b - offset for b in self.thresholds)


def as_boundary(boundary) -> Boundary:
    return boundary if isinstance(boundary, Boundary) else Boundary(tuple(boundary))


@dataclass(frozen=True)
class StoppingTimeDist:
    """Law of a first-passage time truncated at ``horizon``.

    ``pmf`` holds P(T = n) for the n <= horizon where it is nonzero and
    ``survival_at_horizon`` is P(T > horizon).
    """

    pmf: dict
    survival_at_horizon: Fraction
    horizon: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pmf = {int(n): Fraction(v) for n, v in sorted(self.pmf.items()) if v != 0}
        if any(n < 1 or n > self.horizon for n in pmf):
            raise DomainError("stopping-time support must lie in 1..horizon")
        if any(v < 0 for v in pmf.values()) or self.survival_at_horizon < 0:
            raise DomainError("negative mass in stopping-time law")
        total = sum(pmf.values(), Fraction(0)) + self.survival_at_horizon
        if total != 1:
            raise DomainError(f"stopping-time masses sum to {total}")
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "survival_at_horizon", Fraction(self.survival_at_horizon))

    def prob(self, n: int) -> Fraction:
        return self.pmf.get(n, Fraction(0))

    def survival(self, n: int) -> Fraction:
        """P(T > n) for 0 <= n <= horizon."""
        if not 0 <= n <= self.horizon:
            raise DomainError(f"survival only known for 0..{self.horizon}")
        return 1 - sum((v for k, v in self.pmf.items() if k <= n), Fraction(0))

    def survival_curve(self) -> list[Fraction]:
        """[P(T > 0), P(T > 1), ..., P(T > horizon)]."""
        out = [Fraction(1)]
        for n in range(1, self.horizon + 1):
            out.append(out[-1] - self.prob(n))
        return out

    def truncated_mean(self) -> Fraction:
        """E[min(T, horizon)]."""
        return sum((n * v for n, v in self.pmf.items()), Fraction(0)) + (
            self.horizon * self.survival_at_horizon
        )

    @property
    def support(self) -> list[int]:
        return list(self.pmf)


# ---------------------------------------------------------------- serialization


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _approx(x: Fraction) -> float:
    return float(x)


def serialize_pmf(pmf: Pmf, format: str = "json") -> bytes:
    """Encode a Pmf as JSON or CSV bytes; fractions are kept as "num/den"."""
    fmt = format.lower()
    if fmt == "json":
        doc = {
            "support": [
                {"state": k, "p": _frac_str(v), "approx": _approx(v)} for k, v in pmf.items()
            ]
        }
        return json.dumps(doc).encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["state", "p_num", "p_den", "p_approx"])
        for k, v in pmf.items():
            writer.writerow([k, v.numerator, v.denominator, f"{float(v):.17g}"])
        return buf.getvalue().encode()
    raise DomainError(f"unknown format {format!r}")


def parse_pmf(data: bytes | str, format: str = "json") -> Pmf:
    text = data.decode() if isinstance(data, bytes) else data
    fmt = format.lower()
    if fmt == "json":
        doc = json.loads(text)
        return Pmf({int(row["state"]): Fraction(row["p"]) for row in doc["support"]})
    if fmt == "csv":
        rows = csv.DictReader(io.StringIO(text))
        return Pmf({int(r["state"]): Fraction(int(r["p_num"]), int(r["p_den"])) for r in rows})
    raise DomainError(f"unknown format {format!r}")


def serialize_stopping_time(dist: StoppingTimeDist, format: str = "json") -> bytes:
    """Encode a StoppingTimeDist.

    The CSV form uses the same columns as a Pmf with the survival mass on a
    final row whose ``state`` is ``>N`` for horizon N.
    """
    fmt = format.lower()
    if fmt == "json":
        doc = {
            "horizon": dist.horizon,
            "support": [
                {"state": n, "p": _frac_str(v), "approx": _approx(v)} for n, v in dist.pmf.items()
            ],
            "survival_at_horizon": {
                "p": _frac_str(dist.survival_at_horizon),
                "approx": _approx(dist.survival_at_horizon),
            },
        }
        return json.dumps(doc).encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["state", "p_num", "p_den", "p_approx"])
        for n, v in dist.pmf.items():
            writer.writerow([n, v.numerator, v.denominator, f"{float(v):.17g}"])
        s = dist.survival_at_horizon
        writer.writerow([f">{dist.horizon}", s.numerator, s.denominator, f"{float(s):.17g}"])
        return buf.getvalue().encode()
    raise DomainError(f"unknown format {format!r}")


def parse_stopping_time(data: bytes | str, format: str = "json") -> StoppingTimeDist:
    text = data.decode() if isinstance(data, bytes) else data
    fmt = format.lower()
    if fmt == "json":
        doc = json.loads(text)
        pmf = {int(r["state"]): Fraction(r["p"]) for r in doc["support"]}
        return StoppingTimeDist(pmf, Fraction(doc["survival_at_horizon"]["p"]), int(doc["horizon"]))
    if fmt == "csv":
        pmf, surv, horizon = {}, None, None
        for r in csv.DictReader(io.StringIO(text)):
            val = Fraction(int(r["p_num"]), int(r["p_den"]))
            if r["state"].startswith(">"):
                surv, horizon = val, int(r["state"][1:])
            else:
                pmf[int(r["state"])] = val
        if surv is None:
            raise DomainError("CSV stopping-time law lacks a survival row")
        return StoppingTimeDist(pmf, surv, horizon)
    raise DomainError(f"unknown format {format!r}")


def load_boundary(path) -> Boundary:
    """Read a boundary file of the form {"thresholds": [...]}."""
    with open(path) as fh:
        doc = json.load(fh)
    return Boundary(tuple(doc["thresholds"]))


def jsonable(obj):
    """Recursively turn Fractions and tuples into JSON-friendly values."""
    if isinstance(obj, Fraction):
        return _frac_str(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Mapping):
        return {str(k) if not isinstance(k, (str, int)) else k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj
