"""Observables as expression trees, their sampled fields, and explicit constructions.

An :class:`Observable` is a finite tree over the coordinates ``x`` and ``y``
closed under arithmetic, lattice operations and composition with
piecewise-linear functions.  Evaluating it on a :class:`GridDomain` samples it
at every cell center and yields an immutable :class:`ScalarField`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import CommonZero, ExpressionError, NotDominated, SpacingTooCoarse
from .grid import GridDomain, RegionMask


class PiecewiseLinear:
    """Continuous piecewise-linear function on the real line.

    Linear between breakpoints, constant beyond the first and last one.
    """

    def __init__(self, ts: Sequence[float], vs: Sequence[float]):
        ts = np.asarray(ts, dtype=float)
        vs = np.asarray(vs, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape:
            raise ExpressionError("breakpoint abscissae and values must be 1-d and equally long")
        if len(ts) < 2:
            raise ExpressionError("a piecewise-linear function needs at least 2 breakpoints")
        if not np.all(np.diff(ts) > 0):
            raise ExpressionError("breakpoint abscissae must be strictly increasing")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(vs))):
            raise ExpressionError("breakpoints must be finite")
        ts.flags.writeable = False
        vs.flags.writeable = False
        self.ts = ts
        self.vs = vs

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "PiecewiseLinear":
        if not pairs:
            raise ExpressionError("empty breakpoint list")
        ts, vs = zip(*pairs)
        return cls(ts, vs)

    @classmethod
    def identity(cls, lo: float = -1e6, hi: float = 1e6) -> "PiecewiseLinear":
        return cls([lo, hi], [lo, hi])

    @classmethod
    def constant(cls, c: float) -> "PiecewiseLinear":
        return cls([0.0, 1.0], [c, c])

    def __call__(self, t):
        return np.interp(t, self.ts, self.vs)

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.ts.tolist(), self.vs.tolist()))

    def lipschitz(self) -> float:
        return float(np.max(np.abs(np.diff(self.vs) / np.diff(self.ts))))

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return np.array_equal(self.ts, other.ts) and np.array_equal(self.vs, other.vs)

    def __hash__(self):
        return hash((self.ts.tobytes(), self.vs.tobytes()))

    def __repr__(self):
        return f"PiecewiseLinear({self.pairs})"

    def to_expr(self) -> str:
        return "; ".join(f"{t!r},{v!r}" for t, v in self.pairs)


class Observable:
    """Base class of expression-tree nodes."""

    def evaluate_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, domain: GridDomain) -> "ScalarField":
        return evaluate(self, domain)

    def __add__(self, other):
        return Add(self, as_observable(other))

    def __radd__(self, other):
        return Add(as_observable(other), self)

    def __sub__(self, other):
        return Sub(self, as_observable(other))

    def __rsub__(self, other):
        return Sub(as_observable(other), self)

    def __mul__(self, other):
        return Mul(self, as_observable(other))

    def __rmul__(self, other):
        return Mul(as_observable(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k):
        return Power(self, k)

    def __abs__(self):
        return Abs(self)


def as_observable(value) -> Observable:
    if isinstance(value, Observable):
        return value
    if isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool):
        return Const(float(value))
    raise ExpressionError(f"cannot turn {value!r} into an observable")


@dataclass(frozen=True, eq=True)
class CoordX1(Observable):
    def evaluate_array(self, x, y):
        return np.array(x, dtype=float, copy=True)

    def __str__(self):
        return "x"


@dataclass(frozen=True, eq=True)
class CoordX2(Observable):
    def evaluate_array(self, x, y):
        return np.array(y, dtype=float, copy=True)

    def __str__(self):
        return "y"


@dataclass(frozen=True, eq=True)
class Const(Observable):
    c: float

    def __post_init__(self):
        if not np.isfinite(self.c):
            raise ExpressionError(f"constant must be finite, got {self.c}")

    def evaluate_array(self, x, y):
        return np.full(np.shape(x), float(self.c))

    def __str__(self):
        return repr(float(self.c))


@dataclass(frozen=True, eq=True)
class Add(Observable):
    a: Observable
    b: Observable

    def evaluate_array(self, x, y):
        return self.a.evaluate_array(x, y) + self.b.evaluate_array(x, y)

    def __str__(self):
        return f"({self.a} + {self.b})"


@dataclass(frozen=True, eq=True)
class Sub(Observable):
    a: Observable
    b: Observable

    def evaluate_array(self, x, y):
        return self.a.evaluate_array(x, y) - self.b.evaluate_array(x, y)

    def __str__(self):
        return f"({self.a} - {self.b})"


@dataclass(frozen=True, eq=True)
class Mul(Observable):
    a: Observable
    b: Observable

    def evaluate_array(self, x, y):
        return self.a.evaluate_array(x, y) * self.b.evaluate_array(x, y)

    def __str__(self):
        return f"({self.a} * {self.b})"


@dataclass(frozen=True, eq=True)
class Neg(Observable):
    a: Observable

    def evaluate_array(self, x, y):
        return -self.a.evaluate_array(x, y)

    def __str__(self):
        return f"(-{self.a})"


@dataclass(frozen=True, eq=True)
class Min(Observable):
    a: Observable
    b: Observable

    def evaluate_array(self, x, y):
        return np.minimum(self.a.evaluate_array(x, y), self.b.evaluate_array(x, y))

    def __str__(self):
        return f"min({self.a}, {self.b})"


@dataclass(frozen=True, eq=True)
class Max(Observable):
    a: Observable
    b: Observable

    def evaluate_array(self, x, y):
        return np.maximum(self.a.evaluate_array(x, y), self.b.evaluate_array(x, y))

    def __str__(self):
        return f"max({self.a}, {self.b})"


@dataclass(frozen=True, eq=True)
class Abs(Observable):
    a: Observable

    def evaluate_array(self, x, y):
        return np.abs(self.a.evaluate_array(x, y))

    def __str__(self):
        return f"abs({self.a})"


@dataclass(frozen=True, eq=True)
class Clamp(Observable):
    a: Observable
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ExpressionError(f"clamp bounds out of order: {self.lo} > {self.hi}")

    def evaluate_array(self, x, y):
        return np.clip(self.a.evaluate_array(x, y), self.lo, self.hi)

    def __str__(self):
        return f"clamp({self.a}, {self.lo!r}, {self.hi!r})"


@dataclass(frozen=True, eq=True)
class Power(Observable):
    a: Observable
    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ExpressionError(f"exponent must be a positive integer, got {self.k!r}")

    def evaluate_array(self, x, y):
        return self.a.evaluate_array(x, y) ** int(self.k)

    def __str__(self):
        return f"({self.a})^{self.k}"


@dataclass(frozen=True, eq=True)
class Compose(Observable):
    """``phi(a)`` for a piecewise-linear ``phi``."""

    phi: PiecewiseLinear
    a: Observable

    def evaluate_array(self, x, y):
        return self.phi(self.a.evaluate_array(x, y))

    def __str__(self):
        return f"pwl({self.a}; {self.phi.to_expr()})"


@dataclass(frozen=True, eq=True)
class UrysohnRatio(Observable):
    """Guarded ``z / (y + z)``; the only place division enters a tree."""

    y_obs: Observable
    z_obs: Observable

    def evaluate_array(self, x, y):
        yv = self.y_obs.evaluate_array(x, y)
        zv = self.z_obs.evaluate_array(x, y)
        den = yv + zv
        if np.any(den <= 0) or np.any(yv < 0) or np.any(zv < 0):
            raise CommonZero("urysohn ratio evaluated where y + z <= 0 or an input is negative")
        return zv / den

    def __str__(self):
        return f"urysohn({self.y_obs}, {self.z_obs})"


X1 = CoordX1()
X2 = CoordX2()


def pwl(phi: PiecewiseLinear, obs: Observable) -> Observable:
    return Compose(phi, obs)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Samples of an observable at the cell centers of a domain."""

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.domain.shape:
            raise ValueError(f"field shape {values.shape} does not match domain {self.domain.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        if values.flags.writeable:
            values = values.copy()
            values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, domain: GridDomain, c: float) -> "ScalarField":
        return cls(domain, np.full(domain.shape, float(c)))

    @cached_property
    def min(self) -> float:
        return float(self.values.min())

    @cached_property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def norm(self) -> float:
        """Sup norm over the grid."""
        return float(np.max(np.abs(self.values)))

    @cached_property
    def levels(self) -> np.ndarray:
        """Sorted distinct values; the layer-cake integrand only changes at these."""
        lv = np.unique(self.values)
        lv.flags.writeable = False
        return lv

    def _mask(self, bits: np.ndarray) -> RegionMask:
        bits.flags.writeable = False  # fresh array, safe to adopt without a copy
        return RegionMask(self.domain, bits)

    def superlevel(self, t: float) -> RegionMask:
        return self._mask(self.values > t)

    def superlevel_closed(self, t: float) -> RegionMask:
        return self._mask(self.values >= t)

    def sublevel_closed(self, t: float) -> RegionMask:
        return self._mask(self.values <= t)

    def apply(self, phi) -> "ScalarField":
        return ScalarField(self.domain, phi(self.values))

    def _other(self, other) -> np.ndarray:
        if isinstance(other, ScalarField):
            if other.domain != self.domain:
                raise ValueError("fields live on different domains")
            return other.values
        return float(other)

    def __add__(self, other):
        return ScalarField(self.domain, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.domain, self.values - self._other(other))

    def __rsub__(self, other):
        return ScalarField(self.domain, self._other(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.domain, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.domain, -self.values)

    def __le__(self, other) -> bool:
        return bool(np.all(self.values <= self._other(other)))

    def __ge__(self, other) -> bool:
        return bool(np.all(self.values >= self._other(other)))

    def __repr__(self):
        return f"ScalarField(n={self.domain.n}, min={self.min:.6g}, max={self.max:.6g})"


def evaluate(obs: Observable, domain: GridDomain) -> ScalarField:
    x, y = domain.coords
    return ScalarField(domain, obs.evaluate_array(x, y))


def superlevel(field: ScalarField, t: float) -> RegionMask:
    """Open mask ``{field > t}``."""
    return field.superlevel(t)


def sublevel_closed(field: ScalarField, t: float) -> RegionMask:
    """Closed mask ``{field <= t}``, the complement of :func:`superlevel`."""
    return field.sublevel_closed(t)


def indicator(mask: RegionMask) -> ScalarField:
    return ScalarField(mask.domain, mask.bits.astype(float))


def urysohn(y_obs: Observable, z_obs: Observable, domain: GridDomain, separated: bool = False) -> Observable:
    """Observable equal to 1 exactly on ``{Y = 0}`` and 0 exactly on ``{Z = 0}``.

    ``Y`` and ``Z`` must be nonnegative without a common zero on ``domain``.
    The result is ``Z / (Y + Z)``.  With ``separated=True`` the construction is
    applied a second time against the zero set ``{ratio <= 1/2}``, so the
    returned observable also vanishes on a zero set that sits strictly inside
    ``{Z > 0}``.
    """
    yv = evaluate(y_obs, domain).values
    zv = evaluate(z_obs, domain).values
    if yv.min() < 0 or zv.min() < 0:
        raise CommonZero("urysohn inputs must be nonnegative on the grid")
    if (yv + zv).min() <= 0:
        raise CommonZero("urysohn inputs share a zero on the grid")
    ratio = UrysohnRatio(y_obs, z_obs)
    if not separated:
        return ratio
    return UrysohnRatio(y_obs, Max(Sub(ratio, Const(0.5)), Const(0.0)))


@dataclass(frozen=True)
class StaircaseDecomposition:
    parts_x: list[ScalarField]
    parts_y: list[ScalarField]
    n: int
    delta: float
    shift: float
    betas: np.ndarray

    def residuals(self, x: ScalarField, y: ScalarField) -> dict[str, float]:
        """Max violations of the decomposition identities; all should be ~0."""
        sx = sum(p.values for p in self.parts_x)
        sy = sum(p.values for p in self.parts_y)
        gap = max(float(np.max(px.values - py.values)) for px, py in zip(self.parts_x, self.parts_y))
        return {
            "sum_x": float(np.max(np.abs(sx - x.values))),
            "sum_y": float(np.max(np.abs(sy - y.values))),
            "domination": max(0.0, gap - self.delta / self.n),
        }


def _ramp(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return np.clip(values, lo, hi) - lo


def staircase(x: ScalarField, y: ScalarField, n: int, delta: float) -> StaircaseDecomposition:
    """Split ``X <= Y`` into ``n`` layers with ``X_i <= Y_i + delta/n``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if x.domain != y.domain:
        raise ValueError("fields live on different domains")
    if not x <= y:
        raise NotDominated("staircase needs X <= Y pointwise")
    shift = max(0.0, -x.min)
    xt = x.values + shift
    yt = y.values + shift + delta
    beta = float(np.max(np.abs(yt)))
    if not beta / n < delta:
        raise SpacingTooCoarse(f"threshold spacing {beta / n:.6g} is not below delta={delta}; raise n")
    betas = np.linspace(0.0, beta, n + 1)
    parts_x, parts_y = [], []
    for i in range(1, n + 1):
        lo, hi = betas[i - 1], betas[i]
        parts_x.append(ScalarField(x.domain, _ramp(xt, lo, hi) - shift / n))
        parts_y.append(ScalarField(y.domain, _ramp(yt, lo, hi) - (shift + delta) / n))
    return StaircaseDecomposition(parts_x, parts_y, n, float(delta), shift, betas)


def regularized_sequence(field: ScalarField, t: float, steps: int | None = None,
                         indices: Sequence[int] | None = None) -> list[RegionMask]:
    """Masks ``U_i = {max(field - t, 0) > 1/i}`` for ``i = 1..steps``.

    ``indices`` replaces ``1..steps`` by any increasing index sequence.
    """
    if indices is None:
        if steps is None or steps < 1:
            raise ValueError(f"steps must be positive, got {steps}")
        indices = range(1, steps + 1)
    indices = list(indices)
    if any(b <= a for a, b in zip(indices, indices[1:])) or (indices and indices[0] < 1):
        raise ValueError("indices must be positive and strictly increasing")
    g = np.maximum(field.values - t, 0.0)
    return [RegionMask(field.domain, g > 1.0 / i) for i in indices]
