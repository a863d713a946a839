"""Distribution functions and the layer-cake quasi-integral.

For a field ``X`` with range ``[a, b]`` the integral is

    a + int_a^b P(X > t) dt,

which only needs the measure of open superlevel masks.  On a grid the
integrand ``g(t) = P(X > t)`` is a step function that can only change at the
distinct sampled values of ``X``.  A {0,1}-valued measure makes ``g`` a single
downward step, so the integral equals the flip threshold and bisection over
the sorted distinct values finds it exactly.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotMonotone
from .grid import GridDomain
from .measures import QuasiMeasure
from .observables import Observable, PiecewiseLinear, ScalarField, evaluate
from .reports import CheckReport

MONOTONE_SLACK = 1e-12
DEFAULT_CDF_POINTS = 129
MIN_LEVEL = 4
MAX_DEPTH = 40


@dataclass(frozen=True)
class IntegralResult:
    value: float
    method: str
    evaluations: int
    tolerance: float
    requested_tol: float

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method, "evaluations": self.evaluations,
                "tolerance": self.tolerance, "requested_tol": self.requested_tol}


class _Layer:
    """Memoized ``t -> P(X > t)`` with a monotonicity guard."""

    def __init__(self, P: QuasiMeasure, X: ScalarField):
        if X.domain != P.domain:
            raise ValueError(f"field on n={X.domain.n} integrated against a measure on n={P.domain.n}")
        self.P = P
        self.X = X
        self.cache: dict[float, float] = {}

    def __call__(self, t: float) -> float:
        t = float(t)
        v = self.cache.get(t)
        if v is None:
            v = self.P.measure_open(self.X.superlevel(t))
            if self.P.zero_one and v not in (0.0, 1.0):
                raise NotMonotone(f"measure declared {{0,1}}-valued returned {v}")
            self.cache[t] = v
        return v

    @property
    def evaluations(self) -> int:
        return len(self.cache)

    def check_monotone(self) -> None:
        ts = sorted(self.cache)
        gs = np.array([self.cache[t] for t in ts])
        if gs.size > 1:
            rise = float(np.max(np.diff(gs)))
            if rise > MONOTONE_SLACK:
                raise NotMonotone(f"t -> P(X > t) increases by {rise:.3g}; the measure is not monotone")


def _bisection(layer: _Layer, levels: np.ndarray) -> float:
    """Integral for a {0,1} measure: the smallest level where ``P(X > t)`` drops to 0."""
    if layer(levels[0]) == 0.0:
        return float(levels[0])
    lo, hi = 0, len(levels) - 1  # g(levels[-1]) = P(empty) = 0 by normalization
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if layer(levels[mid]) == 1.0:
            lo = mid
        else:
            hi = mid
    layer.check_monotone()
    return float(levels[hi])


def _riemann(layer: _Layer, levels: np.ndarray, tol: float) -> tuple[float, float]:
    """Adaptive trapezoid layer-cake sum with a monotone bracket as error bound.

    On ``[s, u]`` a nonincreasing ``g`` integrates to something between
    ``g(u) (u - s)`` and ``g(s) (u - s)``.  Intervals are halved, widest
    bracket first, until half the total bracket is below ``tol``.  An interval
    with no field level strictly inside has constant ``g`` and is exact.
    """
    a, b = float(levels[0]), float(levels[-1])

    def g(t: float) -> float:
        return 0.0 if t >= b else layer(t)

    def interior(s: float, u: float) -> int:
        return int(np.searchsorted(levels, u, side="left") - np.searchsorted(levels, s, side="right"))

    def entry(s: float, u: float, gs: float, gu: float, depth: int):
        width = 0.0 if interior(s, u) == 0 else (u - s) * (gs - gu)
        return (-width, s, u, gs, gu, depth)

    ts = np.linspace(a, b, 2 ** MIN_LEVEL + 1)
    gs = [g(t) for t in ts]
    heap = [entry(ts[k], ts[k + 1], gs[k], gs[k + 1], MIN_LEVEL) for k in range(len(ts) - 1)]
    heapq.heapify(heap)
    done = []
    bracket = -sum(e[0] for e in heap)
    while heap and bracket / 2 >= tol:
        neg_w, s, u, gs_, gu, depth = heapq.heappop(heap)
        if neg_w == 0.0 or depth >= MAX_DEPTH:
            done.append((neg_w, s, u, gs_, gu, depth))
            continue
        m = 0.5 * (s + u)
        gm = g(m)
        left, right = entry(s, m, gs_, gm, depth + 1), entry(m, u, gm, gu, depth + 1)
        bracket += neg_w - left[0] - right[0]
        heapq.heappush(heap, left)
        heapq.heappush(heap, right)
    layer.check_monotone()
    total = a
    for neg_w, s, u, gs_, gu, _ in heap + done:
        total += (u - s) * (gs_ if neg_w == 0.0 else 0.5 * (gs_ + gu))
    return total, max(bracket / 2, 0.0)


def integrate(P: QuasiMeasure, X: ScalarField | Observable, tol: float = 1e-3,
              method: str | None = None) -> IntegralResult:
    """Quasi-integral of ``X`` against ``P`` by the layer-cake formula.

    ``method`` is ``"bisection"`` (only for {0,1} measures) or ``"riemann"``;
    by default the measure decides.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if isinstance(X, Observable):
        X = evaluate(X, P.domain)
    if method is None:
        method = "bisection" if P.zero_one else "riemann"
    if method == "bisection" and not P.zero_one:
        raise ValueError(f"bisection needs a {{0,1}}-valued measure, {P.name} is not")
    if method not in ("bisection", "riemann"):
        raise ValueError(f"unknown method {method!r}")
    levels = X.levels
    if len(levels) == 1:
        return IntegralResult(float(levels[0]), method, 0, 0.0, tol)
    layer = _Layer(P, X)
    if method == "bisection":
        value, achieved = _bisection(layer, levels), 0.0
    else:
        value, achieved = _riemann(layer, levels, tol)
    return IntegralResult(value, method, layer.evaluations, achieved, tol)


class Expectation:
    """The functional ``X -> int X dP`` for a fixed measure and tolerance."""

    def __init__(self, P: QuasiMeasure, tol: float = 1e-3, method: str | None = None):
        self.P = P
        self.tol = tol
        self.method = method

    @property
    def domain(self) -> GridDomain:
        return self.P.domain

    def result(self, X: ScalarField | Observable) -> IntegralResult:
        return integrate(self.P, X, self.tol, self.method)

    def __call__(self, X: ScalarField | Observable) -> float:
        return self.result(X).value

    def __repr__(self):
        return f"Expectation({self.P!r}, tol={self.tol})"


@dataclass(frozen=True)
class Cdf:
    """Right-continuous step function through sampled ``(t, F(t))`` pairs.

    ``support`` is the range ``[min X, max X]``: below it ``F`` is 0, from its
    upper end on ``F`` is 1.
    """

    ts: np.ndarray
    fs: np.ndarray
    support: tuple[float, float]
    jumps: tuple[float, ...] = ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.ts, t, side="right") - 1
        out = np.where(idx >= 0, self.fs[np.clip(idx, 0, None)], 0.0)
        out = np.where(t < self.support[0], 0.0, out)
        out = np.where(t >= self.support[1], 1.0, out)
        return out if out.ndim else float(out)

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.ts.tolist(), self.fs.tolist()))

    def to_csv(self) -> str:
        lines = ["t,F"] + [f"{t!r},{f!r}" for t, f in self.rows()]
        return "\n".join(lines) + "\n"


def _locate_jump(F: Callable[[float], float], levels: np.ndarray, lo_t: float, hi_t: float, f_lo: float) -> float:
    """Smallest level in ``(lo_t, hi_t]`` where ``F`` already exceeds ``f_lo``."""
    i = int(np.searchsorted(levels, lo_t, side="right"))
    j = int(np.searchsorted(levels, hi_t, side="right")) - 1
    if i > j:
        return hi_t
    while i < j:
        mid = (i + j) // 2
        if F(levels[mid]) > f_lo:
            j = mid
        else:
            i = mid + 1
    return float(levels[i])


def cdf(P: QuasiMeasure, X: ScalarField | Observable, ts: Sequence[float] | None = None,
        refine_jumps: bool | None = None) -> Cdf:
    """Distribution function ``F(t) = 1 - P(X > t)`` sampled at ``ts``.

    The default schedule is 129 equispaced points on the range of ``X``.  With
    ``refine_jumps`` (default: only for {0,1} measures) every increase between
    neighbouring samples is pinned to the exact level where it happens.
    """
    if isinstance(X, Observable):
        X = evaluate(X, P.domain)
    if ts is None:
        ts = np.linspace(X.min, X.max, DEFAULT_CDF_POINTS)
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("ts must be a nonempty 1-d sequence")
    if np.any(np.diff(ts) < 0):
        raise ValueError("ts must be sorted")
    ts = np.unique(ts)
    if refine_jumps is None:
        refine_jumps = P.zero_one
    cache: dict[float, float] = {}

    def F(t: float) -> float:
        t = float(t)
        if t not in cache:
            cache[t] = 1.0 - P.measure_open(X.superlevel(t))
        return cache[t]

    fs = np.array([F(t) for t in ts])
    if fs.size > 1 and np.max(-np.diff(fs)) > MONOTONE_SLACK:
        raise NotMonotone("sampled distribution function decreases; the measure is not monotone")
    jumps = []
    if refine_jumps:
        levels = X.levels
        for k in range(1, len(ts)):
            if fs[k] > fs[k - 1]:
                jumps.append(_locate_jump(F, levels, ts[k - 1], ts[k], fs[k - 1]))
        if ts[0] >= X.min and fs[0] > 0:
            jumps.insert(0, float(ts[0]))
        ts = np.unique(np.concatenate([ts, jumps]))
        fs = np.array([F(t) for t in ts])
        if fs.size > 1 and np.max(-np.diff(fs)) > MONOTONE_SLACK:
            raise NotMonotone("refined distribution function decreases; the measure is not monotone")
    return Cdf(ts, fs, (X.min, X.max), tuple(jumps))


def stieltjes(phi: Callable[[np.ndarray], np.ndarray], F: Cdf, at_jumps: bool = False) -> float:
    """``int phi dF`` as a sum over the sample intervals of ``F``.

    The mass ``F(t_0)`` sits at the first sample.  Increments over
    ``(t_{k-1}, t_k]`` are weighted by ``phi`` at the right end when
    ``at_jumps`` (the samples are exact jump locations) and at the midpoint
    otherwise.
    """
    ts, fs = F.ts, F.fs
    total = float(phi(np.array([ts[0]]))[0] * fs[0])
    if ts.size > 1:
        nodes = ts[1:] if at_jumps else 0.5 * (ts[1:] + ts[:-1])
        total += float(np.dot(phi(nodes), np.diff(fs)))
    if fs[-1] < 1.0 and F.support[1] > ts[-1]:
        total += float(phi(np.array([F.support[1]]))[0] * (1.0 - fs[-1]))
    return total


def expectation_of_composition(P: QuasiMeasure, X: ScalarField | Observable, phi: PiecewiseLinear,
                               ts: Sequence[float] | None = None) -> float:
    """``int phi(t) P_X(dt)`` against the distribution of ``X``."""
    if isinstance(X, Observable):
        X = evaluate(X, P.domain)
    if ts is None:
        base = np.linspace(X.min, X.max, DEFAULT_CDF_POINTS)
        inner = phi.ts[(phi.ts > X.min) & (phi.ts < X.max)]
        ts = np.union1d(base, inner)
    F = cdf(P, X, ts)
    return stieltjes(phi, F, at_jumps=P.zero_one)


def check_monotone_convergence_of_integral(P: QuasiMeasure, Xn: Sequence[ScalarField], X: ScalarField,
                                           tol: float = 1e-3) -> CheckReport:
    """``X_n`` increasing to ``X`` gives integrals increasing to ``int X dP``."""
    seq = list(Xn)
    if not seq:
        raise ValueError("empty sequence")
    for i in range(len(seq) - 1):
        if not seq[i] <= seq[i + 1]:
            raise NotMonotone(f"X_{i} is not below X_{i + 1}")
    if not seq[-1] <= X:
        raise NotMonotone("the sequence is not dominated by its limit")
    values = [integrate(P, f, tol).value for f in seq]
    limit = integrate(P, X, tol).value
    nondecreasing = all(values[i] <= values[i + 1] + tol for i in range(len(values) - 1))
    gap = abs(values[-1] - limit)
    passed = nondecreasing and gap <= tol
    case = {"values": values, "limit": limit, "gap": gap, "nondecreasing": nondecreasing, "passed": passed}
    return CheckReport("monotone_convergence_of_integral", passed, [case],
                       {"measure": P.name, "grid": P.domain.n, "tol": tol})


def check_lipschitz(E: Expectation, pairs: Sequence[tuple[ScalarField, ScalarField]],
                    slack: float | None = None) -> CheckReport:
    """``|E[X] - E[Y]| <= ||X - Y||`` and ``X <= Y => E[X] <= E[Y]`` up to integration slack."""
    tol = E.tol if slack is None else slack
    cases = []
    for idx, (x, y) in enumerate(pairs):
        ex, ey = E(x), E(y)
        dist = (x - y).norm
        lip_ok = abs(ex - ey) <= E.P(E.domain.full()) * dist + 2 * tol
        dominated = x <= y
        mono_ok = (not dominated) or ex <= ey + tol
        cases.append({"index": idx, "e_x": ex, "e_y": ey, "sup_dist": dist, "dominated": dominated,
                      "lipschitz_ok": lip_ok, "monotone_ok": mono_ok, "passed": lip_ok and mono_ok})
    return CheckReport("lipschitz", all(c["passed"] for c in cases), cases,
                       {"measure": E.P.name, "grid": E.domain.n, "tol": tol})
