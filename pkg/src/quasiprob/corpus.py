"""Seeded generators of observables, level sets and mask pairs for property checks."""
from __future__ import annotations

import numpy as np

from .grid import Adjacency, GridDomain, RegionMask
from .observables import (
    Const, Max, Observable, PiecewiseLinear, ScalarField, Sub, X1, X2, evaluate,
)


def random_polynomial(rng: np.random.Generator, degree: int = 3, scale: float = 1.0) -> Observable:
    """Sum of ``c * x^a * y^b`` over ``a + b <= degree`` with 3-decimal Gaussian coefficients."""
    terms = []
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            c = round(float(rng.normal(0.0, scale)), 3)
            if c == 0.0:
                continue
            term: Observable = Const(c)
            if a:
                term = term * (X1 ** a if a > 1 else X1)
            if b:
                term = term * (X2 ** b if b > 1 else X2)
            terms.append(term)
    if not terms:
        return Const(0.0)
    node = terms[0]
    for t in terms[1:]:
        node = node + t
    return node


def random_pwl(rng: np.random.Generator, lo: float, hi: float, k: int | None = None,
               amplitude: float = 1.0) -> PiecewiseLinear:
    if k is None:
        k = int(rng.integers(2, 6))
    ts = np.sort(rng.uniform(lo, hi, size=k))
    ts[0], ts[-1] = lo, hi
    ts = np.unique(np.round(ts, 4))
    if len(ts) < 2:
        ts = np.array([lo, hi])
    vs = np.round(rng.uniform(-amplitude, amplitude, size=len(ts)), 4)
    return PiecewiseLinear(ts, vs)


def polynomial_fields(rng: np.random.Generator, domain: GridDomain, count: int,
                      degree: int = 3) -> list[tuple[Observable, ScalarField]]:
    out = []
    while len(out) < count:
        obs = random_polynomial(rng, degree)
        f = evaluate(obs, domain)
        if f.max - f.min > 1e-6:
            out.append((obs, f))
    return out


def level_set_corpus(rng: np.random.Generator, domain: GridDomain, count: int,
                     degree: int = 3) -> list[tuple[ScalarField, float]]:
    """``(field, t)`` with ``t`` a random interior quantile, so ``{field > t}`` is a proper subset."""
    corpus = []
    families = [
        lambda: random_polynomial(rng, degree),
        lambda: float(rng.uniform(0.5, 3)) * X1 ** 2 + float(rng.uniform(0.5, 3)) * X2 ** 2,
        lambda: -(float(rng.uniform(0.5, 3)) * X1 ** 2 + float(rng.uniform(0.5, 3)) * X2 ** 2),
    ]
    while len(corpus) < count:
        obs = families[len(corpus) % len(families)]()
        f = evaluate(obs, domain)
        if f.max - f.min < 1e-6:
            continue
        t = float(np.quantile(f.values, rng.uniform(0.05, 0.95)))
        corpus.append((f, round(t, 6)))
    return corpus


def _separate(a: RegionMask, b: RegionMask, adjacency: Adjacency) -> RegionMask:
    return b - a.dilate(adjacency)


def disjoint_pairs(rng: np.random.Generator, domain: GridDomain, count: int,
                   kind: str = "open") -> list[tuple[RegionMask, RegionMask, str]]:
    """Separated disjoint pairs drawn from level sets, half-planes, annuli and corners.

    The second set is trimmed by one cell layer around the first so the two
    never touch under the adjacency that ``kind`` uses.
    """
    adjacency = Adjacency.EIGHT if kind == "open" else Adjacency.FOUR
    x, y = domain.coords
    pairs = []
    attempts = 0
    while len(pairs) < count:
        attempts += 1
        shape = len(pairs) % 4
        if shape == 0:
            f = evaluate(random_polynomial(rng, 3), domain).values
            lo, hi = sorted(np.quantile(f, rng.uniform(0.05, 0.95, size=2)))
            a_bits, b_bits = f > hi, f < lo
        elif shape == 1:
            theta = rng.uniform(0, 2 * np.pi)
            s = np.cos(theta) * x + np.sin(theta) * y
            c, gap = rng.uniform(-0.6, 0.6), rng.uniform(0.0, 0.5)
            a_bits, b_bits = s > c + gap, s < c
        elif shape == 2:
            r2 = rng.uniform(0.5, 3) * x ** 2 + rng.uniform(0.5, 3) * y ** 2
            r_in, r_out = sorted(rng.uniform(0.05, 1.8, size=2))
            a_bits, b_bits = r2 < r_in, r2 > r_out
        else:
            s = rng.uniform(0.0, 0.7)
            sx, sy = rng.choice([-1.0, 1.0], size=2)
            a_bits = (sx * x > s) & (sy * y > s)
            b_bits = (sx * x < -s) | (sy * y < -rng.uniform(0.0, 0.7))
        a = RegionMask(domain, a_bits)
        b = _separate(a, RegionMask(domain, b_bits), adjacency)
        if (a.is_empty() or b.is_empty()) and attempts < 20 * count:
            continue
        pairs.append((a, b, kind))
    return pairs


def lipschitz_pairs(rng: np.random.Generator, domain: GridDomain, count: int) -> list[tuple[ScalarField, ScalarField]]:
    """Half dominated pairs ``Y = X + |q|``, half small perturbations ``Y = X + eps * q``."""
    pairs = []
    for k in range(count):
        x = evaluate(random_polynomial(rng, 3), domain)
        q = evaluate(random_polynomial(rng, 2, scale=0.5), domain)
        if k % 2 == 0:
            y = x + ScalarField(domain, np.abs(q.values))
        else:
            y = x + q * float(rng.uniform(0.01, 0.3))
        pairs.append((x, y))
    return pairs


def staircase_pairs(rng: np.random.Generator, domain: GridDomain, count: int, n: int,
                    delta: float) -> list[tuple[ScalarField, ScalarField]]:
    """Pairs ``X <= Y`` scaled so ``n`` thresholds can be spaced below ``delta``."""
    pairs = []
    for _ in range(count):
        x = evaluate(random_polynomial(rng, 3), domain)
        y = x + ScalarField(domain, np.abs(evaluate(random_polynomial(rng, 2), domain).values))
        reach = y.max + max(0.0, -x.min)
        budget = 0.9 * (n - 1) * delta
        if reach > budget:
            s = budget / reach
            x, y = x * s, y * s
        pairs.append((x, y))
    return pairs


def urysohn_inputs(rng: np.random.Generator, domain: GridDomain, count: int) -> list[tuple[Observable, Observable]]:
    """``(Y, Z)`` with zero sets ``{p <= a}`` and ``{p >= b}``, ``a < b``, both nonempty on the grid."""
    out = []
    while len(out) < count:
        p = random_polynomial(rng, 3)
        f = evaluate(p, domain).values
        a, b = sorted(np.round(np.quantile(f, rng.uniform(0.1, 0.9, size=2)), 6))
        if b - a < 1e-3:
            continue
        y_obs = Max(Sub(p, Const(float(a))), Const(0.0))
        z_obs = Max(Sub(Const(float(b)), p), Const(0.0))
        out.append((y_obs, z_obs))
    return out

