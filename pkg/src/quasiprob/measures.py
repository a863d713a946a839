"""Set functions on grid masks and checkers for the quasi-measure axioms.

A measure only has to evaluate open masks.  Closed masks are always measured
by complementation, ``P(F) = 1 - P(F^c)``, so the two roles cannot disagree.
"""
from __future__ import annotations

import abc
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import NotDisjoint, NotIncreasing
from .grid import Adjacency, GridDomain, RegionMask, boundary_ring, label_components
from .observables import ScalarField
from .reports import CheckReport

ADDITIVITY_TOL = 1e-12


class QuasiMeasure(abc.ABC):
    name = "abstract"
    #: True when every value is 0 or 1; enables the bisection path of the integral.
    zero_one = False

    def __init__(self, domain: GridDomain):
        self.domain = domain

    @abc.abstractmethod
    def measure_open(self, mask: RegionMask) -> float:
        """Value on an open (superlevel-type) mask, in [0, 1]."""

    def measure_closed(self, mask: RegionMask) -> float:
        return 1.0 - self.measure_open(mask.complement())

    def measure(self, mask: RegionMask, kind: str = "open") -> float:
        if kind == "open":
            return self.measure_open(mask)
        if kind == "closed":
            return self.measure_closed(mask)
        raise ValueError(f"kind must be 'open' or 'closed', got {kind!r}")

    def __call__(self, mask: RegionMask) -> float:
        return self.measure_open(mask)

    def _check_domain(self, mask: RegionMask) -> None:
        if mask.domain != self.domain:
            raise ValueError(f"mask on n={mask.domain.n} passed to a measure on n={self.domain.n}")

    def __repr__(self):
        return f"{type(self).__name__}(n={self.domain.n})"


class UniformMeasure(QuasiMeasure):
    """Normalized cell counting; the classical, additive reference measure."""

    name = "uniform"

    def measure_open(self, mask: RegionMask) -> float:
        self._check_domain(mask)
        return mask.popcount() / self.domain.size

    def measure_closed(self, mask: RegionMask) -> float:
        self._check_domain(mask)
        return mask.popcount() / self.domain.size


class AarnesMeasure(QuasiMeasure):
    """{0,1}-valued quasi-measure fixed by the center point and the border curve.

    On solid sets ``K`` (connected with connected complement) the value is 1
    iff ``K`` holds the marker point and meets the border, or ``K`` holds the
    whole border.  A connected open ``C`` gets ``1 - sum(P(K))`` over the
    solid components ``K`` of its complement, and an open mask sums over its
    components.  Reduced to cell tests, an open mask has measure 1 iff one of
    its 8-components ``C`` meets the border ring and either contains the
    marker cell or cuts the marker cell off from the ring (the 4-component
    of ``C^c`` around the marker does not reach the ring).
    """

    name = "aarnes"
    zero_one = True

    def __init__(self, domain: GridDomain):
        super().__init__(domain)
        self.ring = boundary_ring(domain)
        self.marker = domain.center_index
        c = domain.center_index[0]
        # A component cutting the marker off from the ring must cross all four axis rays.
        self._ray_bits = [np.zeros(domain.shape, dtype=bool) for _ in range(4)]
        self._ray_bits[0][c + 1:, c] = True
        self._ray_bits[1][:c, c] = True
        self._ray_bits[2][c, c + 1:] = True
        self._ray_bits[3][c, :c] = True

    def measure_open(self, mask: RegionMask) -> float:
        self._check_domain(mask)
        if mask.is_empty():
            return 0.0
        if mask.is_full():
            return 1.0
        lab = label_components(mask, Adjacency.EIGHT)
        marker = lab.marker_label()
        if marker and lab.touches_ring[marker]:
            return 1.0
        for k in self._separator_candidates(lab):
            if k == marker:
                continue
            if self._separates(lab.labels == k):
                return 1.0
        return 0.0

    def _separator_candidates(self, lab) -> Iterable[int]:
        cand = set(lab.ring_labels().tolist())
        for ray in self._ray_bits:
            cand &= set(np.unique(lab.labels[ray]).tolist())
        return sorted(cand, key=lambda k: -lab.sizes[k])

    def _separates(self, comp_bits: np.ndarray) -> bool:
        """True iff the marker's 4-component of the complement misses the ring."""
        labels, _ = ndimage.label(~comp_bits, structure=Adjacency.FOUR.structure)
        k = labels[self.marker]
        return not np.any(labels[self.ring.bits] == k)


MEASURES = {
    "aarnes": AarnesMeasure,
    "uniform": UniformMeasure,
}


def make_measure(name: str, domain: GridDomain) -> QuasiMeasure:
    try:
        return MEASURES[name](domain)
    except KeyError:
        raise ValueError(f"unknown measure {name!r}; choose from {sorted(MEASURES)}") from None


def aarnes_measure_open(m: AarnesMeasure, mask: RegionMask) -> float:
    return m.measure_open(mask)


def check_additivity(P: QuasiMeasure, pairs: Sequence[tuple[RegionMask, RegionMask, str]],
                     tol: float = ADDITIVITY_TOL) -> CheckReport:
    """``P(A + B) = P(A) + P(B)`` for disjoint pairs playing open or closed roles.

    Grid masks stand in for sets at positive distance, so open pairs may not
    be 8-adjacent and closed pairs may not be 4-adjacent: touching cells would
    merge in the union and the union would no longer be a disjoint one.
    """
    cases = []
    for idx, (a, b, kind) in enumerate(pairs):
        if not a.isdisjoint(b):
            raise NotDisjoint(f"pair {idx}: masks overlap")
        adjacency = Adjacency.EIGHT if kind == "open" else Adjacency.FOUR
        if kind not in ("open", "closed"):
            raise ValueError(f"pair {idx}: kind must be 'open' or 'closed', got {kind!r}")
        if not a.is_separated_from(b, adjacency):
            raise NotDisjoint(f"pair {idx}: {kind} masks are {adjacency.value}-adjacent")
        pa, pb, pab = P.measure(a, kind), P.measure(b, kind), P.measure(a | b, kind)
        gap = abs(pab - pa - pb)
        cases.append({"index": idx, "kind": kind, "p_a": pa, "p_b": pb, "p_union": pab,
                      "gap": gap, "passed": gap <= tol})
    return CheckReport("additivity", all(c["passed"] for c in cases), cases,
                       {"measure": P.name, "grid": P.domain.n, "tol": tol})


def check_monotone_convergence(P: QuasiMeasure, chain: Sequence[RegionMask],
                               tol: float = ADDITIVITY_TOL) -> CheckReport:
    """``P(U_i)`` increases to ``P(U)``; the last chain element is the limit ``U``."""
    if not chain:
        raise ValueError("empty chain")
    for i in range(len(chain) - 1):
        if not chain[i].issubset(chain[i + 1]):
            raise NotIncreasing(f"chain element {i} is not contained in element {i + 1}")
    values = [P.measure_open(u) for u in chain]
    limit = values[-1]
    approx = values[:-1] or values
    nondecreasing = all(values[i] <= values[i + 1] + tol for i in range(len(values) - 1))
    sup_gap = abs(max(approx) - limit)
    passed = nondecreasing and sup_gap <= tol
    case = {"values": values, "limit": limit, "sup_gap": sup_gap,
            "nondecreasing": nondecreasing, "passed": passed}
    return CheckReport("monotone_convergence", passed, [case],
                       {"measure": P.name, "grid": P.domain.n, "tol": tol, "length": len(chain)})


def saturating_schedule(field: ScalarField, t: float, max_doublings: int = 60) -> list[int]:
    """Indices ``1, 2, 4, ...`` up to the first ``i`` with ``1/i`` below every positive gap ``field - t``."""
    gaps = field.values[field.values > t] - t
    smallest = float(gaps.min()) if gaps.size else 1.0
    sched, i = [], 1
    for _ in range(max_doublings):
        sched.append(i)
        if 1.0 / i < smallest:
            break
        i *= 2
    return sched


def check_regularity(P: QuasiMeasure, field: ScalarField, t: float, schedule: Sequence[int] | None = None,
                     tol: float = ADDITIVITY_TOL) -> CheckReport:
    """Inner regularity: ``P({f > t}) = sup_i P({f >= t + 1/i})`` with the closed sets measured by complement."""
    u = field.superlevel(t)
    target = P.measure_open(u)
    if schedule is None:
        schedule = saturating_schedule(field, t)
    inner = []
    for i in schedule:
        f_i = field.superlevel_closed(t + 1.0 / i)
        if not f_i.issubset(u):
            raise AssertionError("closed approximant escaped its open set")
        inner.append(P.measure_closed(f_i))
    sup = max(inner) if inner else 0.0
    gap = abs(sup - target)
    case = {"t": t, "target": target, "inner": inner, "schedule": list(schedule), "gap": gap,
            "passed": gap <= tol}
    return CheckReport("regularity", gap <= tol, [case], {"measure": P.name, "grid": P.domain.n, "tol": tol})
