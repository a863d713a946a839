"""Recovering the set function from the expectation functional.

For ``U = {f > t}`` the chain ``X_i = clamp(i (f - t) - 1, 0, 1)`` increases
pointwise to the indicator of ``U`` and every ``X_i`` vanishes off the zero
set ``{f >= t + 1/i}`` inside ``U``; ``sup_i E[X_i]`` then returns ``P(U)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotMonotone, NotSandwiched
from .grid import RegionMask
from .integral import Expectation
from .measures import QuasiMeasure
from .observables import PiecewiseLinear, ScalarField
from .reports import CheckReport

DEFAULT_STEPS = 32


@dataclass
class RecoveryResult:
    mask: RegionMask
    recovered: float
    reference: float
    chain_values: list[float] = field(default_factory=list)
    indices: list[int] = field(default_factory=list)
    saturated: bool = False

    @property
    def iterations(self) -> int:
        return len(self.chain_values)

    def to_dict(self) -> dict:
        return {"recovered": self.recovered, "reference": self.reference, "chain": self.chain_values,
                "indices": self.indices, "iterations": self.iterations, "saturated": self.saturated,
                "popcount": self.mask.popcount()}


def chain_ramp(t: float, i: int) -> PiecewiseLinear:
    """``s -> clamp(i (s - t) - 1, 0, 1)``."""
    return PiecewiseLinear([t + 1.0 / i, t + 2.0 / i], [0.0, 1.0])


def recover_probability(E: Expectation, field_: ScalarField, t: float, steps: int = DEFAULT_STEPS) -> RecoveryResult:
    """``P({f > t})`` as the supremum of ``E`` along the ramp chain.

    The chain indices double (1, 2, 4, ...) for at most ``steps`` terms and
    stop once a ramp equals the indicator of ``U`` on every cell; further
    terms cannot change the value.
    """
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    u = field_.superlevel(t)
    inside = field_.values[u.bits]
    values, indices = [], []
    saturated = False
    i = 1
    for _ in range(steps):
        x_i = field_.apply(chain_ramp(t, i))
        values.append(E(x_i))
        indices.append(i)
        if len(values) > 1 and values[-1] < values[-2] - E.tol:
            raise NotMonotone(f"E along the recovery chain drops from {values[-2]} to {values[-1]}")
        if inside.size == 0 or float(inside.min()) - t >= 2.0 / i:
            saturated = True
            break
        i *= 2
    return RecoveryResult(u, max(values), E.P.measure_open(u), values, indices, saturated)


def round_trip(P: QuasiMeasure, corpus: Sequence[tuple[ScalarField, float]], tol: float = 1e-3,
               steps: int = DEFAULT_STEPS) -> CheckReport:
    """Integrate, recover ``P(U)`` by the sup formula, compare with ``P(U)``.

    {0,1} measures must match exactly; others within ``tol``.
    """
    E = Expectation(P, tol)
    cases = []
    for idx, (f, t) in enumerate(corpus):
        res = recover_probability(E, f, t, steps)
        err = abs(res.recovered - res.reference)
        ok = err == 0.0 if P.zero_one else err <= tol
        cases.append({"index": idx, "t": t, "recovered": res.recovered, "reference": res.reference,
                      "error": err, "iterations": res.iterations, "passed": ok})
    return CheckReport("round_trip", all(c["passed"] for c in cases), cases,
                       {"measure": P.name, "grid": P.domain.n, "tol": tol, "exact": P.zero_one})


def check_lmon_sandwich(P: QuasiMeasure, F: RegionMask, X: ScalarField, U: RegionMask,
                        tol: float = 1e-3) -> CheckReport:
    """``P(F) <= E[X] <= P(U)`` whenever ``1_F <= X <= 1_U``."""
    v = X.values
    if not (np.all(v[F.bits] >= 1.0) and np.all(v >= 0.0) and np.all(v <= 1.0) and np.all(v[~U.bits] <= 0.0)):
        raise NotSandwiched("need 1_F <= X <= 1_U on every cell")
    pf = P.measure_closed(F)
    pu = P.measure_open(U)
    ex = Expectation(P, tol)(X)
    lower_ok = pf <= ex + tol
    upper_ok = ex <= pu + tol
    case = {"p_closed_F": pf, "e_x": ex, "p_open_U": pu, "lower_ok": lower_ok, "upper_ok": upper_ok,
            "passed": lower_ok and upper_ok}
    return CheckReport("lmon_sandwich", case["passed"], [case], {"measure": P.name, "grid": P.domain.n, "tol": tol})
