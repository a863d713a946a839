"""Finite quasi-measurable spaces and brute-force oracles.

Subsets of the ground set ``{0, ..., m-1}`` are int bitmasks.  A family of
open sets is a sigma-quasi-algebra when it holds the empty and the full set
and is closed under pairwise intersection and union (on a finite family this
is the same as closure under countable unions).  The closed sets are the
complements of the open ones.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded
from .reports import CheckReport

MAX_POINTS = 12
ENUM_MAX_POINTS = 6
ENUM_MAX_OPEN = 20
COARSE_GRID = tuple(Fraction(k, 2) for k in range(3))
DYADIC_GRID = tuple(Fraction(k, 4) for k in range(5))


def to_mask(elements: Iterable[int]) -> int:
    bits = 0
    for e in elements:
        bits |= 1 << int(e)
    return bits


def to_elements(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True)
class FiniteQSpace:
    m: int
    opens: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.m <= MAX_POINTS:
            raise ValueError(f"ground set size must lie in [1, {MAX_POINTS}], got {self.m}")
        full = self.full
        for s in self.opens:
            if s < 0 or s & ~full:
                raise ValueError(f"subset {to_elements(s)} leaves the ground set of size {self.m}")
        object.__setattr__(self, "opens", tuple(sorted(set(self.opens))))

    @classmethod
    def from_sets(cls, m: int, sets: Iterable[Iterable[int]]) -> "FiniteQSpace":
        return cls(m, tuple(to_mask(s) for s in sets))

    @classmethod
    def power_set(cls, m: int) -> "FiniteQSpace":
        return cls(m, tuple(range(1 << m)))

    @classmethod
    def trivial(cls, m: int) -> "FiniteQSpace":
        return cls(m, (0, (1 << m) - 1))

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    @property
    def closeds(self) -> tuple[int, ...]:
        return tuple(sorted(self.full & ~s for s in self.opens))

    @property
    def family(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.opens) | set(self.closeds)))

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "opens": [to_elements(s) for s in self.opens]})


def load_qspace(path: str | Path) -> FiniteQSpace:
    """Read ``{"m": 3, "opens": [[], [0], [0, 1, 2]]}``; ``m`` defaults to one past the largest element."""
    doc = json.loads(Path(path).read_text())
    return qspace_from_doc(doc)


def qspace_from_doc(doc: dict) -> FiniteQSpace:
    sets = [list(s) for s in doc["opens"]]
    m = doc.get("m")
    if m is None:
        m = max((max(s) for s in sets if s), default=0) + 1
    return FiniteQSpace.from_sets(int(m), sets)


def validate_qspace(space: FiniteQSpace) -> CheckReport:
    opens = set(space.opens)
    cases = []
    for name, s in (("empty", 0), ("full", space.full)):
        if s not in opens:
            cases.append({"rule": f"contains_{name}", "passed": False})
    for a, b in itertools.combinations(space.opens, 2):
        for rule, c in (("intersection", a & b), ("union", a | b)):
            if c not in opens:
                cases.append({"rule": rule, "a": to_elements(a), "b": to_elements(b),
                              "missing": to_elements(c), "passed": False})
    return CheckReport("qspace", not cases, cases, {"m": space.m, "n_open": len(space.opens)})


def is_measurable(space: FiniteQSpace, values: Sequence[float]) -> tuple[bool, dict | None]:
    """Check preimages of all open intervals with endpoints between the sampled values.

    Returns ``(ok, witness)``; the witness names the interval whose preimage is
    missing from the open family.
    """
    vals = np.asarray(values, dtype=float)
    if vals.shape != (space.m,):
        raise ValueError(f"need {space.m} values, got {vals.shape}")
    opens = set(space.opens)
    levels = np.unique(vals)
    # Cut points strictly between consecutive values, plus the two infinities.
    cuts = [-np.inf] + [0.5 * (a + b) for a, b in zip(levels[:-1], levels[1:])] + [np.inf]
    for lo, hi in itertools.combinations(cuts, 2):
        pre = to_mask(np.flatnonzero((vals > lo) & (vals < hi)))
        if pre not in opens:
            return False, {"interval": [lo, hi], "preimage": to_elements(pre)}
    return True, None


class MaxMinPL:
    """Continuous piecewise-linear map ``R^k -> R`` in max-of-min form.

    ``pieces`` is a list of groups; each group is a list of ``(weights, offset)``
    affine maps.  The value is ``max over groups of min over the group``.
    """

    def __init__(self, pieces: Sequence[Sequence[tuple[Sequence[float], float]]]):
        if not pieces or any(not g for g in pieces):
            raise ValueError("need at least one nonempty group")
        self.pieces = [[(np.asarray(w, dtype=float), float(c)) for w, c in g] for g in pieces]
        self.k = len(self.pieces[0][0][0])

    @classmethod
    def affine(cls, weights: Sequence[float], offset: float = 0.0) -> "MaxMinPL":
        return cls([[(weights, offset)]])

    def __call__(self, *args):
        if len(args) != self.k:
            raise ValueError(f"expected {self.k} arguments, got {len(args)}")
        stack = np.stack([np.asarray(a, dtype=float) for a in args], axis=-1)
        groups = [np.min([stack @ w + c for w, c in g], axis=0) for g in self.pieces]
        return np.max(groups, axis=0)


def check_observable_algebra(space: FiniteQSpace, fs: Sequence[Sequence[float]],
                             phi: Callable[..., np.ndarray]) -> CheckReport:
    """Is ``phi(f_1, ..., f_k)`` measurable when every ``f_i`` is?"""
    cases = []
    for idx, f in enumerate(fs):
        ok, witness = is_measurable(space, f)
        if not ok:
            cases.append({"input": idx, "role": "input", "witness": witness, "passed": False})
    composed = np.asarray(phi(*[np.asarray(f, dtype=float) for f in fs]), dtype=float)
    ok, witness = is_measurable(space, composed)
    cases.append({"role": "composition", "values": composed, "witness": witness, "passed": ok})
    return CheckReport("observable_algebra", all(c["passed"] for c in cases), cases, {"m": space.m})


def _additivity_triples(family: Sequence[int], full: int) -> list[tuple[int, int, int]]:
    members = set(family)
    triples = []
    for a, b in itertools.combinations(family, 2):
        if a & b == 0 and a and b and (a | b) in members:
            triples.append((a, b, a | b))
    return triples


def brute_force_quasi_probabilities(space: FiniteQSpace,
                                    grid: Sequence[Fraction] | None = None) -> list[dict[int, Fraction]]:
    """Every grid-valued set function on the family satisfying the axioms.

    Enforced: ``P(empty) = 0``, ``P(full) = 1``, additivity on disjoint pairs
    whose union lies in the family (this includes ``P(F) = 1 - P(F^c)``),
    and monotonicity along nested open sets, which is what monotone
    convergence says on a finite family.  Values are tried on ``{0, 1/2, 1}``
    and, if nothing qualifies, on quarters.
    """
    if space.m > ENUM_MAX_POINTS or len(space.opens) > ENUM_MAX_OPEN:
        raise BudgetExceeded(f"enumeration budget is m <= {ENUM_MAX_POINTS} and at most "
                             f"{ENUM_MAX_OPEN} open sets, got m={space.m} with {len(space.opens)}")
    grids = [tuple(grid)] if grid is not None else [COARSE_GRID, DYADIC_GRID]
    for g in grids:
        found = list(_enumerate(space, g))
        if found:
            return found
    return []


def _enumerate(space: FiniteQSpace, grid: Sequence[Fraction]) -> Iterator[dict[int, Fraction]]:
    full = space.full
    family = sorted(space.family, key=lambda s: (bin(s).count("1"), s))
    opens = set(space.opens)
    triples = _additivity_triples(family, full)
    order = {s: k for k, s in enumerate(family)}
    # Each constraint fires once its last set (in assignment order) gets a value.
    additive_at: dict[int, list[tuple[int, int, int]]] = {s: [] for s in family}
    for tr in triples:
        additive_at[max(tr, key=order.__getitem__)].append(tr)
    nested_at: dict[int, list[tuple[int, int]]] = {s: [] for s in family}
    for a, b in itertools.permutations(space.opens, 2):
        if a != b and a & ~b == 0:
            nested_at[max((a, b), key=order.__getitem__)].append((a, b))
    assignment: dict[int, Fraction] = {}

    def consistent(s: int) -> bool:
        for a, b, c in additive_at[s]:
            if assignment[c] != assignment[a] + assignment[b]:
                return False
        for a, b in nested_at[s]:
            if assignment[a] > assignment[b]:
                return False
        return True

    def extend(k: int) -> Iterator[dict[int, Fraction]]:
        if k == len(family):
            yield dict(assignment)
            return
        s = family[k]
        if s == 0:
            choices = (Fraction(0),)
        elif s == full:
            choices = (Fraction(1),)
        else:
            choices = grid
        for v in choices:
            assignment[s] = v
            if consistent(s):
                yield from extend(k + 1)
            del assignment[s]

    yield from extend(0)


def set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def sigma_algebras(m: int) -> Iterator[FiniteQSpace]:
    """All sigma-algebras on ``m`` points, one per partition into atoms."""
    for blocks in set_partitions(range(m)):
        atoms = [to_mask(b) for b in blocks]
        sets = set()
        for r in range(len(atoms) + 1):
            for combo in itertools.combinations(atoms, r):
                sets.add(sum(combo))
        yield FiniteQSpace(m, tuple(sets))
