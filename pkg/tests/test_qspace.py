import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from quasiprob.errors import BudgetExceeded
from quasiprob.qspace import (
    FiniteQSpace, MaxMinPL, brute_force_quasi_probabilities, check_observable_algebra, is_measurable,
    load_qspace, qspace_from_doc, set_partitions, sigma_algebras, to_elements, to_mask, validate_qspace,
)

BELL = {1: 1, 2: 2, 3: 5, 4: 15}


def test_bitmask_round_trip():
    assert to_mask([0, 2, 3]) == 0b1101
    assert to_elements(0b1101) == [0, 2, 3]


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_power_set_and_trivial_validate(m):
    assert validate_qspace(FiniteQSpace.power_set(m)).passed
    assert validate_qspace(FiniteQSpace.trivial(m)).passed


def test_missing_union_is_reported():
    space = FiniteQSpace.from_sets(3, [[], [1], [2], [0, 1, 2]])
    rep = validate_qspace(space)
    assert not rep.passed
    assert {"rule": "union", "a": [1], "b": [2], "missing": [1, 2], "passed": False} in rep.cases


def test_missing_empty_is_reported():
    rep = validate_qspace(FiniteQSpace.from_sets(2, [[0], [0, 1]]))
    assert any(c["rule"] == "contains_empty" for c in rep.cases)


def test_space_rejects_out_of_range():
    with pytest.raises(ValueError):
        FiniteQSpace.from_sets(2, [[0, 5]])
    with pytest.raises(ValueError):
        FiniteQSpace(13, (0,))


def test_json_round_trip(tmp_path):
    space = FiniteQSpace.from_sets(3, [[], [0], [0, 1], [0, 1, 2]])
    p = tmp_path / "s.json"
    p.write_text(space.to_json())
    assert load_qspace(p) == space
    assert qspace_from_doc({"opens": [[], [0, 1]]}).m == 2


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_sigma_algebras_count_and_validate(m):
    spaces = list(sigma_algebras(m))
    assert len(spaces) == BELL[m]
    assert len(set(spaces)) == BELL[m]
    for s in spaces:
        assert validate_qspace(s).passed
        assert set(s.opens) == set(s.closeds)


def test_set_partitions_count():
    assert sum(1 for _ in set_partitions(range(5))) == 52


def test_measurability():
    chain = FiniteQSpace.from_sets(3, [[], [0], [0, 1], [0, 1, 2]])
    ok, _ = is_measurable(chain, [0.0, 0.0, 0.0])
    assert ok
    ok, witness = is_measurable(chain, [2.0, 1.0, 0.0])
    # (0.5, inf) -> {0, 1} is open but (-inf, 0.5) -> {2} is not
    assert not ok and witness["preimage"] in ([2], [1], [1, 2])


def _measurable_functions(space, values=(0.0, 1.0, 2.0)):
    for vals in itertools.product(values, repeat=space.m):
        if is_measurable(space, vals)[0]:
            yield vals


OPS = {
    "sum": MaxMinPL.affine([1.0, 1.0]),
    "diff": MaxMinPL.affine([1.0, -1.0], 0.5),
    "min": MaxMinPL([[([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0)]]),
    "max": MaxMinPL([[([1.0, 0.0], 0.0)], [([0.0, 1.0], 0.0)]]),
    "abs_diff": MaxMinPL([[([1.0, -1.0], 0.0)], [([-1.0, 1.0], 0.0)]]),
    "product": lambda a, b: a * b,
}


@pytest.mark.parametrize("m", [2, 3, 4])
def test_observable_algebra_closed_on_sigma_algebras(m):
    for space in sigma_algebras(m):
        fs = list(_measurable_functions(space))
        for f, g in itertools.product(fs, repeat=2):
            for name, phi in OPS.items():
                assert check_observable_algebra(space, [f, g], phi).passed, (space, f, g, name)


@pytest.mark.parametrize("m", [2, 3])
def test_observable_algebra_closed_on_valid_quasi_algebras(m):
    # every family containing empty and full and closed under meet and join
    subsets = range(1, (1 << m) - 1)
    for r in range(len(subsets) + 1):
        for extra in itertools.combinations(subsets, r):
            space = FiniteQSpace(m, (0, (1 << m) - 1) + extra)
            if not validate_qspace(space).passed:
                continue
            fs = list(_measurable_functions(space))
            for f, g in itertools.product(fs, repeat=2):
                for phi in OPS.values():
                    assert check_observable_algebra(space, [f, g], phi).passed


def test_observable_algebra_identity():
    space = FiniteQSpace.power_set(3)
    assert check_observable_algebra(space, [[0.0, 1.0, 2.0]], MaxMinPL.affine([1.0])).passed


def test_broken_space_yields_counterexample():
    # opens {0} and {1} but not their union: the sum of their indicators fails
    space = FiniteQSpace.from_sets(3, [[], [0], [1], [0, 1, 2]])
    f, g = [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]
    rep = check_observable_algebra(space, [f, g], OPS["sum"])
    assert not rep.passed
    comp = [c for c in rep.cases if c["role"] == "composition"][0]
    assert comp["witness"] is not None


def test_trivial_space_single_probability():
    probs = brute_force_quasi_probabilities(FiniteQSpace.trivial(2))
    assert probs == [{0: Fraction(0), 3: Fraction(1)}]


def test_power_set_two_points():
    probs = brute_force_quasi_probabilities(FiniteQSpace.power_set(2))
    point_values = sorted(p[0b01] for p in probs)
    assert point_values == [Fraction(0), Fraction(1, 2), Fraction(1)]
    for p in probs:
        assert p[0b01] + p[0b10] == 1


@pytest.mark.parametrize("m", [2, 3])
def test_enumeration_on_sigma_algebras_is_classical(m):
    grid = [Fraction(k, 2) for k in range(3)]
    for space in sigma_algebras(m):
        atoms = [s for s in space.opens if s and not any(t and t != s and t & ~s == 0 for t in space.opens)]
        probs = brute_force_quasi_probabilities(space, grid)
        classical = set()
        for ws in itertools.product(grid, repeat=len(atoms)):
            if sum(ws) == 1:
                classical.add(tuple(sorted(
                    (s, sum((w for a, w in zip(atoms, ws) if a & s), Fraction(0))) for s in space.family)))
        got = {tuple(sorted(p.items())) for p in probs}
        assert got == classical


def test_enumeration_on_quarter_grid():
    assert brute_force_quasi_probabilities(FiniteQSpace.power_set(1)) == [{0: Fraction(0), 1: Fraction(1)}]
    quarters = brute_force_quasi_probabilities(FiniteQSpace.power_set(2), [Fraction(k, 4) for k in range(5)])
    assert sorted(p[0b01] for p in quarters) == [Fraction(k, 4) for k in range(5)]


def test_quasi_but_not_additive_space():
    # a chain of opens is not a sigma-algebra; its probabilities are monotone set functions
    space = FiniteQSpace.from_sets(3, [[], [0], [0, 1], [0, 1, 2]])
    probs = brute_force_quasi_probabilities(space)
    assert probs
    for p in probs:
        assert p[0b001] <= p[0b011] <= p[0b111] == 1
        assert p[0b110] == 1 - p[0b001]


def test_budget():
    with pytest.raises(BudgetExceeded):
        brute_force_quasi_probabilities(FiniteQSpace.power_set(12))
    with pytest.raises(BudgetExceeded):
        brute_force_quasi_probabilities(FiniteQSpace.power_set(5))
