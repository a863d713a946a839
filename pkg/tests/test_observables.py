import numpy as np
import pytest

from quasiprob.corpus import random_polynomial, random_pwl, staircase_pairs, urysohn_inputs
from quasiprob.errors import CommonZero, ExpressionError, NotDominated, SpacingTooCoarse
from quasiprob.expr import parse
from quasiprob.grid import Adjacency, boundary_ring, label_components, make_domain
from quasiprob.observables import (
    Add, Const, Max, Min, Mul, PiecewiseLinear, Power, ScalarField, X1, X2, evaluate, pwl,
    regularized_sequence, staircase, sublevel_closed, superlevel, urysohn,
)


def test_const_field():
    f = evaluate(Const(1.0), make_domain(5))
    assert f.min == f.max == 1.0


def test_weighted_squares_center_and_corners():
    obs = Add(Mul(Power(X1, 2), Const(2.0)), Mul(Power(X2, 2), Const(3.0)))
    d = make_domain(3)
    f = evaluate(obs, d)
    assert f.values[1, 1] == 0.0
    # corner cell centers sit at (+-2/3, +-2/3); cell centers never reach the corner point itself
    np.testing.assert_allclose(f.values[[0, 0, 2, 2], [0, 2, 0, 2]], 5 * (2 / 3) ** 2)
    assert f.max == pytest.approx(5 * (2 / 3) ** 2)


def test_min_of_constants():
    f = evaluate(Min(Const(2.0), Const(3.0)), make_domain(5))
    assert f.min == f.max == 2.0


def test_piecewise_linear_validation():
    with pytest.raises(ExpressionError):
        PiecewiseLinear([0.0], [1.0])
    with pytest.raises(ExpressionError):
        PiecewiseLinear([1.0, 0.0], [0.0, 1.0])
    phi = PiecewiseLinear([0, 1, 2], [0, 2, 1])
    assert phi(-5) == 0 and phi(10) == 1 and phi(0.5) == 1.0
    assert phi.lipschitz() == 2.0


def test_algebra_closure_random_trees(rng):
    d = make_domain(65)
    for _ in range(50):
        a, b = random_polynomial(rng), random_polynomial(rng)
        fa, fb = evaluate(a, d), evaluate(b, d)
        s = fa + fb
        phi = random_pwl(rng, s.min - 0.1, s.max + 0.1)
        got = evaluate(pwl(phi, a + b), d).values
        want = phi(fa.values + fb.values)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_superlevel_trivial_cases():
    f = parse("x*y").evaluate(make_domain(9))
    assert superlevel(f, f.min - 1).is_full()
    assert superlevel(f, f.max).is_empty()
    assert sublevel_closed(f, f.max).is_full()
    assert sublevel_closed(f, f.min - 1).is_empty()


def test_superlevel_nesting(rng):
    d = make_domain(65)
    for _ in range(100):
        f = evaluate(random_polynomial(rng), d)
        s, t = sorted(rng.uniform(f.min, f.max, size=2))
        assert superlevel(f, t).issubset(superlevel(f, s))
        assert superlevel(f, t) == sublevel_closed(f, t).complement()


def test_corners_of_disk_complement(d513):
    f = parse("x^2 + y^2").evaluate(d513)
    lab = label_components(superlevel(f, 1.5), Adjacency.EIGHT)
    assert lab.count == 4
    assert not lab.contains_marker.any()
    assert not lab.contains_full_ring.any()


def test_closed_ellipse_stays_inside(d513):
    f = parse("2*x^2 + 3*y^2").evaluate(d513)
    m = sublevel_closed(f, 1.0)
    lab = label_components(m, Adjacency.EIGHT)
    assert lab.count == 1 and lab.contains_marker[1]
    # the boundary minimum of the field is 2 * (1 - 1/n)^2 > 1
    assert not lab.touches_ring[1]
    assert label_components(sublevel_closed(f, 2.0), Adjacency.EIGHT).touches_ring[1]


def test_urysohn_examples():
    d = make_domain(33)
    x = evaluate(urysohn(parse("x^2 + y^2"), Const(1.0), d), d)
    c = d.center_index
    assert x.values[c] == 1.0
    assert np.sum(x.values == 1.0) == 1
    half = evaluate(urysohn(Const(1.0), Const(1.0), d), d)
    assert half.min == half.max == 0.5
    with pytest.raises(CommonZero):
        urysohn(parse("x^2"), parse("x^2"), d)
    with pytest.raises(CommonZero):
        urysohn(parse("x"), Const(1.0), d)


def test_urysohn_center_and_ring():
    d = make_domain(33)
    r = 1 - 1 / d.n
    y = parse("x^2 + y^2")
    z = Max(Const(r) - Max(abs(X1), abs(X2)), Const(0.0))
    xt = evaluate(urysohn(y, z, d), d).values
    ring = boundary_ring(d).bits
    center = np.zeros(d.shape, bool)
    center[d.center_index] = True
    assert np.all(xt[center] == 1.0)
    assert np.all(xt[ring] == 0.0)
    between = ~ring & ~center
    assert np.all((xt[between] > 0) & (xt[between] < 1))


@pytest.mark.parametrize("separated", [False, True])
def test_urysohn_sandwich(rng, separated):
    d = make_domain(65)
    for y_obs, z_obs in urysohn_inputs(rng, d, 10):
        xt = evaluate(urysohn(y_obs, z_obs, d, separated=separated), d).values
        yv, zv = evaluate(y_obs, d).values, evaluate(z_obs, d).values
        assert np.all(xt[yv == 0] == 1.0)
        assert np.all(xt[zv == 0] == 0.0)
        assert np.all((xt >= 0) & (xt <= 1))
        lower = (yv == 0).astype(float)
        upper = (zv > 0).astype(float)
        assert np.all(lower <= xt) and np.all(xt <= upper)


def _staircase_invariants(x, y, sc, tol=1e-9):
    res = sc.residuals(x, y)
    assert res["sum_x"] <= tol and res["sum_y"] <= tol and res["domination"] <= tol
    assert len(sc.parts_x) == len(sc.parts_y) == sc.n
    assert np.all(np.diff(sc.betas) < sc.delta)
    for px, py in zip(sc.parts_x, sc.parts_y):
        assert np.all(px.values <= py.values + sc.delta / sc.n + tol)


def test_staircase_equal_zero_inputs():
    d = make_domain(9)
    z = ScalarField.constant(d, 0.0)
    sc = staircase(z, z, 2, 1.0)
    _staircase_invariants(z, z, sc)


def test_staircase_zero_one():
    d = make_domain(9)
    x, y = ScalarField.constant(d, 0.0), ScalarField.constant(d, 1.0)
    sc = staircase(x, y, 4, 0.5)
    _staircase_invariants(x, y, sc)
    assert sc.betas[-1] == pytest.approx(1.5)


def test_staircase_errors():
    d = make_domain(9)
    x, y = ScalarField.constant(d, 1.0), ScalarField.constant(d, 0.0)
    with pytest.raises(NotDominated):
        staircase(x, y, 4, 0.5)
    with pytest.raises(SpacingTooCoarse):
        staircase(y, x, 2, 0.5)


@pytest.mark.parametrize("n", [4, 8, 16])
@pytest.mark.parametrize("delta", [0.5, 0.1])
def test_staircase_random(rng, n, delta):
    d = make_domain(65)
    for x, y in staircase_pairs(rng, d, 20, n, delta):
        _staircase_invariants(x, y, staircase(x, y, n, delta))


def test_regularized_sequence_examples():
    d = make_domain(33)
    ones = ScalarField.constant(d, 1.0)
    assert all(m.is_full() for m in regularized_sequence(ones, 0.0, 5)[1:])
    # U_1 = {g > 1} is empty for g = 1; every later index sees the whole square
    assert regularized_sequence(ones, 0.0, 5)[0].is_empty()
    zeros = ScalarField.constant(d, 0.0)
    assert all(m.is_empty() for m in regularized_sequence(zeros, 0.0, 5))


def test_regularized_sequence_grows_on_disk_complement():
    d = make_domain(65)
    f = parse("x^2 + y^2").evaluate(d)
    seq = regularized_sequence(f, 0.0, 8)
    for a, b in zip(seq, seq[1:]):
        assert a.issubset(b) and a != b
    u = superlevel(f, 0.0)
    assert seq[-1].issubset(u)
    # what is still missing at i=8 is exactly the band 0 < g <= 1/8
    assert (u - seq[-1]) == (u & sublevel_closed(f, 1 / 8))
    # an index past 1/(smallest positive value) recovers U exactly on the grid
    gmin = float(f.values[f.values > 0].min())
    assert regularized_sequence(f, 0.0, indices=[int(np.ceil(1 / gmin)) + 1])[0] == u
    with pytest.raises(ValueError):
        regularized_sequence(f, 0.0, 0)
