import numpy as np
import pytest

from quasiprob.expr import parse
from quasiprob.grid import RegionMask, make_domain
from quasiprob.serialize import field_to_csv, field_to_pgm, mask_from_rle, mask_to_pgm, mask_to_rle


def test_rle_small():
    d = make_domain(3)
    bits = np.array([[1, 1, 0], [0, 0, 0], [1, 0, 1]], dtype=bool)
    text = mask_to_rle(RegionMask(d, bits))
    assert text == "2:1 1:0\n3:0\n1:1 1:0 1:1\n"
    assert mask_from_rle(text) == RegionMask(d, bits)


def test_rle_round_trip_level_set():
    d = make_domain(65)
    m = parse("x^3 - y + 0.2*x*y").evaluate(d).superlevel(0.1)
    assert mask_from_rle(mask_to_rle(m), d) == m


@pytest.mark.parametrize("text", ["2:1 2:0\n3:0\n3:1\n", "3:2\n3:0\n3:0\n", "x\n", "0:1 3:0\n3:0\n3:0\n"])
def test_rle_rejects(text):
    with pytest.raises(ValueError):
        mask_from_rle(text)


def test_rle_domain_mismatch():
    with pytest.raises(ValueError):
        mask_from_rle("3:0\n3:0\n3:0\n", make_domain(5))


def test_pgm_orientation():
    d = make_domain(5)
    m = parse("x").evaluate(d).superlevel(0.5)   # right-hand column
    raw = mask_to_pgm(m)
    header = b"P5\n5 5\n255\n"
    assert raw.startswith(header)
    img = np.frombuffer(raw[len(header):], dtype=np.uint8).reshape(5, 5)
    assert np.all(img[:, -1] == 255) and np.all(img[:, :-1] == 0)
    top = parse("y").evaluate(d).superlevel(0.5)
    img = np.frombuffer(mask_to_pgm(top)[len(header):], dtype=np.uint8).reshape(5, 5)
    assert np.all(img[0] == 255) and np.all(img[1:] == 0)


def test_field_dumps():
    d = make_domain(5)
    f = parse("x + y").evaluate(d)
    raw = field_to_pgm(f)
    img = np.frombuffer(raw[len(b"P5\n5 5\n255\n"):], dtype=np.uint8).reshape(5, 5)
    assert img.max() == 255 and img.min() == 0 and img[0, -1] == 255
    rows = [list(map(float, line.split(","))) for line in field_to_csv(f).strip().splitlines()]
    np.testing.assert_array_equal(np.array(rows), f.values)
    flat = field_to_pgm(parse("1").evaluate(d))
    assert set(flat[len(b"P5\n5 5\n255\n"):]) == {0}
