import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dsrsim.corpus import checkerboard
from dsrsim.fau import (
    build_kernel,
    coefficients_csv,
    dct2d_naive,
    dct2d_rowcol,
    fau_pass,
    lane_schedule,
    max_coefficient,
)

# |c[15][15]| of the 0/255 1-pixel checkerboard, from dct2d_naive
CHECKER_MAXC = 1658.8844734095867

tiles = arrays(np.float64, (16, 16), elements=st.floats(0, 255, allow_nan=False))


def a(p):
    return 0.25 if p == 0 else math.sqrt(2 / 16)


def test_kernel_entries():
    k = build_kernel(16).k
    assert np.all(k[0] == 0.25)
    assert k[1, 0] == pytest.approx(math.sqrt(2 / 16) * math.cos(math.pi / 32), abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 8, 16])
def test_kernel_orthonormal(n):
    k = build_kernel(n).k
    assert np.max(np.abs(k @ k.T - np.eye(n))) <= 1e-12


def test_kernel_rejects_zero():
    with pytest.raises(ValueError):
        build_kernel(0)


def test_constant_tile():
    c, ops = dct2d_rowcol(np.ones((16, 16)))
    assert c[0, 0] == pytest.approx(16.0, abs=1e-9)
    rest = np.abs(c).copy()
    rest[0, 0] = 0
    assert rest.max() <= 1e-9
    assert ops.multiply_accumulates == 8192 and ops.passes == 2
    assert (ops.lanes, ops.rows_per_lane) == (4, 4)


def test_zero_tile():
    c, _ = dct2d_rowcol(np.zeros((16, 16)))
    assert not c.any()


def test_buffer_after_first_pass_holds_transposed_row_transform(rng):
    x = rng.uniform(0, 255, (16, 16))
    kernel = build_kernel(16)
    buf = np.empty((16, 16))
    fau_pass(x, kernel, buf)
    np.testing.assert_allclose(buf, (kernel.k @ x).T, atol=1e-10)
    out = np.empty((16, 16))
    fau_pass(buf, kernel, out)
    np.testing.assert_allclose(out, kernel.k @ x @ kernel.k.T, atol=1e-10)


def test_lane_schedule():
    sched = lane_schedule(16, 4)
    assert [list(r) for r in sched] == [list(range(i, i + 4)) for i in (0, 4, 8, 12)]


def test_rowcol_matches_naive_1000_tiles(rng):
    worst = 0.0
    for _ in range(1000):
        x = rng.uniform(0, 255, (16, 16))
        worst = max(worst, np.max(np.abs(dct2d_rowcol(x)[0] - dct2d_naive(x))))
    assert worst <= 1e-9


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        dct2d_rowcol(np.zeros((8, 16)))
    with pytest.raises(ValueError):
        dct2d_naive(np.zeros((16, 15)))


@pytest.mark.parametrize("c", [1.0, 7.5, 255.0])
def test_naive_dc(c):
    out = dct2d_naive(np.full((16, 16), c))
    assert out[0, 0] == pytest.approx(16 * c, abs=1e-9)


def test_naive_impulse():
    x = np.zeros((16, 16))
    x[0, 0] = 1.0
    out = dct2d_naive(x)
    for p in range(16):
        for q in range(16):
            want = a(p) * a(q) * math.cos(math.pi * p / 32) * math.cos(math.pi * q / 32)
            assert out[p, q] == pytest.approx(want, abs=1e-12)


def test_naive_horizontal_cosine():
    m, n = np.indices((16, 16))
    x = np.cos((2 * n + 1) * math.pi * 3 / 32)
    out = np.abs(dct2d_naive(x))
    assert np.unravel_index(out.argmax(), out.shape) == (0, 3)
    assert out[0, 3] == pytest.approx(np.sqrt(np.sum(x**2)), rel=1e-12)


def test_max_coefficient_constant():
    c, _ = dct2d_rowcol(np.full((16, 16), 9.0))
    assert max_coefficient(c, 1) <= 1e-9
    assert max_coefficient(c, 0) == pytest.approx(144.0, abs=1e-9)


def test_max_coefficient_checkerboard():
    x = checkerboard(16, 16).astype(float)
    naive = dct2d_naive(x)
    brute = max(abs(naive[p, q]) for p in range(16) for q in range(16) if p + q >= 2)
    assert brute == pytest.approx(abs(naive[15, 15]), abs=1e-9)
    assert brute == pytest.approx(CHECKER_MAXC, abs=1e-9)
    c, _ = dct2d_rowcol(x)
    assert max_coefficient(c, 2) == pytest.approx(brute, abs=1e-9)


def test_max_coefficient_bounds():
    c = np.ones((16, 16))
    assert max_coefficient(c, 31) == 0.0
    for d in (-1, 32):
        with pytest.raises(ValueError):
            max_coefficient(c, d)


def test_coefficients_csv_shape():
    text = coefficients_csv(np.arange(256.0).reshape(16, 16))
    lines = text.splitlines()
    assert len(lines) == 16 and all(len(l.split(",")) == 16 for l in lines)
    assert float(lines[1].split(",")[0]) == 16.0


@settings(max_examples=50, deadline=None)
@given(tiles)
def test_oracle_equivalence(x):
    assert np.max(np.abs(dct2d_rowcol(x)[0] - dct2d_naive(x))) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(tiles)
def test_parseval_both_paths(x):
    energy = np.sum(x**2)
    for c in (dct2d_rowcol(x)[0], dct2d_naive(x)):
        assert abs(np.sum(c**2) - energy) <= 1e-6 * max(energy, 1e-300)


@settings(max_examples=50, deadline=None)
@given(tiles, tiles, st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(x, y, s, t):
    lhs = dct2d_rowcol(s * x + t * y)[0]
    rhs = s * dct2d_rowcol(x)[0] + t * dct2d_rowcol(y)[0]
    assert np.max(np.abs(lhs - rhs)) <= 1e-8 * max(1.0, np.max(np.abs(rhs)) / 1e3)


@settings(max_examples=50, deadline=None)
@given(tiles, st.integers(0, 31), st.integers(0, 31))
def test_maxc_monotone_in_d(x, d1, d2):
    d1, d2 = sorted((d1, d2))
    c = dct2d_rowcol(x)[0]
    assert max_coefficient(c, d1) >= max_coefficient(c, d2)


@settings(max_examples=50, deadline=None)
@given(tiles, st.floats(0, 4), st.integers(0, 31))
def test_maxc_scale_equivariant(x, s, d):
    base = max_coefficient(dct2d_rowcol(x)[0], d)
    scaled = max_coefficient(dct2d_rowcol(s * x)[0], d)
    assert scaled == pytest.approx(s * base, abs=1e-9, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(tiles)
def test_op_count_fixed(x):
    assert dct2d_rowcol(x)[1].multiply_accumulates == 2 * 16**3
