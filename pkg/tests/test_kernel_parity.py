"""Compiled extension vs pure-Python kernel: identical results on a grid.

The two implementations share the same double-double algorithms; any drift
here means a port bug or a compiler breaking the error-free transforms."""

import math

import pytest

from fsorf.kernels import IMPL
from fsorf.kernels import _series_py as pure

compiled = pytest.importorskip("fsorf.kernels._series_cy")

ALPHA, BETA, XI = 2.902, 2.51, 6.7
X2 = XI * XI

CASES = [
    ((), (0.0,), 1, 0),
    ((), (0.196, -0.196), 2, 0),
    ((X2 + 1.0,), (X2, ALPHA, BETA), 3, 0),
    ((1.0, X2 + 1.0), (X2, ALPHA, BETA, 0.0), 3, 1),
    ((0.5, 1.0, X2 + 1.0), (X2, ALPHA, BETA, 0.0), 3, 2),
    ((0.0, 1.0), (3.0, 1e-6, 2e-6), 3, 1),
    ((-4.0, 1.0, X2 + 1.0), (X2, ALPHA, BETA, 0.0), 3, 2),
]


def test_active_implementation_is_reported():
    assert IMPL in ("compiled", "python")


@pytest.mark.parametrize("a,b,m,n", CASES)
@pytest.mark.parametrize("x", [1e-4, 0.03, 0.9, 7.0, 33.0, 140.0])
def test_meijer_ladders_bit_identical(a, b, m, n, x):
    r1 = pure.meijer_slater(a, b, m, n, x, 0.0, False, 1e-10, 100_000)
    r2 = compiled.meijer_slater(a, b, m, n, x, 0.0, False, 1e-10, 100_000)
    assert r1 == r2


@pytest.mark.parametrize("a,b,m,n", CASES[3:5])
@pytest.mark.parametrize("x", [60.0, 300.0])
def test_asymptotic_mode_bit_identical(a, b, m, n, x):
    fa = tuple(1.0 - v for v in b)
    fb = tuple(1.0 - v for v in a)
    r1 = pure.meijer_slater(fa, fb, n, m, 1.0 / x, 0.0, True, 1e-10, 100_000)
    r2 = compiled.meijer_slater(fa, fb, n, m, 1.0 / x, 0.0, True,
                                1e-10, 100_000)
    assert r1 == r2


@pytest.mark.parametrize("x", [0.392, -0.392, 0.0001, 5.0, 42.38, 163.5,
                               -2.51])
def test_lgamma_bit_identical(x):
    assert pure.dd_lgamma_sign(x) == compiled.dd_lgamma_sign_py(x)


def test_hypergeometric_bit_identical():
    assert pure.hyp2f1_series(1.0, 3.5, 4.5, 0.3, 1e-12, 10 ** 6) == \
        compiled.hyp2f1_series(1.0, 3.5, 4.5, 0.3, 1e-12, 10 ** 6)
    assert pure.hyp1f1_series(1.0, 1.5, 7.7, 1e-12, 10 ** 6) == \
        compiled.hyp1f1_series(1.0, 1.5, 7.7, 1e-12, 10 ** 6)


def test_log_prefactor_scaling_consistent():
    a, b, m, n = CASES[3]
    v0, _, _ = pure.meijer_slater(a, b, m, n, 2.0, 0.0, False, 1e-10, 10 ** 5)
    v1, _, _ = compiled.meijer_slater(a, b, m, n, 2.0, math.log(7.0), False,
                                      1e-10, 10 ** 5)
    assert v1 == pytest.approx(7.0 * v0, rel=1e-13)
