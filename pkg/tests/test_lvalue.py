import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import pytest

from conftest import forms_for
from waldspurger.brandt import eigenvalue_series
from waldspurger.exact import kronecker
from waldspurger.lvalue import (
    C_N,
    CoefficientError,
    central_value,
    coefficients,
    coefficients_needed,
    constants,
    detect_sign,
    local_coefficient,
    permitted,
)
from waldspurger.theta import DiscPair, fundamental_pair

mpmath.mp.dps = 30


@lru_cache(maxsize=None)
def level_11(nmax: int = 1200):
    (rec,) = forms_for(11, 0)
    return coefficients(rec, nmax, eigenvalue_series(rec, nmax))


def test_constants():
    assert C_N(11) == 12
    assert C_N(27) == 36
    assert C_N(33) == 48
    assert constants(27, 0, DiscPair(27, Fraction(1, 3)))["c_D"] == Fraction(1, 3)
    assert constants(11, 0, DiscPair(3, 1))["c_D"] == 1
    assert constants(11, 2, DiscPair(3, 1))["c_k"] == 8


def test_local_coefficients():
    assert local_coefficient(11, 1, 0, -1) == 1
    assert local_coefficient(11, 1, 2, 1) == -121
    assert local_coefficient(3, 3, 0, -1) == 0


def test_coefficients_multiplicative():
    g = level_11()
    a = g.a
    assert a[1] == 1 and a[11] == 1
    assert [a[p] for p in (2, 3, 5, 7, 13)] == [-2, -1, 1, -2, 4]
    for m in range(1, 40):
        for n in range(1, 40):
            if m * n <= g.nmax and math.gcd(m, n) == 1:
                assert a[m * n] == a[m] * a[n]
    for p in (2, 3, 5):
        assert a[p * p] == a[p] ** 2 - p
    assert g.sign == 1


def test_untwisted_central_value():
    g = level_11()
    cv = central_value(g, None, 1e-12)
    assert cv.sign == 1
    assert abs(cv.value - mpmath.mpf("0.25384186085591068433775892335")) < 1e-11
    assert cv.error <= 1e-12
    assert cv.residual <= 1e-12


def test_afe_stability():
    g = level_11()
    for d in (None, -3, -15):
        lo = central_value(g, d, 1e-7)
        hi = central_value(g, d, 1e-12)
        assert abs(lo.value - hi.value) <= lo.error + hi.error


def test_sign_detection_and_twist_signs():
    g = level_11()
    assert detect_sign(g) == g.sign
    for D in range(3, 60):
        pr = fundamental_pair(D)
        if pr.a != 1 or pr.d % 2 == 0 or pr.d % 11 == 0:
            continue
        w = g.sign * kronecker(pr.d, -11)
        assert detect_sign(g, pr.d) == w
        if permitted(D, {11: -1}, 11):
            assert w * g.sign == 1
            assert central_value(g, pr.d, 1e-9).value >= -1e-9


def test_permitted():
    assert permitted(3, {11: -1}, 11)
    assert not permitted(7, {11: -1}, 11)
    assert permitted(12, {11: -1}, 11)
    assert not permitted(4, {11: -1}, 11)
    assert permitted(7, {3: -1}, 27) and not permitted(3, {3: -1}, 27)


def test_insufficient_coefficients():
    (rec,) = forms_for(11, 0)
    g = coefficients(rec, 20, eigenvalue_series(rec, 20))
    with pytest.raises(CoefficientError):
        central_value(g, -23, 1e-9)
    assert coefficients_needed(2, 11 * 23 * 23, 1e-9) > 20
