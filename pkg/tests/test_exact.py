import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from waldspurger.exact import (
    Lattice,
    TernaryForm,
    class_number_imag_quadratic,
    det,
    enumerate_value,
    factor,
    fundamental_discriminant,
    hnf,
    inverse,
    is_fundamental_discriminant,
    jacobi,
    kernel_mod,
    kronecker,
    lll_gram,
    mat_mul,
    nullspace,
    primes_up_to,
    rref,
    short_vectors,
    solve,
)


def dirichlet_class_number(d: int) -> int:
    """h(d) = -(1/|d|) sum_{0<r<|d|} r chi_d(r), with units for d = -3, -4."""
    D = -d
    s = sum(r * kronecker(d, r) for r in range(1, D))
    w = {3: 6, 4: 4}.get(D, 2)
    h = Fraction(-w * s, 2 * D)
    assert h.denominator == 1
    return int(h)


def test_hnf_examples():
    assert hnf([[2, 4], [3, 6]]) == [[1, 2]]
    assert hnf([[4, 6], [6, 4]]) == [[2, 8], [0, 10]]
    assert hnf([[0, 0], [0, 5]]) == [[0, 5]]
    assert hnf([[3, 1, 0], [0, 0, 2], [1, 0, 0]]) == [[1, 0, 0], [0, 1, 0], [0, 0, 2]]


def test_hnf_is_canonical_under_unimodular_change():
    rng = random.Random(1)
    for _ in range(30):
        M = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
        U = [[1, rng.randint(-3, 3), 0, 0], [0, 1, 0, 0], [0, rng.randint(-3, 3), 1, 0], [rng.randint(-2, 2), 0, 0, 1]]
        assert hnf(M) == hnf(mat_mul(U, M))


def test_kernel_mod():
    M = [[1, 2], [3, 4], [5, 6]]
    K = kernel_mod(M, 7)
    assert len(K) == 3
    for row in K:
        assert all(sum(c * M[i][j] for i, c in enumerate(row)) % 7 == 0 for j in range(2))


def test_rational_linear_algebra():
    M = [[Fraction(2), Fraction(1), Fraction(0)], [Fraction(1), Fraction(3), Fraction(1)], [Fraction(0), Fraction(1), Fraction(4)]]
    Mi = inverse(M)
    assert mat_mul(M, Mi) == [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert det(M) == 18
    x = solve(M, [Fraction(1), Fraction(2), Fraction(3)])
    assert [sum(a * b for a, b in zip(row, x)) for row in M] == [1, 2, 3]
    S = [[Fraction(1), Fraction(2), Fraction(3)], [Fraction(2), Fraction(4), Fraction(6)]]
    ns = nullspace(S, 3)
    assert len(ns) == 2
    R, piv = rref(S)
    assert piv == [0]


def test_lattice_operations():
    L = Lattice([[2, 0], [0, 3]])
    M = Lattice([[4, 0], [0, 1]])
    I = L.intersection(M)
    assert I == Lattice([[4, 0], [0, 3]])
    assert L.covolume() == 6
    assert L.contains([2, 3]) and not L.contains([1, 3])
    assert L.dual() == Lattice([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])


def test_enumerate_value_matches_brute_force():
    form = TernaryForm([[2, 1, 0], [1, 3, 1], [0, 1, 5]])
    for target in range(0, 25):
        got = set(enumerate_value(form, None, target))
        want = {v for v in itertools.product(range(-6, 7), repeat=3) if form(v) == target}
        assert got == want


def test_short_vectors_matches_brute_force():
    G = [[4, 1, 0, 1], [1, 6, 2, 0], [0, 2, 6, 1], [1, 0, 1, 8]]
    coords, norms = short_vectors(G, 30)
    got = sorted(map(tuple, coords.tolist()))
    Gn = np.array(G)
    want = sorted(v for v in itertools.product(range(-4, 5), repeat=4) if np.array(v) @ Gn @ np.array(v) <= 30)
    assert got == want
    assert all(int(np.array(c) @ Gn @ np.array(c)) == n for c, n in zip(coords.tolist(), norms.tolist()))


def test_lll_preserves_lattice():
    G = [[101, 37, 5], [37, 15, 2], [5, 2, 3]]
    T, H = lll_gram(G)
    assert abs(det(T)) == 1
    TG = mat_mul(mat_mul(T, G), [list(r) for r in zip(*T)])
    assert TG == [[Fraction(x) for x in r] for r in H]
    assert H[0][0] <= 101


def test_kronecker_multiplicative_and_periodic():
    for d in (-3, -4, -7, -8, -11, -15, -20, -23, 5, 8, 12, 13):
        for m in range(1, 40):
            for n in range(1, 40):
                assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)
            assert kronecker(d, m) == kronecker(d, m + abs(d))


def test_kronecker_matches_jacobi_and_negative_argument():
    for d in range(-50, 50):
        for n in range(1, 60, 2):
            assert kronecker(d, n) == jacobi(d, n)
    assert kronecker(-7, -1) == -1
    assert kronecker(5, -1) == 1
    assert kronecker(-3, -11) == -kronecker(-3, 11)


def test_class_numbers_match_dirichlet_oracle():
    for D in range(3, 1001):
        d = -D
        if is_fundamental_discriminant(d):
            assert class_number_imag_quadratic(d) == dirichlet_class_number(d), d


def test_known_class_numbers():
    assert [class_number_imag_quadratic(d) for d in (-3, -4, -7, -8, -15, -20, -23, -163)] == [1, 1, 1, 1, 2, 2, 3, 1]
    with pytest.raises(ValueError):
        class_number_imag_quadratic(-12)


def test_fundamental_discriminant_split():
    assert fundamental_discriminant(-12) == (-3, 2)
    assert fundamental_discriminant(-44) == (-11, 2)
    assert fundamental_discriminant(-16) == (-4, 2)
    assert fundamental_discriminant(-99) == (-11, 3)


def test_factor_and_primes():
    assert factor(360) == {2: 3, 3: 2, 5: 1}
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    for n in range(2, 500):
        assert math.prod(p**e for p, e in factor(n).items()) == n
