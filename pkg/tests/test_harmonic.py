import random
from fractions import Fraction

import pytest

from waldspurger.harmonic import (
    HarmonicSpace,
    act,
    c_k,
    gegenbauer_vector,
    harmonic_basis,
    inner_product,
    monomials,
    r_k,
    s_k,
)
from waldspurger.quaternion import QuatAlgebra

A = QuatAlgebra(-1, -11)


def rand_quat(rng, lo=-4, hi=4):
    while True:
        q = tuple(Fraction(rng.randint(lo, hi)) for _ in range(4))
        if any(q):
            return q


def rand_vec(rng, dim):
    return [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(dim)]


def test_constants():
    assert s_k(0) == 1 and s_k(1) == 1
    assert s_k(2) == Fraction(2, 3)
    assert s_k(3) == Fraction(4, 15)
    assert s_k(4) == Fraction(17, 210)
    assert r_k(0) == 2
    assert c_k(2) == 8


@pytest.mark.parametrize("k", range(5))
def test_dimension_and_harmonicity(k):
    V = harmonic_basis(A, k)
    assert V.dim == 2 * k + 1
    assert len(V.basis) == 2 * k + 1
    assert len(monomials(k)) == (k + 1) * (k + 2) // 2
    # every basis polynomial is killed by the weighted Laplacian
    if k >= 2:
        for row in V.basis:
            lap = {}
            for c, m in zip(row, V.monomials):
                for v in range(3):
                    if m[v] >= 2:
                        t = list(m)
                        t[v] -= 2
                        lap[tuple(t)] = lap.get(tuple(t), 0) + c * m[v] * (m[v] - 1) / V.s[v]
            assert all(x == 0 for x in lap.values())


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_unitarity_random(k):
    rng = random.Random(100 + k)
    V = harmonic_basis(A, k)
    for _ in range(25):
        g = rand_quat(rng)
        P, R = rand_vec(rng, V.dim), rand_vec(rng, V.dim)
        assert V.inner(V.act(g, P), V.act(g, R)) == V.inner(P, R)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_right_action_law(k):
    rng = random.Random(7)
    V = harmonic_basis(A, k)
    for _ in range(10):
        g, h = rand_quat(rng), rand_quat(rng)
        P = rand_vec(rng, V.dim)
        assert V.act(A.mul(g, h), P) == V.act(h, V.act(g, P))
        # evaluation form of the law
        w = (0,) + tuple(rng.randint(-3, 3) for _ in range(3))
        conj = A.mul(A.mul(g, tuple(map(Fraction, w))), A.inv(g))
        assert V.evaluate(V.act(g, P), w[1:]) == V.evaluate(P, conj[1:])


@pytest.mark.parametrize("k", [0, 2, 4])
def test_gegenbauer_norm(k):
    rng = random.Random(20 + k)
    V = harmonic_basis(A, k)
    for _ in range(20):
        w = (Fraction(0),) + tuple(Fraction(rng.randint(-4, 4)) for _ in range(3))
        if not any(w):
            continue
        D = -A.disc(w)
        PD = V.gegenbauer_vector(w)
        assert V.inner(PD, PD) == D**k * s_k(k)
        # sign of omega does not matter for even k
        assert V.gegenbauer_vector(tuple(-x for x in w)) == (PD if k % 2 == 0 else [-x for x in PD])


def test_gegenbauer_reproduces_evaluation():
    rng = random.Random(3)
    V = harmonic_basis(A, 3)
    for _ in range(10):
        w = (Fraction(0),) + tuple(Fraction(rng.randint(-3, 3)) for _ in range(3))
        P = rand_vec(rng, V.dim)
        assert V.inner(P, V.gegenbauer_vector(w)) == V.evaluate(P, w[1:])


def test_gegenbauer_equivariance():
    rng = random.Random(11)
    V = harmonic_basis(A, 2)
    for _ in range(10):
        g = rand_quat(rng)
        w = (Fraction(0), Fraction(1), Fraction(2), Fraction(-1))
        gw = A.mul(A.mul(A.inv(g), w), g)
        # P_omega . g reproduces evaluation at g^{-1} omega g
        assert V.act(g, V.gegenbauer_vector(w)) == V.gegenbauer_vector(gw)


def test_wrappers():
    V = harmonic_basis(A, 2)
    w = (0, 1, 0, 0)
    P = gegenbauer_vector(V, w)
    g = (1, 1, 0, 0)
    assert inner_product(act(g, P), act(g, P)) == inner_product(P, P)
    assert P(w[1:]) == V.evaluate(P.coords, w[1:])
    with pytest.raises(ValueError):
        HarmonicSpace(A, -1)
