import random
from fractions import Fraction

import pytest

from conftest import classes_for
from waldspurger.exact import Lattice, factor, primes_up_to
from waldspurger.quaternion import (
    MassMismatch,
    OrderError,
    QuatAlgebra,
    algebra_ramified_at,
    bil_group,
    build_order,
    cache_key,
    connecting_elements,
    eichler_invariant,
    hilbert_symbol,
    lattice_norm,
    lattice_product,
    load_class_set,
    mass,
    maximal_order,
    normalizer_generators,
    primitive_scaling,
    save_class_set,
    two_sided_ideal,
)


def test_hilbert_reciprocity():
    for a in range(-12, 13):
        for b in range(-12, 13):
            if not a or not b:
                continue
            total = -1 if a < 0 and b < 0 else 1
            for p in primes_up_to(30):
                total *= hilbert_symbol(a, b, p)
            assert total == 1, (a, b)


def test_algebra_search_order():
    assert algebra_ramified_at([2]) == QuatAlgebra(-1, -1)
    assert algebra_ramified_at([3]) == QuatAlgebra(-1, -3)
    assert algebra_ramified_at([11]) == QuatAlgebra(-1, -11)
    with pytest.raises(ValueError):
        algebra_ramified_at([2, 3])


def test_quaternion_arithmetic():
    A = QuatAlgebra(-1, -11)
    rng = random.Random(5)
    for _ in range(50):
        x = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(4))
        y = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(4))
        assert A.nrd(A.mul(x, y)) == A.nrd(x) * A.nrd(y)
        assert A.conj(A.mul(x, y)) == A.mul(A.conj(y), A.conj(x))
        if any(x):
            assert A.mul(x, A.inv(x)) == (1, 0, 0, 0)


@pytest.mark.parametrize("N", [2, 3, 11])
def test_maximal_order(N):
    O = maximal_order(algebra_ramified_at([N]))
    assert O.is_closed()
    assert O.discriminant() == N


@pytest.mark.parametrize(
    "N, weights, m",
    [(2, [12], Fraction(1, 12)), (11, [2, 3], Fraction(5, 6)), (33, [1, 1, 1, 3], Fraction(10, 3)), (27, [2, 1], Fraction(3, 2)), (14, [3, 3], Fraction(2, 3))],
)
def test_class_sets_and_mass(N, weights, m):
    C = classes_for(N)
    assert sorted(C.weights) == sorted(weights)
    assert C.mass == m
    assert sum(Fraction(1, w) for w in C.weights) == mass(C.order)


def test_order_local_types():
    R33 = classes_for(33).order
    assert R33.discriminant() == 33
    assert eichler_invariant(R33, 3) == 1
    assert eichler_invariant(R33, 11) == -1
    R27 = classes_for(27).order
    assert R27.discriminant() == 27
    assert eichler_invariant(R27, 3) == -1
    assert R27.local[3]["type"] == "special" and R27.local[3]["t"] == 1


def test_build_order_rejects_bad_signs():
    A = algebra_ramified_at([11])
    with pytest.raises(OrderError):
        build_order(A, 11, {11: 1})
    with pytest.raises(OrderError):
        build_order(A, 33, {3: -1, 11: -1})


def test_ideal_norms_and_connecting_elements():
    C = classes_for(11)
    A = C.algebra
    for I in C.ideals:
        assert lattice_product(A, C.order.lattice, I) == I  # left R-ideal
    for x, I in enumerate(C.ideals):
        for y, J in enumerate(C.ideals):
            for m in (1, 2, 3):
                target = m * lattice_norm(A, J) / lattice_norm(A, I)
                for g in connecting_elements(A, I, J, m):
                    assert A.nrd(g) == target
                    assert J.contains_lattice(lattice_product(A, I, Lattice([g])))
    # unit groups: weights count elements of norm 1 up to sign
    assert [len(u) for u in C.units] == C.weights


@pytest.mark.parametrize("N", [11, 33, 27, 14])
def test_two_sided_ideals(N):
    C = classes_for(N)
    R = C.order
    A = R.algebra
    fac = factor(N)
    for p, v in fac.items():
        J = two_sided_ideal(R, p)
        assert lattice_norm(A, J) == p**v
        assert lattice_product(A, R.lattice, J) == J
        assert lattice_product(A, J, R.lattice) == J
        assert primitive_scaling(lattice_product(A, J, J)) == primitive_scaling(R.lattice)
    assert len(bil_group(R)) == 2 ** len(fac)
    for p, al in normalizer_generators(C).items():
        assert sorted(al.perm) == list(range(len(C)))


def test_class_cache_roundtrip(tmp_path):
    C = classes_for(33)
    eps = {3: 1, 11: -1}
    path = tmp_path / cache_key(C.algebra, 33, eps)
    save_class_set(C, path, eps)
    D = load_class_set(path, C.order)
    assert D.ideals == C.ideals and D.weights == C.weights and D.mass == C.mass
    text = path.read_text()
    path.write_text(text.replace('"mass": "10/3"', '"mass": "3"'))
    with pytest.raises(MassMismatch):
        load_class_set(path, C.order)
