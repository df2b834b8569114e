"""Definite quaternion algebras over Q, their orders and ideal classes.

Elements are 4-tuples of ``Fraction`` in the basis ``1, i, j, ij`` with
``i^2 = a``, ``j^2 = b``.  Ideals are *left* ideals of a fixed order ``R``
(the lattice ``R x`` attached to an idele ``x``), so a form transforms as
``phi(x gamma) = phi(x) . gamma`` with ``gamma`` acting on the right.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exact import (
    Lattice,
    Q,
    common_denominator,
    det,
    factor,
    inverse,
    kernel_mod,
    kronecker,
    rational_gcd,
    short_vectors,
    valuation,
    vec_mat,
)

Quaternion = tuple  # (t, x, y, z) of Fraction

ONE = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))


class OrderError(ValueError):
    """An order with the requested local structure cannot be built."""


class MassMismatch(RuntimeError):
    def __init__(self, achieved, expected):
        super().__init__(f"class enumeration stopped at mass {achieved}, expected {expected}")
        self.achieved = achieved
        self.expected = expected


def hilbert_symbol(a: int, b: int, p: int) -> int:
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    alpha, beta = valuation(a, p), valuation(b, p)
    u, v = a // p**alpha, b // p**beta
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2
        om = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * om(v) + beta * om(u)
        return -1 if e % 2 else 1
    s = (-1) ** (alpha * beta * ((p - 1) // 2))
    return s * kronecker(u, p) ** beta * kronecker(v, p) ** alpha


@dataclass(frozen=True)
class QuatAlgebra:
    a: int
    b: int

    def __post_init__(self):
        if self.a >= 0 or self.b >= 0:
            raise ValueError("definite algebras need a, b < 0")

    # arithmetic -------------------------------------------------------
    def mul(self, p: Quaternion, q: Quaternion) -> Quaternion:
        a, b = self.a, self.b
        t1, x1, y1, z1 = p
        t2, x2, y2, z2 = q
        return (
            t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
            t1 * x2 + x1 * t2 - b * y1 * z2 + b * z1 * y2,
            t1 * y2 + y1 * t2 + a * x1 * z2 - a * z1 * x2,
            t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
        )

    @staticmethod
    def conj(q: Quaternion) -> Quaternion:
        return (q[0], -q[1], -q[2], -q[3])

    def nrd(self, q: Quaternion) -> Fraction:
        t, x, y, z = q
        return t * t - self.a * x * x - self.b * y * y + self.a * self.b * z * z

    @staticmethod
    def trd(q: Quaternion) -> Fraction:
        return 2 * q[0]

    def disc(self, q: Quaternion) -> Fraction:
        """``trd(q)^2 - 4 nrd(q)``; nonpositive, zero exactly on Q."""
        return self.trd(q) ** 2 - 4 * self.nrd(q)

    def inv(self, q: Quaternion) -> Quaternion:
        n = self.nrd(q)
        if n == 0:
            raise ZeroDivisionError("zero quaternion")
        return tuple(c / n for c in self.conj(q))

    def bilinear(self, p: Quaternion, q: Quaternion) -> Fraction:
        """``trd(p conj(q))``, the polarization of the norm form."""
        return 2 * (p[0] * q[0] - self.a * p[1] * q[1] - self.b * p[2] * q[2] + self.a * self.b * p[3] * q[3])

    def ramified_primes(self) -> list[int]:
        primes = set(factor(2 * self.a * self.b))
        return sorted(p for p in primes if hilbert_symbol(self.a, self.b, p) == -1)

    def discriminant(self) -> int:
        return math.prod(self.ramified_primes())


def ramified_primes(A: QuatAlgebra) -> list[int]:
    return A.ramified_primes()


def disc_element(A: QuatAlgebra, q) -> Fraction:
    return A.disc(tuple(map(Q, q)))


def algebra_ramified_at(primes, search: int = 200) -> QuatAlgebra:
    """First ``(a, b)`` (ordered by ``|a|``, then ``|b|``) ramified exactly at
    ``primes`` and infinity."""
    target = sorted(primes)
    if len(target) % 2 == 0:
        raise ValueError("a definite algebra over Q ramifies at an odd number of finite primes")
    for a in range(-1, -search, -1):
        for b in range(-1, -search * max(target), -1):
            A = QuatAlgebra(a, b)
            if A.ramified_primes() == target:
                return A
    raise ValueError(f"no algebra ramified at {primes} found")


# ---------------------------------------------------------------------------
# lattices inside B


def lattice_gram(A: QuatAlgebra, basis) -> list[list[Fraction]]:
    """Gram matrix of the reduced norm on the given basis."""
    n = len(basis)
    return [[A.bilinear(basis[i], basis[j]) / 2 for j in range(n)] for i in range(n)]


def lattice_norm(A: QuatAlgebra, L: Lattice) -> Fraction:
    B = L.basis
    vals = [A.nrd(e) for e in B] + [A.bilinear(B[i], B[j]) for i in range(4) for j in range(i + 1, 4)]
    return rational_gcd(vals)


def lattice_product(A: QuatAlgebra, L1: Lattice, L2: Lattice) -> Lattice:
    return Lattice([A.mul(x, y) for x in L1.basis for y in L2.basis])


def left_divide(A: QuatAlgebra, I: Lattice, J: Lattice) -> Lattice:
    """``{b : I b subset J}``."""
    out = None
    for e in I.basis:
        ei = A.inv(e)
        L = Lattice([A.mul(ei, f) for f in J.basis])
        out = L if out is None else out.intersection(L)
    return out


def right_divide(A: QuatAlgebra, I: Lattice, J: Lattice) -> Lattice:
    """``{b : b I subset J}``."""
    out = None
    for e in I.basis:
        ei = A.inv(e)
        L = Lattice([A.mul(f, ei) for f in J.basis])
        out = L if out is None else out.intersection(L)
    return out


def primitive_scaling(L: Lattice) -> Lattice:
    """Representative of ``L`` modulo ``Q^x`` scaling."""
    c = rational_gcd(x for row in L.basis for x in row)
    return L.scale(1 / c)


def enumerate_norm(A: QuatAlgebra, L: Lattice, target) -> list[Quaternion]:
    """Elements of ``L`` of reduced norm ``target`` up to sign (canonical
    representative: first nonzero coordinate positive)."""
    target = Q(target)
    if target <= 0:
        return []
    G = lattice_gram(A, L.basis)
    den = common_denominator([x for r in G for x in r] + [target])
    Gi = [[int(x * den) for x in r] for r in G]
    bound = int(target * den)
    coords, norms = short_vectors(Gi, bound)
    coords = coords[norms == bound]
    out = []
    for c in coords:
        c = [int(v) for v in c]
        first = next(v for v in c if v)
        if first < 0:
            continue
        out.append(tuple(sum((ci * row[k] for ci, row in zip(c, L.basis)), Fraction(0)) for k in range(4)))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# orders


@dataclass
class QuatOrder:
    algebra: QuatAlgebra
    lattice: Lattice
    maximal: "QuatOrder | None" = None  # a maximal order containing this one
    local: dict = field(default_factory=dict)  # p -> local construction data

    def __post_init__(self):
        if not self.lattice.contains(ONE):
            raise OrderError("order must contain 1")

    @property
    def basis(self):
        return self.lattice.basis

    def is_closed(self) -> bool:
        A = self.algebra
        return all(self.lattice.contains(A.mul(x, y)) for x in self.basis for y in self.basis)

    def discriminant(self) -> int:
        """Reduced discriminant: ``sqrt |det trd(e_i e_j)|``."""
        A = self.algebra
        M = [[A.trd(A.mul(x, y)) for y in self.basis] for x in self.basis]
        d = abs(det(M))
        if d.denominator != 1 or math.isqrt(d.numerator) ** 2 != d.numerator:
            raise OrderError(f"trace form determinant {d} is not a square")
        return math.isqrt(d.numerator)

    def contains(self, q) -> bool:
        return self.lattice.contains(q)

    def coordinates(self, q) -> list[int]:
        c = self.lattice.coordinates(q)
        if c is None or any(x.denominator != 1 for x in c):
            raise ValueError("element not in order")
        return [int(x) for x in c]

    def element(self, coords) -> Quaternion:
        return tuple(vec_mat([Q(c) for c in coords], [list(r) for r in self.basis]))

    def residue_elements(self, m: int):
        """All elements ``sum c_i e_i`` with ``0 <= c_i < m``."""
        for c in itertools.product(range(m), repeat=4):
            yield self.element(c)


def _ring_closure(A: QuatAlgebra, gens, max_rounds: int = 8) -> Lattice | None:
    L = Lattice(list(gens) + [ONE])
    for _ in range(max_rounds):
        new = Lattice(list(L.basis) + [A.mul(x, y) for x in L.basis for y in L.basis])
        if new == L:
            return L
        if any(A.nrd(e).denominator != 1 or A.trd(e).denominator != 1 for e in new.basis):
            return None
        L = new
    return None


def _is_integral(A: QuatAlgebra, q) -> bool:
    return A.nrd(q).denominator == 1 and A.trd(q).denominator == 1


def maximal_order(A: QuatAlgebra) -> QuatOrder:
    """A maximal order, by saturating ``Z<1, i, j, ij>`` prime by prime."""
    L = Lattice([ONE, (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    O = QuatOrder(A, L)
    target = A.discriminant()
    d = O.discriminant()
    while d != target:
        p = next(p for p in factor(d) if valuation(d, p) > valuation(target, p))
        grown = None
        for c in itertools.product(range(p), repeat=4):
            if not any(c):
                continue
            x = tuple(v / p for v in O.element(c))
            if O.contains(x) or not _is_integral(A, x):
                continue
            L2 = _ring_closure(A, list(O.basis) + [x])
            if L2 is not None:
                grown = QuatOrder(A, L2)
                break
        if grown is None:
            raise OrderError(f"cannot saturate at p = {p}")
        O = grown
        d = O.discriminant()
    return O


def _unramified_generator(O: QuatOrder, p: int) -> Quaternion:
    """An element of ``O`` whose characteristic polynomial is irreducible mod p."""
    A = O.algebra
    for c in itertools.product(range(-2, 3), repeat=4):
        u = O.element(c)
        t, n = A.trd(u), A.nrd(u)
        if p == 2:
            if t % 2 == 1 and n % 2 == 1:
                return u
        elif kronecker(int(t * t - 4 * n), p) == -1:
            return u
    raise OrderError(f"no unramified quadratic generator found at {p}")


def _idempotent(O: QuatOrder, p: int, v: int) -> Quaternion:
    """Rank-one idempotent of ``O`` modulo ``p^v`` (``O`` split at ``p``)."""
    A = O.algebra
    mod = p**v
    e = None
    for c in itertools.product(range(p), repeat=4):
        x = O.element(c)
        if A.trd(x) % p == 1 % p and A.nrd(x) % p == 0:
            e = c
            break
    if e is None:
        raise OrderError(f"order is not split at {p}")
    prec = p
    coords = list(e)
    while prec < mod * p:
        x = O.element(coords)
        x2 = A.mul(x, x)
        x3 = A.mul(x2, x)
        y = tuple(3 * s - 2 * t for s, t in zip(x2, x3))
        prec *= prec
        coords = [c % (mod * p) for c in O.coordinates(y)]
    coords = [c % mod for c in coords]
    x = O.element(coords)
    diff = tuple(s - t for s, t in zip(A.mul(x, x), x))
    assert all(c % mod == 0 for c in O.coordinates(diff))
    return x


def _kernel_lattice(O: QuatOrder, linear_map, modulus: int) -> Lattice:
    """``{x in O : linear_map(x) in modulus * O}``."""
    M = [O.coordinates(linear_map(e)) for e in O.basis]
    ker = kernel_mod(M, modulus)
    return Lattice([O.element(row) for row in ker])


def build_order(A: QuatAlgebra, N: int, eps: dict[int, int]) -> QuatOrder:
    """Order of reduced discriminant ``N`` with Eichler invariant ``eps[p]``
    at every ``p | N``, built inside a maximal order by local congruences."""
    O = maximal_order(A)
    ram = set(A.ramified_primes())
    fac = factor(N)
    if not ram <= set(fac):
        raise OrderError(f"algebra ramifies at {sorted(ram - set(fac))}, which do not divide N")
    lattice = O.lattice
    local = {}
    for p, v in sorted(fac.items()):
        e = eps.get(p)
        if e not in (1, -1):
            raise OrderError(f"eps({p}) must be +1 or -1")
        if p in ram:
            if e != -1 or v % 2 == 0:
                raise OrderError(f"at ramified {p} need eps = -1 and odd exponent")
            r = (v - 1) // 2
            u = _unramified_generator(O, p)
            L = Lattice([ONE, u] + [tuple(p**r * c for c in x) for x in O.basis])
            local[p] = {"type": "special", "u": u, "r": r, "t": 1, "v": v}
        elif e == 1:
            idem = _idempotent(O, p, v)
            one_minus = tuple(s - t for s, t in zip(ONE, idem))
            L = _kernel_lattice(O, lambda x: A.mul(A.mul(one_minus, x), idem), p**v)
            local[p] = {"type": "eichler", "e": idem, "v": v}
        else:
            if v % 2:
                raise OrderError(f"eps({p}) = -1 at a split prime needs an even exponent")
            r = v // 2
            u = _unramified_generator(O, p)
            L = Lattice([ONE, u] + [tuple(p**r * c for c in x) for x in O.basis])
            local[p] = {"type": "special", "u": u, "r": r, "t": 0, "v": v}
        lattice = lattice.intersection(L)
    R = QuatOrder(A, lattice, maximal=O, local=local)
    if not R.is_closed():
        raise OrderError("constructed lattice is not closed under multiplication")
    if R.discriminant() != N:
        raise OrderError(f"constructed order has discriminant {R.discriminant()}, expected {N}")
    return R


def _unit_fraction(R_basis, A: QuatAlgebra, p: int, ambient: QuatOrder) -> tuple[int, int]:
    """``(#units, #elements)`` in the image of ``R`` in ``ambient / p ambient``."""
    seen = set()
    units = 0
    Rb = [list(r) for r in R_basis]
    for c in itertools.product(range(p), repeat=4):
        x = tuple(vec_mat([Q(ci) for ci in c], Rb))
        key = tuple(v % p for v in ambient.coordinates(x))
        if key in seen:
            continue
        seen.add(key)
        if A.nrd(x) % p != 0:
            units += 1
    return units, len(seen)


def eichler_invariant(R: QuatOrder, p: int) -> int:
    """+1, -1 or 0 according to ``R/J(R)`` being ``F_p x F_p``, ``F_{p^2}``
    or ``F_p``; decided from the proportion of units in ``R/pR``."""
    units, size = _unit_fraction(R.basis, R.algebra, p, R)
    frac = Fraction(units, size)
    if frac == Fraction(p - 1, p):
        return 0
    if frac == Fraction(p * p - 1, p * p):
        return -1
    if frac == Fraction((p - 1) ** 2, p * p):
        return 1
    raise ValueError(f"{p} does not divide the discriminant of the order")


def unit_group(R: QuatOrder) -> tuple[list[Quaternion], int]:
    units = enumerate_norm(R.algebra, R.lattice, 1)
    return units, len(units)


def mass(R: QuatOrder) -> Fraction:
    """Eichler mass ``sum 1/w_x`` via ``mass(O) * [O^x : R^x]`` locally."""
    A = R.algebra
    O = R.maximal or R
    m = Fraction(math.prod(p - 1 for p in A.ramified_primes()), 12)
    if O is R:
        return m
    index = O.lattice.covolume() / R.lattice.covolume()
    index = 1 / index  # [O : R]
    for p in factor(int(index)):
        idx_p = p ** valuation(index, p)
        uO, sO = _unit_fraction(O.basis, A, p, O)
        uR, sR = _unit_fraction(R.basis, A, p, O)
        m *= idx_p * Fraction(uO, sO) / Fraction(uR, sR)
    return m


# ---------------------------------------------------------------------------
# ideals and classes


@dataclass(frozen=True)
class Ideal:
    """Left ideal ``I`` of ``order`` (lattice only; the order is shared)."""

    lattice: Lattice

    def norm(self, A: QuatAlgebra) -> Fraction:
        return lattice_norm(A, self.lattice)


def right_order(A: QuatAlgebra, I: Lattice) -> Lattice:
    return left_divide(A, I, I)


def connecting_elements(A: QuatAlgebra, I: Lattice, J: Lattice, m: int) -> list[Quaternion]:
    """``gamma`` (up to sign) with ``I gamma subset J`` and
    ``nrd(gamma) = m n(J) / n(I)``; for ``m = 1`` exactly ``I gamma = J``."""
    M = left_divide(A, I, J)
    target = Q(m) * lattice_norm(A, J) / lattice_norm(A, I)
    return enumerate_norm(A, M, target)


def p_neighbours(R: QuatOrder, I: Lattice, p: int) -> list[Lattice]:
    """Left R-submodules ``J = R beta + p I`` of index ``p^2`` in ``I``."""
    A = R.algebra
    nI = lattice_norm(A, I)
    pI = [tuple(p * c for c in x) for x in I.basis]
    out = []
    seen = set()
    Ib = [list(r) for r in I.basis]
    for c in itertools.product(range(p), repeat=4):
        if not any(c):
            continue
        beta = tuple(vec_mat([Q(x) for x in c], Ib))
        if (A.nrd(beta) / nI) % p != 0:
            continue
        J = Lattice([A.mul(r, beta) for r in R.basis] + pI)
        if J in seen:
            continue
        seen.add(J)
        if J.covolume() == I.covolume() * p * p:
            out.append(J)
    return out


@dataclass
class ClassSet:
    order: QuatOrder
    ideals: list[Lattice]
    right_orders: list[Lattice]
    units: list[list[Quaternion]]
    weights: list[int]
    mass: Fraction

    def __len__(self):
        return len(self.ideals)

    @property
    def algebra(self):
        return self.order.algebra

    def norms(self):
        return [lattice_norm(self.algebra, I) for I in self.ideals]

    def identify(self, J: Lattice) -> tuple[int, Quaternion]:
        """Index ``y`` and ``gamma`` with ``I_y gamma = J``."""
        A = self.algebra
        for y, I in enumerate(self.ideals):
            g = connecting_elements(A, I, J, 1)
            if g:
                return y, g[0]
        raise LookupError("lattice is not isomorphic to any class representative")


def ideal_classes(R: QuatOrder, max_steps: int = 10_000) -> ClassSet:
    """Representatives of the left ideal classes of ``R``, by breadth-first
    search through ``p``-neighbours, certified by the mass formula."""
    A = R.algebra
    N = R.discriminant()
    p = next(q for q in range(2, 1000) if N % q and all(q % s for s in range(2, q)))
    target = mass(R)
    ideals = [R.lattice]
    rights = [R.lattice]
    units = [unit_group(R)[0]]
    total = Fraction(1, len(units[0]))
    queue = [0]
    steps = 0
    while total < target and queue and steps < max_steps:
        x = queue.pop(0)
        for J in p_neighbours(R, ideals[x], p):
            steps += 1
            if any(connecting_elements(A, I, J, 1) for I in ideals):
                continue
            RJ = right_order(A, J)
            U = enumerate_norm(A, RJ, 1)
            ideals.append(J)
            rights.append(RJ)
            units.append(U)
            total += Fraction(1, len(U))
            queue.append(len(ideals) - 1)
            if total >= target:
                break
    if total != target:
        raise MassMismatch(total, target)
    return ClassSet(R, ideals, rights, units, [len(u) for u in units], target)


# ---------------------------------------------------------------------------
# two-sided ideals supported at p | N (Atkin-Lehner)



# left classes of R; I -> conj(I) maps them onto the right classes with the same weights
right_ideal_classes = ideal_classes

def two_sided_ideal(R: QuatOrder, p: int) -> Lattice:
    """The two-sided ideal ``w_p R`` (locally ``w_p R_p``, trivial away from p)."""
    A = R.algebra
    O = R.maximal or R
    data = R.local.get(p)
    if data is None:
        if p not in A.ramified_primes() or R is not O:
            raise OrderError(f"no local data at {p}")
        data = {"type": "special", "r": 0, "t": 1, "v": 1, "u": None}
    v = data["v"]
    if data["type"] == "eichler":
        e = data["e"]
        f = tuple(s - t for s, t in zip(ONE, e))
        L1 = _kernel_lattice(O, lambda x: A.mul(A.mul(e, x), e), p**v)
        L2 = _kernel_lattice(O, lambda x: A.mul(A.mul(f, x), f), p**v)
        J = R.lattice.intersection(L1).intersection(L2)
    elif data["r"] == 0 and data["t"] == 1:
        # unique maximal two-sided ideal of the local maximal order
        gens = [x for x in O.residue_elements(p) if A.nrd(x) % p == 0]
        gens += [tuple(p * c for c in x) for x in O.basis]
        J = R.lattice.intersection(Lattice(gens))
    else:
        if p == 2:
            raise NotImplementedError("special orders at 2 with r > 0")
        u = data["u"]
        delta = tuple(2 * c for c in u)
        delta = (Fraction(0),) + delta[1:]
        nd = A.nrd(delta)
        dbar = A.conj(delta)

        def proj(x):
            s = A.mul(A.mul(delta, x), dbar)
            return tuple(nd * a + b for a, b in zip(x, s))

        J = R.lattice.intersection(_kernel_lattice(O, proj, p**v))
    return J


@dataclass
class ALAction:
    """Action of ``w_p`` on classes: ``J I_x = I_{perm[x]} gamma[x]``."""

    p: int
    ideal: Lattice
    perm: list[int]
    gammas: list[Quaternion]


def normalizer_generators(classes: ClassSet) -> dict[int, ALAction]:
    R = classes.order
    A = R.algebra
    out = {}
    for p in sorted(factor(R.discriminant())):
        J = two_sided_ideal(R, p)
        perm, gammas = [], []
        for I in classes.ideals:
            y, g = classes.identify(lattice_product(A, J, I))
            perm.append(y)
            gammas.append(g)
        out[p] = ALAction(p, J, perm, gammas)
    return out


def bil_group(R: QuatOrder) -> list[Lattice]:
    """Distinct (mod ``Q^x``) products of the two-sided ideals ``J_p``."""
    A = R.algebra
    gens = [two_sided_ideal(R, p) for p in sorted(factor(R.discriminant()))]
    elements = {primitive_scaling(R.lattice)}
    for J in gens:
        elements |= {primitive_scaling(lattice_product(A, X, J)) for X in elements}
    return sorted(elements, key=lambda L: L.basis)


# ---------------------------------------------------------------------------
# class-set cache


CACHE_VERSION = 1


def _enc(q):
    return [str(x) for x in q]


def save_class_set(classes: ClassSet, path: Path, eps: dict[int, int]) -> None:
    A = classes.algebra
    rec = {
        "version": CACHE_VERSION,
        "a": A.a,
        "b": A.b,
        "N": classes.order.discriminant(),
        "eps": {str(p): s for p, s in sorted(eps.items())},
        "order": [_enc(r) for r in classes.order.basis],
        "ideals": [[_enc(r) for r in I.basis] for I in classes.ideals],
        "weights": classes.weights,
        "mass": str(classes.mass),
    }
    Path(path).write_text(json.dumps(rec, indent=1, sort_keys=True), encoding="utf-8")


def load_class_set(path: Path, R: QuatOrder) -> ClassSet:
    rec = json.loads(Path(path).read_text(encoding="utf-8"))
    if rec.get("version") != CACHE_VERSION:
        raise ValueError("cache version mismatch")
    A = R.algebra
    if (rec["a"], rec["b"]) != (A.a, A.b):
        raise ValueError("cache belongs to a different algebra")
    if Lattice([[Fraction(x) for x in r] for r in rec["order"]]) != R.lattice:
        raise ValueError("cache belongs to a different order")
    ideals = [Lattice([[Fraction(x) for x in r] for r in I]) for I in rec["ideals"]]
    rights = [right_order(A, I) for I in ideals]
    units = [enumerate_norm(A, L, 1) for L in rights]
    weights = [len(u) for u in units]
    if weights != rec["weights"]:
        raise ValueError("cached weights do not match recomputation")
    m = sum((Fraction(1, w) for w in weights), Fraction(0))
    if m != Fraction(rec["mass"]) or m != mass(R):
        raise MassMismatch(m, mass(R))
    return ClassSet(R, ideals, rights, units, weights, m)


def cache_key(A: QuatAlgebra, N: int, eps: dict[int, int]) -> str:
    tag = "_".join(f"{p}{'p' if s > 0 else 'm'}" for p, s in sorted(eps.items()))
    return f"classes_a{-A.a}_b{-A.b}_N{N}_{tag}.json"
