"""Harmonic polynomials on the trace-zero part of a quaternion algebra.

A point of ``B/Q`` is written ``x1 i + x2 j + x3 ij``; the quadratic form
``-disc = 4 nrd`` is ``s1 x1^2 + s2 x2^2 + s3 x3^2`` with
``s = (-4a, -4b, 4ab)``.  ``V_k`` is the kernel of the Laplacian
``sum s_i^{-1} d_i^2`` on degree-``k`` forms; ``B^x`` acts by
``(P . g)(w) = P(g w g^{-1})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .exact import Q, inverse, mat_mul, nullspace, rref, solve
from .quaternion import QuatAlgebra, Quaternion


def monomials(k: int) -> list[tuple[int, int, int]]:
    """Degree-``k`` exponent vectors in lexicographically decreasing order."""
    return [(i, j, k - i - j) for i in range(k, -1, -1) for j in range(k - i, -1, -1)]


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def s_k(k: int) -> Fraction:
    """``sum_q Gamma(k+1/2-q) / (Gamma(k+1/2) q! (k-2q)! 4^q)``."""
    total = Fraction(0)
    for q in range(k // 2 + 1):
        ratio = Fraction(1)
        for j in range(k - q, k):
            ratio /= Fraction(2 * j + 1, 2)
        total += ratio / (math.factorial(q) * math.factorial(k - 2 * q) * 4**q)
    return total


def r_k(k: int) -> Fraction:
    return Fraction(2 ** (2 * k + 1) * math.factorial(k) ** 2, math.factorial(2 * k))


def c_k(k: int) -> Fraction:
    return r_k(k) / s_k(k)


def pairing_scale(k: int) -> Fraction:
    """Scale applied to the apolar pairing so that ``<P_D, P_D> = D^k s_k``."""
    return 1 / (_double_factorial(2 * k - 1) * s_k(k))


class HarmonicSpace:
    """``V_k`` for the algebra ``A`` with an exact basis and Gram matrix."""

    def __init__(self, A: QuatAlgebra, k: int):
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.algebra = A
        self.k = k
        self.s = (Fraction(-4 * A.a), Fraction(-4 * A.b), Fraction(4 * A.a * A.b))
        self.monomials = monomials(k)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        if k < 2:
            kernel = [[Fraction(int(i == j)) for j in range(len(self.monomials))] for i in range(len(self.monomials))]
        else:
            lower = monomials(k - 2)
            lidx = {m: i for i, m in enumerate(lower)}
            L = [[Fraction(0)] * len(self.monomials) for _ in lower]
            for c, m in enumerate(self.monomials):
                for v in range(3):
                    if m[v] >= 2:
                        t = list(m)
                        t[v] -= 2
                        L[lidx[tuple(t)]][c] += m[v] * (m[v] - 1) / self.s[v]
            kernel = nullspace(L, len(self.monomials))
        kernel, piv = rref(kernel)
        kernel = kernel[: len(piv)]
        self.basis = kernel  # rows: monomial coefficients, reduced echelon form
        self.pivots = piv  # coordinates of P are its coefficients at these monomials
        if len(kernel) != 2 * k + 1:
            raise AssertionError("harmonic space has wrong dimension")
        scale = pairing_scale(k)
        weights = [scale * math.prod(math.factorial(e) for e in m) / math.prod(s**e for s, e in zip(self.s, m)) for m in self.monomials]
        self.monomial_weights = weights
        self.gram = [[sum((bi[c] * bj[c] * weights[c] for c in range(len(weights)) if bi[c] and bj[c]), Fraction(0)) for bj in kernel] for bi in kernel]
        self.gram_inv = inverse(self.gram)

    @property
    def dim(self) -> int:
        return 2 * self.k + 1

    # polynomials -------------------------------------------------------
    def polynomial(self, coords) -> list[Fraction]:
        out = [Fraction(0)] * len(self.monomials)
        for c, row in zip(coords, self.basis):
            if c:
                for i, v in enumerate(row):
                    if v:
                        out[i] += c * v
        return out

    def coordinates(self, poly) -> list[Fraction]:
        coords = [poly[p] for p in self.pivots]
        if self.polynomial(coords) != list(poly):
            raise ValueError("polynomial is not harmonic")
        return coords

    def evaluate(self, coords, point) -> Fraction:
        pt = [Q(x) for x in point]
        total = Fraction(0)
        for c, m in zip(self.polynomial(coords), self.monomials):
            if c:
                total += c * pt[0] ** m[0] * pt[1] ** m[1] * pt[2] ** m[2]
        return total

    def basis_values(self, point) -> list[Fraction]:
        pt = [Q(x) for x in point]
        mon = [pt[0] ** m[0] * pt[1] ** m[1] * pt[2] ** m[2] for m in self.monomials]
        return [sum((r * v for r, v in zip(row, mon) if r), Fraction(0)) for row in self.basis]

    def inner(self, u, v) -> Fraction:
        return sum((u[i] * self.gram[i][j] * v[j] for i in range(self.dim) if u[i] for j in range(self.dim) if v[j]), Fraction(0))

    # group action --------------------------------------------------------
    def conjugation_matrix(self, g: Quaternion) -> list[list[Fraction]]:
        """3x3 matrix ``M`` with ``coords(g w g^{-1}) = M coords(w)``."""
        A = self.algebra
        gi = A.inv(g)
        cols = []
        for e in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
            img = A.mul(A.mul(g, tuple(map(Fraction, e))), gi)
            cols.append(img[1:])
        return [[cols[c][r] for c in range(3)] for r in range(3)]

    def action_matrix(self, g: Quaternion) -> list[list[Fraction]]:
        """Matrix ``rho(g)`` on coordinates: ``coords(P . g) = rho(g) coords(P)``."""
        if not any(g):
            raise ZeroDivisionError("cannot act by zero")
        M = self.conjugation_matrix(g)
        k = self.k
        # image of each monomial under x -> M x
        lin = [{(1, 0, 0): M[r][0], (0, 1, 0): M[r][1], (0, 0, 1): M[r][2]} for r in range(3)]
        powers = [[{(0, 0, 0): Fraction(1)}] for _ in range(3)]
        for r in range(3):
            for _ in range(k):
                powers[r].append(_poly_mul(powers[r][-1], lin[r]))
        cols = []
        for row in self.basis:
            img = {}
            for coef, m in zip(row, self.monomials):
                if not coef:
                    continue
                term = _poly_mul(_poly_mul(powers[0][m[0]], powers[1][m[1]]), powers[2][m[2]])
                for e, v in term.items():
                    img[e] = img.get(e, 0) + coef * v
            cols.append([Fraction(img.get(self.monomials[p], 0)) for p in self.pivots])
        return [[cols[c][r] for c in range(self.dim)] for r in range(self.dim)]

    def act(self, g: Quaternion, coords) -> list[Fraction]:
        R = self.action_matrix(g)
        return [sum((R[i][j] * coords[j] for j in range(self.dim)), Fraction(0)) for i in range(self.dim)]

    # reproducing kernel -----------------------------------------------------
    def gegenbauer_vector(self, omega: Quaternion) -> list[Fraction]:
        """``P`` with ``<Q, P> = Q(omega)`` for all ``Q`` in the space."""
        w = tuple(Q(x) for x in omega)
        vals = self.basis_values(w[1:])
        return solve(self.gram, vals)

    # float helpers for bulk numerics ------------------------------------------
    @cached_property
    def basis_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.basis])

    @cached_property
    def gram_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.gram])

    @cached_property
    def exponents(self) -> np.ndarray:
        return np.array(self.monomials, dtype=np.int64)

    def evaluate_many(self, poly_coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate monomial-coefficient vectors at many points (float)."""
        mon = np.prod(points[:, None, :] ** self.exponents[None, :, :], axis=2)
        return mon @ np.asarray(poly_coeffs, dtype=float)


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        if not c1:
            continue
        for e2, c2 in q.items():
            if not c2:
                continue
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            out[e] = out.get(e, 0) + c1 * c2
    return out


@lru_cache(maxsize=None)
def harmonic_basis(A: QuatAlgebra, k: int) -> HarmonicSpace:
    return HarmonicSpace(A, k)


@dataclass(frozen=True)
class HarmonicVector:
    space: HarmonicSpace
    coords: tuple

    def __add__(self, other):
        self._same(other)
        return HarmonicVector(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __rmul__(self, c):
        return HarmonicVector(self.space, tuple(c * a for a in self.coords))

    def _same(self, other):
        if other.space is not self.space:
            raise ValueError("vectors live in different harmonic spaces")

    def __call__(self, point) -> Fraction:
        return self.space.evaluate(self.coords, point)


def inner_product(P: HarmonicVector, R: HarmonicVector) -> Fraction:
    P._same(R)
    return P.space.inner(P.coords, R.coords)


def act(g: Quaternion, P: HarmonicVector) -> HarmonicVector:
    return HarmonicVector(P.space, tuple(P.space.act(g, P.coords)))


def gegenbauer_vector(space: HarmonicSpace, omega: Quaternion) -> HarmonicVector:
    return HarmonicVector(space, tuple(space.gegenbauer_vector(omega)))
