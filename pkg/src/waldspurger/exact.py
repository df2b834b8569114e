"""Exact integer/rational kernels: linear algebra, lattices, enumeration,
quadratic characters and class numbers.

Everything here works over ``fractions.Fraction`` or Python integers.  The
one exception is :func:`short_vectors`, which uses floating point only to
bound the search ranges; membership is always decided by exact integer
arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint


def Q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Q(v).denominator)
    return d


def rational_gcd(values: Iterable[Fraction]) -> Fraction:
    """Positive generator of the fractional ideal spanned by ``values``."""
    vals = [Q(v) for v in values if v != 0]
    if not vals:
        return Fraction(0)
    den = common_denominator(vals)
    g = 0
    for v in vals:
        g = math.gcd(g, int(v * den))
    return Fraction(g, den)


# ---------------------------------------------------------------------------
# dense matrices over Q (lists of lists of Fraction)


def mat_mul(A, B):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def mat_vec(A, v):
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in A]


def vec_mat(v, A):
    n = len(A[0]) if A else 0
    out = [Fraction(0)] * n
    for c, row in zip(v, A):
        if c:
            for j, a in enumerate(row):
                out[j] += c * a
    return out


def transpose(A):
    return [list(r) for r in zip(*A)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def rref(M):
    """Reduced row echelon form.  Returns ``(R, pivot_columns)``."""
    R = [[Q(x) for x in row] for row in M]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R[:r], pivots


def rank(M) -> int:
    return len(rref(M)[1]) if M else 0


def nullspace(M, ncols: int | None = None):
    """Basis (list of vectors) of ``{v : M v = 0}``."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    n = len(M[0])
    R, piv = rref(M)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def inverse(M):
    n = len(M)
    aug = [list(map(Q, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def solve(M, b):
    """Solve ``M x = b`` for square nonsingular ``M``."""
    n = len(M)
    aug = [list(map(Q, row)) + [Q(bi)] for row, bi in zip(M, b)]
    R, piv = rref(aug)
    if len(piv) != n or piv[-1] == n:
        raise ZeroDivisionError("singular or inconsistent system")
    return [row[n] for row in R]


def det(M) -> Fraction:
    A = [[Q(x) for x in row] for row in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


# ---------------------------------------------------------------------------
# integer row lattices


def hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer matrix (zero rows dropped).

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``, which makes the output unique for a given row span.
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    out = []
    r = 0
    for c in range(ncols):
        nz = [i for i in range(r, len(A)) if A[i][c] != 0]
        if not nz:
            continue
        while len(nz) > 1:
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            for i in nz:
                if i != i0:
                    q = A[i][c] // A[i0][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[i0])]
            nz = [i for i in range(r, len(A)) if A[i][c] != 0]
        i0 = nz[0]
        A[r], A[i0] = A[i0], A[r]
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    out = [row for row in A[:r]]
    return out


def integer_kernel(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the integer row vectors ``c`` with ``c M = 0``."""
    m = len(M)
    n = len(M[0])
    aug = [list(map(int, M[i])) + [int(i == j) for j in range(m)] for i in range(m)]
    H = hnf(aug)
    return [row[n:] for row in H if not any(row[:n])]


def kernel_mod(M: Sequence[Sequence[int]], modulus: int) -> list[list[int]]:
    """Basis of ``{c in Z^m : c M = 0 mod modulus}`` (full rank ``m``)."""
    m = len(M)
    n = len(M[0])
    stacked = [list(map(int, r)) for r in M] + [[modulus * int(i == j) for j in range(n)] for i in range(n)]
    ker = integer_kernel(stacked)
    return hnf([row[:m] for row in ker])


# ---------------------------------------------------------------------------
# rational lattices


class Lattice:
    """Full-rank or partial-rank lattice in ``Q^dim`` with canonical basis.

    The basis is the row HNF of the generators after clearing denominators,
    so two lattices are equal exactly when their bases are.
    """

    __slots__ = ("basis", "dim", "_hash")

    def __init__(self, generators, dim: int | None = None):
        gens = [[Q(x) for x in g] for g in generators]
        if dim is None:
            dim = len(gens[0])
        den = common_denominator(x for g in gens for x in g)
        H = hnf([[int(x * den) for x in g] for g in gens])
        if not H:
            raise ValueError("zero lattice")
        self.basis = tuple(tuple(Fraction(x, den) for x in row) for row in H)
        self.dim = dim
        self._hash = hash(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.basis == other.basis

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rows = ", ".join("(" + ", ".join(str(x) for x in r) + ")" for r in self.basis)
        return f"Lattice[{rows}]"

    def matrix(self):
        return [list(r) for r in self.basis]

    def coordinates(self, v) -> list[Fraction] | None:
        """Coordinates of ``v`` in the basis, or None if outside the Q-span."""
        B = self.matrix()
        n = self.rank
        aug = [list(col) + [Q(vi)] for col, vi in zip(zip(*B), v)]
        R, piv = rref(aug)
        if piv and piv[-1] == n:
            return None
        if len(piv) < n:
            raise ValueError("degenerate basis")
        return [R[i][n] for i in range(n)]

    def contains(self, v) -> bool:
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(v) for v in other.basis)

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice(list(self.basis) + list(other.basis), self.dim)

    def scale(self, c) -> "Lattice":
        c = Q(c)
        return Lattice([[c * x for x in r] for r in self.basis], self.dim)

    def covolume(self) -> Fraction:
        if self.rank != self.dim:
            raise ValueError("covolume needs full rank")
        return abs(det(self.matrix()))

    def index_in(self, other: "Lattice") -> Fraction:
        """``[other : self]`` for full-rank lattices (may be fractional)."""
        return self.covolume() / other.covolume()

    def dual(self) -> "Lattice":
        if self.rank != self.dim:
            raise ValueError("dual needs full rank")
        return Lattice(transpose(inverse(self.matrix())), self.dim)

    def intersection(self, other: "Lattice") -> "Lattice":
        return (self.dual() + other.dual()).dual()


def hnf_rational(rows):
    return Lattice(rows).matrix()


# ---------------------------------------------------------------------------
# positive definite forms and enumeration


class TernaryForm:
    """Positive definite quadratic form ``v -> v^T gram v`` over Q."""

    def __init__(self, gram):
        self.gram = [[Q(x) for x in row] for row in gram]
        n = len(self.gram)
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        for m in range(1, n + 1):
            if det([row[:m] for row in self.gram[:m]]) <= 0:
                raise ValueError("form is not positive definite")

    def __call__(self, v) -> Fraction:
        return quad_value(self.gram, v)

    def restrict(self, lattice: Lattice) -> list[list[Fraction]]:
        B = lattice.matrix()
        return mat_mul(mat_mul(B, self.gram), transpose(B))


def quad_value(gram, v) -> Fraction:
    n = len(v)
    return sum((gram[i][j] * v[i] * v[j] for i in range(n) for j in range(n)), Fraction(0))


def _ldl(gram):
    """``Q(x) = sum_i d[i] * (x_i + sum_{j>i} mu[i][j] x_j)^2`` exactly."""
    n = len(gram)
    A = [[Q(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = A[i][j] / d[i]
        for j in range(i + 1, n):
            for l in range(i + 1, n):
                A[j][l] -= d[i] * mu[i][j] * mu[i][l]
    return d, mu


def _floor_sqrt_frac(x: Fraction) -> int:
    """Largest integer m >= 0 with m^2 <= x (x >= 0)."""
    return math.isqrt(x.numerator // x.denominator) if x >= 0 else -1


def _int_range(center: Fraction, radius_sq: Fraction) -> range:
    """Integers ``t`` with ``(t - center)^2 <= radius_sq``, exactly."""
    if radius_sq < 0:
        return range(0)
    approx = math.sqrt(float(radius_sq)) if radius_sq else 0.0
    lo = math.floor(float(center) - approx) - 1
    hi = math.ceil(float(center) + approx) + 1
    while (lo - center) ** 2 > radius_sq and lo <= hi:
        lo += 1
    while (hi - center) ** 2 > radius_sq and hi >= lo:
        hi -= 1
    return range(lo, hi + 1)


def enumerate_value(form, lattice: Lattice | None, target) -> list[tuple[int, ...]]:
    """All integer coordinate vectors ``v`` (w.r.t. the lattice basis) with
    ``form(v) = target``, in lexicographic order.

    ``form`` is a :class:`TernaryForm` or a symmetric Gram matrix on the
    ambient space; ``lattice=None`` means the standard lattice.
    """
    gram = form.gram if isinstance(form, TernaryForm) else [[Q(x) for x in r] for r in form]
    if lattice is not None:
        B = lattice.matrix()
        gram = mat_mul(mat_mul(B, gram), transpose(B))
    target = Q(target)
    if target < 0:
        return []
    n = len(gram)
    d, mu = _ldl(gram)
    out = []
    x = [0] * n

    def rec(i: int, budget: Fraction):
        center = -sum((mu[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        if i == 0:
            # d0 (x0 - center)^2 == budget
            s2 = budget / d[0]
            if s2 < 0:
                return
            num, den = s2.numerator, s2.denominator
            rn, rd = math.isqrt(num), math.isqrt(den)
            if rn * rn != num or rd * rd != den:
                return
            s = Fraction(rn, rd)
            for t in sorted({center - s, center + s}):
                if t.denominator == 1:
                    x[0] = int(t)
                    out.append(tuple(x))
            return
        for t in _int_range(center, budget / d[i]):
            x[i] = t
            rec(i - 1, budget - d[i] * (t - center) ** 2)
        x[i] = 0

    rec(n - 1, target)
    out.sort()
    return out


def lll_gram(gram, delta: Fraction = Fraction(3, 4)):
    """LLL-reduce a positive definite Gram matrix exactly.

    Returns ``(T, G)`` with ``T`` unimodular (rows = new basis in old
    coordinates) and ``G = T gram T^T``.
    """
    n = len(gram)
    base = [[Q(x) for x in r] for r in gram]
    T = [[int(i == j) for j in range(n)] for i in range(n)]

    def gram_of(T):
        return [[_gram_entry(base, T[i], T[j]) for j in range(n)] for i in range(n)]

    def gso(G):
        mu = [[Fraction(0)] * n for _ in range(n)]
        bn = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j] - sum((mu[j][l] * mu[i][l] * bn[l] for l in range(j)), Fraction(0))
                mu[i][j] = s / bn[j]
            bn[i] = G[i][i] - sum((mu[i][l] ** 2 * bn[l] for l in range(i)), Fraction(0))
        return mu, bn

    G = gram_of(T)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            mu, _ = gso(G)
            q = round(mu[k][j])
            if q:
                T[k] = [a - q * b for a, b in zip(T[k], T[j])]
                G = gram_of(T)
        mu, bn = gso(G)
        if bn[k] >= (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            T[k], T[k - 1] = T[k - 1], T[k]
            G = gram_of(T)
            k = max(k - 1, 1)
    return T, G


def _gram_entry(gram, u, v) -> Fraction:
    n = len(u)
    return sum((gram[a][b] * u[a] * v[b] for a in range(n) for b in range(n) if u[a] and v[b]), Fraction(0))


def short_vectors(gram, bound: int, *, reduce: bool = True):
    """All integer vectors ``v`` with ``v^T gram v <= bound`` for an
    integral positive definite ``gram``.

    Returns ``(coords, norms)`` as int64 arrays.  Vectors are produced in a
    deterministic order (sorted by norm, then lexicographically).
    """
    n = len(gram)
    G0 = [[int(x) for x in row] for row in gram]
    if reduce:
        T, G = lll_gram(G0)
        G = [[int(x) for x in row] for row in G]
    else:
        T = [[int(i == j) for j in range(n)] for i in range(n)]
        G = G0
    Gf = np.array(G, dtype=float)
    R = np.linalg.cholesky(Gf).T  # Gf = R^T R, R upper triangular
    D = np.diag(R) ** 2
    MU = R / np.diag(R)[:, None]
    eps = 1e-7 * (1 + bound)
    chunks = []
    x = np.zeros(n, dtype=np.int64)

    def emit_last_two(S):
        # levels 1 and 0 vectorized (n >= 2)
        c1 = -float(MU[1, 2:] @ x[2:]) if n > 2 else 0.0
        rem = bound - S
        r1 = math.sqrt(max(rem, 0.0) / D[1])
        x1 = np.arange(math.floor(c1 - r1 - 1e-9), math.ceil(c1 + r1 + 1e-9) + 1, dtype=np.int64)
        S1 = S + D[1] * (x1 - c1) ** 2
        ok = S1 <= bound + eps
        x1, S1 = x1[ok], S1[ok]
        c0 = -(MU[0, 1] * x1 + (float(MU[0, 2:] @ x[2:]) if n > 2 else 0.0))
        r0 = np.sqrt(np.maximum(bound - S1, 0.0) / D[0])
        lo = np.floor(c0 - r0 - 1e-9).astype(np.int64)
        hi = np.ceil(c0 + r0 + 1e-9).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return
        rep_x1 = np.repeat(x1, cnt)
        starts = np.repeat(lo, cnt)
        offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        block = np.empty((total, n), dtype=np.int64)
        block[:, 0] = starts + offs
        block[:, 1] = rep_x1
        if n > 2:
            block[:, 2:] = x[2:]
        chunks.append(block)

    def rec(i, S):
        if i == 1:
            emit_last_two(S)
            return
        c = -float(MU[i, i + 1:] @ x[i + 1:]) if i + 1 < n else 0.0
        r = math.sqrt(max(bound - S, 0.0) / D[i])
        for t in range(math.floor(c - r - 1e-9), math.ceil(c + r + 1e-9) + 1):
            St = S + D[i] * (t - c) ** 2
            if St <= bound + eps:
                x[i] = t
                rec(i - 1, St)
        x[i] = 0

    if n == 1:
        r = math.isqrt(bound // G[0][0]) + 1
        coords = np.arange(-r, r + 1, dtype=np.int64)[:, None]
    else:
        rec(n - 1, 0.0)
        coords = np.concatenate(chunks) if chunks else np.zeros((0, n), dtype=np.int64)
    Gi = np.array(G, dtype=np.int64)
    norms = np.einsum("ij,jk,ik->i", coords, Gi, coords)
    keep = norms <= bound
    coords, norms = coords[keep], norms[keep]
    coords = coords @ np.array(T, dtype=np.int64)
    order = np.lexsort(tuple(coords[:, j] for j in range(n - 1, -1, -1)) + (norms,))
    return coords[order], norms[order]


# ---------------------------------------------------------------------------
# elementary number theory


def factor(n: int) -> dict[int, int]:
    return {int(p): int(e) for p, e in factorint(abs(n)).items()}


def prime_divisors(n: int) -> list[int]:
    return sorted(factor(n))


def is_prime(n: int) -> bool:
    return n > 1 and factor(n) == {n: 1}


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, f in enumerate(sieve) if f]


def valuation(n, p: int) -> int:
    n = Q(n)
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = n.numerator, n.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol ``(d / n)`` for ``n != 0``; ``(d / -1)`` is the sign of ``d``."""
    if n == 0:
        raise ValueError("n must be nonzero")
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(d, n)


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(n).values())


def fundamental_discriminant(d: int) -> tuple[int, int]:
    """Write a discriminant ``d`` as ``d0 * f^2`` with ``d0`` fundamental."""
    if d % 4 not in (0, 1) or d == 0:
        raise ValueError(f"{d} is not a discriminant")
    f = 1
    for p, e in factor(d).items():
        f *= p ** (e // 2)
    d0 = d // (f * f)
    if d0 % 4 != 1:
        d0 *= 4
        f //= 2
    return d0, f


@lru_cache(maxsize=None)
def class_number_imag_quadratic(disc: int) -> int:
    """``h(disc)`` for a negative fundamental discriminant, counting reduced
    primitive binary quadratic forms."""
    if disc >= 0 or not is_fundamental_discriminant(disc):
        raise ValueError(f"{disc} is not a negative fundamental discriminant")
    D = -disc
    h = 0
    a = 1
    while 3 * a * a <= D:
        for b in range(-a + 1, a + 1):
            if (b * b + D) % (4 * a):
                continue
            c = (b * b + D) // (4 * a)
            if c < a:
                continue
            if c == a and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                h += 1
        a += 1
    return h


def omega(n: int) -> int:
    return len(factor(n))


def sigma(n: int, k: int = 1) -> int:
    total = 1
    for p, e in factor(n).items():
        total *= sum(p ** (k * i) for i in range(e + 1))
    return total


def to_mpf(x):
    """Convert an int, Fraction or mpmath number to an mpf at working precision."""
    import mpmath

    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)
