"""Quaternionic modular forms of weight ``k``: Hecke operators, height
pairing, eigenforms and Atkin-Lehner signs.

A form ``phi`` is stored by its values ``phi(x)`` on class representatives;
``phi(x)`` lies in the ``Gamma_x``-invariant part of ``V_k`` and is written in
a per-class block basis.  Module coordinates concatenate the blocks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np
import sympy

from .exact import Q, factor, is_prime, mat_mul, nullspace, primes_up_to, rref, short_vectors, transpose
from .harmonic import HarmonicSpace, harmonic_basis
from .quaternion import (
    ClassSet,
    build_order,
    connecting_elements,
    ideal_classes,
    lattice_gram,
    lattice_norm,
    left_divide,
    normalizer_generators,
)


class HypothesisError(ValueError):
    """The newform data violate a standing hypothesis (H1, H2 or H3)."""


class EigenformError(RuntimeError):
    """Eigenform extraction or an eigen-identity failed."""


def _mat_vec(M, v):
    return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in M]


class BrandtModule:
    def __init__(self, classes: ClassSet, k: int):
        self.classes = classes
        self.k = k
        self.algebra = classes.algebra
        self.space: HarmonicSpace = harmonic_basis(self.algebra, k)
        self.norms = classes.norms()
        self.weights = classes.weights
        self.blocks = []  # per class: rows spanning V^{Gamma_x}, reduced echelon
        self.block_pivots = []
        for units in classes.units:
            d = self.space.dim
            P = [[Fraction(0)] * d for _ in range(d)]
            for g in units:
                R = self.space.action_matrix(g)
                for i in range(d):
                    for j in range(d):
                        P[i][j] += R[i][j]
            P = [[x / len(units) for x in row] for row in P]
            E, piv = rref(transpose(P))
            self.blocks.append(E[: len(piv)])
            self.block_pivots.append(piv)
        self.offsets = [0]
        for b in self.blocks:
            self.offsets.append(self.offsets[-1] + len(b))
        self._hecke: dict[int, list[list[Fraction]]] = {}

    @property
    def dim(self) -> int:
        return self.offsets[-1]

    def __len__(self):
        return len(self.blocks)

    # coordinates ------------------------------------------------------------
    def values(self, vec) -> list[list]:
        """``phi(x)`` in harmonic coordinates for every class ``x``."""
        out = []
        d = self.space.dim
        for x, B in enumerate(self.blocks):
            c = vec[self.offsets[x] : self.offsets[x + 1]]
            out.append([sum((ci * row[i] for ci, row in zip(c, B)), 0 * Fraction(0)) for i in range(d)])
        return out

    def block_coords(self, x: int, v) -> list:
        coords = [v[p] for p in self.block_pivots[x]]
        recon = [sum((c * row[i] for c, row in zip(coords, self.blocks[x])), Fraction(0)) for i in range(self.space.dim)]
        if recon != list(v):
            raise ValueError(f"vector is not Gamma_{x}-invariant")
        return coords

    def from_values(self, values) -> list[Fraction]:
        out = []
        for x, v in enumerate(values):
            out.extend(self.block_coords(x, [Q(c) for c in v]))
        return out

    # pairing ------------------------------------------------------------------
    @cached_property
    def height_gram(self) -> list[list[Fraction]]:
        G = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for x, B in enumerate(self.blocks):
            o = self.offsets[x]
            for i, u in enumerate(B):
                for j, v in enumerate(B):
                    G[o + i][o + j] = self.space.inner(u, v) / self.weights[x]
        return G

    def height(self, u, v):
        G = self.height_gram
        return sum((u[i] * G[i][j] * v[j] for i in range(self.dim) if u[i] for j in range(self.dim) if v[j]), 0 * Fraction(0))

    # Hecke operators ------------------------------------------------------------
    def _push(self, x: int, y: int, g) -> list[list[Fraction]]:
        """Block matrix of ``v -> v . g`` from block ``y`` to block ``x``."""
        R = self.space.action_matrix(g)
        cols = []
        for b in self.blocks[y]:
            img = _mat_vec(R, b)
            cols.append([img[p] for p in self.block_pivots[x]])
        return cols  # list of columns

    def hecke(self, m: int) -> list[list[Fraction]]:
        """Exact matrix of ``T_m`` on module coordinates (weight factor ``m^k``)."""
        if m in self._hecke:
            return self._hecke[m]
        A = self.algebra
        wk = Fraction(m) ** self.k
        T = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        I = self.classes.ideals
        for x in range(len(I)):
            for y in range(len(I)):
                if not self.blocks[x] or not self.blocks[y]:
                    continue
                for g in connecting_elements(A, I[y], I[x], m):
                    cols = self._push(x, y, g)
                    for j, col in enumerate(cols):
                        for i, val in enumerate(col):
                            if val:
                                T[self.offsets[x] + i][self.offsets[y] + j] += wk * val / self.weights[y]
        self._hecke[m] = T
        return T

    def apply(self, M, v):
        return _mat_vec(M, v)

    # Atkin-Lehner ----------------------------------------------------------------
    @cached_property
    def atkin_lehner_data(self):
        return normalizer_generators(self.classes)

    def atkin_lehner_matrix(self, p: int) -> list[list[Fraction]]:
        """Matrix of ``(phi . w_p)(x) = phi(y) . gamma`` where ``J_p I_x = I_y gamma``."""
        al = self.atkin_lehner_data[p]
        W = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for x, (y, g) in enumerate(zip(al.perm, al.gammas)):
            if not self.blocks[x]:
                continue
            cols = self._push(x, y, g)
            for j, col in enumerate(cols):
                for i, val in enumerate(col):
                    W[self.offsets[x] + i][self.offsets[y] + j] = val
        return W

    # subspaces ---------------------------------------------------------------------
    def eisenstein_subspace(self) -> list[list[Fraction]]:
        if self.k > 0:
            return []
        return [[Fraction(1)] * self.dim]

    def cusp_subspace(self) -> list[list[Fraction]]:
        E = self.eisenstein_subspace()
        if not E:
            return [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        G = self.height_gram
        M = [_mat_vec(G, e) for e in E]  # rows: functionals <e, .>
        return nullspace(M, self.dim)


def build_module(classes: ClassSet, k: int) -> BrandtModule:
    return BrandtModule(classes, k)


def hecke(module: BrandtModule, m: int):
    return module.hecke(m)


def height(module: BrandtModule, u, v):
    return module.height(u, v)


def phi_xv(module: BrandtModule, x: int, v) -> list[Fraction]:
    """The form ``phi_{x,v} = sum_{gamma in Gamma_x} (y -> v . gamma)`` supported on ``x``."""
    sp = module.space
    tot = [Fraction(0)] * sp.dim
    for g in module.classes.units[x]:
        w = sp.act(g, v)
        tot = [a + b for a, b in zip(tot, w)]
    values = [[Fraction(0)] * sp.dim for _ in range(len(module))]
    values[x] = tot
    return module.from_values(values)


def height_on_phi(module: BrandtModule, x: int, v, y: int, w) -> Fraction:
    """``<phi_{x,v}, phi_{y,w}>`` as ``sum_{gamma in Gamma_{x,y}} <v . gamma, w>``."""
    A = module.algebra
    I = module.classes.ideals
    sp = module.space
    tot = Fraction(0)
    for g in connecting_elements(A, I[x], I[y], 1):
        tot += sp.inner(sp.act(g, v), w)
    return tot


# ---------------------------------------------------------------------------
# eigenforms


@dataclass
class EigenformRecord:
    module: BrandtModule
    vector: list  # module coordinates (Fraction when exact, mpf otherwise)
    eigenvalues: dict  # p -> Fraction or mpf
    exact: bool
    field_poly: str  # minimal polynomial of the splitting eigenvalue, as text
    atkin_lehner: dict = field(default_factory=dict)  # p -> +1/-1
    epsilon_g: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)  # "H1", "H2", "H3" -> bool
    newform: bool | None = None  # None until mark_oldforms has run

    @property
    def k(self):
        return self.module.k

    @property
    def N(self):
        return self.module.classes.order.discriminant()

    def values(self):
        return self.module.values(self.vector)

    def norm(self):
        return self.module.height(self.vector, self.vector)

    def satisfies_hypotheses(self) -> bool:
        return bool(self.hypotheses) and all(self.hypotheses.values())

    def to_json(self) -> dict:
        A = self.module.algebra
        return {
            "N": self.N,
            "k": self.k,
            "algebra": [A.a, A.b],
            "exact": self.exact,
            "field": self.field_poly,
            "eigenvalues": {str(p): _num_str(v) for p, v in sorted(self.eigenvalues.items())},
            "atkin_lehner": {str(p): s for p, s in sorted(self.atkin_lehner.items())},
            "epsilon_g": {str(p): s for p, s in sorted(self.epsilon_g.items())},
            "hypotheses": dict(sorted(self.hypotheses.items())),
            "newform": self.newform,
            "vector": [_num_str(v) for v in self.vector],
        }


def _num_str(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return mpmath.nstr(v, 30)


def export_eigenforms(records, path) -> None:
    payload = {"version": 1, "eigenforms": [r.to_json() for r in records]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)


def _restrict(T, basis):
    """Matrix of ``T`` on the span of ``basis`` (rows), assuming invariance."""
    E, piv = rref(basis)
    E = E[: len(piv)]
    imgs = [_mat_vec(T, b) for b in E]
    M = [[img[p] for p in piv] for img in imgs]  # row i: coords of T e_i
    for img, row in zip(imgs, M):
        recon = [sum((c * e[i] for c, e in zip(row, E)), Fraction(0)) for i in range(len(img))]
        if recon != img:
            raise EigenformError("subspace is not Hecke-stable")
    return E, transpose(M)


def _sympy_matrix(M):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M])


def _poly_eval_matrix(poly, M):
    n = M.shape[0]
    R = sympy.zeros(n, n)
    for c in sympy.Poly(poly).all_coeffs():
        R = R * M + c * sympy.eye(n)
    return R


def eigenforms(module: BrandtModule, hecke_bound: int = 10, check_bound: int | None = None, dps: int = 40) -> list[EigenformRecord]:
    """Simultaneous eigenvectors of ``T_p`` (``p <= hecke_bound``, ``p`` prime to ``N``)
    on the cusp space, sorted by ``(a_2, a_3, ...)``."""
    if hecke_bound < 2:
        raise ValueError("hecke_bound must be at least 2")
    N = module.classes.order.discriminant()
    split_primes = [p for p in primes_up_to(hecke_bound) if N % p]
    extra = [p for p in primes_up_to(check_bound or 2 * hecke_bound + 3) if N % p and p not in split_primes]
    S = module.cusp_subspace()
    if not S:
        return []
    x = sympy.Symbol("x")
    operators = [(f"T_{p}", module.hecke(p)) for p in split_primes]
    operators += [(f"W_{q}", module.atkin_lehner_matrix(q)) for q in sorted(factor(N))]
    # refine into pieces stable under every operator
    pieces = [S]
    for _, T in operators:
        new = []
        for piece in pieces:
            E, M = _restrict(T, piece)
            sM = _sympy_matrix(M)
            for f, mult in sympy.factor_list(sM.charpoly(x).as_expr(), x)[1]:
                K = _poly_eval_matrix(f**mult, sM).nullspace()
                coeffs = [[Fraction(int(c.p), int(c.q)) for c in kv] for kv in K]
                new.append([[sum((c * e[i] for c, e in zip(b, E)), Fraction(0)) for i in range(module.dim)] for b in coeffs])
        pieces = new
    records = []
    for piece in pieces:
        found = _split_piece(piece, operators, x)
        old = found is None
        if old:
            # a repeated system of eigenvalues: newforms occur once, so this is old
            piece = _cyclic_span(module, piece[0], [T for name, T in operators if name.startswith("T_")])
            found = _split_piece(piece, operators[: len(split_primes)], x)
            if found is None:
                raise EigenformError(f"operators up to {hecke_bound} do not split the cusp space; raise the bound")
        T, f = found
        if sympy.degree(f, x) == 1:
            new = [_exact_record(module, piece[0], split_primes + extra, str(f))]
        else:
            new = _numeric_records(module, piece, T, split_primes + extra, str(f), dps)
        for r in new:
            if old:
                r.newform = False
            else:
                _attach_atkin_lehner(r)
        records.extend(new)
    records.sort(key=lambda r: tuple(float(r.eigenvalues[p]) for p in sorted(r.eigenvalues)))
    return records


def _split_piece(piece, operators, x):
    """First operator whose characteristic polynomial on ``piece`` is irreducible and squarefree."""
    for name, T in operators:
        E, M = _restrict(T, piece)
        cp = sympy.factor_list(_sympy_matrix(M).charpoly(x).as_expr(), x)[1]
        if len(cp) == 1 and cp[0][1] == 1:
            return T, cp[0][0]
    return None


def _cyclic_span(module, v, operators):
    """Smallest subspace containing ``v`` and stable under ``operators``."""
    span = [v]
    E, piv = rref(span)
    frontier = [v]
    while frontier:
        w = frontier.pop()
        for T in operators:
            u = _mat_vec(T, w)
            E2, piv2 = rref(E[: len(piv)] + [u])
            if len(piv2) > len(piv):
                E, piv = E2, piv2
                frontier.append(u)
    return E[: len(piv)]


def _exact_record(module, v, primes, poly) -> EigenformRecord:
    ev = {}
    for p in primes:
        Tv = _mat_vec(module.hecke(p), v)
        i = next(i for i, c in enumerate(v) if c)
        lam = Tv[i] / v[i]
        if Tv != [lam * c for c in v]:
            raise EigenformError(f"vector is not a T_{p} eigenvector")
        ev[p] = lam
    # normalize: first nonzero coordinate 1
    i = next(i for i, c in enumerate(v) if c)
    v = [c / v[i] for c in v]
    return EigenformRecord(module, v, ev, True, poly)


def _numeric_records(module, piece, T0, primes, poly, dps) -> list[EigenformRecord]:
    with mpmath.workdps(dps):
        E, M = _restrict(T0, piece)
        n = len(E)
        A = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in M])
        vals, vecs = mpmath.eig(A)
        out = []
        for j in range(n):
            lam = vals[j]
            if abs(mpmath.im(lam)) > mpmath.mpf(10) ** (-dps // 2):
                raise EigenformError("non-real Hecke eigenvalue; height pairing is not positive")
            c = [mpmath.re(vecs[i, j]) for i in range(n)]
            vec = [sum(c[i] * (mpmath.mpf(E[i][t].numerator) / E[i][t].denominator) for i in range(n)) for t in range(module.dim)]
            piv = max(range(module.dim), key=lambda t: abs(vec[t]))
            vec = [x / vec[piv] for x in vec]
            ev = {}
            for p in primes:
                T = module.hecke(p)
                Tv = [sum((mpmath.mpf(a.numerator) / a.denominator) * b for a, b in zip(row, vec) if a) for row in T]
                lam_p = Tv[piv] / vec[piv]
                resid = max(abs(a - lam_p * b) for a, b in zip(Tv, vec))
                if resid > mpmath.mpf(10) ** (-dps // 2) * (1 + abs(lam_p)):
                    raise EigenformError(f"numeric vector is not a T_{p} eigenvector")
                ev[p] = lam_p
            out.append(EigenformRecord(module, vec, ev, False, poly))
        return out


def _attach_atkin_lehner(rec: EigenformRecord) -> None:
    module = rec.module
    ram = set(module.algebra.ramified_primes())
    for p in sorted(module.atkin_lehner_data):
        eta = atkin_lehner(module, rec.vector, p)
        rec.atkin_lehner[p] = eta
        rec.epsilon_g[p] = -eta if p in ram else eta
    N = rec.N
    fac = factor(N)
    wminus = [p for p, s in rec.epsilon_g.items() if s == -1]
    rec.hypotheses = {
        "H1": len(wminus) % 2 == 1,
        "H2": all(fac[p] % 2 == 1 for p in wminus),
        "H3": module.k % 2 == 0,
    }


def atkin_lehner(module: BrandtModule, vec, p: int) -> int:
    W = module.atkin_lehner_matrix(p)
    exact = all(isinstance(c, Fraction) for c in vec)
    if exact:
        Wv = _mat_vec(W, vec)
        for s in (1, -1):
            if Wv == [s * c for c in vec]:
                return s
        raise EigenformError(f"form is not a w_{p} eigenvector")
    Wv = [sum((mpmath.mpf(a.numerator) / a.denominator) * b for a, b in zip(row, vec) if a) for row in W]
    scale = max(abs(c) for c in vec)
    for s in (1, -1):
        if max(abs(a - s * b) for a, b in zip(Wv, vec)) < mpmath.mpf(10) ** (-15) * scale:
            return s
    raise EigenformError(f"form is not a w_{p} eigenvector")


def epsilon_set(N: int, atkin: dict[int, int]) -> list[dict[int, int]]:
    """All sign maps with ``eps(p)^{v_p(N)} = eps_g(p)``."""
    fac = factor(N)
    choices = []
    for p in sorted(fac):
        v = fac[p]
        s = atkin[p]
        if v % 2 == 0:
            if s == -1:
                raise HypothesisError(f"H2 fails at p = {p}: eps_g(p) = -1 with even exponent {v}")
            choices.append([(p, 1), (p, -1)])
        else:
            choices.append([(p, s)])
    out = [{}]
    for ch in choices:
        out = [{**d, p: s} for d in out for p, s in ch]
    return [dict(sorted(d.items())) for d in out]


def lower_levels(R) -> list[tuple[int, dict[int, int]]]:
    """Levels one local step below ``R`` inside the same algebra."""
    fac = factor(R.discriminant())
    ram = set(R.algebra.ramified_primes())
    out = []
    for p, data in sorted(R.local.items()):
        v = fac[p]
        if data["type"] == "eichler":
            drop = 1
        elif v >= 3 or (v == 2 and p not in ram):
            drop = 2
        else:
            continue
        M = R.discriminant() // p**drop
        eps = {q: 1 if R.local[q]["type"] == "eichler" else -1 for q in factor(M)}
        out.append((M, eps))
    return out


def _lower_charpolys(R, k: int, primes) -> list[dict]:
    x = sympy.Symbol("x")
    out = []
    for M, eps in lower_levels(R):
        low = BrandtModule(ideal_classes(build_order(R.algebra, M, eps)), k)
        S = low.cusp_subspace()
        if not S:
            out.append(None)
            continue
        polys = {}
        for p in primes:
            _, T = _restrict(low.hecke(p), S)
            polys[p] = sympy.Poly(_sympy_matrix(T).charpoly(x).as_expr(), x)
        out.append(polys)
    return out


def mark_oldforms(records, hecke_bound: int = 10) -> None:
    """Set ``newform`` on each record: a form is old when, at some lower
    level, every ``T_p`` (``p <= hecke_bound``) has ``a_p`` as an eigenvalue."""
    if not records:
        return
    module = records[0].module
    R = module.classes.order
    N = R.discriminant()
    primes = [p for p in primes_up_to(hecke_bound) if N % p]
    lower = _lower_charpolys(R, module.k, primes)
    for rec in records:
        if rec.newform is False:
            continue
        old = False
        for polys in lower:
            if polys is None:
                continue
            if all(_is_root(polys[p], rec.eigenvalues[p]) for p in primes):
                old = True
                break
        rec.newform = not old


def _is_root(poly, value) -> bool:
    if isinstance(value, Fraction):
        return poly.eval(sympy.Rational(value.numerator, value.denominator)) == 0
    coeffs = [mpmath.mpf(int(c.p)) / int(c.q) for c in poly.all_coeffs()]
    scale = sum(abs(c) * abs(value) ** i for i, c in enumerate(reversed(coeffs)))
    return abs(mpmath.polyval(coeffs, value)) <= mpmath.mpf(10) ** (-15) * scale


# ---------------------------------------------------------------------------
# Hecke eigenvalues in bulk (floating point)


def _eval_points(space: HarmonicSpace):
    """``2k+1`` small trace-zero points whose evaluation functionals are independent."""
    import itertools

    pts = []
    rows = []
    for c in itertools.product(range(-2, 3), repeat=3):
        if not any(c):
            continue
        vals = space.basis_values(c)
        trial = rows + [vals]
        if len(nullspace(transpose(trial), len(trial))) == 0:
            rows = trial
            pts.append(c)
        if len(pts) == space.dim:
            return pts, rows
    raise AssertionError("could not find evaluation points")


def _qmul(A, p, q):
    a, b = A.a, A.b
    t1, x1, y1, z1 = p
    t2, x2, y2, z2 = q
    return (
        t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
        t1 * x2 + x1 * t2 - b * y1 * z2 + b * z1 * y2,
        t1 * y2 + y1 * t2 + a * x1 * z2 - a * z1 * x2,
        t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
    )


def hecke_pairings(module: BrandtModule, vecs, bound: int) -> np.ndarray:
    """``out[i, n] = <T_n phi_i, phi_i>`` for ``n <= bound`` in floating point.

    One lattice enumeration per pair of classes serves every vector.
    """
    A = module.algebra
    sp = module.space
    k = module.k
    I = module.classes.ideals
    vals = [[np.array([float(c) for c in v]) for v in module.values(vec)] for vec in vecs]
    polys = [[sp.basis_float.T @ v for v in vv] for vv in vals]  # monomial coefficients of phi(x)
    pts, rows = _eval_points(sp)
    Ef = np.array([[float(c) for c in r] for r in rows])  # E[j, i] = P_i(omega_j)
    Gf = sp.gram_float
    out = np.zeros((len(vecs), bound + 1))
    live = lambda x: any(np.any(vv[x]) for vv in vals)
    for x in range(len(I)):
        if not live(x):
            continue
        cx = [np.linalg.solve(Ef.T, Gf @ vv[x]) for vv in vals]  # phi(x) = sum c_j P_{omega_j}
        for y in range(len(I)):
            if not live(y):
                continue
            M = left_divide(A, I[y], I[x])
            scale = lattice_norm(A, I[y]) / lattice_norm(A, I[x])
            G = lattice_gram(A, M.basis)
            G2 = [[2 * g * scale for g in row] for row in G]
            if any(g.denominator != 1 for row in G2 for g in row):
                raise AssertionError("scaled norm form is not integral")
            coords, norms = short_vectors([[int(g) for g in row] for row in G2], 2 * bound)
            norms = norms // 2
            keep = norms > 0
            coords, norms = coords[keep], norms[keep]
            wt = 0.5 / (module.weights[x] * module.weights[y])
            if k == 0:
                counts = np.bincount(norms, minlength=bound + 1)[: bound + 1]
                for i, vv in enumerate(vals):
                    out[i] += wt * vv[y][0] * vv[x][0] * float(sp.gram[0][0]) * counts
                continue
            Bf = np.array([[float(c) for c in r] for r in M.basis])
            gam = coords.astype(float) @ Bf
            g = tuple(gam[:, i] for i in range(4))
            gbar = (g[0], -g[1], -g[2], -g[3])
            sk = float(scale) ** k
            contrib = np.zeros((len(vecs), len(norms)))
            for j, pt in enumerate(pts):
                w = (0.0, float(pt[0]), float(pt[1]), float(pt[2]))
                u = _qmul(A, _qmul(A, g, w), gbar)
                pw = [[np.ones_like(u[c + 1])] for c in range(3)]
                for c in range(3):
                    for _ in range(k):
                        pw[c].append(pw[c][-1] * u[c + 1])
                for i in range(len(vecs)):
                    if not cx[i][j]:
                        continue
                    val = np.zeros(len(norms))
                    for coef, m in zip(polys[i][y], sp.monomials):
                        if coef:
                            val += coef * (pw[0][m[0]] * pw[1][m[1]] * pw[2][m[2]])
                    contrib[i] += cx[i][j] * sk * val
            for i in range(len(vecs)):
                out[i] += wt * np.bincount(norms, weights=contrib[i], minlength=bound + 1)[: bound + 1]
    return out


def eigenvalue_series(rec: EigenformRecord, bound: int) -> dict[int, float]:
    """Hecke eigenvalues ``a_p`` for primes ``p <= bound`` prime to ``N``, from
    ``<T_p phi, phi> / <phi, phi>`` in floating point; rounded to integers when
    the eigenform is rational."""
    return eigenvalue_series_many([rec], bound)[0]


def eigenvalue_series_many(records, bound: int) -> list[dict[int, float]]:
    """``eigenvalue_series`` for several eigenforms of one module at once."""
    if not records:
        return []
    module = records[0].module
    pairings = hecke_pairings(module, [[float(c) for c in r.vector] for r in records], bound)
    N = module.classes.order.discriminant()
    result = []
    for rec, row in zip(records, pairings):
        norm = float(module.height(rec.vector, rec.vector))
        out = {}
        for p in primes_up_to(bound):
            if N % p == 0:
                continue
            a = row[p] / norm
            if rec.exact:
                r = round(a)
                if abs(a - r) > 1e-6 * max(1.0, abs(a)):
                    raise EigenformError(f"a_{p} = {a} is not integral for a rational eigenform")
                a = r
                if p in rec.eigenvalues and Fraction(r) != rec.eigenvalues[p]:
                    raise EigenformError(f"bulk a_{p} disagrees with the exact Hecke matrix")
            elif p in rec.eigenvalues and abs(a - float(rec.eigenvalues[p])) > 1e-6 * max(1.0, abs(a)):
                raise EigenformError(f"bulk a_{p} disagrees with the Hecke matrix")
            out[p] = a
        result.append(out)
    return result
