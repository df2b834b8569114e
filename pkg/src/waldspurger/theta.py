"""Theta lift of quaternionic forms to weight ``3/2 + k``.

For a form ``phi`` and ``n >= 0`` put
``Lambda(n) = sum_x (1/w_x) sum_{y in L_x, -disc(y) = n} phi(x)(y)``,
where ``L_x`` is the image of the right order ``R_x`` in ``B/Q``.  The
coefficient at a discriminant pair ``(D, a)`` is
``lambda(D, a) = a^{-(k+1)} Lambda(D a^2)``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .brandt import BrandtModule
from .exact import (
    Lattice,
    Q,
    TernaryForm,
    class_number_imag_quadratic,
    common_denominator,
    enumerate_value,
    factor,
    is_fundamental_discriminant,
    kronecker,
    omega,
    short_vectors,
    to_mpf,
    vec_mat,
)
from .quaternion import QuatAlgebra


class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


# ---------------------------------------------------------------------------
# discriminant pairs


@dataclass(frozen=True, order=True)
class DiscPair:
    D: Fraction
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "D", Q(self.D))
        object.__setattr__(self, "a", Q(self.a))
        if self.D <= 0 or self.a <= 0:
            raise ValueError("D and a must be positive")

    @property
    def n(self) -> Fraction:
        """``D a^2``; an integer for discriminant pairs."""
        return self.D * self.a * self.a

    @property
    def d(self) -> int:
        if self.n.denominator != 1:
            raise ValueError("not a discriminant pair")
        return -int(self.n)

    def is_discriminant(self) -> bool:
        return is_discriminant(self.D, self.a)

    def is_fundamental(self) -> bool:
        return self.is_discriminant() and is_fundamental_discriminant(self.d)


def is_discriminant(D, a) -> bool:
    n = Q(D) * Q(a) ** 2
    return n.denominator == 1 and n > 0 and (-int(n)) % 4 in (0, 1)


def fundamental_pair(D) -> DiscPair:
    """The pair ``(D, a)`` with ``-D a^2`` a fundamental discriminant."""
    D = Q(D)
    u, v = D.numerator, D.denominator
    m, f = -u * v, 1
    for p, e in factor(u * v).items():
        f *= p ** (e // 2)
    m //= f * f
    scale = 1 if m % 4 == 1 else 2
    return DiscPair(D, Fraction(scale * v, f))


# ---------------------------------------------------------------------------
# ternary lattices L_x


@dataclass
class TernaryData:
    lattice: Lattice  # in coordinates (i, j, ij)
    form: TernaryForm  # -disc in those coordinates
    gram2: list  # 2 x Gram of -disc on the lattice basis (even integral)
    basis_int: np.ndarray  # lattice basis times ``den``
    den: int


def trace_zero_lattice(order_lattice: Lattice) -> Lattice:
    return Lattice([row[1:] for row in order_lattice.basis])


def _ternary(A: QuatAlgebra, order_lattice: Lattice) -> TernaryData:
    L = trace_zero_lattice(order_lattice)
    s = (Fraction(-4 * A.a), Fraction(-4 * A.b), Fraction(4 * A.a * A.b))
    form = TernaryForm([[s[i] if i == j else Fraction(0) for j in range(3)] for i in range(3)])
    G = form.restrict(L)
    G2 = [[2 * g for g in row] for row in G]
    if any(g.denominator != 1 for row in G2 for g in row):
        raise AssertionError("-disc is not integral on L_x")
    den = common_denominator([c for row in L.basis for c in row])
    B = np.array([[int(c * den) for c in row] for row in L.basis], dtype=np.int64)
    return TernaryData(L, form, [[int(g) for g in row] for row in G2], B, den)


def ternary_data(module: BrandtModule) -> list[TernaryData]:
    cached = getattr(module, "_ternary", None)
    if cached is None:
        cached = [_ternary(module.algebra, R) for R in module.classes.right_orders]
        module._ternary = cached
    return cached


# ---------------------------------------------------------------------------
# coefficients


def _point(td: TernaryData, coords) -> tuple:
    return tuple(vec_mat([Fraction(c) for c in coords], [list(r) for r in td.lattice.basis]))


def representations(module: BrandtModule, x: int, n) -> list[tuple]:
    """Points ``y`` of ``L_x`` (coordinates in ``i, j, ij``) with ``-disc(y) = n``."""
    td = ternary_data(module)[x]
    return [_point(td, c) for c in enumerate_value(td.form, td.lattice, n)]


def theta_coefficient(module: BrandtModule, vec, pair: DiscPair) -> Fraction:
    """``lambda(D, a)`` for the form with exact module coordinates ``vec``."""
    if not pair.is_discriminant():
        return Fraction(0)
    n = int(pair.n)
    sp = module.space
    vals = module.values(vec)
    total = Fraction(0)
    for x in range(len(module)):
        if any(vals[x]):
            s = sum((sp.evaluate(vals[x], y) for y in representations(module, x, n)), Fraction(0))
            total += s / module.weights[x]
    return total / pair.a ** (module.k + 1)


def monomial_sums(module: BrandtModule, bound: int) -> list[list[list[Fraction]]]:
    """``S[x][n][m] = sum_{y in L_x, -disc(y) = n} y^m`` exactly, ``n <= bound``."""
    k = module.k
    mons = np.array(module.space.monomials, dtype=np.int64)
    out = []
    for td in ternary_data(module):
        coords, norms = short_vectors(td.gram2, 2 * bound)
        norms = norms // 2
        pts = coords @ td.basis_int  # integer points scaled by den
        if k:
            vals = np.ones((len(pts), len(mons)), dtype=object)
            P = pts.astype(object)
            for j, m in enumerate(mons):
                vals[:, j] = P[:, 0] ** int(m[0]) * P[:, 1] ** int(m[1]) * P[:, 2] ** int(m[2])
        else:
            vals = np.ones((len(pts), 1), dtype=object)
        table = [[0] * len(mons) for _ in range(bound + 1)]
        dk = td.den**k
        for n, row in zip(norms.tolist(), vals.tolist()):
            t = table[n]
            for j, v in enumerate(row):
                t[j] += v
        out.append([[Fraction(v, dk) for v in t] for t in table])
    return out


def basis_series(module: BrandtModule, bound: int, sums=None) -> list[list[Fraction]]:
    """``Lambda(n)`` for each module basis vector, exactly."""
    sums = sums or monomial_sums(module, bound)
    sp = module.space
    out = []
    for x, B in enumerate(module.blocks):
        w = module.weights[x]
        for b in B:
            poly = sp.polynomial(b)
            out.append([sum((c * t for c, t in zip(poly, sums[x][n]) if c and t), Fraction(0)) / w for n in range(bound + 1)])
    return out


def theta_series(module: BrandtModule, vec, bound: int, sums=None, basis=None) -> list:
    """``Lambda(n)`` for ``0 <= n <= bound``; exact when ``vec`` is rational."""
    basis = basis or basis_series(module, bound, sums)
    if all(isinstance(c, (int, Fraction)) for c in vec):
        return [sum((c * b[n] for c, b in zip(vec, basis) if c), Fraction(0)) for n in range(bound + 1)]
    mp = [to_mpf(c) for c in vec]
    return [sum(c * to_mpf(b[n]) for c, b in zip(mp, basis) if b[n]) for n in range(bound + 1)]


def _rescale(v, a: Fraction, k: int):
    """``v / a^(k+1)`` for exact or floating ``v``."""
    f = a ** (k + 1)
    return v / f if isinstance(v, Fraction) else v / to_mpf(f)


@dataclass
class HalfIntegralForm:
    level: int
    k: int
    coefficients: dict  # DiscPair -> value
    constant: object
    series: list  # Lambda(n)
    zero_by_parity: bool = False
    provenance: dict = field(default_factory=dict)

    @property
    def weight(self) -> Fraction:
        return Fraction(3, 2) + self.k

    def coefficient(self, pair: DiscPair):
        if pair in self.coefficients:
            return self.coefficients[pair]
        if not pair.is_discriminant():
            return 0
        n = int(pair.n)
        if n >= len(self.series):
            raise KeyError(f"coefficient at D a^2 = {n} beyond the computed bound")
        return _rescale(self.series[n], pair.a, self.k)

    def rows(self):
        for pair in sorted(self.coefficients):
            yield pair, self.coefficients[pair]


def theta_lift(module: BrandtModule, vec, bound: int, sums=None, basis=None) -> HalfIntegralForm:
    N = module.classes.order.discriminant()
    k = module.k
    if k % 2:
        return HalfIntegralForm(4 * N, k, {}, Fraction(0), [Fraction(0)] * (bound + 1), zero_by_parity=True)
    series = theta_series(module, vec, bound, sums, basis)
    coeffs = {}
    for D in range(1, bound + 1):
        for f in range(1, math.isqrt(bound) + 1):
            for a in {Fraction(1, f), Fraction(f)}:
                pair = DiscPair(D, a)
                if pair.n <= bound and pair.is_discriminant():
                    coeffs[pair] = _rescale(series[int(pair.n)], a, k)
    return HalfIntegralForm(4 * N, k, coeffs, series[0], series)


# ---------------------------------------------------------------------------
# special points and the eta form


@dataclass
class SpecialPointSet:
    pair: DiscPair
    omega: tuple  # fixed trace-zero quaternion with -disc = D
    points: list  # (class x, y, gamma, stabilizer order)

    def __len__(self):
        return len(self.points)


def _conjugator(A: QuatAlgebra, y, w0):
    """Nonzero ``g`` with ``g w0 g^{-1} = y`` (both pure with equal norm)."""
    for e in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
        e = tuple(map(Fraction, e))
        g = tuple(p + q for p, q in zip(A.mul(y, e), A.mul(e, w0)))
        if any(g):
            return g
    raise AssertionError("no conjugator found")


def special_points(module: BrandtModule, pair: DiscPair, omega0=None) -> SpecialPointSet:
    """``Gamma_x``-orbit representatives of ``{y in a^{-1} L_x : -disc(y) = D}``."""
    A = module.algebra
    if not pair.is_discriminant():
        return SpecialPointSet(pair, None, [])
    n = int(pair.n)
    a = pair.a
    points = []
    w0 = omega0
    for x in range(len(module)):
        reps = representations(module, x, n)
        units = module.classes.units[x]
        seen = set()
        for ell in reps:
            y = (Fraction(0),) + tuple(c / a for c in ell)
            if y in seen:
                continue
            orbit = set()
            stab = 0
            for u in units:
                ui = A.inv(u)
                z = A.mul(A.mul(u, y), ui)
                orbit.add(z)
                if z == y:
                    stab += 1
            seen |= orbit
            if w0 is None:
                w0 = y
            points.append((x, y, _conjugator(A, y, w0), stab))
    return SpecialPointSet(pair, w0, points)


def eta_check(module: BrandtModule, vec, pair: DiscPair, points: SpecialPointSet | None = None):
    """``(1/a) <phi, eta_{D,a}>`` with ``eta = sum (1/|Stab|) phi_{x, P_D . gamma^{-1}}``."""
    if not pair.is_discriminant():
        return Fraction(0)
    pts = points or special_points(module, pair)
    if not pts.points:
        return Fraction(0)
    A = module.algebra
    sp = module.space
    PD = sp.gegenbauer_vector(pts.omega)
    vals = module.values(vec)
    total = Fraction(0)
    for x, y, g, stab in pts.points:
        v = sp.act(A.inv(g), PD)
        total += sp.inner(vals[x], v) / stab
    return total / pair.a


def expected_special_count(N: int, pair: DiscPair, eps: dict[int, int] | None = None) -> int:
    """``2^omega(N) h(d)``; with ``eps``, 0 unless ``chi_d(p) = eps(p)`` for all ``p | N``."""
    if eps is not None and any(kronecker(pair.d, p) != s for p, s in eps.items()):
        return 0
    return 2 ** omega(N) * class_number_imag_quadratic(pair.d)


def check_theta_eta(module: BrandtModule, vec, pair: DiscPair):
    lam = theta_coefficient(module, vec, pair)
    eta = eta_check(module, vec, pair)
    if lam != eta:
        raise ConsistencyError(f"theta coefficient {lam} != eta pairing {eta} at {pair}")
    return lam


# ---------------------------------------------------------------------------
# Shimura relation


def shimura_consistency(f: HalfIntegralForm, p: int, a_p, pairs=None) -> tuple[bool, tuple | None]:
    """Check ``Lambda(p^2 n) + chi_{-n}(p) p^k Lambda(n) + p^{2k+1} Lambda(n/p^2) = a_p Lambda(n)``
    at every pair (default: all fundamental pairs with ``p^2 D a^2`` in range)."""
    k = f.k
    series = f.series
    bound = len(series) - 1
    if pairs is None:
        pairs = [pr for pr in f.coefficients if pr.is_fundamental() and pr.a == 1 and p * p * pr.n <= bound]
    for pr in sorted(pairs):
        n = int(pr.n)
        if p * p * n > bound:
            raise KeyError(f"need Lambda({p * p * n}) for the relation at {pr}")
        lower = series[n // (p * p)] if n % (p * p) == 0 else 0
        lhs = series[p * p * n] + kronecker(-n, p) * p**k * series[n] + p ** (2 * k + 1) * lower
        rhs = a_p * series[n]
        if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
            ok = lhs == rhs
        else:
            ok = abs(lhs - rhs) <= 1e-8 * (1 + abs(rhs))
        if not ok:
            return False, (pr, p)
    return True, None


# ---------------------------------------------------------------------------
# export


def export_coefficients(f: HalfIntegralForm, path, header: dict, fundamental_only: bool = True) -> None:
    """Write ``d, D, a, lambda`` and ``N(a) lambda^2 / D^{k+1/2}`` rows as CSV or JSON."""
    rows = []
    for pair, val in f.rows():
        if fundamental_only and not pair.is_fundamental():
            continue
        norm = to_mpf(pair.a) * to_mpf(val) ** 2 / to_mpf(pair.D) ** (f.k + mpmath.mpf(1) / 2)
        rows.append({"d": pair.d, "D": str(pair.D), "a": str(pair.a), "lambda": _text(val), "lambda_sq_normalized": mpmath.nstr(norm, 20)})
    if str(path).endswith(".json"):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"version": 1, "header": header, "rows": rows}, fh, indent=1, sort_keys=True)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for key, val in sorted(header.items()):
                fh.write(f"# {key} = {val}\n")
            w = csv.DictWriter(fh, fieldnames=["d", "D", "a", "lambda", "lambda_sq_normalized"])
            w.writeheader()
            w.writerows(rows)


def _text(v) -> str:
    return str(v) if isinstance(v, Fraction) else mpmath.nstr(v, 25)
