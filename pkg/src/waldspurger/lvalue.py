"""Central values of ``L(s, g) L(s, g x chi_d)`` and the ratio test.

L-series are written arithmetically, ``L(s) = sum a_n n^{-s}`` with centre
``kappa/2`` where ``kappa = 2 + 2k``; the completed function
``(sqrt(Q)/2pi)^s Gamma(s) L(s)`` has sign ``w`` under ``s -> kappa - s``.
This is the same central value as the analytic normalisation at ``1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .brandt import EigenformRecord, eigenvalue_series
from .exact import factor, kronecker, omega, primes_up_to, to_mpf
from .harmonic import c_k
from .theta import DiscPair, HalfIntegralForm, fundamental_pair


class CoefficientError(ValueError):
    """Not enough Dirichlet coefficients for the requested precision."""


@dataclass
class NewformData:
    N: int
    k: int
    a: list  # a[n] for 0 <= n <= nmax (a[0] unused)
    eps_g: dict  # p -> Atkin-Lehner eigenvalue of g
    local_at_N: dict = field(default_factory=dict)  # p -> a_p used at p | N

    @property
    def weight(self) -> int:
        return 2 + 2 * self.k

    @property
    def nmax(self) -> int:
        return len(self.a) - 1

    @property
    def sign(self) -> int:
        """Root number ``(-1)^{k+1} prod eps_g(p)``."""
        return (-1) ** (self.k + 1) * math.prod(self.eps_g.values())


def local_coefficient(p: int, v: int, k: int, eps_gp: int):
    """``a_p`` at ``p | N``: ``-eps_g(p) p^k`` when ``p || N``, else 0."""
    return -eps_gp * p**k if v == 1 else 0


def coefficients(rec: EigenformRecord, nmax: int, ap: dict | None = None) -> NewformData:
    """``a_n`` for ``n <= nmax`` from prime eigenvalues by multiplicativity."""
    N, k = rec.N, rec.k
    fac = factor(N)
    ap = dict(ap or {})
    for p, v in rec.eigenvalues.items():
        ap.setdefault(p, v)
    local = {}
    for p, v in fac.items():
        ap[p] = local_coefficient(p, v, k, rec.epsilon_g[p])
        local[p] = ap[p]
    exact = rec.exact
    conv = (lambda x: int(x)) if exact else to_mpf
    one = 1 if exact else mpmath.mpf(1)
    a = [0] * (nmax + 1)
    a[1] = one
    # prime powers
    pp = {}
    for p in primes_up_to(nmax):
        if p not in ap:
            raise CoefficientError(f"missing eigenvalue a_{p}")
        x = conv(ap[p])
        seq = [one, x]
        q = p * p
        while q <= nmax:
            nxt = x * seq[-1] if N % p == 0 else x * seq[-1] - p ** (2 * k + 1) * seq[-2]
            seq.append(nxt)
            q *= p
        pp[p] = seq
    spf = list(range(nmax + 1))
    for p in primes_up_to(math.isqrt(nmax)):
        for m in range(p * p, nmax + 1, p):
            if spf[m] == m:
                spf[m] = p
    for n in range(2, nmax + 1):
        p = spf[n]
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        a[n] = pp[p][e] * a[m]
    return NewformData(N, k, a, dict(rec.epsilon_g), local)


# ---------------------------------------------------------------------------
# approximate functional equation


def _upper_gamma_int(s: int, x):
    """``Gamma(s, x)`` for a positive integer ``s``."""
    term = mpmath.mpf(1)
    total = mpmath.mpf(1)
    for j in range(1, s):
        term *= x / j
        total += term
    return mpmath.factorial(s - 1) * mpmath.exp(-x) * total


def truncation_bound(kappa: int, conductor: int, M: int, w_abs: int = 1):
    """Bound for the omitted terms ``n > M`` of the central AFE sum, using
    ``|a_n| <= d(n) n^{(kappa-1)/2}`` and ``d(n) <= 2 sqrt(n)``."""
    s = kappa // 2
    c = 2 * mpmath.pi / mpmath.sqrt(conductor)
    return 2 * (1 + w_abs) * _upper_gamma_int(s + 1, c * M) / (c * mpmath.factorial(s - 1))


def terms_needed(kappa: int, conductor: int, eps_abs) -> int:
    lo, hi = 1, 16
    while truncation_bound(kappa, conductor, hi) > eps_abs:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if truncation_bound(kappa, conductor, mid) > eps_abs:
            lo = mid + 1
        else:
            hi = mid
    return lo


def coefficients_needed(kappa: int, conductor: int, eps_abs) -> int:
    """``nmax`` covering ``central_value`` at ``eps_abs`` including its self-test."""
    return int(terms_needed(kappa, conductor, mpmath.mpf(eps_abs) / 10) * 1.25) + 2


@dataclass
class CentralValue:
    value: object  # mpf
    error: object  # mpf bound on truncation + rounding
    sign: int
    conductor: int
    terms: int
    residual: object  # functional-equation self-test residual


def _twisted(a: list, d: int | None, n: int):
    if d is None:
        return a[n]
    return a[n] * kronecker(d, n)


def _gamma_upper(s, x):
    if s == int(s) and s > 0:
        return _upper_gamma_int(int(s), x)
    return mpmath.gammainc(s, x)


def completed_value(g: NewformData, d: int | None, conductor: int, w: int, s, t, M: int):
    """``Lambda(s)`` via the split at ``t``; independent of ``t`` iff ``w`` is right."""
    kappa = g.weight
    c = 2 * mpmath.pi / mpmath.sqrt(conductor)
    total = mpmath.mpf(0)
    for n in range(1, M + 1):
        an = _twisted(g.a, d, n)
        if not an:
            continue
        x = c * n
        total += to_mpf(an) * (x ** (-s) * _gamma_upper(s, x * t) + w * x ** (-(kappa - s)) * _gamma_upper(kappa - s, x / t))
    return total


def central_value(g: NewformData, d: int | None = None, eps_abs=1e-9, sign: int | None = None, self_test: bool = True) -> CentralValue:
    """``L(kappa/2, g)`` or ``L(kappa/2, g x chi_d)`` with a truncation bound."""
    kappa = g.weight
    s = kappa // 2
    if d is None:
        conductor = g.N
        w = g.sign if sign is None else sign
    else:
        if math.gcd(d, g.N) != 1:
            raise ValueError("twist must be coprime to the level")
        conductor = g.N * d * d
        w = g.sign * kronecker(d, -g.N) if sign is None else sign
    eps_abs = mpmath.mpf(eps_abs)
    M = terms_needed(kappa, conductor, eps_abs / 10)
    if M > g.nmax:
        raise CoefficientError(f"need {M} coefficients for conductor {conductor}, have {g.nmax}")
    c = 2 * mpmath.pi / mpmath.sqrt(conductor)
    total = mpmath.mpf(0)
    if w == 1:
        for n in range(1, M + 1):
            an = _twisted(g.a, d, n)
            if an:
                total += to_mpf(an) * mpmath.mpf(n) ** (-s) * _upper_gamma_int(s, c * n)
        total *= 2 / mpmath.factorial(s - 1)
    err = truncation_bound(kappa, conductor, M)
    residual = mpmath.mpf(0)
    if self_test:
        M2 = min(g.nmax, int(M * 1.25) + 1)
        lam1 = completed_value(g, d, conductor, w, mpmath.mpf(s), mpmath.mpf(1), M2)
        lam2 = completed_value(g, d, conductor, w, mpmath.mpf(s), mpmath.mpf(6) / 5, M2)
        scale = c**s / mpmath.factorial(s - 1)
        residual = abs(lam1 - lam2) * scale
    return CentralValue(total, err, w, conductor, M, residual)


def detect_sign(g: NewformData, d: int | None = None, s_test=None) -> int:
    """Choose ``w`` in ``{+1, -1}`` by ``t``-independence of the completed value
    at a non-central point."""
    kappa = g.weight
    conductor = g.N if d is None else g.N * d * d
    s = mpmath.mpf(kappa) / 2 + mpmath.mpf(1) / 7 if s_test is None else s_test
    M = min(g.nmax, terms_needed(kappa, conductor, mpmath.mpf(10) ** -12) + 10)
    res = {}
    for w in (1, -1):
        v1 = completed_value(g, d, conductor, w, s, mpmath.mpf(1), M)
        v2 = completed_value(g, d, conductor, w, s, mpmath.mpf(6) / 5, M)
        res[w] = abs(v1 - v2)
    return min(res, key=res.get)


# ---------------------------------------------------------------------------
# constants and the report


def C_N(N: int) -> int:
    return math.prod((p + 1) * p ** (v - 1) for p, v in factor(N).items())


def constants(N: int, k: int, pair: DiscPair) -> dict:
    return {"C_N": Fraction(C_N(N)), "c_k": c_k(k), "c_D": pair.a}


def permitted(D, eps: dict[int, int], N: int) -> bool:
    pair = fundamental_pair(D)
    d = pair.d
    if math.gcd(d, 2 * N) != 1:
        return False
    return all(kronecker(d, p) == s for p, s in eps.items())


@dataclass
class ReportRow:
    pair: DiscPair
    d: int
    L_g: object
    L_twist: object
    L_D: object
    error: object
    lam: object
    c_D: Fraction
    ratio: object  # None when lambda = 0
    sign_twist: int
    residual: object
    status: str


@dataclass
class CentralValueReport:
    N: int
    k: int
    eps: dict
    rows: list
    mean_ratio: object
    max_rel_dev: object
    tolerance: float
    zero_tolerance: float
    failures: list
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures and (self.max_rel_dev is None or self.max_rel_dev <= self.tolerance)


def _is_zero(x, scale) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return abs(x) <= mpmath.mpf(10) ** -20 * (1 + scale)


def waldspurger_report(
    g: NewformData,
    f: HalfIntegralForm,
    eps: dict[int, int],
    Dmax: int,
    eps_abs=1e-9,
    tolerance: float = 1e-6,
    zero_tolerance: float = 1e-6,
) -> CentralValueReport:
    N, k = g.N, g.k
    Lg = central_value(g, None, eps_abs)
    rows = []
    failures = []
    lam_scale = max((abs(to_mpf(v)) for v in f.series[1:]), default=mpmath.mpf(0))
    for D in range(1, Dmax + 1):
        pair = fundamental_pair(D)
        if not permitted(D, eps, N):
            continue
        d = pair.d
        Lt = central_value(g, d, eps_abs)
        LD = Lg.value * Lt.value
        err = abs(Lg.value) * Lt.error + abs(Lt.value) * Lg.error + Lg.error * Lt.error
        lam = f.coefficient(pair)
        status = "ok"
        ratio = None
        if _is_zero(lam, lam_scale):
            if abs(LD) > zero_tolerance:
                status = "FAIL: lambda = 0 but L_D != 0"
        else:
            ratio = LD * to_mpf(pair.D) ** (k + mpmath.mpf(1) / 2) / (to_mpf(pair.a) * to_mpf(lam) ** 2)
            if abs(LD) <= zero_tolerance:
                status = "FAIL: L_D = 0 but lambda != 0"
        if Lt.residual > 100 * mpmath.mpf(eps_abs) or Lg.residual > 100 * mpmath.mpf(eps_abs):
            status = "FAIL: functional equation self-test"
        if LD < -mpmath.mpf(eps_abs):
            status = "FAIL: negative central value"
        row = ReportRow(pair, d, Lg.value, Lt.value, LD, err, lam, pair.a, ratio, Lt.sign, max(Lt.residual, Lg.residual), status)
        rows.append(row)
        if status != "ok":
            failures.append(row)
    ratios = [r.ratio for r in rows if r.ratio is not None]
    mean = max_dev = None
    if ratios:
        mean = sum(ratios) / len(ratios)
        max_dev = max(abs(r / mean - 1) for r in ratios)
    notes = {
        "local_a_p": {str(p): str(v) for p, v in sorted(g.local_at_N.items())},
        "root_number": g.sign,
        "C_N": C_N(N),
        "c_k": str(c_k(k)),
        "omega_N": omega(N),
    }
    return CentralValueReport(N, k, dict(eps), rows, mean, max_dev, tolerance, zero_tolerance, failures, notes)
