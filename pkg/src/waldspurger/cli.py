"""Command-line driver: ``algebra``, ``verify`` and ``coeffs``.

Exit codes: 0 all gates pass, 2 hypothesis violation, 3 internal
consistency failure (mass certificate, theta/eta, Shimura), 4 ratio failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from .brandt import (
    EigenformError,
    HypothesisError,
    build_module,
    eigenforms,
    eigenvalue_series_many,
    mark_oldforms,
)
from .exact import factor, to_mpf
from .lvalue import coefficients, coefficients_needed, permitted, waldspurger_report
from .quaternion import (
    MassMismatch,
    OrderError,
    algebra_ramified_at,
    bil_group,
    build_order,
    cache_key,
    eichler_invariant,
    ideal_classes,
    load_class_set,
    save_class_set,
)
from .theta import (
    ConsistencyError,
    basis_series,
    check_theta_eta,
    expected_special_count,
    fundamental_pair,
    shimura_consistency,
    special_points,
    theta_lift,
)

REPORT_VERSION = 1
EXIT_OK, EXIT_HYPOTHESIS, EXIT_CONSISTENCY, EXIT_RATIO = 0, 2, 3, 4


@dataclass
class JobConfig:
    N: int
    k: int = 0
    eps: dict = field(default_factory=dict)  # empty: every admissible sign map
    dmax: int = 60
    hecke_bound: int = 10
    prec: int = 30
    eps_abs: float = 1e-9
    tolerance: float = 1e-6
    cache_dir: str | None = None
    format: str = "table"
    seed: int = 0
    out: str | None = None
    form: int | None = None

    def validate(self) -> None:
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.k < 0 or self.k % 2:
            raise HypothesisError(f"H3 fails: k = {self.k} is not even")
        if self.eps:
            fac = factor(self.N)
            if set(self.eps) != set(fac):
                raise ValueError(f"eps must give a sign at every prime of N = {self.N}")
            wminus = [p for p, s in self.eps.items() if s == -1 and fac[p] % 2]
            if len(wminus) % 2 == 0:
                raise HypothesisError(f"H1 fails: eps has {len(wminus)} primes with eps_g(p) = -1, need an odd number")

    def sign_maps(self) -> list[dict[int, int]]:
        """Sign maps to run; raises when none can satisfy H1 and H2."""
        if self.eps:
            return [dict(sorted(self.eps.items()))]
        fac = factor(self.N)
        primes = sorted(fac)
        out = []
        for signs in itertools.product((1, -1), repeat=len(primes)):
            eps = dict(zip(primes, signs))
            if sum(1 for p in primes if eps[p] == -1 and fac[p] % 2) % 2 == 1:
                out.append(eps)
        if not out:
            raise HypothesisError(f"H1/H2 fail: every prime of N = {self.N} has even exponent, so eps_g(p) = -1 is never allowed at an odd number of primes")
        return out


def parse_eps(text: str) -> dict[int, int]:
    out = {}
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        p, s = item.split(":")
        sign = int(s)
        if sign not in (1, -1):
            raise ValueError(f"sign for {p} must be +1 or -1")
        out[int(p)] = sign
    return out


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_TYPES = {"N": int, "k": int, "dmax": int, "hecke_bound": int, "prec": int, "eps_abs": float, "tolerance": float, "seed": int, "form": int, "eps": parse_eps}


def make_config(args: argparse.Namespace) -> JobConfig:
    values = {}
    if args.config:
        for key, raw in read_config(args.config).items():
            if key not in JobConfig.__dataclass_fields__:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _TYPES.get(key, str)(raw)
    for key in JobConfig.__dataclass_fields__:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = parse_eps(v) if key == "eps" else v
    if "N" not in values:
        raise ValueError("N is required (flag --N or config key N)")
    return JobConfig(**values)


# ---------------------------------------------------------------------------
# pipeline pieces


def setup_classes(N: int, eps: dict[int, int], cache_dir=None):
    fac = factor(N)
    ram = [p for p, s in eps.items() if s == -1 and fac[p] % 2]
    A = algebra_ramified_at(ram)
    R = build_order(A, N, eps)
    if cache_dir:
        path = Path(cache_dir) / cache_key(A, N, eps)
        if path.exists():
            return load_class_set(path, R)
        classes = ideal_classes(R)
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        save_class_set(classes, path, eps)
        return classes
    return ideal_classes(R)


def applicable(rec, eps: dict[int, int]) -> bool:
    """Newform satisfying H1-H3 whose signs match ``eps(p)^{v_p} = eps_g(p)``."""
    fac = factor(rec.N)
    return rec.newform and rec.satisfies_hypotheses() and all(rec.epsilon_g[p] == eps[p] ** fac[p] for p in fac)


def consistency_gate(module, N: int, eps: dict[int, int], bound: int) -> dict:
    """theta = eta on the module basis and special-point counts, small ``D``."""
    checked = 0
    for D in range(1, bound + 1):
        pair = fundamental_pair(D)
        if pair.a != 1 or math.gcd(pair.d, 2 * N) != 1:
            continue
        n_pts = len(special_points(module, pair))
        expected = expected_special_count(N, pair, eps)
        if n_pts != expected:
            raise ConsistencyError(f"special points at D = {D}: found {n_pts}, expected {expected}")
        for i in range(module.dim):
            e = [Fraction(int(i == j)) for j in range(module.dim)]
            check_theta_eta(module, e, pair)
        checked += 1
    return {"theta_eta_pairs": checked}


def _fmt(v, digits: int = 15) -> str | None:
    if v is None:
        return None
    if isinstance(v, (int, Fraction)):
        return str(v)
    return mpmath.nstr(to_mpf(v), digits)


def run_sign_map(cfg: JobConfig, eps: dict[int, int], *, reports: bool = True) -> dict:
    N, k = cfg.N, cfg.k
    classes = setup_classes(N, eps, cfg.cache_dir)
    R = classes.order
    module = build_module(classes, k)
    records = eigenforms(module, cfg.hecke_bound)
    mark_oldforms(records, cfg.hecke_bound)
    chosen = [r for r in records if applicable(r, eps)]
    if cfg.form is not None:
        chosen = chosen[cfg.form : cfg.form + 1]
    entry = {
        "eps": {str(p): s for p, s in eps.items()},
        "algebra": [R.algebra.a, R.algebra.b],
        "classes": len(classes),
        "weights": classes.weights,
        "mass": str(classes.mass),
        "eigenforms_found": len(records),
        "forms": [],
    }
    if not chosen:
        entry["status"] = "no applicable eigenform"
        return entry
    entry["gates"] = consistency_gate(module, N, eps, min(cfg.dmax, 24))
    bs = basis_series(module, max(cfg.dmax, 9 * min(cfg.dmax, 20)))
    nmax = coefficients_needed(2 + 2 * k, N * cfg.dmax * cfg.dmax, cfg.eps_abs) if reports else 2
    series = eigenvalue_series_many(chosen, nmax)
    for i, (rec, ap) in enumerate(zip(chosen, series)):
        f = theta_lift(module, rec.vector, len(bs[0]) - 1, basis=bs)
        p3 = next(p for p in range(3, 100, 2) if N % p and all(p % q for q in range(2, p)))
        ok, bad = shimura_consistency(f, p3, rec.eigenvalues[p3])
        if not ok:
            raise ConsistencyError(f"Shimura relation fails at {bad}")
        form = {
            "index": i,
            "exact": rec.exact,
            "field": rec.field_poly,
            "eigenvalues": {str(p): _fmt(v) for p, v in sorted(rec.eigenvalues.items())},
            "epsilon_g": {str(p): s for p, s in sorted(rec.epsilon_g.items())},
            "shimura_prime": p3,
            "lift": f,
            "record": rec,
        }
        if reports:
            g = coefficients(rec, nmax, ap)
            rep = waldspurger_report(g, f, eps, cfg.dmax, cfg.eps_abs, cfg.tolerance)
            form["report"] = rep
        entry["forms"].append(form)
    return entry


def _report_json(rep) -> dict:
    return {
        "passed": rep.passed,
        "mean_ratio": _fmt(rep.mean_ratio),
        "max_rel_dev": _fmt(rep.max_rel_dev, 6),
        "tolerance": rep.tolerance,
        "notes": rep.notes,
        "rows": [
            {
                "D": str(r.pair.D),
                "a": str(r.pair.a),
                "d": r.d,
                "lambda": _fmt(r.lam),
                "L_g": _fmt(r.L_g),
                "L_twist": _fmt(r.L_twist),
                "L_D": _fmt(r.L_D),
                "error": _fmt(r.error, 3),
                "ratio": _fmt(r.ratio),
                "sign_twist": r.sign_twist,
                "status": r.status,
            }
            for r in rep.rows
        ],
    }


def _public(entry: dict) -> dict:
    out = {key: v for key, v in entry.items() if key != "forms"}
    out["forms"] = []
    for form in entry["forms"]:
        f = {key: v for key, v in form.items() if key not in ("lift", "record", "report")}
        if "report" in form:
            f["report"] = _report_json(form["report"])
        out["forms"].append(f)
    return out


def _table(entries: list[dict]) -> str:
    lines = []
    for e in entries:
        lines.append(f"eps {e['eps']}  algebra {tuple(e['algebra'])}  classes {e['classes']}  mass {e['mass']}")
        if e.get("status"):
            lines.append(f"  {e['status']}")
        for form in e["forms"]:
            ev = ", ".join(f"a_{p} = {v}" for p, v in list(form["eigenvalues"].items())[:4])
            lines.append(f"  form {form['index']}: {ev}  eps_g {form['epsilon_g']}")
            rep = form.get("report")
            if rep is None:
                continue
            lines.append(f"  {'D':>5} {'a':>5} {'lambda':>22} {'L_D':>22} {'ratio':>22}  status")
            for r in rep["rows"]:
                lines.append(f"  {r['D']:>5} {r['a']:>5} {r['lambda']:>22} {r['L_D']:>22} {str(r['ratio']):>22}  {r['status']}")
            verdict = "PASS" if rep["passed"] else "FAIL"
            lines.append(f"  {verdict}: mean ratio {rep['mean_ratio']}, max relative deviation {rep['max_rel_dev']} (tolerance {rep['tolerance']})")
    return "\n".join(lines) + "\n"


def _emit(cfg: JobConfig, payload: dict, table: str) -> None:
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n" if cfg.format == "json" else table
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_algebra(cfg: JobConfig) -> int:
    entries = []
    for eps in cfg.sign_maps():
        classes = setup_classes(cfg.N, eps, cfg.cache_dir)
        R = classes.order
        A = R.algebra
        entries.append(
            {
                "eps": {str(p): s for p, s in eps.items()},
                "algebra": [A.a, A.b],
                "ramified": A.ramified_primes(),
                "order_basis": [[str(c) for c in b] for b in R.basis],
                "discriminant": R.discriminant(),
                "local": {str(p): {"type": d["type"], "eichler_invariant": eichler_invariant(R, p)} for p, d in sorted(R.local.items())},
                "classes": len(classes),
                "weights": classes.weights,
                "mass": str(classes.mass),
                "bil_order": len(bil_group(R)),
            }
        )
    payload = {"version": REPORT_VERSION, "command": "algebra", "N": cfg.N, "orders": entries}
    lines = []
    for e in entries:
        lines.append(f"eps {e['eps']}: B = ({e['algebra'][0]}, {e['algebra'][1]}) ramified at {e['ramified']} and infinity")
        lines.append(f"  order discriminant {e['discriminant']}, local types {e['local']}")
        lines.append("  basis " + "; ".join("(" + ", ".join(b) + ")" for b in e["order_basis"]))
        lines.append(f"  {e['classes']} classes, weights {e['weights']}, mass {e['mass']}, |Bil| = {e['bil_order']}")
    _emit(cfg, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(cfg: JobConfig) -> int:
    entries = [run_sign_map(cfg, eps) for eps in cfg.sign_maps()]
    public = [_public(e) for e in entries]
    payload = {"version": REPORT_VERSION, "command": "verify", "config": _config_json(cfg), "results": public}
    _emit(cfg, payload, _table(public))
    if any(not f["report"].passed for e in entries for f in e["forms"]):
        return EXIT_RATIO
    return EXIT_OK


def cmd_coeffs(cfg: JobConfig) -> int:
    entries = [run_sign_map(cfg, eps, reports=False) for eps in cfg.sign_maps()]
    tables = []
    for e in entries:
        eps = {int(p): s for p, s in e["eps"].items()}
        for form in e["forms"]:
            f = form["lift"]
            pairs = [fundamental_pair(D) for D in range(1, cfg.dmax + 1)]
            rows = [{"D": str(p.D), "a": str(p.a), "d": p.d, "lambda": _fmt(f.coefficient(p)), "permitted": permitted(p.D, eps, cfg.N)} for p in pairs]
            key = tuple(sorted(form["eigenvalues"].items()))
            tables.append({"eps": e["eps"], "form": form["index"], "eigenvalues": form["eigenvalues"], "rows": rows, "_key": key, "_eps": eps, "_lift": f})
    disjoint = _check_disjoint(tables, cfg.N)
    payload = {
        "version": REPORT_VERSION,
        "command": "coeffs",
        "config": _config_json(cfg),
        "status": "ok" if tables else "no applicable eigenform",
        "disjoint_support": disjoint,
        "tables": [{key: v for key, v in t.items() if not key.startswith("_")} for t in tables],
    }
    lines = [] if tables else ["no applicable eigenform"]
    for t in tables:
        lines.append(f"eps {t['eps']} form {t['form']}")
        lines.append(f"  {'D':>5} {'a':>5} {'d':>6} {'lambda':>24}  permitted")
        for r in t["rows"]:
            lines.append(f"  {r['D']:>5} {r['a']:>5} {r['d']:>6} {r['lambda']:>24}  {r['permitted']}")
    if disjoint is not None:
        lines.append(f"disjoint lambda-support across sign maps: {disjoint}")
    _emit(cfg, payload, "\n".join(lines) + "\n")
    if disjoint is False:
        return EXIT_CONSISTENCY
    return EXIT_OK


def _check_disjoint(tables, N: int):
    """For one ``g`` with several sign maps: ``lambda(D; f_eps') = 0`` on ``D``
    permitted for ``eps``."""
    groups = {}
    for t in tables:
        groups.setdefault(t["_key"], []).append(t)
    result = None
    for group in groups.values():
        if len(group) < 2:
            continue
        result = True
        for t, u in itertools.permutations(group, 2):
            f = u["_lift"]
            scale = 1 + max(abs(to_mpf(v)) for v in f.series)
            for r in u["rows"]:
                if permitted(int(r["D"]), t["_eps"], N) and abs(to_mpf(f.coefficient(fundamental_pair(int(r["D"]))))) > mpmath.mpf(10) ** -20 * scale:
                    return False
    return result


def _config_json(cfg: JobConfig) -> dict:
    d = asdict(cfg)
    d["eps"] = {str(p): s for p, s in sorted(cfg.eps.items())}
    d.pop("out")
    d.pop("format")
    return d


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="waldspurger", description="Quaternionic theta lifts and central L-values.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("algebra", "verify", "coeffs"):
        p = sub.add_parser(name)
        p.add_argument("--N", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--eps", help="signs as p:+1,q:-1")
        p.add_argument("--dmax", type=int)
        p.add_argument("--hecke-bound", dest="hecke_bound", type=int)
        p.add_argument("--prec", type=int, help="working decimal digits")
        p.add_argument("--eps-abs", dest="eps_abs", type=float)
        p.add_argument("--tolerance", type=float)
        p.add_argument("--cache-dir", dest="cache_dir")
        p.add_argument("--format", choices=("json", "table"))
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--form", type=int, help="index among applicable eigenforms")
        p.add_argument("--config", help="flat key = value file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        cfg.validate()
    except HypothesisError as exc:
        print(f"hypothesis: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(f"config: {exc}", file=sys.stderr)
        return 1
    random.seed(cfg.seed)
    mpmath.mp.dps = cfg.prec
    commands = {"algebra": cmd_algebra, "verify": cmd_verify, "coeffs": cmd_coeffs}
    try:
        return commands[args.command](cfg)
    except HypothesisError as exc:
        print(f"hypothesis: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (MassMismatch, ConsistencyError, EigenformError) as exc:
        print(f"consistency [{type(exc).__module__.rsplit('.', 1)[-1]}]: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (OrderError, NotImplementedError) as exc:
        print(f"order [quaternion]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
