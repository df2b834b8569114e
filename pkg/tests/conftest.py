from functools import lru_cache

from waldspurger.brandt import build_module, eigenforms, mark_oldforms
from waldspurger.exact import factor
from waldspurger.quaternion import algebra_ramified_at, build_order, ideal_classes

SIGNS = {2: {2: -1}, 3: {3: -1}, 11: {11: -1}, 14: {2: -1, 7: 1}, 27: {3: -1}, 33: {3: 1, 11: -1}}


@lru_cache(maxsize=None)
def classes_for(N: int, signs: tuple = ()):
    eps = dict(signs) if signs else SIGNS[N]
    fac = factor(N)
    A = algebra_ramified_at([p for p, s in eps.items() if s == -1 and fac[p] % 2])
    return ideal_classes(build_order(A, N, eps))


@lru_cache(maxsize=None)
def module_for(N: int, k: int, signs: tuple = ()):
    return build_module(classes_for(N, signs), k)


@lru_cache(maxsize=None)
def forms_for(N: int, k: int, signs: tuple = (), bound: int = 7):
    recs = eigenforms(module_for(N, k, signs), bound)
    mark_oldforms(recs, bound)
    return recs
