"""Classical Witt structure polynomials S_i, P_i and the ring laws they define.

The tables are built from the ghost-polynomial recurrences

    S_i = (F_i(X) + F_i(Y) - sum_{l<i} p^l S_l^(p^(i-l))) / p^i
    P_i = (F_i(X) * F_i(Y) - sum_{l<i} p^l P_l^(p^(i-l))) / p^i

in 2n variables ordered X_0..X_{n-1}, Y_0..Y_{n-1}. Every division is checked
to be exact. This is the slow reference construction; the fast backends in
:mod:`wittvec.witt` are tested against it.
"""

import threading

import numpy as np

from .errors import InvalidParameter, NotDivisible
from .field import FqField, is_prime
from .galois import GaloisRing
from .poly import ZZ, Poly, poly_evaluate, poly_evaluate_many, poly_exact_div_p, poly_project

INTEGERS = "integers"
FP = "fp"


def variable_names(n):
    return [f"X{i}" for i in range(n)] + [f"Y{i}" for i in range(n)]


class NaivePolyTable:
    """Immutable S_0..S_{n-1}, P_0..P_{n-1} over Z or F_p."""

    def __init__(self, p, n, ring, sums, prods):
        self.p = p
        self.n = n
        self.ring = ring
        self.sums = tuple(sums)
        self.prods = tuple(prods)

    def __repr__(self):
        return f"NaivePolyTable(p={self.p}, n={self.n}, ring={self.ring!r})"

    def truncate(self, n):
        """The table for a shorter length, re-expressed in 2n variables."""
        if n == self.n:
            return self
        keep = list(range(n)) + list(range(self.n, self.n + n))

        def cut(P):
            exps = P.exps[:, keep]
            return Poly._raw(P.ring, 2 * n, np.ascontiguousarray(exps), P.coeffs)

        return NaivePolyTable(self.p, n, self.ring,
                              [cut(s) for s in self.sums[:n]], [cut(s) for s in self.prods[:n]])

    def export(self):
        """One polynomial per line: S_0..S_{n-1} then P_0..P_{n-1}."""
        names = variable_names(self.n)
        return "\n".join(P.format(names) for P in self.sums + self.prods) + "\n"


def _p_power(P, p):
    # repeated multiplication: the structure polynomials are sparse enough that
    # squaring large intermediates costs far more than multiplying by the base
    out = P
    for _ in range(p - 1):
        out = out * P
    return out


def _build(p, n, base):
    """Run the recurrences over ``base`` (Z, or Z/p^n for the F_p tables)."""
    v = 2 * n
    gens = Poly.gens(base, v)
    X, Y = gens[:n], gens[n:]
    ghost_x, ghost_y = [], []
    sums, prods = [], []
    # powers[l][k] = S_l^(p^k) (likewise for P), grown on demand
    spow, ppow = [], []
    for i in range(n):
        gx = Poly.zero(base, v)
        gy = Poly.zero(base, v)
        for ell in range(i + 1):
            gx = gx + _iter_power(X[ell], p, i - ell).scale(p**ell)
            gy = gy + _iter_power(Y[ell], p, i - ell).scale(p**ell)
        ghost_x.append(gx)
        ghost_y.append(gy)
        s_num = gx + gy
        p_num = gx * gy
        for ell in range(i):
            while len(spow[ell]) <= i - ell:
                spow[ell].append(_p_power(spow[ell][-1], p))
                ppow[ell].append(_p_power(ppow[ell][-1], p))
            s_num = s_num - spow[ell][i - ell].scale(p**ell)
            p_num = p_num - ppow[ell][i - ell].scale(p**ell)
        S = _divide(s_num, p, i)
        P = _divide(p_num, p, i)
        sums.append(S)
        prods.append(P)
        spow.append([S])
        ppow.append([P])
    return sums, prods


def _iter_power(P, p, k):
    for _ in range(k):
        P = _p_power(P, p)
    return P


def _divide(P, p, i):
    if i == 0:
        return P
    if P.ring.modulus is None:
        q = p**i
        if any(int(c) % q for c in P.coeffs[:, 0]):
            raise NotDivisible(f"structure polynomial level {i} is not divisible by {p}^{i}")
        return Poly._raw(P.ring, P.nvars, P.exps, P.coeffs // q)
    return poly_exact_div_p(P, i)


_cache = {}
_cache_lock = threading.Lock()
_build_locks = {}


def build_table(p, n, ring=FP):
    """Build (or fetch from the process-wide cache) the structure polynomials.

    ``ring`` is ``"integers"`` for exact integer coefficients or ``"fp"`` for
    their reductions mod p. The F_p table runs the recurrences in Z/p^n: level
    i is only divided by p^i, so its residue mod p^(n-i) is exact and the
    final reduction mod p agrees with the integer table.
    """
    if not is_prime(p):
        raise InvalidParameter(f"p={p} is not prime")
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    if ring not in (INTEGERS, FP):
        raise InvalidParameter(f"unknown table ring {ring!r}")
    with _cache_lock:
        for (cp, cn, cr), table in _cache.items():
            if cp == p and cr == ring and cn >= n:
                return table.truncate(n)
        lock = _build_locks.setdefault((p, n, ring), threading.Lock())
    with lock:
        with _cache_lock:
            if (p, n, ring) in _cache:
                return _cache[(p, n, ring)]
        if ring == INTEGERS:
            sums, prods = _build(p, n, ZZ)
            table = NaivePolyTable(p, n, INTEGERS, sums, prods)
        else:
            work = GaloisRing(FqField(p, 1), n)
            sums, prods = _build(p, n, work)
            table = NaivePolyTable(p, n, FP, [poly_project(s) for s in sums],
                                   [poly_project(s) for s in prods])
        with _cache_lock:
            _cache[(p, n, ring)] = table
        return table


def clear_cache():
    with _cache_lock:
        _cache.clear()
        _build_locks.clear()


def count_monomials(table, which, i):
    """Number of nonzero terms of S_i (``which='S'``) or P_i (``which='P'``)."""
    polys = {"S": table.sums, "P": table.prods}[which]
    return len(polys[i])


# --- ring laws by evaluation --------------------------------------------------


def _table_for(ctx):
    return build_table(ctx.p, ctx.n, FP)


def _evaluate_all(polys, a, b):
    args = list(a.coords) + list(b.coords)
    return poly_evaluate_many(polys, args)


def naive_add(a, b):
    table = _table_for(a.ctx)
    return a.ctx.vector(_evaluate_all(table.sums, a, b))


def naive_mul(a, b):
    table = _table_for(a.ctx)
    return a.ctx.vector(_evaluate_all(table.prods, a, b))


def naive_neg(b):
    """Solve b + x = 0 one coordinate at a time.

    S_i = X_i + Y_i + (terms in lower-index variables), so coordinate i of
    b + x vanishes exactly when x_i = -b_i - (lower terms)(b, x).
    """
    ctx = b.ctx
    n = ctx.n
    table = _table_for(ctx)
    zero = ctx.field_zero_poly()
    x = [zero] * n
    for i in range(n):
        S = table.sums[i]
        if i == 0:
            lower = zero
        else:
            # x_i is still zero here, so this is the lower part plus b_i
            lower = poly_evaluate(S, list(b.coords) + x) - b.coords[i]
        x[i] = -b.coords[i] - lower
    return ctx.vector(x)


def naive_sub(a, b):
    return naive_add(a, naive_neg(b))
