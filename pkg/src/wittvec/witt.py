"""Truncated p-typical Witt vectors over F_q[X1..Xm] and their ring laws.

Three interchangeable backends compute sums and products:

``naive``
    Evaluate the classical structure polynomials (:mod:`wittvec.naive`).
``illusie``
    Map each vector to sum_i p^i G_i^(p^(n-1-i)) in GR(p^n, d)[X], which is
    injective and a ring map, compute there, and map back by repeatedly
    peeling off the top p-power with an inverse Frobenius.
``phantom``
    Compute all n ghost components in GR(p^n, d)[X], combine them
    componentwise and invert the ghost map, reading coordinate j off the
    p^j-multiple left after subtracting the lower contributions.

All three return structurally identical results.
"""

import enum
import itertools
import random as _random

import numpy as np

from . import naive
from .errors import ContextMismatch, InvalidParameter, ParseError
from .textio import parse_terms
from .field import FqField
from .galois import GaloisRing
from .poly import (Poly, monomial_p_valuation, poly_exact_div_p, poly_frobenius,
                   poly_inv_frobenius, poly_lift, poly_pow, poly_project)


class Backend(enum.Enum):
    NAIVE = "naive"
    ILLUSIE = "illusie"
    PHANTOM = "phantom"


DEFAULT_BACKEND = Backend.ILLUSIE


def _backend(b):
    return b if isinstance(b, Backend) else Backend(b)


class WittContext:
    """W_n(F_q[X1..Xm]) with q = p^d."""

    def __init__(self, p, d=1, n=1, m=1, modulus=None, field=None):
        if n < 1:
            raise InvalidParameter(f"n must be >= 1, got {n}")
        if m < 0:
            raise InvalidParameter(f"m must be >= 0, got {m}")
        self.field = field if field is not None else FqField(p, d, modulus)
        self.ring = GaloisRing(self.field, n)
        self.p = self.field.p
        self.d = self.field.d
        self.n = n
        self.m = m

    def _key(self):
        return (self.field, self.n, self.m)

    def __eq__(self, other):
        return isinstance(other, WittContext) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"WittContext(p={self.p}, d={self.d}, n={self.n}, m={self.m})"

    def header(self):
        return (f"witt p={self.p} d={self.d} n={self.n} m={self.m} "
                f"f={self.field.format_modulus()}")

    def gens(self):
        return Poly.gens(self.field, self.m)

    def field_zero_poly(self):
        return Poly.zero(self.field, self.m)

    def coerce_poly(self, value):
        if isinstance(value, Poly):
            if value.ring != self.field or value.nvars != self.m:
                raise ContextMismatch(f"{value!r} is not in F_q[X1..X{self.m}] of {self}")
            return value
        if isinstance(value, str):
            return Poly.parse(self.field, self.m, value)
        return Poly.constant(self.field, self.m, value)

    def vector(self, coords):
        coords = [self.coerce_poly(c) for c in coords]
        if len(coords) != self.n:
            raise InvalidParameter(f"expected {self.n} coordinates, got {len(coords)}")
        return WittVector(self, tuple(coords))


class WittVector:
    """Element of W_n(F_q[X]); ``coords`` holds the n coordinate polynomials."""

    __slots__ = ("ctx", "coords")

    def __init__(self, ctx, coords):
        self.ctx = ctx
        self.coords = tuple(coords)

    def _same(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return other

    def __add__(self, other):
        return witt_add(self, self._same(other))

    def __sub__(self, other):
        return witt_sub(self, self._same(other))

    def __mul__(self, other):
        return witt_mul(self, self._same(other))

    def __neg__(self):
        return witt_neg(self)

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.ctx == other.ctx and self.coords == other.coords

    def __hash__(self):
        return hash((self.ctx, self.coords))

    def __getitem__(self, i):
        return self.coords[i]

    def __len__(self):
        return len(self.coords)

    def __repr__(self):
        return "WittVector(" + ", ".join(str(c) for c in self.coords) + ")"

    def format(self):
        return format_witt(self)


class GhostTuple:
    """n polynomials over GR(p^n, d); component j is only meaningful mod p^(j+1)."""

    __slots__ = ("ctx", "comps")

    def __init__(self, ctx, comps):
        self.ctx = ctx
        self.comps = tuple(comps)

    def __add__(self, other):
        return GhostTuple(self.ctx, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return GhostTuple(self.ctx, [a - b for a, b in zip(self.comps, other.comps)])

    def __mul__(self, other):
        return GhostTuple(self.ctx, [a * b for a, b in zip(self.comps, other.comps)])

    def __getitem__(self, j):
        return self.comps[j]

    def __len__(self):
        return len(self.comps)


# --- basic elements and operators --------------------------------------------


def witt_zero(ctx):
    z = ctx.field_zero_poly()
    return WittVector(ctx, (z,) * ctx.n)


def witt_one(ctx):
    z = ctx.field_zero_poly()
    return WittVector(ctx, (Poly.one(ctx.field, ctx.m),) + (z,) * (ctx.n - 1))


def teichmueller(ctx, P):
    """The multiplicative representative (P, 0, ..., 0)."""
    P = ctx.coerce_poly(P)
    z = ctx.field_zero_poly()
    return WittVector(ctx, (P,) + (z,) * (ctx.n - 1))


def verschiebung(w, r=1):
    """Shift right by r places, truncating to length n."""
    ctx = w.ctx
    z = ctx.field_zero_poly()
    r = min(r, ctx.n)
    return WittVector(ctx, (z,) * r + w.coords[: ctx.n - r])


def witt_frobenius(w, r=1):
    """F^r; in characteristic p it raises each coordinate to the p^r-th power."""
    return WittVector(w.ctx, tuple(poly_frobenius(c, r) for c in w.coords))


# --- ghost components and the phantom backend ---------------------------------


def _lifts(w, lifts):
    ctx = w.ctx
    if lifts is None:
        return [poly_lift(c, ctx.ring) for c in w.coords]
    lifts = list(lifts)
    if len(lifts) != ctx.n:
        raise InvalidParameter(f"expected {ctx.n} lifts, got {len(lifts)}")
    for G, c in zip(lifts, w.coords):
        if G.ring != ctx.ring or poly_project(G) != c:
            raise InvalidParameter("a supplied lift does not project to its coordinate")
    return lifts


def _p_power_chain(G, p, k):
    """[G, G^p, G^(p^2), ..., G^(p^k)]."""
    out = [G]
    for _ in range(k):
        out.append(poly_pow(out[-1], p))
    return out


def ghost_components(w, lifts=None):
    """(F_0(w), ..., F_{n-1}(w)) computed on lifts to GR(p^n, d)[X]."""
    ctx = w.ctx
    p, n = ctx.p, ctx.n
    chains = [_p_power_chain(G, p, n - 1 - i) for i, G in enumerate(_lifts(w, lifts))]
    comps = []
    for j in range(n):
        acc = Poly.zero(ctx.ring, ctx.m)
        for i in range(j + 1):
            acc = acc + chains[i][j - i].scale(p**i)
        comps.append(acc)
    return GhostTuple(ctx, comps)


def ghost_inverse(ctx, T):
    """Recover the Witt vector whose ghost components are ``T``.

    R_j = (T_j - sum_{i<j} p^i R_i^(p^(j-i))) / p^j, each R_i projected to
    F_q as soon as it is known and re-lifted digitwise.
    """
    comps = T.comps if isinstance(T, GhostTuple) else tuple(T)
    p, n = ctx.p, ctx.n
    if len(comps) != n:
        raise InvalidParameter(f"expected {n} ghost components, got {len(comps)}")
    coords = []
    chains = []
    for j in range(n):
        acc = comps[j]
        for i in range(j):
            chain = chains[i]
            while len(chain) <= j - i:
                chain.append(poly_pow(chain[-1], p))
            acc = acc - chain[j - i].scale(p**i)
        R = poly_project(poly_exact_div_p(acc, j))
        coords.append(R)
        chains.append([poly_lift(R, ctx.ring)])
    return WittVector(ctx, tuple(coords))


# --- the Illusie backend -------------------------------------------------------


def illusie_lift(w, lifts=None):
    """sum_i p^i G_i^(p^(n-1-i)) in GR(p^n, d)[X] for digit lifts G_i of the coordinates."""
    ctx = w.ctx
    p, n = ctx.p, ctx.n
    acc = Poly.zero(ctx.ring, ctx.m)
    for i, G in enumerate(_lifts(w, lifts)):
        acc = acc + poly_pow(G, p ** (n - 1 - i)).scale(p**i)
    return acc


def illusie_unlift(ctx, P):
    """Inverse of :func:`illusie_lift` on its image."""
    if P.ring != ctx.ring or P.nvars != ctx.m:
        raise ContextMismatch(f"{P!r} is not over {ctx.ring!r} in {ctx.m} variables")
    p, n = ctx.p, ctx.n
    coords = []
    for i in range(n):
        e = n - 1 - i
        R = poly_inv_frobenius(poly_project(P), e)
        coords.append(R)
        if i < n - 1:
            P = poly_exact_div_p(P - poly_pow(poly_lift(R, ctx.ring), p**e), 1)
    return WittVector(ctx, tuple(coords))


def is_in_illusie_image(ctx, P):
    """Whether each coefficient a_u is divisible by p^(n-1-v(u)), v the capped p-adic valuation of u."""
    p, n = ctx.p, ctx.n
    for u, c in zip(P.exps.tolist(), P.coeffs.tolist()):
        need = n - 1 - monomial_p_valuation(u, p, n - 1)
        if need and any(int(x) % p**need for x in c):
            return False
    return True


# --- ring laws ------------------------------------------------------------------


def _combine(a, b, op, backend):
    ctx = a.ctx
    if b.ctx != ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")
    backend = _backend(backend)
    if backend is Backend.ILLUSIE:
        G, H = illusie_lift(a), illusie_lift(b)
        R = G + H if op == "add" else G - H if op == "sub" else G * H
        return illusie_unlift(ctx, R)
    if backend is Backend.PHANTOM:
        G, H = ghost_components(a), ghost_components(b)
        T = G + H if op == "add" else G - H if op == "sub" else G * H
        return ghost_inverse(ctx, T)
    return {"add": naive.naive_add, "sub": naive.naive_sub, "mul": naive.naive_mul}[op](a, b)


def witt_add(a, b, backend=DEFAULT_BACKEND):
    return _combine(a, b, "add", backend)


def witt_sub(a, b, backend=DEFAULT_BACKEND):
    return _combine(a, b, "sub", backend)


def witt_mul(a, b, backend=DEFAULT_BACKEND):
    return _combine(a, b, "mul", backend)


def witt_neg(a, backend=DEFAULT_BACKEND):
    # coordinatewise negation is wrong for p = 2
    return witt_sub(witt_zero(a.ctx), a, backend)


def witt_op(op, a, b, backend=DEFAULT_BACKEND):
    if op not in ("add", "sub", "mul"):
        raise InvalidParameter(f"unknown operation {op!r}")
    return _combine(a, b, op, backend)


# --- random instances -----------------------------------------------------------

PER_VARIABLE = "per-var"
TOTAL = "total"


def monomials_within(m, bound, kind=PER_VARIABLE):
    """Exponent vectors with every entry <= bound (per-var) or entries summing to <= bound (total)."""
    if kind == PER_VARIABLE:
        return list(itertools.product(range(bound + 1), repeat=m))
    if kind == TOTAL:
        return [u for u in itertools.product(range(bound + 1), repeat=m) if sum(u) <= bound]
    raise InvalidParameter(f"unknown degree-bound kind {kind!r}")


def random_witt(ctx, degree_bound, bound_kind=PER_VARIABLE, seed=None):
    """Each coordinate gets an independent uniform F_q coefficient on every allowed monomial."""
    if degree_bound < 0:
        raise InvalidParameter("degree bound must be >= 0")
    rng = seed if isinstance(seed, _random.Random) else _random.Random(seed)
    monos = monomials_within(ctx.m, degree_bound, bound_kind)
    p, d = ctx.p, ctx.d
    coords = []
    for _ in range(ctx.n):
        coeffs = np.array([[rng.randrange(p) for _ in range(d)] for _ in monos],
                          dtype=np.int64).reshape(len(monos), d)
        exps = np.array(monos, dtype=np.int64).reshape(len(monos), ctx.m)
        keep = np.any(coeffs != 0, axis=1)
        coords.append(Poly._raw(ctx.field, ctx.m, exps[keep], coeffs[keep]))
    return WittVector(ctx, tuple(coords))


# --- text format ------------------------------------------------------------------


def format_witt(w):
    lines = [w.ctx.header()] + [c.format() for c in w.coords]
    return "\n".join(lines) + "\n"


def _parse_header(line):
    if not line.startswith("witt"):
        raise ParseError("header must start with 'witt'", 1, 1)
    fields = {}
    pos = 4
    while pos < len(line):
        while pos < len(line) and line[pos].isspace():
            pos += 1
        if pos >= len(line):
            break
        eq = line.find("=", pos)
        if eq < 0:
            raise ParseError("expected key=value", 1, pos + 1)
        key = line[pos:eq].strip()
        if key == "f":
            fields["f"] = (line[eq + 1:], eq + 2)
            break
        end = eq + 1
        while end < len(line) and not line[end].isspace():
            end += 1
        value = line[eq + 1:end]
        if key not in ("p", "d", "n", "m"):
            raise ParseError(f"unknown header key {key!r}", 1, pos + 1)
        if not value.isdigit():
            raise ParseError(f"value of {key} must be a natural number", 1, eq + 2)
        fields[key] = (int(value), eq + 2)
        pos = end
    for key in ("p", "d", "n", "m", "f"):
        if key not in fields:
            raise ParseError(f"header is missing {key}=", 1, len(line) + 1)
    return fields


def parse_witt(text):
    """Parse the line-oriented Witt vector format; raises ParseError with line/column."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty input", 1, 1)
    fields = _parse_header(lines[0])
    p, pcol = fields["p"]
    d, _ = fields["d"]
    n, ncol = fields["n"]
    m, _ = fields["m"]
    ftext, fcol = fields["f"]
    try:
        coeffs = {}
        for coef, texp, _ in parse_terms(ftext, (), line=1):
            coeffs[texp] = coeffs.get(texp, 0) + coef
    except ParseError as exc:
        raise ParseError(exc.message, 1, fcol + exc.column - 1) from None
    if not coeffs or max(coeffs) != d:
        raise ParseError(f"modulus must have degree d={d}", 1, fcol)
    try:
        ctx = WittContext(p, d, n, m, modulus=[coeffs.get(i, 0) for i in range(d + 1)])
    except InvalidParameter as exc:
        col = pcol if "prime" in str(exc) else ncol if "n must" in str(exc) else fcol
        raise ParseError(str(exc), 1, col) from None
    body = lines[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} coordinate lines, found {len(body)}", min(len(lines) + 1, n + 2), 1)
    coords = [Poly.parse(ctx.field, m, body[i], line=i + 2) for i in range(n)]
    return WittVector(ctx, tuple(coords))
