"""Sparse multivariate polynomials over F_q, GR(p^n, d) or Z.

A :class:`Poly` stores its terms as two aligned arrays: ``exps`` (N x m,
int64) and ``coeffs`` (N x d), one row per monomial with a nonzero
coefficient. Rows are kept in lexicographic order of the exponent vectors
(X1 most significant), so equality is structural.

Large products go through Kronecker substitution: both operands are packed
into big integers (one fixed-width slot per monomial and t-power), multiplied
with GMP, and unpacked. Small or very sparse products use a vectorised
schoolbook loop.
"""

import itertools

import gmpy2
import numpy as np
import scipy.sparse as sp

from . import textio
from .errors import ArityMismatch, ContextMismatch, NotAPthPower, NotDivisible, ParseError
from .field import FqField, Residue
from .galois import GaloisRing

# Above this many coefficient pairs per block the schoolbook product is chunked.
_CHUNK_PAIRS = 1 << 21
# Kronecker packing is used when the packed byte size is at most this many
# times the number of coefficient pairs of the schoolbook product.
_KRONECKER_RATIO = 6
_KRONECKER_MAX_BYTES = 1 << 30
_INT64_SAFE = 1 << 31
# A single packed power beats repeated products only while the packed integer
# is small; beyond that, reducing mod p^n between products keeps slots narrow.
_POW_MAX_BYTES = 1 << 15


class IntegerRing:
    """The ring Z, used for the integer structure-polynomial tables."""

    d = 1
    modulus = None
    fpoly = (0, 1)
    p = None

    def __call__(self, value):
        return int(value)

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("ZZ")

    def __repr__(self):
        return "ZZ"


ZZ = IntegerRing()


def coeff_dtype(ring):
    M = ring.modulus
    return np.int64 if M is not None and M < _INT64_SAFE else object


def _row_of(ring, value):
    """Coefficient row (tuple of d ints) for an int, sequence or ring element."""
    if isinstance(value, Residue):
        if value.ring != ring:
            raise ContextMismatch(f"coefficient {value!r} is not in {ring!r}")
        return value.coeffs
    if isinstance(value, (int, np.integer)):
        v = int(value)
        if ring.modulus is not None:
            v %= ring.modulus
        return (v,) + (0,) * (ring.d - 1)
    return ring(list(value)).coeffs


def _reduce_rows(ring, c):
    """Reduce rows of t-coefficients (N x T, T >= d) modulo (M, f); returns N x d."""
    d, M = ring.d, ring.modulus
    T = c.shape[1]
    if T > d:
        c = c.copy()
        f = np.array(ring.fpoly[:d], dtype=c.dtype)
        for top in range(T - 1, d - 1, -1):
            lead = c[:, top]
            if M is not None:
                lead = lead % M
            c[:, top - d: top] -= lead[:, None] * f[None, :]
            if M is not None:
                c[:, top - d: top] %= M
        c = c[:, :d]
    if M is not None:
        c = c % M
    return c


def _row_mul(ring, a, b):
    """Rowwise ring product of aligned coefficient rows a, b (N x d)."""
    d, M = ring.d, ring.modulus
    if d == 1:
        out = a * b
        return out % M if M is not None else out
    out = np.zeros((a.shape[0], 2 * d - 1), dtype=a.dtype)
    for i in range(d):
        for j in range(d):
            prod = a[:, i] * b[:, j]
            if M is not None:
                out[:, i + j] = (out[:, i + j] + prod % M) % M
            else:
                out[:, i + j] += prod
    return _reduce_rows(ring, out)


def _group(exps):
    """Sort and deduplicate exponent rows; returns (unique_rows, inverse)."""
    n, m = exps.shape
    if m == 0:
        return exps[:1], np.zeros(n, dtype=np.int64)
    if m == 1:
        uniq, inv = np.unique(exps[:, 0], return_inverse=True)
        return uniq.reshape(-1, 1), inv
    radix = [int(x) + 1 for x in exps.max(axis=0)]
    total = 1
    for r in radix:
        total *= r
    if total < (1 << 62):
        strides = np.empty(m, dtype=np.int64)
        s = 1
        for j in range(m - 1, -1, -1):
            strides[j] = s
            s *= radix[j]
        keys = exps @ strides
        _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        return exps[first], inv
    uniq, inv = np.unique(exps, axis=0, return_inverse=True)
    return uniq, inv.reshape(-1)


def _canonical(ring, nvars, exps, coeffs):
    """Combine like terms, reduce coefficients, drop zeros, sort."""
    if exps.shape[0] == 0:
        return Poly._raw(ring, nvars, exps, coeffs)
    uniq, inv = _group(exps)
    if uniq.shape[0] != exps.shape[0]:
        order = np.argsort(inv, kind="stable")
        sinv = inv[order]
        starts = np.flatnonzero(np.concatenate(([True], sinv[1:] != sinv[:-1])))
        coeffs = np.add.reduceat(coeffs[order], starts, axis=0)
    else:
        out = np.empty_like(coeffs)
        out[inv] = coeffs
        coeffs = out
    if ring.modulus is not None:
        coeffs = coeffs % ring.modulus
    keep = np.any(coeffs != 0, axis=1)
    if not keep.all():
        uniq, coeffs = uniq[keep], coeffs[keep]
    return Poly._raw(ring, nvars, np.ascontiguousarray(uniq), np.ascontiguousarray(coeffs))


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables X1..Xm over ``ring``.

    ``terms`` maps exponent tuples to coefficients (ints, coefficient
    sequences, or ring elements); zero coefficients are dropped.
    """

    __slots__ = ("ring", "nvars", "exps", "coeffs")

    def __init__(self, ring, nvars, terms=None):
        dtype = coeff_dtype(ring)
        terms = terms or {}
        keys = [tuple(int(e) for e in k) for k in terms]
        for k in keys:
            if len(k) != nvars or min(k, default=0) < 0:
                raise ArityMismatch(f"monomial {k} does not have {nvars} natural exponents")
        exps = np.array(keys, dtype=np.int64).reshape(len(keys), nvars)
        coeffs = np.array([_row_of(ring, v) for v in terms.values()], dtype=dtype)
        coeffs = coeffs.reshape(len(keys), ring.d)
        p = _canonical(ring, nvars, exps, coeffs)
        self.ring, self.nvars, self.exps, self.coeffs = ring, nvars, p.exps, p.coeffs

    @classmethod
    def _raw(cls, ring, nvars, exps, coeffs):
        obj = object.__new__(cls)
        obj.ring = ring
        obj.nvars = nvars
        obj.exps = exps
        obj.coeffs = coeffs
        return obj

    # --- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ring, nvars):
        return cls._raw(ring, nvars, np.zeros((0, nvars), dtype=np.int64),
                        np.zeros((0, ring.d), dtype=coeff_dtype(ring)))

    @classmethod
    def constant(cls, ring, nvars, value):
        return cls(ring, nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, ring, nvars):
        return cls.constant(ring, nvars, 1)

    @classmethod
    def gens(cls, ring, nvars):
        """The variables X1..Xm."""
        return tuple(cls(ring, nvars, {tuple(int(i == j) for j in range(nvars)): 1})
                     for i in range(nvars))

    # --- inspection -----------------------------------------------------

    def __len__(self):
        return self.exps.shape[0]

    def is_zero(self):
        return self.exps.shape[0] == 0

    def __bool__(self):
        return not self.is_zero()

    def items(self):
        """Yield ``(exponent_tuple, coefficient)`` in storage order."""
        ring = self.ring
        for e, c in zip(self.exps.tolist(), self.coeffs.tolist()):
            yield tuple(e), (int(c[0]) if ring.modulus is None else ring(c))

    def terms(self):
        return dict(self.items())

    def coefficient(self, exponent):
        exponent = tuple(exponent)
        for e, c in self.items():
            if e == exponent:
                return c
        return self.ring(0)

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if self.is_zero():
            return -1
        return int(self.exps.sum(axis=1).max()) if self.nvars else 0

    def degrees(self):
        if self.is_zero() or self.nvars == 0:
            return (0,) * self.nvars
        return tuple(int(x) for x in self.exps.max(axis=0))

    def is_constant(self):
        return self.is_zero() or (len(self) == 1 and not self.exps.any())

    def constant_coefficient(self):
        if self.is_zero() or self.exps[0].any():
            return self.ring(0)
        return next(self.items())[1]

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.constant(self.ring, self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.ring == other.ring and self.nvars == other.nvars
                and self.exps.shape == other.exps.shape
                and np.array_equal(self.exps, other.exps)
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.ring, self.nvars, self.exps.tobytes(),
                     tuple(self.coeffs.ravel().tolist())))

    # --- ring operations ------------------------------------------------

    def _check(self, other):
        if isinstance(other, (int, Residue)):
            return Poly.constant(self.ring, self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        if other.ring != self.ring or other.nvars != self.nvars:
            raise ContextMismatch(
                f"polynomials over {self.ring!r}/{self.nvars} and {other.ring!r}/{other.nvars}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        return _canonical(self.ring, self.nvars,
                          np.concatenate((self.exps, other.exps)),
                          np.concatenate((self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        M = self.ring.modulus
        return Poly._raw(self.ring, self.nvars, self.exps,
                         (-self.coeffs) % M if M is not None else -self.coeffs)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c):
        """Multiply every coefficient by the scalar ``c``."""
        ring = self.ring
        row = _row_of(ring, c)
        if self.is_zero() or not any(row):
            return Poly.zero(ring, self.nvars)
        if ring.d == 1:
            coeffs = self.coeffs * row[0]
            if ring.modulus is not None:
                coeffs = coeffs % ring.modulus
        else:
            other = np.array([row], dtype=self.coeffs.dtype).repeat(len(self), axis=0)
            coeffs = _row_mul(ring, self.coeffs, other)
        keep = np.any(coeffs != 0, axis=1)
        return Poly._raw(ring, self.nvars, self.exps[keep], coeffs[keep])

    def __mul__(self, other):
        if isinstance(other, (int, Residue)):
            return self.scale(other)
        other = self._check(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        return poly_pow(self, e)

    # --- coefficient maps -------------------------------------------------

    def map_coefficients(self, ring, coeffs=None):
        """Same exponents, coefficients reinterpreted in ``ring`` (zero rows dropped)."""
        coeffs = self.coeffs if coeffs is None else coeffs
        coeffs = coeffs.astype(coeff_dtype(ring)) if coeffs.dtype != coeff_dtype(ring) else coeffs
        if ring.modulus is not None:
            coeffs = coeffs % ring.modulus
        keep = np.any(coeffs != 0, axis=1)
        return Poly._raw(ring, self.nvars, self.exps[keep], coeffs[keep])

    # --- text -----------------------------------------------------------

    def format(self, names=None):
        """Print in graded-lex descending order, t-powers descending within a monomial."""
        names = names or [f"X{i + 1}" for i in range(self.nvars)]
        if self.is_zero():
            return "0"
        order = sorted(range(len(self)),
                       key=lambda r: (int(self.exps[r].sum()), tuple(self.exps[r].tolist())),
                       reverse=True)
        parts = []
        for r in order:
            mono = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, self.exps[r].tolist()) if e]
            for i in range(self.ring.d - 1, -1, -1):
                c = int(self.coeffs[r, i])
                if not c:
                    continue
                factors = []
                if i:
                    factors.append("t" if i == 1 else f"t^{i}")
                factors += mono
                mag = abs(c)
                if mag != 1 or not factors:
                    factors.insert(0, str(mag))
                parts.append(("-" if c < 0 else "+", "*".join(factors)))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Poly({self.format()!r} over {self.ring!r})"

    @classmethod
    def parse(cls, ring, nvars, text, names=None, line=1):
        """Parse the expression grammar; coefficients are reduced into ``ring``."""
        names = names or [f"X{i + 1}" for i in range(nvars)]
        terms = textio.parse_terms(text, names, line=line, allow_t=ring.d > 1 or ring.modulus is not None)
        rows = {}
        for coef, texp, exps in terms:
            if ring.d == 1 and texp and ring.modulus is None:
                raise ParseError("'t' is not allowed over the integers", line, 1)
            row = rows.setdefault(exps, {})
            row[texp] = row.get(texp, 0) + coef
        out = {}
        for exps, row in rows.items():
            top = max(row)
            vec = [row.get(i, 0) for i in range(top + 1)]
            out[exps] = vec[0] if ring.modulus is None else ring(vec).coeffs
        return cls(ring, nvars, out)


# --- multiplication -----------------------------------------------------------


def _mul_schoolbook(a, b):
    ring, m = a.ring, a.nvars
    nb = len(b)
    step = max(1, _CHUNK_PAIRS // nb)
    acc = None
    for start in range(0, len(a), step):
        ea = a.exps[start: start + step]
        ca = a.coeffs[start: start + step]
        exps = (ea[:, None, :] + b.exps[None, :, :]).reshape(-1, m)
        left = np.repeat(ca, nb, axis=0)
        right = np.tile(b.coeffs, (ea.shape[0], 1))
        part = _canonical(ring, m, exps, _row_mul(ring, left, right))
        acc = part if acc is None else acc + part
    return acc


def _kronecker_plan(a, b):
    """Return (radix list, slot bytes, total bytes) or None if packing does not apply."""
    ring = a.ring
    if coeff_dtype(ring) is object:
        return None
    radix = [int(x) + int(y) + 1 for x, y in zip(a.exps.max(axis=0), b.exps.max(axis=0))]
    slots = 2 * ring.d - 1
    for r in radix:
        slots *= r
    bound = min(len(a), len(b)) * ring.d * (ring.modulus - 1) ** 2
    width = max(1, (bound.bit_length() + 7) // 8)
    return radix, width, slots * width


def _pack(poly, strides, T, width):
    idx = poly.exps @ strides
    n = int(idx.max()) + 1
    vals = np.zeros((n, T), dtype=np.uint64)
    vals[idx, : poly.ring.d] = poly.coeffs
    vals = vals.reshape(-1)
    raw = vals.view(np.uint8).reshape(-1, 8)
    if width <= 8:
        buf = raw[:, :width]
    else:
        buf = np.zeros((raw.shape[0], width), dtype=np.uint8)
        buf[:, :8] = raw
    return gmpy2.mpz.from_bytes(np.ascontiguousarray(buf).tobytes(), "little")


def _strides(radix):
    m = len(radix)
    strides = np.empty(m, dtype=np.int64)
    s = 1
    for j in range(m - 1, -1, -1):
        strides[j] = s
        s *= radix[j]
    return strides, s


def _unpack(ring, m, prod, strides, nmono, T, width):
    """Read a packed product back into a canonical polynomial."""
    M = ring.modulus
    L = nmono * T
    raw = np.frombuffer(prod.to_bytes(L * width, "little"), dtype=np.uint8).reshape(L, width)
    words = -(-width // 8)
    if words * 8 != width:
        padded = np.zeros((L, words * 8), dtype=np.uint8)
        padded[:, :width] = raw
        raw = padded
    w = raw.view("<u8").reshape(L, words)
    vals = (w[:, 0] % np.uint64(M)).astype(np.int64)
    for k in range(1, words):
        factor = pow(2, 64 * k, M)
        vals = (vals + (w[:, k] % np.uint64(M)).astype(np.int64) * factor) % M
    vals = vals.reshape(nmono, T)
    rows = np.flatnonzero(np.any(vals != 0, axis=1))
    coeffs = _reduce_rows(ring, vals[rows])
    exps = np.empty((rows.shape[0], m), dtype=np.int64)
    rest = rows.astype(np.int64)
    for j in range(m):
        exps[:, j], rest = np.divmod(rest, strides[j])
    keep = np.any(coeffs != 0, axis=1)
    # slot order is lexicographic with X1 most significant, already canonical
    return Poly._raw(ring, m, np.ascontiguousarray(exps[keep]), np.ascontiguousarray(coeffs[keep]))


def _mul_kronecker(a, b, radix, width):
    ring, m, d = a.ring, a.nvars, a.ring.d
    T = 2 * d - 1
    strides, nmono = _strides(radix)
    prod = _pack(a, strides, T, width) * _pack(b, strides, T, width)
    return _unpack(ring, m, prod, strides, nmono, T, width)


def _pow_kronecker(P, e):
    """P^e with a single packed big-integer power, or None when packing does not pay."""
    ring = P.ring
    if e < 2 or coeff_dtype(ring) is object or P.nvars == 0:
        return None
    N, d = len(P), ring.d
    radix = [e * int(x) + 1 for x in P.exps.max(axis=0)]
    T = e * (d - 1) + 1
    slots = T
    for r in radix:
        slots *= r
    bound = (N * d) ** (e - 1) * (ring.modulus - 1) ** e
    width = max(1, (bound.bit_length() + 7) // 8)
    nbytes = slots * width
    if nbytes > _POW_MAX_BYTES or nbytes > _KRONECKER_RATIO * e * N * N:
        return None
    strides, nmono = _strides(radix)
    prod = _pack(P, strides, T, width) ** e
    return _unpack(ring, P.nvars, prod, strides, nmono, T, width)


def poly_mul(a, b):
    if a.ring != b.ring or a.nvars != b.nvars:
        raise ContextMismatch("polynomials over different rings")
    if a.is_zero() or b.is_zero():
        return Poly.zero(a.ring, a.nvars)
    if len(a) < len(b):
        a, b = b, a
    if b.is_constant():
        return a.scale(next(b.items())[1])
    pairs = len(a) * len(b)
    if pairs > 256 and a.nvars > 0:
        plan = _kronecker_plan(a, b)
        if plan is not None:
            radix, width, nbytes = plan
            if nbytes <= _KRONECKER_RATIO * pairs and nbytes <= _KRONECKER_MAX_BYTES:
                return _mul_kronecker(a, b, radix, width)
    return _mul_schoolbook(a, b)


def _binary_pow(base, e):
    if e <= 8:
        direct = _pow_kronecker(base, e)
        if direct is not None:
            return direct
    result = Poly.one(base.ring, base.nvars)
    while e:
        if e & 1:
            result = result * base
        e >>= 1
        if e:
            base = base * base
    return result


def poly_pow(P, e):
    """P^e by binary exponentiation; over F_q the base-p digits of e go through Frobenius."""
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return Poly.one(P.ring, P.nvars)
    if P.is_zero():
        return P
    if isinstance(P.ring, FqField):
        p = P.ring.p
        result = Poly.one(P.ring, P.nvars)
        r = 0
        while e:
            e, digit = divmod(e, p)
            if digit:
                result = result * poly_frobenius(_binary_pow(P, digit), r)
            r += 1
        return result
    return _ring_pow(P, e)


def _ring_pow(P, e):
    # peel factors of p so that each step can be a single packed power
    p = getattr(P.ring, "p", None)
    if p is not None and p <= 8 < e and e % p == 0:
        return _binary_pow(_ring_pow(P, e // p), p)
    return _binary_pow(P, e)


# --- Frobenius, lifts, projections ------------------------------------------


def _frobenius_coeffs(field, coeffs, r):
    if field.d == 1 or r % field.d == 0:
        return coeffs
    mat = np.array(field.frobenius_matrix(r), dtype=np.int64)
    return (coeffs @ mat) % field.p


def poly_frobenius(P, r=1):
    """P^(p^r) over F_q, computed termwise."""
    if not isinstance(P.ring, FqField):
        raise ContextMismatch("Frobenius needs coefficients in F_q")
    if r == 0 or P.is_zero():
        return P
    q = P.ring.p**r
    return Poly._raw(P.ring, P.nvars, P.exps * q, _frobenius_coeffs(P.ring, P.coeffs, r))


def poly_inv_frobenius(P, r=1):
    """The Q with Q^(p^r) = P; every exponent of P must be divisible by p^r."""
    if not isinstance(P.ring, FqField):
        raise ContextMismatch("inverse Frobenius needs coefficients in F_q")
    if r == 0 or P.is_zero():
        return P
    q = P.ring.p**r
    if np.any(P.exps % q):
        raise NotAPthPower(f"exponents of {P} are not all divisible by {P.ring.p}^{r}")
    d = P.ring.d
    back = (d - r % d) % d
    return Poly._raw(P.ring, P.nvars, P.exps // q, _frobenius_coeffs(P.ring, P.coeffs, back))


def poly_lift(P, gr):
    """Coefficientwise digit lift F_q[X] -> GR(p^n, d)[X]."""
    if not isinstance(gr, GaloisRing) or P.ring != gr.field:
        raise ContextMismatch(f"cannot lift from {P.ring!r} to {gr!r}")
    return Poly._raw(gr, P.nvars, P.exps, P.coeffs.astype(coeff_dtype(gr)))


def poly_project(P):
    """Coefficientwise reduction GR(p^n, d)[X] -> F_q[X]."""
    if not isinstance(P.ring, GaloisRing):
        raise ContextMismatch("projection needs coefficients in a Galois ring")
    return P.map_coefficients(P.ring.field, (P.coeffs % P.ring.p).astype(np.int64))


def poly_exact_div_p(P, j=1):
    """Coefficientwise exact division by p^j in GR(p^n, d)[X]."""
    if j == 0 or P.is_zero():
        return P
    pj = P.ring.p**j
    if np.any(P.coeffs % pj):
        raise NotDivisible(f"polynomial is not divisible by {P.ring.p}^{j}")
    return Poly._raw(P.ring, P.nvars, P.exps, P.coeffs // pj)


def monomial_p_valuation(u, p, cap):
    """min_i v_p(u_i), capped at ``cap``; zero entries impose no constraint."""
    best = cap
    for e in u:
        e = int(e)
        if e == 0:
            continue
        v = 0
        while e % p == 0 and v < best:
            e //= p
            v += 1
        best = min(best, v)
        if best == 0:
            break
    return best


# --- substitution ------------------------------------------------------------


def poly_evaluate(P, args):
    """Substitute ``args[i]`` for the i-th variable of ``P``.

    The coefficients of ``P`` must live in the coefficient ring of the
    arguments, or be integers / F_p scalars that embed into it.
    """
    return poly_evaluate_many([P], args)[0]


def poly_evaluate_many(polys, args):
    """Evaluate several polynomials at the same arguments, sharing powers and products."""
    args = list(args)
    if not args:
        raise ArityMismatch("cannot infer the target ring without arguments")
    target, m = args[0].ring, args[0].nvars
    for a in args:
        if a.ring != target or a.nvars != m:
            raise ContextMismatch("substitution arguments live in different rings")
    ev = _Evaluator(args, target, m)
    out = []
    for P in polys:
        if len(args) != P.nvars:
            raise ArityMismatch(f"{P.nvars} variables but {len(args)} arguments")
        out.append(ev.evaluate(P))
    return out


def _scalar_rows(P, target):
    """Coefficients of P as rows (N x d) over ``target``."""
    if P.ring == target:
        return P.coeffs
    if P.ring.d == 1 and (P.ring.modulus is None or P.ring.p == getattr(target, "p", None)):
        rows = np.zeros((len(P), target.d), dtype=coeff_dtype(target))
        col = P.coeffs[:, 0]
        if target.modulus is not None:
            col = np.array([int(c) % target.modulus for c in col.tolist()], dtype=rows.dtype)
        rows[:, 0] = col
        return rows
    raise ContextMismatch(f"cannot embed {P.ring!r} coefficients into {target!r}")


class _Evaluator:
    """Substitution by a two-level split of the variables.

    Variables with small exponents ("inner") are handled by precomputing every
    distinct inner monomial once and forming, for each distinct outer monomial
    o, the linear combination Q_o of inner products with one sparse matrix
    product. The remaining "outer" variables are then eliminated by Horner's
    rule with the Q_o as coefficients. The split point is chosen to minimise
    the number of distinct inner plus outer monomials.
    """

    def __init__(self, args, ring, m):
        self.args = args
        self.ring = ring
        self.m = m
        self.one = Poly.one(ring, m)
        self.powers = [{0: self.one, 1: a} for a in args]
        self.products = {}

    def power(self, var, k):
        cache = self.powers[var]
        if k not in cache:
            below = max(e for e in cache if e <= k)
            cache[k] = cache[below] * poly_pow(self.args[var], k - below)
        return cache[k]

    def evaluate(self, P):
        ring, m = self.ring, self.m
        rows = _scalar_rows(P, ring)
        exps = P.exps
        # terms through a zero argument vanish
        dead = [i for i, a in enumerate(self.args) if a.is_zero()]
        if dead and len(P):
            alive = ~np.any(exps[:, dead] > 0, axis=1)
            exps, rows = exps[alive], rows[alive]
        if exps.shape[0] == 0:
            return Poly.zero(ring, m)
        live = [v for v in range(P.nvars) if v not in dead and exps[:, v].any()]
        if not live:
            return Poly.constant(ring, m, ring(rows.sum(axis=0).tolist()) if ring.modulus is not None
                                 else int(rows[:, 0].sum()))
        inner, outer = self._split(exps, live)
        if inner and self._linear_ok(len(exps)):
            leaves_exps, leaves = self._combine(exps, rows, inner, outer)
        else:
            inner, outer = [], live
            leaves_exps = exps[:, outer]
            leaves = [Poly._raw(ring, m, np.zeros((1, m), dtype=np.int64), r[None, :])
                      for r in rows]
            leaves = [lf if np.any(lf.coeffs) else None for lf in leaves]
        return self._horner(leaves_exps, leaves, outer)

    def _linear_ok(self, nterms):
        M = self.ring.modulus
        return M is not None and nterms * (M - 1) ** 2 < (1 << 62)

    def _split(self, exps, live):
        order = sorted(live, key=lambda v: (int(exps[:, v].max()), v))
        best, best_s = None, 0
        for s in range(len(order) + 1):
            u = _group(exps[:, order[:s]])[0].shape[0] if s else 1
            w = _group(exps[:, order[s:]])[0].shape[0] if s < len(order) else 1
            if best is None or u + w < best:
                best, best_s = u + w, s
        return order[:best_s], order[best_s:]

    def _product(self, inner, row):
        key = tuple((v, e) for v, e in zip(inner, row) if e)
        if not key:
            return self.one
        if key in self.products:
            return self.products[key]
        # strip the last nonzero factor and recurse on the prefix
        last = max(i for i, e in enumerate(row) if e)
        prefix = tuple(row[:last]) + (0,) * (len(row) - last)
        base = self._product(inner, prefix)
        val = base * self.power(inner[last], row[last])
        self.products[key] = val
        return val

    def _combine(self, exps, rows, inner, outer):
        """Return (distinct outer exponent rows, Q_o for each)."""
        ring, m, d, M = self.ring, self.m, self.ring.d, self.ring.modulus
        iu, iinv = _group(exps[:, inner])
        if outer:
            ou, oinv = _group(exps[:, outer])
        else:
            ou, oinv = np.zeros((1, 0), dtype=np.int64), np.zeros(len(exps), dtype=np.int64)
        prods = [self._product(inner, tuple(r)) for r in iu.tolist()]
        # dense column index over all monomials occurring in the inner products
        sizes = [len(q) for q in prods]
        allexps = np.concatenate([q.exps for q in prods])
        gu, ginv = _group(allexps)
        G = gu.shape[0]
        rowid = np.repeat(np.arange(len(prods)), sizes)
        allc = np.concatenate([q.coeffs for q in prods]).astype(np.int64)
        cols = (ginv[:, None] * d + np.arange(d)[None, :]).reshape(-1)
        A = sp.csr_matrix((allc.reshape(-1), (np.repeat(rowid, d), cols)),
                          shape=(len(prods), G * d), dtype=np.int64)
        A.data %= M
        A.eliminate_zeros()
        rows = np.asarray(rows, dtype=np.int64)
        Q = None
        for k in range(d):
            ck = rows[:, k] % M
            nz = ck != 0
            if not nz.any():
                continue
            C = sp.csr_matrix((ck[nz], (oinv[nz], iinv[nz])), shape=(ou.shape[0], len(prods)),
                              dtype=np.int64)
            part = (C @ A).tocoo()
            part = (part.row, part.col, part.data % M)
            if k:
                part = self._shift_t(part, k, G)
            Q = part if Q is None else tuple(np.concatenate(x) for x in zip(Q, part))
        leaves = [None] * ou.shape[0]
        if Q is None:
            return ou, leaves
        qrow, qcol, qval = Q
        order = np.lexsort((qcol, qrow))
        qrow, qcol, qval = qrow[order], qcol[order], qval[order]
        bounds = np.flatnonzero(np.diff(qrow)) + 1
        starts = np.concatenate(([0], bounds))
        ends = np.concatenate((bounds, [len(qrow)]))
        dtype = coeff_dtype(ring)
        for s, e in zip(starts.tolist(), ends.tolist()):
            g, kk = np.divmod(qcol[s:e], d)
            ug, pos = np.unique(g, return_inverse=True)
            coeffs = np.zeros((ug.shape[0], d), dtype=np.int64)
            np.add.at(coeffs, (pos, kk), qval[s:e])
            coeffs %= M
            keep = np.any(coeffs != 0, axis=1)
            if keep.any():
                leaves[int(qrow[s])] = Poly._raw(ring, m, np.ascontiguousarray(gu[ug[keep]]),
                                                 coeffs[keep].astype(dtype))
        return ou, leaves

    def _shift_t(self, part, k, G):
        """Multiply sparse (row, col, val) coefficient data by t^k and reduce mod f."""
        ring, d, M = self.ring, self.ring.d, self.ring.modulus
        r, c, v = part
        g, j = np.divmod(c, d)
        # pack (row, g) into a key, build dense t-rows of width d + k, reduce
        key = r.astype(np.int64) * G + g
        uk, pos = np.unique(key, return_inverse=True)
        dense = np.zeros((uk.shape[0], d + k), dtype=np.int64)
        np.add.at(dense, (pos, j + k), v)
        red = _reduce_rows(ring, dense % M)
        rr, cc = np.nonzero(red)
        return (uk[rr] // G, (uk[rr] % G) * d + cc, red[rr, cc])

    def _horner(self, exps, leaves, vars):
        keep = [i for i, lf in enumerate(leaves) if lf is not None]
        if not keep:
            return Poly.zero(self.ring, self.m)
        exps = exps[keep]
        leaves = [leaves[i] for i in keep]
        return self._eval(exps, leaves, vars, 0)

    def _eval(self, exps, leaves, vars, pos):
        if pos == len(vars):
            acc = leaves[0]
            for lf in leaves[1:]:
                acc = acc + lf
            return acc
        col = exps[:, pos]
        order = np.argsort(col, kind="stable")
        col = col[order]
        exps = exps[order]
        leaves = [leaves[i] for i in order]
        bounds = np.flatnonzero(np.diff(col)) + 1
        starts = [0] + bounds.tolist()
        ends = bounds.tolist() + [len(col)]
        acc = None
        prev = None
        for s, e in reversed(list(zip(starts, ends))):
            k = int(col[s])
            child = self._eval(exps[s:e], leaves[s:e], vars, pos + 1)
            if acc is None:
                acc = child
            else:
                acc = acc * self.power(vars[pos], prev - k) + child
            prev = k
        if prev:
            acc = acc * self.power(vars[pos], prev)
        return acc
