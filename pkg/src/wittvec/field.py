"""Finite fields F_{p^d} = F_p[t]/(f).

Both this module and :mod:`wittvec.galois` model rings of the form
(Z/p^k)[t]/(f) with f monic of degree d; the shared machinery lives in
:class:`ResidueRing`. Elements are tuples of ``d`` residues, constant term first.
"""

import itertools
import random as _random

import gmpy2

from . import textio
from .errors import DivisionByZero, InvalidParameter, ParseError


def is_prime(p):
    return isinstance(p, int) and p >= 2 and bool(gmpy2.is_prime(p))


# --- dense polynomials over F_p, coefficient lists with constant term first ---

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_sub(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _fp_divmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] = (a[k + j] - c * y) % p
    return _trim(q), _trim(a[: len(b) - 1])


def _fp_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _fp_divmod(a, b, p)[1]
    return a


def _fp_powmod(base, e, f, p):
    result = [1]
    base = _fp_divmod(base, f, p)[1]
    while e:
        if e & 1:
            result = _fp_divmod(_fp_mul(result, base, p), f, p)[1]
        base = _fp_divmod(_fp_mul(base, base, p), f, p)[1]
        e >>= 1
    return result


def _prime_factors(n):
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f, p):
    """Rabin's test for a monic ``f`` (coefficient list, constant first) over F_p."""
    f = _trim(list(f))
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    t = [0, 1]
    if _fp_sub(_fp_powmod(t, p**d, f, p), t, p):
        return False
    for r in _prime_factors(d):
        h = _fp_sub(_fp_powmod(t, p ** (d // r), f, p), t, p)
        if len(_fp_gcd(f, h, p)) != 1:
            return False
    return True


def find_irreducible(p, d):
    """Lexicographically smallest monic irreducible of degree ``d`` over F_p.

    Candidates are ordered by their coefficient tuples read from the constant
    term upward. Returns the coefficient tuple of length ``d + 1``.
    """
    if not is_prime(p):
        raise InvalidParameter(f"p={p} is not prime")
    if d < 1:
        raise InvalidParameter(f"degree must be >= 1, got {d}")
    for low in itertools.product(range(p), repeat=d):
        f = list(low) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("unreachable: irreducibles exist in every degree")


class Residue:
    """An element of a :class:`ResidueRing`; immutable."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs):
        self.ring = ring
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, Residue):
            if other.ring != self.ring:
                return NotImplemented
            return other
        if isinstance(other, int):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring.sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring.sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.ring.neg(self)

    def __pow__(self, e):
        return self.ring.pow(self, e)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        if not isinstance(other, Residue):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def __str__(self):
        return self.ring.format(self)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class ResidueRing:
    """(Z/p^k)[t]/(f) with f monic of degree d."""

    element_class = Residue

    def __init__(self, p, k, fpoly):
        self.p = p
        self.k = k
        self.fpoly = tuple(int(c) % p**k for c in fpoly)
        self.d = len(self.fpoly) - 1
        self.modulus = p**k

    def _key(self):
        return (type(self).__name__, self.p, self.k, self.fpoly)

    def __eq__(self, other):
        return isinstance(other, ResidueRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __call__(self, value):
        """Coerce an int, a coefficient sequence or an element into this ring."""
        if isinstance(value, Residue):
            if value.ring != self:
                raise InvalidParameter(f"element of {value.ring} is not in {self}")
            return value
        if isinstance(value, int):
            coeffs = [value % self.modulus] + [0] * (self.d - 1)
            return self.element_class(self, tuple(coeffs))
        return self.element_class(self, self._reduce(list(value)))

    def _reduce(self, c):
        """Reduce a coefficient list of any length modulo (p^k, f)."""
        M, d, f = self.modulus, self.d, self.fpoly
        c = [x % M for x in c]
        for top in range(len(c) - 1, d - 1, -1):
            lead = c[top]
            if lead:
                for j in range(d):
                    c[top - d + j] = (c[top - d + j] - lead * f[j]) % M
        c = c[:d] + [0] * (d - len(c))
        return tuple(c)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def gen(self):
        """The class of t."""
        return self([0, 1])

    def add(self, a, b):
        M = self.modulus
        return self.element_class(self, tuple((x + y) % M for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a, b):
        M = self.modulus
        return self.element_class(self, tuple((x - y) % M for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a):
        M = self.modulus
        return self.element_class(self, tuple(-x % M for x in a.coeffs))

    def mul(self, a, b):
        prod = [0] * (2 * self.d - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    prod[i + j] += x * y
        return self.element_class(self, self._reduce(prod))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one()
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    def inv(self, a):
        raise NotImplementedError

    def elements(self):
        """Iterate over all elements (exhaustive; only sensible for tiny rings)."""
        for c in itertools.product(range(self.modulus), repeat=self.d):
            yield self.element_class(self, tuple(c))

    def random_element(self, rng=None):
        rng = rng or _random
        return self.element_class(self, tuple(rng.randrange(self.modulus) for _ in range(self.d)))

    def format(self, a):
        parts = []
        for i in range(self.d - 1, -1, -1):
            c = a.coeffs[i]
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) if parts else "0"

    def parse(self, text, line=1):
        """Parse an element written as a polynomial in ``t``, e.g. ``2*t^3 + t + 1``."""
        coeffs = {}
        for coef, texp, _ in textio.parse_terms(text, (), line=line):
            coeffs[texp] = coeffs.get(texp, 0) + coef
        if not coeffs:
            raise ParseError("empty element", line, 1)
        top = max(coeffs)
        return self([coeffs.get(i, 0) for i in range(top + 1)])


class FqElement(Residue):
    __slots__ = ()

    def inverse(self):
        return self.ring.inv(self)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring.mul(self, self.ring.inv(other))

    def frobenius(self, r=1):
        return self.ring.frobenius(self, r)

    def pth_root(self, r=1):
        return self.ring.pth_root(self, r)


class FqField(ResidueRing):
    """The finite field F_{p^d} = F_p[t]/(f).

    When ``modulus`` is omitted, f is the lexicographically smallest monic
    irreducible of degree ``d`` (see :func:`find_irreducible`). An explicit
    modulus is checked for irreducibility.
    """

    element_class = FqElement

    def __init__(self, p, d=1, modulus=None):
        if not is_prime(p):
            raise InvalidParameter(f"p={p} is not prime")
        if modulus is None:
            modulus = find_irreducible(p, d)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != d + 1 or modulus[-1] != 1:
                raise InvalidParameter(f"modulus must be monic of degree {d}")
            if not is_irreducible(modulus, p):
                raise InvalidParameter("modulus is not irreducible over F_p")
        super().__init__(p, 1, modulus)

    @property
    def q(self):
        return self.p**self.d

    def __repr__(self):
        return f"FqField(p={self.p}, d={self.d}, f={self.format_modulus()})"

    def format_modulus(self):
        parts = []
        for i in range(self.d, -1, -1):
            c = self.fpoly[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)

    def inv(self, a):
        if a.is_zero():
            raise DivisionByZero("inverse of zero in F_q")
        return self.pow(a, self.q - 2)

    def frobenius(self, a, r=1):
        """Return a^(p^r)."""
        r %= self.d
        return self.pow(a, self.p**r) if r else a

    def pth_root(self, a, r=1):
        """The unique y with y^(p^r) = a."""
        return self.frobenius(a, (self.d - r % self.d) % self.d)

    def frobenius_matrix(self, r=1):
        """Matrix over F_p of x -> x^(p^r) acting on coefficient rows (row i is the image of t^i)."""
        return [list(self.frobenius(self([0] * i + [1]), r).coeffs) for i in range(self.d)]
