"""Galois rings GR(p^n, d) = (Z/p^n)[t]/(f~), the coefficient ring W_n(F_q).

f~ is always the digitwise lift of the residue field's modulus, so reduction
mod p and the digitwise lift are inverse on canonical residues.

The working modulus is fixed at p^n. After an exact division by p^j only the
residue mod p^(n-j) carries information; callers consume exactly that.
"""

from .errors import InvalidParameter, NotDivisible
from .field import FqField, Residue, ResidueRing


class GrElement(Residue):
    __slots__ = ()

    def reduce(self):
        return self.ring.reduce(self)

    def exact_div_p(self, j=1):
        return self.ring.exact_div_p(self, j)


class GaloisRing(ResidueRing):
    element_class = GrElement

    def __init__(self, field, n):
        if not isinstance(field, FqField):
            raise InvalidParameter("GaloisRing needs an FqField residue field")
        if n < 1:
            raise InvalidParameter(f"n must be >= 1, got {n}")
        self.field = field
        self.n = n
        super().__init__(field.p, n, field.fpoly)

    def __repr__(self):
        return f"GaloisRing(p={self.p}, n={self.n}, d={self.d})"

    def reduce(self, z):
        """Digitwise reduction mod p onto the residue field."""
        p = self.p
        return self.field.element_class(self.field, tuple(c % p for c in z.coeffs))

    def lift(self, a):
        """Digitwise lift of a residue-field element."""
        if a.ring != self.field:
            raise InvalidParameter(f"{a!r} is not in the residue field of {self!r}")
        return self.element_class(self, a.coeffs)

    def exact_div_p(self, z, j=1):
        """Return w with p^j * w = z, top j base-p digits of each coefficient zero."""
        if j == 0:
            return z
        pj = self.p**j
        if any(c % pj for c in z.coeffs):
            raise NotDivisible(f"{z} is not divisible by {self.p}^{j}")
        return self.element_class(self, tuple(c // pj for c in z.coeffs))

    def inv(self, a):
        if not any(c % self.p for c in a.coeffs):
            raise NotDivisible(f"{a} is not a unit in {self!r}")
        # Hensel: start from the residue-field inverse and double precision.
        x = self.lift(self.reduce(a).inverse())
        for _ in range(self.n.bit_length()):
            x = self.mul(x, self.sub(self(2), self.mul(a, x)))
        return x
