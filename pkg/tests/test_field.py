import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittvec import DivisionByZero, FqField, InvalidParameter, find_irreducible, is_irreducible


def brute_force_irreducible(f, p):
    """No monic factor of degree 1..deg/2, by exhaustive trial division."""
    d = len(f) - 1
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            g = list(low) + [1]
            rem = list(f)
            for top in range(d, k - 1, -1):
                c = rem[top]
                if c:
                    for j in range(k + 1):
                        rem[top - k + j] = (rem[top - k + j] - c * g[j]) % p
            if not any(rem[:k]):
                return False
    return True


def schoolbook_mul(a, b, f, p):
    """Multiply coefficient tuples mod (p, f) without touching library code."""
    d = len(f) - 1
    out = [0] * (2 * d)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    for top in range(2 * d - 1, d - 1, -1):
        c = out[top] % p
        for j in range(d + 1):
            out[top - d + j] -= c * f[j]
    return tuple(x % p for x in out[:d])


def test_find_irreducible_small_cases():
    assert find_irreducible(2, 1) == (0, 1)
    assert find_irreducible(2, 2) == (1, 1, 1)


@pytest.mark.parametrize("p,d", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2), (5, 3)])
def test_find_irreducible_is_lex_smallest(p, d):
    f = find_irreducible(p, d)
    assert brute_force_irreducible(f, p)
    for low in itertools.product(range(p), repeat=d):
        g = tuple(low) + (1,)
        if g == f:
            break
        assert not brute_force_irreducible(g, p)


@pytest.mark.parametrize("p,d", [(2, 3), (3, 2), (3, 3), (5, 2)])
def test_rabin_matches_brute_force(p, d):
    for low in itertools.product(range(p), repeat=d):
        f = list(low) + [1]
        assert is_irreducible(f, p) == brute_force_irreducible(f, p)


def test_field_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        FqField(4)
    with pytest.raises(InvalidParameter):
        FqField(2, 2, modulus=(1, 0, 1))  # t^2 + 1 = (t + 1)^2 over F_2
    with pytest.raises(InvalidParameter):
        FqField(3, 2, modulus=(1, 1))


def test_f4_examples():
    F = FqField(2, 2)
    t = F.gen()
    assert t * t == F([1, 1])
    assert t.frobenius(1) == F([1, 1])
    assert F([1, 1]).pth_root(1) == t


@pytest.mark.parametrize("p,d", [(2, 2), (3, 2), (2, 3), (5, 2)])
def test_multiplication_table_against_schoolbook(p, d):
    F = FqField(p, d)
    elems = list(F.elements())
    for a, b in itertools.product(elems, repeat=2):
        assert (a * b).coeffs == schoolbook_mul(a.coeffs, b.coeffs, F.fpoly, p)


@pytest.mark.parametrize("p,d", [(2, 1), (2, 3), (3, 2), (5, 2), (7, 1)])
def test_inverse_and_division(p, d):
    F = FqField(p, d)
    one = F.one()
    for x in F.elements():
        if x.is_zero():
            with pytest.raises(DivisionByZero):
                x.inverse()
            continue
        assert x * x.inverse() == one
        assert (one / x) * x == one
        assert x * one == x


@pytest.mark.parametrize("p,d", [(2, 3), (3, 2), (5, 2), (3, 1)])
def test_frobenius_and_roots(p, d):
    F = FqField(p, d)
    for x in F.elements():
        assert x.frobenius(0) == x
        assert x.pth_root(0) == x
        for r in range(3 * d + 1):
            assert x.frobenius(r) == x ** (p**r)
            assert x.frobenius(r).pth_root(r) == x
            assert x.pth_root(r).frobenius(r) == x


def test_prime_field_frobenius_is_identity():
    F = FqField(7)
    for x in F.elements():
        for r in range(4):
            assert x.frobenius(r) == x


def test_frobenius_is_ring_homomorphism():
    F = FqField(3, 3)
    rng = random.Random(5)
    for _ in range(200):
        a, b = F.random_element(rng), F.random_element(rng)
        assert (a + b).frobenius(1) == a.frobenius(1) + b.frobenius(1)
        assert (a * b).frobenius(1) == a.frobenius(1) * b.frobenius(1)


fields = st.sampled_from([FqField(2, 4), FqField(3, 2), FqField(5, 3), FqField(13, 1)])


@settings(max_examples=150, deadline=None)
@given(fields, st.data())
def test_field_axioms(F, data):
    coeff = st.lists(st.integers(0, F.p - 1), min_size=F.d, max_size=F.d)
    a, b, c = (F(data.draw(coeff)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == F.zero()
    if not a.is_zero():
        assert a * a.inverse() == F.one()


def test_parse_and_format_round_trip():
    F = FqField(5, 3)
    rng = random.Random(1)
    for _ in range(50):
        x = F.random_element(rng)
        assert F.parse(str(x)) == x
    # f = t^3 + t^2 + 1: t^3 + 1 has the root -1, and this is the next candidate
    assert F.format_modulus() == "t^3 + t^2 + 1"
    assert F.parse("t^3") == F([4, 0, 4])
