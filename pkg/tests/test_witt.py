import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittvec import (Backend, ContextMismatch, GaloisRing, InvalidParameter, Poly, WittContext,
                     ghost_components, ghost_inverse, illusie_lift, illusie_unlift,
                     is_in_illusie_image, poly_frobenius, poly_lift, random_witt, teichmueller,
                     verschiebung, witt_add, witt_frobenius, witt_mul, witt_neg, witt_one,
                     witt_op, witt_sub, witt_zero)
from wittvec.witt import monomials_within

BACKENDS = list(Backend)


def gr_poly(ctx, text):
    return Poly.parse(ctx.ring, ctx.m, text)


# --- examples ---------------------------------------------------------------------


def test_ghost_examples():
    ctx = WittContext(2, 1, 2, 1)
    X, = ctx.gens()
    g = ghost_components(ctx.vector([X, 0]))
    assert g.comps == (gr_poly(ctx, "X1"), gr_poly(ctx, "X1^2"))
    back = ghost_inverse(ctx, [gr_poly(ctx, "2*X1"), gr_poly(ctx, "2*X1^2")])
    assert back == ctx.vector([0, X**2])


def test_illusie_examples():
    ctx = WittContext(2, 1, 2, 1)
    X, = ctx.gens()
    w = ctx.vector([X, 1])
    P = illusie_lift(w)
    assert P == gr_poly(ctx, "X1^2 + 2")
    assert illusie_unlift(ctx, P) == w
    assert not is_in_illusie_image(ctx, gr_poly(ctx, "X1"))
    assert is_in_illusie_image(ctx, P)


def test_doubling_example_all_backends():
    ctx = WittContext(2, 1, 2, 1)
    X, = ctx.gens()
    a = ctx.vector([X, 0])
    for b in BACKENDS:
        assert witt_add(a, a, b) == ctx.vector([0, X**2])


def test_identities_and_context_checks():
    ctx = WittContext(3, 2, 3, 2)
    w = random_witt(ctx, 2, "total", 1)
    for b in BACKENDS:
        assert witt_add(w, witt_zero(ctx), b) == w
        assert witt_mul(w, witt_one(ctx), b) == w
        assert witt_mul(w, witt_zero(ctx), b) == witt_zero(ctx)
    other = random_witt(WittContext(3, 2, 2, 2), 2, "total", 1)
    with pytest.raises(ContextMismatch):
        witt_add(w, other)
    with pytest.raises(InvalidParameter):
        witt_op("div", w, w)


def test_verschiebung_and_frobenius():
    ctx = WittContext(2, 2, 3, 1)
    X, = ctx.gens()
    w = ctx.vector([X, X + 1, 1])
    assert verschiebung(w) == ctx.vector([0, X, X + 1])
    assert verschiebung(w, 5) == witt_zero(ctx)
    # F(V(w)) = p * w in characteristic p
    p_times_w = w
    for _ in range(ctx.p - 1):
        p_times_w = witt_add(p_times_w, w)
    assert witt_frobenius(verschiebung(w)) == p_times_w
    assert witt_frobenius(w, 0) == w


def test_p_times_one_is_v_of_one():
    for p in (2, 3, 5):
        ctx = WittContext(p, 1, 3, 0)
        acc = witt_zero(ctx)
        for _ in range(p):
            acc = witt_add(acc, witt_one(ctx), Backend.PHANTOM)
        assert acc == verschiebung(witt_one(ctx))


# --- Teichmueller representatives ----------------------------------------------------


@pytest.mark.parametrize("p,d,n", [(2, 1, 3), (3, 2, 2), (5, 1, 2)])
def test_teichmueller_is_multiplicative(p, d, n):
    ctx = WittContext(p, d, n, 2)
    rng = random.Random(p)
    for _ in range(5):
        a, b = random_witt(ctx, 2, "total", rng).coords[0], random_witt(ctx, 2, "total", rng).coords[0]
        for bk in BACKENDS:
            assert witt_mul(teichmueller(ctx, a), teichmueller(ctx, b), bk) == teichmueller(ctx, a * b)


def test_teichmueller_ghost_components_are_powers():
    ctx = WittContext(3, 1, 3, 1)
    X, = ctx.gens()
    a = X**2 + X + 2
    g = ghost_components(teichmueller(ctx, a))
    G = poly_lift(a, ctx.ring)
    assert g.comps == (G, G**3, G**9)


# --- negation ------------------------------------------------------------------------


@pytest.mark.parametrize("p", [3, 5, 7])
def test_odd_negation_is_coordinatewise(p):
    ctx = WittContext(p, 2, 3, 1)
    w = random_witt(ctx, 3, "per-var", p)
    for b in BACKENDS:
        assert witt_neg(w, b) == ctx.vector([-c for c in w.coords])


def test_negation_in_characteristic_two():
    ctx = WittContext(2, 1, 2, 0)
    one = witt_one(ctx)
    for b in BACKENDS:
        minus = witt_neg(one, b)
        assert minus == ctx.vector([1, 1])
        assert witt_add(one, minus, b) == witt_zero(ctx)


# --- backend agreement ---------------------------------------------------------------

GRID = [(p, d, n, m) for p in (2, 3) for d in (1, 2) for n in (1, 2, 3) for m in (1, 2)]


@pytest.mark.parametrize("p,d,n,m", GRID)
def test_backends_agree(p, d, n, m):
    ctx = WittContext(p, d, n, m)
    rng = random.Random(hash((p, d, n, m)) % 997)
    for _ in range(3):
        a, b = random_witt(ctx, 2, "total", rng), random_witt(ctx, 2, "total", rng)
        for op in ("add", "sub", "mul"):
            results = {bk: witt_op(op, a, b, bk) for bk in BACKENDS}
            ref = results[Backend.NAIVE]
            assert all(r == ref for r in results.values()), (op, a, b)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(2, 1, 3, 1), (3, 2, 2, 1), (5, 1, 2, 2), (2, 2, 2, 2)]),
       st.integers(0, 2**32))
def test_ring_axioms_hypothesis(params, seed):
    ctx = WittContext(*params)
    rng = random.Random(seed)
    a, b, c = (random_witt(ctx, 2, "total", rng) for _ in range(3))
    bk = Backend.ILLUSIE
    assert witt_add(a, b, bk) == witt_add(b, a, bk)
    assert witt_mul(a, b, bk) == witt_mul(b, a, bk)
    assert witt_add(witt_add(a, b, bk), c, bk) == witt_add(a, witt_add(b, c, bk), bk)
    assert witt_mul(witt_mul(a, b, bk), c, bk) == witt_mul(a, witt_mul(b, c, bk), bk)
    assert witt_mul(a, witt_add(b, c, bk), bk) == witt_add(witt_mul(a, b, bk), witt_mul(a, c, bk), bk)
    assert witt_sub(a, b, bk) == witt_add(a, witt_neg(b, bk), bk)


# --- lift and ghost maps -----------------------------------------------------------------


@pytest.mark.parametrize("p,d,n,m", [(2, 1, 3, 1), (3, 2, 3, 2), (5, 1, 2, 1), (2, 2, 4, 1)])
def test_illusie_lift_round_trip_and_image(p, d, n, m):
    ctx = WittContext(p, d, n, m)
    rng = random.Random(n)
    for _ in range(5):
        w = random_witt(ctx, 2, "total", rng)
        P = illusie_lift(w)
        assert is_in_illusie_image(ctx, P)
        assert illusie_unlift(ctx, P) == w


@pytest.mark.parametrize("p,d,n,m", [(2, 1, 3, 1), (3, 2, 2, 2), (2, 2, 3, 1)])
def test_lift_is_independent_of_chosen_lifts(p, d, n, m):
    """Adding p * (anything) to the coordinate lifts leaves the lift map, the top ghost
    component and the reconstructed vector unchanged."""
    ctx = WittContext(p, d, n, m)
    rng = random.Random(7 * p + n)
    for _ in range(5):
        w = random_witt(ctx, 2, "total", rng)
        base = [poly_lift(c, ctx.ring) for c in w.coords]
        noise = [poly_lift(c, ctx.ring) for c in random_witt(ctx, 2, "total", rng).coords]
        other = [G + H.scale(p) for G, H in zip(base, noise)]
        assert illusie_lift(w, other) == illusie_lift(w)
        g = ghost_components(w, other)
        assert g[n - 1] == illusie_lift(w)
        assert ghost_inverse(ctx, g) == w


def test_supplied_lifts_are_checked():
    ctx = WittContext(2, 1, 2, 1)
    X, = ctx.gens()
    w = ctx.vector([X, 0])
    with pytest.raises(InvalidParameter):
        illusie_lift(w, [gr_poly(ctx, "X1 + 1"), Poly.zero(ctx.ring, 1)])


@pytest.mark.parametrize("p,d,n,m", [(2, 1, 3, 1), (3, 2, 3, 1), (5, 1, 2, 2)])
def test_ghost_inverse_inverts_ghost(p, d, n, m):
    ctx = WittContext(p, d, n, m)
    rng = random.Random(3)
    for _ in range(5):
        w = random_witt(ctx, 3, "per-var", rng)
        assert ghost_inverse(ctx, ghost_components(w)) == w


def test_ghost_arithmetic_matches_classical_laws():
    ctx = WittContext(3, 2, 3, 1)
    rng = random.Random(17)
    for _ in range(5):
        a, b = random_witt(ctx, 2, "total", rng), random_witt(ctx, 2, "total", rng)
        ga, gb = ghost_components(a), ghost_components(b)
        # componentwise ghost arithmetic reconstructs the classical sum and product
        assert ghost_inverse(ctx, ga + gb) == witt_add(a, b, Backend.NAIVE)
        assert ghost_inverse(ctx, ga * gb) == witt_mul(a, b, Backend.NAIVE)
        assert (ga * gb)[2] == ghost_components(witt_mul(a, b, Backend.NAIVE))[2]


def test_lift_of_product_is_product_of_lifts():
    ctx = WittContext(2, 2, 3, 1)
    rng = random.Random(23)
    for _ in range(5):
        a, b = random_witt(ctx, 2, "total", rng), random_witt(ctx, 2, "total", rng)
        assert illusie_lift(witt_mul(a, b, Backend.NAIVE)) == illusie_lift(a) * illusie_lift(b)
        assert illusie_lift(witt_add(a, b, Backend.NAIVE)) == illusie_lift(a) + illusie_lift(b)


def test_frobenius_on_lift_matches_coordinates():
    ctx = WittContext(3, 1, 2, 1)
    w = random_witt(ctx, 2, "total", 5)
    assert witt_frobenius(w).coords == tuple(poly_frobenius(c) for c in w.coords)


# --- random instances -------------------------------------------------------------------


def test_monomials_within():
    assert monomials_within(2, 1, "per-var") == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert sorted(monomials_within(2, 2, "total")) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]
    assert monomials_within(0, 3, "total") == [()]
    with pytest.raises(InvalidParameter):
        monomials_within(1, 1, "bogus")


def test_random_witt_is_deterministic_and_bounded():
    ctx = WittContext(3, 2, 3, 2)
    assert random_witt(ctx, 3, "total", 42) == random_witt(ctx, 3, "total", 42)
    assert random_witt(ctx, 3, "total", 42) != random_witt(ctx, 3, "total", 43)
    w = random_witt(ctx, 3, "total", 1)
    for c in w.coords:
        assert all(sum(e) <= 3 for e, _ in c.items())
    w = random_witt(ctx, 2, "per-var", 1)
    for c in w.coords:
        assert all(max(e) <= 2 for e, _ in c.items())
    with pytest.raises(InvalidParameter):
        random_witt(ctx, -1)


def test_random_witt_coefficients_are_uniform():
    ctx = WittContext(3, 1, 1, 1)
    counts = [0, 0, 0]
    trials = 3000
    for s in range(trials):
        c = random_witt(ctx, 0, "per-var", s).coords[0]
        counts[int(c.coeffs[0, 0]) if len(c) else 0] += 1
    expected = trials / 3
    sigma = (trials * (1 / 3) * (2 / 3)) ** 0.5
    assert all(abs(k - expected) < 5 * sigma for k in counts)


def test_galois_ring_of_context():
    ctx = WittContext(5, 2, 3, 1)
    assert ctx.ring == GaloisRing(ctx.field, 3)
    assert ctx.header().startswith("witt p=5 d=2 n=3 m=1 f=")


def divisible(P, q):
    return all(int(x) % q == 0 for row in P.coeffs.tolist() for x in row)


@pytest.mark.parametrize("p,d,n,m", [(2, 1, 4, 1), (3, 2, 3, 2), (5, 1, 3, 1)])
def test_ghost_homomorphism_at_component_precision(p, d, n, m):
    ctx = WittContext(p, d, n, m)
    rng = random.Random(29 + p)
    for _ in range(4):
        a, b = random_witt(ctx, 2, "total", rng), random_witt(ctx, 2, "total", rng)
        ga, gb = ghost_components(a), ghost_components(b)
        gs = ghost_components(witt_add(a, b, Backend.NAIVE))
        gp = ghost_components(witt_mul(a, b, Backend.NAIVE))
        for j in range(n):
            assert divisible(gs[j] - (ga[j] + gb[j]), p ** (j + 1))
            assert divisible(gp[j] - ga[j] * gb[j], p ** (j + 1))
