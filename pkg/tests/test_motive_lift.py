import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadric_motives.correspondences import (
    Correspondence,
    NotIdempotentError,
    compose,
    diagonal,
    is_gal_invariant,
    reduce,
)
from quadric_motives.exact_linalg import ZZ, CoeffRing
from quadric_motives.harness import enumerate_idempotents_mod2
from quadric_motives.motive_lift import (
    IsoClass,
    NotInvertibleError,
    classify,
    lift_isomorphism,
    lift_mod2_to_mod2n,
    lift_projector,
    summand_bases,
    summand_inverse,
)
from quadric_motives.rationality import RationalityContext
from quadric_motives.split_chow import GaloisContext, SplitQuadric

Z2, Z4, Z8 = CoeffRing(2), CoeffRing(4), CoeffRing(8)


def corr(X, ring, blocks, Y=None):
    return Correspondence.from_blocks(X, Y or X, ring, blocks)


def iso_input(D, disc, n, middle):
    X = SplitQuadric(D, disc)
    galois = GaloisContext(len(disc), n)
    ring = galois.ring
    blocks = {i: [[1]] for i in range(D + 1) if 2 * i != D}
    blocks[D // 2] = middle
    alpha = corr(X, ring, blocks)
    rho = diagonal(X)
    ctx = RationalityContext(X, X, galois, [alpha])
    return rho, alpha, ctx


# -- lift_mod2_to_mod2n ---------------------------------------------------------

def test_mod2_lift_examples():
    X = SplitQuadric(2, (0,))
    assert lift_mod2_to_mod2n(diagonal(X, Z2), 3) == diagonal(X, Z8)
    assert lift_mod2_to_mod2n(Correspondence.zero(X, X, Z2), 3).is_zero()
    pi = corr(X, Z2, {1: [[1, 1], [0, 0]]})
    tau = lift_mod2_to_mod2n(pi, 2)
    assert tau.ring == Z4 and tau.is_idempotent() and reduce(tau, Z2) == pi
    assert tau.blocks[1].to_rows() == [[1, 1], [0, 0]]


def test_mod2_lift_rejects_bad_input():
    X = SplitQuadric(2, (1,))
    with pytest.raises(ValueError):
        lift_mod2_to_mod2n(diagonal(X, Z4), 2)
    with pytest.raises(NotIdempotentError):
        lift_mod2_to_mod2n(corr(X, Z2, {1: [[1, 1], [1, 1]]}), 2)
    with pytest.raises(ValueError):
        lift_mod2_to_mod2n(corr(X, Z2, {1: [[1, 0], [0, 0]]}), 2)


# -- lift_projector -------------------------------------------------------------

def test_lift_projector_trace():
    X = SplitQuadric(2, (0,))
    tau = corr(X, Z4, {1: [[3, 1], [2, 2]]})
    ctx = RationalityContext(X, X, GaloisContext(1, 2), [tau])
    rho = lift_projector(tau, ctx)
    assert rho.blocks[1].to_rows() == [[-1, 1], [-2, 2]]
    assert rho.blocks[0].is_zero() and rho.blocks[2].is_zero()


def test_lift_projector_zero_one_blocks_verbatim():
    X = SplitQuadric(3, (0,))
    tau = corr(X, Z4, {0: [[1]], 2: [[1]]})
    ctx = RationalityContext(X, X, GaloisContext(1, 2), [tau])
    rho = lift_projector(tau, ctx)
    assert [b.to_rows() for b in rho.blocks] == [[[1]], [[0]], [[1]], [[0]]]


def test_lift_projector_nonsplit_middle_identity():
    X = SplitQuadric(2, (1,))
    ctx = RationalityContext(X, X, GaloisContext(1, 2))
    rho = lift_projector(diagonal(X, Z4), ctx)
    assert rho == diagonal(X)


@pytest.mark.parametrize("D,disc", [(2, (0,)), (2, (1,)), (3, (0,)), (4, (0,)), (4, (1,))])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_every_enumerated_projector_lifts(D, disc, n):
    X = SplitQuadric(D, disc)
    ctx = RationalityContext(X, X, GaloisContext(1, n), kind="invariant")
    for pi in enumerate_idempotents_mod2(X, ctx):
        tau = lift_mod2_to_mod2n(pi, n, ctx)
        rho = lift_projector(tau, ctx)
        assert rho.is_idempotent() and is_gal_invariant(rho)
        assert reduce(rho, tau.ring) == tau
        assert ctx.is_rational_integral(rho)


# -- lift_isomorphism -----------------------------------------------------------

def test_lift_iso_identity_case():
    X = SplitQuadric(3, (0,))
    ctx = RationalityContext(X, X, GaloisContext(1, 2))
    c = lift_isomorphism(diagonal(X), diagonal(X), diagonal(X, Z4), ctx)
    assert c == diagonal(X)


def test_lift_iso_nonsplit_middle_trace():
    rho, alpha, ctx = iso_input(2, (1,), 2, [[0, 1], [1, 0]])
    c = lift_isomorphism(rho, rho, alpha, ctx)
    assert c.blocks[1].to_rows() == [[1, 0], [0, 1]]
    assert c == diagonal(rho.source)


def test_lift_iso_split_middle_trace():
    rho, alpha, ctx = iso_input(2, (0,), 3, [[1, 2], [2, 1]])
    c = lift_isomorphism(rho, rho, alpha, ctx)
    assert c.blocks[1].to_rows() == [[-1, 0], [0, -1]]
    assert c.blocks[1].det() == 1


def test_lift_iso_mismatched_markers():
    X, Y = SplitQuadric(2, (1, 0)), SplitQuadric(2, (0, 1))
    galois = GaloisContext(2, 2)
    ctx = RationalityContext(X, Y, galois)
    alpha = Correspondence.zero(X, Y, galois.ring)
    assert lift_isomorphism(diagonal(X), diagonal(Y), alpha, ctx) is None
    Z = SplitQuadric(4, (1, 0))
    ctx = RationalityContext(X, Z, galois)
    rho = corr(X, ZZ, {1: [[1, 0], [0, 1]]})
    sigma = corr(Z, ZZ, {2: [[1, 0], [0, 1]]})
    assert lift_isomorphism(rho, sigma, Correspondence.zero(X, Z, galois.ring), ctx) is None


def test_lift_iso_rank_mismatch():
    X = SplitQuadric(3, (0,))
    ctx = RationalityContext(X, X, GaloisContext(1, 2), kind="invariant")
    rho = corr(X, ZZ, {0: [[1]]})
    sigma = corr(X, ZZ, {1: [[1]]})
    assert lift_isomorphism(rho, sigma, Correspondence.zero(X, X, Z4), ctx) is None


def test_lift_iso_not_invertible():
    X = SplitQuadric(3, (0,))
    ctx = RationalityContext(X, X, GaloisContext(1, 2))
    with pytest.raises(NotInvertibleError):
        lift_isomorphism(diagonal(X), diagonal(X), diagonal(X, Z4).scale(2), ctx)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, (0,)), (2, (1,)), (4, (0,)), (4, (1,)), (3, (0,))]),
       st.integers(2, 3), st.data())
def test_lift_iso_random_automorphisms(shape, n, data):
    """Random invariant automorphisms of the diagonal lift to integral rational isos."""
    D, disc = shape
    X = SplitQuadric(D, disc)
    m = 2 ** n
    units = st.integers(0, m // 2 - 1).map(lambda k: 2 * k + 1)
    blocks = {i: [[data.draw(units)]] for i in range(D + 1) if 2 * i != D}
    if D % 2 == 0:
        if any(disc):
            a, b = data.draw(st.integers(0, m - 1)), data.draw(st.integers(0, m - 1))
            if (a - b) % 2 == 0:
                a += 1
            blocks[D // 2] = [[a, b], [b, a]]
        else:
            M = [[data.draw(st.integers(0, m - 1)) for _ in range(2)] for _ in range(2)]
            if (M[0][0] * M[1][1] - M[0][1] * M[1][0]) % 2 == 0:
                M = [[1, M[0][1]], [0, 1]]
            blocks[D // 2] = M
    galois = GaloisContext(1, n)
    alpha = corr(X, galois.ring, blocks)
    ctx = RationalityContext(X, X, galois, [alpha])
    c = lift_isomorphism(diagonal(X), diagonal(X), alpha, ctx)
    assert c is not None and is_gal_invariant(c) and ctx.is_rational_integral(c)
    c_inv = summand_inverse(c, diagonal(X), diagonal(X))
    assert compose(c_inv, c) == diagonal(X) == compose(c, c_inv)
    # scaling by a unit changes nothing about success
    u = data.draw(units)
    assert lift_isomorphism(diagonal(X), diagonal(X), alpha.scale(u), ctx) is not None


# -- classify -------------------------------------------------------------------

def test_classify_examples():
    assert classify(diagonal(SplitQuadric(2, (0,)))) == IsoClass((0, 1, 1, 2))
    assert classify(diagonal(SplitQuadric(2, (1,)))) == IsoClass((0, 2), (1, (1,)))
    assert classify(diagonal(SplitQuadric(1, (0,)))) == IsoClass((0, 1))
    assert classify(Correspondence.zero(SplitQuadric(2, (1,)), SplitQuadric(2, (1,)))) == IsoClass(())


def test_isoclass_json_roundtrip():
    for cls in (IsoClass((0, 1, 1, 2)), IsoClass((0, 2), (1, (1, 0)))):
        assert IsoClass.from_json(cls.to_json()) == cls


def test_summand_bases_rank_one():
    X = SplitQuadric(2, (0,))
    rho = corr(X, ZZ, {1: [[-1, 1], [-2, 2]]})
    bases = summand_bases(rho)
    assert [b.rank for b in bases] == [0, 1, 0]
    V = bases[1].vectors
    assert V.to_rows() == [[1], [2]]
    assert rho.blocks[1] @ V == V
