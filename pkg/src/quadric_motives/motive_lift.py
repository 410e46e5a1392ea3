"""Lifting projectors and isomorphisms of quadric motives from mod 2 to integral coefficients.

The route is ``Z/2 -> Z/2^n -> Z``:

* :func:`lift_mod2_to_mod2n` lifts a projector along the nilpotent kernel of
  ``Z/2^n -> Z/2`` by Newton iteration;
* :func:`lift_projector` turns a Galois-invariant projector mod ``2^n`` into
  an integral one, going through ``SL_2`` in the rank-one middle case;
* :func:`lift_isomorphism` builds an integral rational isomorphism between two
  integral motives from an isomorphism mod ``2^n``;
* :func:`classify` computes the Tate-twist data of a motive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .correspondences import (
    Correspondence,
    Motive,
    NotIdempotentError,
    compose,
    external_product,
    image_ranks,
    is_gal_invariant,
    middle_rank,
    product_of_cells,
    reduce,
)
from .exact_linalg import (
    ZZ,
    CoeffRing,
    Mat,
    lift_idempotent_newton,
    lift_sl,
    rank1_decomposition_to_sl2,
    unit_decompose,
)
from .rationality import RationalityContext, RationalityError
from .split_chow import SplitQuadric, chow_rank, h_power


class ContradictionError(RuntimeError):
    """An invariant idempotent with middle rank one on a quadric with nontrivial discriminant."""


class NotInvertibleError(ValueError):
    """The given morphism is not invertible between the two summands."""


@dataclass(frozen=True)
class IsoClass:
    """Tate twists of a motive, plus a marker for a non-split middle of rank two."""

    twists: tuple[int, ...]
    middle_marker: tuple[int, tuple[int, ...]] | None = None

    def to_json(self) -> dict:
        marker = None
        if self.middle_marker is not None:
            marker = {"dim": self.middle_marker[0], "disc": list(self.middle_marker[1])}
        return {"twists": list(self.twists), "middle_marker": marker}

    @classmethod
    def from_json(cls, data: Mapping) -> IsoClass:
        m = data.get("middle_marker")
        marker = None if m is None else (int(m["dim"]), tuple(int(b) for b in m["disc"]))
        return cls(tuple(int(t) for t in data["twists"]), marker)


# ---------------------------------------------------------------------------
# Projectors
# ---------------------------------------------------------------------------

def _require_projector(p: Correspondence) -> None:
    if p.source != p.target or not p.is_idempotent():
        raise NotIdempotentError("expected an idempotent endomorphism")
    if not is_gal_invariant(p):
        raise ValueError("projector is not Galois-invariant")


def lift_mod2_to_mod2n(pi: Correspondence, n: int, ctx: RationalityContext | None = None) -> Correspondence:
    """Newton-lift a mod-2 projector to an idempotent mod ``2^n``.

    With a context, the iteration starts from a rational preimage, so the
    result stays rational; without one it starts from the 0/1 preimage.
    """
    if pi.ring != CoeffRing(2):
        raise ValueError("expected a correspondence mod 2")
    _require_projector(pi)
    ring = CoeffRing.pow2(n)
    if ctx is not None:
        if ctx.n != n:
            raise RationalityError(f"context works mod 2^{ctx.n}, not 2^{n}")
        if not ctx.is_rational_mod(pi):
            raise RationalityError("projector is not rational mod 2")
        start = ctx.rational_preimage(pi)
    else:
        start = Correspondence.from_vector(pi.source, pi.target, ring, pi.to_vector())
    blocks = tuple(lift_idempotent_newton(b) for b in start.blocks)
    tau = Correspondence(pi.source, pi.target, ring, blocks)
    assert is_gal_invariant(tau) and reduce(tau, pi.ring) == pi
    return tau


E11 = ((1, 0), (0, 0))


def lift_projector(tau: Correspondence, ctx: RationalityContext) -> Correspondence:
    """Integral Galois-invariant projector reducing to ``tau`` mod ``2^n``.

    Blocks of rank 0 or full rank are 0/identity and lift verbatim. A rank-one
    middle block (possible only for trivial discriminant) is written as
    ``g E11 g^-1`` with ``g`` in ``SL_2(Z/2^n)``; ``g`` is lifted to ``SL_2(Z)``.
    """
    _require_projector(tau)
    if tau.ring.two_exponent is None:
        raise ValueError("expected a projector mod 2^n")
    if not ctx.is_rational_mod(tau):
        raise RationalityError("projector is not rational in the context")
    X = tau.source
    blocks = []
    for i, B in enumerate(tau.blocks):
        one = Mat.identity(tau.ring, B.rows)
        if B.is_zero() or B == one:
            blocks.append(B.lift())
            continue
        if B.shape != (2, 2):
            raise AssertionError("1x1 idempotent over a local ring is 0 or 1")
        if X.has_nontrivial_disc:
            raise ContradictionError(
                f"invariant idempotent of middle rank 1 on a quadric with discriminant {X.disc}")
        g = lift_sl(rank1_decomposition_to_sl2(B))
        blocks.append(g @ Mat.from_rows(ZZ, E11) @ g.inverse())
    rho = Correspondence(X, X, ZZ, tuple(blocks))
    assert rho.is_idempotent()
    assert is_gal_invariant(rho)
    assert reduce(rho, tau.ring) == tau
    assert ctx.add_generators([tau]).is_rational_integral(rho)
    return rho


# ---------------------------------------------------------------------------
# Bases of summands
# ---------------------------------------------------------------------------

def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    v = [x // g for x in v]
    lead = next(x for x in v if x)
    return tuple(-x for x in v) if lead < 0 else tuple(v)


@dataclass(frozen=True)
class SummandBasis:
    """Integral basis of ``im(rho)`` in one dimension, with dual functionals.

    ``vectors`` is a ``k x r`` matrix whose columns span the image and
    ``functionals`` an ``r x k`` matrix with ``vectors @ functionals == rho_i``.
    """

    vectors: Mat
    functionals: Mat

    @property
    def rank(self) -> int:
        return self.vectors.cols


def summand_bases(rho: Correspondence) -> list[SummandBasis]:
    """Per-dimension bases of the image of an integral projector.

    Rank-one pieces of a rank-two block use the primitive image vector whose
    first nonzero coordinate is positive.
    """
    if not rho.ring.is_integers:
        raise ValueError("summand bases are computed for integral projectors")
    out = []
    for B in rho.blocks:
        k = B.rows
        if B.is_zero():
            out.append(SummandBasis(Mat.zeros(ZZ, k, 0), Mat.zeros(ZZ, 0, k)))
        elif B == Mat.identity(ZZ, k):
            out.append(SummandBasis(B, B))
        else:
            col = next(B.col(j) for j in range(k) if any(B.col(j)))
            e = _primitive(col)
            j = next(t for t, x in enumerate(e) if x)
            phi = [x // e[j] for x in B.row(j)]
            V = Mat.from_rows(ZZ, [[x] for x in e])
            F = Mat.from_rows(ZZ, [phi])
            assert V @ F == B
            out.append(SummandBasis(V, F))
    return out


def _padded_ranks(rho: Correspondence, top: int) -> list[int]:
    ranks = [r for _, r in image_ranks(rho)]
    return ranks + [0] * (top + 1 - len(ranks))


def _matrix_in_bases(alpha: Correspondence, bx: list[SummandBasis], by: list[SummandBasis]) -> list[Mat]:
    ring = alpha.ring
    out = []
    for i, A in enumerate(alpha.blocks):
        E = bx[i].vectors.reduce(ring)
        Psi = by[i].functionals.reduce(ring)
        out.append(Psi @ A @ E)
    return out


def _identity_on_summands(X: SplitQuadric, Y: SplitQuadric, bx: list[SummandBasis],
                          by: list[SummandBasis], middle: Mat | None = None,
                          middle_dim: int | None = None) -> Correspondence:
    """Integral ``c = sigma c rho`` sending the X-basis to the Y-basis in each dimension."""
    blocks = []
    for i in range(min(X.dim, Y.dim) + 1):
        if i == middle_dim and middle is not None:
            blocks.append(middle)
        else:
            blocks.append(by[i].vectors @ bx[i].functionals)
    return Correspondence(X, Y, ZZ, tuple(blocks))


def summand_inverse(c: Correspondence, rho: Correspondence, sigma: Correspondence) -> Correspondence:
    """Integral ``c'`` with ``c' c = rho`` and ``c c' = sigma``.

    Raises :class:`NotInvertibleError` when some dimension's matrix of ``c``
    in the summand bases is not invertible over ``Z``.
    """
    bx, by = summand_bases(rho), summand_bases(sigma)
    X, Y = rho.source, sigma.source
    blocks = []
    for i, M in enumerate(_matrix_in_bases(c, bx, by)):
        if M.rows != M.cols:
            raise NotInvertibleError(f"ranks differ in dimension {i}")
        if M.rows == 0:
            blocks.append(Mat.zeros(ZZ, chow_rank(X, i), chow_rank(Y, i)))
            continue
        if M.det() not in (1, -1):
            raise NotInvertibleError(f"determinant {M.det()} in dimension {i}")
        blocks.append(bx[i].vectors @ M.inverse() @ by[i].functionals)
    return Correspondence(Y, X, ZZ, tuple(blocks))


# ---------------------------------------------------------------------------
# Isomorphisms
# ---------------------------------------------------------------------------

def _normalizer(ctx: RationalityContext, rho_n: Correspondence, lambdas: Mapping[int, int]) -> Correspondence:
    """``rho + 2 sum k_i (e_{D-i} x e_i)`` with ``lambda_i^-1 = 2 k_i + 1``.

    The product ``e_{D-i} x e_i`` of non-middle cells acts on dimension ``i``
    as the identity of ``CH_i`` and kills everything else.
    """
    X, ring = rho_n.source, rho_n.ring
    gamma = rho_n
    for i, lam in sorted(lambdas.items()):
        k, _ = unit_decompose(lam, ring)
        (e,) = X.cells_in_dim(X.dim - i)
        (f,) = X.cells_in_dim(i)
        term = product_of_cells(X, X, e, f, ring).scale(2)
        if not ctx.is_rational_mod(term):
            raise RationalityError(f"2 ({e} x {f}) is not in the rational span")
        gamma = gamma + term.scale(k)
    return gamma


def lift_isomorphism(rho: Correspondence, sigma: Correspondence, alpha: Correspondence,
                     ctx: RationalityContext) -> Correspondence | None:
    """Integral rational isomorphism ``(X, rho) -> (Y, sigma)``, or ``None`` when none exists.

    ``alpha`` is an isomorphism mod ``2^n`` with ``alpha = sigma~ alpha rho~``,
    rational in ``ctx``. The result is generally not a lift of ``alpha``. The
    answer is ``None`` when the middle ranks or graded ranks rule out an
    isomorphism; a non-invertible ``alpha`` between compatible motives raises
    :class:`NotInvertibleError`.
    """
    X, Y = rho.source, sigma.source
    for p in (rho, sigma):
        if not p.ring.is_integers:
            raise ValueError("rho and sigma must be integral")
        _require_projector(p)
    if (alpha.source, alpha.target) != (X, Y):
        raise ValueError("alpha does not go from X to Y")
    ring = alpha.ring
    if ring != ctx.ring:
        raise ValueError(f"alpha is over {ring}, the context works over {ctx.ring}")

    r_x, r_y = middle_rank(rho), middle_rank(sigma)
    if (r_x == 2) != (r_y == 2):
        return None
    if r_x == 2 and (X.dim != Y.dim or X.disc != Y.disc):
        return None
    top = max(X.dim, Y.dim)
    if _padded_ranks(rho, top) != _padded_ranks(sigma, top):
        return None

    rho_n, sigma_n = reduce(rho, ring), reduce(sigma, ring)
    for p in (rho_n, sigma_n, alpha):
        if not ctx.is_rational_mod(p):
            raise RationalityError("inputs must be rational in the context")
    if compose(sigma_n, compose(alpha, rho_n)) != alpha:
        raise ValueError("alpha is not a morphism between the two summands")

    bx, by = summand_bases(rho), summand_bases(sigma)
    mats = _matrix_in_bases(alpha, bx, by)
    for i, M in enumerate(mats):
        if M.rows and not ring.is_unit(M.det()):
            raise NotInvertibleError(f"alpha is not invertible in dimension {i}")

    if r_x != 2:
        c_mod, c = _lift_iso_split(X, Y, rho_n, alpha, mats, bx, by, r_x, ctx)
    elif X.has_nontrivial_disc:
        c_mod, c = _lift_iso_nonsplit_middle(X, Y, rho_n, alpha, mats, bx, by, ctx)
    else:
        c_mod, c = _lift_iso_split_middle(X, Y, rho_n, alpha, mats, bx, by, ctx)

    if not ctx.is_rational_mod(c_mod):
        raise RationalityError("normalized isomorphism left the rational span")
    assert reduce(c, ring) == c_mod
    assert compose(sigma, compose(c, rho)) == c
    assert is_gal_invariant(c)
    assert ctx.is_rational_integral(c)
    return c


def _lift_iso_split(X, Y, rho_n, alpha, mats, bx, by, r_x, ctx):
    ring = alpha.ring
    d = X.half
    lam = {i: M[0, 0] for i, M in enumerate(mats) if M.rows == 1}
    beta = alpha
    if r_x == 1:
        scale = ring.inv(lam[d])
        beta = alpha.scale(scale)
        lam = {i: ring.reduce(v * scale) for i, v in lam.items()}
    full = {i: v for i, v in lam.items() if rho_n.blocks[i].rows == 1}
    if r_x == 1:
        full.pop(d, None)
    gamma = _normalizer(ctx, rho_n, full)
    c_mod = compose(beta, gamma)
    for i, M in enumerate(_matrix_in_bases(c_mod, bx, by)):
        assert M == Mat.identity(ring, M.rows), (i, M)
    return c_mod, _identity_on_summands(X, Y, bx, by)


def _outer_units(mats: list[Mat], d: int) -> dict[int, int]:
    return {i: M[0, 0] for i, M in enumerate(mats) if M.rows == 1 and i != d}


def _lift_iso_nonsplit_middle(X, Y, rho_n, alpha, mats, bx, by, ctx):
    ring = alpha.ring
    d = X.half
    B = mats[d]
    a, b = B[0, 0], B[0, 1]
    if B != Mat.from_rows(ring, [[a, b], [b, a]]):
        raise ValueError("middle block is not Galois-equivariant")
    beta = alpha.scale(ring.inv(a - b))
    mats = _matrix_in_bases(beta, bx, by)
    gamma = _normalizer(ctx, rho_n, _outer_units(mats, d))
    beta = compose(beta, gamma)
    off = beta.blocks[d][0, 1]
    hh = external_product(h_power(X, d, ring), h_power(Y, d, ring))
    if not ctx.is_rational_mod(hh):
        raise RationalityError("h^d x h^d is not in the rational span")
    c_mod = beta - hh.scale(off)
    for M in _matrix_in_bases(c_mod, bx, by):
        assert M == Mat.identity(ring, M.rows)
    return c_mod, _identity_on_summands(X, Y, bx, by)


def _lift_iso_split_middle(X, Y, rho_n, alpha, mats, bx, by, ctx):
    ring = alpha.ring
    d = X.half
    gamma = _normalizer(ctx, rho_n, _outer_units(mats, d))
    beta = compose(alpha, gamma)
    B = beta.blocks[d]
    k, _ = unit_decompose(B.det(), ring)
    hh = external_product(h_power(X, d, ring), h_power(X, d, ring))
    if not ctx.is_rational_mod(hh):
        raise RationalityError("h^d x h^d is not in the rational span")
    delta = rho_n + hh.scale(k)
    c_mod = compose(beta, delta)
    middle = c_mod.blocks[d]
    assert middle.det() == 1, "determinant bookkeeping failed"
    for i, M in enumerate(_matrix_in_bases(c_mod, bx, by)):
        if i != d:
            assert M == Mat.identity(ring, M.rows)
    G = lift_sl(middle)
    return c_mod, _identity_on_summands(X, Y, bx, by, middle=G, middle_dim=d)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def classify(motive: Motive | Correspondence) -> IsoClass:
    """Twist multiset from the image ranks, with a marker for a non-split rank-two middle."""
    p = motive.projector if isinstance(motive, Motive) else motive
    _require_projector(p)
    X = p.source
    twists: list[int] = []
    marker = None
    for i, r in image_ranks(p):
        if X.is_even and i == X.half and r == 2 and X.has_nontrivial_disc:
            marker = (i, X.disc)
            continue
        twists.extend([i] * r)
    return IsoClass(tuple(sorted(twists)), marker)
