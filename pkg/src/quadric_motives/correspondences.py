"""Degree-0 correspondences between split quadrics.

A correspondence ``X -> Y`` of degree 0 preserves dimension, so it is stored
as one block per dimension ``i`` in ``0..min(dim X, dim Y)``: a matrix of
shape ``chow_rank(Y, i) x chow_rank(X, i)`` acting on column vectors of cell
coordinates. Composition is blockwise matrix product.

The cycle form ``sum c * (e x f)`` is available for named cycles and JSON
display. ``e x f`` acts by ``x -> <x, e> f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .exact_linalg import ZZ, CoeffRing, Mat, RingMismatchError, ShapeError, free_rank
from .split_chow import (
    Cell,
    Cycle,
    GroupElement,
    SplitQuadric,
    chow_rank,
    middle_permutation,
    pairing,
    pairing_matrix,
)


class NotIdempotentError(ValueError):
    """Raised when an operation requires a projector and gets something else."""


@dataclass(frozen=True)
class Correspondence:
    source: SplitQuadric
    target: SplitQuadric
    ring: CoeffRing
    blocks: tuple[Mat, ...]

    def __post_init__(self) -> None:
        X, Y = self.source, self.target
        if X.r != Y.r:
            raise ValueError("source and target carry characters of different groups")
        top = min(X.dim, Y.dim)
        if len(self.blocks) != top + 1:
            raise ShapeError(f"expected {top + 1} blocks, got {len(self.blocks)}")
        for i, B in enumerate(self.blocks):
            if B.ring != self.ring:
                raise RingMismatchError(f"block {i} is over {B.ring}, not {self.ring}")
            if B.shape != (chow_rank(Y, i), chow_rank(X, i)):
                raise ShapeError(f"block {i} has shape {B.shape}")

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, X: SplitQuadric, Y: SplitQuadric, ring: CoeffRing = ZZ) -> Correspondence:
        return cls(X, Y, ring, tuple(Mat.zeros(ring, chow_rank(Y, i), chow_rank(X, i))
                                     for i in range(min(X.dim, Y.dim) + 1)))

    @classmethod
    def from_blocks(cls, X: SplitQuadric, Y: SplitQuadric, ring: CoeffRing,
                    blocks: Mapping[int, Iterable[Iterable[int]] | Mat]) -> Correspondence:
        """Build from a sparse ``{dimension: rows}`` mapping; absent blocks are zero."""
        base = cls.zero(X, Y, ring)
        out = list(base.blocks)
        for i, B in blocks.items():
            i = int(i)
            if not 0 <= i < len(out):
                raise ShapeError(f"no block in dimension {i}")
            out[i] = B.reduce(ring) if isinstance(B, Mat) else Mat.from_rows(ring, B, out[i].cols)
        return cls(X, Y, ring, tuple(out))

    @property
    def dims(self) -> range:
        return range(len(self.blocks))

    # -- algebra ---------------------------------------------------------
    def _check_parallel(self, other: Correspondence) -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("correspondences have different source/target")
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other: Correspondence) -> Correspondence:
        self._check_parallel(other)
        return Correspondence(self.source, self.target, self.ring,
                              tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: Correspondence) -> Correspondence:
        self._check_parallel(other)
        return Correspondence(self.source, self.target, self.ring,
                              tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> Correspondence:
        return Correspondence(self.source, self.target, self.ring, tuple(-b for b in self.blocks))

    def scale(self, c: int) -> Correspondence:
        return Correspondence(self.source, self.target, self.ring, tuple(b.scale(c) for b in self.blocks))

    def __rmul__(self, c: int) -> Correspondence:
        return self.scale(c)

    def __matmul__(self, other: Correspondence) -> Correspondence:
        return compose(self, other)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks)

    def is_idempotent(self) -> bool:
        return self.source == self.target and compose(self, self) == self

    def reduce(self, ring: CoeffRing) -> Correspondence:
        return reduce(self, ring)

    # -- flattening for span computations --------------------------------
    def to_vector(self) -> tuple[int, ...]:
        return tuple(e for b in self.blocks for e in b.entries)

    @classmethod
    def from_vector(cls, X: SplitQuadric, Y: SplitQuadric, ring: CoeffRing, vec: Iterable[int]) -> Correspondence:
        vec = list(vec)
        blocks, pos = [], 0
        for i in range(min(X.dim, Y.dim) + 1):
            r, c = chow_rank(Y, i), chow_rank(X, i)
            blocks.append(Mat(ring, r, c, tuple(vec[pos:pos + r * c])))
            pos += r * c
        if pos != len(vec):
            raise ShapeError("vector length does not match the hom group")
        return cls(X, Y, ring, tuple(blocks))

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "ring": self.ring.to_json(),
            "blocks": {str(i): b.to_rows() for i, b in enumerate(self.blocks)},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Correspondence:
        X = SplitQuadric.from_json(data["source"])
        Y = SplitQuadric.from_json(data["target"])
        ring = CoeffRing.from_json(data["ring"])
        return cls.from_blocks(X, Y, ring, {int(k): v for k, v in data.get("blocks", {}).items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {b.to_rows()}" for i, b in enumerate(self.blocks))
        return f"Correspondence(D{self.source.dim}->{self.target.dim}, {self.ring}, {{{body}}})"


def hom_dimension(X: SplitQuadric, Y: SplitQuadric) -> int:
    """Number of entries in the block form of ``Hom(X, Y)``."""
    return sum(chow_rank(X, i) * chow_rank(Y, i) for i in range(min(X.dim, Y.dim) + 1))


def diagonal(X: SplitQuadric, ring: CoeffRing = ZZ) -> Correspondence:
    """The identity correspondence."""
    return Correspondence(X, X, ring, tuple(Mat.identity(ring, chow_rank(X, i)) for i in range(X.dim + 1)))


def compose(beta: Correspondence, alpha: Correspondence) -> Correspondence:
    """``beta o alpha`` for ``alpha: X -> Y`` and ``beta: Y -> Z``."""
    if alpha.target != beta.source:
        raise ValueError("middle quadrics do not match")
    if alpha.ring != beta.ring:
        raise RingMismatchError(f"{beta.ring} vs {alpha.ring}")
    X, Z = alpha.source, beta.target
    top = min(X.dim, Z.dim)
    blocks = []
    for i in range(top + 1):
        if i < len(alpha.blocks) and i < len(beta.blocks):
            blocks.append(beta.blocks[i] @ alpha.blocks[i])
        else:
            # CH_i of the middle quadric vanishes
            blocks.append(Mat.zeros(alpha.ring, chow_rank(Z, i), chow_rank(X, i)))
    return Correspondence(X, Z, alpha.ring, tuple(blocks))


def external_product(u: Cycle, v: Cycle) -> Correspondence:
    """``u x v`` as the correspondence ``x -> <x, u> v``."""
    if u.ring != v.ring:
        raise RingMismatchError(f"{u.ring} vs {v.ring}")
    X, Y, ring = u.quadric, v.quadric, u.ring
    p, q = u.homogeneous_dim(), v.homogeneous_dim()
    if u.is_zero() or v.is_zero():
        return Correspondence.zero(X, Y, ring)
    if p is None or q is None:
        raise ValueError("external product of non-homogeneous cycles")
    if p + q != X.dim:
        raise ValueError(f"dim u + dim v = {p + q} differs from dim X = {X.dim}")
    src_cells = X.cells_in_dim(q)
    w = [pairing(Cycle.cell(X, c, ring), u) for c in src_cells]
    col = v.component(q)
    block = Mat.from_rows(ring, [[a * b for b in w] for a in col], len(w))
    return Correspondence.from_blocks(X, Y, ring, {q: block})


def product_of_cells(X: SplitQuadric, Y: SplitQuadric, e: Cell, f: Cell, ring: CoeffRing = ZZ) -> Correspondence:
    return external_product(Cycle.cell(X, e, ring), Cycle.cell(Y, f, ring))


def from_cycle(X: SplitQuadric, Y: SplitQuadric, ring: CoeffRing,
               terms: Mapping[tuple[Cell | str, Cell | str], int]) -> Correspondence:
    """Correspondence from ``{(cell on X, cell on Y): coefficient}``."""
    out = Correspondence.zero(X, Y, ring)
    for (e, f), c in terms.items():
        e = Cell.parse(e) if isinstance(e, str) else e
        f = Cell.parse(f) if isinstance(f, str) else f
        out = out + product_of_cells(X, Y, e, f, ring).scale(c)
    return out


def to_cycle(alpha: Correspondence) -> dict[tuple[Cell, Cell], int]:
    """Cycle form, inverting the (unimodular) pairing in each dimension."""
    X, Y = alpha.source, alpha.target
    terms: dict[tuple[Cell, Cell], int] = {}
    for i, M in enumerate(alpha.blocks):
        # block = C @ G with G[e][j] = <e, b_j>, e in CH_{D-i}(X), b_j in CH_i(X)
        G = pairing_matrix(X, X.dim - i).reduce(alpha.ring)
        C = M @ G.inverse()
        e_cells = X.cells_in_dim(X.dim - i)
        f_cells = Y.cells_in_dim(i)
        for a, f in enumerate(f_cells):
            for b, e in enumerate(e_cells):
                if C[a, b]:
                    terms[(e, f)] = C[a, b]
    return dict(sorted(terms.items()))


def transpose(alpha: Correspondence) -> Correspondence:
    """Swap the two factors: ``(e x f)^t = f x e``."""
    X, Y = alpha.source, alpha.target
    if X.dim != Y.dim:
        raise ValueError("transpose of a degree-0 correspondence needs dim X == dim Y")
    swapped = {(f, e): c for (e, f), c in to_cycle(alpha).items()}
    return from_cycle(Y, X, alpha.ring, swapped)


def gal_act(gamma: GroupElement, alpha: Correspondence) -> Correspondence:
    """Act on both factors: ``M_i -> P_Y M_i P_X^-1``."""
    X, Y, ring = alpha.source, alpha.target, alpha.ring
    blocks = []
    for i, M in enumerate(alpha.blocks):
        PY = middle_permutation(Y, i, gamma, ring)
        PX = middle_permutation(X, i, gamma, ring)
        blocks.append(PY @ M @ PX)  # PX is an involution
    return Correspondence(X, Y, ring, tuple(blocks))


def group_generators(alpha: Correspondence) -> list[GroupElement]:
    r = alpha.source.r
    return [tuple(int(i == k) for i in range(r)) for k in range(r)]


def is_gal_invariant(alpha: Correspondence) -> bool:
    return all(gal_act(g, alpha) == alpha for g in group_generators(alpha))


def reduce(alpha: Correspondence, ring: CoeffRing) -> Correspondence:
    """Entrywise coefficient reduction (the target modulus must divide the source's)."""
    if not alpha.ring.divides(ring):
        raise RingMismatchError(f"cannot reduce {alpha.ring} to {ring}")
    return Correspondence(alpha.source, alpha.target, ring, tuple(b.reduce(ring) for b in alpha.blocks))


def _require_idempotent(rho: Correspondence) -> None:
    if not rho.is_idempotent():
        raise NotIdempotentError("correspondence is not an idempotent endomorphism")


def image_ranks(rho: Correspondence) -> list[tuple[int, int]]:
    """Rank of the image of ``rho`` in each dimension (zero ranks included)."""
    _require_idempotent(rho)
    return [(i, free_rank(B.T)) for i, B in enumerate(rho.blocks)]


def middle_rank(rho: Correspondence) -> int:
    """Rank of the image in the middle dimension; 0 for odd-dimensional quadrics."""
    X = rho.source
    ranks = image_ranks(rho)
    if not X.is_even:
        return 0
    return ranks[X.half][1]


@dataclass(frozen=True)
class Motive:
    """A pair ``(X, projector)`` with an idempotent, Galois-invariant projector."""

    projector: Correspondence

    def __post_init__(self) -> None:
        p = self.projector
        if p.source != p.target:
            raise ValueError("a projector is an endomorphism")
        _require_idempotent(p)
        if not is_gal_invariant(p):
            raise ValueError("projector is not Galois-invariant")

    @property
    def quadric(self) -> SplitQuadric:
        return self.projector.source

    @property
    def ring(self) -> CoeffRing:
        return self.projector.ring

    def to_json(self) -> dict:
        return {"quadric": self.quadric.to_json(), "projector": self.projector.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> Motive:
        return cls(Correspondence.from_json(data["projector"]))
