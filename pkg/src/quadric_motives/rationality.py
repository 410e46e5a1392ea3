"""Which correspondences are defined over the base field.

Rationality is modelled by a generated span. A context covers the quadrics
``X`` and ``Y`` (one object when they coincide) and keeps, for each hom group
among them, the Howell form of the rational subgroup mod ``2^n``. The span is
closed under composition and transposition, so it is the mod-``2^n`` image of
a rational subring.

An integral correspondence is rational when it is Galois-invariant and its
reduction mod ``2^n`` lies in the span.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Sequence

from .correspondences import (
    Correspondence,
    compose,
    diagonal,
    external_product,
    from_cycle,
    is_gal_invariant,
    product_of_cells,
    reduce,
    transpose,
)
from .exact_linalg import CoeffRing, Mat, howell, membership
from .split_chow import Cell, GaloisContext, SplitQuadric, chow_rank, h_power, swap_cell

CONTEXT_KINDS = ("default", "invariant")


class RationalityError(ValueError):
    """A generator or query violates the context's contract."""


class ResourceError(RuntimeError):
    """A span is too large to enumerate at desk scale."""


def _objects(X: SplitQuadric, Y: SplitQuadric) -> tuple[SplitQuadric, ...]:
    return (X,) if X == Y else (X, Y)


def _hom_pairs(objects: Sequence[SplitQuadric]) -> list[tuple[SplitQuadric, SplitQuadric]]:
    return [(a, b) for a in objects for b in objects]


def _is_middle(Q: SplitQuadric, cell: Cell) -> bool:
    return cell.kind != "H" and Q.middle == cell.index


def _degree0_cell_products(A: SplitQuadric, B: SplitQuadric) -> Iterator[tuple[Cell, Cell]]:
    for e in A.basis():
        for f in B.basis():
            if A.cell_dim(e) + B.cell_dim(f) == A.dim:
                yield e, f


def standard_generators(X: SplitQuadric, Y: SplitQuadric, galois: GaloisContext) -> list[Correspondence]:
    """Default rational correspondences mod ``2^n`` on every hom group among ``X`` and ``Y``.

    * every degree-0 product ``h^a x h^b``;
    * ``2 (e x f)`` for cells ``e``, ``f`` that are both outside the middle;
    * ``2^n x`` for every Galois-invariant orbit sum of cell products;
    * the diagonal of each quadric.
    """
    ring = galois.ring
    gens: list[Correspondence] = []
    for A, B in _hom_pairs(_objects(X, Y)):
        for a in range(A.dim + 1):
            b = B.dim - a
            if 0 <= b <= B.dim:
                gens.append(external_product(h_power(A, a, ring), h_power(B, b, ring)))
        for e, f in _degree0_cell_products(A, B):
            if not _is_middle(A, e) and not _is_middle(B, f):
                gens.append(product_of_cells(A, B, e, f, ring).scale(2))
        for orbit in _invariant_cell_orbits(A, B, galois):
            gens.append(from_cycle(A, B, ring, {ef: 1 for ef in orbit}).scale(2 ** galois.n))
        if A == B:
            gens.append(diagonal(A, ring))
    return gens


def _invariant_cell_orbits(A: SplitQuadric, B: SplitQuadric, galois: GaloisContext) -> list[tuple[tuple[Cell, Cell], ...]]:
    seen: set[tuple[Cell, Cell]] = set()
    orbits = []
    for ef in _degree0_cell_products(A, B):
        if ef in seen:
            continue
        orbit = sorted({(swap_cell(A, ef[0], g), swap_cell(B, ef[1], g)) for g in galois.elements()})
        seen.update(orbit)
        orbits.append(tuple(orbit))
    return orbits


def invariant_generators(X: SplitQuadric, Y: SplitQuadric, galois: GaloisContext) -> list[Correspondence]:
    """All Galois-invariant correspondences: orbit sums of block matrix units."""
    ring = galois.ring
    gens: list[Correspondence] = []
    for A, B in _hom_pairs(_objects(X, Y)):
        zero = Correspondence.zero(A, B, ring)
        seen: set[tuple[int, int, int]] = set()
        for i, blk in enumerate(zero.blocks):
            for p in range(blk.rows):
                for q in range(blk.cols):
                    if (i, p, q) in seen:
                        continue
                    orbit = set()
                    for g in galois.elements():
                        pp = 1 - p if blk.rows == 2 and B.swaps(g) else p
                        qq = 1 - q if blk.cols == 2 and A.swaps(g) else q
                        orbit.add((i, pp, qq))
                    seen |= orbit
                    rows = [[int((i, a, b) in orbit) for b in range(blk.cols)] for a in range(blk.rows)]
                    gens.append(Correspondence.from_blocks(A, B, ring, {i: rows}))
    return gens


def _key(alpha: Correspondence) -> tuple[SplitQuadric, SplitQuadric]:
    return (alpha.source, alpha.target)


def close(spans: Mapping[tuple[SplitQuadric, SplitQuadric], Mat]) -> dict[tuple[SplitQuadric, SplitQuadric], Mat]:
    """Saturate spans under composition and transpose until nothing changes.

    ``spans`` maps ``(source, target)`` to a Howell basis of flattened
    correspondences. The ambient groups are finite, so this terminates.
    """
    spans = dict(spans)
    while True:
        extra: dict[tuple[SplitQuadric, SplitQuadric], list[tuple[int, ...]]] = {k: [] for k in spans}
        members = {k: _rows_as_corrs(k, H) for k, H in spans.items()}
        for (A, B), left in members.items():
            for (B2, C), right in members.items():
                if B2 != B or (A, C) not in spans:
                    continue
                for v in left:
                    for u in right:
                        extra[(A, C)].append(compose(u, v).to_vector())
            if A.dim == B.dim and (B, A) in spans:
                for v in left:
                    extra[(B, A)].append(transpose(v).to_vector())
        new = {}
        for k, H in spans.items():
            rows = H.to_rows() + [list(v) for v in extra[k]]
            new[k] = howell(Mat.from_rows(H.ring, rows, H.cols))
        if new == spans:
            return new
        spans = new


def _rows_as_corrs(key: tuple[SplitQuadric, SplitQuadric], H: Mat) -> list[Correspondence]:
    A, B = key
    return [Correspondence.from_vector(A, B, H.ring, H.row(i)) for i in range(H.rows)]


class RationalityContext:
    """Closed span of rational correspondences mod ``2^n`` for a pair of quadrics.

    Args:
        X, Y: the pair of quadrics (equal quadrics are treated as one object).
        galois: group and extension degree ``2^n``.
        extra_generators: additional Galois-invariant correspondences declared
            rational; they are reduced mod ``2^n``.
        kind: ``"default"`` starts from :func:`standard_generators`,
            ``"invariant"`` declares every Galois-invariant correspondence rational.
    """

    def __init__(self, X: SplitQuadric, Y: SplitQuadric, galois: GaloisContext,
                 extra_generators: Iterable[Correspondence] = (), kind: str = "default"):
        if kind not in CONTEXT_KINDS:
            raise ValueError(f"unknown context kind {kind!r}")
        for Q in (X, Y):
            if Q.r != galois.r:
                raise RationalityError(f"quadric character length {Q.r} != r = {galois.r}")
        self.pair = (X, Y)
        self.galois = galois
        self.kind = kind
        self.ring: CoeffRing = galois.ring
        self.objects = _objects(X, Y)
        extra = tuple(extra_generators)
        for g in extra:
            self._check_generator(g)
        self.extra_generators = extra
        base = standard_generators(X, Y, galois)
        if kind == "invariant":
            base += invariant_generators(X, Y, galois)
        spans = {}
        for A, B in _hom_pairs(self.objects):
            rows = [g.to_vector() for g in base if _key(g) == (A, B)]
            rows += [self._as_ring(g).to_vector() for g in extra if _key(g) == (A, B)]
            zero = Correspondence.zero(A, B, self.ring)
            spans[(A, B)] = howell(Mat.from_rows(self.ring, rows, len(zero.to_vector())))
        self.spans = close(spans)
        self._reduced: dict[tuple, Mat] = {}

    def _check_generator(self, g: Correspondence) -> None:
        if _key(g) not in _hom_pairs(self.objects):
            raise RationalityError("generator is not a correspondence between the context's quadrics")
        if not g.ring.divides(self.ring):
            raise RationalityError(f"generator over {g.ring} cannot be reduced to {self.ring}")
        if not is_gal_invariant(g):
            raise RationalityError("rational generators must be Galois-invariant")

    def _as_ring(self, g: Correspondence) -> Correspondence:
        return g if g.ring == self.ring else reduce(g, self.ring)

    @property
    def n(self) -> int:
        return self.galois.n

    def add_generators(self, extra: Iterable[Correspondence]) -> RationalityContext:
        return RationalityContext(*self.pair, self.galois, self.extra_generators + tuple(extra), self.kind)

    def close(self) -> RationalityContext:
        """Spans are closed at construction; this returns an equivalent context."""
        return self.add_generators(())

    def span(self, source: SplitQuadric, target: SplitQuadric, ring: CoeffRing | None = None) -> Mat:
        """Howell basis of the rational part of ``Hom(source, target)`` over ``ring``."""
        H = self.spans[(source, target)]
        if ring is None or ring == self.ring:
            return H
        key = (source, target, ring)
        if key not in self._reduced:
            if not self.ring.divides(ring) or ring.is_integers:
                raise RationalityError(f"modulus {ring} exceeds the context modulus {self.ring}")
            self._reduced[key] = howell(H.reduce(ring))
        return self._reduced[key]

    def members(self, source: SplitQuadric, target: SplitQuadric, ring: CoeffRing,
                limit: int = 1 << 20) -> Iterator[Correspondence]:
        """Enumerate every element of the rational span over ``ring``."""
        H = self.span(source, target, ring)
        m = ring.modulus
        ranges = []
        for i in range(H.rows):
            r = H.row(i)
            p = next(x for x in r if x)
            ranges.append(range(m // p))
        size = 1
        for rg in ranges:
            size *= len(rg)
        if size > limit:
            raise ResourceError(f"span has {size} elements (limit {limit})")
        for coeffs in itertools.product(*ranges):
            vec = [0] * H.cols
            for c, i in zip(coeffs, range(H.rows)):
                if c:
                    row = H.row(i)
                    vec = [a + c * b for a, b in zip(vec, row)]
            yield Correspondence.from_vector(source, target, ring, vec)

    def span_size(self, source: SplitQuadric, target: SplitQuadric, ring: CoeffRing) -> int:
        H = self.span(source, target, ring)
        size = 1
        for i in range(H.rows):
            p = next(x for x in H.row(i) if x)
            size *= ring.modulus // p
        return size

    def coordinates(self, alpha: Correspondence) -> tuple[int, ...] | None:
        return membership(alpha.to_vector(), self.span(alpha.source, alpha.target, alpha.ring))

    def is_rational_mod(self, alpha: Correspondence) -> bool:
        """Membership of a mod-``2^k`` correspondence (``k <= n``) in the reduced span."""
        if alpha.ring.is_integers:
            raise RationalityError("use is_rational_integral for integral correspondences")
        if _key(alpha) not in self.spans:
            raise RationalityError("correspondence is not between the context's quadrics")
        return self.coordinates(alpha) is not None

    def is_rational_integral(self, alpha: Correspondence) -> bool:
        """Galois-invariant and rational mod ``2^n``."""
        if not alpha.ring.is_integers:
            raise RationalityError("expected an integral correspondence")
        return is_gal_invariant(alpha) and self.is_rational_mod(reduce(alpha, self.ring))

    def rational_preimage(self, alpha: Correspondence) -> Correspondence:
        """A rational correspondence mod ``2^n`` reducing to the rational ``alpha``."""
        if alpha.ring == self.ring:
            return alpha
        H = self.spans[_key(alpha)]
        low = Mat.from_rows(alpha.ring, H.to_rows(), H.cols)
        coords = membership(alpha.to_vector(), low)
        if coords is None:
            raise RationalityError("correspondence is not rational")
        vec = H.vecmul(coords)
        return Correspondence.from_vector(alpha.source, alpha.target, self.ring, vec)

    def to_json(self) -> dict:
        return {
            "pair": [self.pair[0].to_json(), self.pair[1].to_json()],
            "galois": self.galois.to_json(),
            "kind": self.kind,
            "extra_generators": [g.to_json() for g in self.extra_generators],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> RationalityContext:
        X, Y = (SplitQuadric.from_json(q) for q in data["pair"])
        galois = GaloisContext.from_json(data["galois"])
        extra = [Correspondence.from_json(g) for g in data.get("extra_generators", [])]
        return cls(X, Y, galois, extra, data.get("kind", "default"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalityContext):
            return NotImplemented
        return (self.pair, self.galois, self.kind, self.spans) == (other.pair, other.galois, other.kind, other.spans)

    def __repr__(self) -> str:
        sizes = {f"{a.dim}->{b.dim}": H.rows for (a, b), H in self.spans.items()}
        return f"RationalityContext({self.kind}, n={self.n}, span rows={sizes})"


def is_rational_mod(ctx: RationalityContext, alpha: Correspondence) -> bool:
    return ctx.is_rational_mod(alpha)


def is_rational_integral(ctx: RationalityContext, alpha: Correspondence) -> bool:
    return ctx.is_rational_integral(alpha)


def add_generators(ctx: RationalityContext, extra: Iterable[Correspondence]) -> RationalityContext:
    return ctx.add_generators(extra)
