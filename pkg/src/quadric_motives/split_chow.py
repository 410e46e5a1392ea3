"""Chow groups of split quadrics in the ``h^i`` / ``l_i`` basis.

A quadric of dimension ``D = 2d`` or ``2d + 1`` has one basis cell per
homological dimension ``i``, except in the middle dimension of an even
quadric where there are two:

* ``L(i)`` -- the class ``l_i`` for ``2i < D``;
* ``H(j)`` -- the class ``h^j`` (dimension ``D - j``) for ``2(D - j) > D``;
* ``L(d)``, ``L'(d)`` -- the two rulings of the middle when ``D = 2d``.

``h^d`` is not stored in the middle; it is the derived class
``L(d) + L'(d)``. Lower ``h``-powers are rewritten with ``h^(D-i) = 2 l_i``.

The Galois group is ``(Z/2)^r``; an element is a tuple of ``r`` bits and it
exchanges the two middle rulings exactly when its dot product with the
quadric's discriminant character is odd.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .exact_linalg import ZZ, CoeffRing, Mat, RingMismatchError

GroupElement = tuple[int, ...]


@dataclass(frozen=True)
class GaloisContext:
    """Elementary abelian group ``(Z/2)^r`` splitting everything, ``[L:F] = 2^n``."""

    r: int
    n: int

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n < self.r:
            raise ValueError(f"degree exponent n={self.n} is smaller than r={self.r}")

    @property
    def ring(self) -> CoeffRing:
        return CoeffRing.pow2(self.n)

    def elements(self) -> list[GroupElement]:
        return [tuple(bits) for bits in itertools.product((0, 1), repeat=self.r)]

    def generators(self) -> list[GroupElement]:
        return [tuple(int(i == k) for i in range(self.r)) for k in range(self.r)]

    def disc_chars(self) -> list[tuple[int, ...]]:
        return self.elements()

    def to_json(self) -> dict:
        return {"r": self.r, "n": self.n}

    @classmethod
    def from_json(cls, data: Mapping) -> GaloisContext:
        return cls(int(data["r"]), int(data["n"]))


@dataclass(frozen=True, order=True)
class Cell:
    """A basis cell: ``kind`` is ``"L"``, ``"L'"`` or ``"H"``."""

    kind: str
    index: int

    def __str__(self) -> str:
        if self.kind == "L'":
            return f"L{self.index}'"
        return f"{self.kind}{self.index}"

    @classmethod
    def parse(cls, text: str) -> Cell:
        if text.startswith("L") and text.endswith("'"):
            return cls("L'", int(text[1:-1]))
        if text[:1] in ("L", "H"):
            return cls(text[0], int(text[1:]))
        raise ValueError(f"bad cell name {text!r}")


@dataclass(frozen=True)
class SplitQuadric:
    """Combinatorial model of a split quadric with its discriminant character."""

    dim: int
    disc: tuple[int, ...] = ()
    _basis: tuple[Cell, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("quadric dimension must be >= 1")
        disc = tuple(int(b) for b in self.disc)
        if any(b not in (0, 1) for b in disc):
            raise ValueError("discriminant character must be a bit vector")
        if self.dim % 2 and any(disc):
            raise ValueError("odd-dimensional quadrics have trivial discriminant character")
        object.__setattr__(self, "disc", disc)
        cells = []
        for i in range(self.dim + 1):
            cells.extend(self._cells(i))
        object.__setattr__(self, "_basis", tuple(cells))

    @property
    def half(self) -> int:
        return self.dim // 2

    @property
    def is_even(self) -> bool:
        return self.dim % 2 == 0

    @property
    def middle(self) -> int | None:
        return self.half if self.is_even else None

    @property
    def r(self) -> int:
        return len(self.disc)

    @property
    def has_nontrivial_disc(self) -> bool:
        return any(self.disc)

    def _cells(self, i: int) -> tuple[Cell, ...]:
        D = self.dim
        if 2 * i < D:
            return (Cell("L", i),)
        if 2 * i > D:
            return (Cell("H", D - i),)
        return (Cell("L", i), Cell("L'", i))

    def cells_in_dim(self, i: int) -> tuple[Cell, ...]:
        if not 0 <= i <= self.dim:
            raise ValueError(f"dimension {i} outside 0..{self.dim}")
        return self._cells(i)

    def basis(self) -> tuple[Cell, ...]:
        return self._basis

    def cell_dim(self, cell: Cell) -> int:
        if cell.kind == "H":
            return self.dim - cell.index
        return cell.index

    def index_of(self, cell: Cell) -> int:
        try:
            return self._basis.index(cell)
        except ValueError:
            raise ValueError(f"{cell} is not a basis cell of a {self.dim}-dimensional quadric") from None

    def swaps(self, gamma: GroupElement) -> bool:
        """Whether ``gamma`` exchanges the middle rulings."""
        if not self.is_even:
            return False
        if len(gamma) != len(self.disc):
            raise ValueError("group element and discriminant character differ in length")
        return sum(a * b for a, b in zip(gamma, self.disc)) % 2 == 1

    def to_json(self) -> dict:
        return {"dim": self.dim, "disc": list(self.disc)}

    @classmethod
    def from_json(cls, data: Mapping) -> SplitQuadric:
        return cls(int(data["dim"]), tuple(int(b) for b in data.get("disc", ())))


def chow_rank(X: SplitQuadric, i: int) -> int:
    """Rank of ``CH_i`` of the split quadric: 2 in the even middle, else 1."""
    return len(X.cells_in_dim(i))


class Cycle:
    """Element of ``CH(X)`` over a coefficient ring, in cell coordinates."""

    __slots__ = ("quadric", "ring", "coords")

    def __init__(self, quadric: SplitQuadric, ring: CoeffRing, coords: Mapping[Cell, int] | Sequence[int] | None = None):
        basis = quadric.basis()
        if coords is None:
            vec = [0] * len(basis)
        elif isinstance(coords, Mapping):
            vec = [0] * len(basis)
            for cell, c in coords.items():
                if isinstance(cell, str):
                    cell = Cell.parse(cell)
                vec[quadric.index_of(cell)] += c
        else:
            vec = list(coords)
            if len(vec) != len(basis):
                raise ValueError("coordinate vector has the wrong length")
        self.quadric = quadric
        self.ring = ring
        self.coords = tuple(ring.reduce(c) for c in vec)

    @classmethod
    def cell(cls, quadric: SplitQuadric, cell: Cell | str, ring: CoeffRing = ZZ, coeff: int = 1) -> Cycle:
        return cls(quadric, ring, {cell: coeff})

    def __getitem__(self, cell: Cell | str) -> int:
        if isinstance(cell, str):
            cell = Cell.parse(cell)
        return self.coords[self.quadric.index_of(cell)]

    def _check(self, other: Cycle) -> None:
        if self.quadric != other.quadric:
            raise ValueError("cycles live on different quadrics")
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other: Cycle) -> Cycle:
        self._check(other)
        return Cycle(self.quadric, self.ring, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: Cycle) -> Cycle:
        self._check(other)
        return Cycle(self.quadric, self.ring, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> Cycle:
        return Cycle(self.quadric, self.ring, [-a for a in self.coords])

    def __rmul__(self, c: int) -> Cycle:
        return Cycle(self.quadric, self.ring, [c * a for a in self.coords])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cycle):
            return NotImplemented
        return (self.quadric, self.ring, self.coords) == (other.quadric, other.ring, other.coords)

    def __hash__(self) -> int:
        return hash((self.quadric, self.ring, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def items(self) -> Iterator[tuple[Cell, int]]:
        for cell, c in zip(self.quadric.basis(), self.coords):
            if c:
                yield cell, c

    def dims(self) -> set[int]:
        return {self.quadric.cell_dim(cell) for cell, _ in self.items()}

    def homogeneous_dim(self) -> int | None:
        """The single dimension carrying the cycle, ``None`` for zero or mixed cycles."""
        dims = self.dims()
        return dims.pop() if len(dims) == 1 else None

    def component(self, i: int) -> tuple[int, ...]:
        """Coordinates in ``CH_i`` (rank 1, or 2 in the even middle)."""
        X = self.quadric
        return tuple(self.coords[X.index_of(c)] for c in X.cells_in_dim(i))

    def reduce(self, ring: CoeffRing) -> Cycle:
        if not self.ring.divides(ring):
            raise RingMismatchError(f"cannot reduce {self.ring} to {ring}")
        return Cycle(self.quadric, ring, self.coords)

    def to_json(self) -> dict:
        return {"quadric": self.quadric.to_json(), "ring": self.ring.to_json(),
                "cells": {str(cell): c for cell, c in self.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> Cycle:
        X = SplitQuadric.from_json(data["quadric"])
        ring = CoeffRing.from_json(data.get("ring", "Z"))
        return cls(X, ring, {Cell.parse(k): int(v) for k, v in data["cells"].items()})

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*{cell}" for cell, c in self.items()) or "0"
        return f"Cycle(D={self.quadric.dim}, {body})"


def h_power(X: SplitQuadric, a: int, ring: CoeffRing = ZZ) -> Cycle:
    """The class ``h^a`` (dimension ``D - a``), rewritten in the cell basis."""
    D = X.dim
    if a < 0:
        raise ValueError("negative power")
    i = D - a
    if i < 0:
        return Cycle(X, ring)
    if 2 * i > D:
        return Cycle.cell(X, Cell("H", a), ring)
    if 2 * i == D:
        return Cycle(X, ring, {Cell("L", i): 1, Cell("L'", i): 1})
    return Cycle.cell(X, Cell("L", i), ring, 2)


def fundamental_class(X: SplitQuadric, ring: CoeffRing = ZZ) -> Cycle:
    return h_power(X, 0, ring)


def h_mult(x: Cycle) -> Cycle:
    """Multiply by the hyperplane class, lowering dimension by one."""
    X, ring = x.quadric, x.ring
    out = Cycle(X, ring)
    for cell, c in x.items():
        if cell.kind == "H":
            out = out + c * h_power(X, cell.index + 1, ring)
        elif cell.index >= 1:
            out = out + Cycle.cell(X, Cell("L", cell.index - 1), ring, c)
    return out


def degree(x: Cycle) -> int:
    """Degree of a zero-dimensional cycle: its coefficient on ``L(0)``."""
    if x.dims() - {0}:
        raise ValueError("degree is only defined on zero-dimensional cycles")
    return x[Cell("L", 0)]


def _cell_pairing(X: SplitQuadric, a: Cell, b: Cell) -> int:
    """Intersection number of two basis cells of complementary dimension."""
    D = X.dim
    da, db = X.cell_dim(a), X.cell_dim(b)
    if da + db != D:
        return 0
    if X.is_even and da == X.half:
        same = a.kind == b.kind
        return int(same) if X.half % 2 == 0 else int(not same)
    # one of the two is L(i), the other h^i
    return 1


def pairing_matrix(X: SplitQuadric, i: int) -> Mat:
    """Gram matrix between the cells of ``CH_i`` (rows) and ``CH_{D-i}`` (columns)."""
    rows = X.cells_in_dim(i)
    cols = X.cells_in_dim(X.dim - i)
    return Mat.from_rows(ZZ, [[_cell_pairing(X, a, b) for b in cols] for a in rows], len(cols))


def pairing(x: Cycle, u: Cycle) -> int:
    """``deg(x . u)`` for homogeneous cycles of complementary dimension."""
    x._check(u)
    X = x.quadric
    dx, du = x.homogeneous_dim(), u.homogeneous_dim()
    if dx is not None and du is not None and dx + du != X.dim:
        raise ValueError(f"dimensions {dx} and {du} are not complementary in D={X.dim}")
    if (dx is None and not x.is_zero()) or (du is None and not u.is_zero()):
        raise ValueError("pairing expects homogeneous cycles")
    total = 0
    for a, ca in x.items():
        for b, cb in u.items():
            total += ca * cb * _cell_pairing(X, a, b)
    return x.ring.reduce(total)


def swap_cell(X: SplitQuadric, cell: Cell, gamma: GroupElement) -> Cell:
    if cell.kind == "H" or not X.swaps(gamma) or cell.index != X.middle:
        return cell
    return Cell("L'" if cell.kind == "L" else "L", cell.index)


def gal_act(gamma: GroupElement, x: Cycle) -> Cycle:
    """Galois action: swaps ``L(d)`` and ``L'(d)`` when ``gamma`` pairs oddly with the discriminant."""
    X = x.quadric
    return Cycle(X, x.ring, {swap_cell(X, cell, gamma): c for cell, c in x.items()})


def middle_permutation(X: SplitQuadric, i: int, gamma: GroupElement, ring: CoeffRing = ZZ) -> Mat:
    """Matrix of ``gamma`` on ``CH_i`` in the cell basis (an involution)."""
    k = chow_rank(X, i)
    if k == 2 and X.swaps(gamma):
        return Mat.from_rows(ring, [[0, 1], [1, 0]])
    return Mat.identity(ring, k)
