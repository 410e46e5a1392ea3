"""Exact coefficient rings, dense matrices and the normal forms built on them.

Everything here works with Python integers. A :class:`CoeffRing` is either the
integers or a residue ring ``Z/m``; a :class:`Mat` is an immutable dense matrix
whose entries are kept as canonical representatives of its ring.

The algorithms are the ones the rest of the package leans on:

* :func:`snf` -- Smith normal form over ``Z`` with unimodular transforms.
* :func:`howell` -- Howell form of a row span over ``Z/m``.
* :func:`membership` -- row-span membership with coordinates.
* :func:`lift_sl` -- lift ``SL_k(Z/m)`` to ``SL_k(Z)`` through elementary matrices.
* :func:`lift_idempotent_newton` -- Newton lifting of idempotents mod ``2^n``.
* :func:`unit_decompose`, :func:`rank1_decomposition_to_sl2`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence


class RingMismatchError(ValueError):
    """Raised when operands live over different coefficient rings."""


class ShapeError(ValueError):
    """Raised on incompatible matrix or vector dimensions."""


@dataclass(frozen=True)
class CoeffRing:
    """The integers (``modulus=None``) or the residue ring ``Z/modulus``."""

    modulus: int | None = None

    def __post_init__(self) -> None:
        if self.modulus is not None and self.modulus < 2:
            raise ValueError(f"residue modulus must be >= 2, got {self.modulus}")

    @classmethod
    def integers(cls) -> CoeffRing:
        return cls(None)

    @classmethod
    def residue(cls, m: int) -> CoeffRing:
        return cls(m)

    @classmethod
    def pow2(cls, n: int) -> CoeffRing:
        if n < 1:
            raise ValueError("exponent must be >= 1")
        return cls(1 << n)

    @property
    def is_integers(self) -> bool:
        return self.modulus is None

    @property
    def two_exponent(self) -> int | None:
        """``n`` when the ring is ``Z/2^n``, else ``None``."""
        m = self.modulus
        if m is None or m & (m - 1):
            return None
        return m.bit_length() - 1

    @property
    def is_local(self) -> bool:
        m = self.modulus
        return m is not None and len(_prime_factors(m)) == 1

    def reduce(self, x: int) -> int:
        return x if self.modulus is None else x % self.modulus

    def centered(self, x: int) -> int:
        """Representative of ``x`` in ``(-m/2, m/2]``; identity over ``Z``."""
        m = self.modulus
        if m is None:
            return x
        x %= m
        return x - m if 2 * x > m else x

    def is_unit(self, x: int) -> bool:
        if self.modulus is None:
            return x in (1, -1)
        return math.gcd(x, self.modulus) == 1

    def inv(self, x: int) -> int:
        if self.modulus is None:
            if x in (1, -1):
                return x
            raise ZeroDivisionError(f"{x} is not a unit in Z")
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit mod {self.modulus}")
        return pow(x, -1, self.modulus)

    def divides(self, target: CoeffRing) -> bool:
        """True when reduction from ``self`` to ``target`` is well defined."""
        if target.modulus is None:
            return self.modulus is None
        return self.modulus is None or self.modulus % target.modulus == 0

    def to_json(self) -> str:
        if self.modulus is None:
            return "Z"
        n = self.two_exponent
        return f"Z/2^{n}" if n is not None else f"Z/{self.modulus}"

    @classmethod
    def from_json(cls, value: str) -> CoeffRing:
        if value == "Z":
            return cls(None)
        if not isinstance(value, str) or not value.startswith("Z/"):
            raise ValueError(f"bad ring descriptor {value!r}")
        body = value[2:]
        if body.startswith("2^"):
            return cls.pow2(int(body[2:]))
        return cls(int(body))

    def __str__(self) -> str:
        return self.to_json()


ZZ = CoeffRing()


def _prime_factors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


@dataclass(frozen=True)
class Mat:
    """Immutable dense matrix over a :class:`CoeffRing`, row-major."""

    ring: CoeffRing
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )
        if self.ring.modulus is not None:
            m = self.ring.modulus
            object.__setattr__(self, "entries", tuple(int(e) % m for e in self.entries))
        else:
            object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))

    # -- construction ----------------------------------------------------
    @classmethod
    def from_rows(cls, ring: CoeffRing, rows: Sequence[Sequence[int]], cols: int | None = None) -> Mat:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ShapeError("ragged rows")
        return cls(ring, len(rows), cols, tuple(e for r in rows for e in r))

    @classmethod
    def zeros(cls, ring: CoeffRing, rows: int, cols: int) -> Mat:
        return cls(ring, rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, ring: CoeffRing, n: int) -> Mat:
        return cls(ring, n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, ring: CoeffRing, values: Sequence[int]) -> Mat:
        n = len(values)
        return cls(ring, n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    # -- access ----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> Mat:
        return Mat(self.ring, self.cols, self.rows,
                   tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    # -- arithmetic ------------------------------------------------------
    def _check_ring(self, other: Mat) -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other: Mat) -> Mat:
        self._check_ring(other)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        return Mat(self.ring, self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: Mat) -> Mat:
        self._check_ring(other)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} - {other.shape}")
        return Mat(self.ring, self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> Mat:
        return Mat(self.ring, self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: int) -> Mat:
        return Mat(self.ring, self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: Mat) -> Mat:
        self._check_ring(other)
        if self.cols != other.rows:
            raise ShapeError(f"{self.shape} @ {other.shape}")
        n, k, p = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            base = i * k
            for j in range(p):
                out.append(sum(a[base + t] * b[t * p + j] for t in range(k)))
        return Mat(self.ring, n, p, tuple(out))

    def vecmul(self, v: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix: ``v @ self``."""
        if len(v) != self.rows:
            raise ShapeError("vector length does not match rows")
        return tuple(
            self.ring.reduce(sum(v[i] * self.entries[i * self.cols + j] for i in range(self.rows)))
            for j in range(self.cols)
        )

    def reduce(self, ring: CoeffRing) -> Mat:
        """Entrywise reduction into ``ring`` (its modulus must divide ours)."""
        if not self.ring.divides(ring):
            raise RingMismatchError(f"cannot reduce {self.ring} to {ring}")
        return Mat(ring, self.rows, self.cols, self.entries)

    def lift(self, centered: bool = False) -> Mat:
        """Integer matrix with the same representatives (optionally centered)."""
        if centered:
            return Mat(ZZ, self.rows, self.cols, tuple(self.ring.centered(e) for e in self.entries))
        return Mat(ZZ, self.rows, self.cols, self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ShapeError("determinant of a non-square matrix")
        return self.ring.reduce(_bareiss_det(self.to_rows()))

    def inverse(self) -> Mat:
        """Inverse via the adjugate; the determinant must be a unit."""
        if self.rows != self.cols:
            raise ShapeError("inverse of a non-square matrix")
        d = self.det()
        dinv = self.ring.inv(d)
        adj = _adjugate(self.to_rows())
        return Mat.from_rows(self.ring, [[dinv * e for e in r] for r in adj], self.cols)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_idempotent(self) -> bool:
        return self.is_square() and self @ self == self

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "rows": self.rows, "cols": self.cols,
                "entries": list(self.entries)}

    @classmethod
    def from_json(cls, data: dict) -> Mat:
        return cls(CoeffRing.from_json(data["ring"]), int(data["rows"]), int(data["cols"]),
                   tuple(int(e) for e in data["entries"]))

    def __repr__(self) -> str:
        return f"Mat({self.ring}, {self.to_rows()})"


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [r[:] for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _adjugate(a: list[list[int]]) -> list[list[int]]:
    n = len(a)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(a) if k != i]
            adj[j][i] = (-1) ** (i + j) * _bareiss_det(minor)
    return adj


# ---------------------------------------------------------------------------
# Smith normal form over Z
# ---------------------------------------------------------------------------

def snf(A: Mat) -> tuple[Mat, Mat, Mat]:
    """Smith normal form ``U @ A @ V == S`` over the integers.

    Pivots are the smallest nonzero entry in absolute value (row-major tie
    break). ``U`` and ``V`` are unimodular, ``S`` is diagonal with a
    nonnegative divisibility chain on its diagonal.
    """
    if not A.ring.is_integers:
        raise RingMismatchError("snf requires an integer matrix")
    m, n = A.shape
    S = A.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, k: int) -> None:
        S[i], S[k] = S[k], S[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j: int, k: int) -> None:
        for r in S:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]

    def add_row(dst: int, src: int, c: int) -> None:
        S[dst] = [x + c * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, c: int) -> None:
        for r in S:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
            # a smaller remainder in the pivot row/column becomes the new pivot
            cand = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
            cand += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
            if cand:
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % S[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return (Mat.from_rows(ZZ, U, m), Mat.from_rows(ZZ, S, n), Mat.from_rows(ZZ, V, n))


def invariant_factors(A: Mat) -> list[int]:
    """Nonzero diagonal of the Smith form of an integer matrix."""
    _, S, _ = snf(A)
    return [S[i, i] for i in range(min(S.shape)) if S[i, i]]


# ---------------------------------------------------------------------------
# Howell form over Z/m
# ---------------------------------------------------------------------------

def _gcdex(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = s*a + t*b = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _normalizing_unit(a: int, m: int) -> int:
    """A unit ``u`` mod ``m`` with ``u * a = gcd(a, m)`` mod ``m``."""
    g = math.gcd(a, m)
    if g == m:
        return 1
    mg = m // g
    u = pow((a // g) % mg, -1, mg) if mg > 1 else 1
    while math.gcd(u, m) != 1:
        u += mg
    return u % m


def _howell_rows(rows: list[list[int]], ncols: int, m: int) -> list[list[int]]:
    """Howell form of the row span of ``rows`` (first ``ncols`` columns).

    Rows may carry extra trailing columns (used to track a transform); those
    columns take part in every row operation but never in pivoting.
    """
    work = [[x % m for x in r] for r in rows if any(x % m for x in r)]
    result: list[list[int]] = []
    pivots: list[int] = []
    for c in range(ncols):
        active = [r for r in work if r[c]]
        rest = [r for r in work if not r[c]]
        if not active:
            continue
        piv = active[0]
        for other in active[1:]:
            g, s, t = _gcdex(piv[c], other[c])
            u, v = -other[c] // g, piv[c] // g
            new_piv = [(s * x + t * y) % m for x, y in zip(piv, other)]
            new_other = [(u * x + v * y) % m for x, y in zip(piv, other)]
            piv = new_piv
            if any(new_other):
                rest.append(new_other)
        if not piv[c]:
            # the combined pivot cancelled modulo m; keep what is left
            if any(piv):
                rest.append(piv)
            work = rest
            continue
        unit = _normalizing_unit(piv[c], m)
        piv = [(unit * x) % m for x in piv]
        ann = [((m // piv[c]) * x) % m for x in piv]
        if any(ann):
            rest.append(ann)
        result.append(piv)
        pivots.append(c)
        work = [r for r in rest if any(r)]
    # reduce entries above each pivot into [0, pivot)
    for k, c in enumerate(pivots):
        p = result[k][c]
        for i in range(k):
            q = result[i][c] // p
            if q:
                result[i] = [(x - q * y) % m for x, y in zip(result[i], result[k])]
    return result


def howell(A: Mat) -> Mat:
    """Howell form of the row span of ``A`` over ``Z/m``.

    Zero rows are dropped, so the result has one row per pivot. Pivots are
    normalized to divisors of ``m`` and entries above a pivot are reduced into
    ``[0, pivot)``, which makes the form unique for a given span.
    """
    m = A.ring.modulus
    if m is None:
        raise RingMismatchError("howell requires a residue ring")
    rows = _howell_rows(A.to_rows(), A.cols, m)
    return Mat.from_rows(A.ring, rows, A.cols)


def _howell_with_transform(A: Mat) -> tuple[list[list[int]], list[list[int]]]:
    m = A.ring.modulus
    k = A.rows
    aug = [list(A.row(i)) + [int(i == j) for j in range(k)] for i in range(k)]
    rows = _howell_rows(aug, A.cols, m)
    return [r[:A.cols] for r in rows], [r[A.cols:] for r in rows]


def pivot_profile(H: Mat) -> list[tuple[int, int]]:
    """``(column, pivot value)`` for each row of a Howell form."""
    out = []
    for i in range(H.rows):
        r = H.row(i)
        c = next(j for j, x in enumerate(r) if x)
        out.append((c, r[c]))
    return out


def free_rank(A: Mat) -> int:
    """Rank of the free part of the row span of ``A``.

    Over ``Z`` this is the ordinary rank. Over ``Z/m`` it counts the Howell
    pivots equal to one, which is the rank of the span when it is a free direct
    summand (as it is for the image of an idempotent).
    """
    if A.ring.is_integers:
        return len(invariant_factors(A))
    return sum(1 for _, p in pivot_profile(howell(A)) if p == 1)


def membership(x: Sequence[int], basis: Mat) -> tuple[int, ...] | None:
    """Coordinates ``c`` with ``c @ basis == x``, or ``None`` if ``x`` is not in the row span."""
    if len(x) != basis.cols:
        raise ShapeError(f"vector of length {len(x)} against {basis.cols} columns")
    ring = basis.ring
    if ring.is_integers:
        return _membership_z(list(x), basis)
    m = ring.modulus
    x = [v % m for v in x]
    H, T = _howell_with_transform(basis)
    coeff = [0] * basis.rows
    start = 0
    for hrow, trow in zip(H, T):
        c = next(j for j, v in enumerate(hrow) if v)
        if any(x[start:c]):
            return None
        p = hrow[c]
        if x[c] % p:
            return None
        q = x[c] // p
        if q:
            x = [(a - q * b) % m for a, b in zip(x, hrow)]
            coeff = [(a + q * b) % m for a, b in zip(coeff, trow)]
        start = c + 1
    if any(x):
        return None
    return tuple(coeff)


def _membership_z(x: list[int], basis: Mat) -> tuple[int, ...] | None:
    U, S, V = snf(basis)
    k, n = basis.shape
    y = [sum(x[i] * V[i, j] for i in range(n)) for j in range(n)]
    z = [0] * k
    for j in range(n):
        s = S[j, j] if j < k else 0
        if s == 0:
            if y[j]:
                return None
        elif y[j] % s:
            return None
        else:
            z[j] = y[j] // s
    return tuple(sum(z[i] * U[i, j] for i in range(k)) for j in range(k))


def span_contains(basis: Mat, x: Iterable[int]) -> bool:
    return membership(tuple(x), basis) is not None


# ---------------------------------------------------------------------------
# Lifting along Z -> Z/m and Z/2^n -> Z/2
# ---------------------------------------------------------------------------

def lift_sl(M: Mat) -> Mat:
    """Lift a determinant-one matrix over ``Z/m`` to ``SL_k(Z)``.

    The centered representative is returned when it already has determinant
    one. Otherwise ``M`` is driven to the identity by elementary row
    operations over ``Z/m``; each operation is lifted to an integral
    elementary matrix and the inverses are multiplied back together.
    """
    ring = M.ring
    m = ring.modulus
    if m is None:
        raise RingMismatchError("lift_sl expects a residue-ring matrix")
    if not M.is_square():
        raise ShapeError("lift_sl expects a square matrix")
    if M.det() != 1 % m:
        raise ValueError(f"determinant {M.det()} is not 1 mod {m}")
    k = M.rows
    centered = M.lift(centered=True)
    if centered.det() == 1:
        return centered

    work = M.to_rows()
    ops: list[tuple[int, int, int]] = []

    def apply(i: int, j: int, c: int) -> None:
        c %= m
        if c == 0:
            return
        work[i] = [(x + c * y) % m for x, y in zip(work[i], work[j])]
        ops.append((i, j, c))

    local = ring.is_local
    for j in range(k):
        if not ring.is_unit(work[j][j]):
            unit_rows = [i for i in range(j + 1, k) if ring.is_unit(work[i][j])]
            if local and unit_rows:
                apply(j, unit_rows[0], 1)
            else:
                for i in range(j + 1, k):
                    x, y = work[j][j], work[i][j]
                    if math.gcd(x, m) == 1:
                        break
                    best = min(range(m), key=lambda c: (math.gcd(x + c * y, m), c))
                    apply(j, i, best)
        u = work[j][j]
        if not ring.is_unit(u):
            raise ArithmeticError("no unit pivot found; matrix is not invertible")
        uinv = ring.inv(u)
        for i in range(k):
            if i != j and work[i][j]:
                apply(i, j, -work[i][j] * uinv)
    # diag(u_0, ..., u_{k-1}) -> identity, one Whitehead factor
    # diag(a, a^-1) = e12(a) e21(-a^-1) e12(a) e12(-1) e21(1) e12(-1) at a time
    for t in range(k - 1):
        a = ring.inv(work[t][t])
        ainv = work[t][t]
        for i, jj, c in ((t, t + 1, -1), (t + 1, t, 1), (t, t + 1, -1),
                         (t, t + 1, a), (t + 1, t, -ainv), (t, t + 1, a)):
            apply(i, jj, c)
    if any(work[i][j] != int(i == j) for i in range(k) for j in range(k)):
        raise ArithmeticError("elimination did not reach the identity")

    # M = E_1^-1 E_2^-1 ... E_t^-1; each inverse is a column operation on L.
    L = [[int(i == j) for j in range(k)] for i in range(k)]
    for i, j, c in ops:
        c = ring.centered(c)
        for r in L:
            r[j] -= c * r[i]
    out = Mat.from_rows(ZZ, L, k)
    assert out.det() == 1 and out.reduce(ring) == M
    return out


def lift_idempotent_newton(E: Mat) -> Mat:
    """Lift an idempotent mod 2 to an idempotent mod ``2^n``.

    ``E`` lives over ``Z/2^n`` and only needs ``E @ E == E`` mod 2. The map
    ``F -> 3F^2 - 2F^3`` doubles the 2-adic precision of idempotency, so
    ``ceil(log2 n)`` rounds suffice.
    """
    n = E.ring.two_exponent
    if n is None:
        raise RingMismatchError("Newton lifting needs a ring Z/2^n")
    if not E.is_square():
        raise ShapeError("idempotents are square")
    two = CoeffRing.pow2(1)
    e2 = E.reduce(two)
    if e2 @ e2 != e2:
        raise ValueError("matrix is not idempotent mod 2")
    F = E
    for _ in range(math.ceil(math.log2(n)) if n > 1 else 0):
        F2 = F @ F
        F = F2.scale(3) - (F2 @ F).scale(2)
    assert F @ F == F
    return F


def unit_decompose(u: int, ring: CoeffRing) -> tuple[int, int]:
    """Write ``u^-1 = 2k + 1`` in ``Z/2^n``; returns ``(k, u^-1)``."""
    m = ring.modulus
    if ring.two_exponent is None:
        raise RingMismatchError("unit_decompose works in Z/2^n")
    u %= m
    if u % 2 == 0:
        raise ValueError(f"{u} is even, hence not a unit mod {m}")
    uinv = pow(u, -1, m)
    k = ((uinv - 1) // 2) % m
    return k, uinv


def unimodular_generator(v: Sequence[int], ring: CoeffRing) -> tuple[int, ...]:
    """Scale a unimodular vector so its first unit coordinate becomes 1."""
    for x in v:
        if ring.is_unit(x):
            inv = ring.inv(x)
            return tuple(ring.reduce(inv * y) for y in v)
    raise ValueError("vector is not unimodular")


def _image_generator(p: Mat) -> tuple[int, ...]:
    """Canonical generator of the (free, rank-one) column space of ``p``."""
    H = howell(p.T)
    for i in range(H.rows):
        r = H.row(i)
        if any(p.ring.is_unit(x) for x in r):
            return unimodular_generator(r, p.ring)
    raise ValueError("image is not a free rank-one summand")


def rank1_decomposition_to_sl2(p: Mat) -> Mat:
    """``g`` in ``SL_2`` with ``g @ E11 @ g^-1 == p`` for a rank-one idempotent ``p``.

    The first column of ``g`` is the canonical image generator, the second a
    kernel generator rescaled by a unit so that ``det g == 1``.
    """
    ring = p.ring
    if p.shape != (2, 2):
        raise ShapeError("expected a 2x2 matrix")
    I = Mat.identity(ring, 2)
    if p @ p != p:
        raise ValueError("matrix is not idempotent")
    if p.is_zero() or p == I:
        raise ValueError("idempotent has rank 0 or 2")
    v = _image_generator(p)
    w = _image_generator(I - p)
    g = Mat.from_rows(ring, [[v[0], w[0]], [v[1], w[1]]])
    d = g.det()
    if not ring.is_unit(d):
        raise ValueError("image and kernel do not form a basis")
    dinv = ring.inv(d)
    g = Mat.from_rows(ring, [[v[0], dinv * w[0]], [v[1], dinv * w[1]]])
    E11 = Mat.from_rows(ring, [[1, 0], [0, 0]])
    assert g.det() == ring.reduce(1)
    assert g @ E11 @ g.inverse() == p
    return g
