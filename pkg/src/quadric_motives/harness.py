"""Brute-force oracle and the desk-scale check that reduction mod 2 is bijective on motives.

The oracle never calls the lifting algorithms. It enumerates rational
correspondences mod 2 and decides isomorphism of two mod-2 motives by
searching for a rational ``f`` whose corner inverse is rational too.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .correspondences import (
    Correspondence,
    compose,
    is_gal_invariant,
    reduce,
)
from .exact_linalg import CoeffRing, Mat, free_rank
from .motive_lift import (
    ContradictionError,
    NotInvertibleError,
    classify,
    lift_isomorphism,
    lift_mod2_to_mod2n,
    lift_projector,
    summand_inverse,
)
from .rationality import RationalityContext, ResourceError
from .split_chow import GaloisContext, SplitQuadric

log = logging.getLogger(__name__)

F2 = CoeffRing(2)
SPAN_LIMIT = 1 << 20


def shapes(d_max: int, galois: GaloisContext) -> list[SplitQuadric]:
    """Every quadric shape with ``1 <= D <= d_max`` and every admissible character."""
    out = []
    for D in range(1, d_max + 1):
        discs = galois.disc_chars() if D % 2 == 0 else [(0,) * galois.r]
        out.extend(SplitQuadric(D, disc) for disc in discs)
    return out


def enumerate_idempotents_mod2(X: SplitQuadric, ctx: RationalityContext) -> list[Correspondence]:
    """All Galois-invariant idempotents ``X -> X`` mod 2 in the rational span, sorted."""
    if X.dim > 4:
        raise ResourceError("enumeration is limited to dim <= 4")
    found = []
    for p in ctx.members(X, X, F2, limit=SPAN_LIMIT):
        if p.is_idempotent() and is_gal_invariant(p):
            found.append(p)
    return sorted(found, key=lambda p: p.to_vector())


def _ranks_mod2(p: Correspondence, top: int) -> tuple[int, ...]:
    ranks = [free_rank(B.T) for B in p.blocks]
    return tuple(ranks + [0] * (top + 1 - len(ranks)))


@lru_cache(maxsize=None)
def _all_matrices(rows: int, cols: int) -> tuple[Mat, ...]:
    return tuple(Mat(F2, rows, cols, bits) for bits in itertools.product((0, 1), repeat=rows * cols))


def _corner_inverse(f: Correspondence, pi: Correspondence, pi2: Correspondence) -> Correspondence | None:
    """The unique ``g = pi g pi2`` with ``g f = pi`` and ``f g = pi2``, if it exists."""
    blocks = []
    for i, F in enumerate(f.blocks):
        P, Q = pi.blocks[i], pi2.blocks[i]
        for G in _all_matrices(F.cols, F.rows):
            if G @ F == P and F @ G == Q and P @ G @ Q == G:
                blocks.append(G)
                break
        else:
            return None
    return Correspondence(f.target, f.source, F2, tuple(blocks))


def find_isomorphism_mod2(pi: Correspondence, pi2: Correspondence,
                          ctx: RationalityContext) -> tuple[Correspondence, Correspondence] | None:
    """Exhaustive search for rational ``f: (X, pi) -> (Y, pi2)`` with a rational inverse."""
    X, Y = pi.source, pi2.source
    top = max(X.dim, Y.dim)
    if _ranks_mod2(pi, top) != _ranks_mod2(pi2, top):
        return None
    back = {g.to_vector() for g in ctx.members(Y, X, F2, limit=SPAN_LIMIT)}
    seen = set()
    for a in ctx.members(X, Y, F2, limit=SPAN_LIMIT):
        f = compose(pi2, compose(a, pi))
        key = f.to_vector()
        if key in seen:
            continue
        seen.add(key)
        g = _corner_inverse(f, pi, pi2)
        if g is not None and g.to_vector() in back:
            return f, g
    return None


def lift_morphism_mod2_to_mod2n(f: Correspondence, tau: Correspondence, tau2: Correspondence,
                                ctx: RationalityContext) -> Correspondence:
    """Rational ``alpha = tau2 a tau`` mod ``2^n`` with ``alpha = f`` mod 2."""
    a = ctx.rational_preimage(f)
    alpha = compose(tau2, compose(a, tau))
    assert reduce(alpha, F2) == f
    return alpha


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def count(self) -> int:
        return len({self.find(i) for i in range(len(self.parent))})


@dataclass
class LiftedMotive:
    pi: Correspondence
    tau: Correspondence | None = None
    rho: Correspondence | None = None
    problems: list[str] = field(default_factory=list)


def _lift_all(X: SplitQuadric, ctx: RationalityContext, pis: list[Correspondence]) -> list[LiftedMotive]:
    out = []
    for pi in pis:
        rec = LiftedMotive(pi)
        try:
            rec.tau = lift_mod2_to_mod2n(pi, ctx.n, ctx)
            rec.rho = lift_projector(rec.tau, ctx)
        except ContradictionError as exc:
            rec.problems.append(f"contradiction: {exc}")
        except (AssertionError, ValueError) as exc:
            rec.problems.append(f"lift failed: {exc!r}")
        if rec.rho is not None:
            rho = rec.rho
            if not rho.is_idempotent():
                rec.problems.append("integral lift is not idempotent")
            if not is_gal_invariant(rho):
                rec.problems.append("integral lift is not invariant")
            ctx2 = ctx.add_generators([rec.tau])
            if not ctx2.is_rational_integral(rho):
                rec.problems.append("integral lift is not rational")
            back = reduce(rho, F2)
            if find_isomorphism_mod2(back, pi, ctx2) is None:
                rec.problems.append("reduction is not isomorphic to the input")
        out.append(rec)
    return out


def _check_pair(a: LiftedMotive, b: LiftedMotive, ctx: RationalityContext) -> tuple[bool, bool, list[str]]:
    """Return ``(iso mod 2, iso over Z, problems)`` for a pair of lifted motives."""
    problems = []
    found = find_isomorphism_mod2(a.pi, b.pi, ctx)
    if a.rho is None or b.rho is None:
        return found is not None, False, ["missing integral lift"]
    if found is None:
        if classify(a.pi) == classify(b.pi):
            problems.append("no rational iso mod 2 but classify does not distinguish")
        zero = Correspondence.zero(a.rho.source, b.rho.source, ctx.ring)
        try:
            if lift_isomorphism(a.rho, b.rho, zero, ctx) is not None:
                problems.append("lift_isomorphism succeeded without a mod-2 iso")
        except NotInvertibleError:
            problems.append("lift_isomorphism could not rule out an isomorphism")
        return False, False, problems
    f, _ = found
    alpha = lift_morphism_mod2_to_mod2n(f, a.tau, b.tau, ctx)
    try:
        c = lift_isomorphism(a.rho, b.rho, alpha, ctx)
    except (AssertionError, ValueError) as exc:
        return True, False, [f"lift_isomorphism failed: {exc!r}"]
    if c is None:
        return True, False, ["lift_isomorphism returned not isomorphic for isomorphic reductions"]
    try:
        c_inv = summand_inverse(c, a.rho, b.rho)
    except NotInvertibleError as exc:
        return True, False, [f"integral iso not invertible: {exc}"]
    if compose(c_inv, c) != a.rho or compose(c, c_inv) != b.rho:
        problems.append("inverse does not compose to the projectors")
    if not ctx.is_rational_integral(c) or not ctx.is_rational_integral(c_inv):
        problems.append("integral iso or its inverse is not rational")
    if classify(a.rho) != classify(b.rho):
        problems.append("isomorphic motives with different classes")
    return True, not problems, problems


def _witness(rec: LiftedMotive, size: int) -> dict:
    return {
        "class": classify(rec.pi).to_json(),
        "members": size,
        "projector_mod2": {str(i): b.to_rows() for i, b in enumerate(rec.pi.blocks)},
        "integral_projector": None if rec.rho is None else
        {str(i): b.to_rows() for i, b in enumerate(rec.rho.blocks)},
    }


def check_shape(X: SplitQuadric, galois: GaloisContext, kind: str = "default") -> tuple[dict, list[LiftedMotive], RationalityContext]:
    ctx = RationalityContext(X, X, galois, kind=kind)
    pis = enumerate_idempotents_mod2(X, ctx)
    recs = _lift_all(X, ctx, pis)
    surj_problems = [p for r in recs for p in r.problems]
    uf2, ufz = _UnionFind(len(recs)), _UnionFind(len(recs))
    inj_problems = []
    for i, j in itertools.combinations(range(len(recs)), 2):
        iso2, isoz, probs = _check_pair(recs[i], recs[j], ctx)
        if iso2:
            uf2.union(i, j)
        if isoz:
            ufz.union(i, j)
        inj_problems.extend(probs)
    classes: dict[int, list[int]] = {}
    for i in range(len(recs)):
        classes.setdefault(uf2.find(i), []).append(i)
    mod2_classes, integral_classes = uf2.count(), ufz.count()
    if mod2_classes != integral_classes:
        inj_problems.append(f"{mod2_classes} classes mod 2 but {integral_classes} over Z")
    entry = {
        "dim": X.dim,
        "disc": list(X.disc),
        "mod2_idempotents": len(recs),
        "mod2_classes": mod2_classes,
        "integral_classes": integral_classes,
        "surjectivity": "pass" if not surj_problems else "fail",
        "injectivity": "pass" if not inj_problems else "fail",
        "witnesses": [_witness(recs[idx[0]], len(idx)) for _, idx in sorted(classes.items())],
    }
    if surj_problems or inj_problems:
        entry["problems"] = sorted(set(surj_problems + inj_problems))
    log.info("D=%d disc=%s: %d idempotents, %d classes mod 2, %d over Z",
             X.dim, X.disc, len(recs), mod2_classes, integral_classes)
    return entry, recs, ctx


def check_cross_shapes(lifted: dict[SplitQuadric, list[LiftedMotive]], galois: GaloisContext,
                       kind: str = "default") -> dict:
    """Pairs of motives on different quadrics, including the mismatched-marker checks."""
    pairs = isomorphic = marker_pairs = 0
    problems: list[str] = []
    qs = sorted(lifted, key=lambda q: (q.dim, q.disc))
    for A, B in itertools.combinations(qs, 2):
        recs_a = [r for r in lifted[A] if r.rho is not None]
        recs_b = [r for r in lifted[B] if r.rho is not None]
        ctx = RationalityContext(A, B, galois, kind=kind)
        missing = [r.tau for r in recs_a + recs_b if not ctx.is_rational_mod(r.tau)]
        if missing:
            ctx = ctx.add_generators(missing)
        top = max(A.dim, B.dim)
        for a in recs_a:
            cls_a, ranks_a = classify(a.pi), _ranks_mod2(a.pi, top)
            for b in recs_b:
                pairs += 1
                cls_b = classify(b.pi)
                mismatched = cls_a.middle_marker != cls_b.middle_marker
                if not mismatched and ranks_a != _ranks_mod2(b.pi, top):
                    continue
                marker_pairs += mismatched
                iso2, isoz, probs = _check_pair(a, b, ctx)
                isomorphic += iso2
                if mismatched and (iso2 or isoz):
                    probs.append(f"isomorphism across mismatched markers {cls_a} / {cls_b}")
                problems.extend(f"D={A.dim}{list(A.disc)} vs D={B.dim}{list(B.disc)}: {p}" for p in probs)
    return {
        "pairs": pairs,
        "isomorphic_pairs": isomorphic,
        "mismatched_marker_pairs": marker_pairs,
        "markers_respected": "pass" if not any("mismatched" in p for p in problems) else "fail",
        "verdict": "pass" if not problems else "fail",
        **({"problems": sorted(set(problems))} if problems else {}),
    }


def reduction_bijection_check(d_max: int, galois: GaloisContext, kind: str = "default",
                              cross_shapes: bool = True) -> dict:
    """Exhaustive desk-scale check that ``Z -> Z/2`` is bijective on motive classes.

    For each shape, every rational invariant idempotent mod 2 is lifted to an
    integral projector (surjectivity), and every pair whose reductions are
    isomorphic must admit an integral rational isomorphism (injectivity).
    """
    if d_max > 4 or galois.n > 4:
        raise ResourceError("desk-scale limits are d_max <= 4 and n <= 4")
    entries = []
    lifted = {}
    for X in shapes(d_max, galois):
        entry, recs, _ = check_shape(X, galois, kind)
        entries.append(entry)
        lifted[X] = recs
    report = {
        "context": kind,
        "galois": galois.to_json(),
        "dim_max": d_max,
        "shapes": entries,
    }
    ok = all(e["surjectivity"] == "pass" and e["injectivity"] == "pass" for e in entries)
    if cross_shapes:
        cross = check_cross_shapes(lifted, galois, kind)
        report["cross_shapes"] = cross
        ok = ok and cross["verdict"] == "pass"
    report["verdict"] = "pass" if ok else "fail"
    return report


def structural_middle_rank_check(dims: Iterable[int] = (2, 4), exponents: Iterable[int] = (1, 2),
                                 r: int = 1) -> dict:
    """Count invariant idempotents by middle rank for every nontrivial character."""
    from .correspondences import middle_rank

    rows = []
    for D in dims:
        for n in exponents:
            galois = GaloisContext(r, max(n, r))
            ring = CoeffRing.pow2(n)
            for disc in galois.disc_chars():
                if not any(disc):
                    continue
                X = SplitQuadric(D, disc)
                ctx = RationalityContext(X, X, galois, kind="invariant")
                counts = {0: 0, 1: 0, 2: 0}
                for p in ctx.members(X, X, ring):
                    if p.is_idempotent():
                        counts[middle_rank(p)] += 1
                rows.append({"dim": D, "disc": list(disc), "ring": ring.to_json(),
                             "middle_rank_counts": {str(k): v for k, v in counts.items()}})
    return {"rows": rows, "verdict": "pass" if all(r["middle_rank_counts"]["1"] == 0 for r in rows) else "fail"}
