"""Command-line front end.

Results go to stdout as JSON with sorted keys; logs go to stderr.
Exit codes: 0 success or pass, 1 failed verdict, 2 bad input, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Mapping, Sequence

from .correspondences import Correspondence, Motive
from .exact_linalg import CoeffRing, ShapeError
from .harness import enumerate_idempotents_mod2, reduction_bijection_check
from .motive_lift import (
    ContradictionError,
    NotInvertibleError,
    classify,
    lift_isomorphism,
    lift_mod2_to_mod2n,
    lift_projector,
    summand_inverse,
)
from .rationality import CONTEXT_KINDS, RationalityContext, RationalityError, ResourceError
from .split_chow import GaloisContext, SplitQuadric

log = logging.getLogger("quadric_motives")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _load(path: str) -> Mapping:
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise InputError("input must be a JSON object")
    return data


def _parse_disc(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "-"):
        return ()
    bits = text.replace(",", "")
    if any(b not in "01" for b in bits):
        raise InputError(f"--disc expects a bit vector like 01, got {text!r}")
    return tuple(int(b) for b in bits)


def _context(data: Mapping, X: SplitQuadric, Y: SplitQuadric, n: int) -> RationalityContext:
    """Context from the input, or a default one for the pair."""
    if "context" in data:
        ctx = RationalityContext.from_json(data["context"])
        if set(ctx.objects) != {X, Y}:
            raise InputError("context does not match the quadrics of the input")
        return ctx
    return RationalityContext(X, Y, GaloisContext(X.r, max(n, X.r, 1)), kind=data.get("kind", "default"))


def _correspondence(data: Mapping, key: str) -> Correspondence:
    if key not in data:
        raise InputError(f"missing field {key!r}")
    return Correspondence.from_json(data[key])


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    galois = GaloisContext(args.galois_r, args.n)
    report = reduction_bijection_check(args.dim_max, galois, args.context, cross_shapes=not args.no_cross)
    return report, EXIT_OK if report["verdict"] == "pass" else EXIT_FAIL


def cmd_enumerate(args: argparse.Namespace) -> tuple[dict, int]:
    disc = _parse_disc(args.disc)
    X = SplitQuadric(args.dim, disc)
    galois = GaloisContext(X.r, max(args.n, X.r))
    ctx = RationalityContext(X, X, galois, kind=args.context)
    pis = enumerate_idempotents_mod2(X, ctx)
    out = {
        "quadric": X.to_json(),
        "context": args.context,
        "count": len(pis),
        "idempotents": [{"projector": p.to_json(), "class": classify(p).to_json()} for p in pis],
    }
    return out, EXIT_OK


def cmd_lift_projector(args: argparse.Namespace) -> tuple[dict, int]:
    data = _load(args.input)
    tau = _correspondence(data, "projector")
    X = tau.source
    n = int(data.get("n", tau.ring.two_exponent or 0))
    if tau.ring.two_exponent is None or n < 1:
        raise InputError("projector must be given mod 2^n with n >= 1")
    ctx = _context(data, X, X, n)
    if tau.ring == CoeffRing(2) and ctx.n > 1:
        tau = lift_mod2_to_mod2n(tau, ctx.n, ctx)
    rho = lift_projector(tau, ctx)
    return {"projector": rho.to_json(), "mod_2n": tau.to_json(), "class": classify(rho).to_json()}, EXIT_OK


def cmd_lift_iso(args: argparse.Namespace) -> tuple[dict, int]:
    data = _load(args.input)
    rho, sigma, alpha = (_correspondence(data, k) for k in ("rho", "sigma", "alpha"))
    n = alpha.ring.two_exponent
    if n is None:
        raise InputError("alpha must be given mod 2^n")
    ctx = _context(data, rho.source, sigma.source, n)
    c = lift_isomorphism(rho, sigma, alpha, ctx)
    if c is None:
        return {"result": "not isomorphic"}, EXIT_OK
    inverse = summand_inverse(c, rho, sigma)
    return {"result": "isomorphic", "iso": c.to_json(), "inverse": inverse.to_json()}, EXIT_OK


def cmd_classify(args: argparse.Namespace) -> tuple[dict, int]:
    data = _load(args.input)
    if "quadric" in data and "projector" in data:
        motive = Motive.from_json(data)
    else:
        motive = Motive(_correspondence(data, "projector"))
    return {"motive": motive.to_json(), "class": classify(motive).to_json()}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadric-motives", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="exhaustive reduction bijection check")
    v.add_argument("--dim-max", type=int, default=2)
    v.add_argument("--n", type=int, default=2, help="coefficient exponent: work mod 2^n")
    v.add_argument("--galois-r", type=int, default=1)
    v.add_argument("--context", choices=CONTEXT_KINDS, default="default")
    v.add_argument("--no-cross", action="store_true", help="skip pairs of motives on different quadrics")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("enumerate", help="rational invariant idempotents mod 2")
    e.add_argument("--dim", type=int, required=True)
    e.add_argument("--disc", default="", help="discriminant bit vector, e.g. 01")
    e.add_argument("--n", type=int, default=1)
    e.add_argument("--context", choices=CONTEXT_KINDS, default="default")
    e.set_defaults(func=cmd_enumerate)

    for name, func, text in (
        ("lift-projector", cmd_lift_projector, "lift a projector mod 2^n to Z"),
        ("lift-iso", cmd_lift_iso, "integral isomorphism between two lifted motives"),
        ("classify", cmd_classify, "Tate twists and middle marker of a motive"),
    ):
        s = sub.add_parser(name, help=text)
        s.add_argument("--input", required=True, help="JSON file, or - for stdin")
        s.set_defaults(func=func)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        out, code = args.func(args)
    except ResourceError as exc:
        log.error("resource limit: %s", exc)
        print(_dump({"error": "resource", "message": str(exc)}))
        return EXIT_RESOURCE
    except ContradictionError as exc:
        log.error("contradiction: %s", exc)
        print(_dump({"error": "contradiction", "message": str(exc)}))
        return EXIT_FAIL
    except (InputError, RationalityError, NotInvertibleError, ShapeError,
            ValueError, KeyError, TypeError) as exc:
        log.error("invalid input: %s", exc)
        print(_dump({"error": "input", "message": str(exc)}))
        return EXIT_INPUT
    print(_dump(out))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
