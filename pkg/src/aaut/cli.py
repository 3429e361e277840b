"""Command line interface.  stdout always carries exactly one JSON document.

Exit codes: 0 success / affirmative, 1 negative verdict, 2 usage or input
error, 3 internal post-condition failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .conjugacy import (
    brute_force_conjugator,
    conjugate,
    conjugate_in_V,
    has_open_conjugacy_class,
)
from .dynamics import dynamics_report, eh_decompose, is_elliptic, is_hyperbolic, revealing_pair
from .element import InternalError
from .io import format_element, format_pair, parse_element
from .sampling import make_rng, random_element
from .strand.iso import iso
from .strand.loops import diagram_to_revealing_pair
from .strand.rewrite import basic_diagram, reduce, star_reduce
from .tree import FormatError, ParamsMismatch, TreeParams


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_element(text)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _pair_json(p) -> dict:
    return {
        "d": p.params.d,
        "k": p.params.k,
        "domain": [_addr(x) for x in p.domain.leaves],
        "range": [_addr(y) for y in p.range.leaves],
        "map": [[_addr(x), _addr(y)] for x, y in p.mapping],
    }


def _addr(a) -> str:
    from .tree import format_address
    return format_address(a)


def cmd_show(args) -> tuple[int, dict]:
    g = _load(args.file)
    return 0, {
        "element": format_element(g),
        "pair": _pair_json(g.pair),
        "elliptic": is_elliptic(g),
        "hyperbolic": is_hyperbolic(g),
        "open_conjugacy_class": has_open_conjugacy_class(g),
        "dynamics": dynamics_report(g).to_json(),
    }


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def cmd_revealing(args) -> tuple[int, dict]:
    p = revealing_pair(_load(args.file))
    text = format_pair(p)
    _write(args.out, text)
    return 0, {"element": text, "pair": _pair_json(p)}


def cmd_diagram(args) -> tuple[int, dict]:
    g = _load(args.file)
    if args.star_reduced:
        dgm = star_reduce(basic_diagram(revealing_pair(g)))
    elif args.reduced:
        dgm = reduce(basic_diagram(g.pair))
    else:
        dgm = basic_diagram(g.pair)
    dgm = dgm.relabeled()
    _write(args.dot, dgm.to_dot())
    if args.json:
        _write(args.json, json.dumps(dgm.to_json(), indent=2, sort_keys=True) + "\n")
    return 0, dgm.to_json()


def cmd_conj(args) -> tuple[int, dict]:
    g, h = _load(args.g), _load(args.h)
    verdict = conjugate_in_V(g, h) if args.arena == "V" else conjugate(g, h)
    out = verdict.to_json()
    if verdict.conjugate and args.witness_bound:
        w = brute_force_conjugator(g, h, args.witness_bound)
        out["witness"] = format_element(w.conjugator) if w else None
    return (0 if verdict.conjugate else 1), out


def cmd_eh(args) -> tuple[int, dict]:
    g_e, g_h = eh_decompose(_load(args.file))
    _write(args.out_elliptic, format_element(g_e))
    _write(args.out_hyperbolic, format_element(g_h))
    return 0, {"elliptic": format_element(g_e), "hyperbolic": format_element(g_h)}


def cmd_oracle(args) -> tuple[int, dict]:
    g, h = _load(args.g), _load(args.h)
    if args.max_carets < 1:
        raise UsageError("--max-carets must be at least 1")
    w = brute_force_conjugator(g, h, args.max_carets)
    if w is None:
        return 1, {"found": False, "max_carets": args.max_carets, "exhausted": True}
    return 0, {"found": True, "max_carets": args.max_carets, "witness": format_element(w.conjugator)}


def cmd_random(args) -> tuple[int, dict]:
    try:
        params = TreeParams(args.d, args.k)
    except FormatError as exc:
        raise UsageError(str(exc)) from None
    if args.carets < 1:
        raise UsageError("--carets must be at least 1")
    g = random_element(params, args.carets, make_rng(args.seed))
    text = format_element(g)
    _write(args.out, text)
    return 0, {"element": text, "seed": args.seed, "carets": args.carets}


def cmd_roundtrip(args) -> tuple[int, dict]:
    g = _load(args.file)
    dgm = star_reduce(basic_diagram(revealing_pair(g)))
    p = diagram_to_revealing_pair(dgm, g.params)
    back = star_reduce(basic_diagram(p))
    ok = iso(dgm, back, respect_rotation=True) is not None
    return (0 if ok else 1), {"iso": ok, "pair": format_pair(p)}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aaut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("show", help="canonical pair, type flags and dynamics")
    p.add_argument("file")
    p.set_defaults(run=cmd_show)

    p = sub.add_parser("revealing", help="a revealing pair")
    p.add_argument("file")
    p.add_argument("--out", help="also write the pair in element format")
    p.set_defaults(run=cmd_revealing)

    p = sub.add_parser("diagram", help="strand diagram as JSON (and DOT)")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--reduced", action="store_true")
    mode.add_argument("--star-reduced", action="store_true")
    p.add_argument("--dot")
    p.add_argument("--json")
    p.set_defaults(run=cmd_diagram)

    p = sub.add_parser("conj", help="conjugacy verdict")
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("--arena", choices=["V", "AAut"], default="AAut")
    p.add_argument("--witness-bound", type=int, default=0)
    p.set_defaults(run=cmd_conj)

    p = sub.add_parser("eh", help="elliptic-hyperbolic decomposition")
    p.add_argument("file")
    p.add_argument("--out-elliptic")
    p.add_argument("--out-hyperbolic")
    p.set_defaults(run=cmd_eh)

    p = sub.add_parser("oracle", help="bounded brute-force conjugator search")
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("--max-carets", type=int, required=True)
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser("random", help="seeded random element")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--carets", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(run=cmd_random)

    p = sub.add_parser("roundtrip", help="diagram -> revealing pair -> diagram check")
    p.add_argument("file")
    p.set_defaults(run=cmd_roundtrip)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        code, payload = args.run(args)
    except (UsageError, FormatError, ParamsMismatch, ValueError) as exc:
        code, payload = 2, {"error": str(exc), "kind": "input"}
    except (InternalError, AssertionError) as exc:
        code, payload = 3, {"error": str(exc) or type(exc).__name__, "kind": "internal"}
    if code >= 2:
        print(payload["error"], file=sys.stderr)
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
