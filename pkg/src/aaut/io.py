"""The ``aaut v1`` element text format."""

from __future__ import annotations

from .element import Element, TreePair, canonicalize
from .tree import (
    CompleteTree,
    FormatError,
    TreeParams,
    _completeness_problem,
    format_address,
    parse_address,
    shortlex,
)

MAGIC = "aaut v1"


def format_pair(p: TreePair) -> str:
    lines = [MAGIC, f"d {p.params.d} k {p.params.k}", "pair"]
    lines += [f"{format_address(x)} -> {format_address(y)}" for x, y in p.mapping]
    return "\n".join(lines) + "\n"


def format_element(g: Element) -> str:
    return format_pair(g.pair)


def parse_pair(text: str) -> TreePair:
    """Parse without canonicalizing; raises FormatError with line/column."""
    lines = text.splitlines()
    # skip blank lines but keep numbering
    numbered = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered or numbered[0][1] != MAGIC:
        raise FormatError(f"expected header {MAGIC!r}", line=numbered[0][0] if numbered else 1)
    if len(numbered) < 3:
        raise FormatError("truncated file", line=len(lines) or 1)
    no, hdr = numbered[1]
    parts = hdr.split()
    if len(parts) != 4 or parts[0] != "d" or parts[2] != "k":
        raise FormatError("expected 'd <d> k <k>'", line=no)
    try:
        params = TreeParams(int(parts[1]), int(parts[3]))
    except ValueError as exc:
        raise FormatError(str(exc), line=no) from None
    if numbered[2][1] != "pair":
        raise FormatError("expected 'pair'", line=numbered[2][0])

    mapping = {}
    images = set()
    prev = None
    for no, ln in numbered[3:]:
        src, arrow, dst = ln.partition("->")
        if not arrow:
            raise FormatError("expected '<domain-leaf> -> <range-leaf>'", line=no)
        src, dst = src.strip(), dst.strip()
        x = _address(src, params, no, ln.find(src) + 1)
        y = _address(dst, params, no, ln.rfind(dst) + 1)
        if x in mapping:
            raise FormatError(f"domain not an antichain: duplicate leaf {src!r}", line=no)
        if y in images:
            raise FormatError(f"range not an antichain: duplicate leaf {dst!r}", line=no)
        if prev is not None and shortlex(x) < shortlex(prev):
            raise FormatError("domain leaves must be sorted shortlex", line=no)
        prev = x
        mapping[x] = y
        images.add(y)
    if not mapping:
        raise FormatError("empty leaf map", line=numbered[-1][0])
    for side, leaves in (("domain", list(mapping)), ("range", list(images))):
        problem = _completeness_problem(leaves, params)
        if problem:
            if problem.startswith("not an antichain"):
                problem = f"{side} not an antichain" + problem[len("not an antichain"):]
            else:
                problem = f"{side}: {problem}"
            raise FormatError(problem)
    return TreePair._trusted(
        params,
        CompleteTree.from_leaves(params, mapping),
        CompleteTree.from_leaves(params, images),
        mapping,
    )


def _address(text: str, params: TreeParams, line: int, column: int):
    try:
        return parse_address(text, params)
    except FormatError as exc:
        raise FormatError(str(exc), line=line, column=column) from None


def parse_element(text: str) -> Element:
    return canonicalize(parse_pair(text))
