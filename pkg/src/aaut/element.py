"""Tree pairs, canonical Higman-Thompson elements and revealing pairs.

An element of V_{d,k} is stored as its fully contracted tree pair.  The pair
``[kappa, T1, T2]`` acts on the boundary by prefix replacement: a point below
the domain leaf ``x`` is sent to the same suffix below ``kappa(x)``.

Composition convention: ``compose(g, h)`` applies ``h`` first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .tree import (
    ROOT,
    Address,
    CompleteTree,
    Component,
    FormatError,
    ParamsMismatch,
    TreeParams,
    format_address,
    is_prefix,
    is_strict_prefix,
    shortlex,
    subtract,
    union,
)


class NeedsRefinement(ValueError):
    """An address is too short to lie below a domain leaf."""

    def __init__(self, prefix: Address):
        self.prefix = prefix
        super().__init__(f"address {format_address(prefix)!r} is not below a domain leaf")


class InternalError(RuntimeError):
    """A post-condition that must always hold was violated."""


@dataclass(frozen=True)
class TreePair:
    params: TreeParams
    domain: CompleteTree
    range: CompleteTree
    mapping: tuple[tuple[Address, Address], ...]

    @classmethod
    def from_mapping(cls, params: TreeParams, mapping: Mapping[Address, Address]) -> "TreePair":
        domain = CompleteTree.from_leaves(params, mapping.keys())
        images = list(mapping.values())
        if len(set(images)) != len(images):
            raise FormatError("leaf map is not a bijection")
        range_ = CompleteTree.from_leaves(params, images)
        return cls._trusted(params, domain, range_, mapping)

    @classmethod
    def _trusted(cls, params, domain, range_, mapping) -> "TreePair":
        items = tuple(sorted(mapping.items(), key=lambda kv: shortlex(kv[0])))
        return cls(params, domain, range_, items)

    @classmethod
    def _from_dict(cls, params: TreeParams, mapping: Mapping[Address, Address]) -> "TreePair":
        """Build without completeness checks; callers guarantee validity."""
        domain = CompleteTree(params, tuple(sorted(mapping, key=shortlex)))
        range_ = CompleteTree(params, tuple(sorted(mapping.values(), key=shortlex)))
        return cls._trusted(params, domain, range_, mapping)

    @classmethod
    def identity(cls, params: TreeParams, tree: CompleteTree | None = None) -> "TreePair":
        tree = tree or CompleteTree.root_caret(params)
        return cls._from_dict(params, {x: x for x in tree.leaves})

    @cached_property
    def forward(self) -> dict[Address, Address]:
        return dict(self.mapping)

    @cached_property
    def backward(self) -> dict[Address, Address]:
        return {y: x for x, y in self.mapping}

    def image(self, w: Address) -> Address:
        fwd = self.forward
        for i in range(1, len(w) + 1):
            y = fwd.get(w[:i])
            if y is not None:
                return y + w[i:]
        raise NeedsRefinement(w)

    def preimage(self, w: Address) -> Address:
        bwd = self.backward
        for i in range(1, len(w) + 1):
            x = bwd.get(w[:i])
            if x is not None:
                return x + w[i:]
        raise NeedsRefinement(w)

    def inverse(self) -> "TreePair":
        return TreePair._trusted(self.params, self.range, self.domain, self.backward)

    def to_text(self) -> str:
        from .io import format_pair

        return format_pair(self)

    def __str__(self) -> str:
        body = ",".join(f"{format_address(x)}->{format_address(y)}" for x, y in self.mapping)
        return f"[{self.domain}->{self.range}; {body}]"


def _contract(params: TreeParams, fwd: dict[Address, Address]) -> dict[Address, Address]:
    d = params.d
    todo = {x[:-1] for x in fwd if len(x) >= 2}
    while todo:
        p = todo.pop()
        first = fwd.get(p + (0,))
        if first is None or len(first) < 2 or first[-1] != 0:
            continue
        q = first[:-1]
        if all(fwd.get(p + (i,)) == q + (i,) for i in range(d)):
            for i in range(d):
                del fwd[p + (i,)]
            fwd[p] = q
            if len(p) >= 2:
                todo.add(p[:-1])
    return fwd


def canonicalize(p: TreePair) -> "Element":
    """Fully contract ``p``; equal elements give identical canonical pairs."""
    fwd = _contract(p.params, dict(p.mapping))
    return Element(TreePair._from_dict(p.params, fwd))


@dataclass(frozen=True)
class Element:
    """A Higman-Thompson element held in canonical form."""

    pair: TreePair

    @classmethod
    def from_mapping(cls, params: TreeParams, mapping: Mapping[Address, Address]) -> "Element":
        return canonicalize(TreePair.from_mapping(params, mapping))

    @classmethod
    def identity(cls, params: TreeParams) -> "Element":
        return cls(TreePair.identity(params))

    @property
    def params(self) -> TreeParams:
        return self.pair.params

    @property
    def is_identity(self) -> bool:
        return all(x == y for x, y in self.pair.mapping)

    def __mul__(self, other: "Element") -> "Element":
        return compose(self, other)

    def __invert__(self) -> "Element":
        return inverse(self)

    def __pow__(self, n: int) -> "Element":
        base = self if n >= 0 else inverse(self)
        out = Element.identity(self.params)
        for _ in range(abs(n)):
            out = compose(base, out)
        return out

    def __str__(self) -> str:
        return str(self.pair)


def _as_pair(e: Element | TreePair) -> TreePair:
    return e.pair if isinstance(e, Element) else e


def refine(e: Element | TreePair, new_domain: CompleteTree) -> TreePair:
    """Tree pair for ``e`` whose domain is ``new_domain`` (the exact pushforward)."""
    p = _as_pair(e)
    if new_domain.params != p.params:
        raise ParamsMismatch("parameter mismatch")
    fwd = p.forward
    out = {}
    for w in new_domain.leaves:
        for i in range(len(w), 0, -1):
            y = fwd.get(w[:i])
            if y is not None:
                out[w] = y + w[i:]
                break
        else:
            raise ValueError(f"new domain does not contain the domain {p.domain}")
    if not p.domain.internal <= new_domain.internal:
        raise ValueError(f"new domain does not contain the domain {p.domain}")
    return TreePair._from_dict(p.params, out)


def inverse(g: Element) -> Element:
    return Element(g.pair.inverse())


def compose(g: Element, h: Element) -> Element:
    """The element ``g o h`` (``h`` acts first)."""
    if g.params != h.params:
        raise ParamsMismatch(f"parameter mismatch: {g.params} vs {h.params}")
    return canonicalize(compose_pairs(g.pair, h.pair))


def compose_pairs(g: TreePair, h: TreePair) -> TreePair:
    middle = union(h.range, g.domain)
    g_fwd = g.forward
    h_bwd = h.backward
    out = {}
    for u in middle.leaves:
        out[_push(h_bwd, u)] = _push(g_fwd, u)
    return TreePair._from_dict(g.params, out)


def _push(table: Mapping[Address, Address], w: Address) -> Address:
    for i in range(len(w), 0, -1):
        y = table.get(w[:i])
        if y is not None:
            return y + w[i:]
    raise NeedsRefinement(w)


def conjugate_by(a: Element, g: Element) -> Element:
    """``a g a^-1``."""
    return compose(a, compose(g, inverse(a)))


def act(g: Element | TreePair, w: Address) -> Address:
    """Image of the vertex ``w``; raises NeedsRefinement above the domain leaves."""
    return _as_pair(g).image(w)


class ChainKind(enum.Enum):
    ATTRACTOR = "attractor"
    REPELLER = "repeller"
    PERIODIC = "periodic"
    WANDERING = "wandering"
    OTHER = "other"


@dataclass(frozen=True)
class MaximalChain:
    vertices: tuple[Address, ...]
    kind: ChainKind
    # attractor/repeller: n; periodic: cycle length
    period: int | None = None
    spine: Address | None = None

    @property
    def first(self) -> Address:
        return self.vertices[0]

    @property
    def last(self) -> Address:
        return self.vertices[-1]

    def __str__(self) -> str:
        body = ",".join(format_address(v) for v in self.vertices)
        return f"({body}):{self.kind.value}"


def chains(p: TreePair) -> list[MaximalChain]:
    """All maximal chains; open chains first (by start), then cycles (by least leaf)."""
    fwd = p.forward
    l1 = p.domain.leaf_set
    l2 = p.range.leaf_set
    seen: set[Address] = set()
    out = []
    for x0 in p.domain.leaves:
        if x0 in l2:
            continue
        seq = [x0]
        while seq[-1] in l1:
            seq.append(fwd[seq[-1]])
        seen.update(seq)
        out.append(_classify_open(tuple(seq), p))
    for x0 in p.domain.leaves:
        if x0 in seen:
            continue
        seq = [x0]
        nxt = fwd[x0]
        while nxt != x0:
            seq.append(nxt)
            nxt = fwd[nxt]
        seen.update(seq)
        out.append(MaximalChain(tuple(seq), ChainKind.PERIODIC, len(seq)))
    return out


def _classify_open(seq: tuple[Address, ...], p: TreePair) -> MaximalChain:
    x0, xn = seq[0], seq[-1]
    n = len(seq) - 1
    if is_strict_prefix(x0, xn):
        return MaximalChain(seq, ChainKind.ATTRACTOR, n, xn[len(x0):])
    if is_strict_prefix(xn, x0):
        return MaximalChain(seq, ChainKind.REPELLER, n, x0[len(xn):])
    if x0 not in p.range and xn not in p.domain:
        return MaximalChain(seq, ChainKind.WANDERING)
    return MaximalChain(seq, ChainKind.OTHER)


def is_revealing(p: TreePair) -> bool:
    return all(c.kind is not ChainKind.OTHER for c in chains(p))


def fake_components(p: TreePair) -> tuple[list[Component], list[Component]]:
    """Components of T2\\T1 without an attractor and of T1\\T2 without a repeller."""
    by_first = {}
    by_last = {}
    for c in chains(p):
        by_first[c.first] = c
        by_last[c.last] = c
    attracting = [
        comp for comp in subtract(p.range, p.domain)
        if by_first[comp.root].kind is not ChainKind.ATTRACTOR
    ]
    repelling = [
        comp for comp in subtract(p.domain, p.range)
        if by_last[comp.root].kind is not ChainKind.REPELLER
    ]
    return attracting, repelling


def roll(g: Element | TreePair, p: TreePair, chain: MaximalChain, tree: Component,
         direction: str = "forward") -> TreePair:
    """Glue copies of ``tree`` along ``chain``: the g-rolling of ``p``.

    ``tree`` is rooted at the first chain vertex for a forward rolling and at
    the last for a backward one.  Either way copies land on x_0..x_{n-1} in the
    domain tree and on x_1..x_n in the range tree.
    """
    xs = chain.vertices
    if direction == "forward":
        anchor = xs[0]
    elif direction == "backward":
        anchor = xs[-1]
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if tree.root != anchor:
        raise ValueError(
            f"{direction} rolling needs a tree rooted at {format_address(anchor)!r}, "
            f"got {format_address(tree.root)!r}")
    if not tree.leaves:
        return p
    params = p.params
    n = len(xs) - 1
    suffix_internal = set()
    for s in tree.suffixes():
        suffix_internal.update(s[:i] for i in range(len(s)))
    dom_internal = set(p.domain.internal)
    ran_internal = set(p.range.internal)
    for i in range(n):
        dom_internal.update(xs[i] + s for s in suffix_internal)
    for i in range(1, n + 1):
        ran_internal.update(xs[i] + s for s in suffix_internal)
    new_domain = CompleteTree.from_internal(params, dom_internal)
    out = refine(g, new_domain)
    expected = CompleteTree.from_internal(params, ran_internal)
    if out.range.leaves != expected.leaves:
        raise InternalError(f"rolling produced range {out.range}, expected {expected}")
    return out


class MakeRevealingError(InternalError):
    pass


def _measure(comps: list[Component]) -> tuple[int, int]:
    return (sum(c.n_carets for c in comps), len(comps))


def _chain_of(p: TreePair, v: Address, first: bool) -> MaximalChain:
    for c in chains(p):
        if (c.first if first else c.last) == v:
            return c
    raise InternalError(f"no chain through {format_address(v)!r}")


def _run_phases(p: TreePair, order: tuple[str, str], max_steps: int) -> TreePair | None:
    steps = 0
    for _round in range(4):
        for phase in order:
            last = None
            while True:
                attracting, repelling = fake_components(p)
                comps = attracting if phase == "attracting" else repelling
                if not comps:
                    break
                m = _measure(comps)
                if last is not None and m >= last:
                    return None
                last = m
                comp = comps[0]
                if phase == "attracting":
                    p = roll(p, p, _chain_of(p, comp.root, True), comp, "forward")
                else:
                    p = roll(p, p, _chain_of(p, comp.root, False), comp, "backward")
                steps += 1
                if steps > max_steps:
                    return None
        attracting, repelling = fake_components(p)
        if not attracting and not repelling:
            return p
    return None


def make_revealing(g: Element, start: TreePair | None = None, max_steps: int = 10_000) -> TreePair:
    """A revealing pair for ``g`` containing ``start`` (default: the canonical pair).

    Forward-rolls fake attracting components away, then backward-rolls fake
    repelling ones, checking that the fake-caret measure strictly drops; on a
    failed measure the opposite phase order is tried.
    """
    start = g.pair if start is None else start
    if canonicalize(start) != g:
        raise ValueError("start pair does not represent g")
    for order in (("attracting", "repelling"), ("repelling", "attracting")):
        out = _run_phases(start, order, max_steps)
        if out is not None and is_revealing(out):
            return out
    raise MakeRevealingError(f"could not build a revealing pair for {g}")
