"""Conjugacy decisions in V_{d,k} and in the almost automorphism group, plus a brute-force oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .dynamics import eh_decompose, is_hyperbolic, revealing_pair, support_is_full
from .element import Element, TreePair, _contract, compose, inverse
from .elliptic import bot_invariant, orbital_type
from .strand.diagram import StrandDiagram
from .strand.iso import iso
from .strand.rewrite import basic_diagram, reduce, star_reduce
from .tree import CompleteTree, ParamsMismatch, TreeParams, shortlex


@dataclass(frozen=True)
class Verdict:
    conjugate: bool
    arena: str  # "V" or "AAut"
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"conjugate": self.conjugate, "arena": self.arena, "evidence": self.evidence}


@dataclass(frozen=True)
class Witness:
    conjugator: Element

    def verify(self, g: Element, h: Element) -> bool:
        a = self.conjugator
        return compose(a, compose(g, inverse(a))) == h


def _same_params(g: Element, h: Element) -> None:
    if g.params != h.params:
        raise ParamsMismatch(f"parameter mismatch: {g.params} vs {h.params}")


@lru_cache(maxsize=8192)
def reduced_diagram(g: Element) -> StrandDiagram:
    """Reduced diagram of the canonical pair (the V-conjugacy invariant)."""
    return reduce(basic_diagram(g.pair))


@lru_cache(maxsize=8192)
def star_reduced_diagram(g: Element) -> StrandDiagram:
    """*-reduced diagram of a revealing pair (the hyperbolic invariant)."""
    return star_reduce(basic_diagram(revealing_pair(g)))


def _iso_evidence(found) -> dict:
    return {"kind": "diagram-iso", "mapping": found.to_json()}


def conjugate_in_V(g: Element, h: Element) -> Verdict:
    _same_params(g, h)
    a, b = reduced_diagram(g), reduced_diagram(h)
    found = iso(a, b, respect_rotation=True)
    if found is not None:
        return Verdict(True, "V", _iso_evidence(found))
    if iso(a, b, respect_rotation=False) is not None:
        return Verdict(False, "V", {"kind": "rotation mismatch",
                                    "detail": "diagrams agree only up to rotation"})
    return Verdict(False, "V", {"kind": "diagram iso", "detail": "reduced diagrams differ"})


class NotHyperbolic(ValueError):
    pass


def conjugate_hyperbolic(g: Element, h: Element) -> Verdict:
    _same_params(g, h)
    for e in (g, h):
        if not is_hyperbolic(e):
            raise NotHyperbolic(f"element is not hyperbolic: {e}")
    found = iso(star_reduced_diagram(g), star_reduced_diagram(h), respect_rotation=False)
    if found is not None:
        return Verdict(True, "AAut", _iso_evidence(found))
    return Verdict(False, "AAut", {"kind": "diagram iso",
                                   "detail": "*-reduced diagrams differ up to rotation"})


@lru_cache(maxsize=8192)
def _profile(g: Element):
    ge, gh = eh_decompose(g)
    return ge, gh, bot_invariant(orbital_type(ge))


def conjugate(g: Element, h: Element) -> Verdict:
    """Full decision: elliptic parts, hyperbolic parts and support fullness."""
    _same_params(g, h)
    ge, gh, bg = _profile(g)
    he, hh, bh = _profile(h)
    if bg.label_set != bh.label_set:
        return Verdict(False, "AAut", {"kind": "elliptic label set",
                                       "g": sorted(bg.label_set), "h": sorted(bh.label_set)})
    if bg != bh:
        return Verdict(False, "AAut", {"kind": "elliptic residues",
                                       "g": bg.to_json()["residues"], "h": bh.to_json()["residues"]})
    evidence = {"kind": "invariants", "bot": bg.to_json()}
    if gh.is_identity != hh.is_identity:
        return Verdict(False, "AAut", {"kind": "diagram iso",
                                       "detail": "exactly one hyperbolic part is trivial"})
    if not gh.is_identity:
        hyp = conjugate_hyperbolic(gh, hh)
        if not hyp.conjugate:
            return Verdict(False, "AAut", hyp.evidence)
        evidence["hyperbolic"] = hyp.evidence
    fg, fh = support_is_full(g), support_is_full(h)
    if fg != fh:
        return Verdict(False, "AAut", {"kind": "support parity",
                                       "g_full": fg, "h_full": fh})
    evidence["support_full"] = fg
    return Verdict(True, "AAut", evidence)


def has_open_conjugacy_class(g: Element) -> bool:
    return is_hyperbolic(g) and support_is_full(g)


# -- brute-force oracle ------------------------------------------------------

@lru_cache(maxsize=None)
def trees_with_carets(params: TreeParams, carets: int) -> tuple[CompleteTree, ...]:
    """All complete trees with exactly ``carets`` carets (the root caret included)."""
    if carets < 1:
        return ()
    if carets == 1:
        return (CompleteTree.root_caret(params),)
    seen = {}
    for t in trees_with_carets(params, carets - 1):
        for leaf in t.leaves:
            u = t.expand(leaf)
            seen.setdefault(u.leaves, u)
    return tuple(seen[key] for key in sorted(seen, key=lambda ls: [shortlex(x) for x in ls]))


@lru_cache(maxsize=None)
def elements_up_to(params: TreeParams, max_carets: int) -> tuple[Element, ...]:
    """Every element whose canonical domain has at most ``max_carets`` carets.

    Ordered by caret count, then by the serialized text form.
    """
    from .io import format_element

    out = []
    for c in range(1, max_carets + 1):
        layer = []
        trees = trees_with_carets(params, c)
        for dom in trees:
            for ran in trees:
                for perm in itertools.permutations(ran.leaves):
                    mapping = dict(zip(dom.leaves, perm))
                    if len(_contract(params, dict(mapping))) != len(mapping):
                        continue
                    pair = TreePair._trusted(params, dom, ran, mapping)
                    layer.append(Element(pair))
        layer.sort(key=format_element)
        out.extend(layer)
    return tuple(out)


def _image(table: dict, w: tuple):
    for i in range(1, len(w) + 1):
        y = table.get(w[:i])
        if y is not None:
            return y + w[i:]
    return None


def conjugate_leaf_map(a: Element, g: Element) -> frozenset:
    """Leaf map of the canonical pair of ``a g a^-1`` as a frozenset of (leaf, image).

    A direct refinement loop, much cheaper than two generic compositions; used by
    the exhaustive searches.
    """
    params = a.params
    a_fwd, a_bwd, g_fwd = a.pair.forward, a.pair.backward, g.pair.forward
    out = {}
    stack = list(a.pair.range.leaves)
    while stack:
        r = stack.pop()
        u = _image(a_bwd, r)
        v = _image(g_fwd, u)
        w = None if v is None else _image(a_fwd, v)
        if w is None:
            stack.extend(params.children(r))
        else:
            out[r] = w
    return frozenset(_contract(params, out).items())


@dataclass(frozen=True)
class _Prepared:
    element: Element
    forward: dict
    start: tuple  # (range leaf, its preimage)


def prepared_conjugators(params: TreeParams, max_carets: int,
                         up_to_inverse: bool = False) -> list[_Prepared]:
    """The enumeration of ``elements_up_to`` with lookup tables built once.

    With ``up_to_inverse`` only one of each pair {a, a^-1} is kept (the earlier
    one); the bounded conjugacy relation is symmetric, so this loses nothing
    when both orders of a pair are examined.
    """
    elements = elements_up_to(params, max_carets)
    index = {frozenset(a.pair.mapping): i for i, a in enumerate(elements)}
    out = []
    for i, a in enumerate(elements):
        if up_to_inverse and index[frozenset(a.pair.inverse().mapping)] < i:
            continue
        start = tuple((y, x) for x, y in a.pair.mapping)
        out.append(_Prepared(a, a.pair.forward, start))
    return out


def fast_conjugate(prep: _Prepared, g: Element) -> frozenset:
    """Same as ``conjugate_leaf_map`` for a prepared conjugator."""
    d = g.params.d
    a_fwd, g_fwd = prep.forward, g.pair.forward
    out = {}
    stack = list(prep.start)
    pop, push = stack.pop, stack.append
    while stack:
        r, u = pop()
        v = None
        for i in range(1, len(u) + 1):
            y = g_fwd.get(u[:i])
            if y is not None:
                v = y + u[i:]
                break
        w = None
        if v is not None:
            for i in range(1, len(v) + 1):
                y = a_fwd.get(v[:i])
                if y is not None:
                    w = y + v[i:]
                    break
        if w is None:
            for j in range(d):
                push((r + (j,), u + (j,)))
        else:
            out[r] = w
    return frozenset(_contract(g.params, out).items())


def brute_force_conjugator(g: Element, h: Element, max_carets: int) -> Witness | None:
    """First ``a`` in enumeration order with ``a g a^-1 = h``, or None."""
    _same_params(g, h)
    target = frozenset(h.pair.mapping)
    for a in elements_up_to(g.params, max_carets):
        if conjugate_leaf_map(a, g) == target:
            w = Witness(a)
            if not w.verify(g, h):
                raise AssertionError("witness failed to re-verify")
            return w
    return None
