"""Seeded random elements.

All randomness comes from numpy's PCG64 bit generator.  A random element with
``carets`` carets is built as follows: grow a domain tree from the root caret
by ``carets - 1`` expansions of a uniformly chosen leaf (leaves in shortlex
order), grow a range tree the same way, draw a uniform permutation to pair the
leaves in shortlex order, and canonicalize.
"""

from __future__ import annotations

import numpy as np

from .dynamics import is_hyperbolic, revealing_pair
from .element import ChainKind, Element, TreePair, canonicalize, chains, compose
from .tree import Address, CompleteTree, TreeParams


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_tree(params: TreeParams, carets: int, rng: np.random.Generator) -> CompleteTree:
    tree = CompleteTree.root_caret(params)
    internal = set(tree.internal)
    leaves = list(tree.leaves)
    for _ in range(carets - 1):
        leaf = leaves.pop(int(rng.integers(len(leaves))))
        internal.add(leaf)
        leaves.extend(params.children(leaf))
        leaves.sort(key=lambda a: (len(a), a))
    return CompleteTree.from_internal(params, internal)


def random_pair(params: TreeParams, carets: int, rng: np.random.Generator) -> TreePair:
    dom = random_tree(params, carets, rng)
    ran = random_tree(params, carets, rng)
    perm = rng.permutation(len(ran.leaves))
    mapping = {x: ran.leaves[int(i)] for x, i in zip(dom.leaves, perm)}
    return TreePair._trusted(params, dom, ran, mapping)


def random_element(params: TreeParams, carets: int, rng: np.random.Generator) -> Element:
    return canonicalize(random_pair(params, carets, rng))


def random_elliptic(params: TreeParams, carets: int, rng: np.random.Generator) -> Element:
    tree = random_tree(params, carets, rng)
    perm = rng.permutation(len(tree.leaves))
    mapping = {x: tree.leaves[int(i)] for x, i in zip(tree.leaves, perm)}
    return canonicalize(TreePair._trusted(params, tree, tree, mapping))


def random_hyperbolic(params: TreeParams, carets: int, rng: np.random.Generator,
                      tries: int = 1000) -> Element:
    for _ in range(tries):
        g = random_element(params, carets, rng)
        if is_hyperbolic(g):
            return g
    raise RuntimeError("no hyperbolic element found")


def local_twist(params: TreeParams, root: Address, carets: int,
                rng: np.random.Generator) -> dict[Address, Address]:
    """Leaf map of a random finite tree automorphism supported below ``root``.

    A random complete tree with ``carets`` carets hangs at ``root``; every caret
    permutes its children uniformly, so depths are preserved.
    """
    internal = {root}
    leaves = [root + (i,) for i in range(params.d)]
    for _ in range(carets - 1):
        leaf = leaves.pop(int(rng.integers(len(leaves))))
        internal.add(leaf)
        leaves.extend(leaf + (i,) for i in range(params.d))
    perm = {v: [int(i) for i in rng.permutation(params.d)] for v in internal}

    def image(w: Address) -> Address:
        out = list(w)
        for depth in range(len(root), len(w)):
            out[depth] = perm[w[:depth]][w[depth]]
        return tuple(out)

    return {x: image(x) for x in leaves}


def random_twist_below_attractors(v: Element, rng: np.random.Generator,
                                  max_carets: int = 3) -> Element:
    """A finite tree automorphism fixing the union of a revealing pair of ``v``,
    non-trivial only below attractor ends.

    Returns the twist ``a``; ``compose(a, v)`` is the twisted element.
    """
    p = revealing_pair(v)
    params = v.params
    sinks = [c.last for c in chains(p) if c.kind is ChainKind.ATTRACTOR]
    if not sinks:
        raise ValueError("element has no attractor")
    union = CompleteTree.from_internal(params, p.domain.internal | p.range.internal)
    mapping = {x: x for x in union.leaves}
    chosen = [s for s in sinks if rng.random() < 0.7] or [sinks[int(rng.integers(len(sinks)))]]
    for s in chosen:
        # the attractor end is a leaf of the range tree; twist below every union leaf under it
        for leaf in [x for x in union.leaves if x[:len(s)] == s]:
            del mapping[leaf]
            mapping.update(local_twist(params, leaf, int(rng.integers(1, max_carets + 1)), rng))
    return Element.from_mapping(params, mapping)


def twisted(v: Element, rng: np.random.Generator, max_carets: int = 3) -> tuple[Element, Element]:
    a = random_twist_below_attractors(v, rng, max_carets)
    return a, compose(a, v)
