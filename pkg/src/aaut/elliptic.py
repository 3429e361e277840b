"""Orbital types of elliptic elements and the elliptic conjugacy decision.

For an elliptic Higman-Thompson element with revealing pair ``[kappa, T, T]``
every descendant of a leaf in a kappa-cycle of length m has an orbit of size m,
so the orbital type is a disjoint union of full d-ary trees with constant
label m, one per cycle.  Trimming a root caret of such a component yields d
components of the same label, so the boundary class is captured by the set of
labels plus the multiplicity of each label modulo d-1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .dynamics import is_elliptic, revealing_pair
from .element import ChainKind, Element, TreePair, chains
from .tree import ParamsMismatch, TreeParams


class NotElliptic(ValueError):
    pass


@dataclass(frozen=True)
class OrbitalType:
    params: TreeParams
    components: tuple[tuple[int, int], ...]  # (label, multiplicity), sorted by label
    source: TreePair | None = None

    @classmethod
    def from_labels(cls, params: TreeParams, labels, source=None) -> "OrbitalType":
        counts = Counter(labels)
        return cls(params, tuple(sorted(counts.items())), source)

    @property
    def labels(self) -> frozenset[int]:
        return frozenset(m for m, _ in self.components)

    @property
    def leaf_count(self) -> int:
        return sum(m * c for m, c in self.components)

    def to_json(self) -> dict:
        return {"components": [{"label": m, "multiplicity": c} for m, c in self.components]}

    def to_dot(self) -> str:
        lines = ["digraph orbital_type {"]
        for i, (m, c) in enumerate(self.components):
            lines.append(f'  c{i} [shape=box, label="{m}×{c}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BotInvariant:
    label_set: frozenset[int]
    residues: tuple[tuple[int, int], ...]  # label -> multiplicity mod (d-1)

    def to_json(self) -> dict:
        return {
            "label_set": sorted(self.label_set),
            "residues": {str(m): r for m, r in self.residues},
        }


def _require_elliptic(g: Element) -> None:
    if not is_elliptic(g):
        raise NotElliptic(f"element is not elliptic: {g}")


def orbital_type(g: Element) -> OrbitalType:
    _require_elliptic(g)
    p = revealing_pair(g)
    labels = [c.period for c in chains(p) if c.kind is ChainKind.PERIODIC]
    return OrbitalType.from_labels(g.params, labels, p)


def bot_invariant(t: OrbitalType) -> BotInvariant:
    mod = t.params.d - 1
    return BotInvariant(t.labels, tuple((m, c % mod) for m, c in t.components))


def elliptic_conjugate(g: Element, h: Element) -> bool:
    if g.params != h.params:
        raise ParamsMismatch(f"parameter mismatch: {g.params} vs {h.params}")
    return bot_invariant(orbital_type(g)) == bot_invariant(orbital_type(h))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def is_autT_conjugate_elliptic_t22(g: Element) -> bool:
    """Whether an elliptic element of T_{2,2} is conjugate to a tree automorphism."""
    if (g.params.d, g.params.k) != (2, 2):
        raise ValueError(f"only defined for d=k=2, got {g.params}")
    return all(_is_power_of_two(m) for m in orbital_type(g).labels)


def _prime_factors(n: int) -> set[int]:
    out = set()
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


def is_d_number(n: int, d: int) -> bool:
    return all(p <= d for p in _prime_factors(n)) and n % (d * d) != 0


def is_autT_orbital_type(t: OrbitalType) -> bool:
    """EXPERIMENTAL: every label is a d-number.

    Disagrees with ``is_autT_conjugate_elliptic_t22`` for d=2 on labels that are
    multiples of 4; kept verbatim and not used by any decision.
    """
    return all(is_d_number(m, t.params.d) for m in t.labels)
