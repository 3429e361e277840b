"""Boundary dynamics of Higman-Thompson elements read off a revealing pair."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .element import (
    ChainKind,
    Element,
    MaximalChain,
    TreePair,
    chains,
    canonicalize,
    make_revealing,
)
from .tree import (
    Address,
    ClopenSet,
    FormatError,
    TreeParams,
    format_address,
    parse_address,
)


@dataclass(frozen=True)
class BoundaryPoint:
    """The eventually periodic ray ``prefix . cycle^inf``.

    Normal form: the cycle is primitive and the prefix is as short as possible
    while still holding the root digit (so it is never empty).
    """

    prefix: Address
    cycle: Address

    @classmethod
    def make(cls, prefix: Address, cycle: Address) -> "BoundaryPoint":
        prefix, cycle = tuple(prefix), tuple(cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        if not prefix:
            prefix, cycle = cycle[:1], cycle[1:] + cycle[:1]
        n = len(cycle)
        for t in range(1, n + 1):
            if n % t == 0 and cycle[:t] * (n // t) == cycle:
                cycle = cycle[:t]
                break
        while len(prefix) > 1 and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        return cls(prefix, cycle)

    @classmethod
    def parse(cls, text: str, params: TreeParams | None = None) -> "BoundaryPoint":
        head, sep, tail = text.partition("/")
        if not sep or not (tail.startswith("(") and tail.endswith(")")):
            raise FormatError(f"boundary point must look like 'prefix/(cycle)', got {text!r}")
        prefix = parse_address(head)
        cycle = parse_address(tail[1:-1])
        p = cls.make(prefix, cycle)
        if params is not None:
            p.check(params)
        return p

    def check(self, params: TreeParams) -> None:
        params.check_address(self.prefix)
        if any(not 0 <= c < params.d for c in self.cycle):
            raise FormatError(f"digit out of range in cycle of {self}")

    def digits(self, n: int) -> Address:
        """The first ``n`` digits of the ray."""
        out = list(self.prefix[:n])
        i = 0
        while len(out) < n:
            out.append(self.cycle[i % len(self.cycle)])
            i += 1
        return tuple(out)

    def shifted(self, new_head: Address, drop: int) -> "BoundaryPoint":
        """Replace the first ``drop`` digits by ``new_head``."""
        if drop <= len(self.prefix):
            return BoundaryPoint.make(new_head + self.prefix[drop:], self.cycle)
        j = (drop - len(self.prefix)) % len(self.cycle)
        return BoundaryPoint.make(new_head, self.cycle[j:] + self.cycle[:j])

    def __str__(self) -> str:
        return f"{format_address(self.prefix)}/({format_address(self.cycle)})"


def _leaf_below(p: TreePair, point: BoundaryPoint) -> Address:
    depth = max(len(x) for x in p.domain.leaves)
    word = point.digits(depth)
    leaves = p.domain.leaf_set
    for i in range(1, depth + 1):
        if word[:i] in leaves:
            return word[:i]
    raise AssertionError("complete tree misses a ray")


def act_point(g: Element | TreePair, point: BoundaryPoint) -> BoundaryPoint:
    p = g.pair if isinstance(g, Element) else g
    x = _leaf_below(p, point)
    return point.shifted(p.forward[x], len(x))


@dataclass(frozen=True)
class PointClass:
    kind: str  # attracting | repelling | stable | wandering
    period: int | None = None
    length: int | None = None

    def __str__(self) -> str:
        if self.kind == "wandering":
            return "Wandering"
        if self.kind == "stable":
            return f"Stable{{period {self.period}}}"
        return f"{self.kind.capitalize()}{{period {self.period}, length {self.length}}}"


WANDERING = PointClass("wandering")


@lru_cache(maxsize=8192)
def revealing_pair(g: Element) -> TreePair:
    """Cached ``make_revealing``."""
    return make_revealing(g)


def _chain_index(p: TreePair) -> dict[Address, MaximalChain]:
    out = {}
    for c in chains(p):
        if c.kind is ChainKind.PERIODIC:
            members = c.vertices
        else:
            members = c.vertices[:-1]
        for v in members:
            out[v] = c
    return out


def classify_point(g: Element, point: BoundaryPoint) -> PointClass:
    p = revealing_pair(g)
    v = _leaf_below(p, point)
    chain = _chain_index(p)[v]
    if chain.kind is ChainKind.PERIODIC:
        return PointClass("stable", period=chain.period)
    if chain.kind is ChainKind.WANDERING:
        return WANDERING
    if chain.kind is ChainKind.OTHER:
        raise AssertionError("revealing pair has a chain of kind other")
    spine = chain.spine
    if BoundaryPoint.make(v, spine) == point:
        kind = "attracting" if chain.kind is ChainKind.ATTRACTOR else "repelling"
        return PointClass(kind, chain.period, len(spine))
    return WANDERING


@dataclass(frozen=True)
class PeriodicPoint:
    point: BoundaryPoint
    period: int
    length: int

    def to_json(self) -> dict:
        return {"point": str(self.point), "period": self.period, "length": self.length}


@dataclass(frozen=True)
class DynamicsReport:
    attractors: tuple[PeriodicPoint, ...]
    repellers: tuple[PeriodicPoint, ...]
    stable_region: ClopenSet
    wandering_region_closure: ClopenSet
    support_full: bool

    def attractor_data(self) -> Counter:
        return Counter((a.period, a.length) for a in self.attractors)

    def repeller_data(self) -> Counter:
        return Counter((a.period, a.length) for a in self.repellers)

    def to_json(self) -> dict:
        return {
            "attractors": [a.to_json() for a in self.attractors],
            "repellers": [r.to_json() for r in self.repellers],
            "stable_region": [format_address(b) for b in self.stable_region.balls],
            "wandering_region_closure": [
                format_address(b) for b in self.wandering_region_closure.balls],
            "support_full": self.support_full,
        }


def _point_key(a: BoundaryPoint):
    return (len(a.prefix), a.prefix, a.cycle)


def _orbit_representative(p: TreePair, point: BoundaryPoint, period: int) -> BoundaryPoint:
    """The least point, in (prefix length, prefix, cycle) order, of a periodic orbit."""
    best = q = point
    for _ in range(period - 1):
        q = act_point(p, q)
        best = min(best, q, key=_point_key)
    return best


def dynamics_report(g: Element) -> DynamicsReport:
    """Periodic points are listed once per orbit, by the orbit's least point."""
    p = revealing_pair(g)
    attractors, repellers, stable = [], [], []
    fixed_leaf = False
    for c in chains(p):
        if c.kind is ChainKind.ATTRACTOR:
            pt = _orbit_representative(p, BoundaryPoint.make(c.first, c.spine), c.period)
            attractors.append(PeriodicPoint(pt, c.period, len(c.spine)))
        elif c.kind is ChainKind.REPELLER:
            pt = _orbit_representative(p, BoundaryPoint.make(c.last, c.spine), c.period)
            repellers.append(PeriodicPoint(pt, c.period, len(c.spine)))
        elif c.kind is ChainKind.PERIODIC:
            stable.extend(c.vertices)
            fixed_leaf = fixed_leaf or c.period == 1
    region = ClopenSet.from_balls(g.params, stable)
    key = lambda a: _point_key(a.point)
    return DynamicsReport(
        tuple(sorted(attractors, key=key)),
        tuple(sorted(repellers, key=key)),
        region,
        region.complement(),
        not fixed_leaf,
    )


def is_elliptic(g: Element) -> bool:
    return all(c.kind is ChainKind.PERIODIC for c in chains(revealing_pair(g)))


def is_hyperbolic(g: Element) -> bool:
    if g.is_identity:
        return False
    return all(c.period == 1 for c in chains(revealing_pair(g)) if c.kind is ChainKind.PERIODIC)


def support_is_full(g: Element) -> bool:
    return dynamics_report(g).support_full


def eh_decompose(g: Element) -> tuple[Element, Element]:
    """``(g_e, g_h)`` with ``g = g_e g_h``: the elliptic part moves only the periodic balls."""
    p = revealing_pair(g)
    periodic = set()
    for c in chains(p):
        if c.kind is ChainKind.PERIODIC:
            periodic.update(c.vertices)
    fwd = p.forward
    ell = {x: (fwd[x] if x in periodic else x) for x in p.domain.leaves}
    hyp = {x: (x if x in periodic else fwd[x]) for x in p.domain.leaves}
    g_e = canonicalize(TreePair._from_dict(g.params, ell))
    g_h = canonicalize(TreePair._from_dict(g.params, hyp))
    return g_e, g_h
