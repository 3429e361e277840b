"""Basic diagrams of tree pairs and the Type I, I*, II, III rewriting rules."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..element import TreePair
from ..tree import ROOT, shortlex
from .diagram import MERGE, SPLIT, Edge, StrandDiagram


class _Work:
    """Mutable diagram with slot incidence kept in sync."""

    def __init__(self, dgm: StrandDiagram):
        self.d = dgm.d
        self.k = dgm.k
        self.kinds = dict(dgm.kinds)
        self.arities = dict(dgm.arities)
        self.edges = dict(dgm.edges)
        self.free = list(dgm.free_loops)
        self.next_edge = max(self.edges, default=-1) + 1
        self.outs = {v: dict() for v in self.kinds}
        self.ins = {v: dict() for v in self.kinds}
        for eid, e in self.edges.items():
            self.outs[e.src][e.src_slot] = eid
            self.ins[e.dst][e.dst_slot] = eid

    def arity(self, v: int) -> int:
        return self.arities.get(v, self.d)

    def add_edge(self, e: Edge) -> int:
        eid = self.next_edge
        self.next_edge += 1
        self.edges[eid] = e
        self.outs[e.src][e.src_slot] = eid
        self.ins[e.dst][e.dst_slot] = eid
        return eid

    def drop_edge(self, eid: int) -> Edge:
        e = self.edges.pop(eid)
        if self.outs.get(e.src, {}).get(e.src_slot) == eid:
            del self.outs[e.src][e.src_slot]
        if self.ins.get(e.dst, {}).get(e.dst_slot) == eid:
            del self.ins[e.dst][e.dst_slot]
        return e

    def drop_vertex(self, v: int) -> None:
        del self.kinds[v]
        self.arities.pop(v, None)
        del self.outs[v]
        del self.ins[v]

    def freeze(self) -> StrandDiagram:
        return StrandDiagram(self.d, self.k, dict(self.kinds), dict(self.edges),
                             tuple(sorted(self.free)), dict(self.arities))

    # -- Type II -------------------------------------------------------------

    def type_ii_edges(self) -> list[int]:
        return sorted(eid for eid, e in self.edges.items()
                      if self.kinds[e.src] == MERGE and self.kinds[e.dst] == SPLIT)

    def type_ii(self, eid: int) -> None:
        """Erase the merge-to-split edge ``eid`` with its endpoints.

        Strands are chained through the removed pair: the strand entering the
        merge at slot i continues out of the split at slot i.  Chains that
        close up become free loops; every edge is counted once per pass.
        """
        e = self.edges[eid]
        m, s = e.src, e.dst
        a = self.arity(m)
        ins_m = [self.ins[m][i] for i in range(a)]
        outs_s = [self.outs[s][i] for i in range(a)]
        ge = e.gamma
        edges = self.edges
        internal = {f for f in outs_s if edges[f].dst == m}
        new_edges, loops, used = [], [], set()
        for i in range(a):
            f = ins_m[i]
            if f in internal:
                continue
            head = edges[f]
            value = head.gamma
            j = i
            while True:
                g = edges[outs_s[j]]
                value += ge + g.gamma
                if outs_s[j] in internal:
                    used.add(outs_s[j])
                    j = g.dst_slot
                    continue
                new_edges.append(Edge(head.src, g.dst, value, head.src_slot, g.dst_slot))
                break
        for i in range(a):
            start = outs_s[i]
            if start not in internal or start in used:
                continue
            value, j = 0, i
            while True:
                g = outs_s[j]
                used.add(g)
                value += ge + edges[g].gamma
                j = edges[g].dst_slot
                if j == i:
                    break
            loops.append(value)
        for f in set(ins_m) | set(outs_s) | {eid}:
            self.drop_edge(f)
        self.drop_vertex(m)
        self.drop_vertex(s)
        for ne in new_edges:
            self.add_edge(ne)
        self.free.extend(loops)

    # -- Types I and I* ------------------------------------------------------

    def type_i_star_splits(self, strict: bool = False) -> list[int]:
        out = []
        for s, kind in self.kinds.items():
            if kind != SPLIT:
                continue
            outs = [self.edges[self.outs[s][i]] for i in range(self.arity(s))]
            m = outs[0].dst
            if self.kinds[m] != MERGE or self.arity(m) != len(outs):
                continue
            if any(f.dst != m or f.gamma != outs[0].gamma for f in outs):
                continue
            if strict and any(f.dst_slot != i for i, f in enumerate(outs)):
                continue
            out.append(s)
        return sorted(out)

    def type_i_star(self, s: int) -> None:
        first = self.edges[self.outs[s][0]]
        m = first.dst
        e_s = self.ins[s][0]
        e_m = self.outs[m][0]
        parallel = [self.outs[s][i] for i in range(self.arity(s))]
        if e_s == e_m:
            self.free.append(self.edges[e_s].gamma + first.gamma)
            replacement = None
        else:
            a, b = self.edges[e_s], self.edges[e_m]
            replacement = Edge(a.src, b.dst, a.gamma + b.gamma + first.gamma, a.src_slot, b.dst_slot)
        for f in set(parallel) | {e_s, e_m}:
            self.drop_edge(f)
        self.drop_vertex(s)
        self.drop_vertex(m)
        if replacement is not None:
            self.add_edge(replacement)

    # -- Type III ------------------------------------------------------------

    def type_iii_values(self) -> list[int]:
        counts = Counter(self.free)
        return sorted(v for v, c in counts.items() if c >= self.d)

    def type_iii(self, value: int) -> None:
        for _ in range(self.d - 1):
            self.free.remove(value)


def basic_diagram(p: TreePair) -> StrandDiagram:
    """Strand diagram of a tree pair, with the shared hourglass already reduced.

    Splits are the carets of the domain tree, merges those of the range tree,
    each leaf x is joined to kappa(x), and the range root feeds the domain root
    through an edge of weight 1.  The shared carets are then removed by Type II
    reductions from the root outwards.
    """
    params = p.params
    d, k = params.d, params.k
    splits = sorted(p.domain.internal, key=shortlex)
    merges = sorted(p.range.internal, key=shortlex)
    sid = {v: i for i, v in enumerate(splits)}
    mid = {v: len(splits) + i for i, v in enumerate(merges)}
    kinds = {i: SPLIT for i in sid.values()} | {i: MERGE for i in mid.values()}
    arities = {sid[ROOT]: k, mid[ROOT]: k}
    edges = {}

    def add(e: Edge):
        edges[len(edges)] = e

    for v in splits:
        if v:
            add(Edge(sid[v[:-1]], sid[v], 0, v[-1], 0))
    for w in merges:
        if w:
            add(Edge(mid[w], mid[w[:-1]], 0, 0, w[-1]))
    for x, y in p.mapping:
        add(Edge(sid[x[:-1]], mid[y[:-1]], 0, x[-1], y[-1]))
    add(Edge(mid[ROOT], sid[ROOT], 1, 0, 0))

    work = _Work(StrandDiagram(d, k, kinds, edges, (), arities))
    shared = sorted(p.domain.internal & p.range.internal, key=shortlex)
    for v in shared:
        m, s = mid[v], sid[v]
        eid = work.outs[m][0]
        if work.edges[eid].dst != s:
            raise AssertionError(f"hourglass at {v} is not a merge-to-split edge")
        work.type_ii(eid)
    return work.freeze()


@dataclass(frozen=True)
class Move:
    rule: str  # "I", "I*", "II", "III"
    target: int


def available_moves(dgm: StrandDiagram, rules=("I", "II", "III")) -> list[Move]:
    return _moves(_Work(dgm), rules)


def _moves(work: _Work, rules) -> list[Move]:
    out = []
    if "II" in rules:
        out += [Move("II", e) for e in work.type_ii_edges()]
    if "I" in rules and "I*" not in rules:
        out += [Move("I", s) for s in work.type_i_star_splits(strict=True)]
    if "I*" in rules:
        out += [Move("I*", s) for s in work.type_i_star_splits()]
    if "III" in rules:
        out += [Move("III", v) for v in work.type_iii_values()]
    return out


def _apply(work: _Work, move: Move) -> None:
    if move.rule == "II":
        work.type_ii(move.target)
    elif move.rule in ("I", "I*"):
        work.type_i_star(move.target)
    else:
        work.type_iii(move.target)


def apply_move(dgm: StrandDiagram, move: Move) -> StrandDiagram:
    work = _Work(dgm)
    _apply(work, move)
    return work.freeze()


def _exhaust(work: _Work, rules, rng=None) -> None:
    while True:
        moves = _moves(work, rules)
        if not moves:
            return
        move = moves[int(rng.integers(len(moves)))] if rng is not None else moves[0]
        _apply(work, move)


def reduce(dgm: StrandDiagram, rng=None) -> StrandDiagram:
    """Apply Type I, II and III reductions until none applies.

    With ``rng`` (a numpy Generator) each step picks a uniformly random
    available reduction, otherwise the first one in a fixed order.
    """
    work = _Work(dgm)
    _exhaust(work, ("I", "II", "III"), rng)
    return work.freeze()


def star_reduce(dgm: StrandDiagram) -> StrandDiagram:
    """Type II reductions, then Type I*, then Type III, each until exhausted."""
    work = _Work(dgm)
    for rule in ("II", "I*", "III"):
        _exhaust(work, (rule,))
    if _moves(work, ("II", "I*", "III")):
        raise AssertionError("star reduction left an applicable move")
    return work.freeze()


def is_reduced(dgm: StrandDiagram, rules=("I", "II", "III")) -> bool:
    return not available_moves(dgm, rules)
