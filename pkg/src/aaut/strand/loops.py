"""Loop inventory, normalized weightings and the diagram-to-tree-pair construction."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..element import TreePair
from ..tree import CompleteTree, TreeParams, shortlex
from .diagram import MERGE, SPLIT, DiagramError, Edge, StrandDiagram
from .iso import is_coboundary


class NotReduced(DiagramError):
    pass


class NotAdmissible(DiagramError):
    pass


@dataclass(frozen=True)
class DiagramLoop:
    kind: str  # "split" | "merge" | "free"
    length: int
    class_value: int
    vertices: tuple[int, ...] = ()
    edges: tuple[int, ...] = ()


def _successor_edges(dgm: StrandDiagram) -> tuple[dict[int, int], dict[int, int]]:
    """The in-edge of every split and the out-edge of every merge."""
    for e in dgm.edges.values():
        if dgm.kinds[e.src] == MERGE and dgm.kinds[e.dst] == SPLIT:
            raise NotReduced("diagram has a merge-to-split edge")
    split_in = {v: dgm.ins[v][0] for v, k in dgm.kinds.items() if k == SPLIT}
    merge_out = {v: dgm.outs[v][0] for v, k in dgm.kinds.items() if k == MERGE}
    return split_in, merge_out


def _cycles(step: dict[int, int]) -> list[list[int]]:
    """Cycles of a functional graph, each starting at its least vertex."""
    state, out = {}, []
    for start in sorted(step):
        path = []
        v = start
        while v not in state:
            state[v] = start
            path.append(v)
            v = step[v]
        if state[v] == start:
            cyc = path[path.index(v):]
            i = cyc.index(min(cyc))
            out.append(cyc[i:] + cyc[:i])
    return out


def loops(dgm: StrandDiagram) -> list[DiagramLoop]:
    split_in, merge_out = _successor_edges(dgm)
    out = []
    pred = {v: dgm.edges[e].src for v, e in split_in.items()}
    for cyc in _cycles(pred):
        # the cycle follows predecessors; report it in edge direction
        cyc = [cyc[0]] + cyc[:0:-1]
        edges = tuple(split_in[cyc[(i + 1) % len(cyc)]] for i in range(len(cyc)))
        out.append(DiagramLoop(SPLIT, len(cyc), sum(dgm.edges[e].gamma for e in edges),
                               tuple(cyc), edges))
    succ = {v: dgm.edges[e].dst for v, e in merge_out.items()}
    for cyc in _cycles(succ):
        edges = tuple(merge_out[v] for v in cyc)
        out.append(DiagramLoop(MERGE, len(cyc), sum(dgm.edges[e].gamma for e in edges),
                               tuple(cyc), edges))
    for value in sorted(dgm.free_loops):
        out.append(DiagramLoop("free", 0, value))
    return out


@dataclass(frozen=True)
class DiagramDynamics:
    attractors: Counter  # (length, period) -> count
    repellers: Counter
    stable_ball_residue: int
    component_count: int

    def to_json(self) -> dict:
        def flat(c):
            return [{"length": l, "period": p} for (l, p), n in sorted(c.items()) for _ in range(n)]
        return {
            "attractors": flat(self.attractors),
            "repellers": flat(self.repellers),
            "stable_ball_residue": self.stable_ball_residue,
            "component_count": self.component_count,
        }


def dynamics_from_diagram(dgm: StrandDiagram) -> DiagramDynamics:
    """Merge loops give attractors, split loops repellers, free loops the stable residue."""
    att, rep = Counter(), Counter()
    for lp in loops(dgm):
        if lp.kind == MERGE:
            att[(lp.length, lp.class_value)] += 1
        elif lp.kind == SPLIT:
            rep[(lp.length, lp.class_value)] += 1
    residue = sum(dgm.free_loops) % (dgm.d - 1)
    return DiagramDynamics(att, rep, residue, len(dgm.components()) + len(dgm.free_loops))


def admissible_representative(dgm: StrandDiagram) -> StrandDiagram:
    """A cohomologous weighting in normal form.

    Loop edges carry the loop value on a single edge (the one entering the least
    vertex), split in-edges and merge out-edges off the loops are 0, edges from
    splits to merges are non-negative with the least one out of each split
    basin at 0 (raised again if needed so the total is at least k).
    """
    d, k = dgm.d, dgm.k
    if any(v <= 0 for v in dgm.free_loops):
        raise NotAdmissible("free loop with non-positive value")
    total = dgm.total_gamma()
    if (total - k) % (d - 1):
        raise NotAdmissible(f"total weight {total} is not congruent to k={k} mod {d - 1}")
    if not dgm.kinds:
        return dgm
    split_in, merge_out = _successor_edges(dgm)
    lps = [lp for lp in loops(dgm) if lp.kind != "free"]
    if any(lp.class_value <= 0 for lp in lps):
        raise NotAdmissible("a directed loop has non-positive value")
    edges = dgm.edges
    phi: dict[int, int] = {}
    basin: dict[int, int] = {}
    for idx, lp in enumerate(lps):
        cyc = lp.vertices
        phi[cyc[0]] = 0
        basin[cyc[0]] = idx
        for i in range(len(cyc) - 1):
            e = edges[lp.edges[i]]
            # zero on this loop edge: phi(dst) = phi(src) - gamma
            phi[cyc[i + 1]] = phi[cyc[i]] - e.gamma
            basin[cyc[i + 1]] = idx
    # trees hanging off the loops
    for v in dgm.kinds:
        chain = []
        u = v
        while u not in phi:
            chain.append(u)
            e = edges[split_in[u]] if dgm.kinds[u] == SPLIT else edges[merge_out[u]]
            u = e.src if dgm.kinds[u] == SPLIT else e.dst
        for w in reversed(chain):
            if dgm.kinds[w] == SPLIT:
                e = edges[split_in[w]]
                phi[w] = phi[e.src] - e.gamma
                basin[w] = basin[e.src]
            else:
                e = edges[merge_out[w]]
                phi[w] = phi[e.dst] + e.gamma
                basin[w] = basin[e.dst]

    def weights(shift: dict[int, int]) -> dict[int, int]:
        return {eid: e.gamma + (phi[e.dst] + shift.get(basin[e.dst], 0))
                - (phi[e.src] + shift.get(basin[e.src], 0)) for eid, e in edges.items()}

    shift = {}
    gamma = weights(shift)
    # move each split basin's potential so its least edge into a merge is 0
    for idx, lp in enumerate(lps):
        if lp.kind != SPLIT:
            continue
        shift[idx] = min((gamma[eid] for eid, e in edges.items()
                          if basin[e.src] == idx and dgm.kinds[e.dst] == MERGE), default=0)
    gamma = weights(shift)
    first_split = next(i for i, lp in enumerate(lps) if lp.kind == SPLIT)
    while sum(gamma.values()) + sum(dgm.free_loops) < k:
        shift[first_split] = shift.get(first_split, 0) - 1
        gamma = weights(shift)
    out = dgm.with_gamma(gamma)
    if any(v < 0 for v in gamma.values()):
        raise AssertionError("normalized weighting has a negative edge")
    if not is_coboundary(dgm, {eid: gamma[eid] - e.gamma for eid, e in edges.items()}):
        raise AssertionError("normalization changed the cutting class")
    return out


def _left_comb(params: TreeParams, n: int) -> list:
    tree = CompleteTree.root_caret(params)
    while len(tree) < n:
        tree = tree.expand(tree.leaves[0])
    if len(tree) != n:
        raise NotAdmissible(f"no complete tree with {n} leaves")
    return list(tree.leaves)


def diagram_to_revealing_pair(dgm: StrandDiagram, params: TreeParams) -> TreePair:
    """Rebuild a revealing pair whose basic diagram reduces back to ``dgm``.

    Every edge is cut gamma(e) times (free loops once per unit of value); the
    cut points become the leaves of a left-combed tree glued in forwards above
    the splits and backwards below the merges, and the pieces running from a
    split side to a merge side become the leaf pairs.
    """
    if params.d != dgm.d:
        raise DiagramError(f"diagram has degree {dgm.d}, parameters have d={params.d}")
    dgm = StrandDiagram(dgm.d, params.k, dgm.kinds, dgm.edges, dgm.free_loops, dgm.arities)
    if not dgm.kinds:
        free = sorted(dgm.free_loops)
        if (sum(free) - params.k) % (params.d - 1):
            raise NotAdmissible("free loop total is not congruent to k")
        # a loop of value v stands for d loops of value v after a Type III reduction
        while sum(free) < params.k:
            if not free:
                raise NotAdmissible("empty diagram")
            v = free.pop(0)
            free = sorted(free + [v] * params.d)
        dgm = StrandDiagram(dgm.d, params.k, {}, {}, tuple(free))
    dgm = admissible_representative(dgm)
    edges = dgm.edges
    cuts = []  # segment starting at each cut point, in order
    for eid in sorted(edges):
        for j in range(1, edges[eid].gamma + 1):
            cuts.append(("e", eid, j))
    for li, value in enumerate(dgm.free_loops):
        for j in range(value):
            cuts.append(("L", li, j))
    tree_leaves = _left_comb(params, len(cuts))

    def seg_end_is_cut(seg) -> bool:
        if seg[0] == "L":
            return True
        return seg[2] < edges[seg[1]].gamma

    def seg_start_is_cut(seg) -> bool:
        return seg[0] == "L" or seg[2] > 0

    dom, ran = {}, {}

    def forward(seg, addr):
        stack = [(seg, addr)]
        while stack:
            seg, addr = stack.pop()
            if seg_end_is_cut(seg) or dgm.kinds[edges[seg[1]].dst] == MERGE:
                dom[seg] = addr
                continue
            s = edges[seg[1]].dst
            for i, eid in enumerate(dgm.outs[s]):
                stack.append((("e", eid, 0), addr + (i,)))

    def backward(seg, addr):
        stack = [(seg, addr)]
        while stack:
            seg, addr = stack.pop()
            if seg_start_is_cut(seg) or dgm.kinds[edges[seg[1]].src] == SPLIT:
                ran[seg] = addr
                continue
            m = edges[seg[1]].src
            for i, eid in enumerate(dgm.ins[m]):
                stack.append((("e", eid, edges[eid].gamma), addr + (i,)))

    for leaf, cut in zip(tree_leaves, cuts):
        forward(cut, leaf)
        kind, ident, j = cut
        if kind == "L":
            prev = (kind, ident, (j - 1) % dgm.free_loops[ident])
        else:
            prev = (kind, ident, j - 1)
        backward(prev, leaf)
    if set(dom) != set(ran):
        raise AssertionError("forward and backward resolutions disagree")
    mapping = {dom[seg]: ran[seg] for seg in dom}
    return TreePair.from_mapping(params, mapping)


def translation_diagram(d: int, n: int, k: int | None = None) -> StrandDiagram:
    """The length-n translation diagram: one split loop and one merge loop of n vertices.

    Split i sends its loop edge out of slot 0 and its other d-1 edges to merge i,
    which takes the merge-loop edge in slot 0.  Weight 1 sits on the first edge
    of each loop.
    """
    kinds = {i: SPLIT for i in range(n)} | {n + i: MERGE for i in range(n)}
    edges = {}
    for i in range(n):
        edges[len(edges)] = Edge(i, (i + 1) % n, 1 if i == 0 else 0, 0, 0)
        edges[len(edges)] = Edge(n + i, n + (i + 1) % n, 1 if i == 0 else 0, 0, 0)
        for j in range(1, d):
            edges[len(edges)] = Edge(i, n + i, 0, j, j)
    return StrandDiagram(d, k if k is not None else d + 1, kinds, edges)


def is_autT_translation_diagram(dgm: StrandDiagram) -> int | None:
    """Translation length n if ``dgm`` has the shape and class of a tree translation."""
    if dgm.free_loops or not dgm.kinds:
        return None
    try:
        lps = loops(dgm)
    except NotReduced:
        return None
    splits = [lp for lp in lps if lp.kind == SPLIT]
    merges = [lp for lp in lps if lp.kind == MERGE]
    if len(splits) != 1 or len(merges) != 1:
        return None
    sl, ml = splits[0], merges[0]
    n = sl.length
    if ml.length != n or len(dgm.kinds) != 2 * n:
        return None
    on_loop = set(sl.edges)
    partner = {}
    for s in sl.vertices:
        targets = {dgm.edges[e].dst for e in dgm.outs[s] if e not in on_loop}
        if len(targets) != 1:
            return None
        m = targets.pop()
        if dgm.kinds[m] != MERGE or m in partner.values():
            return None
        partner[s] = m
    succ = {v: dgm.edges[e].dst for v, e in zip(ml.vertices, ml.edges)}
    for i, s in enumerate(sl.vertices):
        nxt = sl.vertices[(i + 1) % n]
        if succ[partner[s]] != partner[nxt]:
            return None
    s0 = sl.vertices[0]
    e1 = sl.edges[0]  # leaves s0 along the loop
    f1 = dgm.outs[partner[s0]][0]
    ref = {eid: (1 if eid in (e1, f1) else 0) for eid in dgm.edges}
    delta = {eid: e.gamma - ref[eid] for eid, e in dgm.edges.items()}
    return n if is_coboundary(dgm, delta) else None
