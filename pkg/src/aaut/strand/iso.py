"""Isomorphism of strand diagrams, with or without the rotation system.

An isomorphism must match vertex kinds and edges, and carry the cutting class
of one diagram to the other: the difference of the two weightings has to be a
coboundary, which is checked with spanning-tree potentials.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .diagram import SPLIT, Edge, StrandDiagram


@dataclass(frozen=True)
class DiagramIso:
    vertices: dict[int, int]
    edges: dict[int, int]

    def to_json(self) -> list:
        return [[a, b] for a, b in sorted(self.vertices.items())]


def potentials(dgm: StrandDiagram, delta: dict[int, int]) -> dict[int, int] | None:
    """Vertex potentials phi with delta(e) = phi(dst) - phi(src), or None if delta is no coboundary."""
    adj = defaultdict(list)
    for eid, e in dgm.edges.items():
        adj[e.src].append((e.dst, delta[eid]))
        adj[e.dst].append((e.src, -delta[eid]))
    phi = {}
    for root in sorted(dgm.kinds):
        if root in phi:
            continue
        phi[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for w, dv in adj[u]:
                if w not in phi:
                    phi[w] = phi[u] + dv
                    stack.append(w)
    for eid, e in dgm.edges.items():
        if phi[e.dst] - phi[e.src] != delta[eid]:
            return None
    return phi


def is_coboundary(dgm: StrandDiagram, delta: dict[int, int]) -> bool:
    return potentials(dgm, delta) is not None


def _color_refine(dgm: StrandDiagram) -> dict[int, int]:
    """Colour refinement on the directed multigraph; only used for pruning."""
    colors = {v: (0 if k == SPLIT else 1) for v, k in dgm.kinds.items()}
    for _ in range(len(colors)):
        sig = {}
        for v in dgm.kinds:
            outs = sorted(colors[dgm.edges[e].dst] for e in dgm.outs[v])
            ins = sorted(colors[dgm.edges[e].src] for e in dgm.ins[v])
            loops = sum(1 for e in dgm.outs[v] if dgm.edges[e].dst == v)
            sig[v] = (colors[v], tuple(outs), tuple(ins), loops)
        palette = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: palette[sig[v]] for v in dgm.kinds}
        if len(set(new.values())) == len(set(colors.values())):
            colors = new
            break
        colors = new
    return colors


def _joint_colors(a: StrandDiagram, b: StrandDiagram) -> tuple[dict, dict]:
    # refine both diagrams in one palette so colours are comparable
    shift = max(list(a.kinds) + [-1]) + 1
    kinds = dict(a.kinds)
    edges = dict(a.edges)
    kinds.update({v + shift: k for v, k in b.kinds.items()})
    eshift = max(list(a.edges) + [-1]) + 1
    edges.update({eid + eshift: Edge(e.src + shift, e.dst + shift, e.gamma, e.src_slot, e.dst_slot)
                  for eid, e in b.edges.items()})
    arities = dict(a.arities) | {v + shift: x for v, x in b.arities.items()}
    joint = StrandDiagram(a.d, a.k, kinds, edges, (), arities)
    colors = _color_refine(joint)
    return ({v: colors[v] for v in a.kinds}, {v: colors[v + shift] for v in b.kinds})


def iso(a: StrandDiagram, b: StrandDiagram, respect_rotation: bool = True) -> DiagramIso | None:
    if a.d != b.d or len(a.kinds) != len(b.kinds) or len(a.edges) != len(b.edges):
        return None
    if Counter(a.free_loops) != Counter(b.free_loops):
        return None
    if Counter(a.kinds.values()) != Counter(b.kinds.values()):
        return None
    ca, cb = _joint_colors(a, b)
    if Counter(ca.values()) != Counter(cb.values()):
        return None
    comps_a = a.components()
    comps_b = b.components()
    if sorted(map(len, comps_a)) != sorted(map(len, comps_b)):
        return None
    used = [False] * len(comps_b)
    vmap, emap = {}, {}

    def match(i: int) -> bool:
        if i == len(comps_a):
            return True
        for j, comp in enumerate(comps_b):
            if used[j] or len(comp) != len(comps_a[i]):
                continue
            found = _component_iso(a, comps_a[i], b, comp, ca, cb, respect_rotation)
            if found is None:
                continue
            used[j] = True
            vmap.update(found[0])
            emap.update(found[1])
            if match(i + 1):
                return True
            used[j] = False
            for v in found[0]:
                del vmap[v]
            for e in found[1]:
                del emap[e]
        return False

    if not match(0):
        return None
    return DiagramIso(vmap, emap)


def _component_iso(a, comp_a, b, comp_b, ca, cb, respect_rotation):
    root = min(comp_a, key=lambda v: (sum(cb[w] == ca[v] for w in comp_b), v))
    candidates = [w for w in comp_b if cb[w] == ca[root] and b.kinds[w] == a.kinds[root]]
    for w in candidates:
        if respect_rotation:
            found = _propagate_rotation(a, b, root, w)
            if found is not None and _class_matches(a, comp_a, b, found[1]):
                return found
        else:
            for found in _search_free(a, comp_a, b, comp_b, ca, cb, root, w):
                return found
    return None


def _propagate_rotation(a, b, va, vb):
    """The unique rotation-preserving map sending va to vb, if consistent."""
    vmap = {va: vb}
    inv = {vb: va}
    emap = {}
    stack = [va]
    while stack:
        u = stack.pop()
        w = vmap[u]
        for side in ("outs", "ins"):
            la, lb = getattr(a, side)[u], getattr(b, side)[w]
            if len(la) != len(lb):
                return None
            for ea, eb in zip(la, lb):
                if ea in emap:
                    if emap[ea] != eb:
                        return None
                    continue
                emap[ea] = eb
                xa, xb = a.edges[ea], b.edges[eb]
                if (xa.src_slot, xa.dst_slot) != (xb.src_slot, xb.dst_slot):
                    return None
                for pa, pb in ((xa.src, xb.src), (xa.dst, xb.dst)):
                    if pa in vmap:
                        if vmap[pa] != pb:
                            return None
                    else:
                        if pb in inv or a.kinds[pa] != b.kinds[pb]:
                            return None
                        vmap[pa] = pb
                        inv[pb] = pa
                        stack.append(pa)
    if len(set(emap.values())) != len(emap):
        return None
    return vmap, emap


def _class_matches(a, comp_a, b, emap) -> bool:
    delta = {eid: b.edges[emap[eid]].gamma - a.edges[eid].gamma for eid in emap}
    comp = set(comp_a)
    sub = StrandDiagram(a.d, a.k, {v: a.kinds[v] for v in comp},
                        {eid: a.edges[eid] for eid in emap}, (), dict(a.arities))
    return is_coboundary(sub, delta)


def _groups(dgm: StrandDiagram, comp) -> dict[tuple[int, int], list[int]]:
    out = defaultdict(list)
    comp = set(comp)
    for eid, e in dgm.edges.items():
        if e.src in comp:
            out[(e.src, e.dst)].append(eid)
    return out


def _search_free(a, comp_a, b, comp_b, ca, cb, root, target):
    """Yield rotation-free isomorphisms of one component extending root -> target."""
    groups_a = _groups(a, comp_a)
    groups_b = _groups(b, comp_b)
    nbrs_a = defaultdict(set)
    for (u, v) in groups_a:
        nbrs_a[u].add(v)
        nbrs_a[v].add(u)
    nbrs_b = defaultdict(set)
    for (u, v) in groups_b:
        nbrs_b[u].add(v)
        nbrs_b[v].add(u)
    # BFS order so every later vertex has an already-placed neighbour
    order, parent = [root], {root: None}
    for u in order:
        for v in sorted(nbrs_a[u]):
            if v not in parent:
                parent[v] = u
                order.append(v)

    def count(groups, u, v):
        return len(groups.get((u, v), ()))

    vmap, inv = {}, {}

    def consistent(v, w) -> bool:
        if a.kinds[v] != b.kinds[w] or ca[v] != cb[w]:
            return False
        if count(groups_a, v, v) != count(groups_b, w, w):
            return False
        for u in nbrs_a[v]:
            if u in vmap:
                x = vmap[u]
                if count(groups_a, v, u) != count(groups_b, w, x) or \
                        count(groups_a, u, v) != count(groups_b, x, w):
                    return False
        return True

    def rec(i):
        if i == len(order):
            result = _edges_for(a, groups_a, b, groups_b, vmap)
            if result is not None:
                yield dict(vmap), result
            return
        v = order[i]
        if i == 0:
            cands = [target]
        else:
            cands = sorted(nbrs_b[vmap[parent[v]]])
        for w in cands:
            if w in inv or not consistent(v, w):
                continue
            vmap[v] = w
            inv[w] = v
            yield from rec(i + 1)
            del vmap[v]
            del inv[w]

    yield from rec(0)


def _edges_for(a, groups_a, b, groups_b, vmap):
    """Edge bijection for a vertex map, chosen so the weight difference can be a coboundary."""
    emap, delta = {}, {}
    for (u, v), ea in groups_a.items():
        eb = groups_b.get((vmap[u], vmap[v]), [])
        if len(ea) != len(eb):
            return None
        sa = sorted(ea, key=lambda e: (a.edges[e].gamma, e))
        sb = sorted(eb, key=lambda e: (b.edges[e].gamma, e))
        shift = b.edges[sb[0]].gamma - a.edges[sa[0]].gamma
        for x, y in zip(sa, sb):
            if b.edges[y].gamma - a.edges[x].gamma != shift:
                return None
            emap[x] = y
            delta[x] = shift
    if any(delta[e] != 0 for (u, v), es in groups_a.items() if u == v for e in es):
        return None
    comp = {u for pair in groups_a for u in pair}
    sub = StrandDiagram(a.d, a.k, {v: a.kinds[v] for v in comp},
                        {e: a.edges[e] for e in emap}, (), dict(a.arities))
    if not is_coboundary(sub, delta):
        return None
    return emap
