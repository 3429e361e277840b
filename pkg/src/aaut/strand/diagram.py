"""Closed strand diagrams with a rotation system and an integer edge weighting.

Vertices are splits (one edge in, ``d`` out) or merges (``d`` in, one out).
The rotation system is stored on the edges themselves: ``src_slot`` is the
position of the edge among the outgoing edges of a split source, ``dst_slot``
its position among the incoming edges of a merge target (both 0 otherwise).
``gamma`` is an integer representative of the cutting class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

SPLIT = "split"
MERGE = "merge"


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    gamma: int
    src_slot: int = 0
    dst_slot: int = 0


@dataclass(frozen=True)
class StrandDiagram:
    d: int
    k: int
    kinds: dict[int, str]
    edges: dict[int, Edge]
    free_loops: tuple[int, ...] = ()
    # root arity per vertex, only used while the root hourglass is still present
    arities: dict[int, int] = field(default_factory=dict, compare=False)

    def arity(self, v: int) -> int:
        return self.arities.get(v, self.d)

    @cached_property
    def outs(self) -> dict[int, list[int]]:
        """Outgoing edge ids by slot."""
        out = {v: [None] * (self.arity(v) if kind == SPLIT else 1) for v, kind in self.kinds.items()}
        for eid, e in self.edges.items():
            out[e.src][e.src_slot] = eid
        return out

    @cached_property
    def ins(self) -> dict[int, list[int]]:
        """Incoming edge ids by slot."""
        out = {v: [None] * (self.arity(v) if kind == MERGE else 1) for v, kind in self.kinds.items()}
        for eid, e in self.edges.items():
            out[e.dst][e.dst_slot] = eid
        return out

    def validate(self) -> None:
        for v, kind in self.kinds.items():
            if kind not in (SPLIT, MERGE):
                raise DiagramError(f"vertex {v} has unknown kind {kind!r}")
        seen_out, seen_in = set(), set()
        for eid, e in self.edges.items():
            for end, slot, seen, rotating in ((e.src, e.src_slot, seen_out, SPLIT),
                                               (e.dst, e.dst_slot, seen_in, MERGE)):
                if end not in self.kinds:
                    raise DiagramError(f"edge {eid} touches unknown vertex {end}")
                bound = self.arity(end) if self.kinds[end] == rotating else 1
                if not 0 <= slot < bound or (end, slot) in seen:
                    raise DiagramError(f"edge {eid} has a bad slot {slot} at vertex {end}")
                seen.add((end, slot))
        for v, kind in self.kinds.items():
            n_out = self.arity(v) if kind == SPLIT else 1
            n_in = self.arity(v) if kind == MERGE else 1
            if sum((v, i) in seen_out for i in range(n_out)) != n_out or \
                    sum((v, i) in seen_in for i in range(n_in)) != n_in:
                raise DiagramError(f"vertex {v} ({kind}) has the wrong degree")

    @property
    def n_vertices(self) -> int:
        return len(self.kinds)

    def total_gamma(self) -> int:
        return sum(e.gamma for e in self.edges.values()) + sum(self.free_loops)

    def components(self) -> list[list[int]]:
        """Vertex sets of the connected components (free loops excluded)."""
        adj = {v: set() for v in self.kinds}
        for e in self.edges.values():
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
        seen, out = set(), []
        for v in sorted(self.kinds):
            if v in seen:
                continue
            stack, comp = [v], []
            seen.add(v)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def with_gamma(self, gamma: dict[int, int]) -> "StrandDiagram":
        edges = {eid: Edge(e.src, e.dst, gamma[eid], e.src_slot, e.dst_slot)
                 for eid, e in self.edges.items()}
        return StrandDiagram(self.d, self.k, dict(self.kinds), edges, self.free_loops, dict(self.arities))

    def relabeled(self) -> "StrandDiagram":
        """Same diagram with vertex and edge ids renumbered densely from 0."""
        vmap = {v: i for i, v in enumerate(sorted(self.kinds))}
        edges = {i: Edge(vmap[e.src], vmap[e.dst], e.gamma, e.src_slot, e.dst_slot)
                 for i, (_, e) in enumerate(sorted(self.edges.items()))}
        kinds = {vmap[v]: kind for v, kind in self.kinds.items()}
        arities = {vmap[v]: a for v, a in self.arities.items()}
        return StrandDiagram(self.d, self.k, kinds, edges, tuple(sorted(self.free_loops)), arities)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "vertices": [{"id": v, "kind": self.kinds[v]} for v in sorted(self.kinds)],
            "edges": [
                {"id": eid, "from": e.src, "to": e.dst, "gamma": e.gamma,
                 "slot_at_split": _slot_at(self, e, SPLIT),
                 "slot_at_merge": _slot_at(self, e, MERGE)}
                for eid, e in sorted(self.edges.items())
            ],
            "free_loops": [{"gamma": v} for v in sorted(self.free_loops)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StrandDiagram":
        kinds = {v["id"]: v["kind"] for v in data["vertices"]}
        edges = {}
        for e in data["edges"]:
            src_slot = e["slot_at_split"] if kinds.get(e["from"]) == SPLIT else 0
            dst_slot = e["slot_at_merge"] if kinds.get(e["to"]) == MERGE else 0
            edges[e["id"]] = Edge(e["from"], e["to"], e["gamma"], src_slot or 0, dst_slot or 0)
        dgm = cls(data["d"], data.get("k", data["d"]), kinds, edges,
                  tuple(sorted(f["gamma"] for f in data.get("free_loops", []))))
        dgm.validate()
        return dgm

    def to_dot(self) -> str:
        lines = ["digraph strand {"]
        for v in sorted(self.kinds):
            shape = "triangle" if self.kinds[v] == SPLIT else "invtriangle"
            lines.append(f'  v{v} [shape={shape}, label="{self.kinds[v][0]}{v}"];')
        for eid, e in sorted(self.edges.items()):
            lines.append(
                f'  v{e.src} -> v{e.dst} [label="γ={e.gamma}", '
                f'slot_at_split={_slot_at(self, e, SPLIT) if _slot_at(self, e, SPLIT) is not None else -1}, '
                f'slot_at_merge={_slot_at(self, e, MERGE) if _slot_at(self, e, MERGE) is not None else -1}];')
        for i, value in enumerate(sorted(self.free_loops)):
            lines.append(f'  loop{i} [shape=doublecircle, label="γ={value}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _slot_at(dgm: StrandDiagram, e: Edge, kind: str) -> int | None:
    if kind == SPLIT:
        return e.src_slot if dgm.kinds[e.src] == SPLIT else None
    return e.dst_slot if dgm.kinds[e.dst] == MERGE else None
