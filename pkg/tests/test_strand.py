import json
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from aaut.dynamics import dynamics_report, revealing_pair
from aaut.element import ChainKind, canonicalize, chains
from aaut.sampling import make_rng, random_element
from aaut.strand.diagram import MERGE, SPLIT, DiagramError, Edge, StrandDiagram
from aaut.strand.iso import is_coboundary, iso
from aaut.strand.loops import (
    NotAdmissible, NotReduced, admissible_representative, diagram_to_revealing_pair,
    dynamics_from_diagram, is_autT_translation_diagram, loops, translation_diagram,
)
from aaut.strand.rewrite import (
    Move, apply_move, available_moves, basic_diagram, is_reduced, reduce, star_reduce,
)
from aaut.tree import ClopenSet, TreeParams, ball_count_residue

from helpers import AV, DSWAP, ID, SWAP, T22, T23, X, el

D_X = basic_diagram(X.pair)
D_AV = basic_diagram(AV.pair)


def diagram(d, k, kinds, edges, free=()):
    dgm = StrandDiagram(d, k, dict(enumerate(kinds)),
                        {i: Edge(*e) for i, e in enumerate(edges)}, tuple(free))
    dgm.validate()
    return dgm


def loop_summary(dgm):
    return sorted((lp.kind, lp.length, lp.class_value) for lp in loops(dgm))


def test_basic_diagram_of_x():
    assert sorted(D_X.kinds.values()) == [MERGE, SPLIT]
    s = next(v for v, k in D_X.kinds.items() if k == SPLIT)
    m = next(v for v, k in D_X.kinds.items() if k == MERGE)
    got = sorted((e.src, e.dst, e.gamma, e.src_slot, e.dst_slot) for e in D_X.edges.values())
    # b: s->s in split slot 1, a: m->m in merge slot 0, c: s->m (split slot 0, merge slot 1)
    assert got == sorted([(s, s, 1, 1, 0), (m, m, 1, 0, 0), (s, m, 0, 0, 1)])
    assert D_X.free_loops == ()


def test_basic_diagram_periodic_examples():
    assert basic_diagram(ID.pair).free_loops == (1, 1)
    assert not basic_diagram(ID.pair).kinds
    assert basic_diagram(SWAP.pair).free_loops == (2,)
    assert basic_diagram(DSWAP.pair).free_loops == (2, 2)


def test_reduce_examples():
    assert iso(reduce(D_X), D_X) is not None
    assert star_reduce(D_X).edges == D_X.edges
    assert star_reduce(basic_diagram(ID.pair)).free_loops == (1,)
    assert reduce(diagram(2, 2, [], [], (3, 3))).free_loops == (3,)
    assert reduce(diagram(3, 3, [], [], (3, 3))).free_loops == (3, 3)
    assert reduce(diagram(3, 3, [], [], (3, 3, 3))).free_loops == (3,)


def test_type_ii_hand_example():
    # merge 0 -> split 1 with gamma 1, and the split feeding both merge slots
    dgm = diagram(2, 2, [MERGE, SPLIT], [(0, 1, 1, 0, 0), (1, 0, 0, 0, 0), (1, 0, 2, 1, 1)])
    assert available_moves(dgm, ("II",)) == [Move("II", 0)]
    out = apply_move(dgm, Move("II", 0))
    # each strand closes through the erased edge once: 0+1 and 2+1
    assert not out.kinds and sorted(out.free_loops) == [1, 3]


def test_star_reduce_keeps_order_two_diagram():
    swap_star = star_reduce(basic_diagram(revealing_pair(SWAP)))
    assert swap_star.free_loops == (2,)
    assert iso(swap_star, star_reduce(basic_diagram(ID.pair))) is None


def test_iso_examples():
    found = iso(D_X, D_X, respect_rotation=True)
    assert found is not None and all(a == b for a, b in found.vertices.items())
    assert iso(D_X, D_AV, respect_rotation=False) is not None
    assert iso(D_X, D_AV, respect_rotation=True) is None


def test_admissible_representative_examples():
    assert admissible_representative(D_X).edges == D_X.edges
    m = next(v for v, k in D_X.kinds.items() if k == MERGE)
    shifted = D_X.with_gamma({eid: e.gamma + (e.dst == m) - (e.src == m) for eid, e in D_X.edges.items()})
    assert shifted.edges != D_X.edges
    norm = admissible_representative(shifted)
    assert norm.edges == D_X.edges
    free = diagram(2, 2, [], [], (2,))
    assert admissible_representative(free) == free
    with pytest.raises(NotAdmissible):
        admissible_representative(diagram(3, 2, [], [], (3,)))


def test_diagram_to_revealing_pair_examples():
    p = diagram_to_revealing_pair(D_X, T22)
    assert Counter((c.kind, c.period) for c in chains(p)) == Counter({
        (ChainKind.ATTRACTOR, 1): 1, (ChainKind.REPELLER, 1): 1, (ChainKind.WANDERING, None): 1})
    translation5 = translation_diagram(3, 5)
    g = canonicalize(diagram_to_revealing_pair(translation5, TreeParams(3, 4)))
    assert dynamics_report(g).attractor_data() == Counter({(1, 5): 1})
    cyc = diagram_to_revealing_pair(diagram(2, 2, [], [], (2,)), T22)
    assert canonicalize(cyc) == SWAP


def test_loops_examples():
    assert loop_summary(D_X) == [("merge", 1, 1), ("split", 1, 1)]
    assert loop_summary(diagram(2, 2, [], [], (2,))) == [("free", 0, 2)]
    assert loop_summary(translation_diagram(3, 5)) == [("merge", 5, 1), ("split", 5, 1)]
    with pytest.raises(NotReduced):
        loops(diagram(2, 2, [MERGE, SPLIT], [(0, 1, 1, 0, 0), (1, 0, 0, 0, 0), (1, 0, 2, 1, 1)]))


def test_dynamics_from_diagram_examples():
    dx = dynamics_from_diagram(D_X)
    assert dx.attractors == Counter({(1, 1): 1}) and dx.repellers == Counter({(1, 1): 1})
    assert dx.stable_ball_residue == 0 and dx.component_count == 1
    t5 = dynamics_from_diagram(translation_diagram(3, 5))
    assert t5.attractors == Counter({(5, 1): 1}) and t5.repellers == Counter({(5, 1): 1})
    free = dynamics_from_diagram(diagram(3, 3, [], [], (3,)))
    assert free.stable_ball_residue == 1 and not free.attractors


def test_translation_recognition():
    assert is_autT_translation_diagram(translation_diagram(3, 5)) == 5
    assert is_autT_translation_diagram(translation_diagram(2, 1, k=3)) == 1
    assert is_autT_translation_diagram(D_X) == 1
    two_merge_loops = diagram(2, 2, [SPLIT, MERGE, SPLIT, MERGE],
                              [(0, 0, 1, 1, 0), (1, 1, 1, 0, 0), (0, 1, 0, 0, 1),
                               (2, 2, 1, 1, 0), (3, 3, 1, 0, 0), (2, 3, 0, 0, 1)])
    assert is_autT_translation_diagram(two_merge_loops) is None


def test_json_and_dot_round_trip():
    data = D_X.to_json()
    assert StrandDiagram.from_json(json.loads(json.dumps(data))).to_json() == data
    assert "triangle" in D_X.to_dot() and "invtriangle" in D_X.to_dot()
    with pytest.raises(DiagramError):
        StrandDiagram.from_json({"d": 2, "vertices": [{"id": 0, "kind": "split"}], "edges": []})


params_st = st.sampled_from([TreeParams(2, 2), TreeParams(3, 3), TreeParams(2, 3)])


@st.composite
def elements(draw, params=None):
    params = params or draw(params_st)
    return random_element(params, draw(st.integers(1, 8)), make_rng(draw(st.integers(0, 2**32))))


@settings(max_examples=100, deadline=None)
@given(elements(), st.integers(0, 2**32))
def test_reduce_confluent(g, seed):
    rng = make_rng(seed)
    a = reduce(basic_diagram(g.pair), rng)
    b = reduce(basic_diagram(g.pair), rng)
    assert is_reduced(a) and is_reduced(b)
    assert iso(a, b, respect_rotation=True) is not None


@settings(max_examples=100, deadline=None)
@given(elements(), st.integers(0, 2**32))
def test_coboundary_soundness(g, seed):
    dgm = star_reduce(basic_diagram(revealing_pair(g)))
    rng = make_rng(seed)
    phi = {v: int(rng.integers(-3, 4)) for v in dgm.kinds}
    moved = dgm.with_gamma({eid: e.gamma + phi[e.dst] - phi[e.src] for eid, e in dgm.edges.items()})
    assert is_coboundary(dgm, {eid: moved.edges[eid].gamma - e.gamma for eid, e in dgm.edges.items()})
    assert loop_summary(moved) == loop_summary(dgm)
    assert iso(dgm, moved, respect_rotation=True) is not None
    a, b = admissible_representative(moved), admissible_representative(dgm)
    assert is_coboundary(dgm, {eid: a.edges[eid].gamma - e.gamma for eid, e in b.edges.items()})
    check_normal_form(a)


def check_normal_form(dgm):
    on_loop = set()
    for lp in loops(dgm):
        if lp.kind == "free":
            continue
        on_loop.update(lp.edges)
        assert sum(dgm.edges[e].gamma != 0 for e in lp.edges) == 1
    for eid, e in dgm.edges.items():
        assert e.gamma >= 0
        off_loop_tree_edge = dgm.kinds[e.dst] == SPLIT or dgm.kinds[e.src] == MERGE
        if eid not in on_loop and off_loop_tree_edge:
            assert e.gamma == 0
    if dgm.kinds:
        assert dgm.total_gamma() >= dgm.k
    assert (dgm.total_gamma() - dgm.k) % (dgm.d - 1) == 0


@settings(max_examples=100, deadline=None)
@given(elements())
def test_reductions_preserve_admissibility(g):
    d, k = g.params.d, g.params.k
    for dgm in (basic_diagram(g.pair), reduce(basic_diagram(g.pair)),
                star_reduce(basic_diagram(revealing_pair(g)))):
        assert (dgm.total_gamma() - k) % (d - 1) == 0
    dgm = star_reduce(basic_diagram(revealing_pair(g)))
    norm = admissible_representative(dgm)
    check_normal_form(norm)


@settings(max_examples=100, deadline=None)
@given(elements())
def test_round_trip(g):
    dgm = star_reduce(basic_diagram(revealing_pair(g)))
    p = diagram_to_revealing_pair(dgm, g.params)
    assert iso(dgm, star_reduce(basic_diagram(p)), respect_rotation=True) is not None


@settings(max_examples=100, deadline=None)
@given(elements())
def test_dynamics_read_off(g):
    dd = dynamics_from_diagram(star_reduce(basic_diagram(revealing_pair(g))))
    r = dynamics_report(g)
    assert Counter({(p, l): n for (l, p), n in dd.attractors.items()}) == r.attractor_data()
    assert Counter({(p, l): n for (l, p), n in dd.repellers.items()}) == r.repeller_data()
    assert dd.stable_ball_residue == ball_count_residue(r.stable_region)
