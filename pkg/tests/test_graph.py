import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclic_ph.errors import InvalidFiltration, InvalidStep
from cyclic_ph.graph import (
    AddEdge,
    AddVertex,
    CyclicGraph,
    Filtration,
    apply_step,
    degree,
    in_degrees,
    insertion_reach,
    is_cone,
    random_filtration,
    regular_rounds,
    validate,
)

HEXAGON = (1, 2, 2, 1, 1, 2)


def test_validate_hexagon_is_cyclic():
    assert validate(CyclicGraph(HEXAGON)) == []


def test_validate_edgeless():
    assert validate(CyclicGraph.edgeless(5)) == []


def test_validate_reports_cyclicity_break_with_index():
    problems = validate(CyclicGraph((2, 0, 0, 0)))
    assert [(v.kind, v.index) for v in problems] == [("cyclicity", 0)]


def test_validate_reports_antiparallel_and_bound():
    # 0 -> 1 and 1 -> 0 on three vertices: the run from 1 wraps back to 0
    problems = validate(CyclicGraph((1, 2, 1)))
    assert any(v.kind == "antiparallel" for v in problems)
    problems = validate(CyclicGraph((3, 0, 0)))
    assert any(v.kind == "reach_bound" and v.index == 0 for v in problems)


def test_first_edge():
    g = apply_step(CyclicGraph.edgeless(6), AddEdge(0))
    assert g.reach == (1, 0, 0, 0, 0, 0)


def test_edge_that_breaks_cyclicity_is_rejected():
    with pytest.raises(InvalidStep):
        apply_step(CyclicGraph((1, 0, 0, 0)), AddEdge(0))


def test_regular_rounds_valid_at_every_prefix():
    filt = regular_rounds(9, 3)
    assert len(filt) == 27
    graphs = list(filt.graphs())
    assert all(validate(g) == [] for g in graphs)
    assert graphs[-1].reach == (3,) * 9


def test_degree_and_cone():
    tri = CyclicGraph((1, 1, 1))
    assert [degree(tri, v) for v in range(3)] == [2, 2, 2]
    assert is_cone(tri) == 0
    assert is_cone(CyclicGraph(HEXAGON)) is None
    empty = CyclicGraph.edgeless(4)
    assert [degree(empty, v) for v in range(4)] == [0] * 4
    assert is_cone(empty) is None


def test_in_degrees_match_edge_list():
    g = CyclicGraph((4, 3, 3, 3, 3, 3, 3, 4, 4))
    counts = [0] * g.n
    for _, t in g.edges():
        counts[t] += 1
    assert in_degrees(g.reach) == counts


def test_small_n_are_accepted():
    assert validate(CyclicGraph((0,))) == []
    assert validate(CyclicGraph((1, 0))) == []
    assert validate(CyclicGraph((1, 1))) != []


def test_vertex_insertion_forced_optional_forbidden():
    reach = [1, 1, 1, 0, 0, 0]
    # slot 4 sits after old 3: vertex 2 ends at 3 (optional), 3 has no edges (optional)
    assert insertion_reach(reach, AddVertex(4, 0, ())) == [1, 1, 1, 0, 0, 0, 0]
    assert insertion_reach(reach, AddVertex(4, 0, (3,))) == [1, 1, 1, 1, 0, 0, 0]
    assert insertion_reach(reach, AddVertex(4, 0, (2, 3))) == [1, 1, 2, 1, 0, 0, 0]
    with pytest.raises(InvalidStep):
        insertion_reach(reach, AddVertex(4, 0, (1,)))  # 1 cannot jump over 2 and 3
    with pytest.raises(InvalidStep):
        insertion_reach([1] * 6, AddVertex(3, 1, ()))  # 2 -> old 3 spans the slot


def test_filtration_reports_failing_step_index():
    with pytest.raises(InvalidFiltration) as info:
        Filtration(4, [AddEdge(0), AddEdge(0)])
    assert info.value.step_index == 2


def test_scales_must_not_decrease():
    with pytest.raises(InvalidFiltration):
        Filtration(4, [AddEdge(0), AddEdge(1)], scales=[1.0, 0.5])


def test_json_round_trip_with_vertex_steps():
    filt = random_filtration(9, seed=3, vertex_steps=True)
    assert filt.vertex_steps, "seed should produce at least one insertion"
    again = Filtration.from_json(filt.to_json())
    assert again.to_dict() == filt.to_dict()
    assert again.final_graph() == filt.final_graph()


def test_json_wire_format():
    filt = Filtration(3, [AddEdge(0), AddVertex(1, 1, (0,))], scales=[0.5, 0.7])
    data = json.loads(filt.to_json())
    assert data == {
        "n": 3,
        "steps": [
            {"type": "edge", "source": 0},
            {"type": "vertex", "position": 1, "out_reach": 1, "in_sources": [0]},
        ],
        "scales": [0.5, 0.7],
    }


def test_malformed_json_is_an_invalid_filtration():
    with pytest.raises(InvalidFiltration):
        Filtration.from_dict({"n": 3, "steps": [{"type": "loop"}]})
    with pytest.raises(InvalidFiltration):
        Filtration.from_dict({"steps": []})


seeds = st.integers(min_value=0, max_value=10**6)
sizes = st.integers(min_value=1, max_value=10)


@settings(max_examples=60, deadline=None)
@given(sizes, seeds, st.booleans())
def test_every_prefix_is_cyclic(n, seed, vertices):
    filt = random_filtration(n, seed, vertex_steps=vertices)
    for g in filt.graphs():
        assert validate(g) == []


@settings(max_examples=60, deadline=None)
@given(sizes, seeds)
def test_edge_list_round_trip(n, seed):
    for g in random_filtration(n, seed).graphs():
        assert CyclicGraph.from_edges(g.n, g.edges()) == g


@settings(max_examples=60, deadline=None)
@given(sizes, seeds, st.booleans())
def test_steps_never_shrink_anything(n, seed, vertices):
    filt = random_filtration(n, seed, vertex_steps=vertices)
    graphs = list(filt.graphs())
    for step, before, after in zip(filt, graphs, graphs[1:]):
        assert after.n >= before.n
        if isinstance(step, AddEdge):
            assert all(b <= a for b, a in zip(before.reach, after.reach))
        else:
            kept = [r for i, r in enumerate(after.reach) if i != step.position]
            assert all(b <= a for b, a in zip(before.reach, kept))


@settings(max_examples=60, deadline=None)
@given(sizes, seeds)
def test_neighbourhoods_are_arcs_through_the_vertex(n, seed):
    for g in random_filtration(n, seed).graphs():
        for v in range(g.n):
            # the closed neighbourhood, read from v counterclockwise, must be one run
            inside = [u == v or g.adjacent(u, v) for u in range(g.n)]
            rotated = inside[v:] + inside[:v]
            starts = sum(1 for i in range(g.n) if rotated[i] and not rotated[i - 1])
            assert starts <= 1 or all(rotated)
