import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occlude import CycleError, OcclusionGraph, SceneObject, topological_order, validate_graph

from conftest import brute_force_order


def objs(*ids):
    return [SceneObject(i) for i in ids]


def test_valid_two_object_graph_has_empty_report():
    report = validate_graph(OcclusionGraph(objs("A", "B"), [("A", "B")]))
    assert report.ok
    assert len(report) == 0


def test_two_cycle_reported_once():
    report = validate_graph(OcclusionGraph(objs("A", "B"), [("A", "B"), ("B", "A")]))
    cycles = [i for i in report if i.code == "cycle"]
    assert len(cycles) == 1
    assert set(cycles[0].ids) == {"A", "B"}


def test_opacity_one_flagged():
    report = validate_graph(OcclusionGraph([SceneObject("A", opacity=1.0)]))
    assert report.codes() == ["opacity"]


def test_every_violation_listed():
    graph = OcclusionGraph(
        [
            SceneObject("A", bbox=(0.5, 0.0, 0.5, 1.0)),
            SceneObject("B", opacity=-0.1),
            SceneObject("C", ("x",), subject_index=3),
            SceneObject("D", color=(2.0, 0.0, 0.0)),
            SceneObject("E"),
            SceneObject("F"),
            SceneObject("G"),
        ],
        [("A", "ghost"), ("A", "A"), ("E", "F"), ("F", "G"), ("G", "E")],
    )
    codes = validate_graph(graph).codes()
    for code in ("bbox", "opacity", "subject_index", "color", "dangling_edge", "self_edge", "cycle"):
        assert code in codes
    cycle = [i for i in validate_graph(graph) if i.code == "cycle"][0]
    assert cycle.ids == ("E", "F", "G")


def test_duplicate_ids_flagged():
    assert "duplicate_id" in validate_graph(OcclusionGraph(objs("A", "A"))).codes()


@pytest.mark.parametrize(
    "ids, edges, expected",
    [
        ("ABC", [("A", "B"), ("B", "C")], ["A", "B", "C"]),
        ("XYZ", [], ["X", "Y", "Z"]),
        ("ABCD", [("C", "A"), ("B", "A")], ["B", "C", "A", "D"]),
    ],
)
def test_topological_order_examples(ids, edges, expected):
    graph = OcclusionGraph(objs(*ids), edges)
    assert brute_force_order(graph) == expected
    assert topological_order(graph) == expected


def test_cycle_raises():
    with pytest.raises(CycleError) as err:
        topological_order(OcclusionGraph(objs("A", "B", "C"), [("A", "B"), ("B", "A")]))
    assert set(err.value.members) == {"A", "B"}


def test_self_edge_raises():
    with pytest.raises(CycleError):
        topological_order(OcclusionGraph(objs("A"), [("A", "A")]))


@st.composite
def dags(draw, max_nodes=6):
    n = draw(st.integers(1, max_nodes))
    ids = [f"o{i}" for i in range(n)]
    hidden = draw(st.permutations(ids))
    pairs = [(hidden[i], hidden[j]) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return OcclusionGraph(objs(*ids), edges)


@given(dags())
@settings(max_examples=300, deadline=None)
def test_order_respects_edges_and_matches_brute_force(graph):
    order = topological_order(graph)
    assert sorted(order) == sorted(graph.ids)
    pos = {oid: k for k, oid in enumerate(order)}
    assert all(pos[a] < pos[b] for a, b in graph.edges)
    assert order == brute_force_order(graph)


@given(dags())
@settings(max_examples=100, deadline=None)
def test_order_is_deterministic(graph):
    clone = OcclusionGraph(list(graph.objects), list(graph.edges))
    assert topological_order(graph) == topological_order(clone)


@given(dags(), st.data())
@settings(max_examples=300, deadline=None)
def test_removing_an_edge_keeps_unconstrained_sources_in_input_order(graph, data):
    if not graph.edges:
        return
    drop = data.draw(st.sampled_from(graph.edges))
    reduced = OcclusionGraph(graph.objects, [e for e in graph.edges if e != drop])
    targets = {b for _, b in graph.edges}
    # Objects that no edge in either graph places behind something.
    free = [oid for oid in graph.ids if oid not in targets]
    for g in (graph, reduced):
        order = topological_order(g)
        assert [oid for oid in order if oid in free] == free


def test_with_object_and_without():
    graph = OcclusionGraph(objs("A", "B", "C"), [("A", "B"), ("B", "C")])
    assert graph.without("B").edges == (("A", "C"),)
    assert graph.without("B").ids == ["A", "C"]
    swapped = graph.with_object(SceneObject("B", opacity=0.1))
    assert swapped.get("B").opacity == 0.1
    assert swapped.ids == graph.ids
    with pytest.raises(KeyError):
        graph.get("nope")


def test_random_dags_large(rng):
    for _ in range(50):
        n = int(rng.integers(5, 30))
        ids = [f"n{i}" for i in range(n)]
        hidden = list(rng.permutation(ids))
        edges = [(hidden[i], hidden[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.2]
        order = topological_order(OcclusionGraph(objs(*ids), edges))
        pos = {oid: k for k, oid in enumerate(order)}
        assert all(pos[a] < pos[b] for a, b in edges)
        assert np.array_equal(sorted(order), sorted(ids))


def test_without_keeps_survivor_depth_order():
    # Plain deletion would sort to [A, B].
    graph = OcclusionGraph(objs("A", "B", "k"), [("k", "A")])
    assert topological_order(graph) == ["B", "k", "A"]
    assert topological_order(graph.without("k")) == ["B", "A"]


@given(dags(), st.data())
@settings(max_examples=200, deadline=None)
def test_without_matches_filtered_order(graph, data):
    victim = data.draw(st.sampled_from(graph.ids))
    expected = [oid for oid in topological_order(graph) if oid != victim]
    reduced = graph.without(victim)
    assert topological_order(reduced) == expected
    assert validate_graph(reduced).ok
