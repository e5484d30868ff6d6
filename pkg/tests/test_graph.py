"""Lesson-graph editing, validation diagnostics, and DFS linearization."""

import random

import pytest

from conftest import brute_force_topological_order
from lessonforge.errors import (
    CyclicGraph,
    DuplicateEdge,
    EmptyGraph,
    InvalidProperty,
    SelfLoop,
    UnknownActivity,
    UnknownNode,
)
from lessonforge.graph import (
    CHAIN_X_SPACING,
    DiagnosticCategory,
    LessonGraph,
    Severity,
    chain_from_sequence,
    linearize,
    validate,
)
from lessonforge.plan import HierarchyLevel


def build_chain(welding, ids):
    return chain_from_sequence(ids, welding)


def simple_graph(welding, count=3):
    graph = LessonGraph()
    ids = [d.activity_id for d in welding.descriptors]
    nodes = [graph.add_node(ids[i], welding) for i in range(count)]
    return graph, nodes


# ----------------------------------------------------------------------
# editing


def test_remove_node_removes_incident_edges(welding):
    graph, (a, b, c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)
    graph.add_edge(b.node_id, c.node_id)
    graph.remove_node(b.node_id)
    assert [n.node_id for n in graph.nodes] == [a.node_id, c.node_id]
    assert graph.edges == []


def test_self_loop_rejected(welding):
    graph, (a, _b, _c) = simple_graph(welding)
    with pytest.raises(SelfLoop):
        graph.add_edge(a.node_id, a.node_id)


def test_duplicate_edge_rejected(welding):
    graph, (a, b, _c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)
    with pytest.raises(DuplicateEdge):
        graph.add_edge(a.node_id, b.node_id)


def test_zero_timing_rejected(welding):
    graph, (a, _b, _c) = simple_graph(welding)
    with pytest.raises(InvalidProperty):
        graph.set_properties(a.node_id, timing_seconds=0)


def test_unknown_node_rejected(welding):
    graph, _nodes = simple_graph(welding)
    with pytest.raises(UnknownNode):
        graph.remove_node("n-999")


def test_node_defaults_come_from_descriptor(welding):
    graph = LessonGraph()
    node = graph.add_node("equipment-tour", welding)
    descriptor = welding.get("equipment-tour")
    assert node.label == descriptor.name
    assert node.phase is descriptor.phase
    assert node.properties.to_payload() == descriptor.default_properties.to_payload()
    # overriding the node never mutates the library defaults
    graph.set_properties(node.node_id, timing_seconds=999)
    assert descriptor.default_properties.timing_seconds != 999


def test_every_edit_is_undoable_to_prior_serialization(welding):
    graph, (a, b, c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)
    snapshots = [graph.to_payload()]
    graph.add_edge(b.node_id, c.node_id)
    snapshots.append(graph.to_payload())
    graph.set_properties(a.node_id, timing_seconds=42, message="custom")
    snapshots.append(graph.to_payload())
    graph.set_position(c.node_id, 500, 250)
    snapshots.append(graph.to_payload())
    graph.remove_edge(graph.edges[0].edge_id)
    snapshots.append(graph.to_payload())
    graph.remove_node(b.node_id)
    assert graph.to_payload() != snapshots[-1]
    for expected in reversed(snapshots):
        graph.undo()
        assert graph.to_payload() == expected


# ----------------------------------------------------------------------
# validation


def test_clean_chain_validates_empty(welding):
    graph = build_chain(welding, ["equipment-tour", "ppe-walkthrough",
                                  "tack-weld-practice"])
    assert validate(graph, welding) == []


def test_multiple_outgoing_flagged(welding):
    graph, (a, b, c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)
    graph.add_edge(a.node_id, c.node_id)
    diagnostics = validate(graph)
    assert [d.category for d in diagnostics] == [DiagnosticCategory.MULTIPLE_OUTGOING]
    assert diagnostics[0].locus == (a.node_id,)
    assert diagnostics[0].severity is Severity.WARNING


def test_two_disjoint_chains_flagged_as_multiple_sequences(welding):
    graph, nodes = simple_graph(welding, count=4)
    graph.add_edge(nodes[0].node_id, nodes[1].node_id)
    graph.add_edge(nodes[2].node_id, nodes[3].node_id)
    diagnostics = validate(graph)
    assert [d.category for d in diagnostics] == [DiagnosticCategory.MULTIPLE_SEQUENCES]
    assert diagnostics[0].locus == (nodes[0].node_id, nodes[2].node_id)


def test_cycle_flagged_as_error(welding):
    graph, (a, b, c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)
    graph.add_edge(b.node_id, c.node_id)
    graph.add_edge(c.node_id, a.node_id)
    diagnostics = validate(graph)
    assert [d.category for d in diagnostics] == [DiagnosticCategory.CYCLE_DETECTED]
    assert diagnostics[0].severity is Severity.ERROR
    assert set(diagnostics[0].locus) == {a.node_id, b.node_id, c.node_id}


def test_isolated_node_flagged(welding):
    graph, (a, b, c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)
    categories = [d.category for d in validate(graph)]
    assert DiagnosticCategory.ISOLATED_NODE in categories
    assert DiagnosticCategory.MULTIPLE_SEQUENCES in categories


def test_unknown_activity_error_against_other_library(welding, demo):
    graph = build_chain(welding, ["equipment-tour", "ppe-walkthrough"])
    diagnostics = validate(graph, demo)
    assert all(d.category is DiagnosticCategory.UNKNOWN_ACTIVITY for d in diagnostics)
    assert len(diagnostics) == 2
    assert all(d.severity is Severity.ERROR for d in diagnostics)


def test_stale_plan_warnings_surface(welding):
    graph = build_chain(welding, ["equipment-tour"])
    diagnostics = validate(graph, welding, stale_levels={HierarchyLevel.SKILLS})
    assert [d.category for d in diagnostics] == [DiagnosticCategory.STALE_PLAN]
    assert diagnostics[0].locus == ("skills",)


def test_diagnostics_deterministically_ordered(welding):
    graph, nodes = simple_graph(welding, count=5)
    graph.add_edge(nodes[0].node_id, nodes[1].node_id)
    graph.add_edge(nodes[0].node_id, nodes[2].node_id)
    graph.add_edge(nodes[3].node_id, nodes[1].node_id)
    first = [d.to_payload() for d in validate(graph)]
    second = [d.to_payload() for d in validate(graph)]
    assert first == second
    keys = [(d.category.order, d.locus) for d in validate(graph)]
    assert keys == sorted(keys)


def test_validation_never_throws_on_weird_graphs(welding):
    graph = LessonGraph()
    assert validate(graph) == []  # empty graph is vacuously clean
    node = graph.add_node("equipment-tour", welding)
    assert validate(graph, welding) == []  # single node is a trivial chain
    assert node.node_id


# ----------------------------------------------------------------------
# linearization


def test_chain_linearizes_in_order(welding):
    graph = build_chain(welding, ["equipment-tour", "ppe-walkthrough",
                                  "tack-weld-practice"])
    assert linearize(graph) == [n.node_id for n in graph.nodes]


def test_branch_follows_edge_insertion_order(welding):
    graph, (a, b, c) = simple_graph(welding)
    graph.add_edge(a.node_id, b.node_id)   # inserted first
    graph.add_edge(a.node_id, c.node_id)   # inserted second
    assert linearize(graph) == [a.node_id, b.node_id, c.node_id]


def test_cycle_raises(welding):
    graph, (a, b) = simple_graph(welding, count=2)
    graph.add_edge(a.node_id, b.node_id)
    graph.add_edge(b.node_id, a.node_id)
    with pytest.raises(CyclicGraph):
        linearize(graph)


def test_empty_graph_raises():
    with pytest.raises(EmptyGraph):
        linearize(LessonGraph())


def test_multi_root_visits_roots_in_insertion_order(welding):
    graph, nodes = simple_graph(welding, count=4)
    graph.add_edge(nodes[2].node_id, nodes[3].node_id)
    graph.add_edge(nodes[0].node_id, nodes[1].node_id)
    # roots: nodes[0] and nodes[2], in node insertion order
    assert linearize(graph) == [nodes[0].node_id, nodes[1].node_id,
                                nodes[2].node_id, nodes[3].node_id]


def test_linearize_matches_brute_force_on_random_chains(welding):
    rng = random.Random(40)
    ids = [d.activity_id for d in welding.descriptors]
    for _ in range(50):
        sequence = [rng.choice(ids) for _ in range(rng.randint(1, 30))]
        graph = build_chain(welding, sequence)
        assert linearize(graph) == brute_force_topological_order(graph)


def test_linearize_deterministic_on_random_dags(welding):
    rng = random.Random(41)
    ids = [d.activity_id for d in welding.descriptors]
    for _ in range(25):
        graph = LessonGraph()
        nodes = [graph.add_node(rng.choice(ids), welding)
                 for _ in range(rng.randint(2, 12))]
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                if rng.random() < 0.3:
                    graph.add_edge(nodes[i].node_id, nodes[j].node_id)
        runs = [linearize(graph) for _ in range(3)]
        assert runs[0] == runs[1] == runs[2]
        assert sorted(runs[0]) == sorted(n.node_id for n in graph.nodes)


# ----------------------------------------------------------------------
# chain builder


def test_chain_round_trip(welding):
    ids = ["mig-welding-overview", "mig-process-demo", "arc-striking-drill",
           "equipment-tour", "ppe-walkthrough", "tack-weld-practice",
           "fillet-bead-practice", "weld-quality-check"]
    graph = chain_from_sequence(ids, welding)
    assert [graph.node(node_id).activity_id for node_id in linearize(graph)] == ids
    assert validate(graph, welding) == []


def test_chain_layout_wraps_rows_of_six(welding):
    ids = ["equipment-tour"] * 8
    graph = chain_from_sequence(ids, welding)
    assert graph.nodes[0].position == (0.0, 0.0)
    assert graph.nodes[1].position == (CHAIN_X_SPACING, 0.0)
    assert graph.nodes[6].position[1] > 0  # second row
    assert graph.nodes[6].position[0] == 0.0


def test_chain_from_empty_sequence_raises(welding):
    with pytest.raises(EmptyGraph):
        chain_from_sequence([], welding)


def test_chain_with_unknown_activity_raises(welding):
    with pytest.raises(UnknownActivity):
        chain_from_sequence(["not-a-real-activity"], welding)


def test_duplicate_activity_instances_allowed(welding):
    graph = chain_from_sequence(["equipment-tour", "equipment-tour"], welding)
    assert len(graph.nodes) == 2
    assert len({n.node_id for n in graph.nodes}) == 2
