"""Shared fixtures and builders for the lessonforge test suite."""

from __future__ import annotations

import json
import threading

import pytest

from lessonforge.errors import LessonForgeError
from lessonforge.generator import deterministic_generate, full_plan_generate
from lessonforge.graph import LessonGraph, chain_from_sequence
from lessonforge.history import History
from lessonforge.interchange import lesson_bytes
from lessonforge.library import load_library
from lessonforge.plan import HierarchyLevel, ITEM_LEVELS
from lessonforge.service import create_server

WELDING_WORDS = ["mig", "welding", "safety", "equipment", "wire", "tee",
                 "joint", "maintenance", "basics"]
DEMO_WORDS = ["pizza", "baking", "dough", "sauce", "toppings", "oven", "hygiene"]
FILLER_WORDS = ["module", "class", "students", "workshop", "course", "session"]

TEXT_POOL = [
    "Maintain correct travel speed",
    "Keep the arc length steady",
    "Check the gas flow before starting",
    "Inspect the finished bead",
    "Stage the workpiece safely",
    "Review safety and equipment notes",
]


@pytest.fixture(scope="session")
def welding():
    return load_library("welding")


@pytest.fixture(scope="session")
def demo():
    return load_library("demo")


def outcome_text(rng, bundle) -> str:
    """Outcome text guaranteed to match at least one library keyword."""
    words = WELDING_WORDS if bundle.library_id == "welding" else DEMO_WORDS
    chosen = rng.sample(words, rng.randint(1, 3))
    filler = rng.choice(FILLER_WORDS)
    return f"Learn {' and '.join(chosen)} in this {filler} {rng.randint(1, 999)}"


def make_document(rng, bundle):
    """A fully generated document with a fresh (empty) history."""
    doc = full_plan_generate(outcome_text(rng, bundle), bundle, deterministic_generate)
    doc.history = History()
    return doc


def make_session(rng, bundle):
    """(doc, graph) pair sharing one history, like a service session."""
    doc = make_document(rng, bundle)
    graph = chain_from_sequence([r.activity_id for r in doc.activity_sequence], bundle)
    graph.history = doc.history
    return doc, graph


def masked_lesson_payload(doc, graph) -> dict:
    """Canonical lesson payload with revision counters masked."""
    payload = json.loads(lesson_bytes(doc, graph))

    def scrub(value):
        if isinstance(value, dict):
            for key in value:
                if key in ("revision", "documentRevision"):
                    value[key] = 0
                else:
                    scrub(value[key])
        elif isinstance(value, list):
            for entry in value:
                scrub(entry)

    scrub(payload)
    return payload


def assert_link_integrity(doc) -> None:
    objective_ids = {item.item_id for item in doc.objectives}
    skill_ids = {item.item_id for item in doc.skills}
    for item in doc.skills:
        assert item.link is None or item.link in objective_ids
    for item in doc.criteria:
        assert item.link is None or item.link in skill_ids


def random_plan_command(rng, doc, graph, bundle) -> bool:
    """Apply one random editing command; returns False if it was rejected."""
    choices = ["set_outcomes", "local_edit", "add_item", "local_delete",
               "delete_level", "set_sequence", "global_update", "undo_item",
               "add_node", "remove_node", "add_edge", "remove_edge",
               "set_properties", "set_position", "rebuild_chain"]
    op = rng.choice(choices)
    ids = [d.activity_id for d in bundle.descriptors]
    try:
        if op == "set_outcomes":
            doc.set_outcomes(outcome_text(rng, bundle))
        elif op == "local_edit":
            level = rng.choice(ITEM_LEVELS)
            items = doc.items_at(level)
            if not items:
                return False
            doc.local_edit(level, rng.choice(items).item_id, rng.choice(TEXT_POOL))
        elif op == "add_item":
            level = rng.choice(ITEM_LEVELS)
            link = None
            if level is not HierarchyLevel.OBJECTIVES and rng.random() < 0.5:
                parents = doc.parent_pairs(level)
                if parents:
                    link = rng.choice(parents)[0]
            doc.add_item(level, rng.choice(TEXT_POOL), link=link, library=bundle)
        elif op == "local_delete":
            level = rng.choice(list(ITEM_LEVELS) + [HierarchyLevel.ACTIVITIES])
            if level is HierarchyLevel.ACTIVITIES:
                if not doc.activity_sequence:
                    return False
                doc.local_delete(level, rng.choice(doc.activity_sequence).instance_id)
            else:
                items = doc.items_at(level)
                if not items:
                    return False
                doc.local_delete(level, rng.choice(items).item_id)
        elif op == "delete_level":
            doc.delete_level(rng.choice(list(HierarchyLevel)))
        elif op == "set_sequence":
            doc.set_activity_sequence(rng.sample(ids, rng.randint(1, 5)), library=bundle)
        elif op == "global_update":
            level = rng.choice([HierarchyLevel.OBJECTIVES, HierarchyLevel.SKILLS,
                                HierarchyLevel.ASSESSMENT, HierarchyLevel.ACTIVITIES])
            doc.global_update(level, deterministic_generate, library=bundle)
        elif op == "undo_item":
            level = rng.choice(ITEM_LEVELS)
            items = doc.items_at(level)
            if not items:
                return False
            doc.undo_item(level, rng.choice(items).item_id)
        elif op == "add_node":
            graph.add_node(rng.choice(ids), bundle,
                           position=(rng.randint(0, 900), rng.randint(0, 600)))
        elif op == "remove_node":
            if not graph.nodes:
                return False
            graph.remove_node(rng.choice(graph.nodes).node_id)
        elif op == "add_edge":
            if len(graph.nodes) < 2:
                return False
            source, target = rng.sample(graph.nodes, 2)
            graph.add_edge(source.node_id, target.node_id)
        elif op == "remove_edge":
            if not graph.edges:
                return False
            graph.remove_edge(rng.choice(graph.edges).edge_id)
        elif op == "set_properties":
            if not graph.nodes:
                return False
            graph.set_properties(rng.choice(graph.nodes).node_id,
                                 timing_seconds=rng.randint(30, 900),
                                 message=rng.choice(TEXT_POOL))
        elif op == "set_position":
            if not graph.nodes:
                return False
            graph.set_position(rng.choice(graph.nodes).node_id,
                               rng.randint(0, 900), rng.randint(0, 600))
        elif op == "rebuild_chain":
            if not doc.activity_sequence:
                return False
            chain = chain_from_sequence(
                [ref.activity_id for ref in doc.activity_sequence], bundle)
            graph.replace_content(chain)
    except LessonForgeError:
        return False
    return True


def brute_force_topological_order(graph: LessonGraph) -> list[str]:
    """Independent oracle: repeated zero-in-degree removal, insertion order ties."""
    in_degree = {node.node_id: 0 for node in graph.nodes}
    outgoing = {node.node_id: [] for node in graph.nodes}
    for edge in graph.edges:
        in_degree[edge.target] += 1
        outgoing[edge.source].append(edge.target)
    remaining = [node.node_id for node in graph.nodes]
    order = []
    while remaining:
        picked = next((node_id for node_id in remaining if in_degree[node_id] == 0),
                      None)
        assert picked is not None, "oracle found a cycle"
        order.append(picked)
        remaining.remove(picked)
        for target in outgoing[picked]:
            in_degree[target] -= 1
    return order


@pytest.fixture
def live_server(tmp_path):
    """A running service on an ephemeral port backed by a temp state dir."""
    server = create_server(state_dir=tmp_path / "state", port=0)
    thread = threading.Thread(target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    base_url = f"http://127.0.0.1:{server.server_address[1]}"
    yield base_url, server
    server.shutdown()
    server.server_close()
    thread.join(timeout=5)
