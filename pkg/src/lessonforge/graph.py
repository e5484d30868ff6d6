"""Directed lesson graph: node/edge editing, validation, and DFS linearization.

Nodes are activity instances with per-node property overrides and canvas
positions; edges carry a document-monotone insertion index that fixes the
deterministic traversal order. Validation never throws; it reports findings
as :class:`Diagnostic` values ordered by (category, locus).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    CyclicGraph,
    DuplicateEdge,
    EmptyGraph,
    InvalidProperty,
    ParseError,
    SelfLoop,
    UnknownActivity,
    UnknownEdge,
    UnknownNode,
)
from .history import Command, History
from .library import LibraryBundle, NodeProperties, PhaseCategory
from .plan import GENERATABLE_LEVELS, HierarchyLevel

# Auto-layout used by the chain builder.
CHAIN_X_SPACING = 220.0
CHAIN_ROW_HEIGHT = 160.0
CHAIN_ROW_LENGTH = 6


class DiagnosticCategory(Enum):
    MULTIPLE_OUTGOING = "MultipleOutgoing"
    MULTIPLE_INCOMING = "MultipleIncoming"
    MULTIPLE_SEQUENCES = "MultipleSequences"
    CYCLE_DETECTED = "CycleDetected"
    ISOLATED_NODE = "IsolatedNode"
    UNKNOWN_ACTIVITY = "UnknownActivity"
    STALE_PLAN = "StalePlan"

    @property
    def order(self) -> int:
        return _CATEGORY_ORDER.index(self)


_CATEGORY_ORDER = list(DiagnosticCategory)

_ERROR_CATEGORIES = frozenset({
    DiagnosticCategory.CYCLE_DETECTED,
    DiagnosticCategory.UNKNOWN_ACTIVITY,
})


class Severity(Enum):
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding tied to the nodes/edges/levels it concerns."""

    category: DiagnosticCategory
    severity: Severity
    locus: tuple[str, ...]
    message: str

    @classmethod
    def make(cls, category: DiagnosticCategory, locus: tuple[str, ...],
             message: str) -> "Diagnostic":
        severity = Severity.ERROR if category in _ERROR_CATEGORIES else Severity.WARNING
        return cls(category, severity, locus, message)

    @property
    def sort_key(self):
        return (self.category.order, self.locus)

    def to_payload(self) -> dict:
        return {
            "category": self.category.value,
            "locus": list(self.locus),
            "message": self.message,
            "severity": self.severity.value,
        }


@dataclass
class GraphNode:
    node_id: str
    activity_id: str
    label: str
    phase: PhaseCategory
    position: tuple[float, float]
    properties: NodeProperties

    def to_payload(self) -> dict:
        return {
            "activityId": self.activity_id,
            "label": self.label,
            "nodeId": self.node_id,
            "phase": self.phase.value,
            "position": {"x": self.position[0], "y": self.position[1]},
            "properties": self.properties.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "GraphNode":
        try:
            position = payload.get("position") or {}
            return cls(
                node_id=str(payload["nodeId"]),
                activity_id=str(payload["activityId"]),
                label=str(payload.get("label", "")),
                phase=PhaseCategory.from_value(payload.get("phase", "introduction")),
                position=(float(position.get("x", 0.0)), float(position.get("y", 0.0))),
                properties=NodeProperties.from_payload(payload.get("properties") or {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed graph node: {exc}") from None


@dataclass
class GraphEdge:
    edge_id: str
    source: str
    target: str
    insertion_index: int

    def to_payload(self) -> dict:
        return {
            "edgeId": self.edge_id,
            "from": self.source,
            "insertionIndex": self.insertion_index,
            "to": self.target,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "GraphEdge":
        try:
            return cls(
                edge_id=str(payload["edgeId"]),
                source=str(payload["from"]),
                target=str(payload["to"]),
                insertion_index=int(payload["insertionIndex"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed graph edge: {exc}") from None


class LessonGraph:
    """Mutable graph state; node and edge lists stay in insertion order."""

    def __init__(self):
        self.nodes: list[GraphNode] = []
        self.edges: list[GraphEdge] = []
        self.node_counter = 0
        self.edge_counter = 0
        self.edge_index_counter = 0
        self.history = History()

    # ------------------------------------------------------------------
    # lookups

    def node(self, node_id: str) -> GraphNode:
        for node in self.nodes:
            if node.node_id == node_id:
                return node
        raise UnknownNode(f"no node {node_id!r}", locus=node_id)

    def edge(self, edge_id: str) -> GraphEdge:
        for edge in self.edges:
            if edge.edge_id == edge_id:
                return edge
        raise UnknownEdge(f"no edge {edge_id!r}", locus=edge_id)

    def has_node(self, node_id: str) -> bool:
        return any(n.node_id == node_id for n in self.nodes)

    def out_edges(self, node_id: str) -> list[GraphEdge]:
        return [e for e in self.edges if e.source == node_id]

    def in_degree(self, node_id: str) -> int:
        return sum(1 for e in self.edges if e.target == node_id)

    # ------------------------------------------------------------------
    # operations (all undoable through the document undo stack)

    def add_node(self, activity_id: str, library: LibraryBundle,
                 position: tuple[float, float] | None = None,
                 label: str | None = None) -> GraphNode:
        descriptor = library.get(activity_id)
        node = GraphNode(
            node_id="",
            activity_id=activity_id,
            label=label if label is not None else descriptor.name,
            phase=descriptor.phase,
            position=(float(position[0]), float(position[1])) if position else (0.0, 0.0),
            properties=descriptor.default_properties.copy(),
        )
        self.history.push(_AddNodeCommand(self, node))
        return node

    def remove_node(self, node_id: str) -> None:
        node = self.node(node_id)
        index = self.nodes.index(node)
        incident = [(position, edge) for position, edge in enumerate(self.edges)
                    if edge.source == node_id or edge.target == node_id]
        self.history.push(_RemoveNodeCommand(self, node, index, incident))

    def add_edge(self, source: str, target: str) -> GraphEdge:
        if source == target:
            raise SelfLoop(f"edge {source} -> {target} is a self-loop", locus=source)
        self.node(source)
        self.node(target)
        if any(e.source == source and e.target == target for e in self.edges):
            raise DuplicateEdge(f"edge {source} -> {target} already exists")
        edge = GraphEdge(edge_id="", source=source, target=target, insertion_index=-1)
        self.history.push(_AddEdgeCommand(self, edge))
        return edge

    def remove_edge(self, edge_id: str) -> None:
        edge = self.edge(edge_id)
        index = self.edges.index(edge)
        self.history.push(_RemoveEdgeCommand(self, edge, index))

    def set_properties(self, node_id: str, timing_seconds=None, message=None,
                       hint_audio=None, hint_visual=None) -> GraphNode:
        """Override activity parameters on one node; None leaves a field as is."""
        node = self.node(node_id)
        updated = node.properties.copy()
        if timing_seconds is not None:
            updated.timing_seconds = timing_seconds
        if message is not None:
            updated.message = message
        if hint_audio is not None:
            updated.hint_audio = hint_audio
        if hint_visual is not None:
            updated.hint_visual = hint_visual
        updated.validate()
        self.history.push(_SetPropertiesCommand(self, node, updated))
        return node

    def set_position(self, node_id: str, x: float, y: float) -> GraphNode:
        node = self.node(node_id)
        try:
            position = (float(x), float(y))
        except (TypeError, ValueError):
            raise InvalidProperty("position coordinates must be numbers") from None
        self.history.push(_SetPositionCommand(self, node, position))
        return node

    def replace_content(self, other: "LessonGraph") -> None:
        """Swap in another graph's nodes/edges as one undoable step."""
        self.history.push(_ReplaceGraphCommand(self, other))

    def undo(self) -> None:
        self.history.undo()

    def redo(self) -> None:
        self.history.redo()

    # ------------------------------------------------------------------
    # serialization

    def to_payload(self) -> dict:
        return {
            "edgeCounter": self.edge_counter,
            "edgeIndexCounter": self.edge_index_counter,
            "edges": [e.to_payload() for e in self.edges],
            "nodeCounter": self.node_counter,
            "nodes": [n.to_payload() for n in self.nodes],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "LessonGraph":
        if not isinstance(payload, dict):
            raise ParseError("graph section must be an object")
        graph = cls()
        graph.nodes = [GraphNode.from_payload(p) for p in payload.get("nodes", [])]
        graph.edges = [GraphEdge.from_payload(p) for p in payload.get("edges", [])]
        graph.node_counter = int(payload.get("nodeCounter", 0))
        graph.edge_counter = int(payload.get("edgeCounter", 0))
        graph.edge_index_counter = int(payload.get("edgeIndexCounter", 0))
        node_ids = {n.node_id for n in graph.nodes}
        if len(node_ids) != len(graph.nodes):
            raise ParseError("duplicate node ids in graph section")
        for edge in graph.edges:
            if edge.source not in node_ids or edge.target not in node_ids:
                raise ParseError(f"edge {edge.edge_id} references a missing node")
        return graph


# ----------------------------------------------------------------------
# graph commands


class _AddNodeCommand(Command):
    kind = "AddNode"

    def __init__(self, graph: LessonGraph, node: GraphNode):
        self.graph = graph
        self.node = node
        self.old_counter = graph.node_counter
        self.new_counter = graph.node_counter + 1
        node.node_id = f"n-{self.new_counter}"

    def apply(self):
        self.graph.nodes.append(self.node)
        self.graph.node_counter = self.new_counter

    def revert(self):
        self.graph.nodes.remove(self.node)
        self.graph.node_counter = self.old_counter


class _RemoveNodeCommand(Command):
    kind = "RemoveNode"

    def __init__(self, graph: LessonGraph, node: GraphNode, index: int,
                 incident: list[tuple[int, GraphEdge]]):
        self.graph = graph
        self.node = node
        self.index = index
        self.incident = incident

    def apply(self):
        del self.graph.nodes[self.index]
        for _position, edge in self.incident:
            self.graph.edges.remove(edge)

    def revert(self):
        self.graph.nodes.insert(self.index, self.node)
        for position, edge in self.incident:
            self.graph.edges.insert(position, edge)


class _AddEdgeCommand(Command):
    kind = "AddEdge"

    def __init__(self, graph: LessonGraph, edge: GraphEdge):
        self.graph = graph
        self.edge = edge
        self.old_edge_counter = graph.edge_counter
        self.old_index_counter = graph.edge_index_counter
        edge.edge_id = f"e-{graph.edge_counter + 1}"
        edge.insertion_index = graph.edge_index_counter

    def apply(self):
        self.graph.edges.append(self.edge)
        self.graph.edge_counter = self.old_edge_counter + 1
        self.graph.edge_index_counter = self.old_index_counter + 1

    def revert(self):
        self.graph.edges.remove(self.edge)
        self.graph.edge_counter = self.old_edge_counter
        self.graph.edge_index_counter = self.old_index_counter


class _RemoveEdgeCommand(Command):
    kind = "RemoveEdge"

    def __init__(self, graph: LessonGraph, edge: GraphEdge, index: int):
        self.graph = graph
        self.edge = edge
        self.index = index

    def apply(self):
        del self.graph.edges[self.index]

    def revert(self):
        self.graph.edges.insert(self.index, self.edge)


class _SetPropertiesCommand(Command):
    kind = "SetNodeProperties"

    def __init__(self, graph: LessonGraph, node: GraphNode, updated: NodeProperties):
        self.node = node
        self.old_properties = node.properties
        self.new_properties = updated

    def apply(self):
        self.node.properties = self.new_properties

    def revert(self):
        self.node.properties = self.old_properties


class _SetPositionCommand(Command):
    kind = "SetNodePosition"

    def __init__(self, graph: LessonGraph, node: GraphNode, position: tuple[float, float]):
        self.node = node
        self.old_position = node.position
        self.new_position = position

    def apply(self):
        self.node.position = self.new_position

    def revert(self):
        self.node.position = self.old_position


class _ReplaceGraphCommand(Command):
    kind = "ReplaceGraph"

    def __init__(self, graph: LessonGraph, other: LessonGraph):
        self.graph = graph
        self.old_state = (list(graph.nodes), list(graph.edges), graph.node_counter,
                          graph.edge_counter, graph.edge_index_counter)
        self.new_state = (list(other.nodes), list(other.edges), other.node_counter,
                          other.edge_counter, other.edge_index_counter)

    def _install(self, state):
        nodes, edges, node_counter, edge_counter, index_counter = state
        self.graph.nodes[:] = nodes
        self.graph.edges[:] = edges
        self.graph.node_counter = node_counter
        self.graph.edge_counter = edge_counter
        self.graph.edge_index_counter = index_counter

    def apply(self):
        self._install(self.new_state)

    def revert(self):
        self._install(self.old_state)


# ----------------------------------------------------------------------
# analyses


def _adjacency(graph: LessonGraph) -> dict[str, list[str]]:
    """Outgoing neighbors per node, in edge insertion order."""
    neighbors: dict[str, list[str]] = {node.node_id: [] for node in graph.nodes}
    for edge in sorted(graph.edges, key=lambda e: e.insertion_index):
        neighbors[edge.source].append(edge.target)
    return neighbors


def _cyclic_components(graph: LessonGraph) -> list[list[str]]:
    """Strongly connected components of size > 1, via iterative Tarjan."""
    adjacency = _adjacency(graph)
    position = {node.node_id: i for i, node in enumerate(graph.nodes)}
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = 0
    components: list[list[str]] = []

    for root in [node.node_id for node in graph.nodes]:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(adjacency[root]))]
        while work:
            current, children = work[-1]
            child = next(children, None)
            if child is not None:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(adjacency[child])))
                elif child in on_stack:
                    low[current] = min(low[current], index[child])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[current])
            if low[current] == index[current]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == current:
                        break
                if len(component) > 1:
                    component.sort(key=position.__getitem__)
                    components.append(component)
    components.sort(key=lambda c: position[c[0]])
    return components


def _weak_components(graph: LessonGraph) -> list[list[str]]:
    """Connected components ignoring direction, roots in insertion order."""
    undirected: dict[str, list[str]] = {node.node_id: [] for node in graph.nodes}
    for edge in graph.edges:
        undirected[edge.source].append(edge.target)
        undirected[edge.target].append(edge.source)
    seen: set[str] = set()
    components = []
    for node in graph.nodes:
        if node.node_id in seen:
            continue
        component = []
        frontier = [node.node_id]
        seen.add(node.node_id)
        while frontier:
            current = frontier.pop()
            component.append(current)
            for neighbor in undirected[current]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    frontier.append(neighbor)
        components.append(component)
    return components


def validate(graph: LessonGraph, library: LibraryBundle | None = None,
             stale_levels=()) -> list[Diagnostic]:
    """All findings for a graph, deterministically ordered by (category, locus).

    An empty result means the graph is a single simple chain covering every
    node. Passing the active ``library`` enables unknown-activity checks;
    ``stale_levels`` (from the owning plan) surface as StalePlan warnings.
    """
    diagnostics: list[Diagnostic] = []
    out_count: dict[str, int] = {}
    in_count: dict[str, int] = {}
    for edge in graph.edges:
        out_count[edge.source] = out_count.get(edge.source, 0) + 1
        in_count[edge.target] = in_count.get(edge.target, 0) + 1

    for node in graph.nodes:
        outgoing = out_count.get(node.node_id, 0)
        incoming = in_count.get(node.node_id, 0)
        if outgoing > 1:
            diagnostics.append(Diagnostic.make(
                DiagnosticCategory.MULTIPLE_OUTGOING, (node.node_id,),
                f"node {node.node_id} has {outgoing} outgoing edges"))
        if incoming > 1:
            diagnostics.append(Diagnostic.make(
                DiagnosticCategory.MULTIPLE_INCOMING, (node.node_id,),
                f"node {node.node_id} has {incoming} incoming edges"))
        if len(graph.nodes) > 1 and outgoing == 0 and incoming == 0:
            diagnostics.append(Diagnostic.make(
                DiagnosticCategory.ISOLATED_NODE, (node.node_id,),
                f"node {node.node_id} is not connected to the sequence"))
        if library is not None and node.activity_id not in library:
            diagnostics.append(Diagnostic.make(
                DiagnosticCategory.UNKNOWN_ACTIVITY, (node.node_id,),
                f"node {node.node_id} references activity {node.activity_id!r} "
                f"missing from library {library.library_id!r}"))

    components = _weak_components(graph)
    if len(components) > 1:
        heads = tuple(component[0] for component in components)
        diagnostics.append(Diagnostic.make(
            DiagnosticCategory.MULTIPLE_SEQUENCES, heads,
            f"graph splits into {len(components)} separate sequences"))

    for component in _cyclic_components(graph):
        diagnostics.append(Diagnostic.make(
            DiagnosticCategory.CYCLE_DETECTED, tuple(component),
            "cycle through " + " -> ".join(component)))

    for level in GENERATABLE_LEVELS:
        if level in set(stale_levels):
            diagnostics.append(Diagnostic.make(
                DiagnosticCategory.STALE_PLAN, (level.key,),
                f"level {level.key} predates an edit made above it"))

    diagnostics.sort(key=lambda d: d.sort_key)
    return diagnostics


def linearize(graph: LessonGraph) -> list[str]:
    """Deterministic DFS order of all node ids.

    Roots (zero in-degree nodes) are visited in node insertion order and
    outgoing edges in edge insertion order, so two structurally equal graphs
    always linearize identically. Raises on empty or cyclic graphs.
    """
    if not graph.nodes:
        raise EmptyGraph("cannot linearize an empty graph")
    if _cyclic_components(graph):
        raise CyclicGraph("cannot linearize a cyclic graph")
    adjacency = _adjacency(graph)
    incoming: dict[str, int] = {node.node_id: 0 for node in graph.nodes}
    for edge in graph.edges:
        incoming[edge.target] += 1
    roots = [node.node_id for node in graph.nodes if incoming[node.node_id] == 0]
    order: list[str] = []
    visited: set[str] = set()
    for root in roots:
        if root in visited:
            continue
        stack = [root]
        while stack:
            current = stack.pop()
            if current in visited:
                continue
            visited.add(current)
            order.append(current)
            for neighbor in reversed(adjacency[current]):
                if neighbor not in visited:
                    stack.append(neighbor)
    return order


def chain_from_sequence(activity_ids: list[str], library: LibraryBundle) -> LessonGraph:
    """Build a simple chain graph over ``activity_ids`` with auto-layout.

    Nodes take their label, phase, and default properties from the library;
    positions run left to right with rows wrapped every six nodes.
    """
    if not activity_ids:
        raise EmptyGraph("cannot build a lesson graph from an empty sequence")
    graph = LessonGraph()
    previous: GraphNode | None = None
    for position, activity_id in enumerate(activity_ids):
        column = position % CHAIN_ROW_LENGTH
        row = position // CHAIN_ROW_LENGTH
        node = graph.add_node(
            activity_id, library,
            position=(column * CHAIN_X_SPACING, row * CHAIN_ROW_HEIGHT),
        )
        if previous is not None:
            graph.add_edge(previous.node_id, node.node_id)
        previous = node
    graph.history = History()
    return graph
