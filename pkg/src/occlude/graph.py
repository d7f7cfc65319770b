"""Scene objects, the occlusion graph, and front-to-back ordering.

Edges are ``(occluder, occluded)`` pairs: the first object sits in front of
the second. Ordering is a stable Kahn sort, so objects that no edge relates
keep their input order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .exceptions import CycleError


@dataclass(frozen=True)
class SceneObject:
    id: str
    prompt_tokens: tuple[str, ...] = ()
    bbox: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)
    opacity: float = 0.8
    subject_index: int | None = None
    color: tuple[float, float, float] | None = None
    embedding_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "prompt_tokens", tuple(self.prompt_tokens))
        object.__setattr__(self, "bbox", tuple(float(v) for v in self.bbox))
        if self.color is not None:
            object.__setattr__(self, "color", tuple(float(v) for v in self.color))

    def replace(self, **changes) -> SceneObject:
        fields = {
            "id": self.id,
            "prompt_tokens": self.prompt_tokens,
            "bbox": self.bbox,
            "opacity": self.opacity,
            "subject_index": self.subject_index,
            "color": self.color,
            "embedding_seed": self.embedding_seed,
        }
        fields.update(changes)
        return SceneObject(**fields)


@dataclass(frozen=True)
class OcclusionGraph:
    objects: tuple[SceneObject, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))

    @property
    def ids(self) -> list[str]:
        return [obj.id for obj in self.objects]

    def get(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(object_id)

    def without(self, object_id: str) -> OcclusionGraph:
        """Return the graph with one object removed and everyone else's depth kept.

        Plain deletion can reorder the survivors under the input-order tie
        rule, so the remaining objects are re-listed in their current
        front-to-back order and edges through the removed object are bridged.
        """
        self.get(object_id)
        order = [oid for oid in topological_order(self) if oid != object_id]
        front = [a for a, b in self.edges if b == object_id]
        behind = [b for a, b in self.edges if a == object_id]
        edges = [e for e in self.edges if object_id not in e]
        edges += [(a, b) for a in front for b in behind if (a, b) not in edges]
        return OcclusionGraph(objects=[self.get(oid) for oid in order], edges=edges)

    def with_object(self, obj: SceneObject) -> OcclusionGraph:
        """Return the graph with the same-id object replaced by ``obj``."""
        self.get(obj.id)
        return OcclusionGraph(
            objects=[obj if o.id == obj.id else o for o in self.objects],
            edges=self.edges,
        )


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    ids: tuple[str, ...] = ()
    path: str = ""

    def as_dict(self) -> dict:
        return {"code": self.code, "path": self.path, "ids": list(self.ids), "message": self.message}


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __len__(self):
        return len(self.issues)

    def __iter__(self):
        return iter(self.issues)

    def codes(self) -> list[str]:
        return [issue.code for issue in self.issues]

    def as_dict(self) -> dict:
        return {"ok": self.ok, "issues": [issue.as_dict() for issue in self.issues]}


def _object_issues(obj: SceneObject, path: str) -> list[Issue]:
    issues = []
    ids = (obj.id,)
    if len(obj.bbox) != 4 or not all(math.isfinite(v) for v in obj.bbox):
        issues.append(Issue("bbox", f"bbox must be four finite numbers, got {obj.bbox}", ids, f"{path}.bbox"))
    else:
        x0, y0, x1, y1 = obj.bbox
        if not (0.0 <= x0 < x1 <= 1.0 and 0.0 <= y0 < y1 <= 1.0):
            issues.append(
                Issue("bbox", f"bbox {obj.bbox} must satisfy 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1",
                      ids, f"{path}.bbox")
            )
    if not (isinstance(obj.opacity, (int, float)) and 0.0 <= obj.opacity < 1.0):
        issues.append(Issue("opacity", f"opacity {obj.opacity!r} must lie in [0, 1)", ids, f"{path}.opacity"))
    if obj.subject_index is not None and not 0 <= obj.subject_index < len(obj.prompt_tokens):
        issues.append(
            Issue("subject_index",
                  f"subject_index {obj.subject_index} out of range for {len(obj.prompt_tokens)} token(s)",
                  ids, f"{path}.subject_index")
        )
    if obj.color is not None and (len(obj.color) != 3 or not all(0.0 <= c <= 1.0 for c in obj.color)):
        issues.append(Issue("color", f"color {obj.color} must be an RGB triple in [0, 1]", ids, f"{path}.color"))
    return issues


def _strongly_connected(nodes: list[str], succ: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm; components come back in discovery order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    components: list[list[str]] = []

    def visit(node):
        index[node] = low[node] = len(index)
        stack.append(node)
        on_stack.add(node)
        for nxt in succ[node]:
            if nxt not in index:
                visit(nxt)
                low[node] = min(low[node], low[nxt])
            elif nxt in on_stack:
                low[node] = min(low[node], index[nxt])
        if low[node] == index[node]:
            comp = []
            while True:
                cur = stack.pop()
                on_stack.discard(cur)
                comp.append(cur)
                if cur == node:
                    break
            components.append(comp)

    for node in nodes:
        if node not in index:
            visit(node)
    return components


def find_cycles(graph: OcclusionGraph) -> list[list[str]]:
    """Return each non-trivial strongly connected component, members in input order.

    Self-edges and dangling endpoints are ignored here; ``validate_graph``
    reports them separately.
    """
    ids = graph.ids
    position = {oid: i for i, oid in enumerate(ids)}
    succ: dict[str, list[str]] = {oid: [] for oid in ids}
    for a, b in graph.edges:
        if a in succ and b in succ and a != b:
            succ[a].append(b)
    cycles = [c for c in _strongly_connected(list(succ), succ) if len(c) > 1]
    cycles = [sorted(c, key=position.__getitem__) for c in cycles]
    return sorted(cycles, key=lambda c: position[c[0]])


def validate_graph(graph: OcclusionGraph) -> ValidationReport:
    """Collect every invariant violation in ``graph``. Never raises."""
    report = ValidationReport()
    seen: set[str] = set()
    for i, obj in enumerate(graph.objects):
        path = f"objects[{i}]"
        if obj.id in seen:
            report.issues.append(Issue("duplicate_id", f"object id {obj.id!r} is not unique", (obj.id,), f"{path}.id"))
        seen.add(obj.id)
        report.issues.extend(_object_issues(obj, path))

    for k, (a, b) in enumerate(graph.edges):
        path = f"edges[{k}]"
        for endpoint in (a, b):
            if endpoint not in seen:
                report.issues.append(
                    Issue("dangling_edge", f"edge ({a!r}, {b!r}) names unknown object {endpoint!r}",
                          (endpoint,), path)
                )
        if a == b:
            report.issues.append(Issue("self_edge", f"object {a!r} cannot occlude itself", (a,), path))

    for members in find_cycles(graph):
        report.issues.append(
            Issue("cycle", f"occlusion cycle among {members}", tuple(members), "edges")
        )
    return report


def topological_order(graph: OcclusionGraph) -> list[str]:
    """Front-to-back object ids: position 0 is nearest the camera.

    Among objects whose order no edge constrains, the one listed first in
    ``graph.objects`` is emitted first.
    """
    ids = graph.ids
    position = {oid: i for i, oid in enumerate(ids)}
    indegree = dict.fromkeys(ids, 0)
    succ: dict[str, list[str]] = {oid: [] for oid in ids}
    for a, b in dict.fromkeys(graph.edges):
        succ[a].append(b)
        indegree[b] += 1

    ready = [position[oid] for oid in ids if indegree[oid] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = ids[heapq.heappop(ready)]
        order.append(node)
        for nxt in succ[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, position[nxt])

    if len(order) != len(ids):
        stuck = [oid for oid in ids if indegree[oid] > 0]
        cycles = find_cycles(graph)
        raise CycleError(cycles[0] if cycles else stuck)
    return order


def ordered_objects(graph: OcclusionGraph) -> list[SceneObject]:
    return [graph.get(oid) for oid in topological_order(graph)]
