"""Dataset model: node set, triangle index triples and the clockwise boundary cycle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence


class Point(NamedTuple):
    x: float
    y: float


class Edge(NamedTuple):
    """Undirected edge keyed canonically with ``a < b``."""

    a: int
    b: int

    @classmethod
    def of(cls, i: int, j: int) -> "Edge":
        if i == j:
            raise ValueError(f"edge endpoints must differ, got ({i}, {j})")
        return cls(i, j) if i < j else cls(j, i)


class PreconditionViolation(ValueError):
    """Base class for malformed datasets."""

    def __init__(self, message: str, where: object = None):
        super().__init__(message)
        self.where = where


class NonFinitePoint(PreconditionViolation):
    pass


class DuplicateNode(PreconditionViolation):
    def __init__(self, i: int, j: int):
        super().__init__(f"nodes {i} and {j} have identical coordinates", (i, j))
        self.i, self.j = i, j


class IndexOutOfRange(PreconditionViolation):
    pass


class DegenerateTriangleIndices(PreconditionViolation):
    def __init__(self, t: int):
        super().__init__(f"triangle {t} repeats a node index", t)
        self.t = t


class MalformedBoundary(PreconditionViolation):
    pass


@dataclass(frozen=True)
class MeshDataset:
    nodes: tuple[Point, ...]
    triangles: tuple[tuple[int, int, int], ...]
    boundary: tuple[int, ...]
    constrained_edges: frozenset[Edge] = field(default_factory=frozenset)

    @classmethod
    def build(
        cls,
        nodes: Sequence[Sequence[float]],
        triangles: Sequence[Sequence[int]],
        boundary: Sequence[int],
        constrained_edges: Sequence[Sequence[int]] = (),
    ) -> "MeshDataset":
        """Coerce plain sequences into the immutable model without validating."""
        return cls(
            nodes=tuple(Point(float(x), float(y)) for x, y in nodes),
            triangles=tuple((int(a), int(b), int(c)) for a, b, c in triangles),
            boundary=tuple(int(i) for i in boundary),
            constrained_edges=frozenset(Edge.of(int(i), int(j)) for i, j in constrained_edges),
        )

    @property
    def n_points(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def with_triangles(self, triangles: Sequence[Sequence[int]]) -> "MeshDataset":
        return MeshDataset(
            self.nodes,
            tuple(tuple(t) for t in triangles),  # type: ignore[misc]
            self.boundary,
            self.constrained_edges,
        )

    def boundary_edges(self) -> list[Edge]:
        b = self.boundary
        return [Edge.of(b[k], b[(k + 1) % len(b)]) for k in range(len(b))]


def validate_dataset_preconditions(d: MeshDataset) -> None:
    """Raise the first :class:`PreconditionViolation` found, scanning nodes, triangles, boundary."""
    n_p = len(d.nodes)
    if n_p < 3:
        raise PreconditionViolation(f"need at least 3 nodes, got {n_p}", "nodes")
    seen: dict[Point, int] = {}
    for i, p in enumerate(d.nodes):
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise NonFinitePoint(f"node {i} has a non-finite coordinate", i)
        # -0.0 == 0.0, so normalise the key to catch that duplicate too
        key = Point(p.x + 0.0, p.y + 0.0)
        j = seen.get(key)
        if j is not None:
            raise DuplicateNode(j, i)
        seen[key] = i

    if len(d.triangles) < 1:
        raise PreconditionViolation("need at least one triangle", "triangles")
    for t, tri in enumerate(d.triangles):
        if len(tri) != 3:
            raise IndexOutOfRange(f"triangle {t} does not have 3 indices", ("triangle", t))
        for v in tri:
            if not 0 <= v < n_p:
                raise IndexOutOfRange(f"triangle {t} references node {v} outside [0, {n_p})", ("triangle", t))
        if tri[0] == tri[1] or tri[1] == tri[2] or tri[0] == tri[2]:
            raise DegenerateTriangleIndices(t)

    b = d.boundary
    if len(b) < 3:
        raise MalformedBoundary(f"boundary has {len(b)} entries, need at least 3", "boundary")
    used: set[int] = set()
    for k, v in enumerate(b):
        if not 0 <= v < n_p:
            raise IndexOutOfRange(f"boundary entry {k} references node {v} outside [0, {n_p})", ("boundary", k))
        if v in used:
            raise MalformedBoundary(f"boundary entry {k} repeats node {v}", ("boundary", k))
        used.add(v)

    for e in d.constrained_edges:
        if not (0 <= e.a < n_p and 0 <= e.b < n_p):
            raise IndexOutOfRange(f"constrained edge {tuple(e)} out of range", ("constrained", tuple(e)))


def boundary_cycles_equivalent(a: Sequence[int], b: Sequence[int]) -> bool:
    """True iff ``b`` is a rotation of ``a`` (same direction, no reflection)."""
    n = len(a)
    if n != len(b):
        return False
    if n == 0:
        return True
    return _find(list(b) + list(b), list(a)) >= 0


def _find(text: list[int], pattern: list[int]) -> int:
    # Knuth-Morris-Pratt over integer sequences
    m = len(pattern)
    fail = [0] * m
    k = 0
    for i in range(1, m):
        while k and pattern[i] != pattern[k]:
            k = fail[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i] = k
    k = 0
    for i, c in enumerate(text):
        while k and c != pattern[k]:
            k = fail[k - 1]
        if c == pattern[k]:
            k += 1
            if k == m:
                return i - m + 1
    return -1


class BoundaryCycle:
    """Mutable cyclic node sequence with a cursor, stored as a doubly linked ring.

    Nodes never repeat inside the ring, so node indices double as link handles.
    """

    __slots__ = ("next", "prev", "cursor")

    def __init__(self, indices: Sequence[int]):
        if len(indices) < 3:
            raise ValueError("a boundary cycle needs at least 3 nodes")
        if len(set(indices)) != len(indices):
            raise ValueError("boundary cycle repeats a node")
        n = len(indices)
        self.next = {indices[k]: indices[(k + 1) % n] for k in range(n)}
        self.prev = {indices[(k + 1) % n]: indices[k] for k in range(n)}
        self.cursor = indices[0]

    def __len__(self) -> int:
        return len(self.next)

    def __contains__(self, v: int) -> bool:
        return v in self.next

    def insert_after(self, a: int, c: int) -> None:
        b = self.next[a]
        self.next[a] = c
        self.next[c] = b
        self.prev[c] = a
        self.prev[b] = c

    def remove(self, v: int) -> None:
        p, n = self.prev.pop(v), self.next.pop(v)
        self.next[p] = n
        self.prev[n] = p
        if self.cursor == v:
            self.cursor = n

    def to_list(self, start: int | None = None) -> list[int]:
        s = self.cursor if start is None else start
        out = [s]
        v = self.next[s]
        while v != s:
            out.append(v)
            v = self.next[v]
        return out


@dataclass
class PolygonState:
    boundary: BoundaryCycle
    absorbed: set[int] = field(default_factory=set)

    @property
    def absorbed_count(self) -> int:
        return len(self.absorbed)
