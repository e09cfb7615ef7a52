"""Polygonal sequence-driven triangulation validation.

A polygon is grown from one seed triangle by absorbing, one at a time, the
triangle across the boundary edge under the cursor.  Each attachment is
checked with exact predicates (apex strictly left of the directed boundary
edge, new edges crossing no boundary edge), and the grown boundary must end
up as a rotation of the input boundary.  The boundary is kept clockwise, so
the polygon always lies to the right of each directed boundary edge.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .edge_map import EdgeSharedByThree, build_edge_map
from .interval_tree import SegmentIntervalIndex
from .model import (
    BoundaryCycle,
    Edge,
    MeshDataset,
    PolygonState,
    PreconditionViolation,
    boundary_cycles_equivalent,
    validate_dataset_preconditions,
)
from .predicates import (
    NEGATIVE,
    POSITIVE,
    ZERO,
    PredicateStats,
    collect_stats,
    orientation,
    segments_intersect,
)


class AdjacencyCategory(Enum):
    THREE_PTS_ONE_EDGE = "i"
    THREE_PTS_TWO_EDGES = "ii"
    TWO_PTS_ONE_EDGE = "iii"
    THREE_PTS_THREE_EDGES = "iv"
    ILLEGAL = "illegal"


_TABLE = {
    (3, 1): AdjacencyCategory.THREE_PTS_ONE_EDGE,
    (3, 2): AdjacencyCategory.THREE_PTS_TWO_EDGES,
    (2, 1): AdjacencyCategory.TWO_PTS_ONE_EDGE,
    (3, 3): AdjacencyCategory.THREE_PTS_THREE_EDGES,
}


def category_from_counts(shared_points: int, shared_edges: int) -> AdjacencyCategory:
    return _TABLE.get((shared_points, shared_edges), AdjacencyCategory.ILLEGAL)


class FailureKind(str, Enum):
    ORIENTATION = "orientation"
    OVERLAP = "overlap"
    ILLEGAL_ADJACENCY = "illegalAdjacency"
    BOUNDARY_MISMATCH = "boundaryMismatch"
    UNREACHABLE = "unreachableTriangles"
    EDGE_SHARED_BY_THREE = "edgeSharedByThree"
    PRECONDITION = "precondition"


@dataclass
class Failure:
    kind: FailureKind
    message: str
    triangle: int | None = None
    edge: tuple[int, int] | None = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "message": self.message,
            "triangle": self.triangle,
            "edge": list(self.edge) if self.edge is not None else None,
        }


@dataclass
class ValidationReport:
    failure: Failure | None
    stats: PredicateStats = field(default_factory=PredicateStats)
    triangles_absorbed: int = 0
    boundary_length: int = 0
    elapsed: float = 0.0

    @property
    def valid(self) -> bool:
        return self.failure is None

    @property
    def verdict(self) -> str:
        return "Valid" if self.failure is None else "Invalid"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failure": self.failure.as_dict() if self.failure else None,
            "stats": self.stats.as_dict(),
            "triangles_absorbed": self.triangles_absorbed,
            "boundary_length": self.boundary_length,
            "elapsed": float(f"{self.elapsed:.3g}"),
        }


class AttachmentError(Exception):
    def __init__(self, failure: Failure):
        super().__init__(failure.message)
        self.failure = failure


def normalize_orientation(d: MeshDataset) -> MeshDataset:
    """Reorder every clockwise triple to counterclockwise; degenerate ones are left alone."""
    P = d.nodes
    out = []
    for a, b, c in d.triangles:
        if orientation(P[a], P[b], P[c]) == NEGATIVE:
            out.append((a, c, b))
        else:
            out.append((a, b, c))
    return d.with_triangles(out)


def classify_adjacency(state: PolygonState, a: int, b: int, c: int) -> AdjacencyCategory:
    """Category of the triangle (a, b, c) attached across the boundary edge a -> b."""
    ring = state.boundary
    if c not in ring:
        return category_from_counts(2, 1)
    shared_edges = 1 + (ring.next[b] == c) + (ring.next[c] == a)
    return category_from_counts(3, shared_edges)


def verify_adjacent_triangle(
    nodes: Sequence,
    index: SegmentIntervalIndex,
    a: int,
    b: int,
    c: int,
    free_edges: Sequence[tuple[int, int]],
    triangle: int | None = None,
) -> None:
    """Raise :class:`AttachmentError` unless c is strictly left of a->b and no free edge crosses the boundary."""
    o = orientation(nodes[a], nodes[b], nodes[c])
    if o != POSITIVE:
        if o == ZERO:
            raise AttachmentError(Failure(
                FailureKind.ORIENTATION,
                f"triangle {triangle} is degenerate: apex {c} is collinear with boundary edge {a}->{b}",
                triangle, (a, b),
            ))
        raise AttachmentError(Failure(
            FailureKind.OVERLAP,
            f"apex {c} of triangle {triangle} lies right of boundary edge {a}->{b}, inside the polygon",
            triangle, (a, b),
        ))
    for u, v in free_edges:
        pu, pv = nodes[u], nodes[v]
        for s in index.segment_search(pu, pv):
            if segments_intersect(pu, pv, nodes[s[0]], nodes[s[1]]):
                raise AttachmentError(Failure(
                    FailureKind.OVERLAP,
                    f"edge {u}-{v} of triangle {triangle} intersects boundary edge {s[0]}-{s[1]}",
                    triangle, (s[0], s[1]),
                ))


def merge_triangle(
    state: PolygonState,
    nodes: Sequence,
    index: SegmentIntervalIndex,
    t: int,
    a: int,
    b: int,
    c: int,
    category: AdjacencyCategory,
) -> None:
    """Update boundary ring, cursor, segment index and absorbed set for an accepted attachment."""
    ring = state.boundary
    if category is AdjacencyCategory.THREE_PTS_ONE_EDGE:
        ring.cursor = b
        return
    if category is AdjacencyCategory.TWO_PTS_ONE_EDGE:
        index.remove(Edge.of(a, b))
        ring.insert_after(a, c)
        index.insert(Edge.of(a, c), nodes[a], nodes[c])
        index.insert(Edge.of(c, b), nodes[c], nodes[b])
        ring.cursor = c
    elif category is AdjacencyCategory.THREE_PTS_TWO_EDGES:
        if ring.next[b] == c:
            index.remove(Edge.of(a, b))
            index.remove(Edge.of(b, c))
            ring.remove(b)
            index.insert(Edge.of(a, c), nodes[a], nodes[c])
            ring.cursor = a
        else:
            index.remove(Edge.of(c, a))
            index.remove(Edge.of(a, b))
            ring.remove(a)
            index.insert(Edge.of(c, b), nodes[c], nodes[b])
            ring.cursor = c
    else:
        raise ValueError(f"cannot merge a triangle of category {category}")
    state.absorbed.add(t)


def _same_cyclic_order(tri: Sequence[int], a: int, b: int) -> bool:
    v0, v1, v2 = tri
    return (v0 == a and v1 == b) or (v1 == a and v2 == b) or (v2 == a and v0 == b)


def validate(d: MeshDataset, normalize: bool = False) -> ValidationReport:
    """Run the full validation and return a report; never raises on a well-formed dataset object."""
    start = time.perf_counter()
    with collect_stats() as stats:
        report = _validate(d, normalize)
    report.stats = stats
    report.elapsed = time.perf_counter() - start
    return report


def _validate(d: MeshDataset, normalize: bool) -> ValidationReport:
    try:
        validate_dataset_preconditions(d)
    except PreconditionViolation as exc:
        return ValidationReport(Failure(FailureKind.PRECONDITION, str(exc)))
    if normalize:
        d = normalize_orientation(d)

    try:
        em = build_edge_map(d.triangles)
    except EdgeSharedByThree as exc:
        return ValidationReport(Failure(
            FailureKind.EDGE_SHARED_BY_THREE, str(exc), exc.triangle_ids[-1], tuple(exc.edge)
        ))

    P = d.nodes
    T = d.triangles
    seed = None
    for t, (a, b, c) in enumerate(T):
        o = orientation(P[a], P[b], P[c])
        if o == ZERO:
            continue
        if o == NEGATIVE:
            return ValidationReport(Failure(
                FailureKind.ORIENTATION, f"seed triangle {t} is clockwise", t
            ))
        seed = t
        break
    if seed is None:
        return ValidationReport(Failure(
            FailureKind.ORIENTATION, "every triangle is degenerate", 0
        ))

    a, b, c = T[seed]
    ring = BoundaryCycle([a, c, b])
    state = PolygonState(ring, {seed})
    index = SegmentIntervalIndex()
    for u, v in ((a, c), (c, b), (b, a)):
        index.insert(Edge.of(u, v), P[u], P[v])

    n_t = len(T)
    absorbed = state.absorbed
    entries = em.entries
    nxt = ring.next
    idle = 0

    def report(failure: Failure | None) -> ValidationReport:
        return ValidationReport(failure, triangles_absorbed=len(absorbed), boundary_length=len(ring))

    while len(absorbed) < n_t:
        a = ring.cursor
        b = nxt[a]
        ts = entries[Edge(a, b) if a < b else Edge(b, a)]
        t = None
        for cand in ts:
            if cand not in absorbed:
                t = cand
                break
        if t is None:
            ring.cursor = b
            idle += 1
            if idle >= len(ring):
                return report(Failure(
                    FailureKind.UNREACHABLE,
                    f"{n_t - len(absorbed)} triangles cannot be reached from the grown polygon",
                    None, (a, b),
                ))
            continue

        tri = T[t]
        c = tri[0] + tri[1] + tri[2] - a - b
        if c not in nxt:
            category = AdjacencyCategory.TWO_PTS_ONE_EDGE
            free = ((a, c), (c, b))
        else:
            on_b_side = nxt[b] == c
            on_a_side = nxt[c] == a
            if on_b_side and on_a_side:
                return report(Failure(
                    FailureKind.ILLEGAL_ADJACENCY,
                    f"triangle {t} would close the boundary onto itself (3 points 3 edges shared)",
                    t, (a, b),
                ))
            if not (on_b_side or on_a_side):
                # three points one edge: attaching would pinch the boundary
                ring.cursor = b
                idle += 1
                if idle >= len(ring):
                    return report(Failure(
                        FailureKind.UNREACHABLE,
                        f"{n_t - len(absorbed)} triangles cannot be reached without enclosing an unvalidated region",
                        t, (a, b),
                    ))
                continue
            category = AdjacencyCategory.THREE_PTS_TWO_EDGES
            free = ((a, c),) if on_b_side else ((c, b),)

        try:
            verify_adjacent_triangle(P, index, a, b, c, free, t)
        except AttachmentError as exc:
            return report(exc.failure)
        if not _same_cyclic_order(tri, a, b):
            return report(Failure(
                FailureKind.ORIENTATION, f"triangle {t} is stored clockwise", t, (a, b)
            ))
        merge_triangle(state, P, index, t, a, b, c, category)
        idle = 0

    final = ring.to_list()
    if not boundary_cycles_equivalent(final, d.boundary):
        return report(Failure(
            FailureKind.BOUNDARY_MISMATCH,
            f"grown boundary ({len(final)} nodes) is not a rotation of the input boundary ({len(d.boundary)} nodes)",
        ))
    return report(None)


# --------------------------------------------------------------------------
# quadratic reference check


def _scaled_coordinates(d: MeshDataset) -> list[tuple[int, int]]:
    ratios = [(p.x.as_integer_ratio(), p.y.as_integer_ratio()) for p in d.nodes]
    shift = max(max(rx[1].bit_length(), ry[1].bit_length()) for rx, ry in ratios) - 1
    return [
        (rx[0] << (shift - rx[1].bit_length() + 1), ry[0] << (shift - ry[1].bit_length() + 1))
        for rx, ry in ratios
    ]


def _orient_int(p, q, r) -> int:
    return (p[0] - r[0]) * (q[1] - r[1]) - (q[0] - r[0]) * (p[1] - r[1])


def _interiors_disjoint(Q, t1: Sequence[int], t2: Sequence[int]) -> bool:
    # separating-axis test on exact integer coordinates; both triangles CCW
    for s, o in ((t1, t2), (t2, t1)):
        for k in range(3):
            p, q = Q[s[k]], Q[s[(k + 1) % 3]]
            if all(_orient_int(p, q, Q[v]) <= 0 for v in o):
                return True
    return False


def _inside_edge(p, q, r) -> bool:
    # r on the open segment pq; the box test is cheaper, so it goes first
    if not (min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])):
        return False
    return r != p and r != q and _orient_int(p, q, r) == 0


def brute_force_valid(d: MeshDataset) -> bool:
    """Pairwise reference check, independent of the polygon-growing validator.

    A dataset passes iff every triangle is strictly counterclockwise, no
    edge has more than two triangles, no two triangles have overlapping
    interiors, no triangle vertex lies inside another triangle's edge,
    the triangle areas sum to the area enclosed by the clockwise boundary,
    and every boundary edge is a triangle edge.  Bounding boxes only prune
    pairs that cannot touch; every retained decision is exact.
    """
    try:
        validate_dataset_preconditions(d)
    except PreconditionViolation:
        return False
    P = d.nodes
    T = d.triangles
    Q = _scaled_coordinates(d)
    for a, b, c in T:
        if _orient_int(Q[a], Q[b], Q[c]) <= 0:
            return False
    try:
        em = build_edge_map(T)
    except EdgeSharedByThree:
        return False

    boxes = []
    for t, tri in enumerate(T):
        xs = [P[v].x for v in tri]
        ys = [P[v].y for v in tri]
        boxes.append((min(xs), max(xs), min(ys), max(ys), t))
    boxes.sort()
    active: list[tuple] = []
    for box in boxes:
        x0, x1, y0, y1, t = box
        active = [o for o in active if o[1] >= x0]
        for ox0, ox1, oy0, oy1, s in active:
            if oy1 < y0 or y1 < oy0:
                continue
            if not _interiors_disjoint(Q, T[s], T[t]):
                return False
            for u, w in ((T[s], T[t]), (T[t], T[s])):
                for k in range(3):
                    p, q = Q[u[k]], Q[u[(k + 1) % 3]]
                    for v in w:
                        if v not in u and _inside_edge(p, q, Q[v]):
                            return False
        active.append(box)

    twice_area = 0
    for a, b, c in T:
        (xa, ya), (xb, yb), (xc, yc) = Q[a], Q[b], Q[c]
        twice_area += (xb - xa) * (yc - ya) - (yb - ya) * (xc - xa)
    B = d.boundary
    shoelace = 0
    for k in range(len(B)):
        (x0, y0), (x1, y1) = Q[B[k]], Q[B[(k + 1) % len(B)]]
        shoelace += x0 * y1 - x1 * y0
    if twice_area != -shoelace:
        return False
    return all(e in em for e in d.boundary_edges())
