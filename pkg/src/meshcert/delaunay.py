"""Local Delaunay verification and Lawson flip repair for validated triangulations."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .edge_map import EdgeMap, build_edge_map
from .model import Edge, MeshDataset
from .predicates import NEGATIVE, POSITIVE, incircle, orientation


class NonConvexQuad(RuntimeError):
    def __init__(self, edge: Edge):
        super().__init__(f"flipping edge {tuple(edge)} would invert a triangle; mesh state is corrupt")
        self.edge = edge


class FlipLimitExceeded(RuntimeError):
    pass


@dataclass
class DelaunayReport:
    violating_edges: list[Edge] = field(default_factory=list)
    flips_performed: int = 0

    @property
    def all_delaunay(self) -> bool:
        return not self.violating_edges

    @property
    def verdict(self) -> str:
        return "AllDelaunay" if self.all_delaunay else "ViolationsFound"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "violating_edges": [list(e) for e in self.violating_edges],
            "flips_performed": self.flips_performed,
        }


def _oriented(tri: Sequence[int], e: Edge) -> tuple[int, int, int]:
    """Rotate a CCW triple so it reads (i, j, k) with {i, j} == e."""
    v0, v1, v2 = tri
    if v2 not in e:
        return v0, v1, v2
    if v0 not in e:
        return v1, v2, v0
    return v2, v0, v1


def _edge_holds(nodes, triangles, e: Edge, ts: Sequence[int]) -> bool:
    if len(ts) == 1:
        return True
    i, j, k = _oriented(triangles[ts[0]], e)
    l = sum(triangles[ts[1]]) - i - j
    return incircle(nodes[i], nodes[j], nodes[k], nodes[l]) != NEGATIVE


def is_locally_delaunay(d: MeshDataset, e: Edge, em: EdgeMap) -> bool:
    """Boundary edges hold trivially; cocircular quads count as Delaunay."""
    return _edge_holds(d.nodes, d.triangles, e, em[e])


def constrained_set(d: MeshDataset, extra: Iterable[Edge] = ()) -> set[Edge]:
    return set(d.boundary_edges()) | set(d.constrained_edges) | set(extra)


def check_delaunay(
    d: MeshDataset, em: EdgeMap | None = None, constrained: Iterable[Edge] | None = None
) -> DelaunayReport:
    if em is None:
        em = build_edge_map(d.triangles)
    fixed = constrained_set(d, constrained or ())
    bad = [
        e for e, ts in em.items()
        if len(ts) == 2 and e not in fixed and not _edge_holds(d.nodes, d.triangles, e, ts)
    ]
    return DelaunayReport(sorted(bad))


def repair_flip(
    d: MeshDataset, em: EdgeMap | None = None, constrained: Iterable[Edge] | None = None
) -> tuple[MeshDataset, DelaunayReport]:
    """Flip non-Delaunay, non-constrained edges until none remain.

    FIFO worklist; after a flip the four edges of the surrounding quad are
    re-queued unless already pending.  Returns a new dataset (the input is
    not modified) and the post-repair report.
    """
    P = d.nodes
    tris = [list(t) for t in d.triangles]
    em = em.copy() if em is not None else build_edge_map(tris)
    entries = em.entries
    fixed = constrained_set(d, constrained or ())

    queue = deque(sorted(e for e, ts in entries.items() if len(ts) == 2 and e not in fixed))
    pending = set(queue)
    cap = len(P) ** 2
    flips = 0
    while queue:
        e = queue.popleft()
        pending.discard(e)
        ts = entries.get(e)
        if ts is None or len(ts) != 2:
            continue
        t1, t2 = ts
        i, j, k = _oriented(tris[t1], e)
        l = sum(tris[t2]) - i - j
        if incircle(P[i], P[j], P[k], P[l]) != NEGATIVE:
            continue
        if orientation(P[k], P[l], P[j]) != POSITIVE or orientation(P[l], P[k], P[i]) != POSITIVE:
            raise NonConvexQuad(e)
        tris[t1] = [k, l, j]
        tris[t2] = [l, k, i]
        del entries[e]
        entries[Edge.of(k, l)] = [t1, t2]
        lj = entries[Edge.of(l, j)]
        lj[lj.index(t2)] = t1
        ki = entries[Edge.of(k, i)]
        ki[ki.index(t1)] = t2
        flips += 1
        if flips > cap:
            raise FlipLimitExceeded(f"more than {cap} flips; repair is not converging")
        for u, v in ((i, k), (k, j), (j, l), (l, i)):
            f = Edge.of(u, v)
            if f not in pending and f not in fixed and len(entries[f]) == 2:
                queue.append(f)
                pending.add(f)

    out = d.with_triangles(tris)
    report = check_delaunay(out, em, constrained)
    report.flips_performed = flips
    return out, report
