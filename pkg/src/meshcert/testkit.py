"""Fixture generation: point distributions, a reference Delaunay triangulator and mutations.

Random streams come from numpy's PCG64 (``numpy.random.default_rng(seed)``).
Uniform variates are ``Generator.random()`` doubles; normal variates are
produced here by the Box-Muller transform of two such uniforms, so the
fixtures only depend on PCG64's documented double stream.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .edge_map import build_edge_map
from .delaunay import _oriented
from .model import Edge, MeshDataset, Point
from .predicates import NEGATIVE, POSITIVE, ZERO, incircle, on_segment, orientation


class Distribution(str, Enum):
    UNIFORM = "uniform"
    NORMAL = "normal"
    CLUSTER = "cluster"
    GRID = "grid"


@dataclass(frozen=True)
class DistributionSpec:
    kind: Distribution
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("need at least 3 points")
        object.__setattr__(self, "kind", Distribution(self.kind))


def _split(n: int, groups: int) -> list[int]:
    return [n // groups + (1 if k < n % groups else 0) for k in range(groups)]


class _Sampler:
    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def uniform(self) -> float:
        return float(self.rng.random())

    def normal_pair(self) -> tuple[float, float]:
        u1 = 1.0 - self.uniform()  # (0, 1]
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)


def generate_points(spec: DistributionSpec) -> list[Point]:
    """Deterministic, duplicate-free sample of ``spec.n`` points."""
    s = _Sampler(spec.seed)
    kind = spec.kind

    if kind is Distribution.UNIFORM:
        def draw(_group: int) -> Point:
            while True:
                x, y = s.uniform(), s.uniform()
                if x > 0.0 and y > 0.0:
                    return Point(x, y)
        groups = [0] * spec.n
    elif kind is Distribution.NORMAL:
        def draw(_group: int) -> Point:
            return Point(*s.normal_pair())
        groups = [0] * spec.n
    elif kind is Distribution.CLUSTER:
        centers = []
        for _ in range(10):
            centers.append((-5.0 + 10.0 * s.uniform(), -5.0 + 10.0 * s.uniform()))

        def draw(group: int) -> Point:
            zx, zy = s.normal_pair()
            cx, cy = centers[group]
            return Point(cx + 0.5 * zx, cy + 0.5 * zy)
        groups = [g for g, m in enumerate(_split(spec.n, 10)) for _ in range(m)]
    else:
        centers = [(float(x), float(y)) for x in range(1, 11) for y in range(1, 11)]

        def draw(group: int) -> Point:
            zx, zy = s.normal_pair()
            cx, cy = centers[group]
            return Point(cx + 0.2 * zx, cy + 0.2 * zy)
        groups = [g for g, m in enumerate(_split(spec.n, 100)) for _ in range(m)]

    seen: set[Point] = set()
    out = []
    for g in groups:
        p = draw(g)
        while p in seen:
            p = draw(g)
        seen.add(p)
        out.append(p)
    return out


# --------------------------------------------------------------------------
# reference Delaunay triangulation (Bowyer-Watson with a vertex at infinity)


class AllCollinear(ValueError):
    pass


_GHOST = -1


def _hilbert_key(ix: int, iy: int, order: int) -> int:
    d = 0
    s = 1 << (order - 1)
    while s:
        rx = 1 if ix & s else 0
        ry = 1 if iy & s else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                ix = s - 1 - ix
                iy = s - 1 - iy
            ix, iy = iy, ix
        s >>= 1
    return d


def _hilbert_order(points: Sequence[Point]) -> list[int]:
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    x0, y0 = min(xs), min(ys)
    span = max(max(xs) - x0, max(ys) - y0) or 1.0
    order = 16
    scale = ((1 << order) - 1) / span
    keys = [_hilbert_key(int((p.x - x0) * scale), int((p.y - y0) * scale), order) for p in points]
    return sorted(range(len(points)), key=keys.__getitem__)


class _Triangulation:
    """Triangles as CCW vertex triples; ``nbr[t][k]`` is the triangle across from vertex k.

    Exterior triangles carry the vertex at infinity in slot 2: (a, b, GHOST)
    stands for the outside of hull edge a->b, which is the clockwise direction
    around the hull.
    """

    def __init__(self, points: Sequence[Point]):
        self.P = points
        self.tri: list[list[int]] = []
        self.nbr: list[list[int]] = []
        self.alive: list[bool] = []
        self.last = 0
        self._rand = random.Random(0)

    def _new(self, verts: list[int]) -> int:
        self.tri.append(verts)
        self.nbr.append([-1, -1, -1])
        self.alive.append(True)
        return len(self.tri) - 1

    def start(self, a: int, b: int, c: int) -> None:
        t = self._new([a, b, c])
        g = [self._new([b, a, _GHOST]), self._new([c, b, _GHOST]), self._new([a, c, _GHOST])]
        # solid edge a->b faces ghost g0, b->c faces g1, c->a faces g2
        self.nbr[t] = [g[1], g[2], g[0]]
        first = {b: g[0], c: g[1], a: g[2]}
        second = {a: g[0], b: g[1], c: g[2]}
        for gt in g:
            u, v, _ = self.tri[gt]
            # opposite u: edge v->G, shared with the ghost starting at v
            # opposite v: edge G->u, shared with the ghost ending at u
            self.nbr[gt] = [first[v], second[u], t]
        self.last = t

    def _conflict(self, t: int, p: Point) -> bool:
        a, b, c = self.tri[t]
        P = self.P
        if c == _GHOST:
            o = orientation(P[a], P[b], p)
            return o == POSITIVE or (o == ZERO and on_segment(P[a], P[b], p))
        return incircle(P[a], P[b], P[c], p) == NEGATIVE

    def _locate(self, p: Point) -> int:
        P = self.P
        t = self.last
        if self.tri[t][2] == _GHOST:
            t = self.nbr[t][2]
        rand = self._rand.randrange
        while True:
            v = self.tri[t]
            if v[2] == _GHOST:
                return t
            k0 = rand(3)
            for s in range(3):
                k = (k0 + s) % 3
                if orientation(P[v[(k + 1) % 3]], P[v[(k + 2) % 3]], p) == NEGATIVE:
                    t = self.nbr[t][k]
                    break
            else:
                return t

    def insert(self, pi: int) -> None:
        p = self.P[pi]
        t0 = self._locate(p)
        cavity = {t0}
        stack = [t0]
        boundary = []  # (u, v, outside triangle) with u->v as in the cavity triangle
        tri, nbr = self.tri, self.nbr
        while stack:
            t = stack.pop()
            v = tri[t]
            for k in range(3):
                n = nbr[t][k]
                if n in cavity:
                    continue
                if self._conflict(n, p):
                    cavity.add(n)
                    stack.append(n)
                else:
                    boundary.append((v[(k + 1) % 3], v[(k + 2) % 3], n))
        # an edge seen twice from the cavity side is interior to it
        first: dict[int, int] = {}
        second: dict[int, int] = {}
        created = []
        for u, v, outside in boundary:
            if outside in cavity:
                continue
            nt = self._new([u, v, pi])
            created.append((nt, u, v, outside))
            first[u] = nt
            second[v] = nt
        for nt, u, v, outside in created:
            links = [first[v], second[u], outside]
            verts = tri[nt]
            if u == _GHOST:
                # (G, v, p) -> (v, p, G)
                verts[:] = [v, pi, _GHOST]
                links = [links[1], links[2], links[0]]
            elif v == _GHOST:
                # (u, G, p) -> (p, u, G)
                verts[:] = [pi, u, _GHOST]
                links = [links[2], links[0], links[1]]
            nbr[nt] = links
            # the outside triangle sees the shared edge as v->u
            ov = tri[outside]
            for k in range(3):
                if ov[(k + 1) % 3] == v and ov[(k + 2) % 3] == u:
                    nbr[outside][k] = nt
                    break
        for t in cavity:
            self.alive[t] = False
        for nt, *_ in created:
            if tri[nt][2] != _GHOST:
                self.last = nt
                break

    def solid(self) -> list[tuple[int, int, int]]:
        return [tuple(v) for t, v in enumerate(self.tri) if self.alive[t] and v[2] != _GHOST]

    def hull_clockwise(self) -> list[int]:
        nxt = {v[0]: v[1] for t, v in enumerate(self.tri) if self.alive[t] and v[2] == _GHOST}
        start = min(nxt)
        out = [start]
        v = nxt[start]
        while v != start:
            out.append(v)
            v = nxt[v]
        return out


def reference_delaunay(points: Sequence[Sequence[float]]) -> MeshDataset:
    """Delaunay triangulation of the convex hull, decided entirely by exact predicates.

    Collinear points on the hull are kept as hull vertices. The returned
    boundary is the hull in clockwise order.
    """
    P = [Point(float(x), float(y)) for x, y in points]
    if len(P) < 3:
        raise AllCollinear("need at least 3 points")
    if len(set(P)) != len(P):
        raise ValueError("points must be pairwise distinct")
    order = _hilbert_order(P)
    a, b = order[0], order[1]
    third = None
    for k in range(2, len(order)):
        o = orientation(P[a], P[b], P[order[k]])
        if o != ZERO:
            third = k
            break
    if third is None:
        raise AllCollinear("all points are collinear")
    c = order[third]
    if orientation(P[a], P[b], P[c]) == NEGATIVE:
        a, b = b, a
    tr = _Triangulation(P)
    tr.start(a, b, c)
    for k in order[2:]:
        if k != c:
            tr.insert(k)
    return MeshDataset(tuple(P), tuple(tr.solid()), tuple(tr.hull_clockwise()))


# --------------------------------------------------------------------------
# mutations


class MutationKind(str, Enum):
    FLIP_TRIANGLE_ORIENTATION = "FlipTriangleOrientation"
    DUPLICATE_TRIANGLE = "DuplicateTriangle"
    REMOVE_TRIANGLE = "RemoveTriangle"
    OVERLAP_TRIANGLE = "OverlapTriangle"
    CORRUPT_BOUNDARY = "CorruptBoundary"
    ILLEGAL_FLIP = "IllegalFlip"


@dataclass(frozen=True)
class MutationSpec:
    kind: MutationKind
    seed: int = 0


class MutationInapplicable(ValueError):
    pass


def _flip(tris: list[list[int]], t1: int, t2: int, e: Edge) -> None:
    i, j, k = _oriented(tris[t1], e)
    l = sum(tris[t2]) - i - j
    tris[t1] = [k, l, j]
    tris[t2] = [l, k, i]


def _convex_quad(P, tris, t1: int, t2: int, e: Edge) -> bool:
    i, j, k = _oriented(tris[t1], e)
    l = sum(tris[t2]) - i - j
    return orientation(P[k], P[l], P[j]) == POSITIVE and orientation(P[l], P[k], P[i]) == POSITIVE


def apply_random_flips(d: MeshDataset, count: int, seed: int = 0) -> MeshDataset:
    """Apply ``count`` random flips of interior, non-constrained edges with strictly convex quads.

    Each flip keeps the triangulation valid; Delaunay-ness is not preserved.
    """
    rng = random.Random(seed)
    P = d.nodes
    tris = [list(t) for t in d.triangles]
    fixed = set(d.boundary_edges()) | set(d.constrained_edges)
    for _ in range(count):
        em = build_edge_map(tris)
        candidates = sorted(
            e for e, ts in em.items()
            if len(ts) == 2 and e not in fixed and _convex_quad(P, tris, ts[0], ts[1], e)
        )
        if not candidates:
            break
        e = rng.choice(candidates)
        t1, t2 = em[e]
        _flip(tris, t1, t2, e)
    return d.with_triangles(tris)


def mutate(d: MeshDataset, spec: MutationSpec) -> MeshDataset:
    """Return a corrupted copy of a valid dataset; the input is left untouched."""
    kind = MutationKind(spec.kind)
    rng = random.Random(spec.seed)
    P = d.nodes
    T = [list(t) for t in d.triangles]
    em = build_edge_map(T)
    boundary_nodes = set(d.boundary)

    if kind is MutationKind.FLIP_TRIANGLE_ORIENTATION:
        t = rng.randrange(len(T))
        T[t] = [T[t][0], T[t][2], T[t][1]]
        return d.with_triangles(T)

    if kind is MutationKind.DUPLICATE_TRIANGLE:
        t = rng.randrange(len(T))
        T.append(list(T[t]))
        return d.with_triangles(T)

    if kind is MutationKind.REMOVE_TRIANGLE:
        inner = [
            t for t, tri in enumerate(T)
            if all(len(em[Edge.of(tri[k], tri[(k + 1) % 3])]) == 2 for k in range(3))
        ]
        if not inner:
            raise MutationInapplicable("no triangle without a boundary edge")
        deep = [t for t in inner if not boundary_nodes.intersection(T[t])]
        t = rng.choice(deep or inner)
        del T[t]
        return d.with_triangles(T)

    if kind is MutationKind.OVERLAP_TRIANGLE:
        pairs = sorted((ts[0], ts[1], e) for e, ts in em.items() if len(ts) == 2)
        rng.shuffle(pairs)
        existing = set(P)
        for t1, t2, e in pairs:
            for t, n in ((t1, t2), (t2, t1)):
                na, nb, nc = (P[v] for v in T[n])
                q = Point((na.x + nb.x + nc.x) / 3.0, (na.y + nb.y + nc.y) / 3.0)
                if q in existing:
                    continue
                if not all(orientation(*pr, q) == POSITIVE for pr in ((na, nb), (nb, nc), (nc, na))):
                    continue
                qi = len(P)
                nodes = P + (q,)
                for k in range(3):
                    if T[t][k] not in e:
                        continue
                    cand = list(T[t])
                    cand[k] = qi
                    if orientation(*(nodes[v] for v in cand)) == POSITIVE:
                        T[t] = cand
                        return MeshDataset(nodes, tuple(tuple(x) for x in T), d.boundary, d.constrained_edges)
        raise MutationInapplicable("no triangle can be stretched into its neighbour")

    if kind is MutationKind.CORRUPT_BOUNDARY:
        B = list(d.boundary)
        if len(B) > 3 and rng.random() < 0.5:
            k = rng.randrange(len(B))
            B[k], B[(k + 1) % len(B)] = B[(k + 1) % len(B)], B[k]
        else:
            B.reverse()
        return MeshDataset(P, d.triangles, tuple(B), d.constrained_edges)

    # ILLEGAL_FLIP: flip a strictly Delaunay edge; the mesh stays valid but not Delaunay
    fixed = set(d.boundary_edges()) | set(d.constrained_edges)
    candidates = []
    for e, ts in sorted(em.items()):
        if len(ts) != 2 or e in fixed or not _convex_quad(P, T, ts[0], ts[1], e):
            continue
        i, j, k = _oriented(T[ts[0]], e)
        l = sum(T[ts[1]]) - i - j
        if incircle(P[i], P[j], P[k], P[l]) == POSITIVE:
            candidates.append(e)
    if not candidates:
        raise MutationInapplicable("no strictly Delaunay interior edge with a convex quad")
    e = rng.choice(candidates)
    t1, t2 = em[e]
    _flip(T, t1, t2, e)
    return d.with_triangles(T)
