from __future__ import annotations

from typing import Iterator, Sequence

from .model import Edge


class EdgeSharedByThree(ValueError):
    def __init__(self, edge: Edge, triangle_ids: Sequence[int]):
        super().__init__(f"edge {tuple(edge)} is shared by triangles {list(triangle_ids)}")
        self.edge = edge
        self.triangle_ids = list(triangle_ids)


class UnknownEdge(KeyError):
    pass


class EdgeMap:
    """Canonical edge -> incident triangle ids (one or two), in dataset order."""

    def __init__(self, entries: dict[Edge, list[int]] | None = None):
        self.entries: dict[Edge, list[int]] = entries if entries is not None else {}

    def __getitem__(self, e: Edge) -> list[int]:
        try:
            return self.entries[e]
        except KeyError:
            raise UnknownEdge(e) from None

    def __contains__(self, e: Edge) -> bool:
        return e in self.entries

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def interior_edges(self) -> list[Edge]:
        return [e for e, ts in self.entries.items() if len(ts) == 2]

    def single_edges(self) -> list[Edge]:
        return [e for e, ts in self.entries.items() if len(ts) == 1]

    def copy(self) -> "EdgeMap":
        return EdgeMap({e: list(ts) for e, ts in self.entries.items()})

    def add(self, e: Edge, t: int) -> None:
        ts = self.entries.setdefault(e, [])
        ts.append(t)
        if len(ts) > 2:
            raise EdgeSharedByThree(e, ts)

    def discard(self, e: Edge, t: int) -> None:
        ts = self.entries[e]
        ts.remove(t)
        if not ts:
            del self.entries[e]


def build_edge_map(triangles: Sequence[Sequence[int]]) -> EdgeMap:
    """Single pass over the triangles; fails fast on an edge with a third triangle."""
    entries: dict[Edge, list[int]] = {}
    for t, (a, b, c) in enumerate(triangles):
        for i, j in ((a, b), (b, c), (c, a)):
            e = Edge(i, j) if i < j else Edge(j, i)
            ts = entries.get(e)
            if ts is None:
                entries[e] = [t]
            elif len(ts) == 2:
                raise EdgeSharedByThree(e, ts + [t])
            else:
                ts.append(t)
    return EdgeMap(entries)


def adjacent_triangle(m: EdgeMap, e: Edge, exclude: int | None = None) -> int | None:
    ts = m[e]
    if len(ts) == 1:
        return None if ts[0] == exclude else ts[0]
    return ts[1] if ts[0] == exclude else ts[0]
