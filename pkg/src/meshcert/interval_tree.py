"""Red-black interval tree with max-endpoint augmentation, and the X/Y segment index built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence


@dataclass(frozen=True)
class Interval:
    inf: float
    sup: float

    def __post_init__(self):
        if not self.inf <= self.sup:
            raise ValueError(f"interval bounds out of order: [{self.inf}, {self.sup}]")

    def overlaps(self, other: "Interval") -> bool:
        return self.inf <= other.sup and other.inf <= self.sup


class DuplicateSegment(KeyError):
    pass


class UnknownSegment(KeyError):
    pass


class _Node:
    __slots__ = ("inf", "sup", "payload", "max", "left", "right", "parent", "red")

    def __init__(self, inf, sup, payload, nil):
        self.inf = inf
        self.sup = sup
        self.payload = payload
        self.max = sup
        self.left = nil
        self.right = nil
        self.parent = nil
        self.red = True

    @property
    def interval(self) -> Interval:
        return Interval(self.inf, self.sup)


class IntervalTree:
    """Intervals ordered by ``(inf, payload)``; every node caches the max ``sup`` of its subtree.

    Payloads must be unique, hashable and mutually comparable (ties on ``inf``
    are broken by payload).
    """

    def __init__(self):
        nil = _Node(-math.inf, -math.inf, None, None)
        nil.left = nil.right = nil.parent = nil
        nil.red = False
        self._nil = nil
        self._root = nil
        self._nodes: dict[Hashable, _Node] = {}

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, payload) -> bool:
        return payload in self._nodes

    # -- rotations keep the max field of the two rotated nodes exact

    def _left_rotate(self, x: _Node) -> None:
        nil = self._nil
        y = x.right
        x.right = y.left
        if y.left is not nil:
            y.left.parent = x
        y.parent = x.parent
        if x.parent is nil:
            self._root = y
        elif x is x.parent.left:
            x.parent.left = y
        else:
            x.parent.right = y
        y.left = x
        x.parent = y
        y.max = x.max
        x.max = max(x.sup, x.left.max, x.right.max)

    def _right_rotate(self, x: _Node) -> None:
        nil = self._nil
        y = x.left
        x.left = y.right
        if y.right is not nil:
            y.right.parent = x
        y.parent = x.parent
        if x.parent is nil:
            self._root = y
        elif x is x.parent.right:
            x.parent.right = y
        else:
            x.parent.left = y
        y.right = x
        x.parent = y
        y.max = x.max
        x.max = max(x.sup, x.left.max, x.right.max)

    def insert(self, inf: float, sup: float, payload) -> None:
        if not inf <= sup:
            raise ValueError(f"interval bounds out of order: [{inf}, {sup}]")
        if payload in self._nodes:
            raise DuplicateSegment(payload)
        nil = self._nil
        z = _Node(inf, sup, payload, nil)
        self._nodes[payload] = z
        key = (inf, payload)
        y = nil
        x = self._root
        while x is not nil:
            y = x
            if sup > x.max:
                x.max = sup
            x = x.left if key < (x.inf, x.payload) else x.right
        z.parent = y
        if y is nil:
            self._root = z
        elif key < (y.inf, y.payload):
            y.left = z
        else:
            y.right = z
        self._insert_fixup(z)

    def _insert_fixup(self, z: _Node) -> None:
        while z.parent.red:
            gp = z.parent.parent
            if z.parent is gp.left:
                y = gp.right
                if y.red:
                    z.parent.red = False
                    y.red = False
                    gp.red = True
                    z = gp
                else:
                    if z is z.parent.right:
                        z = z.parent
                        self._left_rotate(z)
                    z.parent.red = False
                    z.parent.parent.red = True
                    self._right_rotate(z.parent.parent)
            else:
                y = gp.left
                if y.red:
                    z.parent.red = False
                    y.red = False
                    gp.red = True
                    z = gp
                else:
                    if z is z.parent.left:
                        z = z.parent
                        self._right_rotate(z)
                    z.parent.red = False
                    z.parent.parent.red = True
                    self._left_rotate(z.parent.parent)
        self._root.red = False

    def _transplant(self, u: _Node, v: _Node) -> None:
        if u.parent is self._nil:
            self._root = v
        elif u is u.parent.left:
            u.parent.left = v
        else:
            u.parent.right = v
        v.parent = u.parent

    def remove(self, payload) -> None:
        try:
            z = self._nodes.pop(payload)
        except KeyError:
            raise UnknownSegment(payload) from None
        nil = self._nil
        y = z
        y_was_red = y.red
        if z.left is nil:
            x = z.right
            self._transplant(z, z.right)
        elif z.right is nil:
            x = z.left
            self._transplant(z, z.left)
        else:
            y = z.right
            while y.left is not nil:
                y = y.left
            y_was_red = y.red
            x = y.right
            if y.parent is z:
                x.parent = y
            else:
                self._transplant(y, y.right)
                y.right = z.right
                y.right.parent = y
            self._transplant(z, y)
            y.left = z.left
            y.left.parent = y
            y.red = z.red
        # x.parent is set even when x is the sentinel; refresh maxima up to the root
        n = x.parent
        while n is not nil:
            n.max = max(n.sup, n.left.max, n.right.max)
            n = n.parent
        if not y_was_red:
            self._delete_fixup(x)
        nil.parent = nil

    def _delete_fixup(self, x: _Node) -> None:
        while x is not self._root and not x.red:
            p = x.parent
            if x is p.left:
                w = p.right
                if w.red:
                    w.red = False
                    p.red = True
                    self._left_rotate(p)
                    w = p.right
                if not w.left.red and not w.right.red:
                    w.red = True
                    x = p
                else:
                    if not w.right.red:
                        w.left.red = False
                        w.red = True
                        self._right_rotate(w)
                        w = p.right
                    w.red = p.red
                    p.red = False
                    w.right.red = False
                    self._left_rotate(p)
                    x = self._root
            else:
                w = p.left
                if w.red:
                    w.red = False
                    p.red = True
                    self._right_rotate(p)
                    w = p.left
                if not w.right.red and not w.left.red:
                    w.red = True
                    x = p
                else:
                    if not w.left.red:
                        w.right.red = False
                        w.red = True
                        self._left_rotate(w)
                        w = p.left
                    w.red = p.red
                    p.red = False
                    w.left.red = False
                    self._right_rotate(p)
                    x = self._root
        x.red = False

    def search(self, lo: float, hi: float) -> list[tuple[Interval, object]]:
        """All stored intervals overlapping the closed query ``[lo, hi]``."""
        return [(Interval(n.inf, n.sup), n.payload) for n in self._overlapping(lo, hi)]

    def interval_search(self, query: Interval) -> list[tuple[Interval, object]]:
        return self.search(query.inf, query.sup)

    def search_payloads(self, lo: float, hi: float) -> list:
        return [n.payload for n in self._overlapping(lo, hi)]

    def _overlapping(self, lo: float, hi: float) -> list[_Node]:
        if not lo <= hi:
            raise ValueError(f"query bounds out of order: [{lo}, {hi}]")
        nil = self._nil
        out = []
        stack = [self._root]
        while stack:
            n = stack.pop()
            if n is nil:
                continue
            if n.inf <= hi and n.sup >= lo:
                out.append(n)
            if n.left.max >= lo:
                stack.append(n.left)
            # right subtree starts at or after n.inf
            if n.inf <= hi and n.right.max >= lo:
                stack.append(n.right)
        return out

    def __iter__(self) -> Iterator[tuple[Interval, object]]:
        nil = self._nil
        stack = []
        n = self._root
        while stack or n is not nil:
            while n is not nil:
                stack.append(n)
                n = n.left
            n = stack.pop()
            yield Interval(n.inf, n.sup), n.payload
            n = n.right

    def height(self) -> int:
        nil = self._nil
        best = 0
        stack = [(self._root, 1)]
        while stack:
            n, h = stack.pop()
            if n is nil:
                continue
            best = max(best, h)
            stack.append((n.left, h + 1))
            stack.append((n.right, h + 1))
        return best

    def check_invariants(self) -> None:
        """Recompute every max field and red-black property; raise AssertionError on mismatch."""
        nil = self._nil
        assert not self._root.red, "root is red"
        assert nil.max == -math.inf and not nil.red

        def walk(n: _Node) -> tuple[float, int, int]:
            if n is nil:
                return -math.inf, 1, 0
            if n.red:
                assert not n.left.red and not n.right.red, f"red node {n.payload} has red child"
            for c in (n.left, n.right):
                if c is not nil:
                    assert c.parent is n, f"broken parent link at {c.payload}"
            lmax, lbh, lcount = walk(n.left)
            rmax, rbh, rcount = walk(n.right)
            assert lbh == rbh, f"black height mismatch under {n.payload}"
            m = max(n.sup, lmax, rmax)
            assert n.max == m, f"stale max at {n.payload}: {n.max} != {m}"
            return m, lbh + (0 if n.red else 1), lcount + rcount + 1

        _, _, count = walk(self._root)
        assert count == len(self._nodes)
        keys = [(iv.inf, p) for iv, p in self]
        assert keys == sorted(keys), "in-order traversal is not sorted"


class SegmentIntervalIndex:
    """Segments stored by their x- and y-projections in two interval trees."""

    def __init__(self):
        self.tree_x = IntervalTree()
        self.tree_y = IntervalTree()
        self.membership: dict[Hashable, tuple[Sequence[float], Sequence[float]]] = {}

    def __len__(self) -> int:
        return len(self.membership)

    def __contains__(self, seg_id) -> bool:
        return seg_id in self.membership

    def insert(self, seg_id, p: Sequence[float], q: Sequence[float]) -> None:
        if seg_id in self.membership:
            raise DuplicateSegment(seg_id)
        if p[0] == q[0] and p[1] == q[1]:
            raise ValueError("segment endpoints coincide")
        x0, x1 = (p[0], q[0]) if p[0] <= q[0] else (q[0], p[0])
        y0, y1 = (p[1], q[1]) if p[1] <= q[1] else (q[1], p[1])
        self.tree_x.insert(x0, x1, seg_id)
        self.tree_y.insert(y0, y1, seg_id)
        self.membership[seg_id] = (p, q)

    def remove(self, seg_id) -> None:
        if seg_id not in self.membership:
            raise UnknownSegment(seg_id)
        self.tree_x.remove(seg_id)
        self.tree_y.remove(seg_id)
        del self.membership[seg_id]

    def segment_search(self, p: Sequence[float], q: Sequence[float]) -> list:
        """Ids of stored segments whose bounding box meets the bounding box of pq."""
        x0, x1 = (p[0], q[0]) if p[0] <= q[0] else (q[0], p[0])
        y0, y1 = (p[1], q[1]) if p[1] <= q[1] else (q[1], p[1])
        ys = set(self.tree_y.search_payloads(y0, y1))
        return [s for s in self.tree_x.search_payloads(x0, x1) if s in ys]
