"""Exactly decided 2D predicates.

Every predicate first evaluates its determinant in binary64 and compares it
against a rigorous a priori error bound.  When the bound cannot certify the
sign, the determinant is recomputed exactly with Python integers: binary64
values are dyadic rationals, so scaling all coordinates by a common power of
two turns them into integers without changing the sign of any homogeneous
determinant.

All arithmetic assumes IEEE 754 round-to-nearest, which is what CPython
floats use.  Comparisons are written so that an overflowed (inf/NaN)
intermediate makes the filter fail and routes to the exact path.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

Coord = Sequence[float]


class Sign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


NEGATIVE, ZERO, POSITIVE = Sign.NEGATIVE, Sign.ZERO, Sign.POSITIVE


class NonFiniteInput(ValueError):
    pass


class DegenerateSegment(ValueError):
    pass


@dataclass(frozen=True)
class FilterConstants:
    u: float = 2.0**-53
    u_normal: float = 2.0**-1022
    u_subnormal: float = 2.0**-1074
    theta_ot: float = 3 * 2.0**-53
    ict_linear_coeff: float = 10 * 2.0**-53 + 176 * 2.0**-106
    ict_underflow_coeff: float = 5 * 2.0**-1074


CONSTANTS = FilterConstants()

_THETA = CONSTANTS.theta_ot
_U_N = CONSTANTS.u_normal
_ICT_LIN = CONSTANTS.ict_linear_coeff
_ICT_UFL = CONSTANTS.ict_underflow_coeff


@dataclass
class PredicateStats:
    ot_calls: int = 0
    ot_fallbacks: int = 0
    ict_calls: int = 0
    ict_fallbacks: int = 0

    def merge(self, other: "PredicateStats") -> None:
        self.ot_calls += other.ot_calls
        self.ot_fallbacks += other.ot_fallbacks
        self.ict_calls += other.ict_calls
        self.ict_fallbacks += other.ict_fallbacks

    @property
    def ot_fallback_rate(self) -> float:
        return self.ot_fallbacks / self.ot_calls if self.ot_calls else 0.0

    @property
    def ict_fallback_rate(self) -> float:
        return self.ict_fallbacks / self.ict_calls if self.ict_calls else 0.0

    def as_dict(self) -> dict[str, int]:
        return {
            "ot_calls": self.ot_calls,
            "ot_fallbacks": self.ot_fallbacks,
            "ict_calls": self.ict_calls,
            "ict_fallbacks": self.ict_fallbacks,
        }


# Counters are per thread; a thread only ever touches its own object, so the
# totals are exact once the thread stops calling predicates.
_tls = threading.local()


def current_stats() -> PredicateStats:
    st = getattr(_tls, "stats", None)
    if st is None:
        st = _tls.stats = PredicateStats()
    return st


class collect_stats:
    """Context manager installing a fresh :class:`PredicateStats` for this thread.

    On exit the collected counts are folded back into the enclosing collector.
    """

    def __enter__(self) -> PredicateStats:
        self._outer = current_stats()
        self.stats = _tls.stats = PredicateStats()
        return self.stats

    def __exit__(self, *exc) -> None:
        self._outer.merge(self.stats)
        _tls.stats = self._outer


# --------------------------------------------------------------------------
# exact evaluation


def _scaled_ints(values: Sequence[float]) -> list[int]:
    ratios = []
    for v in values:
        try:
            ratios.append(v.as_integer_ratio())
        except (OverflowError, ValueError):
            raise NonFiniteInput(f"non-finite coordinate {v!r}") from None
    shift = max(den.bit_length() for _, den in ratios) - 1
    return [num << (shift - den.bit_length() + 1) for num, den in ratios]


def _sign(v: int) -> Sign:
    return POSITIVE if v > 0 else NEGATIVE if v < 0 else ZERO


def exact_determinant_sign_ot(pa: Coord, pb: Coord, pc: Coord) -> Sign:
    xa, ya, xb, yb, xc, yc = _scaled_ints((pa[0], pa[1], pb[0], pb[1], pc[0], pc[1]))
    return _sign((xa - xc) * (yb - yc) - (xb - xc) * (ya - yc))


def exact_determinant_sign_ict(pa: Coord, pb: Coord, pc: Coord, pd: Coord) -> Sign:
    xa, ya, xb, yb, xc, yc, xd, yd = _scaled_ints(
        (pa[0], pa[1], pb[0], pb[1], pc[0], pc[1], pd[0], pd[1])
    )
    adx, ady = xa - xd, ya - yd
    bdx, bdy = xb - xd, yb - yd
    cdx, cdy = xc - xd, yc - yd
    lifted = (
        (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - cdy * adx)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx)
    )
    # the lifted form is positive for a point inside; the 4x4 determinant
    # with leading column of ones has the opposite sign
    return _sign(-lifted)


# --------------------------------------------------------------------------
# filtered predicates


def orientation(pa: Coord, pb: Coord, pc: Coord) -> Sign:
    """Sign of OT(pa, pb, pc): POSITIVE when pc is left of pa->pb."""
    st = current_stats()
    st.ot_calls += 1
    xc, yc = pc[0], pc[1]
    l = (pa[0] - xc) * (pb[1] - yc)
    r = (pb[0] - xc) * (pa[1] - yc)
    det = l - r
    if abs(det) > _THETA * (abs(l + r) + _U_N):
        return POSITIVE if det > 0 else NEGATIVE
    st.ot_fallbacks += 1
    return exact_determinant_sign_ot(pa, pb, pc)


def incircle(pa: Coord, pb: Coord, pc: Coord, pd: Coord) -> Sign:
    """Sign of ICT(pa, pb, pc, pd) for counterclockwise pa, pb, pc.

    POSITIVE: pd strictly outside the circumcircle, NEGATIVE: strictly inside,
    ZERO: cocircular.
    """
    st = current_stats()
    st.ict_calls += 1
    xd, yd = pd[0], pd[1]
    adx = pa[0] - xd
    bdx = pb[0] - xd
    cdx = pc[0] - xd
    ady = pa[1] - yd
    bdy = pb[1] - yd
    cdy = pc[1] - yd

    bdxcdy = bdx * cdy
    bdycdx = bdy * cdx
    a1 = adx * adx + ady * ady
    a2 = bdxcdy - bdycdx
    a2p = abs(bdxcdy) + abs(bdycdx)

    cdxady = cdx * ady
    cdyadx = cdy * adx
    b1 = bdx * bdx + bdy * bdy
    b2 = cdxady - cdyadx
    b2p = abs(cdxady) + abs(cdyadx)

    adxbdy = adx * bdy
    adybdx = ady * bdx
    c1 = cdx * cdx + cdy * cdy
    c2 = adxbdy - adybdx
    c2p = abs(adxbdy) + abs(adybdx)

    det = a1 * a2 + b1 * b2 + c1 * c2
    errbound = _ICT_LIN * (a1 * a2p + b1 * b2p + c1 * c2p) + _ICT_UFL * (
        (a2p + a1) + (b2p + b1) + (c2p + c1) + 1.0
    )
    if abs(det) > errbound:
        return NEGATIVE if det > 0 else POSITIVE
    st.ict_fallbacks += 1
    return exact_determinant_sign_ict(pa, pb, pc, pd)


def _same(p: Coord, q: Coord) -> bool:
    return p[0] == q[0] and p[1] == q[1]


def on_segment(pa: Coord, pb: Coord, pc: Coord) -> bool:
    """True iff pc lies on the open segment (pa, pb)."""
    if _same(pa, pb):
        raise DegenerateSegment(f"segment endpoints coincide: {tuple(pa)}")
    return _on_open_segment(pa, pb, pc)


def _on_open_segment(pa: Coord, pb: Coord, pc: Coord) -> bool:
    if orientation(pa, pb, pc) != ZERO:
        return False
    return _in_box_not_endpoint(pa, pb, pc)


def _in_box_not_endpoint(pa: Coord, pb: Coord, pc: Coord) -> bool:
    # pc is already known to be collinear with pa, pb
    x, y = pc[0], pc[1]
    if not (min(pa[0], pb[0]) <= x <= max(pa[0], pb[0])):
        return False
    if not (min(pa[1], pb[1]) <= y <= max(pa[1], pb[1])):
        return False
    return not (_same(pc, pa) or _same(pc, pb))


def _overlap_from_common(s: Coord, p: Coord, q: Coord) -> bool:
    # segments s-p and s-q meet beyond s only if collinear and pointing the same way
    if orientation(s, p, q) != ZERO:
        return False
    return _in_box_not_endpoint(s, p, q) or _in_box_not_endpoint(s, q, p)


def segments_intersect(pa: Coord, pb: Coord, pc: Coord, pd: Coord) -> bool:
    """True iff closed segments ab and cd share a point other than a common endpoint.

    Proper crossings and an endpoint of one segment touching the interior of
    the other both count; meeting only at a shared endpoint does not.
    """
    if _same(pa, pb) or _same(pc, pd):
        raise DegenerateSegment("segment endpoints coincide")
    if (_same(pa, pc) and _same(pb, pd)) or (_same(pa, pd) and _same(pb, pc)):
        # the same segment overlaps itself everywhere
        return True
    # a shared endpoint makes two of the four determinants exactly zero;
    # decide those cases directly instead of sending them to the exact path
    if _same(pa, pc):
        return _overlap_from_common(pa, pb, pd)
    if _same(pa, pd):
        return _overlap_from_common(pa, pb, pc)
    if _same(pb, pc):
        return _overlap_from_common(pb, pa, pd)
    if _same(pb, pd):
        return _overlap_from_common(pb, pa, pc)
    o_abc = orientation(pa, pb, pc)
    o_abd = orientation(pa, pb, pd)
    if o_abc * o_abd > 0:
        # c and d strictly on the same side of line ab
        return False
    o_cda = orientation(pc, pd, pa)
    o_cdb = orientation(pc, pd, pb)
    if o_abc * o_abd < 0 and o_cda * o_cdb < 0:
        return True
    if o_abc == ZERO and _in_box_not_endpoint(pa, pb, pc):
        return True
    if o_abd == ZERO and _in_box_not_endpoint(pa, pb, pd):
        return True
    if o_cda == ZERO and _in_box_not_endpoint(pc, pd, pa):
        return True
    if o_cdb == ZERO and _in_box_not_endpoint(pc, pd, pb):
        return True
    return False
