"""Level peeling for disjoint REP: escape DAGs, peeling, and the 8-approximation.

In the escape DAG for direction ``alpha`` an edge ``i -> j`` means rectangle
``i`` lies between ``j`` and the ``alpha`` side of the box with a
positive-length overlap of their projections, i.e. ``i`` blocks ``j``.
Rectangles with indegree 0 escape in ``alpha`` through empty space.
"""

from __future__ import annotations

import bisect
import graphlib
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .geometry import (DIRECTIONS, BoundViolation, DensityReport, Direction, EscapeAssignment, GeometryError,
                       RepInstance, SepInstance, check_disjoint, compute_density, sep_as_rep)


class NotDisjoint(GeometryError):
    pass


def oriented(r, alpha: Direction) -> Tuple[int, int, int, int]:
    """(along_lo, along_hi, perp_lo, perp_hi), ``along`` increasing toward the alpha side."""
    if alpha is Direction.UP:
        return r.y1, r.y2, r.x1, r.x2
    if alpha is Direction.DOWN:
        return -r.y2, -r.y1, r.x1, r.x2
    if alpha is Direction.RIGHT:
        return r.x1, r.x2, r.y1, r.y2
    return -r.x2, -r.x1, r.y1, r.y2


@dataclass
class EscapeDag:
    direction: Direction
    succ: List[List[int]]  # succ[i]: rectangles that i blocks

    @property
    def n(self) -> int:
        return len(self.succ)

    def edges(self) -> set:
        return {(i, j) for i, out in enumerate(self.succ) for j in out}

    def indegrees(self) -> List[int]:
        deg = [0] * self.n
        for out in self.succ:
            for j in out:
                deg[j] += 1
        return deg

    def topological_order(self) -> List[int]:
        """Blockers first. Raises ``graphlib.CycleError`` if the relation is cyclic."""
        ts = graphlib.TopologicalSorter()
        for i, out in enumerate(self.succ):
            ts.add(i)
            for j in out:
                ts.add(j, i)
        return list(ts.static_order())

    def to_text(self) -> str:
        lines = [f"# escape dag {self.direction.value}: blocker blocked"]
        lines += [f"{i} {j}" for i, j in sorted(self.edges())]
        return "\n".join(lines) + "\n"


class _ActiveIntervals:
    """Intervals over a fixed universe, activated one at a time.

    Leaves are the universe sorted by low end; internal nodes keep the max
    high end among active leaves, so reporting every active interval that
    overlaps an open range costs O((1 + K) log n).
    """

    _OFF = -(1 << 62)

    def __init__(self, intervals: Sequence[Tuple[int, int, int]]):
        # intervals: (lo, hi, payload)
        self.items = sorted(intervals)
        self.los = [it[0] for it in self.items]
        self.slot = {it[2]: k for k, it in enumerate(self.items)}
        size = 1
        while size < max(1, len(self.items)):
            size <<= 1
        self.size = size
        self.mx = [self._OFF] * (2 * size)

    def activate(self, payload: int):
        v = self.slot[payload] + self.size
        self.mx[v] = self.items[v - self.size][1]
        v >>= 1
        while v:
            a, b = self.mx[2 * v], self.mx[2 * v + 1]
            self.mx[v] = a if a > b else b
            v >>= 1

    def overlapping(self, lo: int, hi: int) -> List[int]:
        """Payloads of active intervals with ``ilo < hi`` and ``ihi > lo``."""
        limit = bisect.bisect_left(self.los, hi)  # leaves [0, limit) have ilo < hi
        out = []
        if limit == 0:
            return out
        mx, size = self.mx, self.size
        if mx[1] <= lo:
            return out
        # children are filtered before being pushed; nodes on the stack are live
        stack = [(1, 0, size)]
        while stack:
            v, a, b = stack.pop()
            if v >= size:
                out.append(self.items[v - size][2])
                continue
            m = (a + b) >> 1
            r = 2 * v + 1
            if m < limit and mx[r] > lo:
                stack.append((r, m, b))
            if mx[r - 1] > lo:
                stack.append((r - 1, a, m))
        return out


def build_escape_dag(inst: RepInstance, alpha: Direction, *, check: bool = True) -> EscapeDag:
    """Sweep from the alpha side inward, querying active perpendicular projections.

    A rectangle is activated once the sweep has passed its near edge; each
    rectangle then queries at its far edge for the active projections it
    overlaps. Nothing is ever deactivated: every rectangle already passed is
    between the query and the boundary, which is exactly the blocking set.
    """
    if check and not check_disjoint(inst):
        raise NotDisjoint("escape DAGs are defined for disjoint rectangles only")
    n = len(inst)
    geo = [oriented(r, alpha) for r in inst.rects]
    tree = _ActiveIntervals([(g[2], g[3], k) for k, g in enumerate(geo)])
    events = []
    for k, (alo, ahi, _, _) in enumerate(geo):
        events.append((-alo, 0, k))  # activation; before queries at the same coordinate
        events.append((-ahi, 1, k))
    events.sort()
    succ: List[List[int]] = [[] for _ in range(n)]
    for _, kind, k in events:
        if kind == 0:
            tree.activate(k)
        else:
            for i in tree.overlapping(geo[k][2], geo[k][3]):
                succ[i].append(k)
    for out in succ:
        out.sort()
    return EscapeDag(alpha, succ)


@dataclass(frozen=True)
class PeelingResult:
    levels: Tuple[Tuple[int, ...], ...]
    assignment: EscapeAssignment

    @property
    def rho(self) -> int:
        return len(self.levels)

    def level_of(self) -> List[int]:
        out = [0] * sum(len(lv) for lv in self.levels)
        for t, lv in enumerate(self.levels, start=1):
            for i in lv:
                out[i] = t
        return out


def _as_rep(inst) -> RepInstance:
    if isinstance(inst, SepInstance):
        if not inst.disjoint:
            raise NotDisjoint("peeling needs every grid point at most once")
        return sep_as_rep(inst)
    return inst


def peel(inst, dags: Optional[Sequence[EscapeDag]] = None) -> PeelingResult:
    """Peel indegree-0 rectangles level by level.

    All four direction scans of one iteration see the same remaining set;
    removals are applied at the end of the iteration. A rectangle free in
    several directions takes the first one in left, right, down, up order.
    """
    rep = _as_rep(inst)
    if dags is None:
        if not check_disjoint(rep):
            raise NotDisjoint("peeling needs pairwise disjoint rectangles")
        dags = [build_escape_dag(rep, a, check=False) for a in DIRECTIONS]
    n = len(rep)
    indeg = [d.indegrees() for d in dags]
    succ = [d.succ for d in dags]
    W: List[Optional[Direction]] = [None] * n
    ready = {j for j in range(n) if any(indeg[k][j] == 0 for k in range(4))}
    levels = []
    left = n
    while left:
        if not ready:
            raise RuntimeError("peeling stalled: no rectangle can escape (cyclic blocking)")
        level = sorted(ready)
        for j in level:
            W[j] = next(DIRECTIONS[k] for k in range(4) if indeg[k][j] == 0)
        nxt = set()
        for i in level:
            for k in range(4):
                deg = indeg[k]
                for j in succ[k][i]:
                    deg[j] -= 1
                    if deg[j] == 0 and W[j] is None:
                        nxt.add(j)
        levels.append(tuple(level))
        left -= len(level)
        ready = nxt
    return PeelingResult(tuple(levels), EscapeAssignment(tuple(W)))


def level_densities(inst, result: PeelingResult) -> List[int]:
    """Density of each level's paths taken alone (expected to be at most 2)."""
    out = []
    for lv in result.levels:
        if isinstance(inst, SepInstance):
            sub = SepInstance(inst.boundary, tuple(inst.points[i] for i in lv))
        else:
            sub = RepInstance(inst.boundary, tuple(inst.rects[i] for i in lv))
        a = EscapeAssignment(tuple(result.assignment[i] for i in lv))
        out.append(compute_density(sub, a).density)
    return out


def peel_and_verify(inst) -> Tuple[PeelingResult, DensityReport]:
    result = peel(inst)
    report = compute_density(inst, result.assignment)
    if report.density > 2 * result.rho:
        raise BoundViolation(f"density {report.density} exceeds 2*rho = {2 * result.rho}")
    return result, report


def solve_peeling(inst) -> Tuple[EscapeAssignment, DensityReport]:
    result, report = peel_and_verify(inst)
    return result.assignment, report
