"""Instances, escape paths, the escape grid and the density verifier.

Every solver in the package is checked against the functions in this
module, so they are kept small and exact: integer coordinates only.

REP density is measured at open cells of the escape grid (all path edges
lie on grid lines, so any interior point of a cell is representative).
SEP density is measured at lattice points, each path covering the
inclusive segment from its point to the boundary.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np


class GeometryError(ValueError):
    """Raised for malformed instances or assignments."""


class BoundViolation(AssertionError):
    """A proven approximation bound failed on a concrete run."""


class Direction(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    DOWN = "down"
    UP = "up"

    @property
    def index(self) -> int:
        return _ORDER.index(self)

    @property
    def bar(self) -> "Direction":
        return _OPPOSITE[self]

    @property
    def perp(self) -> "Direction":
        # quarter turn counter-clockwise; perp(perp(a)) == bar(a)
        return _QUARTER_TURN[self]

    @property
    def horizontal(self) -> bool:
        return self in (Direction.LEFT, Direction.RIGHT)

    def __lt__(self, other):
        if not isinstance(other, Direction):
            return NotImplemented
        return self.index < other.index

    @classmethod
    def parse(cls, token: str) -> "Direction":
        token = token.strip().lower()
        if token in _SHORT:
            return _SHORT[token]
        try:
            return cls(token)
        except ValueError:
            raise GeometryError(f"unknown direction {token!r}") from None


_ORDER = (Direction.LEFT, Direction.RIGHT, Direction.DOWN, Direction.UP)
DIRECTIONS = _ORDER
_OPPOSITE = {
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
    Direction.DOWN: Direction.UP,
    Direction.UP: Direction.DOWN,
}
_QUARTER_TURN = {
    Direction.RIGHT: Direction.UP,
    Direction.UP: Direction.LEFT,
    Direction.LEFT: Direction.DOWN,
    Direction.DOWN: Direction.RIGHT,
}
_SHORT = {"l": Direction.LEFT, "r": Direction.RIGHT, "d": Direction.DOWN, "u": Direction.UP}
SHORT_NAME = {v: k for k, v in _SHORT.items()}


@dataclass(frozen=True)
class Boundary:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"boundary must be at least 1x1, got {self.width}x{self.height}")


@dataclass(frozen=True, order=True)
class Rect:
    """Closed rectangle [x1, x2] x [y1, y2]."""

    x1: int
    y1: int
    x2: int
    y2: int

    def inside(self, b: Boundary) -> bool:
        return 0 <= self.x1 < self.x2 <= b.width and 0 <= self.y1 < self.y2 <= b.height

    def intersects(self, other: "Rect") -> bool:
        # closed sets: touching edges or corners count
        return (self.x1 <= other.x2 and other.x1 <= self.x2
                and self.y1 <= other.y2 and other.y1 <= self.y2)

    def contains(self, other: "Rect") -> bool:
        return (self.x1 <= other.x1 and other.x2 <= self.x2
                and self.y1 <= other.y1 and other.y2 <= self.y2)


Point = Tuple[int, int]


@dataclass(frozen=True)
class RepInstance:
    boundary: Boundary
    rects: Tuple[Rect, ...]
    disjoint: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))
        for i, r in enumerate(self.rects):
            if not r.inside(self.boundary):
                raise GeometryError(f"rectangle {i} {r} is degenerate or outside the boundary")
        if self.disjoint and not check_disjoint(self):
            raise GeometryError("instance declared disjoint but rectangles intersect")

    def __len__(self):
        return len(self.rects)


@dataclass(frozen=True)
class SepInstance:
    """Lattice points in the (width+1) x (height+1) grid; repeats encode multiplicity."""

    boundary: Boundary
    points: Tuple[Point, ...]

    def __post_init__(self):
        pts = tuple((int(x), int(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        b = self.boundary
        for p in pts:
            if not (0 <= p[0] <= b.width and 0 <= p[1] <= b.height):
                raise GeometryError(f"point {p} outside the {b.width}x{b.height} grid")

    def __len__(self):
        return len(self.points)

    @property
    def disjoint(self) -> bool:
        return len(set(self.points)) == len(self.points)

    @property
    def interior(self) -> bool:
        b = self.boundary
        return all(0 < x < b.width and 0 < y < b.height for x, y in self.points)


Instance = Union[RepInstance, SepInstance]


@dataclass(frozen=True)
class EscapeAssignment:
    dirs: Tuple[Direction, ...]

    def __post_init__(self):
        object.__setattr__(self, "dirs", tuple(self.dirs))

    def __len__(self):
        return len(self.dirs)

    def __iter__(self):
        return iter(self.dirs)

    def __getitem__(self, i):
        return self.dirs[i]

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "EscapeAssignment":
        return cls(tuple(Direction.parse(s) for s in names))

    def names(self):
        return [d.value for d in self.dirs]


@dataclass(frozen=True)
class EscapeGrid:
    xs: Tuple[int, ...]
    ys: Tuple[int, ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.xs) - 1, len(self.ys) - 1

    @property
    def n_cells(self) -> int:
        nx, ny = self.shape
        return nx * ny

    def cell_range(self, r: Rect) -> Tuple[int, int, int, int]:
        """Half-open cell index ranges (i0, i1, j0, j1) of the cells inside ``r``."""
        return (bisect.bisect_left(self.xs, r.x1), bisect.bisect_left(self.xs, r.x2),
                bisect.bisect_left(self.ys, r.y1), bisect.bisect_left(self.ys, r.y2))

    def cell_rect(self, i: int, j: int) -> Rect:
        return Rect(self.xs[i], self.ys[j], self.xs[i + 1], self.ys[j + 1])


@dataclass(frozen=True)
class DensityReport:
    density: int
    witness_cell: Optional[Tuple[int, int]]
    boundary_density: int
    witness_boundary: Optional[Tuple[int, int]]
    witness_region: Optional[Rect] = field(default=None, compare=False)

    def as_dict(self):
        return {"density": self.density, "boundary_density": self.boundary_density}


def escape_path(r: Rect, alpha: Direction, b: Boundary) -> Rect:
    if alpha is Direction.LEFT:
        return Rect(0, r.y1, r.x2, r.y2)
    if alpha is Direction.RIGHT:
        return Rect(r.x1, r.y1, b.width, r.y2)
    if alpha is Direction.DOWN:
        return Rect(r.x1, 0, r.x2, r.y2)
    return Rect(r.x1, r.y1, r.x2, b.height)


def build_escape_grid(inst: RepInstance) -> EscapeGrid:
    b = inst.boundary
    xs = {0, b.width}
    ys = {0, b.height}
    for r in inst.rects:
        xs.update((r.x1, r.x2))
        ys.update((r.y1, r.y2))
    return EscapeGrid(tuple(sorted(xs)), tuple(sorted(ys)))


def _check_len(inst, a: EscapeAssignment):
    if len(a) != len(inst):
        raise GeometryError(f"assignment has {len(a)} directions for {len(inst)} elements")


class _MaxAddTree:
    """Range add / global max over a fixed array, bottom-up without lazy pushes.

    ``t[v]`` holds the max of the subtree at ``v`` including every add applied
    at ``v`` or below; ``d[v]`` holds the adds applied exactly at ``v``.
    """

    _PAD = -(1 << 60)

    def __init__(self, n: int):
        size = 1
        while size < n:
            size <<= 1
        self.n = n
        self.size = size
        self.t = [0] * (2 * size)
        self.d = [0] * (2 * size)
        for i in range(size + n, 2 * size):
            self.t[i] = self.d[i] = self._PAD
        for v in range(size - 1, 0, -1):
            self.t[v] = max(self.t[2 * v], self.t[2 * v + 1])

    def _pull(self, v: int):
        t, d = self.t, self.d
        v >>= 1
        while v:
            a, c = t[2 * v], t[2 * v + 1]
            t[v] = (a if a > c else c) + d[v]
            v >>= 1

    def add(self, lo: int, hi: int, val: int):
        if lo >= hi:
            return
        t, d = self.t, self.d
        lo += self.size
        hi += self.size
        l0, h0 = lo, hi - 1
        while lo < hi:
            if lo & 1:
                t[lo] += val
                d[lo] += val
                lo += 1
            if hi & 1:
                hi -= 1
                t[hi] += val
                d[hi] += val
            lo >>= 1
            hi >>= 1
        self._pull(l0)
        self._pull(h0)

    def top(self) -> Tuple[int, int]:
        """(max value, leftmost argmax)."""
        t, d = self.t, self.d
        v = 1
        while v < self.size:
            want = t[v] - d[v]
            v = 2 * v if t[2 * v] == want else 2 * v + 1
        return self.t[1], v - self.size

    def point(self, i: int) -> int:
        v = i + self.size
        s = 0
        while v:
            s += self.d[v]
            v >>= 1
        return s


def compute_density_rep(inst: RepInstance, a: EscapeAssignment) -> DensityReport:
    """Maximum number of escape paths over any open cell of the escape grid.

    Sweeps the x-slabs of the grid with a range-add/max tree over y-cells, so
    the cost is O((n + |xs|) log |ys|) rather than the number of cells.
    Boundary density is the maximum over cells touching the boundary box.
    """
    _check_len(inst, a)
    grid = build_escape_grid(inst)
    nx, ny = grid.shape
    starts = [[] for _ in range(nx + 1)]
    ends = [[] for _ in range(nx + 1)]
    for r, alpha in zip(inst.rects, a):
        i0, i1, j0, j1 = grid.cell_range(escape_path(r, alpha, inst.boundary))
        starts[i0].append((j0, j1))
        ends[i1].append((j0, j1))

    tree = _MaxAddTree(ny)
    best, best_cell = -1, None
    bbest, bbest_cell = -1, None
    for i in range(nx):
        for j0, j1 in ends[i]:
            tree.add(j0, j1, -1)
        for j0, j1 in starts[i]:
            tree.add(j0, j1, 1)
        val, j = tree.top()
        if val > best:
            best, best_cell = val, (i, j)
        if i == 0 or i == nx - 1:
            if val > bbest:
                bbest, bbest_cell = val, (i, j)
        for j in {0, ny - 1}:
            pv = tree.point(j)
            if pv > bbest:
                bbest, bbest_cell = pv, (i, j)
    return DensityReport(best, best_cell, bbest, bbest_cell,
                         witness_region=grid.cell_rect(*best_cell))


def sep_path_end(p: Point, alpha: Direction, b: Boundary) -> Point:
    x, y = p
    if alpha is Direction.LEFT:
        return (0, y)
    if alpha is Direction.RIGHT:
        return (b.width, y)
    if alpha is Direction.DOWN:
        return (x, 0)
    return (x, b.height)


def sep_coverage(inst: SepInstance, a: EscapeAssignment) -> np.ndarray:
    """Path-coverage counts at every lattice point, indexed ``[x, y]``."""
    _check_len(inst, a)
    b = inst.boundary
    horiz = np.zeros((b.width + 2, b.height + 1), dtype=np.int64)
    vert = np.zeros((b.width + 1, b.height + 2), dtype=np.int64)
    for p, alpha in zip(inst.points, a):
        q = sep_path_end(p, alpha, b)
        x0, x1 = sorted((p[0], q[0]))
        y0, y1 = sorted((p[1], q[1]))
        if alpha.horizontal:
            horiz[x0, y0] += 1
            horiz[x1 + 1, y0] -= 1
        else:
            vert[x0, y0] += 1
            vert[x0, y1 + 1] -= 1
    return np.cumsum(horiz, axis=0)[:-1] + np.cumsum(vert, axis=1)[:, :-1]


def compute_density_sep(inst: SepInstance, a: EscapeAssignment) -> DensityReport:
    cov = sep_coverage(inst, a)
    ix = np.unravel_index(int(np.argmax(cov)), cov.shape)
    edge = np.zeros_like(cov, dtype=bool)
    edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
    masked = np.where(edge, cov, -1)
    bx = np.unravel_index(int(np.argmax(masked)), cov.shape)
    return DensityReport(int(cov[ix]), (int(ix[0]), int(ix[1])),
                         int(cov[bx]), (int(bx[0]), int(bx[1])))


def compute_density(inst: Instance, a: EscapeAssignment) -> DensityReport:
    if isinstance(inst, SepInstance):
        return compute_density_sep(inst, a)
    return compute_density_rep(inst, a)


def check_disjoint(inst: Instance) -> bool:
    """Pairwise closed-set disjointness, by an x-sweep over active y-intervals."""
    if isinstance(inst, SepInstance):
        return inst.disjoint
    events = []
    for k, r in enumerate(inst.rects):
        # inserts sort before removals at equal x: touching edges intersect
        events.append((r.x1, 0, k))
        events.append((r.x2, 1, k))
    events.sort()
    active_lo: list = []
    active: list = []
    for _, kind, k in events:
        r = inst.rects[k]
        if kind == 1:
            pos = bisect.bisect_left(active_lo, (r.y1, k))
            del active_lo[pos]
            del active[pos]
            continue
        pos = bisect.bisect_left(active_lo, (r.y1, k))
        # active intervals are pairwise disjoint, so neighbours are enough
        if pos > 0 and active[pos - 1][1] >= r.y1:
            return False
        if pos < len(active) and active[pos][0] <= r.y2:
            return False
        active_lo.insert(pos, (r.y1, k))
        active.insert(pos, (r.y1, r.y2))
    return True


def sep_as_rep(inst: SepInstance) -> RepInstance:
    """Embed lattice points as spaced unit squares preserving all blocking relations.

    Point (x, y) becomes [2x+1, 2x+2] x [2y+1, 2y+2] in a (2W+3) x (2H+3) box,
    so distinct points never touch while equal rows/columns keep full overlap.
    """
    b = inst.boundary
    rects = [Rect(2 * x + 1, 2 * y + 1, 2 * x + 2, 2 * y + 2) for x, y in inst.points]
    return RepInstance(Boundary(2 * b.width + 3, 2 * b.height + 3), tuple(rects),
                       disjoint=inst.disjoint)
