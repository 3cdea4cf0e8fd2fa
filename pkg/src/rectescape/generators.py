"""Seeded instance generators.

Families:
  random     uniform placement (rejection-sampled when disjoint)
  rings      concentric square rings of unit squares / points, one level each
  staircase  nested pinwheel frames of four bars, one level per frame (REP)
  rows       collinear elements on one row
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .geometry import Boundary, Instance, Rect, RepInstance, SepInstance

FAMILIES = ("random", "rings", "staircase", "rows")


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    kind: str = "rep"
    n: int = 10
    seed: int = 0
    disjoint: bool = True
    width: Optional[int] = None
    height: Optional[int] = None
    family: str = "random"
    max_side: Optional[int] = None
    interior: bool = True
    retries: int = 200


def ring_sizes(rings: int) -> List[int]:
    return [4] + [8 * (t - 1) for t in range(2, rings + 1)]


def ring_count(n: int) -> int:
    """Number of rings T with 4T^2 - 4T + 4 == n, or 0."""
    t = 1
    while 4 * t * t - 4 * t + 4 < n:
        t += 1
    return t if 4 * t * t - 4 * t + 4 == n else 0


def ring_lattice(rings: int) -> List[Tuple[int, int, int]]:
    """(a, b, ring) lattice positions in [0, 2*rings) for rings 1 (inner) .. rings (outer).

    Ring 1 is the central 2x2 block; ring t > 1 puts 2(t-1) positions on
    each side, so every element of ring t is blocked in all four
    directions by ring t+1.
    """
    out = []
    for a in range(2 * rings):
        for b in range(2 * rings):
            # half-integer offsets from the center
            da, db = 2 * a + 1 - 2 * rings, 2 * b + 1 - 2 * rings
            ma, mb = abs(da), abs(db)
            t = (max(ma, mb) + 1) // 2
            if t == 1 or ma != mb:
                out.append((a, b, t))
    return out


def _rings(spec: GenSpec) -> Instance:
    T = ring_count(spec.n)
    if T == 0:
        valid = [4 * t * t - 4 * t + 4 for t in range(1, 6)]
        raise GenerationError(f"rings needs n in {valid}..., got {spec.n}")
    cells = ring_lattice(T)
    if spec.kind == "sep":
        return SepInstance(Boundary(2 * T + 1, 2 * T + 1), tuple((a + 1, b + 1) for a, b, _ in cells))
    rects = tuple(Rect(2 * a + 1, 2 * b + 1, 2 * a + 2, 2 * b + 2) for a, b, _ in cells)
    return RepInstance(Boundary(4 * T + 1, 4 * T + 1), rects, disjoint=True)


def pinwheel_frame(lo: int, hi: int) -> List[Rect]:
    """Four unit-thick bars around [lo, hi]^2, pairwise disjoint, each overhanging the next."""
    return [
        Rect(lo, lo, hi - 2, lo + 1),      # bottom
        Rect(hi - 1, lo, hi, hi - 2),      # right
        Rect(lo + 2, hi - 1, hi, hi),      # top
        Rect(lo, lo + 2, lo + 1, hi),      # left
    ]


def _staircase(spec: GenSpec) -> Instance:
    if spec.kind != "rep":
        raise GenerationError("staircase is a rectangle family")
    if spec.n % 4 or spec.n == 0:
        raise GenerationError(f"staircase needs n a positive multiple of 4, got {spec.n}")
    depth = spec.n // 4
    c = 3 * depth + 1
    rects = []
    for t in range(1, depth + 1):
        rects.extend(pinwheel_frame(c - 3 * t, c + 3 * t))
    return RepInstance(Boundary(2 * c, 2 * c), tuple(rects), disjoint=True)


def _rows(spec: GenSpec) -> Instance:
    n = spec.n
    if spec.kind == "sep":
        w = spec.width or n + 1
        h = spec.height or 4
        if w < n + 1 and spec.interior:
            raise GenerationError(f"{n} interior points do not fit in a row of width {w}")
        y = h // 2
        return SepInstance(Boundary(w, h), tuple((x + 1, y) for x in range(n)))
    w = spec.width or 2 * n + 1
    h = spec.height or 4
    if w < 2 * n + 1:
        raise GenerationError(f"{n} spaced unit squares do not fit in width {w}")
    y = h // 2 - 1 if h >= 3 else 0
    rects = tuple(Rect(2 * i + 1, y, 2 * i + 2, y + 1) for i in range(n))
    return RepInstance(Boundary(w, h), rects, disjoint=True)


def _random_sep(spec: GenSpec, rng: random.Random) -> SepInstance:
    w = spec.width or 6
    h = spec.height or 6
    lo = 1 if spec.interior else 0
    xs = range(lo, w + 1 - lo)
    ys = range(lo, h + 1 - lo)
    slots = [(x, y) for x in xs for y in ys]
    if spec.disjoint:
        if spec.n > len(slots):
            raise GenerationError(f"{spec.n} distinct points do not fit in {len(slots)} slots")
        pts = rng.sample(slots, spec.n)
    else:
        if not slots:
            raise GenerationError("grid has no admissible slots")
        pts = [rng.choice(slots) for _ in range(spec.n)]
    return SepInstance(Boundary(w, h), tuple(pts))


def _random_rep(spec: GenSpec, rng: random.Random) -> RepInstance:
    n = spec.n
    w = spec.width or 12
    h = spec.height or 12
    side = spec.max_side or max(1, min(w, h) // 3)
    side = min(side, w, h)
    rects: List[Rect] = []
    if not spec.disjoint:
        for _ in range(n):
            rw, rh = rng.randint(1, side), rng.randint(1, side)
            x, y = rng.randint(0, w - rw), rng.randint(0, h - rh)
            rects.append(Rect(x, y, x + rw, y + rh))
        return RepInstance(Boundary(w, h), tuple(rects))

    # bucket grid keyed by cell of size `side`; a candidate only meets buckets it touches
    bucket: Dict[Tuple[int, int], List[int]] = {}
    attempts = 0
    budget = spec.retries * max(n, 1)
    while len(rects) < n:
        attempts += 1
        if attempts > budget:
            raise GenerationError(f"could not place {n} disjoint rectangles in {w}x{h} "
                                  f"after {budget} attempts ({len(rects)} placed)")
        rw, rh = rng.randint(1, side), rng.randint(1, side)
        x, y = rng.randint(0, w - rw), rng.randint(0, h - rh)
        cand = Rect(x, y, x + rw, y + rh)
        keys = [(bx, by) for bx in range(x // side, (x + rw) // side + 1)
                for by in range(y // side, (y + rh) // side + 1)]
        near = {k for key in keys for k in bucket.get(key, ())}
        if any(cand.intersects(rects[k]) for k in near):
            continue
        for key in keys:
            bucket.setdefault(key, []).append(len(rects))
        rects.append(cand)
    return RepInstance(Boundary(w, h), tuple(rects), disjoint=True)


def generate(spec: GenSpec) -> Instance:
    if spec.kind not in ("rep", "sep"):
        raise GenerationError(f"kind must be rep or sep, got {spec.kind!r}")
    if spec.n < 0:
        raise GenerationError("n must be non-negative")
    if spec.family == "rings":
        return _rings(spec)
    if spec.family == "staircase":
        return _staircase(spec)
    if spec.family == "rows":
        return _rows(spec)
    if spec.family != "random":
        raise GenerationError(f"unknown family {spec.family!r}; choose from {FAMILIES}")
    rng = random.Random(spec.seed)
    if spec.kind == "sep":
        return _random_sep(spec, rng)
    return _random_rep(spec, rng)


def sparse_rep(n: int, seed: int, side: int = 8, shadow: float = 4.0) -> RepInstance:
    """Disjoint random rectangles in a box scaled so that about ``shadow``
    other rectangles fall in each directional shadow (keeps DAGs linear in n)."""
    box = max(4 * side, int(math.ceil(n * side / shadow)))
    return _random_rep(GenSpec(n=n, seed=seed, width=box, height=box, max_side=side),
                       random.Random(seed))
