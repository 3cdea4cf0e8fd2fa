"""Exhaustive solvers: the OPT ground truth for every approximation test.

All 4^n assignments are scored at once with numpy. Each (element,
direction) pair gets an indicator row over the evaluation sites (open
escape-grid cells for REP, lattice points for SEP); loads are accumulated
by broadcasting, element 0 being the most significant digit, so the flat
index order is the lexicographic order of direction tuples and
``argmin`` gives the lexicographically first optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import (DIRECTIONS, EscapeAssignment, RepInstance, SepInstance,
                       build_escape_grid, escape_path, sep_path_end)

DEFAULT_CAP = 8


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    opt_density: int
    opt_assignment: EscapeAssignment
    opt_boundary_density: Optional[int] = None
    boundary_assignment: Optional[EscapeAssignment] = None


def _rep_indicators(inst: RepInstance) -> np.ndarray:
    grid = build_escape_grid(inst)
    nx, ny = grid.shape
    cx = np.array([grid.xs[i] + grid.xs[i + 1] for i in range(nx)])  # doubled centers
    cy = np.array([grid.ys[j] + grid.ys[j + 1] for j in range(ny)])
    out = np.zeros((len(inst), 4, nx * ny), dtype=np.int8)
    for i, r in enumerate(inst.rects):
        for k, alpha in enumerate(DIRECTIONS):
            p = escape_path(r, alpha, inst.boundary)
            inx = (2 * p.x1 < cx) & (cx < 2 * p.x2)
            iny = (2 * p.y1 < cy) & (cy < 2 * p.y2)
            out[i, k] = np.outer(inx, iny).ravel()
    return out


def _sep_indicators(inst: SepInstance):
    b = inst.boundary
    X, Y = np.meshgrid(np.arange(b.width + 1), np.arange(b.height + 1), indexing="ij")
    out = np.zeros((len(inst), 4, X.size), dtype=np.int8)
    for i, p in enumerate(inst.points):
        for k, alpha in enumerate(DIRECTIONS):
            q = sep_path_end(p, alpha, b)
            x0, x1 = sorted((p[0], q[0]))
            y0, y1 = sorted((p[1], q[1]))
            out[i, k] = ((X >= x0) & (X <= x1) & (Y >= y0) & (Y <= y1)).ravel()
    on_edge = ((X == 0) | (X == b.width) | (Y == 0) | (Y == b.height)).ravel()
    return out, on_edge


def _all_loads(ind: np.ndarray) -> np.ndarray:
    n = ind.shape[0]
    if n == 0:
        return np.zeros((1, ind.shape[2]), dtype=np.int8)
    loads = ind[0]
    for i in range(1, n):
        loads = (loads[:, None, :] + ind[i][None, :, :]).reshape(-1, ind.shape[2])
    return loads


def _decode(idx: int, n: int) -> EscapeAssignment:
    digits = []
    for _ in range(n):
        idx, k = divmod(idx, 4)
        digits.append(DIRECTIONS[k])
    return EscapeAssignment(tuple(reversed(digits)))


def _check_cap(n: int, cap: int):
    if n > cap:
        raise InstanceTooLarge(f"{n} elements exceed the enumeration cap {cap} (4^{n} assignments)")


def solve_exact_rep(inst: RepInstance, cap: int = DEFAULT_CAP) -> OracleResult:
    n = len(inst)
    _check_cap(n, cap)
    dens = _all_loads(_rep_indicators(inst)).max(axis=1)
    best = int(np.argmin(dens))
    return OracleResult(int(dens[best]), _decode(best, n))


def solve_exact_sep(inst: SepInstance, cap: int = DEFAULT_CAP) -> OracleResult:
    """Exhaustive OPT plus the independently minimized boundary density."""
    n = len(inst)
    _check_cap(n, cap)
    ind, on_edge = _sep_indicators(inst)
    loads = _all_loads(ind)
    dens = loads.max(axis=1)
    bdens = loads[:, on_edge].max(axis=1)
    best = int(np.argmin(dens))
    bbest = int(np.argmin(bdens))
    return OracleResult(int(dens[best]), _decode(best, n),
                        int(bdens[bbest]), _decode(bbest, n))


def solve_exact(inst, cap: int = DEFAULT_CAP) -> OracleResult:
    if isinstance(inst, SepInstance):
        return solve_exact_sep(inst, cap)
    return solve_exact_rep(inst, cap)
