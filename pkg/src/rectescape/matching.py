"""Matching-based SEP approximation.

Each grid point is matched to one of ``k_B`` copies of one of its (up to
four) boundary projections. The smallest ``k_B`` admitting a matching that
saturates every point is the minimum boundary density, and the matched
projections give the escape directions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .geometry import (DIRECTIONS, Boundary, Direction, EscapeAssignment, Point, SepInstance,
                       sep_path_end)

INF = float("inf")


def projections(p: Point, b: Boundary) -> List[Tuple[Point, Direction]]:
    """Perpendicular projections of ``p`` on the four boundary edges, canonical order."""
    return [(sep_path_end(p, alpha, b), alpha) for alpha in DIRECTIONS]


@dataclass
class BipartiteGraph:
    """Left vertices ``0..n_left-1``; right vertices are hashable labels.

    ``adj[u]`` lists right labels in the order the matching should try them.
    """

    adj: List[List]

    @property
    def n_left(self) -> int:
        return len(self.adj)

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adj)


def max_matching(g: BipartiteGraph) -> Dict[int, object]:
    """Hopcroft-Karp: shortest augmenting paths in phases, O(sqrt(V) E).

    Returns ``{left: right}``. Deterministic for a fixed adjacency order.
    """
    n = g.n_left
    adj = g.adj
    match_l: List[Optional[object]] = [None] * n
    match_r: Dict[object, int] = {}
    dist = [INF] * n

    def bfs() -> bool:
        q = deque()
        for u in range(n):
            if match_l[u] is None:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative DFS along the layered graph; it[u] is the next edge to try
        it = {root: 0}
        path = [root]
        while path:
            u = path[-1]
            i = it[u]
            if i == len(adj[u]):
                dist[u] = INF
                path.pop()
                continue
            it[u] = i + 1
            v = adj[u][i]
            w = match_r.get(v)
            if w is None:
                # augment along the path
                for k in range(len(path) - 1, -1, -1):
                    x = path[k]
                    nv = adj[x][it[x] - 1]
                    match_l[x] = nv
                    match_r[nv] = x
                return True
            if dist[w] == dist[u] + 1 and w not in it:
                it[w] = 0
                path.append(w)
        return False

    while bfs():
        for u in range(n):
            if match_l[u] is None:
                dfs(u)
    return {u: v for u, v in enumerate(match_l) if v is not None}


def build_graph(inst: SepInstance, k_b: int) -> Tuple[BipartiteGraph, List[Dict[Point, Direction]]]:
    """Graph for a given ``k_b``; adjacency ordered by direction then copy index.

    A point on the boundary can project onto itself from two sides (corners);
    the repeated boundary vertex keeps its first direction in canonical order.
    """
    adj = []
    dir_of = []
    for p in inst.points:
        seen: Dict[Point, Direction] = {}
        for q, alpha in projections(p, inst.boundary):
            seen.setdefault(q, alpha)
        dir_of.append(seen)
        adj.append([(q, c) for q in seen for c in range(k_b)])
    return BipartiteGraph(adj), dir_of


@dataclass(frozen=True)
class MatchingResult:
    k_b: int
    matching: Tuple[Tuple[int, Tuple[Point, int]], ...]
    assignment: EscapeAssignment
    probes: int


def _try(inst: SepInstance, k_b: int):
    g, dir_of = build_graph(inst, k_b)
    m = max_matching(g)
    return (len(m) == len(inst)), m, dir_of


def feasible(inst: SepInstance, k_b: int) -> bool:
    return _try(inst, k_b)[0]


def solve_sep(inst: SepInstance, binary_search: bool = False) -> MatchingResult:
    """Minimum boundary density by scanning ``k_B = 1, 2, ...`` (or bisecting)."""
    n = len(inst)
    if n == 0:
        raise ValueError("solve_sep needs at least one point")
    probes = 0
    if binary_search:
        lo, hi = 1, n
        while lo < hi:
            mid = (lo + hi) // 2
            probes += 1
            if feasible(inst, mid):
                hi = mid
            else:
                lo = mid + 1
        k_b = lo
        probes += 1
        ok, m, dir_of = _try(inst, k_b)
    else:
        for k_b in range(1, n + 1):
            probes += 1
            ok, m, dir_of = _try(inst, k_b)
            if ok:
                break
    if not ok:  # n copies of any projection always suffice
        raise RuntimeError("no saturating matching at k_B = n")
    dirs = tuple(dir_of[u][m[u][0]] for u in range(n))
    pairs = tuple(sorted(m.items()))
    return MatchingResult(k_b, pairs, EscapeAssignment(dirs), probes)
