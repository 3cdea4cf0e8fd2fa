"""LP relaxation interface and rounding for REP.

The linear program is emitted in CPLEX LP text and solved out of process;
a solver's answer comes back as ``i dir value`` lines plus an
``objective value`` line. Feasibility is checked in exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (DIRECTIONS, SHORT_NAME, BoundViolation, DensityReport, Direction, EscapeAssignment,
                       GeometryError, RepInstance, build_escape_grid, compute_density_rep,
                       escape_path)

TOLERANCE = Fraction(1, 10**9)


class ParseError(ValueError):
    pass


class InfeasibleSolution(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def var_name(i: int, alpha: Direction) -> str:
    return f"r_{i}_{SHORT_NAME[alpha]}"


def cell_membership(inst: RepInstance) -> Dict[Tuple[int, int], List[Tuple[int, int]]]:
    """Covered cells -> list of (rectangle, direction index) whose path contains the cell."""
    grid = build_escape_grid(inst)
    cells: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for i, r in enumerate(inst.rects):
        for k, alpha in enumerate(DIRECTIONS):
            i0, i1, j0, j1 = grid.cell_range(escape_path(r, alpha, inst.boundary))
            for ci in range(i0, i1):
                for cj in range(j0, j1):
                    cells.setdefault((ci, cj), []).append((i, k))
    return dict(sorted(cells.items()))


def export_lp(inst: RepInstance) -> str:
    """CPLEX LP text: minimize k subject to one escape row per rectangle and one
    load row per escape-grid cell that some path covers."""
    lines = ["\\ rectangle escape LP relaxation", "Minimize", " obj: k", "Subject To"]
    for i in range(len(inst)):
        terms = " + ".join(var_name(i, a) for a in DIRECTIONS)
        lines.append(f" esc_{i}: {terms} >= 1")
    for (ci, cj), members in cell_membership(inst).items():
        terms = " + ".join(var_name(i, DIRECTIONS[k]) for i, k in members)
        lines.append(f" cell_{ci}_{cj}: {terms} - k <= 0")
    lines.append("Bounds")
    lines.append(" k >= 0")
    for i in range(len(inst)):
        for a in DIRECTIONS:
            lines.append(f" 0 <= {var_name(i, a)} <= 1")
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FractionalSolution:
    r: Tuple[Tuple[Fraction, Fraction, Fraction, Fraction], ...]  # canonical direction order
    k_f: Fraction

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.r], dtype=float).reshape(-1, 4)


def cell_loads(inst: RepInstance, r: Sequence[Sequence[Fraction]]) -> Dict[Tuple[int, int], Fraction]:
    return {c: sum((r[i][k] for i, k in members), Fraction(0))
            for c, members in cell_membership(inst).items()}


def check_feasible(inst: RepInstance, f: FractionalSolution) -> None:
    if len(f.r) != len(inst):
        raise InfeasibleSolution(f"solution covers {len(f.r)} rectangles, instance has {len(inst)}")
    for i, row in enumerate(f.r):
        for k, v in enumerate(row):
            if v < -TOLERANCE or v > 1 + TOLERANCE:
                raise InfeasibleSolution(f"{var_name(i, DIRECTIONS[k])} = {float(v)} outside [0, 1]",
                                         ("bound", i, k))
        if sum(row) < 1 - TOLERANCE:
            raise InfeasibleSolution(f"rectangle {i}: escape sum {float(sum(row))} < 1",
                                     ("escape", i))
    for cell, load in cell_loads(inst, f.r).items():
        if load > f.k_f + TOLERANCE:
            raise InfeasibleSolution(f"cell {cell}: load {float(load)} > k = {float(f.k_f)}",
                                     ("cell", cell))


def _parse_dir(tok: str) -> Direction:
    try:
        return Direction.parse(tok)
    except GeometryError as exc:
        raise ParseError(str(exc)) from None


def import_fractional(text: str, inst: RepInstance) -> FractionalSolution:
    """Parse ``i dir value`` lines and one ``objective value`` line, then check feasibility."""
    n = len(inst)
    r = [[Fraction(0)] * 4 for _ in range(n)]
    k_f: Optional[Fraction] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "objective" and len(parts) == 2:
                k_f = Fraction(parts[1])
                continue
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: expected 'i dir value', got {raw!r}")
            i = int(parts[0])
            val = Fraction(parts[2])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if not 0 <= i < n:
            raise ParseError(f"line {lineno}: rectangle index {i} out of range")
        r[i][_parse_dir(parts[1]).index] = val
    if k_f is None:
        raise ParseError("missing 'objective value' line")
    sol = FractionalSolution(tuple(tuple(row) for row in r), k_f)
    check_feasible(inst, sol)
    return sol


def format_fractional(f: FractionalSolution) -> str:
    lines = [f"objective {_fmt(f.k_f)}"]
    for i, row in enumerate(f.r):
        for a, v in zip(DIRECTIONS, row):
            lines.append(f"{i} {SHORT_NAME[a]} {_fmt(v)}")
    return "\n".join(lines) + "\n"


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def uniform_solution(inst: RepInstance) -> FractionalSolution:
    """r = 1/4 in every direction, with the exact max cell load as objective."""
    r = [[Fraction(1, 4)] * 4 for _ in range(len(inst))]
    loads = cell_loads(inst, r)
    return FractionalSolution(tuple(tuple(x) for x in r), max(loads.values(), default=Fraction(0)))


def deterministic_round(f: FractionalSolution, inst: RepInstance,
                        check: bool = True) -> Tuple[EscapeAssignment, DensityReport]:
    """Argmax direction per rectangle, ties to the earliest direction."""
    dirs = []
    for row in f.r:
        best = max(range(4), key=lambda k: (row[k], -k))
        dirs.append(DIRECTIONS[best])
    a = EscapeAssignment(tuple(dirs))
    report = compute_density_rep(inst, a)
    if check and report.density > 4 * f.k_f:
        raise BoundViolation(f"rounded density {report.density} > 4 * k_f = {float(4 * f.k_f)}")
    return a, report


def sampling_probs(f: FractionalSolution) -> np.ndarray:
    """Per-rectangle direction distribution r[i] / sum(r[i])."""
    p = f.as_array()
    return p / p.sum(axis=1, keepdims=True)


def _sample(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(probs.shape[0])
    cum = np.cumsum(probs, axis=1)
    cum[:, -1] = 1.0
    return (u[:, None] >= cum).sum(axis=1)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def randomized_round(f: FractionalSolution, inst: RepInstance, seed: int,
                     trial: int = 0) -> Tuple[EscapeAssignment, DensityReport]:
    ks = _sample(sampling_probs(f), trial_rng(seed, trial))
    a = EscapeAssignment(tuple(DIRECTIONS[k] for k in ks))
    return a, compute_density_rep(inst, a)


def sample_directions(f: FractionalSolution, seed: int, trials: int) -> np.ndarray:
    """trials x n matrix of sampled direction indices, same streams as randomized_round."""
    probs = sampling_probs(f)
    return np.stack([_sample(probs, trial_rng(seed, t)) for t in range(trials)]) \
        if trials else np.zeros((0, len(f.r)), dtype=int)


@dataclass(frozen=True)
class TailEstimate:
    epsilon: float
    analytic_bound: float
    empirical_frequency: float
    trials: int
    seed: int
    k: int
    threshold: float
    k_required: int


def analytic_tail(n: int, k: int, epsilon: float) -> float:
    """Union-bounded Chernoff tail 4 n^2 exp(-(k/4) eps^2 / 3)."""
    return 4 * n * n * math.exp(-(k / 4) * epsilon ** 2 / 3)


def required_k(n: int, epsilon: float) -> int:
    """Smallest k with k >= 36 / eps^2 ln n."""
    return math.ceil(36 / epsilon ** 2 * math.log(n)) if n > 1 else 0


def chernoff_tail(inst: RepInstance, f: FractionalSolution, epsilon: float, trials: int,
                  seed: int) -> TailEstimate:
    if not 0 < epsilon < 3:
        raise ValueError("epsilon must lie in (0, 3)")
    n = len(inst)
    k = math.ceil(f.k_f)
    threshold = (1 + epsilon) * float(f.k_f)
    hits = 0
    if n > 1:
        for t in range(trials):
            _, rep = randomized_round(f, inst, seed, t)
            if rep.density >= threshold:
                hits += 1
    return TailEstimate(epsilon, analytic_tail(n, k, epsilon), hits / trials if trials else 0.0,
                        trials, seed, k, threshold, required_k(n, epsilon))
