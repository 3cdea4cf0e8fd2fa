"""Seeded instance corpora shared by the oracle-backed tests.

Random small instances almost never need density 2, so the "blocked"
corpora keep only draws where some element is boxed in on all four sides
(at least two peeling levels), which is exactly when OPT >= 2 on a
disjoint instance.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import List, Tuple

from rectescape.generators import GenerationError, GenSpec, generate
from rectescape.geometry import RepInstance, SepInstance
from rectescape.mpc import peel_points_sequential
from rectescape.peeling import peel


@lru_cache(maxsize=None)
def rep_blocked(count: int = 500, start: int = 0) -> Tuple[RepInstance, ...]:
    out: List[RepInstance] = []
    seed = start
    while len(out) < count:
        seed += 1
        rng = random.Random(seed)
        w, h, n = rng.randint(6, 8), rng.randint(6, 8), rng.randint(5, 7)
        try:
            inst = generate(GenSpec(kind="rep", n=n, seed=seed, disjoint=True,
                                    width=w, height=h, max_side=3, retries=30))
        except GenerationError:
            continue
        if peel(inst).rho >= 2:
            out.append(inst)
    return tuple(out)


@lru_cache(maxsize=None)
def rep_small(count: int = 150, disjoint: bool = True) -> Tuple[RepInstance, ...]:
    """Unfiltered random REP instances, n <= 7."""
    out: List[RepInstance] = []
    seed = 10_000 if disjoint else 20_000
    while len(out) < count:
        seed += 1
        rng = random.Random(seed)
        w, h, n = rng.randint(4, 9), rng.randint(4, 9), rng.randint(1, 7)
        try:
            out.append(generate(GenSpec(kind="rep", n=n, seed=seed, disjoint=disjoint,
                                        width=w, height=h, max_side=3, retries=30)))
        except GenerationError:
            continue
    return tuple(out)


@lru_cache(maxsize=None)
def sep_general(count: int = 600) -> Tuple[SepInstance, ...]:
    """Interior SEP points, n <= 7, half with repeated points allowed."""
    out = []
    for seed in range(count):
        rng = random.Random(seed)
        disj = seed % 2 == 0
        w, h, n = rng.randint(2, 5), rng.randint(2, 5), rng.randint(1, 7)
        if disj:
            n = min(n, (w - 1) * (h - 1))
        out.append(generate(GenSpec(kind="sep", n=n, seed=seed, disjoint=disj, width=w, height=h)))
    return tuple(out)


@lru_cache(maxsize=None)
def sep_blocked(count: int = 200) -> Tuple[SepInstance, ...]:
    """Disjoint interior SEP instances, n <= 7, with at least two levels."""
    out = []
    seed = 50_000
    while len(out) < count:
        seed += 1
        rng = random.Random(seed)
        w, h = rng.randint(3, 5), rng.randint(3, 5)
        n = min(rng.randint(5, 7), (w - 1) * (h - 1))
        inst = generate(GenSpec(kind="sep", n=n, seed=seed, disjoint=True, width=w, height=h))
        if max(peel_points_sequential(inst)[1]) >= 2:
            out.append(inst)
    return tuple(out)


@lru_cache(maxsize=None)
def sep_large(count: int = 40) -> Tuple[SepInstance, ...]:
    """Bigger disjoint SEP instances for the MPC simulation (n up to 900)."""
    out = []
    for seed in range(count):
        rng = random.Random(seed)
        side = rng.randint(8, 40)
        n = rng.randint(1, min(900, (side - 1) ** 2))
        out.append(generate(GenSpec(kind="sep", n=n, seed=seed, disjoint=True,
                                    width=side, height=side)))
    return tuple(out)
