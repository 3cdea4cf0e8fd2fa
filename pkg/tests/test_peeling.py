import graphlib
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectescape.generators import GenSpec, generate, sparse_rep
from rectescape.geometry import (DIRECTIONS, Boundary, BoundViolation, Rect, RepInstance, SepInstance,
                                 compute_density)
from rectescape.peeling import (NotDisjoint, build_escape_dag, level_densities, peel, peel_and_verify,
                                solve_peeling)

import _reference as ref
from corpus import rep_small

L, R, D, U = DIRECTIONS


def two_rings():
    return generate(GenSpec(kind="rep", family="rings", n=12))


class TestDag:
    def test_single(self):
        inst = RepInstance(Boundary(4, 4), (Rect(1, 1, 2, 2),))
        for d in DIRECTIONS:
            assert build_escape_dag(inst, d).edges() == set()

    def test_stacked_up(self):
        inst = RepInstance(Boundary(6, 6), (Rect(1, 1, 3, 2), Rect(2, 3, 4, 4)))
        assert build_escape_dag(inst, U).edges() == {(1, 0)}
        assert build_escape_dag(inst, D).edges() == {(0, 1)}
        assert build_escape_dag(inst, L).edges() == set()

    def test_corner_contact_does_not_block(self):
        # projections meet in a single x value only
        inst = RepInstance(Boundary(6, 6), (Rect(1, 1, 2, 2), Rect(2, 3, 3, 4)))
        assert build_escape_dag(inst, U).edges() == set()

    def test_full_shadow_not_just_nearest(self):
        inst = RepInstance(Boundary(4, 9), tuple(Rect(1, 2 * i + 1, 2, 2 * i + 2) for i in range(4)))
        assert build_escape_dag(inst, U).edges() == {(i, j) for i in range(4) for j in range(i)}

    def test_rejects_overlap(self):
        inst = RepInstance(Boundary(5, 5), (Rect(0, 0, 2, 2), Rect(1, 1, 3, 3)))
        with pytest.raises(NotDisjoint):
            build_escape_dag(inst, U)

    def test_text_dump(self):
        inst = RepInstance(Boundary(6, 6), (Rect(1, 1, 3, 2), Rect(2, 3, 4, 4)))
        assert build_escape_dag(inst, U).to_text().splitlines()[1:] == ["1 0"]

    @pytest.mark.parametrize("n", [1, 2, 10, 50, 200])
    def test_matches_pairwise(self, n):
        for seed in range(4):
            box = 20 + 5 * math.isqrt(n) * 2
            inst = generate(GenSpec(kind="rep", n=n, seed=seed, width=box, height=box, max_side=6))
            for d in DIRECTIONS:
                dag = build_escape_dag(inst, d)
                assert dag.edges() == ref.brute_dag(inst, d)
                order = dag.topological_order()
                pos = {v: k for k, v in enumerate(order)}
                assert all(pos[i] < pos[j] for i, j in dag.edges())

    def test_cycle_detected_by_validation(self):
        dag = build_escape_dag(RepInstance(Boundary(4, 4), (Rect(1, 1, 2, 2), Rect(3, 3, 4, 4))), U)
        dag.succ[0].append(1)
        dag.succ[1].append(0)
        with pytest.raises(graphlib.CycleError):
            dag.topological_order()


class TestPeel:
    def test_single(self):
        res = peel(RepInstance(Boundary(4, 4), (Rect(1, 1, 2, 2),)))
        assert res.rho == 1 and res.assignment.names() == ["left"]

    def test_two_rings(self):
        inst = two_rings()
        res = peel(inst)
        assert res.rho == 2
        inner = {i for i, r in enumerate(inst.rects) if 3 <= r.x1 <= 5 and 3 <= r.y1 <= 5}
        assert len(inner) == 4 and set(res.levels[1]) == inner
        _, rep = peel_and_verify(inst)
        assert rep.density <= 4

    @pytest.mark.parametrize("rings", [1, 2, 3, 4])
    def test_rings_levels(self, rings):
        n = 4 * rings * rings - 4 * rings + 4
        assert peel(generate(GenSpec(kind="rep", family="rings", n=n))).rho == rings

    def test_staircase_depth(self):
        rhos = [peel(generate(GenSpec(kind="rep", family="staircase", n=4 * d))).rho
                for d in range(1, 11)]
        assert rhos == sorted(rhos) and rhos[-1] > rhos[0]
        assert rhos == list(range(1, 11))

    def test_rejects_overlap(self):
        with pytest.raises(NotDisjoint):
            peel(RepInstance(Boundary(5, 5), (Rect(0, 0, 2, 2), Rect(1, 1, 3, 3))))

    def test_sep_input_via_embedding(self):
        inst = SepInstance(Boundary(4, 4), ((2, 1), (1, 2), (3, 2), (2, 3), (2, 2)))
        res = peel(inst)
        assert res.rho == 2 and res.levels[1] == (4,)
        with pytest.raises(NotDisjoint):
            peel(SepInstance(Boundary(4, 4), ((1, 1), (1, 1))))

    def test_matches_reference_levels(self):
        for inst in rep_small():
            res = peel(inst)
            levels, a = ref.brute_levels(inst)
            assert [tuple(lv) for lv in levels] == list(res.levels)
            assert res.assignment == a

    def test_levels_partition_and_blockers_earlier(self):
        for inst in rep_small():
            res = peel(inst)
            lvl = res.level_of()
            assert sorted(i for lv in res.levels for i in lv) == list(range(len(inst)))
            for j, d in enumerate(res.assignment):
                for i in range(len(inst)):
                    if i != j and ref.blocks(inst.rects[i], inst.rects[j], d):
                        assert lvl[i] < lvl[j]

    def test_density_bounds(self):
        for inst in rep_small():
            res, rep = peel_and_verify(inst)
            assert rep.density <= 2 * res.rho
            assert all(d <= 2 for d in level_densities(inst, res))

    def test_removing_first_level_shifts_the_rest(self):
        for inst in list(rep_small()) + [two_rings()]:
            res = peel(inst)
            if res.rho < 2:
                continue
            keep = [i for i in range(len(inst)) if i not in set(res.levels[0])]
            sub = RepInstance(inst.boundary, tuple(inst.rects[i] for i in keep))
            res2 = peel(sub)
            relabel = [tuple(sorted(keep[i] for i in lv)) for lv in res2.levels]
            assert relabel == list(res.levels[1:])

    def test_bound_violation_is_raised(self, monkeypatch):
        import rectescape.peeling as mod

        inst = two_rings()
        real = mod.compute_density

        def inflated(i, a):
            rep = real(i, a)
            return type(rep)(99, rep.witness_cell, rep.boundary_density, rep.witness_boundary)

        monkeypatch.setattr(mod, "compute_density", inflated)
        with pytest.raises(BoundViolation):
            solve_peeling(inst)


@st.composite
def disjoint_reps(draw):
    seed = draw(st.integers(0, 10**6))
    n = draw(st.integers(0, 30))
    return generate(GenSpec(kind="rep", n=n, seed=seed, width=30, height=30, max_side=5))


@settings(max_examples=60, deadline=None)
@given(disjoint_reps())
def test_property_dag_and_peel(inst):
    for d in DIRECTIONS:
        assert build_escape_dag(inst, d).edges() == ref.brute_dag(inst, d)
    a, rep = solve_peeling(inst)
    res = peel(inst)
    assert rep.density <= 2 * res.rho
    assert compute_density(inst, a) == rep


def test_sparse_family_is_linear():
    inst = sparse_rep(2000, seed=1)
    edges = sum(len(build_escape_dag(inst, d).edges()) for d in DIRECTIONS)
    assert edges <= 20 * len(inst)
    assert peel(inst).rho >= 1


def test_random_orders_give_same_levels():
    inst = rep_small()[7]
    rng = random.Random(1)
    base = peel(inst)
    for _ in range(10):
        perm = list(range(len(inst)))
        rng.shuffle(perm)
        res = peel(RepInstance(inst.boundary, tuple(inst.rects[i] for i in perm)))
        mapped = sorted(tuple(sorted(perm[i] for i in lv)) for lv in res.levels)
        assert mapped == sorted(base.levels)
