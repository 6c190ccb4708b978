import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fbr.augment import edge_augmentation
from fbr.graph import GEO_TOL, CommGraph, RobotConfig, comm_graph, is_biconnected
from fbr.instances import gen_instance
from fbr.relocate import (
    BISECTION_REL_TOL,
    TAU_FEAS,
    cascaded_relocation,
    constraint_set,
    max_displacement,
    mm_feasible,
    mm_lower_bound,
    mm_opt,
    scr,
)

COLLINEAR4 = RobotConfig([[0, 0], [1, 0], [2, 0], [3, 0]], 1.0)
COLLINEAR4_CONS = {(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)}


def dist(pos, i, j):
    return math.dist(pos[i], pos[j])


def assert_constraints(pos, pairs, h, tol=GEO_TOL):
    for i, j in pairs:
        assert dist(pos, i, j) <= h + tol, (i, j, dist(pos, i, j))


class TestCascade:
    def test_chain(self):
        pos = np.array([[0.0, 0], [1, 0], [2, 0]])
        g = CommGraph.from_edges(3, [(0, 1), (1, 2)])
        out = cascaded_relocation(pos, g, 0, (-0.4, 0), 1.0)
        np.testing.assert_allclose(out, [[-0.4, 0], [0.6, 0], [1.6, 0]], atol=1e-12)

    def test_within_slack(self):
        pos = np.array([[0.0, 0], [0.5, 0], [1.0, 0]])
        g = CommGraph.from_edges(3, [(0, 1), (1, 2)])
        out = cascaded_relocation(pos, g, 0, (-0.3, 0), 1.0)
        np.testing.assert_array_equal(out[1:], pos[1:])
        assert tuple(out[0]) == (-0.3, 0)

    def test_star(self):
        leaves = [(1.0, 0.0), (-0.5, math.sqrt(3) / 2), (-0.5, -math.sqrt(3) / 2)]
        pos = np.array([(0.0, 0.0), *leaves])
        g = CommGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        out = cascaded_relocation(pos, g, 0, (0.3, 0.4), 1.0)
        for k in (1, 2, 3):
            assert dist(out, 0, k) <= 1.0 + GEO_TOL
        # only the leaf on the far side was dragged, and it ends exactly at range
        assert dist(out, 0, 3) == pytest.approx(1.0)
        np.testing.assert_array_equal(out[1:3], pos[1:3])

    def test_input_untouched(self):
        pos = np.array([[0.0, 0], [1, 0], [2, 0]])
        cascaded_relocation(pos, CommGraph.from_edges(3, [(0, 1), (1, 2)]), 0, (-1, 0), 1.0)
        np.testing.assert_array_equal(pos, [[0, 0], [1, 0], [2, 0]])


class TestSCR:
    def test_symmetric_split(self):
        cfg = RobotConfig([[0, 0], [2, 0], [1, 5]], 1.0)
        sol = scr(cfg, [(0, 1)])
        np.testing.assert_allclose(sol.new_positions[:2], [[0.5, 0], [1.5, 0]], atol=1e-12)
        assert sol.minmax == pytest.approx(0.5)

    def test_empty_augmentation(self):
        cfg = gen_instance(8, seed=1).config
        sol = scr(cfg, [])
        np.testing.assert_array_equal(sol.new_positions, cfg.positions)
        assert sol.minmax == 0

    def test_collinear(self):
        ea = edge_augmentation(COLLINEAR4)
        sol = scr(COLLINEAR4, ea)
        assert is_biconnected(comm_graph(COLLINEAR4.moved(sol.new_positions)))
        opt = mm_opt(COLLINEAR4, COLLINEAR4_CONS)
        assert sol.minmax >= 0.5 - 1e-12
        assert sol.minmax >= opt.minmax - 1e-9

    @pytest.mark.parametrize("seed", range(20))
    def test_postcondition(self, seed):
        cfg = gen_instance(10 + seed, seed=seed).config
        ea = edge_augmentation(cfg)
        sol = scr(cfg, ea)
        cons = constraint_set(comm_graph(cfg), ea.pairs())
        assert_constraints(sol.new_positions, cons, cfg.h)
        assert is_biconnected(comm_graph(cfg.moved(sol.new_positions)))
        assert sol.minmax == pytest.approx(max_displacement(cfg.positions, sol.new_positions), abs=1e-9)
        assert sol.augmentation is ea

    def test_deterministic(self):
        cfg = gen_instance(20, seed=3).config
        ea = edge_augmentation(cfg)
        np.testing.assert_array_equal(scr(cfg, ea).new_positions, scr(cfg, ea).new_positions)


class TestLowerBound:
    def test_satisfied(self):
        assert mm_lower_bound(COLLINEAR4, [(0, 1), (1, 2)]) == 0

    def test_single_pair(self):
        cfg = RobotConfig([[0, 0], [3, 0], [0, 1]], 1.0)
        assert mm_lower_bound(cfg, [(0, 1)]) == pytest.approx(1.0)


class TestFeasible:
    def test_midpoint_meeting(self):
        cfg = RobotConfig([[0, 0], [2, 0], [0, 9]], 1.0)
        ok, pos = mm_feasible(cfg, [(0, 1)], 0.5)
        assert ok
        assert dist(pos, 0, 1) <= 1 + TAU_FEAS

    def test_rho_zero(self):
        cfg = RobotConfig([[0, 0], [2, 0], [0, 9]], 1.0)
        assert not mm_feasible(cfg, [(0, 1)], 0.0)[0]

    def test_rho_huge(self):
        cfg = gen_instance(12, seed=5).config
        pairs = [(i, j) for i in range(12) for j in range(i + 1, 12)]
        ok, pos = mm_feasible(cfg, pairs, cfg.diameter())
        assert ok
        assert max_displacement(cfg.positions, pos) <= cfg.diameter() + 1e-12

    def test_negative_rho(self):
        with pytest.raises(ValueError):
            mm_feasible(COLLINEAR4, [(0, 2)], -1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone(self, seed):
        cfg = gen_instance(10, seed=seed).config
        cons = constraint_set(comm_graph(cfg), edge_augmentation(cfg).pairs())
        opt = mm_opt(cfg, cons).minmax
        assert not mm_feasible(cfg, cons, 0.5 * opt)[0]
        for scale in (1.5, 3.0, 10.0):
            assert mm_feasible(cfg, cons, scale * opt + 1e-6)[0]


class TestOpt:
    def test_two_robot_slack_one(self):
        cfg = RobotConfig([[0, 0], [2, 0], [1, 5]], 1.0)
        sol = mm_opt(cfg, [(0, 1)])
        assert sol.minmax == pytest.approx(0.5, abs=1e-6)
        np.testing.assert_allclose(sol.new_positions[:2], [[0.5, 0], [1.5, 0]], atol=1e-5)

    def test_already_satisfied(self):
        sol = mm_opt(COLLINEAR4, [(0, 1), (1, 2)])
        assert sol.minmax == 0
        np.testing.assert_array_equal(sol.new_positions, COLLINEAR4.positions)

    def test_collinear_grid(self):
        sol = mm_opt(COLLINEAR4, COLLINEAR4_CONS)
        grid = oracles.grid_minmax_collinear([0, 1, 2, 3], COLLINEAR4_CONS, 1.0)
        assert sol.minmax == pytest.approx(0.5, abs=BISECTION_REL_TOL * 3)
        assert abs(sol.minmax - grid) <= 2e-3

    @pytest.mark.parametrize("seed", range(6))
    def test_random_collinear_grid(self, seed):
        rng = np.random.default_rng(seed)
        xs = np.cumsum(np.r_[0, rng.uniform(0.6, 1.0, 3)])
        extra = [p for p in [(0, 2), (1, 3), (0, 3)] if rng.random() < 0.7] or [(0, 3)]
        cons = {(0, 1), (1, 2), (2, 3), *extra}
        cfg = RobotConfig(np.c_[xs, np.zeros(4)], 1.0)
        sol = mm_opt(cfg, cons)
        assert abs(sol.minmax - oracles.grid_minmax_collinear(xs, cons, 1.0)) <= 2e-3

    @pytest.mark.parametrize("seed", range(15))
    def test_sandwich_and_consistency(self, seed):
        cfg = gen_instance(8 + seed, seed=seed).config
        ea = edge_augmentation(cfg)
        cons = constraint_set(comm_graph(cfg), ea.pairs())
        s = scr(cfg, ea)
        opt = mm_opt(cfg, cons, upper=s)
        lb = mm_lower_bound(cfg, cons)
        width = BISECTION_REL_TOL * max(cfg.diameter(), 1.0)
        assert lb - TAU_FEAS <= opt.minmax <= s.minmax + width
        assert opt.minmax == pytest.approx(max_displacement(cfg.positions, opt.new_positions), abs=1e-9)
        assert_constraints(opt.new_positions, cons, cfg.h)
        assert is_biconnected(comm_graph(cfg.moved(opt.new_positions)))

    def test_default_upper_bracket(self):
        cfg = gen_instance(10, seed=2).config
        cons = constraint_set(comm_graph(cfg), edge_augmentation(cfg).pairs())
        a, b = mm_opt(cfg, cons), mm_opt(cfg, cons, upper=scr(cfg, [p for p in cons]))
        assert a.minmax == pytest.approx(b.minmax, abs=1e-5)


@settings(max_examples=20, deadline=None)
@given(
    st.integers(0, 10**6),
    st.floats(-50, 50, allow_nan=False),
    st.floats(-50, 50, allow_nan=False),
)
def test_translation_equivariance(seed, dx, dy):
    cfg = gen_instance(8, seed=seed).config
    shift = np.array([dx, dy])
    moved = RobotConfig(cfg.positions + shift, cfg.h)
    if comm_graph(moved) != comm_graph(cfg):  # rounding can flip a boundary edge
        return
    ea = edge_augmentation(cfg)
    cons = constraint_set(comm_graph(cfg), ea.pairs())
    a, b = scr(cfg, ea), scr(moved, ea.pairs())
    np.testing.assert_allclose(b.new_positions - shift, a.new_positions, atol=1e-7)
    oa, ob = mm_opt(cfg, cons, upper=a), mm_opt(moved, cons, upper=b)
    assert oa.minmax == pytest.approx(ob.minmax, abs=1e-5)
