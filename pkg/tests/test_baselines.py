import math

import numpy as np
import pytest

from fbr.augment import edge_augmentation
from fbr.baselines import BaselineFailure, _translate_leaf, bt, cr, removed_info
from fbr.graph import RobotConfig, block_cut_tree, comm_graph, is_biconnected
from fbr.instances import gen_instance
from fbr.relocate import RelocationError, max_displacement, scr

# Three blocks chained through two cut vertices, bending around a corner:
# {0,5,7,8} -8- {1,2,6,8} -1- {1,3,4}
THREE_BLOCKS = RobotConfig(
    [
        [0.1453, 0.7252], [1.3738, 0.5544], [1.5325, 1.1027], [1.486, 0.0117], [1.322, 0.089],
        [0.3137, 1.2895], [1.5411, 1.4333], [0.3776, 1.3782], [0.5738, 0.9509],
    ],
    1.0,
)


def biconnected_after(cfg, sol):
    return is_biconnected(comm_graph(cfg.moved(sol.new_positions)))


class TestBT:
    def test_already_biconnected(self):
        square = RobotConfig([[0, 0], [1, 0], [1, 1], [0, 1]], 1.0)
        sol = bt(square)
        assert sol.minmax == 0
        np.testing.assert_array_equal(sol.new_positions, square.positions)

    def test_path_of_three(self):
        cfg = RobotConfig([[0, 0], [1, 0], [2, 0]], 1.0)
        sol = bt(cfg)
        assert biconnected_after(cfg, sol)
        # the root block {0, 1} stays put
        np.testing.assert_array_equal(sol.new_positions[:2], cfg.positions[:2])

    def test_three_block_instance(self):
        t = block_cut_tree(comm_graph(THREE_BLOCKS))
        assert sorted(map(sorted, t.blocks)) == [[0, 5, 7, 8], [1, 2, 6, 8], [1, 3, 4]]
        assert t.cuts == [1, 8]
        b = bt(THREE_BLOCKS)
        assert biconnected_after(THREE_BLOCKS, b)
        s = scr(THREE_BLOCKS, edge_augmentation(THREE_BLOCKS))
        assert biconnected_after(THREE_BLOCKS, s)
        assert s.minmax < b.minmax

    def test_translation_is_rigid(self):
        pos = np.array(THREE_BLOCKS.positions)
        leaf, parent = frozenset({1, 3, 4}), frozenset({1, 2, 6, 8})
        movers = [3, 4]
        offset = pos[1] - pos[movers].mean(axis=0)
        gap = float(np.hypot(*offset))
        out = _translate_leaf(pos, 1.0, movers, offset / gap, gap + 2, leaf, parent)
        assert out is not None
        shift = out[movers] - pos[movers]
        np.testing.assert_allclose(shift[0], shift[1], atol=1e-15)
        assert math.dist(out[3], out[4]) == pytest.approx(math.dist(pos[3], pos[4]), abs=1e-12)
        others = [k for k in range(9) if k not in movers]
        np.testing.assert_array_equal(out[others], pos[others])

    @pytest.mark.parametrize("seed", range(15))
    def test_generated(self, seed):
        cfg = gen_instance(8 + seed, seed=seed).config
        try:
            sol = bt(cfg)
        except BaselineFailure:
            pytest.skip("block translation reported failure")
        assert biconnected_after(cfg, sol)
        assert sol.minmax == pytest.approx(max_displacement(cfg.positions, sol.new_positions), abs=1e-9)


class TestCR:
    def test_slides_into_hole(self):
        angles = np.radians([0, 60, 120, 180])
        ring = 0.95 * np.c_[np.cos(angles), np.sin(angles)]
        cfg = RobotConfig(ring, 1.0)
        assert not is_biconnected(comm_graph(cfg))
        sol = cr(cfg, removed_info((0.0, 0.0), [0, 1, 2, 3]))
        assert biconnected_after(cfg, sol)
        # robot 0 stops where it first reaches robot 3, not at the hole
        np.testing.assert_allclose(sol.new_positions[0], [0.05, 0.0], atol=1e-9)
        np.testing.assert_array_equal(sol.new_positions[1:], cfg.positions[1:])
        assert sol.minmax == pytest.approx(0.9)

    def test_zero_movement(self):
        cfg = RobotConfig([[0.2, 0.2], [0.8, 0.2], [0.8, 0.8], [0.2, 0.8]], 1.0)
        sol = cr(cfg, removed_info((0.5, 0.5), [0, 1, 2, 3]))
        assert sol.minmax == 0

    def test_needs_neighbours(self):
        cfg = RobotConfig([[0, 0], [1, 0], [2, 0]], 1.0)
        with pytest.raises(ValueError):
            cr(cfg, removed_info((1, 1), []))

    def test_failure_is_reported(self):
        # the nearest former neighbour is the cut vertex: moving it cannot help
        cfg = RobotConfig([[0, 0], [1, 0], [2, 0]], 1.0)
        with pytest.raises(BaselineFailure):
            cr(cfg, removed_info((1, 0.2), [1]))

    def test_generated(self):
        outcomes = []
        for seed in range(30):
            inst = gen_instance(10, seed=seed)
            try:
                sol = cr(inst.config, inst.removed)
            except (BaselineFailure, RelocationError):
                outcomes.append(False)
                continue
            outcomes.append(True)
            assert biconnected_after(inst.config, sol)
            assert sol.minmax == pytest.approx(
                max_displacement(inst.positions, sol.new_positions), abs=1e-9
            )
        assert any(outcomes)


def test_scr_beats_bt_on_average():
    ea_scr, block = [], []
    for seed in range(10):
        inst = gen_instance(16, seed=seed)
        cfg = inst.config
        ea_scr.append(scr(cfg, edge_augmentation(cfg)).minmax)
        block.append(bt(cfg).minmax)
    assert np.mean(ea_scr) < np.mean(block)

