"""Tests for the random instance generator."""

import numpy as np
import pytest

from alpnsocp.cone import soc_residual
from alpnsocp.gen import GeneratedInstance, generate, interior_unit_point
from alpnsocp.model import ConeStructure, block_view


class TestInteriorUnitPoint:
    def test_blockwise_first_unit_vector(self):
        cone = ConeStructure((3, 1, 2))
        x = interior_unit_point(cone)
        assert x.tolist() == [1.0, 0.0, 0.0, 1.0, 1.0, 0.0]

    def test_strictly_interior_in_every_block(self):
        cone = ConeStructure((1, 2, 5))
        x = interior_unit_point(cone)
        for i in range(1, cone.p + 1):
            assert soc_residual(block_view(x, cone, i)) == -1.0


class TestGenerate:
    def test_construction_identities_are_exact(self):
        for seed in range(1, 11):
            g = generate(4, (3, 1, 2, 4), seed)
            assert np.array_equal(g.instance.b, g.instance.A @ g.x_tilde)
            lhs = g.instance.A.T @ np.ones(g.instance.m) - g.s_tilde
            assert np.array_equal(g.instance.c, lhs)

    def test_primal_point_is_strictly_interior(self):
        g = generate(6, (5, 1, 3), 2)
        cone = g.instance.cone
        for i in range(1, cone.p + 1):
            assert soc_residual(block_view(g.x_tilde, cone, i)) == -1.0

    def test_all_ones_dual_is_strictly_interior(self):
        g = generate(6, (5, 1, 3), 2)
        eta = g.instance.A.T @ np.ones(g.instance.m) - g.instance.c
        assert np.array_equal(eta, g.s_tilde)
        cone = g.instance.cone
        for i in range(1, cone.p + 1):
            assert soc_residual(block_view(eta, cone, i)) == -1.0

    def test_same_seed_reproduces_bit_exactly(self):
        first = generate(5, (2, 2, 1), 42)
        second = generate(5, (2, 2, 1), 42)
        assert np.array_equal(first.instance.A, second.instance.A)
        assert np.array_equal(first.instance.b, second.instance.b)
        assert np.array_equal(first.instance.c, second.instance.c)

    def test_different_seeds_differ(self):
        a = generate(3, (4,), 1).instance.A
        b = generate(3, (4,), 2).instance.A
        assert not np.array_equal(a, b)

    def test_counter_based_stream_is_frozen(self):
        # Pinned values guard against silent generator changes; the
        # Philox stream is identical across platforms.
        g = generate(2, (2, 1), 1)
        expected = np.array(
            [
                [0.561455211185646, -0.9619375618162148, 0.025380113609183755],
                [-0.49255514069541123, 1.210202290102808, -0.22245032550725968],
            ]
        )
        assert np.array_equal(g.instance.A, expected)

    def test_shapes_and_seed_recorded(self):
        g = generate(7, (3, 3, 1), 9)
        assert isinstance(g, GeneratedInstance)
        assert g.instance.m == 7
        assert g.instance.n == 7
        assert g.instance.cone.block_dims == (3, 3, 1)
        assert g.seed == 9

    def test_arrays_frozen(self):
        g = generate(2, (2,), 0)
        with pytest.raises(ValueError):
            g.x_tilde[0] = 5.0
        with pytest.raises(ValueError):
            g.s_tilde[0] = 5.0

    def test_input_validation(self):
        with pytest.raises(ValueError):
            generate(0, (2,), 1)
        with pytest.raises(ValueError):
            generate(3, (2,), -1)
        with pytest.raises(ValueError):
            generate(3, (), 1)
        with pytest.raises(ValueError):
            generate(3, (0,), 1)
