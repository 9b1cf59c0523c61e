"""Tests for the shared problem data types."""

import numpy as np
import pytest

from alpnsocp.model import (
    ConeStructure,
    InnerIterationLimitError,
    NumericalFailureError,
    SocpInstance,
    SolverError,
    SolverParams,
    assemble_stacked,
    block_view,
)


def small_instance():
    return SocpInstance(
        A=np.array([[1.0, 0.0]]),
        b=np.array([1.0]),
        c=np.array([0.0, 1.0]),
        cone=ConeStructure((2,)),
    )


class TestConeStructure:
    def test_dimensions_and_block_count(self):
        cone = ConeStructure((1, 2, 3))
        assert cone.n == 6
        assert cone.p == 3
        assert cone.offsets == (0, 1, 3, 6)

    def test_slices_partition_the_ambient_space(self):
        cone = ConeStructure((2, 1, 4, 1))
        covered = []
        for i, sl in cone.slices():
            assert sl.stop - sl.start == cone.block_dims[i]
            covered.extend(range(sl.start, sl.stop))
        assert covered == list(range(cone.n))

    def test_rejects_empty_and_nonpositive_blocks(self):
        with pytest.raises(ValueError):
            ConeStructure(())
        with pytest.raises(ValueError):
            ConeStructure((2, 0))
        with pytest.raises(ValueError):
            ConeStructure((-1,))


class TestBlockView:
    def test_one_based_indexing(self):
        cone = ConeStructure((1, 2))
        x = np.array([1.0, 2.0, 3.0])
        assert block_view(x, cone, 1).tolist() == [1.0]
        assert block_view(x, cone, 2).tolist() == [2.0, 3.0]

    def test_views_concatenate_back_to_x(self):
        rng = np.random.Generator(np.random.Philox(3))
        cone = ConeStructure((3, 1, 5, 2))
        x = rng.standard_normal(cone.n)
        parts = [block_view(x, cone, i) for i in range(1, cone.p + 1)]
        assert np.array_equal(np.concatenate(parts), x)

    def test_index_bounds(self):
        cone = ConeStructure((1, 2))
        x = np.zeros(3)
        with pytest.raises(IndexError):
            block_view(x, cone, 0)
        with pytest.raises(IndexError):
            block_view(x, cone, 3)

    def test_shape_mismatch(self):
        cone = ConeStructure((2,))
        with pytest.raises(ValueError):
            block_view(np.zeros(3), cone, 1)


class TestSocpInstance:
    def test_arrays_are_frozen_copies(self):
        A = np.array([[1.0, 0.0]])
        inst = SocpInstance(A=A, b=[1.0], c=[0.0, 1.0], cone=ConeStructure((2,)))
        A[0, 0] = 99.0
        assert inst.A[0, 0] == 1.0
        for arr in (inst.A, inst.b, inst.c):
            with pytest.raises(ValueError):
                arr[...] = 0.0

    def test_shape_validation(self):
        cone = ConeStructure((2,))
        with pytest.raises(ValueError):
            SocpInstance(A=np.zeros((1, 3)), b=[0.0], c=[0.0, 0.0], cone=cone)
        with pytest.raises(ValueError):
            SocpInstance(A=np.zeros((1, 2)), b=[0.0, 0.0], c=[0.0, 0.0], cone=cone)
        with pytest.raises(ValueError):
            SocpInstance(A=np.zeros((1, 2)), b=[0.0], c=[0.0], cone=cone)
        with pytest.raises(ValueError):
            SocpInstance(A=np.zeros((0, 2)), b=[], c=[0.0, 0.0], cone=cone)

    def test_rejects_non_finite_entries(self):
        cone = ConeStructure((2,))
        with pytest.raises(ValueError):
            SocpInstance(A=np.array([[np.nan, 0.0]]), b=[0.0], c=[0.0, 0.0], cone=cone)
        with pytest.raises(ValueError):
            SocpInstance(A=np.zeros((1, 2)), b=[np.inf], c=[0.0, 0.0], cone=cone)

    def test_size_properties(self):
        inst = small_instance()
        assert inst.m == 1
        assert inst.n == 2


class TestAssembleStacked:
    def test_objective_row_on_top(self):
        stacked = assemble_stacked(small_instance())
        assert np.array_equal(stacked.mat, np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert stacked.m == 1

    def test_matches_componentwise_products(self):
        rng = np.random.Generator(np.random.Philox(11))
        for _ in range(100):
            m, n = int(rng.integers(1, 5)), int(rng.integers(1, 6))
            inst = SocpInstance(
                A=rng.standard_normal((m, n)),
                b=rng.standard_normal(m),
                c=rng.standard_normal(n),
                cone=ConeStructure((n,)),
            )
            x = rng.standard_normal(n)
            stacked = assemble_stacked(inst)
            expected = np.concatenate(([inst.c @ x], inst.A @ x))
            assert np.allclose(stacked.mat @ x, expected, rtol=0, atol=1e-12)

    def test_matrix_is_read_only(self):
        stacked = assemble_stacked(small_instance())
        with pytest.raises(ValueError):
            stacked.mat[0, 0] = 5.0


class TestSolverParams:
    def test_defaults(self):
        params = SolverParams()
        assert params.tol_feas == 1e-4
        assert params.tol_lin == 1e-8
        assert params.tol_qp == 1e-9
        assert params.max_outer_iterations is None
        assert params.gamma0 is None
        assert params.add_inactive_cuts is False
        assert params.dual_early_exit is True

    def test_validation(self):
        with pytest.raises(ValueError):
            SolverParams(tol_feas=0.0)
        with pytest.raises(ValueError):
            SolverParams(tol_qp=-1e-9)
        with pytest.raises(ValueError):
            SolverParams(gamma_escalation_factor=1.0)
        with pytest.raises(ValueError):
            SolverParams(max_gamma_escalations=-1)
        with pytest.raises(ValueError):
            SolverParams(max_outer_iterations=0)


def test_error_hierarchy():
    assert issubclass(NumericalFailureError, SolverError)
    assert issubclass(InnerIterationLimitError, SolverError)
