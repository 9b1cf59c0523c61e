"""Problem data types shared by the solver modules.

An instance is the conic program

    maximize    c @ x
    subject to  A @ x == b,   x in K,

where ``K`` is a product of second-order cones described by
:class:`ConeStructure`.  The solver works with the stacked matrix whose
first row is the objective ``c`` and whose remaining rows are ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConeStructure",
    "SocpInstance",
    "StackedMatrix",
    "SolverParams",
    "SolverError",
    "NumericalFailureError",
    "InnerIterationLimitError",
    "assemble_stacked",
    "block_view",
]


class SolverError(Exception):
    """Base class for solver failures."""


class NumericalFailureError(SolverError):
    """A linear-algebra step lost too much accuracy to continue."""


class InnerIterationLimitError(SolverError):
    """The active-set projection exceeded its iteration budget."""


def _readonly_vector(a, name, size=None):
    arr = np.array(a, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if size is not None and arr.size != size:
        raise ValueError(f"{name} must have length {size}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ConeStructure:
    """Block layout of a product of second-order cones.

    ``block_dims[i]`` is the dimension of block ``i``.  A block of
    dimension 1 is the nonnegative ray; a block of dimension ``l >= 2``
    is the cone of vectors whose first entry dominates the Euclidean
    norm of the rest.
    """

    block_dims: tuple[int, ...]
    offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if len(dims) == 0:
            raise ValueError("a cone must contain at least one block")
        if any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "block_dims", dims)
        starts = np.concatenate(([0], np.cumsum(dims))).tolist()
        object.__setattr__(self, "offsets", tuple(starts))

    @property
    def n(self) -> int:
        """Total ambient dimension."""
        return self.offsets[-1]

    @property
    def p(self) -> int:
        """Number of blocks."""
        return len(self.block_dims)

    def slices(self):
        """Yield ``(index, slice)`` pairs, one per block, zero-based."""
        for i, d in enumerate(self.block_dims):
            start = self.offsets[i]
            yield i, slice(start, start + d)


def block_view(x, cone: ConeStructure, i: int):
    """Return the entries of ``x`` belonging to block ``i`` (one-based).

    Parameters
    ----------
    x : ndarray
        Vector of length ``cone.n``.
    cone : ConeStructure
        Block layout.
    i : int
        One-based block index in ``1..cone.p``.

    Returns
    -------
    ndarray
        View of length ``cone.block_dims[i - 1]``.
    """
    if not 1 <= i <= cone.p:
        raise IndexError(f"block index {i} outside 1..{cone.p}")
    x = np.asarray(x)
    if x.shape != (cone.n,):
        raise ValueError(f"x must have shape ({cone.n},), got {x.shape}")
    start = cone.offsets[i - 1]
    return x[start : start + cone.block_dims[i - 1]]


@dataclass(frozen=True)
class SocpInstance:
    """Immutable problem data ``(A, b, c, cone)``.

    Arrays are copied and frozen on construction, so instances can be
    shared across threads.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cone: ConeStructure

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2:
            raise ValueError(f"A must be a matrix, got shape {A.shape}")
        if A.shape[0] < 1:
            raise ValueError("A must have at least one row")
        if A.shape[1] != self.cone.n:
            raise ValueError(
                f"A has {A.shape[1]} columns but the cone has dimension {self.cone.n}"
            )
        if not np.all(np.isfinite(A)):
            raise ValueError("A contains non-finite entries")
        A.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", _readonly_vector(self.b, "b", A.shape[0]))
        object.__setattr__(self, "c", _readonly_vector(self.c, "c", self.cone.n))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class StackedMatrix:
    """Objective row stacked on top of the equality rows."""

    mat: np.ndarray

    @property
    def m(self) -> int:
        """Number of equality rows (excludes the objective row)."""
        return self.mat.shape[0] - 1


def assemble_stacked(instance: SocpInstance) -> StackedMatrix:
    """Stack ``c`` above ``A`` into the ``(1 + m) x n`` solver matrix."""
    mat = np.vstack([instance.c[np.newaxis, :], instance.A])
    mat.flags.writeable = False
    return StackedMatrix(mat)


@dataclass(frozen=True)
class SolverParams:
    """Solver configuration.

    Attributes
    ----------
    tol_feas : float
        Termination tolerance on the primal residual (equality gap and
        cone violation).
    tol_lin : float
        Tolerance for linear-algebra consistency checks and division
        guards.
    tol_qp : float
        First-order tolerance of the inner projection subproblem.
    dedup_tol : float
        Two cuts in the same block closer than this are considered
        duplicates and not stored twice.
    max_outer_iterations : int or None
        Outer iteration budget; ``None`` means ``10 * n + 1000``.
    gamma0 : float or None
        Starting objective bound for the relaxation; ``None`` selects a
        data-dependent upper estimate.
    gamma_escalation_factor : float
        Multiplier applied to the bound when it turns out not to sit
        above the relaxation optimum.
    max_gamma_escalations : int
        Escalation budget before reporting the relaxation as unbounded.
    add_inactive_cuts : bool
        Also record refinement cuts for blocks that are currently
        feasible (the default records only violated blocks).
    dual_early_exit : bool
        Stop as soon as the recovered dual pair passes the scaled KKT
        test, possibly before the primal residual test.
    keep_trace : bool
        Record the full iterate trajectory on the report (for tests and
        diagnostics; not serialized).
    """

    tol_feas: float = 1e-4
    tol_lin: float = 1e-8
    tol_qp: float = 1e-9
    dedup_tol: float = 1e-10
    max_outer_iterations: int | None = None
    gamma0: float | None = None
    gamma_escalation_factor: float = 10.0
    max_gamma_escalations: int = 20
    add_inactive_cuts: bool = False
    dual_early_exit: bool = True
    keep_trace: bool = False

    def __post_init__(self):
        for name in ("tol_feas", "tol_lin", "tol_qp", "dedup_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma_escalation_factor <= 1:
            raise ValueError("gamma_escalation_factor must exceed 1")
        if self.max_gamma_escalations < 0:
            raise ValueError("max_gamma_escalations must be nonnegative")
        if self.max_outer_iterations is not None and self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1 when given")
