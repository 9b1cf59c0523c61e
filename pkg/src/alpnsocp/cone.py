"""Second-order cone geometry and finite cut descriptions.

A block ``z`` of dimension ``l >= 2`` lies in the cone when
``z[0] >= norm(z[1:])``.  The infinitely many linear inequalities
``z[0] + v @ z[1:] >= 0`` over unit-ball vectors ``v`` describe the same
set; a finite selection of such ``v`` per block describes a polyhedral
outer approximation that the solver refines adaptively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ConeStructure

__all__ = [
    "CutVector",
    "CutSet",
    "soc_residual",
    "cut_value",
    "most_violated_cut",
    "initial_cuts",
    "in_polyhedral_cone",
]


def soc_residual(xi) -> float:
    """Cone violation of one block: ``norm(xi[1:]) - xi[0]``.

    Nonpositive inside the cone, zero on the boundary, positive
    outside.  For a one-dimensional block this is ``-xi[0]``.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.size < 1:
        raise ValueError("block must be nonempty")
    return float(np.linalg.norm(xi[1:]) - xi[0])


@dataclass(frozen=True)
class CutVector:
    """One linear inequality ``xi[0] + v @ xi[1:] >= 0`` for a block.

    ``block`` is the zero-based index of the block the cut refines and
    ``v`` lies in the closed unit ball of dimension ``block_dim - 1``.
    """

    block: int
    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        if v.ndim != 1:
            raise ValueError("cut vector must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise ValueError("cut vector contains non-finite entries")
        nv = np.linalg.norm(v)
        if nv > 1 + 1e-12:
            raise ValueError(f"cut vector norm {nv} exceeds 1")
        v.flags.writeable = False
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "block", int(self.block))


def cut_value(v, xi) -> float:
    """Evaluate the cut inequality ``xi[0] + v @ xi[1:]``.

    ``v`` may be a :class:`CutVector` or a bare array.  Nonnegative for
    every ``xi`` in the cone and every unit-ball ``v``.
    """
    if isinstance(v, CutVector):
        v = v.v
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if v.size != xi.size - 1:
        raise ValueError(f"cut of size {v.size} does not match block of size {xi.size}")
    return float(xi[0] + v @ xi[1:])


def most_violated_cut(xi, block: int = 0) -> CutVector:
    """Unit-ball minimizer of the cut value at ``xi``.

    The minimum of ``xi[0] + v @ xi[1:]`` over the unit ball is attained
    at ``v = -xi[1:] / norm(xi[1:])`` and equals the negated cone
    residual.  For ``xi[1:] == 0`` every ``v`` is a minimizer and the
    zero vector is returned.

    Parameters
    ----------
    xi : ndarray
        Block vector of dimension >= 2.
    block : int, optional
        Zero-based block index stored on the returned cut.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.size < 2:
        raise ValueError("cuts are only defined for blocks of dimension >= 2")
    tail = xi[1:]
    nt = np.linalg.norm(tail)
    if nt == 0.0:
        return CutVector(block, np.zeros(xi.size - 1))
    return CutVector(block, -tail / nt)


@dataclass(frozen=True)
class CutSet:
    """Finite cut collection describing a polyhedral outer cone.

    Rows of the induced constraint matrix are ordered so that indices
    stay valid as cuts are appended: first one nonnegativity row per
    one-dimensional block (in block order), then the stored cuts in
    insertion order.  ``with_cut`` returns a new set, so values can be
    shared freely once built.
    """

    cone: ConeStructure
    entries: tuple[CutVector, ...] = ()
    _ray_blocks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rays = tuple(i for i, d in enumerate(self.cone.block_dims) if d == 1)
        object.__setattr__(self, "_ray_blocks", rays)
        for cut in self.entries:
            self._check(cut)

    def _check(self, cut: CutVector):
        if not 0 <= cut.block < self.cone.p:
            raise IndexError(f"cut block {cut.block} outside 0..{self.cone.p - 1}")
        d = self.cone.block_dims[cut.block]
        if d < 2:
            raise ValueError("one-dimensional blocks take no cuts")
        if cut.v.size != d - 1:
            raise ValueError(
                f"cut of size {cut.v.size} does not fit block of dimension {d}"
            )

    def cuts_for_block(self, i: int) -> list[np.ndarray]:
        """Stored cut vectors of zero-based block ``i``, insertion order."""
        return [e.v for e in self.entries if e.block == i]

    def hyperplanes_per_block(self) -> tuple[int, ...]:
        """Number of inequality rows describing each block (1 for rays)."""
        counts = [0] * self.cone.p
        for i in self._ray_blocks:
            counts[i] = 1
        for e in self.entries:
            counts[e.block] += 1
        return tuple(counts)

    def total_hyperplanes(self) -> int:
        return len(self._ray_blocks) + len(self.entries)

    def with_cut(self, cut: CutVector, dedup_tol: float = 1e-10):
        """Return ``(new_set, added)``, skipping near-duplicate cuts.

        A cut is a duplicate when an existing cut of the same block is
        within ``dedup_tol`` in the Euclidean norm.
        """
        self._check(cut)
        for e in self.entries:
            if e.block == cut.block and np.linalg.norm(e.v - cut.v) <= dedup_tol:
                return self, False
        return CutSet(self.cone, self.entries + (cut,)), True

    def constraint_matrix(self) -> np.ndarray:
        """Dense ``(total_hyperplanes, n)`` matrix ``G`` with ``G @ x >= 0``."""
        n = self.cone.n
        rows = np.zeros((self.total_hyperplanes(), n))
        r = 0
        for i in self._ray_blocks:
            rows[r, self.cone.offsets[i]] = 1.0
            r += 1
        for e in self.entries:
            start = self.cone.offsets[e.block]
            d = self.cone.block_dims[e.block]
            rows[r, start] = 1.0
            rows[r, start + 1 : start + d] = e.v
            r += 1
        return rows


def initial_cuts(cone: ConeStructure) -> CutSet:
    """Signed coordinate cuts ``+-e_j`` for every block of dimension >= 2.

    This start describes one- and two-dimensional blocks exactly, so
    instances built only from such blocks never need refinement.
    """
    entries = []
    for i, d in enumerate(cone.block_dims):
        for j in range(d - 1):
            e = np.zeros(d - 1)
            e[j] = 1.0
            entries.append(CutVector(i, e))
            entries.append(CutVector(i, -e))
    return CutSet(cone, tuple(entries))


def in_polyhedral_cone(x, cuts: CutSet, tol: float = 0.0) -> bool:
    """Whether ``x`` satisfies every stored inequality within ``tol``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (cuts.cone.n,):
        raise ValueError(f"x must have shape ({cuts.cone.n},), got {x.shape}")
    gmat = cuts.constraint_matrix()
    if gmat.shape[0] == 0:
        return True
    return bool(np.min(gmat @ x) >= -tol)
