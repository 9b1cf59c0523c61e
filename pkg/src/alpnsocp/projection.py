"""Projection onto the image of a polyhedral cone.

Given the stacked matrix ``Abar`` and a cut set describing the
polyhedral cone ``{x : G @ x >= 0}``, :func:`project` computes the
Euclidean projection of a point ``w`` onto ``{Abar @ x : G @ x >= 0}``
by solving the least-squares program

    minimize    0.5 * norm(Abar @ x - w)**2
    subject to  G @ x >= 0

with a primal active-set method.  The working set is a list of rows
held at equality; each step either moves to the equality-constrained
minimizer or stops at the first blocking row on the way there.  Ties in
the blocking step and the multiplier drop follow the lowest row index,
which protects against cycling on degenerate data.  The method starts
from the always-feasible origin, optionally seeded with a caller
supplied working set, which makes consecutive projections of nearby
points cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from ._nnls import nnls
from .cone import CutSet
from .model import (
    InnerIterationLimitError,
    NumericalFailureError,
    SolverParams,
    StackedMatrix,
)

__all__ = ["ProjectionResult", "solve_eq_ls", "project", "INNER_BUDGET_PER_ROW"]

# Inner iteration budget: this many active-set steps per constraint row.
INNER_BUDGET_PER_ROW = 50

# Singular values below this fraction of the largest are treated as zero.
RANK_RCOND = 1e-12

# After this many consecutive steps without objective progress the
# stationary point is treated as a degenerate vertex and escaped via a
# nonnegative least-squares solve over every tight row.
_WEDGE_AFTER = 3


@dataclass
class ProjectionResult:
    """Outcome of one projection.

    Attributes
    ----------
    x : ndarray
        A minimizer in the polyhedral cone.  When ``abar`` is wide the
        minimizer is not unique; any returned preimage satisfies the
        constraints and maps to the unique ``wbar``.
    wbar : ndarray
        Projected point ``Abar @ x``.
    multipliers : ndarray
        One nonnegative multiplier per constraint row (zero off the
        working set).
    active : tuple of int
        Final working set, in insertion order.
    inner_iterations : int
        Number of active-set steps taken.
    """

    x: np.ndarray
    wbar: np.ndarray
    multipliers: np.ndarray
    active: tuple[int, ...]
    inner_iterations: int


def solve_eq_ls(abar, gmat, rows, w, rcond: float = RANK_RCOND, anchor=None):
    """Solve ``min norm(abar @ x - w)`` with the given rows held tight.

    Parameters
    ----------
    abar : ndarray
        Stacked ``(1 + m) x n`` matrix.
    gmat : ndarray
        Constraint matrix whose ``rows`` are forced to equality.
    rows : sequence of int
        Row indices of ``gmat`` held at zero.
    w : ndarray
        Target point.
    rcond : float, optional
        Relative cutoff for rank decisions; singular directions below
        ``rcond`` times the largest singular value are truncated.
    anchor : ndarray, optional
        When the minimizer is not unique (``abar`` is wide, so whole
        subspaces map to the same residual), return the minimizer
        nearest this point instead of the minimum-norm one.  Keeping
        the anchor at the current iterate stops the solution from
        sliding around inside the null space of ``abar`` whenever the
        working set changes.

    Returns
    -------
    ndarray
        A minimizer; minimum-norm when ``anchor`` is omitted, nearest
        to ``anchor`` otherwise.
    """
    rows = list(rows)
    try:
        if not rows:
            basis = None
            reduced = abar
        else:
            basis = null_space(gmat[rows], rcond=rcond)
            if basis.shape[1] == 0:
                return np.zeros(abar.shape[1])
            reduced = abar @ basis
        q, *_ = np.linalg.lstsq(reduced, w, rcond=rcond)
        if anchor is not None:
            slack = null_space(reduced, rcond=rcond)
            if slack.shape[1]:
                x0 = basis @ q if basis is not None else q
                span = basis @ slack if basis is not None else slack
                shift, *_ = np.linalg.lstsq(span, anchor - x0, rcond=rcond)
                q = q + slack @ shift
        return basis @ q if basis is not None else q
    except np.linalg.LinAlgError as exc:  # pragma: no cover - SVD breakdown
        raise NumericalFailureError(f"equality least-squares failed: {exc}") from exc


def _objective(abar, x, w) -> float:
    r = abar @ x - w
    return 0.5 * float(r @ r)


def project(
    abar: StackedMatrix,
    cuts: CutSet,
    w,
    warm=None,
    params: SolverParams | None = None,
) -> ProjectionResult:
    """Project ``w`` onto the image of the cut cone under ``abar``.

    Parameters
    ----------
    abar : StackedMatrix
        Stacked objective/equality matrix.
    cuts : CutSet
        Polyhedral description of the outer cone.
    w : ndarray
        Point of length ``1 + m`` to project.
    warm : sequence of int, optional
        Working set to seed the active-set method with, e.g. the
        ``active`` tuple of a previous result on the same (or an
        extended) cut set.
    params : SolverParams, optional
        Supplies ``tol_qp``; defaults are used when omitted.

    Returns
    -------
    ProjectionResult

    Raises
    ------
    InnerIterationLimitError
        If the step budget ``INNER_BUDGET_PER_ROW * rows`` is exhausted.
    NumericalFailureError
        If a factorization breaks down.
    """
    params = params or SolverParams()
    amat = abar.mat
    n = amat.shape[1]
    w = np.asarray(w, dtype=float)
    if w.shape != (amat.shape[0],):
        raise ValueError(f"w must have shape ({amat.shape[0]},), got {w.shape}")
    gmat = cuts.constraint_matrix()
    nrows = gmat.shape[0]
    budget = INNER_BUDGET_PER_ROW * max(nrows, 1)

    working: list[int] = []
    if warm is not None:
        seen = set()
        for j in warm:
            j = int(j)
            if 0 <= j < nrows and j not in seen:
                working.append(j)
                seen.add(j)

    x = np.zeros(n)
    fx = _objective(amat, x, w)
    inner = 0
    no_progress = 0
    while True:
        inner += 1
        if inner > budget:
            raise InnerIterationLimitError(
                f"projection exceeded {budget} active-set steps on {nrows} rows"
            )
        xhat = solve_eq_ls(amat, gmat, working, w, anchor=x)
        ghat = gmat @ xhat if nrows else np.zeros(0)
        feas_tol = params.tol_qp * (1.0 + float(np.linalg.norm(xhat)))
        free = np.ones(nrows, dtype=bool)
        free[working] = False
        violated = free & (ghat < -feas_tol)
        if not np.any(violated):
            # The equality-constrained minimizer is feasible: accept it
            # and test first-order optimality via the multipliers.
            x = xhat
            fx_new = _objective(amat, x, w)
            assert fx_new <= fx + params.tol_qp * (1.0 + fx)
            no_progress = 0 if fx - fx_new > 1e-15 * (1.0 + fx) else no_progress + 1
            fx = fx_new
            grad = amat.T @ (amat @ x - w)
            if not working:
                lam = np.zeros(0)
            else:
                lam, *_ = np.linalg.lstsq(gmat[working].T, grad, rcond=RANK_RCOND)
            mult_tol = params.tol_qp * (1.0 + float(np.linalg.norm(grad)))
            if lam.size and np.min(lam) < -mult_tol:
                # The minimum-norm multipliers are sign-ambiguous when
                # working rows are nearly dependent, which can cycle the
                # same rows in and out indefinitely.  A nonnegative
                # combination reproducing the gradient settles it: if
                # one exists the point is optimal after all.
                lam_nn, nn_resid = nnls(gmat[working].T, grad)
                if nn_resid <= mult_tol:
                    lam = lam_nn
            if lam.size == 0 or np.min(lam) >= -mult_tol:
                multipliers = np.zeros(nrows)
                if working:
                    multipliers[working] = np.maximum(lam, 0.0)
                return ProjectionResult(
                    x=x,
                    wbar=amat @ x,
                    multipliers=multipliers,
                    active=tuple(working),
                    inner_iterations=inner,
                )
            if no_progress >= _WEDGE_AFTER:
                # Degenerate vertex: more rows are tight than the
                # working set holds, so single-row exchanges cycle
                # without progress.  Project the gradient onto the
                # span of every tight row with nonnegative weights;
                # a small residual certifies optimality and otherwise
                # the residual vector is a strictly feasible descent
                # direction (each tight row moves nonnegatively along
                # it while the objective decreases).
                tight = np.flatnonzero(ghat <= feas_tol)
                lam_t, resid_t = nnls(gmat[tight].T, grad)
                if resid_t <= mult_tol:
                    multipliers = np.zeros(nrows)
                    multipliers[tight] = lam_t
                    support = tuple(
                        int(tight[i]) for i in range(lam_t.size) if lam_t[i] > 0.0
                    )
                    return ProjectionResult(
                        x=x,
                        wbar=amat @ x,
                        multipliers=multipliers,
                        active=support,
                        inner_iterations=inner,
                    )
                d = gmat[tight].T @ lam_t - grad
                step = float(d @ d) / float((amat @ d) @ (amat @ d))
                gd = gmat @ d
                outside = np.ones(nrows, dtype=bool)
                outside[tight] = False
                blocker = -1
                for j in np.flatnonzero(outside & (gd < 0.0)):
                    bound = ghat[j] / -gd[j]
                    if bound < step:
                        step = bound
                        blocker = int(j)
                x = x + step * d
                fx_new = _objective(amat, x, w)
                assert fx_new <= fx + params.tol_qp * (1.0 + fx)
                no_progress = 0 if fx - fx_new > 1e-15 * (1.0 + fx) else no_progress + 1
                fx = fx_new
                working = [
                    int(tight[i]) for i in range(lam_t.size) if lam_t[i] > 0.0
                ]
                if blocker >= 0:
                    working.append(blocker)
                continue
            # Release the constraint with the most negative multiplier;
            # ties go to the lowest row index.
            worst = np.min(lam)
            pos = min(i for i in range(lam.size) if lam[i] == worst)
            del working[pos]
            continue
        # Step from x toward xhat until the first blocking row.
        gx = gmat @ x
        alpha = 1.0
        blocker = -1
        for j in np.flatnonzero(violated):
            drop = gx[j] - ghat[j]
            if drop <= 0.0:
                continue
            aj = max(gx[j], 0.0) / drop
            if aj < alpha:
                alpha = aj
                blocker = int(j)
        if blocker < 0:
            # Every violated row was already tight in exact arithmetic;
            # accept the least-squares point and let the next sweep add
            # rows one at a time.
            blocker = int(np.flatnonzero(violated)[0])
            alpha = 0.0
        x = x + alpha * (xhat - x)
        fx_new = _objective(amat, x, w)
        assert fx_new <= fx + params.tol_qp * (1.0 + fx)
        no_progress = 0 if fx - fx_new > 1e-15 * (1.0 + fx) else no_progress + 1
        fx = fx_new
        working.append(blocker)
