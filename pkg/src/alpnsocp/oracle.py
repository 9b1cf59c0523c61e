"""Independent reference computations used by the test suite.

Nothing here is exported through the command line.  The routines trade
speed for transparency: the projection reference enumerates candidate
active sets exhaustively and certifies optimality with a nonnegative
least-squares solve, sharing only that low-level kernel with the
active-set path it is used to validate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from ._nnls import nnls
from .model import ConeStructure, SocpInstance

__all__ = [
    "BruteForceResult",
    "TinyAnalyticCase",
    "brute_force_project",
    "sampled_cut_min",
    "analytic_cases",
    "project_block_onto_soc",
]

_MAX_BRUTE_ROWS = 12


@dataclass(frozen=True)
class BruteForceResult:
    x: np.ndarray
    wbar: np.ndarray
    objective: float
    tight_rows: tuple[int, ...]
    subsets_checked: int


def _eq_ls(amat, gmat, rows, w):
    if not rows:
        x, *_ = np.linalg.lstsq(amat, w, rcond=1e-12)
        return x
    basis = null_space(gmat[list(rows)], rcond=1e-12)
    if basis.shape[1] == 0:
        return np.zeros(amat.shape[1])
    q, *_ = np.linalg.lstsq(amat @ basis, w, rcond=1e-12)
    return basis @ q


def brute_force_project(amat, gmat, w, tol: float = 1e-9) -> BruteForceResult:
    """Projection of ``w`` onto ``{amat @ x : gmat @ x >= 0}`` by enumeration.

    Every subset of constraint rows is treated as a candidate tight
    set; the equality-constrained minimizer is kept when it is feasible
    and, among candidates of minimal objective, when a nonnegative
    multiplier combination reproduces the gradient (checked with a
    dense nonnegative least-squares solve).  Limited to 12 rows, i.e.
    4096 subsets.

    Returns
    -------
    BruteForceResult
        With ``objective = 0.5 * norm(amat @ x - w)**2``.
    """
    amat = np.asarray(amat, dtype=float)
    gmat = np.asarray(gmat, dtype=float)
    w = np.asarray(w, dtype=float)
    nrows = gmat.shape[0]
    if nrows > _MAX_BRUTE_ROWS:
        raise ValueError(f"brute force supports at most {_MAX_BRUTE_ROWS} rows, got {nrows}")
    scale = 1.0 + float(w @ w)
    candidates = []
    checked = 0
    for size in range(nrows + 1):
        for rows in itertools.combinations(range(nrows), size):
            checked += 1
            x = _eq_ls(amat, gmat, rows, w)
            gx = gmat @ x if nrows else np.zeros(0)
            if gx.size and np.min(gx) < -tol * (1.0 + float(np.linalg.norm(x))):
                continue
            r = amat @ x - w
            candidates.append((0.5 * float(r @ r), rows, x, gx))
    # Verify candidates from the smallest objective up: the first one whose
    # gradient is a nonnegative combination of its rows is the optimum.
    candidates.sort(key=lambda item: item[0])
    for obj, rows, x, gx in candidates:
        grad = amat.T @ (amat @ x - w)
        gnorm = float(np.linalg.norm(grad))
        if not rows:
            if gnorm <= tol * scale:
                pass
            else:
                continue
        else:
            _, resid = nnls(gmat[list(rows)].T, grad)
            if resid > tol * scale * 10.0:
                continue
        tight = tuple(
            int(j) for j in range(nrows) if abs(gx[j]) <= tol * (1.0 + float(np.linalg.norm(x)))
        )
        return BruteForceResult(
            x=x, wbar=amat @ x, objective=obj, tight_rows=tight, subsets_checked=checked
        )
    raise RuntimeError("no candidate subset passed the optimality filter")


def sampled_cut_min(xi, samples: int = 1000, seed: int = 0) -> float:
    """Sampled lower estimate of the unit-ball cut value minimum.

    Draws uniform unit-ball vectors, evaluates ``xi[0] + v @ xi[1:]``
    for each, and also evaluates the closed-form candidate
    ``-xi[1:] / norm(xi[1:])`` so the estimate is exact up to roundoff
    whenever the tail is nonzero.
    """
    xi = np.asarray(xi, dtype=float)
    d = xi.size - 1
    if d < 1:
        raise ValueError("blocks of dimension >= 2 only")
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((samples, d))
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0.0] = 1.0
    radii = rng.random(samples) ** (1.0 / d)
    vs = g * (radii / norms)[:, np.newaxis]
    values = xi[0] + vs @ xi[1:]
    best = float(np.min(values)) if samples else np.inf
    tail = np.linalg.norm(xi[1:])
    if tail > 0.0:
        best = min(best, float(xi[0] - tail))
    else:
        best = min(best, float(xi[0]))
    return best


def project_block_onto_soc(xi) -> np.ndarray:
    """Closed-form Euclidean projection of one block onto its cone."""
    xi = np.asarray(xi, dtype=float)
    if xi.size == 1:
        return np.maximum(xi, 0.0)
    t, tail = xi[0], xi[1:]
    nt = float(np.linalg.norm(tail))
    if nt <= t:
        return xi.copy()
    if nt <= -t:
        return np.zeros_like(xi)
    alpha = 0.5 * (t + nt)
    out = np.empty_like(xi)
    out[0] = alpha
    out[1:] = alpha * tail / nt
    return out


@dataclass(frozen=True)
class TinyAnalyticCase:
    """Hand-solved instance with its optimal primal-dual pair."""

    name: str
    instance: SocpInstance
    x_star: np.ndarray
    y_star: np.ndarray
    objective: float


def analytic_cases() -> list[TinyAnalyticCase]:
    """Three tiny instances solved by hand.

    * one 2-block, optimum on the cone boundary;
    * one 3-block, optimum with an irrational objective;
    * a pure linear program over three rays.

    Each stored pair satisfies the KKT system to machine precision.
    """
    root2 = float(np.sqrt(2.0))
    cases = [
        TinyAnalyticCase(
            name="boundary-2d",
            instance=SocpInstance(
                A=np.array([[1.0, 0.0]]),
                b=np.array([1.0]),
                c=np.array([0.0, 1.0]),
                cone=ConeStructure((2,)),
            ),
            x_star=np.array([1.0, 1.0]),
            y_star=np.array([1.0]),
            objective=1.0,
        ),
        TinyAnalyticCase(
            name="boundary-3d",
            instance=SocpInstance(
                A=np.array([[1.0, 0.0, 0.0]]),
                b=np.array([1.0]),
                c=np.array([0.0, 1.0, 1.0]),
                cone=ConeStructure((3,)),
            ),
            x_star=np.array([1.0, 1.0 / root2, 1.0 / root2]),
            y_star=np.array([root2]),
            objective=root2,
        ),
        TinyAnalyticCase(
            name="three-rays-lp",
            instance=SocpInstance(
                A=np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]]),
                b=np.array([2.0, 1.0]),
                c=np.array([1.0, 1.0, 0.0]),
                cone=ConeStructure((1, 1, 1)),
            ),
            x_star=np.array([2.0, 0.0, 1.0]),
            y_star=np.array([1.0, 0.0]),
            objective=2.0,
        ),
    ]
    return cases
