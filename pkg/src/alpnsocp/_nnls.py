"""Nonnegative least squares via Lawson-Hanson active sets.

Drop-in replacement for ``scipy.optimize.nnls``.  The bundled scipy's
rewritten routine can stop at points that violate complementarity by
large margins on small systems with dependent columns, while the
working-set certification and vertex escape in :mod:`.projection` and
the subset filter in :mod:`.oracle` rely on multipliers whose support
is exactly stationary.  Here every passive-set subproblem is solved
with a dense least-squares factorization and termination checks the
KKT conditions explicitly, so the returned point satisfies

* ``x >= 0``,
* ``a[:, j] @ (b - a @ x) == 0`` to working precision wherever
  ``x[j] > 0``, and
* ``a[:, j] @ (b - a @ x) <= tol`` elsewhere.
"""

from __future__ import annotations

import numpy as np

from .model import NumericalFailureError

__all__ = ["nnls"]


def nnls(a, b, maxiter: int | None = None) -> tuple[np.ndarray, float]:
    """Minimize ``norm(a @ x - b)`` subject to ``x >= 0``.

    Parameters
    ----------
    a : ndarray
        Matrix of shape ``(m, n)``.
    b : ndarray
        Right-hand side of length ``m``.
    maxiter : int, optional
        Cap on passive-set changes; defaults to ``10 * n + 50``.

    Returns
    -------
    x : ndarray
        The nonnegative minimizer.
    rnorm : float
        Residual norm ``norm(a @ x - b)``.

    Raises
    ------
    NumericalFailureError
        If the active-set iteration fails to settle within ``maxiter``
        steps, which only happens through pathological round-off.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2:
        raise ValueError("a must be a 2-d array")
    m, n = a.shape
    if b.shape != (m,):
        raise ValueError(f"b must have shape ({m},), got {b.shape}")
    x = np.zeros(n)
    if n == 0 or m == 0:
        return x, float(np.linalg.norm(b))
    if maxiter is None:
        maxiter = 10 * n + 50
    # A column whose gradient cannot rise above its round-off level is
    # never brought into the passive set; dependent candidates have a
    # zero gradient in exact arithmetic, which keeps the inner loop
    # from cycling on rank-deficient column sets.
    col_norms = np.linalg.norm(a, axis=0)
    eps = np.finfo(float).eps
    norm_b = float(np.linalg.norm(b))
    passive = np.zeros(n, dtype=bool)
    # Columns whose addition moved nothing (their subproblem coefficient
    # came back nonpositive and they were dropped on the spot) are
    # barred from reselection until the iterate changes; with exact
    # arithmetic this never happens, but at the round-off floor it
    # breaks the add-drop-readd cycle on dependent columns.
    banned = np.zeros(n, dtype=bool)
    resid = b.copy()
    for _ in range(maxiter):
        # Round-off in the gradient scales with the reconstructed
        # ``a @ x`` (= b - resid), not just with ``b``: cancellation in
        # the residual grows when the iterate is much larger than the
        # data, and the zero test has to follow it.
        level = max(1.0, norm_b + float(np.linalg.norm(b - resid)))
        tol = 100.0 * eps * col_norms * level
        w = np.where(passive | banned, -np.inf, a.T @ resid)
        j = int(np.argmax(w))
        if not np.isfinite(w[j]) or w[j] <= tol[j]:
            return x, float(np.linalg.norm(resid))
        passive[j] = True
        x_before = x
        for _ in range(n + 1):
            idx = np.flatnonzero(passive)
            z, *_ = np.linalg.lstsq(a[:, idx], b, rcond=None)
            if np.all(z > 0.0):
                x = np.zeros(n)
                x[idx] = z
                break
            old = x[idx]
            neg = z <= 0.0
            denom = old[neg] - z[neg]
            ratios = np.where(denom > 0.0, old[neg] / np.where(denom > 0.0, denom, 1.0), 0.0)
            alpha = float(np.min(ratios))
            stepped = old + alpha * (z - old)
            # The blocking coordinates reach zero by construction; pin
            # them there explicitly so every pass provably shrinks the
            # passive set even when the update rounds to a tiny
            # positive value instead of zero.
            stepped[np.flatnonzero(neg)[ratios == alpha]] = 0.0
            keep = stepped > 0.0
            x = np.zeros(n)
            x[idx[keep]] = stepped[keep]
            passive = np.zeros(n, dtype=bool)
            passive[idx[keep]] = True
            if not np.any(passive):
                break
        else:  # pragma: no cover - the passive set shrinks every pass
            raise NumericalFailureError("nonnegative least squares step failed to settle")
        if np.array_equal(x, x_before):
            passive[j] = False
            banned[j] = True
        else:
            banned[:] = False
            resid = b - a @ x
    raise NumericalFailureError("nonnegative least squares did not converge")
