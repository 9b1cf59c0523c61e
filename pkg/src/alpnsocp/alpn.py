"""Outer solver loop.

Each iteration projects the point ``(gamma, b)`` onto the image of the
current polyhedral outer cone.  A feasible projection is optimal; an
infeasible one yields a supporting hyperplane whose intersection with
the vertical line through ``b`` gives the next, strictly smaller,
objective bound, and the most violated blockwise inequality at the
projection is added to the cone description.  Because every outer cone
contains the true cone, the bound sequence stays above the optimal
value while it decreases, and the equality residual of the projections
is driven to zero.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .cone import CutSet, initial_cuts, most_violated_cut, soc_residual
from .dual import (
    DualCertificate,
    RecoveryStatus,
    ResidualBundle,
    certify,
    kkt_residuals,
    recover_dual,
    scaled_kkt_residual,
)
from .model import (
    SocpInstance,
    SolverError,
    SolverParams,
    assemble_stacked,
    block_view,
)
from .projection import project

__all__ = [
    "SolveStatus",
    "IterationRecord",
    "IterateState",
    "SolveReport",
    "initial_gamma",
    "gamma_update",
    "check_feasibility",
    "solve",
]


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    RELAXATION_UNBOUNDED = "relaxation_unbounded"
    DUAL_UNBOUNDED = "dual_unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class IterationRecord:
    """One row of the per-iteration log."""

    k: int
    gamma: float
    zeta: float
    b_dist: float
    cuts_total: int
    qp_inner_iters: int


@dataclass
class IterateState:
    """Full state of one outer iteration (kept only on request)."""

    k: int
    gamma: float
    w: np.ndarray
    wbar: np.ndarray
    x: np.ndarray
    active: tuple[int, ...]


@dataclass
class SolveReport:
    """Everything a solve produced.

    ``residuals`` always refers to the reported ``x`` (with the
    certificate's dual point when one was recovered, the zero dual
    otherwise).  ``log`` holds one record per completed outer
    iteration; ``trace`` mirrors it with full vectors when
    ``SolverParams.keep_trace`` is set and is never serialized.
    """

    status: SolveStatus
    x: np.ndarray
    objective: float
    iterations: int
    residuals: ResidualBundle
    certificate: DualCertificate | None
    log: list[IterationRecord]
    gamma0: float
    initial_hyperplanes: int
    final_hyperplanes_per_block: tuple[int, ...]
    wall_time_seconds: float
    escalations: int = 0
    message: str = ""
    trace: list[IterateState] | None = None

    @property
    def final_hyperplanes(self) -> int:
        return int(sum(self.final_hyperplanes_per_block))


def initial_gamma(instance: SocpInstance, params: SolverParams) -> float:
    """Data-driven upper estimate of the optimal value.

    Returns ``params.gamma0`` when set.  Otherwise combines the
    objective norm with a bound on the reachable solution size,
    ``1 + norm(c) * rho`` with ``rho = 10 * (1 + norm(b)) / sigma``,
    where ``sigma`` is the smallest singular value of ``A`` above the
    rank cutoff.  The factor 10 buys slack for solutions larger than
    the minimum-norm one; an estimate that still falls short is caught
    at run time and escalated.
    """
    if params.gamma0 is not None:
        return float(params.gamma0)
    normc = float(np.linalg.norm(instance.c))
    if normc == 0.0:
        return 1.0
    svals = np.linalg.svd(instance.A, compute_uv=False)
    cutoff = 1e-12 * (svals[0] if svals.size else 0.0)
    positive = svals[svals > cutoff]
    sigma = float(positive[-1]) if positive.size else 1.0
    rho = 10.0 * (1.0 + float(np.linalg.norm(instance.b))) / sigma
    return 1.0 + normc * rho


def gamma_update(gamma: float, zeta: float, b_dist_sq: float) -> float:
    """Intersection of the supporting hyperplane with the target line.

    Computes ``zeta - b_dist_sq / (gamma - zeta)``, the first coordinate
    of the point where the hyperplane through the projection with
    normal ``w - wbar`` crosses the vertical line through ``b``.
    Requires ``gamma > zeta``; the caller branches away before the gap
    degenerates.
    """
    if not gamma > zeta:
        raise ValueError(f"gamma update needs gamma > zeta, got {gamma} <= {zeta}")
    return zeta - b_dist_sq / (gamma - zeta)


def check_feasibility(x, instance: SocpInstance, tol: float):
    """Primal residual test.

    Returns ``(feasible, residual)`` where the residual is the larger
    of the equality gap ``norm(A @ x - b)`` and the worst blockwise
    cone violation, clamped at zero.
    """
    x = np.asarray(x, dtype=float)
    eq = float(np.linalg.norm(instance.A @ x - instance.b))
    worst = 0.0
    for i in range(1, instance.cone.p + 1):
        worst = max(worst, soc_residual(block_view(x, instance.cone, i)))
    residual = max(eq, worst, 0.0)
    return residual <= tol, residual


# Consecutive near-zero bound decreases tolerated before giving up.
_STALL_LIMIT = 10

# Consecutive held (division-guarded) bound iterations tolerated before
# concluding the bound is pinned under the outer cone and escalating.
_HOLD_LIMIT = 25

# The bound update divides by the bound gap; below this relative size
# the gap is indistinguishable from projection round-off and the
# quotient would amplify noise, so the bound is held instead.
_GAP_GUARD = 1e-12


def _final_residuals(x, instance, certificate):
    y = certificate.y if certificate is not None else np.zeros(instance.m)
    return kkt_residuals(x, y, instance)


def solve(instance: SocpInstance, params: SolverParams | None = None) -> SolveReport:
    """Run the outer loop on an instance.

    Parameters
    ----------
    instance : SocpInstance
        Problem data.
    params : SolverParams, optional
        Tolerances, iteration budget and feature flags.

    Returns
    -------
    SolveReport
        With ``status`` OPTIMAL the reported point passes the primal
        residual test at ``tol_feas`` (or the scaled KKT test when the
        dual early exit fired) and carries a certificate whenever dual
        recovery succeeded.
    """
    params = params or SolverParams()
    t0 = time.perf_counter()
    abar = assemble_stacked(instance)
    cuts = initial_cuts(instance.cone)
    initial_hp = cuts.total_hyperplanes()
    b = instance.b
    n = instance.n
    max_outer = params.max_outer_iterations
    if max_outer is None:
        max_outer = 10 * n + 1000

    gamma = initial_gamma(instance, params)
    gamma0 = gamma
    log: list[IterationRecord] = []
    trace: list[IterateState] | None = [] if params.keep_trace else None
    warm: tuple[int, ...] | None = None
    escalations = 0
    stalled = 0
    held = 0
    x_last = np.zeros(n)
    message = ""
    # Dual candidates recovered while the bound gap was well scaled.
    # The last one has the tightest dual objective but divides by the
    # smallest gap, which amplifies projection round-off in the cone
    # membership of eta; earlier candidates trade the opposite way, so
    # all of them are kept and the winner is picked at the end.
    y_candidates: list[np.ndarray] = []

    def finish(final_status, final_message=""):
        candidates = list(y_candidates)
        rec_status, y = recover_dual(x_last, gamma, instance, tol_lin=params.tol_lin)
        if rec_status is RecoveryStatus.OK:
            candidates.append(y)
        best = None
        objective = float(instance.c @ x_last)
        for y in candidates:
            bundle = kkt_residuals(x_last, y, instance)
            eta = instance.A.T @ y - instance.c
            score = scaled_kkt_residual(bundle, x_last, eta, instance)
            # Dual feasibility comes first: a candidate whose eta
            # sits in the cone and whose duality gap is immaterial
            # beats any candidate that fails either test.
            feasible = (
                bundle.dual_cone <= 1e-6
                and bundle.duality_gap <= 1e-3 * (1.0 + abs(objective))
            )
            key = (not feasible, score)
            if best is None or key < best[0]:
                best = (key, DualCertificate(y=y, eta=eta, residuals=bundle))
        cert = best[1] if best is not None else None
        return SolveReport(
            status=final_status,
            x=x_last,
            objective=float(instance.c @ x_last),
            iterations=len(log),
            residuals=_final_residuals(x_last, instance, cert),
            certificate=cert,
            log=log,
            gamma0=gamma0,
            initial_hyperplanes=initial_hp,
            final_hyperplanes_per_block=cuts.hyperplanes_per_block(),
            wall_time_seconds=time.perf_counter() - t0,
            escalations=escalations,
            message=final_message,
            trace=trace,
        )

    k = 0
    while k < max_outer:
        w = np.concatenate(([gamma], b))
        try:
            proj = project(abar, cuts, w, warm=warm, params=params)
        except SolverError as exc:
            message = str(exc)
            return finish(SolveStatus.NUMERICAL_FAILURE, message)
        x = proj.x
        zeta = float(proj.wbar[0])
        b_dist = float(np.linalg.norm(proj.wbar[1:] - b))
        log.append(
            IterationRecord(
                k=k,
                gamma=gamma,
                zeta=zeta,
                b_dist=b_dist,
                cuts_total=cuts.total_hyperplanes(),
                qp_inner_iters=proj.inner_iterations,
            )
        )
        if trace is not None:
            trace.append(
                IterateState(k=k, gamma=gamma, w=w, wbar=proj.wbar, x=x, active=proj.active)
            )
        x_last = x
        warm = proj.active
        if gamma - zeta > params.tol_lin * (1.0 + abs(gamma)):
            y_candidates.append((proj.wbar[1:] - b) / (gamma - zeta))

        feasible, _ = check_feasibility(x, instance, params.tol_feas)
        if feasible:
            return finish(SolveStatus.OPTIMAL)
        if params.dual_early_exit:
            # certify is only the exit test here; the reported
            # certificate is picked from the candidate pool in finish,
            # which can only improve on the point certify accepted.
            cert = certify(
                x, gamma, instance, tol=params.tol_feas, tol_lin=params.tol_lin
            )
            if cert is not None:
                return finish(SolveStatus.OPTIMAL)

        gap = gamma - zeta
        gap_tol = _GAP_GUARD * (1.0 + abs(gamma))
        degenerate = gap <= gap_tol or zeta > gamma
        if degenerate and b_dist > params.tol_feas:
            # The supporting hyperplane runs parallel to the target
            # line while the equality residual is macroscopic: no
            # point of the outer cone reaches b, so the primal is
            # infeasible and the dual objective unbounded.
            message = "bound gap vanished with a macroscopic equality residual"
            return finish(SolveStatus.DUAL_UNBOUNDED, message)

        if degenerate:
            # Division by the vanished gap is unsafe, but the bound
            # itself stays valid: hold it and let new cuts push the
            # reachable part of the outer cone back below it.
            gamma_next = gamma
            held += 1
        else:
            assert zeta <= gamma + gap_tol
            gamma_next = gamma_update(gamma, zeta, b_dist**2)
            assert gamma_next <= zeta + gap_tol
            assert abs(gamma - gamma_next) >= b_dist - params.tol_lin
            held = 0

        added_any = False
        for i, sl in instance.cone.slices():
            if instance.cone.block_dims[i] < 2:
                continue
            xi = x[sl]
            violated = soc_residual(xi) > params.tol_qp
            if violated or params.add_inactive_cuts:
                cuts, added = cuts.with_cut(
                    most_violated_cut(xi, block=i), dedup_tol=params.dedup_tol
                )
                added_any = added or added_any

        if degenerate and (not added_any or held > _HOLD_LIMIT):
            # The bound sits on (or under) the reachable part of the
            # outer cone and cuts are no longer separating it: the
            # bound itself is the blocker, so raise it and redescend.
            if escalations >= params.max_gamma_escalations:
                message = (
                    "objective bound escalation exhausted; the polyhedral "
                    "relaxation appears unbounded"
                )
                return finish(SolveStatus.RELAXATION_UNBOUNDED, message)
            escalations += 1
            gamma = params.gamma_escalation_factor * max(abs(gamma), 1.0)
            held = 0
            stalled = 0
            k += 1
            continue

        decrease = gamma - gamma_next
        if decrease < 1e-14 * (1.0 + abs(gamma)) and not added_any:
            stalled += 1
            if stalled >= _STALL_LIMIT:
                message = (
                    f"objective bound stalled for {_STALL_LIMIT} iterations "
                    "without new cuts"
                )
                return finish(SolveStatus.NUMERICAL_FAILURE, message)
        else:
            stalled = 0
        gamma = gamma_next
        k += 1

    message = f"no convergence within {max_outer} iterations"
    return finish(SolveStatus.ITERATION_LIMIT, message)
