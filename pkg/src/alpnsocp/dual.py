"""Dual recovery and KKT certification.

The dual of the primal program is ``minimize b @ y`` subject to
``A.T @ y - c in K``.  Along the solver trajectory a dual candidate is
available in closed form from the current iterate and objective bound;
this module recovers it, evaluates the joint KKT residuals and bundles
the result into a checkable certificate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cone import soc_residual
from .model import SocpInstance, block_view

__all__ = [
    "RecoveryStatus",
    "ResidualBundle",
    "DualCertificate",
    "recover_dual",
    "kkt_residuals",
    "certify",
]


class RecoveryStatus(enum.Enum):
    OK = "ok"
    DUAL_UNBOUNDED = "dual_unbounded"


@dataclass(frozen=True)
class ResidualBundle:
    """Nonnegative KKT residuals of a primal-dual pair.

    ``primal_eq`` is ``norm(A @ x - b)``; ``primal_cone`` and
    ``dual_cone`` are the largest blockwise cone violations of ``x``
    and of the dual slack, clamped at zero; ``complementarity`` is
    ``abs(eta @ x)``; ``duality_gap`` is ``abs(c @ x - b @ y)``.
    """

    primal_eq: float
    primal_cone: float
    dual_cone: float
    complementarity: float
    duality_gap: float

    def max_residual(self) -> float:
        return max(
            self.primal_eq,
            self.primal_cone,
            self.dual_cone,
            self.complementarity,
            self.duality_gap,
        )


@dataclass(frozen=True)
class DualCertificate:
    """Recovered dual point with its slack and KKT residuals.

    The slack satisfies ``eta == A.T @ y - c`` exactly as computed, so
    stationarity never needs to be re-checked.
    """

    y: np.ndarray
    eta: np.ndarray
    residuals: ResidualBundle

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        eta = np.array(self.eta, dtype=float)
        y.flags.writeable = False
        eta.flags.writeable = False
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "eta", eta)


def recover_dual(x, gamma: float, instance: SocpInstance, tol_lin: float = 1e-8):
    """Closed-form dual candidate at an iterate.

    Returns ``(status, y)``.  When the bound gap ``gamma - c @ x`` is
    well scaled the candidate is ``y = -(b - A @ x) / (gamma - c @ x)``,
    the normal direction of the supporting hyperplane the iterate came
    from.  When the gap vanishes but the equality residual does not,
    the dual objective is unbounded below and ``y`` is ``None``;
    otherwise the zero vector is returned.
    """
    x = np.asarray(x, dtype=float)
    gamma = float(gamma)
    denom = gamma - float(instance.c @ x)
    resid = instance.b - instance.A @ x
    if abs(denom) > tol_lin * (1.0 + abs(gamma)):
        return RecoveryStatus.OK, -resid / denom
    if np.linalg.norm(resid) > tol_lin:
        return RecoveryStatus.DUAL_UNBOUNDED, None
    return RecoveryStatus.OK, np.zeros(instance.m)


def _max_cone_violation(z, instance: SocpInstance) -> float:
    worst = 0.0
    for i in range(1, instance.cone.p + 1):
        worst = max(worst, soc_residual(block_view(z, instance.cone, i)))
    return worst


def kkt_residuals(x, y, instance: SocpInstance) -> ResidualBundle:
    """Joint KKT residuals of the pair ``(x, y)``.

    The dual slack is formed internally as ``A.T @ y - c``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eta = instance.A.T @ y - instance.c
    return ResidualBundle(
        primal_eq=float(np.linalg.norm(instance.A @ x - instance.b)),
        primal_cone=_max_cone_violation(x, instance),
        dual_cone=_max_cone_violation(eta, instance),
        complementarity=abs(float(eta @ x)),
        duality_gap=abs(float(instance.c @ x - instance.b @ y)),
    )


def scaled_kkt_residual(bundle: ResidualBundle, x, eta, instance: SocpInstance) -> float:
    """Largest residual after normalizing by the natural data scales.

    Equality and cone residuals are divided by ``1 + norm(b)`` and
    ``1 + norm`` of the tested vector; the bilinear complementarity and
    gap terms by the product of the participating scales.
    """
    sx = 1.0 + float(np.linalg.norm(x))
    se = 1.0 + float(np.linalg.norm(eta))
    sb = 1.0 + float(np.linalg.norm(instance.b))
    sobj = 1.0 + abs(float(instance.c @ np.asarray(x, dtype=float)))
    return max(
        bundle.primal_eq / sb,
        bundle.primal_cone / sx,
        bundle.dual_cone / se,
        bundle.complementarity / (sx * se),
        bundle.duality_gap / sobj,
    )


def certify(
    x,
    gamma: float,
    instance: SocpInstance,
    tol: float = 1e-4,
    tol_lin: float = 1e-8,
) -> DualCertificate | None:
    """Build a certificate when the recovered pair passes the KKT test.

    Returns ``None`` when dual recovery fails or the largest scaled
    residual exceeds ``tol``.  The duality gap is recomputed from the
    instance data and stored in the bundle.
    """
    status, y = recover_dual(x, gamma, instance, tol_lin=tol_lin)
    if status is not RecoveryStatus.OK:
        return None
    bundle = kkt_residuals(x, y, instance)
    eta = instance.A.T @ y - instance.c
    if scaled_kkt_residual(bundle, x, eta, instance) > tol:
        return None
    return DualCertificate(y=y, eta=eta, residuals=bundle)
