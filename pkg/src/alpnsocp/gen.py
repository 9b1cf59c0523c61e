"""Random instance generation with known interior points.

Instances are built so that a strictly feasible primal point and a
strictly feasible dual point are known by construction: the equality
right-hand side is defined as the image of a blockwise unit vector, and
the objective is defined from the all-ones dual vector minus a strictly
interior slack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConeStructure, SocpInstance

__all__ = ["GeneratedInstance", "generate", "interior_unit_point"]


@dataclass(frozen=True)
class GeneratedInstance:
    """Instance plus the interior points and seed used to build it."""

    instance: SocpInstance
    x_tilde: np.ndarray
    s_tilde: np.ndarray
    seed: int

    def __post_init__(self):
        for name in ("x_tilde", "s_tilde"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def interior_unit_point(cone: ConeStructure) -> np.ndarray:
    """The blockwise first unit vector, strictly inside every block."""
    x = np.zeros(cone.n)
    for _, sl in cone.slices():
        x[sl.start] = 1.0
    return x


def generate(m: int, dims, seed: int) -> GeneratedInstance:
    """Draw a random instance with Gaussian equality rows.

    The matrix ``A`` has independent standard normal entries from the
    counter-based Philox generator, so a given seed reproduces the same
    instance on every platform.  With ``x_tilde`` and ``s_tilde`` both
    equal to the blockwise first unit vector, ``b = A @ x_tilde`` makes
    the primal strictly feasible and ``c = A.T @ ones(m) - s_tilde``
    makes the all-ones vector strictly dual feasible.

    Parameters
    ----------
    m : int
        Number of equality rows, at least 1.
    dims : sequence of int
        Block dimensions of the cone.
    seed : int
        Nonnegative stream seed.

    Returns
    -------
    GeneratedInstance
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    cone = ConeStructure(tuple(dims))
    rng = np.random.Generator(np.random.Philox(seed))
    A = rng.standard_normal((m, cone.n))
    x_tilde = interior_unit_point(cone)
    s_tilde = interior_unit_point(cone)
    b = A @ x_tilde
    c = A.T @ np.ones(m) - s_tilde
    instance = SocpInstance(A=A, b=b, c=c, cone=cone)
    return GeneratedInstance(instance=instance, x_tilde=x_tilde, s_tilde=s_tilde, seed=seed)
