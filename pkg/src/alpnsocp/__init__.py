"""Second-order cone programming by adaptive polyhedral refinement.

Solves ``maximize c @ x`` subject to ``A @ x == b`` and ``x`` in a
product of second-order cones, by repeatedly projecting onto the image
of a polyhedral outer approximation that is refined with the most
violated cut per block.  Dual certificates are recovered from the
projection geometry in closed form.
"""

from .alpn import (
    IterationRecord,
    SolveReport,
    SolveStatus,
    check_feasibility,
    initial_gamma,
    solve,
)
from .cone import (
    CutSet,
    CutVector,
    cut_value,
    in_polyhedral_cone,
    initial_cuts,
    most_violated_cut,
    soc_residual,
)
from .dual import DualCertificate, ResidualBundle, certify, kkt_residuals, recover_dual
from .gen import GeneratedInstance, generate
from .io import (
    InstanceFormatError,
    read_instance,
    read_provenance,
    write_instance,
    write_report,
)
from .model import (
    ConeStructure,
    InnerIterationLimitError,
    NumericalFailureError,
    SocpInstance,
    SolverError,
    SolverParams,
    StackedMatrix,
    assemble_stacked,
    block_view,
)
from .projection import ProjectionResult, project, solve_eq_ls

__version__ = "0.1.0"

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
    "CutVector",
    "CutSet",
    "soc_residual",
    "cut_value",
    "most_violated_cut",
    "initial_cuts",
    "in_polyhedral_cone",
    "ProjectionResult",
    "project",
    "solve_eq_ls",
    "SolveStatus",
    "SolveReport",
    "IterationRecord",
    "solve",
    "initial_gamma",
    "check_feasibility",
    "DualCertificate",
    "ResidualBundle",
    "recover_dual",
    "kkt_residuals",
    "certify",
    "GeneratedInstance",
    "generate",
    "InstanceFormatError",
    "read_instance",
    "read_provenance",
    "write_instance",
    "write_report",
    "__version__",
]
