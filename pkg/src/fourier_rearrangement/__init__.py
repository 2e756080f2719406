"""Fourier rearrangement ``f# = F^-1 (F f)^*`` on uniform grids.

Submodules:
    grid: grids, transform convention, quadrature, FRF1 files.
    rearrange: symmetric-decreasing and Fourier rearrangements.
    multiplier: radial symbols and quadratic forms.
    functionals: Lp, weighted, Choquard, Hormander, AMT and Weinstein functionals.
    majorant: majorant checks, counterexamples, equality classification.
    solver: ground states and Weinstein minimization.
    cli: the ``frearr`` command.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ContractError,
    FieldFormatError,
    GridMismatchError,
    InternalConsistencyError,
    MajorantError,
    NumericalOverflowError,
    RearrangementError,
    SearchFailure,
    SolverError,
    ZeroCollapseError,
)
from .grid import (  # noqa: E402
    Field,
    GridSpec,
    Space,
    forward_transform,
    inverse_transform,
    l2_norm,
    lebesgue_quadrature,
    read_field,
    write_field,
)
from .rearrange import (  # noqa: E402
    fourier_rearrange,
    is_rearranged_fixed_point,
    partial_fourier_rearrange,
    symmetric_decreasing_rearrange,
)

__all__ = [
    "__version__",
    "ContractError",
    "FieldFormatError",
    "GridMismatchError",
    "InternalConsistencyError",
    "MajorantError",
    "NumericalOverflowError",
    "RearrangementError",
    "SearchFailure",
    "SolverError",
    "ZeroCollapseError",
    "Field",
    "GridSpec",
    "Space",
    "forward_transform",
    "inverse_transform",
    "l2_norm",
    "lebesgue_quadrature",
    "read_field",
    "write_field",
    "fourier_rearrange",
    "is_rearranged_fixed_point",
    "partial_fourier_rearrange",
    "symmetric_decreasing_rearrange",
]
