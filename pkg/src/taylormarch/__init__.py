"""taylormarch: finite-difference space, Taylor-series time marching.

The time integrator never discretizes time: temporal derivatives of the
unknown are built by differentiating the governing equations, every level
reduced to spatial derivatives of the current layer, and one step evaluates
the truncated Taylor series about that layer.
"""

from .fields import Field, GhostError
from .grids import Grid1D, Grid2D, SphericalGrid2D
from .boundary import (
    Dirichlet,
    DirichletFace,
    Extrapolation,
    Neumann,
    Symmetry,
    TimeFunction,
    fill_ghosts,
)
from .stencils import (
    StencilSpec,
    StencilWidthError,
    apply_derivative,
    derivative_at_boundary,
    make_stencil,
)
from .engine import (
    CascadeProblem,
    InstabilityError,
    MarchResult,
    StepControl,
    TemporalDerivativeStack,
    build_stack,
    euler_reference_step,
    march,
    taylor_step,
    temporal_derivative_check,
)
from .quadrature import QuadratureError

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GhostError",
    "Grid1D",
    "Grid2D",
    "SphericalGrid2D",
    "Dirichlet",
    "DirichletFace",
    "Extrapolation",
    "Neumann",
    "Symmetry",
    "TimeFunction",
    "fill_ghosts",
    "StencilSpec",
    "StencilWidthError",
    "apply_derivative",
    "derivative_at_boundary",
    "make_stencil",
    "CascadeProblem",
    "InstabilityError",
    "MarchResult",
    "StepControl",
    "TemporalDerivativeStack",
    "build_stack",
    "euler_reference_step",
    "march",
    "taylor_step",
    "temporal_derivative_check",
    "QuadratureError",
    "__version__",
]
