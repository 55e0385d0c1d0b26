"""Structured grids: uniform 1-D/2-D Cartesian and the spherical (rho, theta) grid.

All grids are node-based with a ghost layer on every face.  Non-periodic
axes carry ``n_cells + 1`` interior nodes including both ends; periodic axes
carry ``n_cells`` nodes (the right end is identified with the left).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D grid on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_cells: int
    ghost_width: int = 3
    periodic: bool = False

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError("n_cells must be at least 2")
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.ghost_width < 1:
            raise ValueError("ghost_width must be at least 1")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells if self.periodic else self.n_cells + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_nodes,)

    @property
    def full_shape(self) -> tuple[int, ...]:
        return (self.n_nodes + 2 * self.ghost_width,)

    def coords(self) -> np.ndarray:
        """Interior node coordinates."""
        return self.x_min + self.h * np.arange(self.n_nodes)

    def full_coords(self) -> np.ndarray:
        """Node coordinates including ghosts."""
        g = self.ghost_width
        return self.x_min + self.h * np.arange(-g, self.n_nodes + g)

    def spacing(self, axis: int = 0) -> float:
        if axis != 0:
            raise ValueError("Grid1D has a single axis")
        return self.h

    def is_periodic(self, axis: int = 0) -> bool:
        return self.periodic

    @property
    def ndim(self) -> int:
        return 1


@dataclass(frozen=True)
class Grid2D:
    """Uniform 2-D Cartesian grid, axis 0 = x, axis 1 = y."""

    x_min: float
    x_max: float
    n_x: int
    y_min: float
    y_max: float
    n_y: int
    ghost_width: int = 2
    periodic_x: bool = False
    periodic_y: bool = False

    def __post_init__(self):
        if self.n_x < 2 or self.n_y < 2:
            raise ValueError("n_x and n_y must be at least 2")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("upper bounds must exceed lower bounds")
        if self.ghost_width < 1:
            raise ValueError("ghost_width must be at least 1")

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / self.n_y

    @property
    def shape(self) -> tuple[int, int]:
        nx = self.n_x if self.periodic_x else self.n_x + 1
        ny = self.n_y if self.periodic_y else self.n_y + 1
        return (nx, ny)

    @property
    def full_shape(self) -> tuple[int, int]:
        g = self.ghost_width
        return tuple(n + 2 * g for n in self.shape)

    def coords(self, axis: int) -> np.ndarray:
        if axis == 0:
            return self.x_min + self.hx * np.arange(self.shape[0])
        if axis == 1:
            return self.y_min + self.hy * np.arange(self.shape[1])
        raise ValueError("axis must be 0 or 1")

    def spacing(self, axis: int) -> float:
        return (self.hx, self.hy)[axis]

    def is_periodic(self, axis: int) -> bool:
        return (self.periodic_x, self.periodic_y)[axis]

    @property
    def ndim(self) -> int:
        return 2


@dataclass(frozen=True)
class SphericalGrid2D:
    """Axisymmetric (rho, theta) grid around a unit sphere.

    rho = r/R runs from the sphere surface rho = 1 to the truncation radius
    ``rho_max``; theta runs over [0, pi] with both poles on nodes (they carry
    the symmetry conditions).  Axis 0 = rho, axis 1 = theta.
    """

    rho_max: float
    n_rho: int
    n_theta: int
    ghost_width: int = 1
    rho_min: float = field(default=1.0, init=False)

    def __post_init__(self):
        if self.rho_max <= 1.0:
            raise ValueError("rho_max must exceed the sphere surface rho = 1")
        if self.n_rho < 2 or self.n_theta < 2:
            raise ValueError("n_rho and n_theta must be at least 2")
        if self.ghost_width < 1:
            raise ValueError("ghost_width must be at least 1")

    @property
    def h_rho(self) -> float:
        return (self.rho_max - 1.0) / self.n_rho

    @property
    def h_theta(self) -> float:
        return math.pi / self.n_theta

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rho + 1, self.n_theta + 1)

    @property
    def full_shape(self) -> tuple[int, int]:
        g = self.ghost_width
        return (self.n_rho + 1 + 2 * g, self.n_theta + 1 + 2 * g)

    def coords(self, axis: int) -> np.ndarray:
        # linspace pins both ends exactly (rho = 1 and rho_max; theta = 0 and pi)
        if axis == 0:
            return np.linspace(1.0, self.rho_max, self.n_rho + 1)
        if axis == 1:
            return np.linspace(0.0, math.pi, self.n_theta + 1)
        raise ValueError("axis must be 0 or 1")

    def spacing(self, axis: int) -> float:
        return (self.h_rho, self.h_theta)[axis]

    def is_periodic(self, axis: int) -> bool:
        return False

    @property
    def ndim(self) -> int:
        return 2
