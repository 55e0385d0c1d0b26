"""Scalar fields over structured grids.

A :class:`Field` stores one value per node including the ghost layer.  All
spatial operators take fields and return new fields; inputs are never
mutated.  ``ghosts_filled`` records whether the ghost layer currently holds
values consistent with some boundary policy -- operators that reach into
ghosts refuse to run otherwise.
"""

from __future__ import annotations

import numpy as np


class GhostError(RuntimeError):
    """Raised when an operation needs ghost values that were never filled."""


class Field:
    __slots__ = ("grid", "values", "name", "ghosts_filled")

    def __init__(self, grid, values=None, name: str = "", ghosts_filled: bool = False):
        self.grid = grid
        if values is None:
            values = np.zeros(grid.full_shape)
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != grid.full_shape:
                raise ValueError(
                    f"values shape {values.shape} does not match grid full shape {grid.full_shape}"
                )
        self.values = values
        self.name = name
        self.ghosts_filled = ghosts_filled

    # -- construction -------------------------------------------------------

    @classmethod
    def from_interior(cls, grid, interior, name: str = "") -> "Field":
        interior = np.asarray(interior, dtype=float)
        if interior.shape != grid.shape:
            raise ValueError(
                f"interior shape {interior.shape} does not match grid shape {grid.shape}"
            )
        f = cls(grid, name=name)
        f.interior[...] = interior
        return f

    @classmethod
    def from_function(cls, grid, fn, name: str = "") -> "Field":
        """Sample ``fn`` on the interior nodes (fn(x) in 1-D, fn(X0, X1) in 2-D)."""
        if grid.ndim == 1:
            vals = fn(grid.coords())
        else:
            x0, x1 = np.meshgrid(grid.coords(0), grid.coords(1), indexing="ij")
            vals = fn(x0, x1)
        return cls.from_interior(grid, np.broadcast_to(vals, grid.shape), name=name)

    @classmethod
    def zeros(cls, grid, name: str = "") -> "Field":
        return cls(grid, name=name)

    # -- views --------------------------------------------------------------

    @property
    def interior(self) -> np.ndarray:
        g = self.grid.ghost_width
        if self.grid.ndim == 1:
            return self.values[g:-g]
        return self.values[g:-g, g:-g]

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), name=self.name, ghosts_filled=self.ghosts_filled)

    def with_values(self, values, name: str | None = None) -> "Field":
        return Field(self.grid, values, name=self.name if name is None else name)

    # -- diagnostics ---------------------------------------------------------

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.interior).all())

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.interior)))

    # -- arithmetic (returns plain fields with unfilled ghosts) --------------

    def __add__(self, other):
        if isinstance(other, Field):
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, Field):
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, Field):
            return Field(self.grid, self.values * other.values)
        return Field(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"<Field{tag} shape={self.grid.shape} max|.|={self.max_abs():.3g}>"
