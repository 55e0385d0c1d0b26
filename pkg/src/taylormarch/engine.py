"""Taylor-series time marching.

A problem supplies the cascade of temporal derivatives: level 1 is the
governing right-hand side, level k expresses the k-th time derivative of the
unknown through spatial derivatives of the levels below it.  One step then
evaluates the truncated series

    U(t + dt) = U(t) + sum_{k=1..q} G_k dt^k / k!

about the current layer, and marching repeats this from scratch at every
layer (the stack is rebuilt from the current solution each step, never
accumulated across layers).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .fields import Field

# A state is a single Field or a tuple of Fields (multi-component problems);
# cascade levels mirror the state's structure.


class InstabilityError(RuntimeError):
    """A marched field went non-finite; carries the offending step index."""

    def __init__(self, step: int, t: float, name: str = ""):
        self.step = step
        self.t = t
        what = f" in {name}" if name else ""
        super().__init__(f"non-finite values{what} after step {step} (t = {t:.6g})")


def state_fields(state) -> tuple[Field, ...]:
    return (state,) if isinstance(state, Field) else tuple(state)


def like_state(state, fields: Sequence[Field]):
    return fields[0] if isinstance(state, Field) else tuple(fields)


@dataclass
class StepControl:
    """Time-step parameters.  ``dt_max`` is an advisory stability cap only:
    exceeding it is recorded, never silently clipped."""

    dt: float
    order: int
    n_steps: int
    dt_max: float | None = None
    dt_schedule: Sequence[float] | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Taylor order must be >= 1")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if self.dt_schedule is None and self.dt <= 0:
            raise ValueError("dt must be positive")

    def step_sizes(self) -> list[float]:
        if self.dt_schedule is not None:
            if len(self.dt_schedule) != self.n_steps:
                raise ValueError("dt_schedule length must equal n_steps")
            return [float(d) for d in self.dt_schedule]
        return [self.dt] * self.n_steps

    def exceeds_cap(self) -> bool:
        return self.dt_max is not None and any(d > self.dt_max for d in self.step_sizes())


class CascadeProblem(ABC):
    """Interface the engine marches: ghost filling plus the level cascade."""

    max_order: int = 5

    @abstractmethod
    def fill(self, state, t: float):
        """Return the state with ghosts filled / boundary values enforced."""

    @abstractmethod
    def level(self, k: int, state, levels: list, t: float, ctx):
        """Return G_k = d^k(unknown)/dt^k given G_0..G_{k-1} in ``levels``."""

    def prepare(self, state, t: float):
        """Per-layer work before the cascade (e.g. a pressure solve)."""
        return None


@dataclass
class TemporalDerivativeStack:
    """G_0..G_q at one time layer; G_0 is the current solution."""

    t: float
    levels: list

    @property
    def order(self) -> int:
        return len(self.levels) - 1

    def level_fields(self, k: int) -> tuple[Field, ...]:
        return state_fields(self.levels[k])


def build_stack(problem: CascadeProblem, state, q: int, t: float = 0.0) -> TemporalDerivativeStack:
    if q < 1:
        raise ValueError("stack order must be >= 1")
    if q > problem.max_order:
        raise ValueError(
            f"cascade of {type(problem).__name__} supplies levels up to {problem.max_order}; "
            f"order {q} requested"
        )
    state = problem.fill(state, t)
    ctx = problem.prepare(state, t)
    levels: list = [state]
    for k in range(1, q + 1):
        levels.append(problem.level(k, state, levels, t, ctx))
    return TemporalDerivativeStack(t, levels)


def taylor_step(stack: TemporalDerivativeStack, dt: float):
    """Advance one layer: G_0 + sum_k G_k dt^k / k!.

    At order 1 the arithmetic is exactly u + dt*f, bit-identical to an
    explicit Euler step built from the same rhs.
    """
    base = stack.level_fields(0)
    arrs = [f.values.copy() for f in base]
    coeff = 1.0
    for k in range(1, stack.order + 1):
        coeff *= dt / k
        for arr, gk in zip(arrs, stack.level_fields(k)):
            arr += coeff * gk.values
    fields = [Field(f.grid, a, name=f.name) for f, a in zip(base, arrs)]
    return like_state(stack.levels[0], fields)


def euler_reference_step(problem: CascadeProblem, state, dt: float, t: float = 0.0):
    """Plain explicit Euler u + dt*f from the same spatial operators
    (reference implementation for order-equivalence checks)."""
    state = problem.fill(state, t)
    ctx = problem.prepare(state, t)
    rhs = problem.level(1, state, [state], t, ctx)
    fields = [
        Field(u.grid, u.values + dt * f.values, name=u.name)
        for u, f in zip(state_fields(state), state_fields(rhs))
    ]
    return like_state(state, fields)


@dataclass
class MarchResult:
    times: np.ndarray
    state: object
    snapshots: list
    max_abs: list
    exceeded_cap: bool = False
    extras: dict = dc_field(default_factory=dict)

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


def march(problem: CascadeProblem, state, control: StepControl, t0: float = 0.0,
          on_step: Callable | None = None, store_every: int = 0) -> MarchResult:
    """Run ``n_steps`` successive build_stack + taylor_step applications.

    ``on_step(i, t, state, stack)`` is called after every completed step with
    the ghost-filled new state.  ``store_every=m`` keeps every m-th state in
    the snapshot list (initial and final states are always kept).
    """
    t = t0
    times = [t]
    state = problem.fill(state, t)
    snapshots = [(t, state)]
    max_abs = [max(f.max_abs() for f in state_fields(state))]

    steps = control.step_sizes()
    for i, dt in enumerate(steps):
        with np.errstate(over="ignore", invalid="ignore"):
            # blow-up is diagnosed below, not warned about mid-step
            stack = build_stack(problem, state, control.order, t)
            state = taylor_step(stack, dt)
        t += dt
        for f in state_fields(state):
            if not f.is_finite():
                raise InstabilityError(i + 1, t, f.name)
        state = problem.fill(state, t)
        times.append(t)
        max_abs.append(max(f.max_abs() for f in state_fields(state)))
        if store_every and (i + 1) % store_every == 0 and i + 1 < len(steps):
            snapshots.append((t, state))
        if on_step is not None:
            on_step(i, t, state, stack)
    if len(steps) > 0:
        snapshots.append((t, state))

    return MarchResult(
        times=np.asarray(times),
        state=state,
        snapshots=snapshots,
        max_abs=max_abs,
        exceeded_cap=control.exceeds_cap(),
    )


def temporal_derivative_check(problem: CascadeProblem, state, q: int, t0: float = 0.0,
                              fd_step: float = 1e-5, substeps: int = 64) -> list[float]:
    """Validate the cascade against finite differences in time.

    Level k from build_stack is compared with a centered time difference of
    level k-1 evaluated on states marched (order 1, ``substeps`` sub-steps)
    to t0 +/- fd_step.  Returns one relative discrepancy per level 1..q.
    """
    if q > 3:
        raise ValueError("temporal_derivative_check supports q <= 3")
    stack = build_stack(problem, state, q, t0)

    def marched(delta: float):
        # dt_schedule admits the backward half of the centered difference
        ctrl = StepControl(dt=abs(delta) / substeps, order=1, n_steps=substeps,
                           dt_schedule=[delta / substeps] * substeps)
        return march(problem, state, ctrl, t0=t0).state

    plus, minus = marched(fd_step), marched(-fd_step)
    out = []
    for k in range(1, q + 1):
        if k == 1:
            hi, lo = plus, minus
        else:
            hi = build_stack(problem, plus, k - 1, t0 + fd_step).levels[k - 1]
            lo = build_stack(problem, minus, k - 1, t0 - fd_step).levels[k - 1]
        disc = 0.0
        scale = 0.0
        for fh, fl, g in zip(state_fields(hi), state_fields(lo), stack.level_fields(k)):
            fd = (fh.interior - fl.interior) / (2.0 * fd_step)
            disc = max(disc, float(np.max(np.abs(fd - g.interior))))
            scale = max(scale, g.max_abs())
        out.append(disc / max(scale, 1e-300) if scale > 0 else disc)
    return out
