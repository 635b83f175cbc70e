"""Scalar implicit functions on validated monotonicity boxes.

Given F(x, y) = 0 at a seed (a, b) with dF/dy(a, b) != 0, find_box grows a
product box X x [y_lo, y_hi] around the seed on which (by grid sampling)
dF/dy keeps one sign and F has opposite signs at the two y-faces. On such
a box every x in X brackets exactly one root, so evaluation is plain
bisection and is unconditionally convergent. The gradient comes from the
quotient formula df/dx_j = -(dF/dx_j) / (dF/dy) at (x, f(x)).

The function argument is duck-typed: anything with n_inputs, n_outputs,
eval(p) and partial(p, j) works, which is what lets the system solver feed
its nested reduced functions through the same machinery. The dependent
variable is always the last input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .config import SolverOptions
from .errors import (
    BoxNotFound,
    DegenerateDerivative,
    DimensionMismatch,
    DomainError,
    NoConvergence,
    OutsideBox,
    SeedNotOnZeroSet,
)
from .linalg import Vector

DERIVATIVE_EPS = 1e-12

# The dependent interval must cover the solution sheet's first-order reach
# over the independent box, or halving all half-widths together can never
# validate (reach and interval shrink at the same rate). When no explicit
# dependent half-width is configured, scale it by the slope at the seed,
# with margin for curvature.
SLOPE_MARGIN = 1.25


@dataclass(frozen=True)
class SplitPoint:
    """A point of R^n x R^m with an explicit independent/dependent split."""

    x: Vector
    y: Vector

    @classmethod
    def of(cls, x: Sequence[float], y: Sequence[float]) -> "SplitPoint":
        return cls(Vector(x), Vector(y))

    @classmethod
    def from_flat(cls, values: Sequence[float], n: int) -> "SplitPoint":
        if not 0 <= n <= len(values):
            raise DimensionMismatch(f"split {n} out of range for {len(values)} values")
        return cls(Vector(values[:n]), Vector(values[n:]))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def m(self) -> int:
        return len(self.y)

    def point(self) -> tuple[float, ...]:
        return tuple(self.x) + tuple(self.y)


@dataclass(frozen=True)
class SolutionBox:
    """Open box X times [y_lo, y_hi] with validation metadata.

    sign is the recorded orientation of dF/dy; validated means the grid
    checks passed: sign * dF/dy > 0 on the closed box and
    sign * F(x, y_lo) < 0 < sign * F(x, y_hi) at the sampled interior x.
    """

    x_lo: Vector
    x_hi: Vector
    y_lo: float
    y_hi: float
    sign: int
    grid_density: int
    validated: bool
    shrinks: int = 0

    def contains_x(self, x: Sequence[float]) -> bool:
        return all(lo < v < hi for lo, v, hi in zip(self.x_lo, x, self.x_hi))


def _closed_axis(lo: float, hi: float, g: int) -> list[float]:
    return [lo + i * (hi - lo) / (g - 1) for i in range(g)]


def _interior_axis(lo: float, hi: float, g: int) -> list[float]:
    return [lo + (i + 0.5) * (hi - lo) / g for i in range(g)]


def find_box(F, seed: SplitPoint, options: SolverOptions = SolverOptions()) -> SolutionBox:
    """Grow a validated monotonicity box around the seed.

    Starts from half-widths h0 (independent axes) and h0_dep (dependent
    axis) and halves all of them on any failed sample, up to max_shrink
    times. Failures include domain errors and, for nested functions,
    stepping outside an inner validated box.
    """
    n = seed.n
    if seed.m != 1:
        raise DimensionMismatch(f"scalar solver needs m = 1, got m = {seed.m}")
    if F.n_outputs != 1 or F.n_inputs != n + 1:
        raise DimensionMismatch(
            f"need 1 component in {n + 1} variables, got "
            f"{F.n_outputs} in {F.n_inputs}"
        )
    p0 = seed.point()
    r0 = F.eval(p0)[0]
    if abs(r0) > options.tol_seed:
        raise SeedNotOnZeroSet(abs(r0), options.tol_seed)
    slope = F.partial(p0, n)[0]
    if abs(slope) <= DERIVATIVE_EPS:
        raise DegenerateDerivative(
            f"dF/dy at the seed is {slope:g} (within {DERIVATIVE_EPS:g} of zero)"
        )
    sign = 1 if slope > 0 else -1

    a = tuple(seed.x)
    b = seed.y[0]
    g = options.grid_density
    hx = [options.h0] * n
    if options.h0_dep is not None:
        hy = options.h0_dep
    else:
        reach = sum(abs(F.partial(p0, j)[0] / slope) for j in range(n))
        hy = options.h0 * max(1.0, SLOPE_MARGIN * reach)
    last_failure = ("derivative", p0)

    for attempt in range(options.max_shrink + 1):
        x_lo = [a[i] - hx[i] for i in range(n)]
        x_hi = [a[i] + hx[i] for i in range(n)]
        y_lo, y_hi = b - hy, b + hy
        failure = None

        # nested functions may fail to evaluate at a sample (outside an inner
        # box, or in a region its sampling misjudged); that fails the attempt
        closed_axes = [_closed_axis(x_lo[i], x_hi[i], g) for i in range(n)]
        for point in itertools.product(*closed_axes, _closed_axis(y_lo, y_hi, g)):
            try:
                if sign * F.partial(point, n)[0] <= 0.0:
                    failure = ("derivative", point)
                    break
            except (DomainError, OutsideBox, NoConvergence):
                failure = ("derivative", point)
                break

        if failure is None:
            interior_axes = [_interior_axis(x_lo[i], x_hi[i], g) for i in range(n)]
            for xs in itertools.product(*interior_axes):
                try:
                    lo_ok = sign * F.eval(xs + (y_lo,))[0] < 0.0
                    hi_ok = sign * F.eval(xs + (y_hi,))[0] > 0.0
                except (DomainError, OutsideBox, NoConvergence):
                    failure = ("endpoint-sign", xs)
                    break
                if not (lo_ok and hi_ok):
                    failure = ("endpoint-sign", xs)
                    break

        if failure is None:
            return SolutionBox(
                x_lo=Vector(x_lo),
                x_hi=Vector(x_hi),
                y_lo=y_lo,
                y_hi=y_hi,
                sign=sign,
                grid_density=g,
                validated=True,
                shrinks=attempt,
            )
        last_failure = failure
        hx = [h / 2 for h in hx]
        hy /= 2

    raise BoxNotFound(last_failure[0], last_failure[1])


@dataclass(frozen=True)
class ImplicitSolution:
    """Evaluable handle for the implicit function defined on a validated box."""

    F: object
    box: SolutionBox
    seed: SplitPoint
    tol_root: float
    max_iter: int

    def solve_at(self, x: Sequence[float]) -> float:
        """Unique root y of F(x, .) in the box interval, by bisection."""
        x = tuple(x)
        if len(x) != self.seed.n:
            raise DimensionMismatch(f"expected {self.seed.n} coordinates, got {len(x)}")
        if not self.box.contains_x(x):
            raise OutsideBox(x)
        s = self.box.sign
        lo, hi = self.box.y_lo, self.box.y_hi
        f_lo = s * self.F.eval(x + (lo,))[0]
        f_hi = s * self.F.eval(x + (hi,))[0]
        if f_lo == 0.0:
            return lo
        if f_hi == 0.0:
            return hi
        if f_lo > 0.0 or f_hi < 0.0:
            raise NoConvergence(
                "endpoint signs wrong at query point; box validation was fooled by sampling"
            )
        # width-based termination only: an |F| threshold could stop early
        # where the slope is small, costing root-location accuracy
        for _ in range(self.max_iter):
            mid = 0.5 * (lo + hi)
            f_mid = s * self.F.eval(x + (mid,))[0]
            if f_mid == 0.0:
                return mid
            if f_mid < 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= self.tol_root:
                return 0.5 * (lo + hi)
        raise NoConvergence(f"bisection did not converge in {self.max_iter} iterations")

    def gradient_at(self, x: Sequence[float]) -> Vector:
        """df/dx at x, via -(dF/dx_j)/(dF/dy) at (x, f(x))."""
        return self.gradient_known(tuple(x), self.solve_at(x))

    def gradient_known(self, x: tuple[float, ...], y: float) -> Vector:
        """Gradient at a point whose solution value is already known."""
        n = self.seed.n
        p = x + (y,)
        fy = self.F.partial(p, n)[0]
        if fy == 0.0:
            raise DegenerateDerivative("dF/dy vanished inside the box")
        return Vector(-self.F.partial(p, j)[0] / fy for j in range(n))


def build_implicit(
    F, seed: SplitPoint, options: SolverOptions = SolverOptions()
) -> ImplicitSolution:
    """Validate a box around the seed and wrap it as an evaluable solution."""
    box = find_box(F, seed, options)
    return ImplicitSolution(
        F=F, box=box, seed=seed, tol_root=options.tol_root, max_iter=options.max_iter
    )
