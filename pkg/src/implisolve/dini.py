"""System implicit functions by induction on the dependent dimension.

The construction mirrors the inductive proof it implements: normalize the
dependent block so its Jacobian at the seed is the identity, solve the
first normalized equation for its first dependent variable with the scalar
machinery (all remaining variables treated as independent), substitute
that scalar solution into the remaining equations, and recurse on the
reduced system of size m - 1. Evaluation therefore nests one bisection per
level; cost grows like iterations^m, which is fine at desk scale (m is
capped by options.max_depth).

Reduced functions have no closed form (they contain a numerically defined
scalar solution), so inner recursion levels operate on composed function
objects that expose the same eval/partial/jacobian surface as parsed
expression functions. Their derivatives are exact chain-rule combinations
of dual-number partials and the scalar gradient formula, not finite
differences.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Sequence

from .config import SolverOptions
from .errors import (
    BoxNotFound,
    DimensionMismatch,
    NoConvergence,
    OutsideBox,
    SeedNotOnZeroSet,
    SingularMatrix,
)
from .expr import BinOp, ExprFunction, Var, const, fresh_names, linear_combination
from .linalg import (
    Matrix,
    Vector,
    hs_norm,
    inverse,
    matvec,
    scale,
    matmul,
    split_columns,
    vec_sub,
)
from .scalar_implicit import ImplicitSolution, SplitPoint, build_implicit

_NORMALIZE_TOL = 1e-10

# Inner recursion levels start from slightly smaller initial half-widths.
# Reduced functions are only evaluable strictly inside the enclosing scalar
# box; starting from the same h0 would put the first inner candidate box
# exactly on that open boundary and force a wasted halving at every level.
_INNER_H0_INSET = 0.9


class _AffineReparam:
    """F with the dependent block reparameterized: G(x, z) = F(x, b + J_inv (z - b))."""

    def __init__(self, fn, n: int, b: Vector, j_inv: Matrix):
        self.fn = fn
        self.n = n
        self.b = tuple(b)
        self.j_inv = j_inv
        self.n_inputs = fn.n_inputs
        self.n_outputs = fn.n_outputs

    def _map(self, p: Sequence[float]) -> tuple[float, ...]:
        z = p[self.n :]
        dz = [zv - bv for zv, bv in zip(z, self.b)]
        y = matvec(self.j_inv, dz)
        return tuple(p[: self.n]) + tuple(bv + yv for bv, yv in zip(self.b, y))

    def eval(self, p: Sequence[float]) -> Vector:
        return self.fn.eval(self._map(p))

    def partial(self, p: Sequence[float], j: int) -> Vector:
        v = self._map(p)
        if j < self.n:
            return self.fn.partial(v, j)
        jz = j - self.n
        m = len(self.b)
        cols = [self.fn.partial(v, self.n + k) for k in range(m)]
        return Vector(
            sum(cols[k][i] * self.j_inv.rows[k][jz] for k in range(m))
            for i in range(self.n_outputs)
        )

    def jacobian(self, p: Sequence[float]) -> Matrix:
        v = self._map(p)
        full = self.fn.jacobian(v)
        fx, fy = split_columns(full, self.n)
        fz = matmul(fy, self.j_inv)
        return Matrix(tuple(rx + rz for rx, rz in zip(fx.rows, fz.rows)))


class _ComponentSlice:
    """One component of a function, inputs permuted. perm[i] is the index in
    the wrapped function's input order of this function's i-th input."""

    def __init__(self, fn, component: int, perm: Sequence[int]):
        self.fn = fn
        self.component = component
        self.perm = tuple(perm)
        self.n_inputs = fn.n_inputs
        self.n_outputs = 1

    def _unpermute(self, p: Sequence[float]) -> list[float]:
        w = [0.0] * self.n_inputs
        for i, v in enumerate(p):
            w[self.perm[i]] = v
        return w

    def eval(self, p: Sequence[float]) -> Vector:
        return Vector((self.fn.eval(self._unpermute(p))[self.component],))

    def partial(self, p: Sequence[float], j: int) -> Vector:
        w = self._unpermute(p)
        return Vector((self.fn.partial(w, self.perm[j])[self.component],))


class _ReducedFunction:
    """Components 2..m of G with the first dependent variable replaced by the
    scalar implicit solution phi. Inputs are (x, z2..zm); every evaluation
    triggers one inner bisection for z1 = phi(x, z')."""

    def __init__(self, G, phi: ImplicitSolution, n: int):
        self.G = G
        self.phi = phi
        self.n = n
        self.n_inputs = G.n_inputs - 1
        self.n_outputs = G.n_outputs - 1

    def _assemble(self, u: Sequence[float], z1: float) -> tuple[float, ...]:
        return tuple(u[: self.n]) + (z1,) + tuple(u[self.n :])

    def eval(self, u: Sequence[float]) -> Vector:
        z1 = self.phi.solve_at(u)
        return Vector(self.G.eval(self._assemble(u, z1))[1:])

    def partial(self, u: Sequence[float], j: int) -> Vector:
        u = tuple(u)
        z1 = self.phi.solve_at(u)
        v = self._assemble(u, z1)
        dphi = self.phi.gradient_known(u, z1)[j]
        col = j if j < self.n else j + 1
        direct = self.G.partial(v, col)
        through = self.G.partial(v, self.n)
        return Vector(
            direct[i + 1] + through[i + 1] * dphi for i in range(self.n_outputs)
        )

    def jacobian(self, u: Sequence[float]) -> Matrix:
        u = tuple(u)
        z1 = self.phi.solve_at(u)
        v = self._assemble(u, z1)
        grad = self.phi.gradient_known(u, z1)
        jg = self.G.jacobian(v)
        rows = []
        for i in range(1, self.G.n_outputs):
            row = []
            for j in range(self.n_inputs):
                col = j if j < self.n else j + 1
                row.append(jg.rows[i][col] + jg.rows[i][self.n] * grad[j])
            rows.append(row)
        return Matrix.from_rows(rows)


def _phi_variable_perm(n: int, m: int) -> list[int]:
    # scalar-solver order (x, z2..zm, z1) -> original order (x, z1, z2..zm)
    return list(range(n)) + list(range(n + 1, n + m)) + [n]


def normalize(F, seed: SplitPoint):
    """Reparameterize the dependent block so dG/dz at the seed is the
    identity: G(x, z) = F(x, b + J_inv (z - b)) with J = dF/dy(a, b).

    Expression-backed functions get the substitution performed on their
    trees; composed functions are wrapped with the equivalent affine map.
    Returns (G, J_inv).
    """
    n, m = seed.n, seed.m
    p = seed.point()
    full = F.jacobian(p)
    _, jy = split_columns(full, n)
    j_inv = inverse(jy)

    if isinstance(F, ExprFunction):
        x_names = list(F.variables[:n])
        y_names = list(F.variables[n:])
        z_names = fresh_names("z", m, F.variables)
        b = tuple(seed.y)
        mapping = {}
        for i, y_name in enumerate(y_names):
            terms = [
                (j_inv.rows[i][j], BinOp("-", Var(z_names[j]), const(b[j])))
                for j in range(m)
            ]
            mapping[y_name] = linear_combination(b[i], terms)
        G = F.substituted(mapping, x_names + z_names)
    else:
        G = _AffineReparam(F, n, seed.y, j_inv)

    gy = split_columns(G.jacobian(p), n)[1]
    for i in range(m):
        for j in range(m):
            target = 1.0 if i == j else 0.0
            if abs(gy.rows[i][j] - target) > _NORMALIZE_TOL:
                raise SingularMatrix(
                    "normalization failed: dependent-block Jacobian too "
                    f"ill-conditioned (entry ({i},{j}) = {gy.rows[i][j]!r})"
                )
    return G, j_inv


@dataclass(frozen=True)
class SystemSolution:
    """Solution stack for F(x, f(x)) = 0 with vector-valued f.

    For m = 1 this wraps a scalar solution of F directly. For m > 1 it
    holds the normalizer J_inv, the scalar solution of the first normalized
    equation, and a SystemSolution of size m - 1 for the reduced system.
    Immutable; evaluations at distinct points may run concurrently.
    """

    F: object
    seed: SplitPoint
    options: SolverOptions
    depth: int
    scalar: ImplicitSolution
    normalizer: Matrix | None
    normalized: object | None
    child: "SystemSolution | None"

    @property
    def n(self) -> int:
        return self.seed.n

    @property
    def m(self) -> int:
        return self.seed.m

    def solve_at(self, x: Sequence[float]) -> Vector:
        """y with F(x, y) = 0, assembled from the recursion and mapped back
        through the normalizer."""
        x = tuple(float(v) for v in x)
        if len(x) != self.n:
            raise DimensionMismatch(f"expected {self.n} coordinates, got {len(x)}")
        y = self._solve(x)
        if self.depth == 1:
            residual = max(abs(r) for r in self.F.eval(x + tuple(y)))
            if residual > self.options.tol_sys:
                raise NoConvergence(
                    f"assembled residual {residual:g} exceeds tol_sys "
                    f"{self.options.tol_sys:g}"
                )
        return y

    def _solve(self, x: tuple[float, ...]) -> Vector:
        if self.child is None:
            try:
                return Vector((self.scalar.solve_at(x),))
            except (OutsideBox, NoConvergence) as exc:
                exc.level = exc.level if exc.level is not None else self.depth
                raise
        z_rest = self.child._solve(x)
        try:
            z1 = self.scalar.solve_at(x + tuple(z_rest))
        except (OutsideBox, NoConvergence) as exc:
            exc.level = exc.level if exc.level is not None else self.depth
            raise
        z = (z1,) + tuple(z_rest)
        b = tuple(self.seed.y)
        dy = matvec(self.normalizer, vec_sub(z, b))
        return Vector(bv + dv for bv, dv in zip(b, dy))

    def jacobian_at(self, x: Sequence[float]) -> Matrix:
        """Jf(x) = -[dF/dy]^-1 [dF/dx] at (x, f(x)), blocks from exact partials."""
        x = tuple(float(v) for v in x)
        y = self.solve_at(x)
        full = self.F.jacobian(x + tuple(y))
        fx, fy = split_columns(full, self.n)
        return scale(matmul(inverse(fy), fx), -1.0)

    # -- box geometry ------------------------------------------------------

    def x_box(self) -> tuple[Vector, Vector]:
        """Intersection over all stack levels of the independent-box parts."""
        lo = list(self.scalar.box.x_lo[: self.n])
        hi = list(self.scalar.box.x_hi[: self.n])
        if self.child is not None:
            clo, chi = self.child.x_box()
            lo = [max(a, b) for a, b in zip(lo, clo)]
            hi = [min(a, b) for a, b in zip(hi, chi)]
        return Vector(lo), Vector(hi)

    def box_metadata(self) -> list[dict]:
        """Per-level box summary (JSON-friendly)."""
        box = self.scalar.box
        entry = {
            "level": self.depth,
            "x_lo": list(box.x_lo),
            "x_hi": list(box.x_hi),
            "y_interval": [box.y_lo, box.y_hi],
            "sign": box.sign,
            "grid_density": box.grid_density,
            "shrinks": box.shrinks,
            "normalizer": None if self.normalizer is None else self.normalizer.to_lists(),
        }
        rest = [] if self.child is None else self.child.box_metadata()
        return [entry] + rest

    def _sample_y(self, rng: random.Random) -> Vector:
        """Random point of the stack's dependent region: per-level scalar
        intervals mapped through the normalizers."""
        if self.child is None:
            return Vector((rng.uniform(self.scalar.box.y_lo, self.scalar.box.y_hi),))
        zlo = self.scalar.box.x_lo[self.n :]
        zhi = self.scalar.box.x_hi[self.n :]
        z_rest = tuple(self.child._sample_y(rng))
        for _ in range(1000):
            if all(lo < v < hi for lo, v, hi in zip(zlo, z_rest, zhi)):
                break
            z_rest = tuple(self.child._sample_y(rng))
        z1 = rng.uniform(self.scalar.box.y_lo, self.scalar.box.y_hi)
        z = (z1,) + z_rest
        b = tuple(self.seed.y)
        dy = matvec(self.normalizer, vec_sub(z, b))
        return Vector(bv + dv for bv, dv in zip(b, dy))

    def verify_uniqueness(
        self, x: Sequence[float], samples: int = 100000, rng_seed: int = 0
    ) -> "UniquenessReport":
        """Sample the dependent region and report every near-zero of F(x, .).

        Passes iff all points with componentwise residual <= tol_sys lie
        within 10 * tol_sys of solve_at(x). Also reports a scan-scale
        cluster analysis: points below a threshold tied to the best sampled
        residual must all fall within a first-order distance bound of the
        solver's answer, evidence that the scan sees a single zero cluster.
        """
        x = tuple(float(v) for v in x)
        y_star = self.solve_at(x)
        tol = self.options.tol_sys
        rng = random.Random(rng_seed)

        best_res = float("inf")
        best_point: Vector | None = None
        points = []
        for _ in range(samples):
            y = self._sample_y(rng)
            res = max(abs(r) for r in self.F.eval(x + tuple(y)))
            points.append((res, y))
            if res < best_res:
                best_res, best_point = res, y

        hits = [(res, y) for res, y in points if res <= tol]
        hit_dists = [vec_sub(y, y_star).norm() for _, y in hits]
        passed = all(d <= 10 * tol for d in hit_dists)

        threshold = max(tol, 10 * best_res)
        candidates = [(res, y) for res, y in points if res <= threshold]
        fy = split_columns(self.F.jacobian(x + tuple(y_star)), self.n)[1]
        cluster_bound = 2.0 * hs_norm(inverse(fy)) * threshold
        cand_dists = [vec_sub(y, y_star).norm() for _, y in candidates]
        max_candidate_distance = max(cand_dists) if cand_dists else 0.0
        single_cluster = bool(candidates) and max_candidate_distance <= cluster_bound

        return UniquenessReport(
            x=Vector(x),
            solution=y_star,
            samples=samples,
            rng_seed=rng_seed,
            hits=len(hits),
            max_hit_distance=max(hit_dists) if hit_dists else None,
            passed=passed,
            best_point=best_point,
            best_residual=best_res,
            threshold=threshold,
            candidates=len(candidates),
            cluster_bound=cluster_bound,
            max_candidate_distance=max_candidate_distance,
            single_cluster=single_cluster,
        )


@dataclass(frozen=True)
class UniquenessReport:
    x: Vector
    solution: Vector
    samples: int
    rng_seed: int
    hits: int
    max_hit_distance: float | None
    passed: bool
    best_point: Vector | None
    best_residual: float
    threshold: float
    candidates: int
    cluster_bound: float
    max_candidate_distance: float
    single_cluster: bool


def build_system(
    F, seed: SplitPoint, options: SolverOptions = SolverOptions(), _depth: int = 1
) -> SystemSolution:
    """Build the recursion stack for F(x, f(x)) = 0 at the seed (a, b).

    The base case m = 1 delegates to the scalar solver on F directly. For
    m > 1 the function is normalized at entry, the first equation is solved
    for its first dependent variable, and the reduced system recurses.
    """
    n, m = seed.n, seed.m
    if F.n_outputs != m or F.n_inputs != n + m:
        raise DimensionMismatch(
            f"need {m} components in {n + m} variables, got "
            f"{F.n_outputs} in {F.n_inputs}"
        )
    if _depth == 1 and m > options.max_depth:
        raise ValueError(
            f"dependent dimension {m} exceeds configured cap {options.max_depth}"
        )
    residual = max(abs(r) for r in F.eval(seed.point()))
    if residual > options.tol_seed:
        raise SeedNotOnZeroSet(residual, options.tol_seed)

    if m == 1:
        try:
            scalar = build_implicit(F, seed, options)
        except BoxNotFound as exc:
            exc.level = exc.level if exc.level is not None else _depth
            raise
        return SystemSolution(
            F=F,
            seed=seed,
            options=options,
            depth=_depth,
            scalar=scalar,
            normalizer=None,
            normalized=None,
            child=None,
        )

    G, j_inv = normalize(F, seed)
    perm = _phi_variable_perm(n, m)
    if isinstance(G, ExprFunction):
        phi_vars = [G.variables[i] for i in perm]
        g1 = G.component_function(0, phi_vars)
    else:
        g1 = _ComponentSlice(G, 0, perm)
    a = tuple(seed.x)
    b = tuple(seed.y)
    phi_seed = SplitPoint.of(a + b[1:], (b[0],))
    try:
        phi = build_implicit(g1, phi_seed, options)
    except BoxNotFound as exc:
        exc.level = exc.level if exc.level is not None else _depth
        raise

    reduced = _ReducedFunction(G, phi, n)
    inner_options = replace(
        options,
        h0=options.h0 * _INNER_H0_INSET,
        h0_dep=None if options.h0_dep is None else options.h0_dep * _INNER_H0_INSET,
    )
    child = build_system(reduced, SplitPoint.of(a, b[1:]), inner_options, _depth + 1)
    return SystemSolution(
        F=F,
        seed=seed,
        options=options,
        depth=_depth,
        scalar=phi,
        normalizer=j_inv,
        normalized=G,
        child=child,
    )
