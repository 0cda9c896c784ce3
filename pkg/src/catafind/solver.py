"""Damped multistart Newton solver for degenerate-zero conditions.

Solves F = 0 together with the level determinants over states and unfolding
parameters, verifies fullness and subrank at each converged point,
classifies by codimension, and deduplicates roots.  Seeds come from a
deterministic Halton sequence (prime bases 2, 3, 5, ..., first 20 points
skipped), so repeated runs are reproducible without any RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .expr import Point, VectorField
from . import determinants as det

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

LABELS = {1: "fold", 2: "cusp", 3: "swallowtail", 4: "butterfly"}


def classify(r: int) -> str:
    if r < 1:
        raise ValueError("codimension must be >= 1")
    return LABELS.get(r, f"A_{r}")


@dataclass
class SolveOptions:
    max_iterations: int = 100
    residual_tol: float = 1e-12  # scaled by (1 + max-norm of the unknowns)
    damping: float = 0.5
    min_step: float = 1e-12
    seed_count: int = 256
    dedup_radius: float = 1e-6  # max-norm over (x, alpha)
    tol_b: float = det.DEFAULT_TOL_B
    tol_g: float = det.DEFAULT_TOL_G

    def __post_init__(self):
        if self.seed_count < 1 or self.max_iterations < 1:
            raise ValueError("counts must be >= 1")


@dataclass
class NewtonResult:
    status: str  # converged | max-iterations | singular-jacobian | step-underflow | evaluation-error
    point: Point | None
    residual: float
    iterations: int

    @property
    def ok(self) -> bool:
        return self.status == "converged"


@dataclass
class CatastropheReport:
    point: Point
    codim: int
    label: str
    residual: float
    b_values: tuple
    g_values: dict  # index string -> value
    g_scales: dict
    full: bool
    subrank: int
    subrank_ok: bool


@dataclass
class SteadyStateCensus:
    count: int
    states: tuple  # of (Point, stability label)


def halton(dim: int, count: int, skip: int = 20) -> np.ndarray:
    """Deterministic low-discrepancy points in [0, 1)^dim."""
    if dim > len(_PRIMES):
        raise ValueError(f"halton supports up to {len(_PRIMES)} dimensions")
    out = np.empty((count, dim))
    for d in range(dim):
        base = _PRIMES[d]
        for i in range(count):
            n = skip + 1 + i
            f, x = 1.0, 0.0
            while n > 0:
                f /= base
                x += f * (n % base)
                n //= base
            out[i, d] = x
    return out


class NewtonSystem:
    """A square system of expressions with its symbolic Jacobian, compiled
    once for fast repeated evaluation over many seeds."""

    def __init__(self, field: VectorField, eqs, unknowns):
        if len(eqs) != len(unknowns):
            raise ValueError("newton system must be square")
        self.field = field
        self.eqs = tuple(eqs)
        self.unknowns = tuple(unknowns)  # var/par expression nodes
        memo: dict = {}
        jac = [ex.differentiate(e, u, memo) for e in self.eqs for u in self.unknowns]
        self._fn = ex.compile_evaluator(list(self.eqs) + jac, field.n)
        self._m = len(self.eqs)
        self._slots = tuple(
            u.index if u.kind == ex.VAR else field.n + u.index for u in self.unknowns)

    def residual_and_jacobian(self, vals):
        out = self._fn(vals)
        m = self._m
        return (np.array(out[:m]), np.array(out[m:]).reshape(m, m))

    def residual(self, vals) -> float:
        out = self._fn(vals)
        return max(abs(v) for v in out[:self._m])

    def solve(self, start_vals, opts: SolveOptions) -> NewtonResult:
        vals = list(start_vals)
        m = self._m
        slots = self._slots
        n = self.field.n

        def as_point(v):
            return Point(tuple(float(t) for t in v[:n]),
                         tuple(float(t) for t in v[n:]))

        for it in range(opts.max_iterations):
            try:
                F, J = self.residual_and_jacobian(vals)
            except ZeroDivisionError:
                return NewtonResult("evaluation-error", None, np.inf, it)
            res = float(np.max(np.abs(F)))
            if not np.isfinite(res):
                return NewtonResult("evaluation-error", None, np.inf, it)
            scale = 1.0 + max(abs(vals[s]) for s in slots)
            if res <= opts.residual_tol * scale:
                return NewtonResult("converged", as_point(vals), res, it)
            try:
                step = np.linalg.solve(J, -F)
            except np.linalg.LinAlgError:
                return NewtonResult("singular-jacobian", as_point(vals), res, it)
            if not np.all(np.isfinite(step)):
                return NewtonResult("singular-jacobian", as_point(vals), res, it)
            t = 1.0
            accepted = False
            while t >= opts.min_step:
                trial = list(vals)
                for s, d in zip(slots, step):
                    trial[s] += t * d
                try:
                    tres = self.residual(trial)
                except ZeroDivisionError:
                    tres = np.inf
                if tres < res:
                    vals = trial
                    accepted = True
                    break
                t *= opts.damping
            if not accepted:
                return NewtonResult("step-underflow", as_point(vals), res, it)
        try:
            res = self.residual(vals)
        except ZeroDivisionError:
            return NewtonResult("evaluation-error", None, np.inf, opts.max_iterations)
        scale = 1.0 + max(abs(vals[s]) for s in slots)
        if res <= opts.residual_tol * scale:
            return NewtonResult("converged", as_point(vals), res, opts.max_iterations)
        return NewtonResult("max-iterations", as_point(vals), res, opts.max_iterations)


def newton_solve(field: VectorField, eqs, unknowns, start: Point,
                 opts: SolveOptions | None = None) -> NewtonResult:
    """Damped Newton iteration from a single start point."""
    opts = opts or SolveOptions()
    return NewtonSystem(field, eqs, unknowns).solve(list(start.vals()), opts)


def _dedup(solutions, radius):
    """Sort lexicographically then merge points within max-norm radius,
    keeping the smaller residual per cluster."""
    solutions = sorted(solutions, key=lambda s: tuple(s[0]))
    kept = []
    for vals, res in solutions:
        merged = False
        for i, (kvals, kres) in enumerate(kept):
            if max(abs(a - b) for a, b in zip(vals, kvals)) <= radius:
                if res < kres:
                    kept[i] = (vals, res)
                merged = True
                break
        if not merged:
            kept.append((vals, res))
    kept.sort(key=lambda s: tuple(s[0]))
    return kept


def _seed_values(box, count):
    box = [(float(lo), float(hi)) for lo, hi in box]
    for lo, hi in box:
        if not lo < hi:
            raise ValueError(f"empty seed interval [{lo}, {hi}]")
    pts = halton(len(box), count)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return lo + pts * (hi - lo)


def find_catastrophes(field: VectorField, r: int, box,
                      opts: SolveOptions | None = None, *,
                      fixed: dict | None = None,
                      param_order=None) -> list:
    """Multistart Newton on (F, B_1, ..., B_r) over (x, unfolding alphas).

    box: (lo, hi) per unknown, variables first then the r unfolding
    parameters.  fixed: values for the non-unfolding parameters (by name or
    index; unlisted ones stay at 0).  Non-full solutions are returned
    flagged, not discarded.
    """
    opts = opts or SolveOptions()
    if r < 1:
        raise ValueError("codimension must be >= 1")
    if r > field.r:
        raise ValueError(
            f"codimension {r} exceeds the field's {field.r} parameters")
    D = det.DeterminantSet(field, param_order=param_order)
    unknowns = [ex.var(j) for j in range(field.n)]
    unknowns += [ex.par(D.param_order[i]) for i in range(r)]
    if len(box) != len(unknowns):
        raise ValueError(f"box needs {len(unknowns)} intervals, got {len(box)}")
    eqs = list(field.components)
    eqs += [D.build_B(i, (1,) * (i - 1)) for i in range(1, r + 1)]
    system = NewtonSystem(field, eqs, unknowns)

    alpha0 = _resolve_fixed(field, fixed)
    template = list(tuple(0.0 for _ in range(field.n)) + alpha0)
    slots = system._slots

    hits = []
    for seed in _seed_values(box, opts.seed_count):
        vals = list(template)
        for s, v in zip(slots, seed):
            vals[s] = float(v)
        result = system.solve(vals, opts)
        if result.ok:
            hits.append((result.point.vals(), result.residual))

    reports = []
    for vals, res in _dedup(hits, opts.dedup_radius):
        p = Point(tuple(vals[:field.n]), tuple(vals[field.n:]))
        reports.append(build_report(D, r, p, res, opts))
    return reports


def build_report(D: det.DeterminantSet, r: int, p: Point, residual: float,
                 opts: SolveOptions | None = None) -> CatastropheReport:
    """Evaluate every fullness and degeneracy check at a solved point."""
    opts = opts or SolveOptions()
    field = D.field
    memo: dict = {}
    b_values = tuple(
        D.b_at(i, (1,) * (i - 1), p, memo)[0] for i in range(1, r + 1))
    g_values = {}
    g_scales = {}
    for K in det.index_strings(field.n, r - 1):
        gv, gs = D.g_at(r, K, p, memo)
        g_values[K] = gv
        g_scales[K] = gs
    full = all(
        det.is_nonzero(g_values[K], g_scales[K], opts.tol_g) for K in g_values)
    sr = det.subrank(field, p, opts.tol_b)
    return CatastropheReport(
        point=p, codim=r, label=classify(r), residual=residual,
        b_values=b_values, g_values=g_values, g_scales=g_scales,
        full=full, subrank=sr, subrank_ok=(sr == field.n - 1))


def _resolve_fixed(field: VectorField, fixed) -> tuple:
    alpha = [0.0] * field.r
    if fixed:
        for key, value in fixed.items():
            if isinstance(key, str):
                if key not in field.param_names:
                    raise ValueError(f"unknown parameter {key!r}")
                idx = field.param_names.index(key)
            else:
                idx = int(key)
                if not 0 <= idx < field.r:
                    raise ValueError(f"parameter index {idx} out of range")
            alpha[idx] = float(value)
    return tuple(alpha)


# ---------------------------------------------------------------------------
# steady states and stability

def _char_poly(A: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients by the trace recurrence."""
    n = A.shape[0]
    coeffs = [1.0]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


def eigenvalues(A: np.ndarray) -> np.ndarray:
    """Eigenvalues as roots of the characteristic polynomial (companion
    matrix root finding)."""
    A = np.asarray(A, dtype=float)
    if A.shape == (1, 1):
        return np.array([complex(A[0, 0])])
    return np.roots(_char_poly(A))


def stability_label(J: np.ndarray, tol: float = det.DEFAULT_TOL_B) -> str:
    eig = eigenvalues(J)
    re = eig.real
    im = eig.imag
    if np.all(re < -tol):
        return "attracting"
    if np.all(re > tol):
        return "repelling"
    if np.any(re > tol) and np.any(re < -tol):
        return "saddle"
    if np.any((np.abs(re) <= tol) & (np.abs(im) > tol)):
        return "center"
    return "degenerate"


def count_steady_states(field: VectorField, alpha, box,
                        opts: SolveOptions | None = None) -> SteadyStateCensus:
    """Multistart Newton on F = 0 in x alone, at fixed parameter values,
    with stability labels from the Jacobian eigenvalues."""
    opts = opts or SolveOptions()
    alpha = tuple(float(a) for a in alpha)
    if len(alpha) != field.r:
        raise ValueError(f"expected {field.r} parameter values")
    if len(box) != field.n:
        raise ValueError(f"box needs {field.n} intervals")
    unknowns = [ex.var(j) for j in range(field.n)]
    system = NewtonSystem(field, field.components, unknowns)
    hits = []
    for seed in _seed_values(box, opts.seed_count):
        vals = list(seed) + list(alpha)
        result = system.solve(vals, opts)
        if result.ok:
            x = result.point.x
            if all(lo - 10 * opts.dedup_radius <= xi <= hi + 10 * opts.dedup_radius
                   for xi, (lo, hi) in zip(x, box)):
                hits.append((x, result.residual))
    jac = det.jacobian(field)
    states = []
    for x, _res in _dedup(hits, opts.dedup_radius):
        p = Point(tuple(x), alpha)
        J = det.eval_matrix(jac, p)
        states.append((p, stability_label(J, opts.tol_b)))
    return SteadyStateCensus(count=len(states), states=tuple(states))
