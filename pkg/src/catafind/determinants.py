"""Nested determinant conditions for degenerate zeros of vector fields.

Builds, symbolically, the iterated Jacobian determinants in which a chosen
component of the field is replaced level by level with the previous
determinant, together with the extended (states + unfolding parameters)
determinants whose non-vanishing makes the conditions solvable with isolated
roots, and the subrank test on the Jacobian.
"""

from __future__ import annotations

import itertools
import threading

import numpy as np

from . import expr as ex
from .expr import Expression, Point, VectorField

DEFAULT_TOL_B = 1e-8
DEFAULT_TOL_G = 1e-6


def gradient(e: Expression, n: int, memo=None):
    """Row of derivatives of e with respect to the n state variables."""
    if memo is None:
        memo = {}
    return tuple(ex.differentiate(e, ex.var(j), memo) for j in range(n))


def jacobian(field: VectorField):
    """Matrix of symbolic entries d f_i / d x_j."""
    memo: dict = {}
    return tuple(gradient(c, field.n, memo) for c in field.components)


def sym_det(M) -> Expression:
    """Determinant of a square matrix of expressions.

    Cofactor expansion with memoized sub-minors; entries are shared
    hash-consed trees so repeated sub-minors are built once.
    """
    M = [tuple(row) for row in M]
    size = len(M)
    for row in M:
        if len(row) != size:
            raise ex.ExprError("sym_det needs a square matrix")
    if size == 0:
        return ex.ONE
    memo: dict = {}

    def minor(k: int, cols: tuple) -> Expression:
        if len(cols) == 1:
            return M[k][cols[0]]
        got = memo.get((k, cols))
        if got is not None:
            return got
        terms = []
        for j, c in enumerate(cols):
            entry = M[k][c]
            if entry is ex.ZERO:
                continue
            sub = minor(k + 1, cols[:j] + cols[j + 1:])
            term = ex.mul(entry, sub)
            terms.append(term if j % 2 == 0 else ex.neg(term))
        out = ex.add(*terms) if terms else ex.ZERO
        memo[(k, cols)] = out
        return out

    return minor(0, tuple(range(size)))


def index_strings(n: int, length: int):
    """All index strings of the given length with entries in 1..n."""
    return list(itertools.product(range(1, n + 1), repeat=length))


def _check_index_string(n: int, K) -> tuple:
    K = tuple(K)
    for k in K:
        if not 1 <= k <= n:
            raise IndexError(f"index string entry {k} outside 1..{n}")
    return K


class DeterminantSet:
    """Lazily built, cached expressions for the level determinants of a field.

    param_order selects which declared parameters act as the unfolding
    parameters (in order); by default the first r declared parameters.
    The cache is lock-protected; produced expressions are immutable.
    """

    def __init__(self, field: VectorField, param_order=None):
        self.field = field
        if param_order is None:
            param_order = tuple(range(field.r))
        self.param_order = tuple(param_order)
        for j in self.param_order:
            if not 0 <= j < field.r:
                raise IndexError(f"parameter index {j} outside declared range")
        if len(set(self.param_order)) != len(self.param_order):
            raise ValueError("param_order has repeated entries")
        self._lock = threading.RLock()
        self._b: dict = {}
        self._bmat: dict = {}
        self._g: dict = {}
        self._gmat: dict = {}
        self._diff_memo: dict = {}

    # -- B determinants ----------------------------------------------------

    def b_matrix(self, i: int, K=()):
        """The n x n Jacobian under the level-i determinant (i >= 1)."""
        if i < 1:
            raise IndexError("b_matrix needs level i >= 1")
        K = _check_index_string(self.field.n, K)
        if len(K) != i - 1:
            raise IndexError(f"level {i} needs an index string of length {i - 1}")
        with self._lock:
            got = self._bmat.get((i, K))
            if got is not None:
                return got
            comps = list(self.field.components)
            if i >= 2:
                comps[K[-1] - 1] = self.build_B(i - 1, K[:-1])
            n = self.field.n
            mat = tuple(gradient(c, n, self._diff_memo) for c in comps)
            self._bmat[(i, K)] = mat
            return mat

    def build_B(self, i: int, K=()) -> Expression:
        """Level-i determinant; level 0 is the first component itself."""
        if i < 0:
            raise IndexError("negative level")
        K = _check_index_string(self.field.n, K)
        if i == 0:
            if K:
                raise IndexError("level 0 takes an empty index string")
            return self.field.components[0]
        if len(K) != i - 1:
            raise IndexError(f"level {i} needs an index string of length {i - 1}")
        with self._lock:
            got = self._b.get((i, K))
            if got is None:
                got = sym_det(self.b_matrix(i, K))
                self._b[(i, K)] = got
            return got

    # -- G determinants ----------------------------------------------------

    def g_matrix(self, r: int, K=()):
        if r < 1:
            raise IndexError("g_matrix needs codimension r >= 1")
        if r > len(self.param_order):
            raise IndexError(
                f"codimension {r} exceeds the {len(self.param_order)} "
                "available unfolding parameters")
        K = _check_index_string(self.field.n, K)
        if len(K) != r - 1:
            raise IndexError(f"codimension {r} needs an index string of length {r - 1}")
        with self._lock:
            got = self._gmat.get((r, K))
            if got is not None:
                return got
            rows_src = list(self.field.components)
            for i in range(1, r + 1):
                rows_src.append(self.build_B(i, K[:i - 1]))
            cols = [ex.var(j) for j in range(self.field.n)]
            cols += [ex.par(self.param_order[i]) for i in range(r)]
            mat = tuple(
                tuple(ex.differentiate(e, c, self._diff_memo) for c in cols)
                for e in rows_src)
            self._gmat[(r, K)] = mat
            return mat

    def build_G(self, r: int, K=()) -> Expression:
        K = _check_index_string(self.field.n, K)
        with self._lock:
            got = self._g.get((r, K))
            if got is None:
                got = sym_det(self.g_matrix(r, K))
                self._g[(r, K)] = got
            return got

    # -- numeric evaluation with scale-aware thresholds ---------------------

    def b_at(self, i: int, K, p: Point, _memo=None):
        """(value, Hadamard scale) of the level-i determinant at p."""
        if _memo is None:
            _memo = {}
        value = ex.evaluate(self.build_B(i, K), p, _memo)
        if i == 0:
            return value, 1.0
        mat = eval_matrix(self.b_matrix(i, K), p, _memo)
        return value, hadamard_bound(mat)

    def g_at(self, r: int, K, p: Point, _memo=None):
        if _memo is None:
            _memo = {}
        value = ex.evaluate(self.build_G(r, K), p, _memo)
        mat = eval_matrix(self.g_matrix(r, K), p, _memo)
        return value, hadamard_bound(mat)


def eval_matrix(M, p: Point, memo=None) -> np.ndarray:
    if memo is None:
        memo = {}
    return np.array([[ex.evaluate(e, p, memo) for e in row] for row in M])


def hadamard_bound(A: np.ndarray) -> float:
    """Product of row 2-norms; an upper bound for |det A|."""
    return float(np.prod(np.linalg.norm(A, axis=1)))


def is_zero(value: float, scale: float, tol: float = DEFAULT_TOL_B) -> bool:
    return abs(value) <= tol * scale


def is_nonzero(value: float, scale: float, tol: float = DEFAULT_TOL_G) -> bool:
    return abs(value) > tol * scale


def numeric_rank(A: np.ndarray, tol: float = DEFAULT_TOL_B,
                 scale: float | None = None) -> int:
    """Rank as the count of row-echelon pivots above tol x largest row norm.

    scale overrides the reference row norm; pass the norm of a parent matrix
    when ranking a modified copy so near-zero noise rows stay below threshold.
    """
    A = np.array(A, dtype=float)
    if A.size == 0:
        return 0
    if scale is None:
        scale = float(np.max(np.linalg.norm(A, axis=1)))
    thresh = tol * scale
    m, n = A.shape
    rank = 0
    row = 0
    for col in range(n):
        if row >= m:
            break
        pivot = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[pivot, col]) <= thresh:
            continue
        A[[row, pivot]] = A[[pivot, row]]
        A[row + 1:] -= np.outer(A[row + 1:, col] / A[row, col], A[row])
        rank += 1
        row += 1
    return rank


def subrank(field: VectorField, p: Point, tol: float = DEFAULT_TOL_B) -> int:
    """Least rank of the Jacobian at p over deletions of one component row."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    J = eval_matrix(jacobian(field), p)
    scale = float(np.max(np.linalg.norm(J, axis=1)))
    best = None
    for j in range(field.n):
        Jz = J.copy()
        Jz[j, :] = 0.0
        r = numeric_rank(Jz, tol, scale=scale)
        best = r if best is None else min(best, r)
    return best


def condition_count(n: int, r: int) -> int:
    """Number of distinct (level, index string) pairs for levels 1..r."""
    return sum(n ** (i - 1) for i in range(1, r + 1))
