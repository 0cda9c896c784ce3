"""Singularity-symbol machinery: minor counting and explicit chains.

The number of minors needed to pin down each successive symbol entry grows
superfactorially; the counting recurrence here is exact (arbitrary-precision
integers).  For desk-scale instances the chain of extended maps is also
built explicitly, each stage appending every full-size minor of the previous
stage's Jacobian, so the symbol can be read off numerically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .expr import Point, VectorField
from . import determinants as det


class CapExceededError(RuntimeError):
    def __init__(self, predicted: int, cap: int):
        super().__init__(
            f"stage would hold {predicted} expressions, above the cap {cap}")
        self.predicted = predicted
        self.cap = cap


class ToleranceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MinorCount:
    """Exact per-stage counts of new minors for a corank sequence."""

    n: int
    corank_seq: tuple
    stage_counts: tuple  # N_1 .. N_r
    appendix_total: int  # sum_{j>=1} N_j
    table_total: int  # n + sum_{j>=1} N_j

    @property
    def cumulative(self) -> tuple:
        """Row counts of each stage, starting with N_0 = n."""
        out = [self.n]
        for c in self.stage_counts:
            out.append(out[-1] + c)
        return tuple(out)


def minor_count(n: int, corank_seq) -> MinorCount:
    """Count the new minors per stage: each stage j takes the
    (n - i_j + 1)-size minors of the gradient of everything so far."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    corank_seq = tuple(int(i) for i in corank_seq)
    for i in corank_seq:
        if not 1 <= i <= n:
            raise ValueError(f"corank entry {i} outside 1..{n}")
    counts = []
    cum = n
    for i in corank_seq:
        s = n - i + 1
        nj = math.comb(n, s) * math.comb(cum, s)
        counts.append(nj)
        cum += nj
    total = sum(counts)
    return MinorCount(n, corank_seq, tuple(counts), total, n + total)


def bg_condition_count(n: int, r: int) -> int:
    """Conditions needed for a codimension-r degenerate zero via the level
    determinants: the n field components plus the r determinants."""
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    return n + r


@dataclass(frozen=True)
class DeltaChain:
    base: VectorField  # parameter-free
    corank_seq: tuple
    stages: tuple  # stage j = components of the j-fold extended map

    @property
    def stage_sizes(self) -> tuple:
        return tuple(len(s) for s in self.stages)


def _stage_minors(stage, n: int, size: int, memo: dict):
    rows = [det.gradient(c, n, memo) for c in stage]
    minors = []
    for ridx in itertools.combinations(range(len(rows)), size):
        for cidx in itertools.combinations(range(n), size):
            sub = [[rows[i][j] for j in cidx] for i in ridx]
            minors.append(det.sym_det(sub))
    return minors


def build_delta_chain(field: VectorField, corank_seq, cap: int = 10_000) -> DeltaChain:
    """Explicit chain for a parameter-free field: stage j appends every
    (n - i_j + 1)-size minor of the gradient of stage j-1."""
    if field.r != 0:
        raise ValueError("fix the parameters numerically first")
    n = field.n
    counts = minor_count(n, corank_seq)
    predicted = counts.cumulative[-1]
    if predicted > cap:
        raise CapExceededError(predicted, cap)
    stages = [tuple(field.components)]
    memo: dict = {}
    for i in corank_seq:
        size = n - i + 1
        minors = _stage_minors(stages[-1], n, size, memo)
        stages.append(stages[-1] + tuple(minors))
    chain = DeltaChain(field, tuple(corank_seq), tuple(stages))
    assert chain.stage_sizes == counts.cumulative
    return chain


def _stage_corank(stage, n: int, p: Point, tol: float, memo: dict,
                  eval_memo: dict) -> int:
    rows = [det.gradient(c, n, memo) for c in stage]
    M = np.array([[ex.evaluate(e, p, eval_memo) for e in row] for row in rows])
    return n - det.numeric_rank(M, tol)


def boardman_symbol(field: VectorField, p: Point, max_depth: int = 4,
                    cap: int = 10_000, tol: float = det.DEFAULT_TOL_B) -> tuple:
    """Corank sequence of the iterated extended maps at p, terminating at
    the first zero.  The sequence is non-increasing by construction; an
    increase is reported as a numerical-tolerance failure."""
    if field.r != 0:
        raise ValueError("fix the parameters numerically first")
    n = field.n
    diff_memo: dict = {}
    eval_memo: dict = {}
    stage = tuple(field.components)
    symbol = []
    for _depth in range(max_depth):
        corank = _stage_corank(stage, n, p, tol, diff_memo, eval_memo)
        if corank == 0:
            break
        if symbol and corank > symbol[-1]:
            raise ToleranceError(
                f"symbol increased from {symbol[-1]} to {corank}; "
                "numerical tolerance failure")
        symbol.append(corank)
        predicted = minor_count(n, symbol).cumulative[-1]
        if predicted > cap:
            raise CapExceededError(predicted, cap)
        size = n - corank + 1
        stage = stage + tuple(_stage_minors(stage, n, size, diff_memo))
    return tuple(symbol)
