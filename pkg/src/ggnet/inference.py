"""Sign inference with the truncated exponential kernel ``sum_{i<=k} A^i / i!``."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import scipy.sparse as sp

from .games import CapacityError
from .graph import SignedGraph

MAX_ORDER = 12
DENSE_ORACLE_MAX_N = 500
# switch matrix powers to dense storage above this fill ratio
DENSIFY_AT = 0.25

_INV_FACTORIAL = np.array([1.0 / math.factorial(i) for i in range(MAX_ORDER + 1)])


@dataclass(frozen=True)
class ScoreMatrix:
    """Kernel scores ``matrix`` (sparse or dense ``n x n``) of order ``k``."""

    matrix: sp.csr_matrix | np.ndarray
    k: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    def entries(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        m = self.matrix
        if len(rows) == 0:
            return np.zeros(0)
        if sp.issparse(m):
            return np.asarray(m[rows, cols]).ravel()
        return m[rows, cols]


def _check_order(k: int) -> None:
    if not 0 <= k <= MAX_ORDER:
        raise ValueError(f"kernel order must lie in [0, {MAX_ORDER}], got {k}")


def exponential_kernel(adjacency, k: int) -> ScoreMatrix:
    """Truncated matrix exponential of order ``k`` using sparse products.

    Powers that fill more than a quarter of the matrix are carried on densely.
    """
    _check_order(k)
    a = sp.csr_matrix(adjacency, dtype=np.float64)
    n, m = a.shape
    if n != m:
        raise ValueError(f"adjacency must be square, got {a.shape}")
    result = sp.identity(n, format="csr", dtype=np.float64)
    power = result
    dense = False
    for i in range(1, k + 1):
        power = power @ a
        if not dense and sp.issparse(power) and power.nnz > DENSIFY_AT * n * n:
            power = power.toarray()
            result = result.toarray()
            dense = True
        result = result + _INV_FACTORIAL[i] * power
    if sp.issparse(result):
        result = sp.csr_matrix(result)
        result.sum_duplicates()
        result.eliminate_zeros()
    else:
        result = np.asarray(result)
    return ScoreMatrix(result, k)


def dense_kernel_oracle(adjacency, k: int) -> np.ndarray:
    """Reference kernel by naive dense repeated multiplication."""
    _check_order(k)
    a = np.asarray(adjacency.toarray() if sp.issparse(adjacency) else adjacency, dtype=np.float64)
    n = a.shape[0]
    if n > DENSE_ORACLE_MAX_N:
        raise CapacityError(f"dense oracle limited to n <= {DENSE_ORACLE_MAX_N}, got {n}")
    out = np.eye(n)
    power = np.eye(n)
    for i in range(1, k + 1):
        power = power @ a
        out = out + power / math.factorial(i)
    return out


@dataclass(frozen=True)
class PredictionSet:
    """Sign predictions over the edges of a skeleton.

    ``u``, ``v``, ``sign`` and ``strength`` hold one entry per predicted edge,
    sorted by ``(u, v)``; skeleton edges whose score is exactly zero are absent.
    """

    u: np.ndarray
    v: np.ndarray
    sign: np.ndarray
    strength: np.ndarray
    universe: int

    def __len__(self) -> int:
        return len(self.u)

    def records(self) -> list[tuple[int, int, int, float]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.sign.tolist(),
                        self.strength.tolist()))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(zip(zip(self.u.tolist(), self.v.tolist()), self.sign.tolist()))


def edge_scores(kernel: ScoreMatrix, skeleton: SignedGraph, symmetrize: bool = True) -> np.ndarray:
    """Score of each skeleton edge, aligned with ``skeleton.src``/``skeleton.dst``."""
    if kernel.n != skeleton.n:
        raise ValueError(f"kernel is {kernel.n}x{kernel.n}, skeleton has {skeleton.n} nodes")
    score = kernel.entries(skeleton.src, skeleton.dst)
    if symmetrize:
        score = score + kernel.entries(skeleton.dst, skeleton.src)
    return score


def predict_signs(kernel: ScoreMatrix, skeleton: SignedGraph, symmetrize: bool = True) -> PredictionSet:
    """Predict the sign of every skeleton edge from its kernel score.

    With ``symmetrize`` the score of ``(u, v)`` is ``K[u, v] + K[v, u]``,
    otherwise ``K[u, v]``. Zero scores leave the edge unpredicted.
    """
    score = edge_scores(kernel, skeleton, symmetrize)
    hit = score != 0
    return PredictionSet(
        u=skeleton.src[hit].copy(),
        v=skeleton.dst[hit].copy(),
        sign=np.sign(score[hit]).astype(np.int64),
        strength=np.abs(score[hit]),
        universe=skeleton.num_edges,
    )


def write_predictions(pred: PredictionSet, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["u", "v", "predicted_sign", "strength"])
    for u, v, s, w in pred.records():
        writer.writerow([u, v, s, repr(float(w))])


def read_predictions(stream: TextIO, universe: int) -> PredictionSet:
    rows = list(csv.DictReader(stream))
    return PredictionSet(
        u=np.array([int(r["u"]) for r in rows], dtype=np.int64),
        v=np.array([int(r["v"]) for r in rows], dtype=np.int64),
        sign=np.array([int(r["predicted_sign"]) for r in rows], dtype=np.int64),
        strength=np.array([float(r["strength"]) for r in rows]),
        universe=universe,
    )
