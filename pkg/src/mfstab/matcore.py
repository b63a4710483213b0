"""Dense matrices, sample sets, the sampling operator, norms and RMSE.

Everything here is a pure function of its inputs. Sample sets are stored as
sorted linear (row-major) indices, which makes equality, hashing of results
and CSV output deterministic.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, ParseError

__all__ = [
    "SampleSet",
    "ObservedMatrix",
    "ProblemShape",
    "sample_uniform",
    "project_omega",
    "rmse",
    "norm",
    "read_triplets",
    "write_triplets",
    "read_dense",
    "write_dense",
]


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Observed index set of an ``m x n`` matrix.

    Parameters
    ----------
    shape : tuple of int
        ``(m, n)``.
    linear : array of int
        Row-major linear indices ``i * n + j``. Sorted and de-duplicated on
        construction; duplicates or out-of-range indices raise.
    """

    shape: tuple[int, int]
    linear: np.ndarray = field(repr=False)

    def __post_init__(self):
        m, n = (int(s) for s in self.shape)
        if m < 0 or n < 0:
            raise InvalidArgument(f"negative shape {self.shape}")
        lin = np.asarray(self.linear, dtype=np.int64).ravel()
        if lin.size:
            if lin.min() < 0 or lin.max() >= m * n:
                raise InvalidArgument("sample index outside matrix shape")
            lin = np.sort(lin)
            if np.any(lin[1:] == lin[:-1]):
                raise InvalidArgument("duplicate index pair in sample set")
        lin.setflags(write=False)
        object.__setattr__(self, "shape", (m, n))
        object.__setattr__(self, "linear", lin)

    @classmethod
    def from_pairs(cls, shape, rows, cols) -> "SampleSet":
        m, n = shape
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if rows.shape != cols.shape:
            raise InvalidArgument("rows and cols differ in length")
        if rows.size and (rows.min() < 0 or rows.max() >= m
                          or cols.min() < 0 or cols.max() >= n):
            raise InvalidArgument("sample index outside matrix shape")
        return cls((m, n), rows * n + cols)

    @classmethod
    def from_mask(cls, mask) -> "SampleSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise InvalidArgument("mask must be 2-D")
        return cls(mask.shape, np.flatnonzero(mask))

    @classmethod
    def full(cls, shape) -> "SampleSet":
        m, n = shape
        return cls((m, n), np.arange(m * n, dtype=np.int64))

    @property
    def rows(self) -> np.ndarray:
        return self.linear // self.shape[1] if self.shape[1] else self.linear

    @property
    def cols(self) -> np.ndarray:
        return self.linear % self.shape[1] if self.shape[1] else self.linear

    @property
    def mask(self) -> np.ndarray:
        out = np.zeros(self.shape[0] * self.shape[1], dtype=bool)
        out[self.linear] = True
        return out.reshape(self.shape)

    @property
    def rate(self) -> float:
        total = self.shape[0] * self.shape[1]
        return len(self) / total if total else 0.0

    def pairs(self):
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def __len__(self):
        return int(self.linear.size)

    def __contains__(self, pair):
        i, j = pair
        m, n = self.shape
        if not (0 <= i < m and 0 <= j < n):
            return False
        key = i * n + j
        pos = np.searchsorted(self.linear, key)
        return bool(pos < self.linear.size and self.linear[pos] == key)

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.linear, other.linear)

    def __hash__(self):
        return hash((self.shape, self.linear.tobytes()))


@dataclass(frozen=True, eq=False)
class ObservedMatrix:
    """Noisy ratings ``values`` observed on ``omega`` with rating bound ``k``.

    Entries of ``values`` outside ``omega`` are never read by consumers and may
    hold anything, including NaN.
    """

    values: np.ndarray = field(repr=False)
    omega: SampleSet
    k: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape != self.omega.shape:
            raise InvalidArgument(
                f"values shape {vals.shape} does not match sample set {self.omega.shape}"
            )
        if not self.k > 0:
            raise InvalidArgument("rating bound k must be positive")
        if not np.all(np.isfinite(vals.ravel()[self.omega.linear])):
            raise InvalidArgument("non-finite value at an observed entry")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "k", float(self.k))

    @property
    def shape(self):
        return self.omega.shape

    @property
    def observed(self) -> np.ndarray:
        """Observed values in the order of ``omega.linear``."""
        return self.values.ravel()[self.omega.linear]

    def zero_filled(self) -> np.ndarray:
        return project_omega(np.nan_to_num(self.values), self.omega)


@dataclass(frozen=True)
class ProblemShape:
    m: int
    n: int
    r: int
    p: float = 1.0

    @property
    def big(self) -> int:
        """The larger dimension, which the bounds call ``n``."""
        return max(self.m, self.n)

    @property
    def small(self) -> int:
        return min(self.m, self.n)


def sample_uniform(shape, count, seed=None) -> SampleSet:
    """Draw ``count`` distinct entries uniformly without replacement."""
    m, n = (int(s) for s in shape)
    total = m * n
    count = int(count)
    if not 0 <= count <= total:
        raise InvalidArgument(f"count {count} outside [0, {total}]")
    rng = np.random.default_rng(seed)
    # partial Fisher-Yates on linear indices
    return SampleSet((m, n), rng.permutation(total)[:count])


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise InvalidArgument(f"shape mismatch: {a.shape} vs {b.shape}")


def project_omega(X, omega: SampleSet) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != omega.shape:
        raise InvalidArgument(f"shape mismatch: {X.shape} vs {omega.shape}")
    out = np.zeros(X.size)
    out[omega.linear] = X.ravel()[omega.linear]
    return out.reshape(X.shape)


def rmse(A, B) -> float:
    """Frobenius distance normalised by ``sqrt(m * n)``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_same_shape(A, B)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A - B) / math.sqrt(A.size))


def norm(X, kind="frobenius") -> float:
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise InvalidArgument("non-finite entries")
    if X.size == 0:
        return 0.0
    if kind in ("frobenius", "fro"):
        return float(np.linalg.norm(X))
    if kind in ("spectral", 2):
        if X.ndim == 1:
            return float(np.linalg.norm(X))
        return float(np.linalg.svd(X, compute_uv=False)[0])
    raise InvalidArgument(f"unknown norm kind {kind!r}")


# ---------------------------------------------------------------- CSV i/o

def write_triplets(path, obs: ObservedMatrix):
    """Write observed entries as ``row,col,value`` lines with a header."""
    with open(path, "w", newline="") as fh:
        fh.write("row,col,value\n")
        for i, j, v in zip(obs.omega.rows.tolist(), obs.omega.cols.tolist(),
                           obs.observed.tolist()):
            fh.write(f"{i},{j},{v!r}\n")


def read_triplets(path, shape=None, k=None) -> ObservedMatrix:
    """Parse a triplet CSV into an :class:`ObservedMatrix`.

    ``shape`` defaults to one past the largest indices seen; ``k`` defaults to
    the largest observed magnitude (or 1 for an all-zero file).
    """
    rows, cols, vals = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["row", "col", "value"]:
            raise ParseError("expected header 'row,col,value'", line=1)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != 3:
                raise ParseError(f"expected 3 fields, got {len(rec)}", line=lineno)
            try:
                i, j, v = int(rec[0]), int(rec[1]), float(rec[2])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if i < 0 or j < 0:
                raise ParseError("negative index", line=lineno)
            if not math.isfinite(v):
                raise ParseError("non-finite value", line=lineno)
            rows.append(i)
            cols.append(j)
            vals.append(v)
    if shape is None:
        shape = (max(rows, default=-1) + 1, max(cols, default=-1) + 1)
    m, n = shape
    if rows and (max(rows) >= m or max(cols) >= n):
        raise ParseError(f"index outside declared shape {shape}")
    values = np.zeros((m, n))
    values[rows, cols] = vals
    try:
        omega = SampleSet.from_pairs((m, n), rows, cols)
    except InvalidArgument as exc:
        raise ParseError(str(exc)) from None
    if k is None:
        k = max((abs(v) for v in vals), default=0.0) or 1.0
    return ObservedMatrix(values, omega, k)


def write_dense(path, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w", newline="") as fh:
        for row in X:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_dense(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(f) for f in line.split(",")])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if rows and len({len(r) for r in rows}) != 1:
        raise ParseError("ragged dense CSV")
    return np.array(rows, dtype=float)
