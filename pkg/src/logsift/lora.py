"""Low-rank adapter arithmetic: delta = alpha * (A @ B) / rank, W' = W0 + delta.

Desk-scale numerics only: double precision, dense row-major matrices, no
training loop. The division by rank normalizes the update so capacity and
scale can be tuned independently (larger rank adds capacity without blowing
up magnitudes; alpha alone sets adaptation strength).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


class ShapeMismatch(DataError):
    pass


def _as_matrix(value, name: str) -> np.ndarray:
    m = np.asarray(value, dtype=float)
    if m.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-d, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class LoraAdapter:
    """Trainable pair A (d x r) and B (r x k) plus rank and scaling factor."""

    a: np.ndarray
    b: np.ndarray
    rank: int
    alpha: float

    def __post_init__(self):
        a = _as_matrix(self.a, "a")
        b = _as_matrix(self.b, "b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        if a.shape[1] != self.rank or b.shape[0] != self.rank:
            raise ShapeMismatch(
                f"a is {a.shape} and b is {b.shape}; both must share rank {self.rank}"
            )
        d, k = a.shape[0], b.shape[1]
        if self.rank > min(d, k):
            raise ValueError(f"rank {self.rank} exceeds min(d, k) = {min(d, k)}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.a.shape[0], self.b.shape[1])


def lora_delta(adapter: LoraAdapter) -> np.ndarray:
    """The low-rank update alpha * (A @ B) / rank, in double precision."""
    return (adapter.alpha / adapter.rank) * (adapter.a @ adapter.b)


def lora_apply(w0, adapter: LoraAdapter) -> np.ndarray:
    """Frozen-base update: returns W0 + delta without modifying W0."""
    base = np.asarray(w0, dtype=float)
    if base.ndim != 2 or base.shape != adapter.shape:
        raise ShapeMismatch(
            f"base weight is {base.shape}, adapter produces {adapter.shape}"
        )
    return base + lora_delta(adapter)


def elimination_rank(matrix, tol: float = 1e-9) -> int:
    """Numeric rank via Gaussian elimination with partial pivoting.

    Counts pivots larger than ``tol`` relative to the matrix's largest
    absolute entry.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2:
        raise ShapeMismatch(f"need a 2-d matrix, got shape {m.shape}")
    if m.size == 0:
        return 0
    scale = np.abs(m).max()
    if scale == 0.0:
        return 0
    threshold = tol * scale
    n_rows, n_cols = m.shape
    rank = 0
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        pivot = row + int(np.argmax(np.abs(m[row:, col])))
        if abs(m[pivot, col]) <= threshold:
            continue
        if pivot != row:
            m[[row, pivot]] = m[[pivot, row]]
        m[row + 1 :] -= np.outer(m[row + 1 :, col] / m[row, col], m[row])
        rank += 1
        row += 1
    return rank
