"""Symmetric tridiagonal eigenvalues by Sturm-sequence bisection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SymTridiagonal:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        if self.diag.ndim != 1 or self.off.ndim != 1 or len(self.off) != max(len(self.diag) - 1, 0):
            raise ValidationError("off-diagonal must have one entry fewer than the diagonal")

    @property
    def n(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.n)
        r[:-1] += np.abs(self.off)
        r[1:] += np.abs(self.off)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


class _Sturm:
    def __init__(self, m: SymTridiagonal):
        self.d = [float(x) for x in m.diag]
        self.e2 = [0.0] + [float(x) * float(x) for x in m.off]
        scale = max(np.max(np.abs(m.diag)), np.max(np.abs(m.off)) if m.n > 1 else 0.0, 1.0)
        self.pivmin = _EPS * _EPS * scale * scale * 10.0

    def count(self, x: float) -> int:
        """Number of eigenvalues strictly less than ``x`` (negative pivots of ``T - x I``)."""
        d, e2, pivmin = self.d, self.e2, self.pivmin
        neg = 0
        q = 1.0
        for i in range(len(d)):
            q = d[i] - x - e2[i] / q
            if abs(q) < pivmin:
                q = -pivmin
            if q < 0.0:
                neg += 1
        return neg


def count_below(matrix: SymTridiagonal, x: float) -> int:
    """Number of eigenvalues of ``matrix`` smaller than ``x``."""
    return _Sturm(matrix).count(x)


def eig_brackets(matrix: SymTridiagonal, count: int, rtol: float = 4 * _EPS) -> list[tuple[float, float]]:
    """Certified brackets ``[lo, hi]`` for the ``count`` smallest eigenvalues.

    Each bracket satisfies ``count_below(lo) <= k < count_below(hi)`` for its
    index ``k``, so it is guaranteed to contain the ``k``-th eigenvalue.
    """
    if count < 1 or count > matrix.n:
        raise ValidationError(f"count must be in [1, {matrix.n}], got {count}")
    sturm = _Sturm(matrix)
    lo0, hi0 = matrix.gershgorin()
    span = max(hi0 - lo0, 1.0)
    lo0 -= 2 * _EPS * span + sturm.pivmin
    hi0 += 2 * _EPS * span + sturm.pivmin
    out = []
    lo_k = lo0
    for k in range(count):
        lo, hi = lo_k, hi0
        while hi - lo > rtol * max(abs(lo), abs(hi)) + sturm.pivmin:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if sturm.count(mid) <= k:
                lo = mid
            else:
                hi = mid
        out.append((lo, hi))
        lo_k = lo
    return out


def lowest_eigs(matrix: SymTridiagonal, count: int, rtol: float = 4 * _EPS) -> list[float]:
    """The ``count`` smallest eigenvalues, non-decreasing, each to relative accuracy ``rtol``."""
    return [0.5 * (lo + hi) for lo, hi in eig_brackets(matrix, count, rtol)]
