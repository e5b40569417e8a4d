"""Exact spectrum of the monopole Laplacian and a finite-difference oracle for it.

In the North gauge the Fourier mode ``u(theta) e^{i m phi}`` of ``Delta^{L^N}``
satisfies the radial problem::

    -(1/sin) d/dtheta (sin du/dtheta) + (m - N B (1 - cos theta))^2 / sin^2 u = lambda u

which is discretized on the cell-centred grid ``theta_i = (i + 1/2) pi / n``
with face weights ``sin(theta_{i +- 1/2})``.  The face weights vanish at the
poles, so no boundary values are needed.  With ``v = sqrt(sin theta) u`` the
matrix is symmetric tridiagonal and its lowest eigenvalues are found by Sturm
bisection (:mod:`monopole_wkb.tridiag`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .geometry import GaugePatch
from .quantization import lambda_hat
from .tridiag import SymTridiagonal, count_below, lowest_eigs


class GridWarning(UserWarning):
    pass


class MultiplicityWarning(UserWarning):
    pass


def lambda_exact(N: int, j: int) -> Fraction:
    """Exact eigenvalue ``j(j+1) + N(2j+1)/2`` of ``Delta^{L^N}`` (``B = 1/2``)."""
    if int(N) != N or N < 1 or int(j) != j or j < 0:
        raise ValidationError(f"need N >= 1 and j >= 0, got N={N!r}, j={j!r}")
    return Fraction(j * (j + 1)) + Fraction(N * (2 * j + 1), 2)


def multiplicity_exact(N: int, j: int) -> int:
    if int(N) != N or N < 1 or int(j) != j or j < 0:
        raise ValidationError(f"need N >= 1 and j >= 0, got N={N!r}, j={j!r}")
    return N + 2 * j + 1


@dataclass(frozen=True)
class SpectralLine:
    N: int
    j: int
    lambda_exact: float
    lambda_hat: float
    mult: int
    lambda_numeric: float | None = None
    numeric_error: float | None = None
    mult_numeric: int | None = None


@dataclass(frozen=True)
class RadialGrid:
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValidationError("a radial grid needs at least two points")

    @property
    def spacing(self) -> float:
        return math.pi / self.n_points

    @property
    def theta_values(self) -> np.ndarray:
        return (np.arange(self.n_points) + 0.5) * self.spacing


def _potential(N: int, B: float, m: int, theta: np.ndarray, patch: GaugePatch) -> np.ndarray:
    b = N * B
    if patch is GaugePatch.NORTH:
        q = m - b * (1.0 - np.cos(theta))
    else:
        q = m + b * (1.0 + np.cos(theta))
    return q * q / np.sin(theta) ** 2


def radial_matrix(N: int, B: float, m: int, grid: RadialGrid,
                  patch: GaugePatch | str = GaugePatch.NORTH) -> SymTridiagonal:
    """Symmetric finite-volume matrix of the mode-``m`` radial operator.

    ``m`` is the Fourier index in the chosen gauge; the South-gauge mode
    ``m - 2 N B`` represents the same section as North mode ``m``.
    """
    patch = GaugePatch.parse(patch)
    if grid.n_points < 16:
        warnings.warn(f"radial grid with {grid.n_points} points is too coarse", GridWarning, stacklevel=2)
    n, h = grid.n_points, grid.spacing
    theta = grid.theta_values
    s = np.sin(theta)
    faces = np.sin(np.arange(n + 1) * h)
    faces[0] = faces[-1] = 0.0
    diag = (faces[1:] + faces[:-1]) / (s * h * h) + _potential(N, B, m, theta, patch)
    off = -faces[1:-1] / (np.sqrt(s[:-1] * s[1:]) * h * h)
    return SymTridiagonal(diag, off)


def numeric_spectrum(N: int, B: float, m_range: Iterable[int], grid: RadialGrid,
                     count_per_m: int) -> list[tuple[float, int]]:
    """Union over ``m`` of the ``count_per_m`` lowest radial eigenvalues, as sorted ``(value, m)``."""
    out = []
    for m in m_range:
        for val in lowest_eigs(radial_matrix(N, B, m, grid), count_per_m):
            out.append((val, m))
    out.sort()
    return out


def count_eigenvalues_below(N: int, B: float, threshold: float, grid: RadialGrid,
                            m_range: Iterable[int]) -> int:
    """Number of discrete eigenvalues below ``threshold`` summed over the modes in ``m_range``."""
    return sum(count_below(radial_matrix(N, B, m, grid), threshold) for m in m_range)


@dataclass(frozen=True)
class Cluster:
    value: float
    members: tuple[float, ...]
    modes: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def discretization_error_estimate(value: float, grid: RadialGrid) -> float:
    """Crude a-priori bound ``|lambda| h^2`` for the second-order radial scheme."""
    return abs(value) * grid.spacing ** 2


def cluster_spectrum(values: Sequence[tuple[float, int]], grid: RadialGrid,
                     safety: float = 10.0) -> list[Cluster]:
    """Group numerically degenerate eigenvalues.

    Consecutive values join a cluster when their gap is below ``safety`` times
    the estimated discretization error.
    """
    clusters: list[list[tuple[float, int]]] = []
    for val, m in sorted(values):
        if clusters and val - clusters[-1][-1][0] <= safety * discretization_error_estimate(val, grid):
            clusters[-1].append((val, m))
        else:
            clusters.append([(val, m)])
    return [Cluster(value=float(np.mean([v for v, _ in c])), members=tuple(v for v, _ in c),
                    modes=tuple(m for _, m in c)) for c in clusters]


def numeric_table(N: int, j_max: int, grid: RadialGrid, B: float = 0.5,
                  m_range: Sequence[int] | None = None) -> list[SpectralLine]:
    """Exact versus finite-difference spectrum for ``j = 0..j_max``.

    By default the modes ``m = -j_max .. N + j_max`` are solved, which are exactly
    those carrying the levels ``j <= j_max``.
    """
    if m_range is None:
        m_range = range(-j_max, N + j_max + 1)
    m_range = list(m_range)
    values = numeric_spectrum(N, B, m_range, grid, count_per_m=j_max + 1)
    clusters = cluster_spectrum(values, grid)
    lines = []
    for j in range(j_max + 1):
        exact = float(lambda_exact(N, j))
        best = min(clusters, key=lambda c: abs(c.value - exact))
        mult = multiplicity_exact(N, j)
        if best.size < mult:
            warnings.warn(f"cluster for j={j} has {best.size} of {mult} members; widen m_range",
                          MultiplicityWarning, stacklevel=2)
        lines.append(SpectralLine(N=N, j=j, lambda_exact=exact, lambda_hat=float(lambda_hat(N, j)), mult=mult,
                                  lambda_numeric=best.value, numeric_error=abs(best.value - exact),
                                  mult_numeric=best.size))
    return lines


def exact_table(N: int, j_max: int) -> list[SpectralLine]:
    return [SpectralLine(N=N, j=j, lambda_exact=float(lambda_exact(N, j)), lambda_hat=float(lambda_hat(N, j)),
                         mult=multiplicity_exact(N, j)) for j in range(j_max + 1)]


def convergence_order(errors: Sequence[float]) -> list[float]:
    """Observed orders ``log2(e_k / e_{k+1})`` for errors on successively halved grids."""
    return [math.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]


def apply_radial_operator(N: int, B: float, m: int, theta: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Apply the mode-``m`` radial operator to samples ``f`` on a uniform grid ``theta``.

    Same flux stencil as :func:`radial_matrix`; ``f`` is taken to vanish just
    outside the grid.
    """
    theta = np.asarray(theta, dtype=float)
    f = np.asarray(f)
    if theta.ndim != 1 or theta.shape != f.shape or len(theta) < 3:
        raise ValidationError("theta and f must be matching 1-D arrays with at least 3 samples")
    h = theta[1] - theta[0]
    if not np.allclose(np.diff(theta), h, rtol=1e-9, atol=0.0):
        raise ValidationError("apply_radial_operator needs a uniform grid")
    s = np.sin(theta)
    s_plus = np.sin(theta + 0.5 * h)
    s_minus = np.sin(theta - 0.5 * h)
    padded = np.concatenate(([0.0], f, [0.0]))
    flux = s_plus * (padded[2:] - padded[1:-1]) - s_minus * (padded[1:-1] - padded[:-2])
    return -flux / (s * h * h) + _potential(N, B, m, theta, GaugePatch.NORTH) * f
