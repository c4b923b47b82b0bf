"""Area-regular zonal partitions of S^2 with closed-form diameters.

The sphere is cut into two polar caps and a stack of collars, each collar
sliced into equal longitude rectangles. Cap and collar boundaries are
carried in z = cos(theta), so every cell area is exactly 1/N in closed
form; the partition norm (largest cell diameter) then scales like
N^(-1/2).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import acos, cos, pi, sin, sqrt

import numpy as np

from .harmonics import check_sphere_dim

__all__ = [
    "Cell",
    "Partition",
    "equal_area_partition",
    "cell_area",
    "cell_diameter",
    "partition_norm",
    "cell_center",
    "locate",
]


@dataclass(frozen=True)
class Cell:
    """One partition cell: a polar cap or a collar rectangle.

    Bounded by colatitudes [theta0, theta1] and longitudes [phi0, phi1]
    (full circle for caps). The normalized area is
    (cos theta0 - cos theta1) (phi1 - phi0) / (4 pi).
    """

    kind: str  # "polar_cap" or "collar_rect"
    theta0: float
    theta1: float
    phi0: float
    phi1: float

    def __post_init__(self):
        if self.kind not in ("polar_cap", "collar_rect"):
            raise ValueError(f"unknown cell kind {self.kind!r}")
        if not (0.0 <= self.theta0 < self.theta1 <= pi + 1e-15):
            raise ValueError(f"bad colatitude range [{self.theta0}, {self.theta1}]")
        if not (0.0 <= self.phi1 - self.phi0 <= 2.0 * pi + 1e-12):
            raise ValueError(f"bad longitude range [{self.phi0}, {self.phi1}]")


@dataclass(frozen=True)
class Partition:
    """An area-regular partition of S^2 and its precomputed norm."""

    d: int
    cells: tuple[Cell, ...]
    norm: float
    # collar bookkeeping for O(log N) membership lookups
    z_bounds: np.ndarray  # z of band boundaries, descending, len = bands + 1
    band_counts: np.ndarray  # cells per band
    band_offsets: np.ndarray  # index of first cell in each band

    @property
    def n_cells(self) -> int:
        return len(self.cells)


def cell_area(c: Cell) -> float:
    """Normalized surface measure of the cell, in closed form."""
    return (cos(c.theta0) - cos(c.theta1)) * (c.phi1 - c.phi0) / (4.0 * pi)


def cell_diameter(c: Cell) -> float:
    """Largest geodesic distance between two points of the cell.

    Caps: the rim chord through the pole, capped at pi. Rectangles: the
    maximum of the corner diagonal at longitude gap min(dphi, pi) and the
    widest chord along the parallel closest to the equator.
    """
    if c.kind == "polar_cap":
        height = c.theta1 if c.theta0 == 0.0 else pi - c.theta0
        return min(2.0 * height, pi)
    g = min(c.phi1 - c.phi0, pi)
    diag = cos(c.theta0) * cos(c.theta1) + sin(c.theta0) * sin(c.theta1) * cos(g)
    t_star = min(max(pi / 2.0, c.theta0), c.theta1)
    chord = cos(t_star) ** 2 + sin(t_star) ** 2 * cos(g)
    return acos(max(-1.0, min(1.0, min(diag, chord))))


def partition_norm(cells) -> float:
    """Maximum cell diameter over a collection of cells."""
    return max(cell_diameter(c) for c in cells)


def _assemble(cells, z_bounds, band_counts) -> Partition:
    offsets = np.concatenate([[0], np.cumsum(band_counts[:-1])])
    return Partition(
        d=2,
        cells=tuple(cells),
        norm=partition_norm(cells),
        z_bounds=np.asarray(z_bounds, dtype=float),
        band_counts=np.asarray(band_counts, dtype=int),
        band_offsets=offsets.astype(int),
    )


def equal_area_partition(N: int, d: int = 2) -> Partition:
    """Partition S^2 into N cells of area exactly 1/N each.

    Two polar caps of area 1/N plus collars of height close to
    sqrt(4 pi / N); per-collar cell counts are rounded with a cumulative
    carry, then collar boundaries are re-derived in z so areas stay exact.
    Only d = 2 is supported.
    """
    check_sphere_dim(d)
    if d != 2:
        raise ValueError(f"equal-area partition requires d = 2, got d = {d}")
    if N < 1:
        raise ValueError(f"cell count must be >= 1, got {N}")
    if N == 1:
        cells = [Cell("polar_cap", 0.0, pi, 0.0, 2.0 * pi)]
        return _assemble(cells, [1.0, -1.0], [1])
    if N == 2:
        cells = [
            Cell("polar_cap", 0.0, pi / 2.0, 0.0, 2.0 * pi),
            Cell("polar_cap", pi / 2.0, pi, 0.0, 2.0 * pi),
        ]
        return _assemble(cells, [1.0, 0.0, -1.0], [1, 1])

    theta_cap = acos(1.0 - 2.0 / N)
    n_collars = max(1, round((pi - 2.0 * theta_cap) / sqrt(4.0 * pi / N)))
    height = (pi - 2.0 * theta_cap) / n_collars

    # ideal (real) cell counts per collar, rounded with carried discrepancy
    counts = []
    carry = 0.0
    for i in range(n_collars):
        lo = theta_cap + i * height
        hi = theta_cap + (i + 1) * height
        ideal = N * (cos(lo) - cos(hi)) / 2.0
        m = int(round(ideal + carry))
        carry += ideal - m
        counts.append(m)
    counts[-1] += (N - 2) - sum(counts)
    if min(counts) < 1:
        raise AssertionError(f"degenerate collar counts {counts} for N={N}")

    cells = [Cell("polar_cap", 0.0, theta_cap, 0.0, 2.0 * pi)]
    z_bounds = [1.0, 1.0 - 2.0 / N]
    z = 1.0 - 2.0 / N
    theta_prev = theta_cap
    for m in counts:
        z_next = z - 2.0 * m / N
        theta_next = acos(max(-1.0, min(1.0, z_next)))
        for k in range(m):
            cells.append(
                Cell(
                    "collar_rect",
                    theta_prev,
                    theta_next,
                    2.0 * pi * k / m,
                    2.0 * pi * (k + 1) / m,
                )
            )
        z_bounds.append(z_next)
        z, theta_prev = z_next, theta_next
    cells.append(Cell("polar_cap", theta_prev, pi, 0.0, 2.0 * pi))
    z_bounds.append(-1.0)
    return _assemble(cells, z_bounds, [1] + counts + [1])


def cell_center(c: Cell) -> np.ndarray:
    """Midpoint of the cell in (theta, phi); the pole for polar caps."""
    if c.kind == "polar_cap":
        return np.array([0.0, 0.0, 1.0 if c.theta0 == 0.0 else -1.0])
    theta = 0.5 * (c.theta0 + c.theta1)
    phi = 0.5 * (c.phi0 + c.phi1)
    return np.array(
        [sin(theta) * cos(phi), sin(theta) * sin(phi), cos(theta)]
    )


def locate(partition: Partition, x) -> int:
    """Index of the unique cell covering the unit point x.

    Band boundary ties go to the lower index (the more northern band);
    longitude lookups floor into bins, with the 2 pi wrap clipped into
    the band's last cell.
    """
    x = np.asarray(x, dtype=float)
    z = min(1.0, max(-1.0, x[2]))
    zb = partition.z_bounds
    # band i covers z in [zb[i+1], zb[i]]; ties at zb[i] belong to band i-1
    band = int(np.searchsorted(-zb, -z, side="left")) - 1
    band = min(max(band, 0), len(partition.band_counts) - 1)
    m = int(partition.band_counts[band])
    if m == 1:
        return int(partition.band_offsets[band])
    phi = np.arctan2(x[1], x[0]) % (2.0 * pi)
    k = min(int(phi / (2.0 * pi / m)), m - 1)
    return int(partition.band_offsets[band] + k)
