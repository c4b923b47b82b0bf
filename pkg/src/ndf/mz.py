"""Quadrature on S^2 and empirical discretization-inequality checks.

The checks compare cell-sampled averages of |P| and |grad P| against the
corresponding surface integrals. Neither integrand is a polynomial, so
integrals use a product quadrature of order 2m + quad_pad with a
doubled-order cross-check recorded on every report; the rules themselves
are exact on polynomials up to their stated degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil, pi, sqrt
from typing import Callable, NamedTuple

import numpy as np

from .harmonics import dim_harmonic, surface_area
from .partition import Partition, equal_area_partition
from .flow import (
    PolynomialHandle,
    poly_gradients,
    poly_values,
    quasi_uniform_points,
    random_polynomial,
)

__all__ = [
    "QuadratureRule",
    "MZReport",
    "Lemma1Result",
    "product_quadrature",
    "quadrature_integral",
    "mz_value_check",
    "mz_gradient_check",
    "mz_sweep",
    "lemma1_check",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Positive-weight rule with weights summing to 1 (mu-normalized)."""

    d: int
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        if self.d != 2:
            raise ValueError("product quadrature is implemented for d=2 only")
        if self.nodes.shape != (self.weights.size, 3):
            raise ValueError("nodes/weights shape mismatch")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-13:
            raise ValueError("weights must sum to 1")

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integral of f against normalized surface measure."""
        return float(self.weights @ np.asarray(f(self.nodes), dtype=float))


def product_quadrature(exact_degree: int) -> QuadratureRule:
    """Gauss-Legendre in z times uniform longitude, exact through the
    requested total degree on S^2."""
    if exact_degree < 1:
        raise ValueError(f"exact_degree must be >= 1, got {exact_degree}")
    n_z = ceil((exact_degree + 1) / 2)
    n_phi = exact_degree + 1
    z, w = np.polynomial.legendre.leggauss(n_z)
    phi = 2.0 * pi * np.arange(n_phi) / n_phi
    r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
    x = np.outer(r, np.cos(phi)).ravel()
    y = np.outer(r, np.sin(phi)).ravel()
    zz = np.repeat(z, n_phi)
    nodes = np.column_stack([x, y, zz])
    weights = np.repeat(w / 2.0 / n_phi, n_phi)
    return QuadratureRule(d=2, nodes=nodes, weights=weights,
                          exact_degree=exact_degree)


def quadrature_integral(f: Callable[[np.ndarray], np.ndarray],
                        order: int) -> tuple[float, float]:
    """Integral at the given order plus the doubled-order relative change."""
    base = product_quadrature(order).integrate(f)
    fine = product_quadrature(2 * order).integrate(f)
    denom = max(abs(fine), 1e-300)
    return base, abs(fine - base) / denom


@dataclass(frozen=True)
class MZReport:
    """One discretization-inequality measurement.

    The inequality sandwiches the node average between multiples of the
    integral, so a single scalar ratio (node average / integral) carries
    both sides; it is stored under both the lower and upper name, and
    passing means it lies inside the admissible interval. hypothesis_ok
    records whether the partition-norm smallness condition held; failures
    with hypothesis_ok=True are the interesting ones.
    """

    m: int
    partition_norm: float
    lower_ratio: float | None = None
    upper_ratio: float | None = None
    gradient_lower_ratio: float | None = None
    gradient_upper_ratio: float | None = None
    passed: bool = False
    hypothesis_ok: bool = False
    quad_cross_check: float | None = None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "partition_norm": self.partition_norm,
            "lower_ratio": self.lower_ratio,
            "upper_ratio": self.upper_ratio,
            "gradient_lower_ratio": self.gradient_lower_ratio,
            "gradient_upper_ratio": self.gradient_upper_ratio,
            "pass": self.passed,
            "hypothesis_ok": self.hypothesis_ok,
            "quad_cross_check": self.quad_cross_check,
        }


def _check_points_in_cells(partition: Partition, pts: np.ndarray,
                           slack: float = 1e-9) -> None:
    if pts.shape != (partition.n_cells, 3):
        raise ValueError(
            f"need one point per cell, expected {(partition.n_cells, 3)}, "
            f"got {pts.shape}")
    theta = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * pi)
    for i, cell in enumerate(partition.cells):
        if not (cell.theta0 - slack <= theta[i] <= cell.theta1 + slack):
            raise ValueError(f"point {i} outside cell {i} colatitude range")
        if cell.kind == "collar_rect":
            lo, hi = cell.phi0 - slack, cell.phi1 + slack
            ph = phi[i]
            if not (lo <= ph <= hi or lo <= ph - 2.0 * pi <= hi):
                raise ValueError(f"point {i} outside cell {i} longitude range")


def _mz_check(P: PolynomialHandle, partition: Partition, pts: np.ndarray,
              gradient: bool, r_d: float, quad_pad: int) -> MZReport:
    pts = np.asarray(pts, dtype=float)
    _check_points_in_cells(partition, pts)
    m = P.spec.t
    order = 2 * m + quad_pad

    if gradient:
        def f(x):
            return np.linalg.norm(poly_gradients(P, x), axis=1)
        root_d = sqrt(float(partition.d))
        lo, hi = 1.0 / (3.0 * root_d), 3.0 * root_d
        hypothesis_ok = partition.norm < r_d / (m + 1)
    else:
        def f(x):
            return np.abs(poly_values(P, x))
        lo, hi = 0.5, 1.5
        hypothesis_ok = partition.norm < r_d / m

    integral, cross = quadrature_integral(f, order)
    if integral < 1e-14:
        raise ValueError("integral below 1e-14; degenerate polynomial")
    ratio = float(np.mean(f(pts))) / integral
    passed = lo <= ratio <= hi
    if gradient:
        return MZReport(m=m, partition_norm=partition.norm,
                        gradient_lower_ratio=ratio,
                        gradient_upper_ratio=ratio,
                        passed=passed, hypothesis_ok=hypothesis_ok,
                        quad_cross_check=cross)
    return MZReport(m=m, partition_norm=partition.norm,
                    lower_ratio=ratio, upper_ratio=ratio,
                    passed=passed, hypothesis_ok=hypothesis_ok,
                    quad_cross_check=cross)


def mz_value_check(P: PolynomialHandle, partition: Partition,
                   pts: np.ndarray, r_d: float = 1.0,
                   quad_pad: int = 16) -> MZReport:
    """Node average of |P| against its integral; admissible [1/2, 3/2].

    Requires one point per cell, each inside its cell; the hypothesis
    flag records whether the partition norm is below r_d / m.
    """
    return _mz_check(P, partition, pts, gradient=False, r_d=r_d,
                     quad_pad=quad_pad)


def mz_gradient_check(P: PolynomialHandle, partition: Partition,
                      pts: np.ndarray, r_d: float = 1.0,
                      quad_pad: int = 16) -> MZReport:
    """Node average of |grad P| against its integral; admissible
    [1/(3 sqrt d), 3 sqrt d], hypothesis norm < r_d / (m+1)."""
    return _mz_check(P, partition, pts, gradient=True, r_d=r_d,
                     quad_pad=quad_pad)


def sample_cell_points(partition: Partition,
                       rng: np.random.Generator) -> np.ndarray:
    """One area-uniform random point inside each cell."""
    pts = np.empty((partition.n_cells, 3))
    for i, cell in enumerate(partition.cells):
        z0, z1 = np.cos(cell.theta0), np.cos(cell.theta1)  # z0 > z1
        z = rng.uniform(z1, z0)
        phi = rng.uniform(cell.phi0, cell.phi1)
        r = sqrt(max(1.0 - z * z, 0.0))
        pts[i] = (r * np.cos(phi), r * np.sin(phi), z)
    return pts


def mz_sweep(n_cells: int, cases: int, max_degree: int = 4, seed: int = 42,
             r_d: float = 1.0, quad_pad: int = 16) -> list[MZReport]:
    """Random (polynomial, points) sweep of both checks.

    Each case draws a degree in [1, max_degree], a random polynomial of
    that degree, and one uniform point per cell, then runs the value and
    gradient checks; reports alternate value/gradient in case order.
    """
    if cases < 1:
        raise ValueError(f"cases must be >= 1, got {cases}")
    partition = equal_area_partition(n_cells)
    rng = np.random.default_rng(seed)
    reports: list[MZReport] = []
    for _ in range(cases):
        m = int(rng.integers(1, max_degree + 1))
        P = random_polynomial(m, 2, seed=int(rng.integers(0, 2**31)))
        pts = sample_cell_points(partition, rng)
        reports.append(mz_value_check(P, partition, pts, r_d, quad_pad))
        reports.append(mz_gradient_check(P, partition, pts, r_d, quad_pad))
    return reports


class Lemma1Result(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def lemma1_check(P: PolynomialHandle) -> Lemma1Result:
    """L2 norm of a unit-gradient-integral polynomial against its bound.

    rhs = sqrt((d+1)/d * omega_d * D), D the full polynomial space
    dimension one degree up. For d=2 the lhs uses exact quadrature of
    P^2; higher d falls back to a quasi-uniform average.
    """
    if not P.boundary_normalized:
        raise ValueError("polynomial must be boundary-normalized")
    d, t = P.spec.d, P.spec.t
    if d == 2:
        rule = product_quadrature(2 * t + 2)
        lhs = sqrt(max(rule.integrate(lambda x: poly_values(P, x) ** 2), 0.0))
    else:
        x = quasi_uniform_points(1 << 14, d, seed=7)
        lhs = sqrt(max(float(np.mean(poly_values(P, x) ** 2)), 0.0))
    rhs = sqrt((d + 1) / d * surface_area(d) * dim_harmonic(t + 1, d + 1))
    return Lemma1Result(lhs=lhs, rhs=rhs, holds=lhs <= rhs)
