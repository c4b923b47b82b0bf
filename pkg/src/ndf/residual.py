"""Weyl-sum design residual, its gradient, and independent certification.

A point multiset is a spherical t-design exactly when the kernel sums
sum_j k_t(p_j, .) vanish; the squared norm of that sum is the residual
minimized by the optimizer. Certification cross-checks the residual
against exact closed-form integrals of monomials, an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import gamma

import numpy as np

from ._kernels import pair_gradient, pair_legendre_sums
from .harmonics import (
    check_sphere_dim,
    degree_dims,
    dim_space,
    surface_area,
)

__all__ = [
    "Configuration",
    "DesignCertificate",
    "DesignInconsistencyError",
    "weyl_residual",
    "nested_residual",
    "residual_gradient",
    "monomial_integral",
    "monomial_multi_indices",
    "oracle_max_deviation",
    "certify_design",
]


class DesignInconsistencyError(RuntimeError):
    """Kernel residual and monomial oracle disagree far beyond tolerance.

    Signals an implementation bug (the two computations certify the same
    property), not a user error.
    """


@dataclass(frozen=True)
class Configuration:
    """A fixed point set plus free extension candidates on the same sphere.

    Multiset semantics: duplicate points are permitted. All points must be
    unit vectors (within 1e-9; constructing operations elsewhere guarantee
    1e-12).
    """

    d: int
    fixed: np.ndarray = field(default=None)
    free: np.ndarray = field(default=None)

    def __post_init__(self):
        d = check_sphere_dim(self.d)
        object.__setattr__(self, "d", d)
        for name in ("fixed", "free"):
            arr = getattr(self, name)
            if arr is None:
                arr = np.zeros((0, d + 1))
            arr = np.atleast_2d(np.asarray(arr, dtype=float))
            if arr.size == 0:
                arr = arr.reshape(0, d + 1)
            if arr.shape[1] != d + 1:
                raise ValueError(
                    f"{name} points must have {d + 1} coordinates, "
                    f"got shape {arr.shape}"
                )
            norms = np.linalg.norm(arr, axis=1)
            if arr.shape[0] and np.abs(norms - 1.0).max() > 1e-9:
                raise ValueError(f"{name} points must be unit vectors")
            object.__setattr__(self, name, arr)

    @property
    def n_fixed(self) -> int:
        return self.fixed.shape[0]

    @property
    def n_free(self) -> int:
        return self.free.shape[0]

    @property
    def n_points(self) -> int:
        return self.n_fixed + self.n_free

    def points(self) -> np.ndarray:
        """All points, fixed first then free."""
        return np.vstack([self.fixed, self.free])


@dataclass
class DesignCertificate:
    """Residual and oracle evidence that a configuration is a t-design.

    ``total_residual`` is the squared norm of the summed kernel sections;
    ``per_degree`` holds its degree-wise split (indexed l = 1..t);
    ``normalized_residual`` is the scale-free form total / (omega_d N^2).
    Oracle fields stay None until certification runs. Tiny negative values
    can appear in place of exact zeros: the pairwise sums cancel
    catastrophically at a design, leaving float noise of either sign.
    """

    t: int
    d: int
    n_points: int
    total_residual: float
    per_degree: np.ndarray
    normalized_residual: float
    oracle_max_deviation: float | None = None
    is_design: bool | None = None
    tol: float | None = None

    def to_dict(self) -> dict:
        out = {
            "t": self.t,
            "d": self.d,
            "n_points": self.n_points,
            "total_residual": self.total_residual,
            "degrees": list(range(1, self.t + 1)),
            "per_degree": [float(v) for v in self.per_degree],
            "normalized_residual": self.normalized_residual,
        }
        if self.oracle_max_deviation is not None:
            out["oracle_max_deviation"] = self.oracle_max_deviation
        if self.is_design is not None:
            out["is_design"] = bool(self.is_design)
        if self.tol is not None:
            out["tol"] = self.tol
        return out


def weyl_residual(t: int, cfg: Configuration) -> DesignCertificate:
    """Squared norm of the summed kernel sections over all points of cfg.

    total = omega_d * sum_{i,j} k_t(p_i, p_j), split per degree; vanishes
    (up to float noise) exactly on spherical t-designs.
    """
    if t < 1:
        raise ValueError(f"degree must be >= 1, got {t}")
    if cfg.n_points == 0:
        raise ValueError("empty configuration")
    pts = cfg.points()
    omega = surface_area(cfg.d)
    sums = pair_legendre_sums(pts, t, cfg.d)
    dims = degree_dims(t, cfg.d)
    per_degree = omega * dims[1:] * sums[1:]
    total = float(per_degree.sum())
    return DesignCertificate(
        t=t,
        d=cfg.d,
        n_points=cfg.n_points,
        total_residual=total,
        per_degree=per_degree,
        normalized_residual=total / (omega * cfg.n_points**2),
    )


def nested_residual(t: int, cfg: Configuration) -> DesignCertificate:
    """Residual of the union fixed + free, treating fixed as given.

    Numerically identical to ``weyl_residual`` on the union; it exists as
    a named operation because its gradient counterpart differentiates only
    with respect to the free points. When the fixed set alone is a
    t1-design, the per-degree entries for l <= t1 vanish.
    """
    return weyl_residual(t, cfg)


def residual_gradient(t: int, cfg: Configuration) -> np.ndarray:
    """Tangential gradient of total_residual for each free point.

    grad_i = 2 omega_d sum_{j != i} sum_l D(l,d) P'_{l,d}(s_ij)
             (p_j - s_ij p_i), orthogonal to p_i by construction. Fixed
    points receive no gradient.
    """
    if t < 1:
        raise ValueError(f"degree must be >= 1, got {t}")
    if cfg.n_points == 0:
        raise ValueError("empty configuration")
    if cfg.n_free == 0:
        return np.zeros((0, cfg.d + 1))
    pts = cfg.points()
    dims = degree_dims(t, cfg.d)
    return 2.0 * surface_area(cfg.d) * pair_gradient(pts, cfg.n_fixed, dims)


def monomial_integral(alpha, d: int) -> float:
    """Exact integral of x^alpha over S^d against the normalized measure.

    Zero when any exponent is odd; otherwise
    (2 / omega_d) * prod Gamma((a_i+1)/2) / Gamma((|a|+d+1)/2).
    """
    d = check_sphere_dim(d)
    alpha = [int(a) for a in alpha]
    if len(alpha) != d + 1:
        raise ValueError(f"multi-index must have length {d + 1}, got {alpha}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index entries must be >= 0, got {alpha}")
    if any(a % 2 for a in alpha):
        return 0.0
    num = 2.0
    for a in alpha:
        num *= gamma((a + 1) / 2.0)
    return num / (surface_area(d) * gamma((sum(alpha) + d + 1) / 2.0))


def monomial_multi_indices(t: int, d: int) -> list[tuple[int, ...]]:
    """All exponent multi-indices with 1 <= |alpha| <= t over d+1 variables."""
    out = []
    for total in range(1, t + 1):
        for combo in combinations_with_replacement(range(d + 1), total):
            out.append(tuple(combo.count(i) for i in range(d + 1)))
    return out


def oracle_max_deviation(t: int, cfg: Configuration) -> float:
    """Worst monomial quadrature error of the equal-weight rule on cfg.

    max over |alpha| <= t of |mean_i p_i^alpha - integral of x^alpha|.
    The |alpha| = 0 term is identically zero and omitted.
    """
    pts = cfg.points()
    dev = 0.0
    for alpha in monomial_multi_indices(t, cfg.d):
        emp = np.prod(pts ** np.asarray(alpha), axis=1).mean()
        dev = max(dev, abs(emp - monomial_integral(alpha, cfg.d)))
    return dev


def certify_design(t: int, cfg: Configuration, tol: float) -> DesignCertificate:
    """Certify cfg as a spherical t-design by two independent checks.

    is_design requires both the normalized kernel residual and the worst
    monomial deviation to be <= tol. If one check passes while the other
    exceeds 10x tol, the two computations contradict each other beyond
    anything attributable to rounding and a DesignInconsistencyError is
    raised.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be > 0, got {tol}")
    cert = weyl_residual(t, cfg)
    dev = oracle_max_deviation(t, cfg)
    residual_ok = cert.normalized_residual <= tol
    oracle_ok = dev <= tol
    if residual_ok and dev > 10.0 * tol:
        raise DesignInconsistencyError(
            f"kernel residual {cert.normalized_residual:.3e} <= tol but "
            f"monomial deviation {dev:.3e} > 10x tol"
        )
    if oracle_ok and cert.normalized_residual > 10.0 * tol:
        raise DesignInconsistencyError(
            f"monomial deviation {dev:.3e} <= tol but kernel residual "
            f"{cert.normalized_residual:.3e} > 10x tol"
        )
    cert.oracle_max_deviation = dev
    cert.is_design = bool(residual_ok and oracle_ok)
    cert.tol = tol
    return cert
