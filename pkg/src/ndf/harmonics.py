"""Dimension counts, Legendre recurrences, and the reproducing kernel on S^d.

Individual spherical harmonics are never materialized; every quantity that
involves them is collapsed through the addition formula into sums of
Legendre (Gegenbauer-normalized) polynomial values, which keeps everything
dimension-generic.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, gamma, pi

import numpy as np

__all__ = [
    "KernelSpec",
    "check_sphere_dim",
    "dim_harmonic",
    "dim_space",
    "surface_area",
    "legendre_eval",
    "legendre_values",
    "legendre_values_and_derivs",
    "degree_dims",
    "kernel_eval",
    "kernel_grad",
    "clamp_inner",
]


def check_sphere_dim(d) -> int:
    """Validate a sphere dimension (ambient dimension is d+1)."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise TypeError(f"sphere dimension must be an integer, got {d!r}")
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    return int(d)


def dim_harmonic(ell: int, d: int) -> int:
    """Dimension of the degree-``ell`` spherical harmonics on S^d.

    Evaluates the closed form (2l+d-1)/(l+d-1) * C(l+d-1, l) for l >= 1
    and 1 for l = 0, in exact integer arithmetic. Python integers are
    unbounded, so overflow cannot occur silently.
    """
    d = check_sphere_dim(d)
    if ell < 0:
        raise ValueError(f"harmonic degree must be >= 0, got {ell}")
    if ell == 0:
        return 1
    num = (2 * ell + d - 1) * comb(ell + d - 1, ell)
    quot, rem = divmod(num, ell + d - 1)
    if rem:  # the closed form is always divisible; guard against misuse
        raise ArithmeticError(f"non-integer harmonic dimension for {(ell, d)}")
    return quot


def dim_space(t: int, d: int) -> int:
    """Dimension D_t of the zero-mean polynomial space of degree <= t on S^d.

    Equals sum of dim_harmonic(l, d) for l = 1..t, and also
    dim_harmonic(t, d+1) - 1 by the summation identity.
    """
    d = check_sphere_dim(d)
    if t < 1:
        raise ValueError(f"degree must be >= 1, got {t}")
    return sum(dim_harmonic(ell, d) for ell in range(1, t + 1))


def surface_area(d: int) -> float:
    """Surface area of S^d: 2 pi^((d+1)/2) / Gamma((d+1)/2)."""
    d = check_sphere_dim(d)
    return 2.0 * pi ** ((d + 1) / 2.0) / gamma((d + 1) / 2.0)


def clamp_inner(s):
    """Clamp inner products of unit vectors into [-1, 1].

    Dot products of unit vectors may exceed 1 in magnitude by rounding;
    values beyond 1 + 1e-12 indicate non-unit inputs and are rejected.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) > 1.0 + 1e-12):
        raise ValueError("inner product outside [-1-1e-12, 1+1e-12]")
    clipped = np.clip(s_arr, -1.0, 1.0)
    return float(clipped) if np.isscalar(s) or s_arr.ndim == 0 else clipped


def legendre_eval(ell: int, d: int, s: float) -> tuple[float, float]:
    """Value and derivative of the Legendre polynomial P_{ell,d} at s.

    Normalization P_{ell,d}(1) = 1; upward three-term recurrence
    (l+d-1) P_{l+1} = (2l+d-1) s P_l - l P_{l-1}, seeded P_0 = 1, P_1 = s.
    The derivative follows the differentiated recurrence. For d = 2 this is
    the classical Legendre polynomial; for d = 1 the Chebyshev polynomial.
    """
    d = check_sphere_dim(d)
    if ell < 0:
        raise ValueError(f"degree must be >= 0, got {ell}")
    s = clamp_inner(s)
    if ell == 0:
        return 1.0, 0.0
    pm1, p = 1.0, s
    qm1, q = 0.0, 1.0
    for l in range(1, ell):
        a = (2 * l + d - 1) / (l + d - 1)
        b = l / (l + d - 1)
        pn = a * s * p - b * pm1
        qn = a * (p + s * q) - b * qm1
        pm1, p = p, pn
        qm1, q = q, qn
    return p, q


def legendre_values(s: np.ndarray, t: int, d: int) -> np.ndarray:
    """Table of P_{l,d}(s) for l = 0..t, vectorized over s.

    Returns an array of shape (t+1,) + s.shape.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty((t + 1,) + s.shape)
    out[0] = 1.0
    if t >= 1:
        out[1] = s
    # same coefficient grouping as legendre_values_and_derivs so both
    # tables agree bit-for-bit
    for l in range(1, t):
        a = (2 * l + d - 1) / (l + d - 1)
        b = l / (l + d - 1)
        out[l + 1] = a * s * out[l] - b * out[l - 1]
    return out


def legendre_values_and_derivs(s: np.ndarray, t: int, d: int):
    """Tables of P_{l,d}(s) and d/ds P_{l,d}(s) for l = 0..t."""
    s = np.asarray(s, dtype=float)
    p = np.empty((t + 1,) + s.shape)
    q = np.zeros_like(p)
    p[0] = 1.0
    if t >= 1:
        p[1] = s
        q[1] = 1.0
    for l in range(1, t):
        a = (2 * l + d - 1) / (l + d - 1)
        b = l / (l + d - 1)
        p[l + 1] = a * s * p[l] - b * p[l - 1]
        q[l + 1] = a * (p[l] + s * q[l]) - b * q[l - 1]
    return p, q


@dataclass(frozen=True)
class KernelSpec:
    """Degree and sphere dimension of the reproducing kernel k_t."""

    t: int
    d: int

    def __post_init__(self):
        check_sphere_dim(self.d)
        if self.t < 1:
            raise ValueError(f"kernel degree must be >= 1, got {self.t}")


def degree_dims(t: int, d: int) -> np.ndarray:
    """Vector of harmonic dimensions [D(0,d), ..., D(t,d)] as floats."""
    return np.array([dim_harmonic(ell, d) for ell in range(t + 1)], dtype=float)


def _check_point(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d + 1,):
        raise ValueError(f"expected a point in R^{d + 1}, got shape {x.shape}")
    return x


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Reproducing kernel k_t(x, y) = sum_{l=1..t} D(l,d) P_{l,d}(<x,y>).

    The zero-degree term is excluded: k_t reproduces the zero-mean
    polynomial space. k_t(x, x) = D_t.
    """
    x = _check_point(x, spec.d)
    y = _check_point(y, spec.d)
    s = clamp_inner(float(x @ y))
    vals = legendre_values(np.float64(s), spec.t, spec.d)
    dims = degree_dims(spec.t, spec.d)
    return float(dims[1:] @ vals[1:])


def kernel_grad(spec: KernelSpec, z, x) -> np.ndarray:
    """Spherical gradient of w -> k_t(z, w) at x.

    Returns sum_l D(l,d) P'_{l,d}(<z,x>) (z - <z,x> x), a vector tangent
    to the sphere at x. Zero when x = z (the projection factor vanishes).
    """
    z = _check_point(z, spec.d)
    x = _check_point(x, spec.d)
    s = clamp_inner(float(z @ x))
    _, derivs = legendre_values_and_derivs(np.float64(s), spec.t, spec.d)
    dims = degree_dims(spec.t, spec.d)
    c = float(dims[1:] @ derivs[1:])
    return c * (z - s * x)
