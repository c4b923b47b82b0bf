"""Pairwise hot loops in two interchangeable implementations.

``pair_legendre_sums`` and ``pair_gradient`` dispatch to numba-compiled
loops or a vectorized numpy path according to the active backend. Both
implementations use sequential (single-schedule) reductions so repeated
runs are bit-for-bit reproducible.
"""
from __future__ import annotations

import numpy as np

from .backend import ACTIVE_BACKEND, HAS_NUMBA

__all__ = ["pair_legendre_sums", "pair_gradient"]


def _pair_legendre_sums_numpy(points: np.ndarray, t: int, d: int) -> np.ndarray:
    """sums[l] = sum_{i,j} P_{l,d}(<p_i, p_j>) for l = 0..t."""
    s = np.clip(points @ points.T, -1.0, 1.0)
    out = np.zeros(t + 1)
    out[0] = s.size
    if t == 0:
        return out
    pm1 = np.ones_like(s)
    p = s
    out[1] = p.sum()
    for l in range(1, t):
        pn = ((2 * l + d - 1) * s * p - l * pm1) / (l + d - 1)
        out[l + 1] = pn.sum()
        pm1, p = p, pn
    return out


def _pair_gradient_numpy(points: np.ndarray, n_fixed: int,
                         dcoef: np.ndarray) -> np.ndarray:
    """Tangential gradient of the pairwise kernel sum over the free points.

    dcoef[l] holds the degree-l weight (index 0 unused). Returns, for each
    free point p_i, sum_{j != i} sum_l dcoef[l] P'_{l,d}(s_ij) (p_j - s_ij p_i).
    """
    t = len(dcoef) - 1
    d = points.shape[1] - 1
    free = points[n_fixed:]
    s = np.clip(free @ points.T, -1.0, 1.0)
    c = np.zeros_like(s)
    pm1 = np.ones_like(s)
    p = s.copy()
    qm1 = np.zeros_like(s)
    q = np.ones_like(s)
    if t >= 1:
        c += dcoef[1] * q
    for l in range(1, t):
        a = (2 * l + d - 1) / (l + d - 1)
        b = l / (l + d - 1)
        pn = a * s * p - b * pm1
        qn = a * (p + s * q) - b * qm1
        c += dcoef[l + 1] * qn
        pm1, p = p, pn
        qm1, q = q, qn
    # zero the self-pair: its projection factor vanishes analytically
    rows = np.arange(free.shape[0])
    c[rows, n_fixed + rows] = 0.0
    grad = c @ points
    grad -= (c * s).sum(axis=1, keepdims=True) * free
    return grad


if HAS_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _pair_legendre_sums_numba(points, t, d):  # pragma: no cover
        n, m = points.shape
        out = np.zeros(t + 1)
        for i in range(n):
            for j in range(i, n):
                w = 1.0 if j == i else 2.0
                s = 0.0
                for k in range(m):
                    s += points[i, k] * points[j, k]
                if s > 1.0:
                    s = 1.0
                elif s < -1.0:
                    s = -1.0
                out[0] += w
                if t >= 1:
                    pm1 = 1.0
                    p = s
                    out[1] += w * p
                    for l in range(1, t):
                        pn = ((2 * l + d - 1) * s * p - l * pm1) / (l + d - 1)
                        out[l + 1] += w * pn
                        pm1, p = p, pn
        return out

    @njit(cache=True)
    def _pair_gradient_numba(points, n_fixed, dcoef):  # pragma: no cover
        n, m = points.shape
        t = dcoef.shape[0] - 1
        d = m - 1
        grad = np.zeros((n - n_fixed, m))
        for fi in range(n - n_fixed):
            i = n_fixed + fi
            for j in range(n):
                if j == i:
                    continue
                s = 0.0
                for k in range(m):
                    s += points[i, k] * points[j, k]
                if s > 1.0:
                    s = 1.0
                elif s < -1.0:
                    s = -1.0
                c = 0.0
                if t >= 1:
                    pm1 = 1.0
                    p = s
                    qm1 = 0.0
                    q = 1.0
                    c += dcoef[1] * q
                    for l in range(1, t):
                        a = (2 * l + d - 1) / (l + d - 1)
                        b = l / (l + d - 1)
                        pn = a * s * p - b * pm1
                        qn = a * (p + s * q) - b * qm1
                        c += dcoef[l + 1] * qn
                        pm1, p = p, pn
                        qm1, q = q, qn
                for k in range(m):
                    grad[fi, k] += c * (points[j, k] - s * points[i, k])
        return grad


def pair_legendre_sums(points: np.ndarray, t: int, d: int) -> np.ndarray:
    """Per-degree pairwise Legendre sums over all point pairs."""
    points = np.ascontiguousarray(points, dtype=float)
    if ACTIVE_BACKEND == "numba":
        return _pair_legendre_sums_numba(points, t, d)
    return _pair_legendre_sums_numpy(points, t, d)


def pair_gradient(points: np.ndarray, n_fixed: int,
                  dcoef: np.ndarray) -> np.ndarray:
    """Pairwise-sum gradient over free points (weights dcoef per degree)."""
    points = np.ascontiguousarray(points, dtype=float)
    dcoef = np.ascontiguousarray(dcoef, dtype=float)
    if ACTIVE_BACKEND == "numba":
        return _pair_gradient_numba(points, n_fixed, dcoef)
    return _pair_gradient_numpy(points, n_fixed, dcoef)
