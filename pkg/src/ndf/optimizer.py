"""Projected gradient descent that extends a fixed set to a t-design.

The existence results are non-constructive; this module makes them
executable. Free points move by Riemannian gradient steps (Euclidean
step, renormalize each row) with Barzilai-Borwein step seeding and an
Armijo backtracking line search. Descent runs in two phases sharing the
same machinery:

  phase 1 drives the kernel residual down. Its objective is a sum of
  O(N^2) unit-magnitude terms that cancel at a design, so once the
  normalized residual reaches ~1e-15 the computed value is float noise
  (it can even go negative) while monomial deviations still sit near
  1e-9, above the certification tolerance.

  phase 2 therefore polishes the cancellation-free moment least-squares
  objective sum_alpha (mean x^alpha - integral_alpha)^2, whose floor is
  ~1e-32, until the worst moment deviation clears the tolerance with
  margin.

Restarts perturb the best iterate by tangent Gaussian noise of
decreasing scale. Fixed points are never touched; the union output
contains them bitwise.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import ceil, sqrt

import numpy as np

from .bounds import PaperConstants, theorem4_points
from .harmonics import check_sphere_dim, dim_space, surface_area
from .partition import cell_center, equal_area_partition
from .flow import quasi_uniform_points
from .residual import (
    Configuration,
    DesignCertificate,
    certify_design,
    monomial_integral,
    monomial_multi_indices,
    nested_residual,
    residual_gradient,
)

__all__ = [
    "ExtendOptions",
    "ExtendResult",
    "initialize_points",
    "extend_design",
    "auto_free_count",
]

_INIT_STRATEGIES = ("auto", "equal_area_centers", "spiral", "random")
_LINE_SEARCHES = ("backtracking", "fixed")


@dataclass(frozen=True)
class ExtendOptions:
    """Knobs for extend_design.

    residual_tol applies to the normalized residual of the union and to
    the worst moment deviation (the certification pair). step_tol stops
    descent when the tangent gradient norm falls below it. init_points
    overrides init_strategy with explicit start coordinates, which is
    what the rotation-equivariance property needs.
    """

    init_strategy: str = "auto"
    max_iters: int = 2000
    step_tol: float = 1e-14
    residual_tol: float = 1e-10
    restarts: int = 8
    line_search: str = "backtracking"
    seed: int = 42
    fixed_step: float = 1e-3
    polish_max_iters: int = 4000
    init_points: np.ndarray | None = None
    constants: PaperConstants = field(default_factory=PaperConstants)

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_tol <= 0 or self.residual_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.init_strategy not in _INIT_STRATEGIES:
            raise ValueError(f"unknown init_strategy {self.init_strategy!r}; "
                             f"one of {_INIT_STRATEGIES}")
        if self.line_search not in _LINE_SEARCHES:
            raise ValueError(f"unknown line_search {self.line_search!r}; "
                             f"one of {_LINE_SEARCHES}")
        if self.fixed_step <= 0:
            raise ValueError("fixed_step must be > 0")


@dataclass
class ExtendResult:
    """Outcome of one extend_design call.

    converged implies certificate.is_design. trace rows are
    (phase, iteration, objective, gradient_norm, step) for the winning
    restart; the objective is the phase's own (kernel residual in phase
    1, moment least squares in phase 2) and is non-increasing within
    each backtracking phase.
    """

    free_points: np.ndarray
    certificate: DesignCertificate
    iterations_used: int
    restarts_used: int
    converged: bool
    warnings: list[str] = field(default_factory=list)
    trace: list[tuple] = field(default_factory=list)


def initialize_points(strategy: str, N: int, d: int, fixed=None,
                      seed: int = 42) -> np.ndarray:
    """Deterministic start coordinates for N free points on S^d.

    equal_area_centers puts one point at each cell center of the N-cell
    area-regular partition (d=2 only); spiral uses the quasi-uniform
    ladder; random draws seeded Gaussians and normalizes. fixed is
    accepted for signature parity but does not influence placement.
    auto resolves to equal_area_centers for d=2, random otherwise.
    """
    check_sphere_dim(d)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if strategy == "auto":
        strategy = "equal_area_centers" if d == 2 else "random"
    if strategy == "equal_area_centers":
        if d != 2:
            raise ValueError("equal_area_centers requires d=2")
        part = equal_area_partition(N)
        return np.array([cell_center(c) for c in part.cells])
    if strategy == "spiral":
        return quasi_uniform_points(N, d, seed=seed)
    if strategy == "random":
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((N, d + 1))
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)
    raise ValueError(f"unknown init strategy {strategy!r}")


def auto_free_count(t: int, M: int, d: int,
                    consts: PaperConstants) -> int:
    """Free-point count prescription when the caller gives none.

    The sufficient-count formula with the configured constants, floored
    at D_t + 1. Default constants make this enormous; it is a faithful
    prescription, not a practical one, and callers normally calibrate
    the constants down via config.
    """
    n_general, _ = theorem4_points(t, None, M, d, consts)
    return max(ceil(n_general), dim_space(t, d) + 1)


def _tangent(G: np.ndarray, X: np.ndarray) -> np.ndarray:
    return G - (G * X).sum(axis=1, keepdims=True) * X


def _renorm(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _descend(free, f_g, max_iters, f_target, grad_tol, line_search,
             fixed_step, trace, phase):
    """Shared projected-descent loop; returns (free, f, iterations).

    f_g(free) -> (objective, Euclidean gradient w.r.t. free rows).
    Stops at objective <= f_target, tangent gradient norm <= grad_tol,
    a stalled line search, or the iteration cap. With backtracking,
    accepted objectives never increase (asserted).
    """
    f, G = f_g(free)
    prev_free = None
    prev_grad = None
    iters = 0
    for iters in range(1, max_iters + 1):
        if f <= f_target:
            break
        T = _tangent(G, free)
        gn2 = float((T * T).sum())
        gn = sqrt(gn2)
        trace.append((phase, iters - 1, f, gn, 0.0))
        if gn <= grad_tol:
            break

        if prev_free is None:
            alpha = 1.0 / max(gn, 1.0)
        else:
            sv = (free - prev_free).ravel()
            yv = (T - prev_grad).ravel()
            sy = float(sv @ yv)
            if sy > 1e-300:
                alpha = float(np.clip((sv @ sv) / sy, 1e-14, 1e2))
            else:
                alpha = 1.0 / max(gn, 1.0)

        if line_search == "fixed":
            cand = _renorm(free - fixed_step * T)
            fc, Gc = f_g(cand)
            prev_free, prev_grad = free, T
            free, f, G = cand, fc, Gc
            trace[-1] = (phase, iters - 1, f, gn, fixed_step)
            continue

        accepted = False
        a = alpha
        for _ in range(50):
            cand = _renorm(free - a * T)
            fc, Gc = f_g(cand)
            if fc <= f - 1e-4 * a * gn2:
                accepted = True
                break
            a *= 0.5
        if not accepted:
            break
        assert fc <= f, "backtracking accepted an ascent step"
        prev_free, prev_grad = free, T
        free, f, G = cand, fc, Gc
        trace[-1] = (phase, iters - 1, f, gn, a)
    return free, f, iters


def _moment_tables(t: int, d: int):
    alphas = np.array(monomial_multi_indices(t, d), dtype=np.int64)
    targets = np.array([monomial_integral(a, d) for a in alphas])
    return alphas, targets


def _moment_f_g(free, fixed, alphas, targets):
    """Least-squares moment objective and its gradient in the free rows."""
    X = np.vstack([fixed, free]) if len(fixed) else free
    n = X.shape[0]
    V = np.ones((alphas.shape[0], n))
    for j in range(X.shape[1]):
        V *= X[:, j][None, :] ** alphas[:, j][:, None]
    r = V.mean(axis=1) - targets
    f = float(r @ r)
    G = np.zeros_like(free)
    for j in range(X.shape[1]):
        a_j = alphas[:, j]
        mask = a_j > 0
        if not mask.any():
            continue
        W = np.ones((int(mask.sum()), free.shape[0]))
        for k in range(X.shape[1]):
            e = alphas[mask, k] - (k == j)
            W *= free[:, k][None, :] ** e[:, None]
        G[:, j] = (2.0 / n) * ((r[mask] * a_j[mask]) @ W)
    return f, G


def _moment_dev(free, fixed, alphas, targets) -> float:
    X = np.vstack([fixed, free]) if len(fixed) else free
    V = np.ones((alphas.shape[0], X.shape[0]))
    for j in range(X.shape[1]):
        V *= X[:, j][None, :] ** alphas[:, j][:, None]
    return float(np.abs(V.mean(axis=1) - targets).max())


def extend_design(t: int, fixed, N: int | None,
                  opts: ExtendOptions | None = None, d: int = 2
                  ) -> ExtendResult:
    """Find N free points whose union with the fixed set is a t-design.

    N=None invokes the sufficient-count prescription (see
    auto_free_count). Non-convergence after all restarts returns
    converged=False with the best configuration's certificate rather
    than raising. A warning is attached (and returned on the result)
    when N sits below the heuristic floor max(c1 t^d, D_t + 1 - M).
    """
    if opts is None:
        opts = ExtendOptions()
    check_sphere_dim(d)
    if t < 1:
        raise ValueError(f"degree must be >= 1, got {t}")
    fixed = (np.zeros((0, d + 1)) if fixed is None or len(fixed) == 0
             else np.asarray(fixed, dtype=float))
    if fixed.ndim != 2 or fixed.shape[1] != d + 1:
        raise ValueError(f"fixed points must be (M, {d + 1})")
    M = fixed.shape[0]
    if N is None:
        N = auto_free_count(t, M, d, opts.constants)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")

    notes: list[str] = []
    floor = max(opts.constants.c1(d) * t**d, dim_space(t, d) + 1 - M)
    if N < floor:
        msg = (f"N={N} is below the heuristic floor {floor:.3g} "
               f"= max(c1 t^d, D_t + 1 - M); attempting anyway")
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)

    if opts.init_points is not None:
        init = np.asarray(opts.init_points, dtype=float)
        if init.shape != (N, d + 1):
            raise ValueError(f"init_points must be ({N}, {d + 1})")
        init = _renorm(init)
    else:
        init = initialize_points(opts.init_strategy, N, d, fixed,
                                 seed=opts.seed)

    omega = surface_area(d)
    n_tot = N + M

    def kernel_f_g(free):
        cfg = Configuration(d=d, fixed=fixed, free=free)
        cert = nested_residual(t, cfg)
        return cert.total_residual, residual_gradient(t, cfg)

    alphas, targets = _moment_tables(t, d)
    tol = opts.residual_tol
    # phase-1 target on the raw total: normalized floor well under tol
    phase1_target = min(tol * 1e-2, 1e-12) * omega * n_tot**2
    # certification needs dev <= tol; sqrt(F) bounds dev from above
    phase2_target = (tol / 10.0) ** 2

    best = None  # (score, free, trace, iters)
    rng = np.random.default_rng(opts.seed)
    restarts_used = 0
    for r in range(opts.restarts):
        restarts_used = r + 1
        if r == 0:
            start = init.copy()
        else:
            scale = 0.5 * 0.5 ** (r - 1)
            noise = rng.standard_normal(best[1].shape) * scale
            start = _renorm(best[1] + _tangent(noise, best[1]))
        trace: list[tuple] = []
        free, f1, it1 = _descend(
            start, kernel_f_g, opts.max_iters, phase1_target,
            opts.step_tol, opts.line_search, opts.fixed_step, trace, 1)
        it2 = 0
        if f1 <= max(phase1_target, tol * omega * n_tot**2):
            free, _, it2 = _descend(
                free, lambda X: _moment_f_g(X, fixed, alphas, targets),
                opts.polish_max_iters, phase2_target, opts.step_tol,
                opts.line_search, opts.fixed_step, trace, 2)
        cfg = Configuration(d=d, fixed=fixed, free=free)
        cert = nested_residual(t, cfg)
        dev = _moment_dev(free, fixed, alphas, targets)
        score = max(abs(cert.normalized_residual), dev)
        entry = (score, free, trace, it1 + it2, cert, dev)
        if best is None or score < best[0]:
            best = entry
        if cert.normalized_residual <= tol and dev <= tol:
            best = entry
            break

    score, free, trace, iters, cert, dev = best
    if cert.normalized_residual <= tol and dev <= tol:
        # full certification re-derives both checks; its verdict is final
        cfg = Configuration(d=d, fixed=fixed, free=free)
        cert = certify_design(t, cfg, tol)
        converged = bool(cert.is_design)
    else:
        converged = False
        cert.oracle_max_deviation = dev
        cert.is_design = False
        cert.tol = tol
    return ExtendResult(
        free_points=free,
        certificate=cert,
        iterations_used=iters,
        restarts_used=restarts_used,
        converged=converged,
        warnings=notes,
        trace=trace,
    )
