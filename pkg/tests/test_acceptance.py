"""End-to-end acceptance checks for the whole package.

Twelve numbered criteria, each a standalone test that prints one
PASS/FAIL verdict line (run with -s to see them) and enforces its own
runtime budget. Together they pin the dimension identities, the
certification pipeline, the extension optimizer, the norm inequalities,
the flow integrator, the discretization checks, the partition, the
growth order, the replication construction, and both analytic
gradients.
"""
import time
import warnings

import numpy as np
import pytest

from ndf.bounds import (
    PaperConstants,
    corollary3_order,
    dgs_lower_bound,
    proposition1_build,
    proposition1_plan,
)
from ndf.classical import CLASSICAL_DESIGNS, classical_design
from ndf.flow import (
    eval_poly,
    eval_poly_grad,
    flow_displacement_bound_check,
    integrate_flow,
    quasi_uniform_points,
    random_boundary_polynomial,
    random_polynomial,
    rk4_order_probe,
)
from ndf.harmonics import dim_harmonic, dim_space, surface_area
from ndf.mz import mz_sweep, mz_value_check, product_quadrature, \
    sample_cell_points
from ndf.optimizer import ExtendOptions, extend_design
from ndf.partition import cell_area, equal_area_partition
from ndf.residual import (
    Configuration,
    certify_design,
    residual_gradient,
    weyl_residual,
)

TOL = 1e-10
OMEGA = surface_area(2)


def _verdict(num: int, desc: str, ok: bool, elapsed: float,
             budget: float) -> None:
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"{status} criterion {num}: {desc} "
          f"[{elapsed:.2f}s / {budget:.0f}s budget]")
    assert ok, f"criterion {num} failed: {desc}"
    assert elapsed < budget, f"criterion {num} over budget: {elapsed:.2f}s"


def _renorm(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _quiet_extend(*args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return extend_design(*args, **kwargs)


def test_criterion_01_dimension_identities():
    start = time.time()
    ok = True
    for d in range(1, 7):
        for t in range(0, 31):
            lhs = sum(dim_harmonic(ell, d) for ell in range(t + 1))
            ok &= lhs == dim_harmonic(t, d + 1)
            if t >= 1:
                ok &= dim_space(t, d) == dim_harmonic(t, d + 1) - 1
    _verdict(1, "harmonic dimension identities exact for d<=6, t<=30",
             ok, time.time() - start, 1.0)


def test_criterion_02_classical_certifications():
    start = time.time()
    ok = True
    for name, (_, strength) in CLASSICAL_DESIGNS.items():
        pts = classical_design(name)[0]
        cert = certify_design(strength, Configuration(d=2, fixed=pts), TOL)
        ok &= cert.is_design
        ok &= cert.normalized_residual <= TOL
        ok &= cert.oracle_max_deviation <= TOL
    octa = classical_design("octahedron")[0]
    over = certify_design(4, Configuration(d=2, fixed=octa), TOL)
    ok &= not over.is_design
    _verdict(2, "five classical designs certify; octahedron fails at t=4",
             ok, time.time() - start, 1.0)


def test_criterion_03_lower_bound_tightness():
    start = time.time()
    tetra = classical_design("tetrahedron")[0]
    octa = classical_design("octahedron")[0]
    ok = (dgs_lower_bound(2, 2) == 4 == tetra.shape[0]
          and dgs_lower_bound(3, 2) == 6 == octa.shape[0])
    _verdict(3, "lower bound meets tetrahedron and octahedron sizes",
             ok, time.time() - start, 1.0)


def test_criterion_04_nested_extension():
    start = time.time()
    tetra = classical_design("tetrahedron")[0]
    wins = 0
    each_ok = True
    for seed in range(10):
        t0 = time.time()
        res = _quiet_extend(3, tetra, 8,
                            ExtendOptions(seed=seed,
                                          init_strategy="random"))
        each_ok &= (time.time() - t0) < 60.0
        if not res.converged:
            continue
        union = np.vstack([tetra, res.free_points])
        cert = certify_design(3, Configuration(d=2, fixed=union), TOL)
        if cert.is_design and np.array_equal(union[:4], tetra):
            wins += 1
    ok = wins >= 9 and each_ok
    _verdict(4, f"tetrahedron extends to a 3-design ({wins}/10 seeds)",
             ok, time.time() - start, 600.0)


def test_criterion_05_fixed_set_residual_bound():
    start = time.time()
    rng = np.random.default_rng(5)
    violations = 0
    for _ in range(200):
        t = int(rng.integers(1, 9))
        M = int(rng.integers(1, 31))
        pts = _renorm(rng.standard_normal((M, 3)))
        total = weyl_residual(t, Configuration(d=2, fixed=pts)).total_residual
        if np.sqrt(total) > M * np.sqrt(OMEGA * dim_space(t, 2)):
            violations += 1

    names = [("tetrahedron", 2), ("octahedron", 3), ("icosahedron", 5)]
    nested_violations = 0
    for i in range(50):
        name, t1 = names[i % 3]
        A = rng.standard_normal((3, 3))
        Q, R = np.linalg.qr(A)
        pts = classical_design(name)[0] @ (Q * np.sign(np.diag(R))).T
        assert certify_design(
            t1, Configuration(d=2, fixed=pts), TOL).is_design
        t = int(rng.integers(t1 + 1, 9))
        cert = weyl_residual(t, Configuration(d=2, fixed=pts))
        lhs = np.sqrt(max(float(np.sum(cert.per_degree[t1:])), 0.0))
        M = pts.shape[0]
        rhs = M * np.sqrt(OMEGA * (dim_space(t, 2) - dim_space(t1, 2)))
        if lhs > rhs:
            nested_violations += 1
    ok = violations == 0 and nested_violations == 0
    _verdict(5, "kernel-sum norm bounds hold on 200 random + 50 nested "
                "configurations", ok, time.time() - start, 30.0)


def test_criterion_06_boundary_polynomial_norm_bound():
    start = time.time()
    rng = np.random.default_rng(6)
    violations = 0
    for seed in range(200):
        t = int(rng.integers(1, 7))
        P = random_boundary_polynomial(t, 2, seed=seed,
                                       quad_order=2 * t + 16)
        q = product_quadrature(2 * t + 16)
        from ndf.flow import poly_values

        norm2 = q.integrate(lambda X: poly_values(P, X) ** 2)
        lhs = np.sqrt(max(norm2, 0.0))
        rhs = np.sqrt(1.5 * OMEGA * dim_harmonic(t + 1, 3))
        if lhs > rhs:
            violations += 1
    _verdict(6, "unit-gradient polynomials obey the L2 norm bound "
                "(200 cases)", violations == 0, time.time() - start, 60.0)


def test_criterion_07_flow_properties():
    start = time.time()
    starts = quasi_uniform_points(32, 2, seed=0)
    mono_ok = disp_ok = order_ok = True
    for seed in range(50):
        P = random_boundary_polynomial(3, 2, seed=seed)
        trace = integrate_flow(P, starts, r_d=1.0, steps=100)
        mono_ok &= bool(np.diff(trace.mean_values).min() >= -1e-9)
        holds, _ = flow_displacement_bound_check(trace, starts, slack=1e-8)
        disp_ok &= holds
        ratio, kept = rk4_order_probe(P, starts, 1.0)
        order_ok &= kept > 0 and 8.0 <= ratio <= 32.0
    ok = mono_ok and disp_ok and order_ok
    _verdict(7, "flow is monotone, displacement-bounded, and 4th order "
                "(50 polynomials)", ok, time.time() - start, 120.0)


def test_criterion_08_discretization_ratio_sweep():
    start = time.time()
    reports = mz_sweep(4000, 100, max_degree=4, seed=0)
    lo_v, hi_v = 0.5, 1.5
    lo_g, hi_g = 1.0 / (3 * np.sqrt(2)), 3 * np.sqrt(2)
    ok = len(reports) == 200
    for rep in reports:
        ok &= rep.hypothesis_ok and rep.passed
        if rep.lower_ratio is not None:
            ok &= lo_v <= rep.lower_ratio <= hi_v
            ok &= lo_v <= rep.upper_ratio <= hi_v
        else:
            ok &= lo_g <= rep.gradient_lower_ratio <= hi_g
            ok &= lo_g <= rep.gradient_upper_ratio <= hi_g

    # ratios are scale-free; a power-of-two rescale must be bit-exact
    part = equal_area_partition(2000, 2)
    rng = np.random.default_rng(1)
    pts = sample_cell_points(part, rng)
    P = random_boundary_polynomial(3, 2, seed=2)
    from ndf.flow import PolynomialHandle

    scaled = PolynomialHandle(P.spec, P.anchors, 4.0 * P.coeffs,
                              boundary_normalized=P.boundary_normalized)
    a = mz_value_check(P, part, pts)
    b = mz_value_check(scaled, part, pts)
    ok &= a.lower_ratio == b.lower_ratio
    ok &= a.upper_ratio == b.upper_ratio
    _verdict(8, "discrete/continuous ratios stay in band over 100 cases; "
                "rescaling is exact", ok, time.time() - start, 120.0)


def test_criterion_09_partition_regularity():
    start = time.time()
    ok = True
    scaled = []
    for n in (10, 100, 1000, 4096):
        part = equal_area_partition(n, 2)
        areas = np.array([cell_area(c) for c in part.cells])
        ok &= bool(np.abs(areas - 1.0 / n).max() <= 1e-12)
        scaled.append(part.norm * np.sqrt(n))
    ok &= max(scaled) <= 7.0  # one constant across the whole set
    _verdict(9, "cell areas are uniform to 1e-12 and norm scales as "
                "N^-1/2", ok, time.time() - start, 10.0)


def test_criterion_10_total_size_growth_order():
    start = time.time()
    consts = PaperConstants()
    ts = np.array([8, 16, 32, 64, 128, 256], dtype=float)
    vals = np.array([corollary3_order(int(t), 2, consts) for t in ts])
    slope = float(np.polyfit(np.log(ts), np.log(vals), 1)[0])
    ok = 4.9 <= slope <= 5.1
    _verdict(10, f"nested total size grows like t^5 (slope {slope:.4f})",
             ok, time.time() - start, 1.0)


def test_criterion_11_replication_and_unions():
    start = time.time()
    plan = proposition1_plan(2, 3, 2)
    ok = plan.copies == 5

    counter = [0]

    def source(deg, n):
        while counter[0] < 40:
            res = _quiet_extend(deg, None, 8,
                                ExtendOptions(seed=counter[0],
                                              init_strategy="random"))
            counter[0] += 1
            if res.converged:
                return res.free_points
        raise RuntimeError("optimizer could not supply a design")

    plan2, base, union, cert_t1, cert_t = proposition1_build(2, 3, 2,
                                                             source)
    ok &= plan2.copies == 5
    ok &= cert_t1.is_design and cert_t.is_design
    ok &= np.array_equal(union[: base.shape[0]], base)

    # unions of like-strength designs keep the strength: 20 fresh pairs
    designs = []
    seed = 100
    while len(designs) < 40 and seed < 200:
        res = _quiet_extend(2, None, 4,
                            ExtendOptions(seed=seed,
                                          init_strategy="random"))
        seed += 1
        if res.converged:
            designs.append(res.free_points)
    ok &= len(designs) == 40
    for i in range(0, 40, 2):
        pair = np.vstack([designs[i], designs[i + 1]])
        cert = certify_design(2, Configuration(d=2, fixed=pair), TOL)
        ok &= cert.is_design
    _verdict(11, "replication assembles a nested 3-design; 20 design "
                 "unions certify", ok, time.time() - start, 120.0)


def test_criterion_12_gradient_correctness():
    start = time.time()

    def fd4(f, h):
        return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)

    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        t = int(rng.integers(1, 7))
        M = int(rng.integers(0, 5))
        N = int(rng.integers(2, 7))
        fixed = _renorm(rng.standard_normal((M, 3))) if M else None
        free = _renorm(rng.standard_normal((N, 3)))
        G = residual_gradient(t, Configuration(d=2, fixed=fixed,
                                               free=free))
        gn = float(np.linalg.norm(G))
        V = G / gn

        def f(h):
            cfg = Configuration(d=2, fixed=fixed,
                                free=_renorm(free + h * V))
            return weyl_residual(t, cfg).total_residual

        d = fd4(f, 1e-5)
        worst = max(worst, abs(d - gn) / max(abs(d), gn))

    worst_p = 0.0
    for case in range(100):
        t = int(rng.integers(1, 7))
        P = random_polynomial(t, 2, seed=case)
        x = _renorm(rng.standard_normal((1, 3)))[0]
        g = eval_poly_grad(P, x)
        gn = float(np.linalg.norm(g))
        v = g / gn

        def f(h):
            y = x + h * v
            return eval_poly(P, y / np.linalg.norm(y))

        d = fd4(f, 1e-5)
        worst_p = max(worst_p, abs(d - gn) / max(abs(d), gn))

    ok = worst <= 1e-6 and worst_p <= 1e-6
    _verdict(12, f"analytic gradients match finite differences "
                 f"(worst rel {max(worst, worst_p):.2e})",
             ok, time.time() - start, 10.0)
