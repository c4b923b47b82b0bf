import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_gegenbauer, eval_legendre

from ndf.harmonics import (
    KernelSpec,
    check_sphere_dim,
    clamp_inner,
    degree_dims,
    dim_harmonic,
    dim_space,
    kernel_eval,
    kernel_grad,
    legendre_eval,
    legendre_values,
    legendre_values_and_derivs,
    surface_area,
)
from helpers import random_unit


def test_dim_harmonic_known_values():
    # on S^2 the degree-l space has 2l+1 dimensions, on S^3 (l+1)^2
    assert [dim_harmonic(l, 2) for l in range(6)] == [1, 3, 5, 7, 9, 11]
    assert [dim_harmonic(l, 3) for l in range(5)] == [1, 4, 9, 16, 25]
    assert dim_harmonic(0, 6) == 1


def test_dim_harmonic_rejects_bad_input():
    with pytest.raises(ValueError):
        dim_harmonic(-1, 2)
    with pytest.raises((TypeError, ValueError)):
        dim_harmonic(2, 0)
    with pytest.raises(TypeError):
        dim_harmonic(2, True)
    with pytest.raises(TypeError):
        dim_harmonic(2, 2.0)


def test_summation_identity_exact():
    for d in range(1, 7):
        for t in range(1, 31):
            total = sum(dim_harmonic(l, d) for l in range(t + 1))
            assert total == dim_harmonic(t, d + 1)
            assert dim_space(t, d) == dim_harmonic(t, d + 1) - 1


def test_dim_space_small():
    assert dim_space(1, 2) == 3
    assert dim_space(3, 2) == 3 + 5 + 7
    with pytest.raises(ValueError):
        dim_space(0, 2)


def test_surface_area_values():
    assert surface_area(1) == pytest.approx(2 * np.pi, rel=1e-15)
    assert surface_area(2) == pytest.approx(4 * np.pi, rel=1e-15)
    assert surface_area(3) == pytest.approx(2 * np.pi**2, rel=1e-15)


def test_clamp_inner():
    assert clamp_inner(1.0 + 5e-13) == 1.0
    assert clamp_inner(-1.0 - 5e-13) == -1.0
    assert clamp_inner(0.25) == 0.25
    np.testing.assert_array_equal(clamp_inner(np.array([0.5, -1.0 - 1e-13])),
                                  [0.5, -1.0])
    with pytest.raises(ValueError):
        clamp_inner(1.0 + 1e-11)


def test_check_sphere_dim():
    assert check_sphere_dim(np.int64(3)) == 3
    with pytest.raises(ValueError):
        check_sphere_dim(0)
    with pytest.raises(TypeError):
        check_sphere_dim("2")


@given(st.integers(0, 15), st.floats(-1.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_legendre_matches_scipy_d2(ell, s):
    val, _ = legendre_eval(ell, 2, s)
    assert val == pytest.approx(float(eval_legendre(ell, s)),
                                rel=1e-10, abs=1e-12)


@given(st.integers(1, 10), st.integers(1, 6), st.floats(-1.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_legendre_matches_gegenbauer_ratio(ell, d, s):
    # P_{l,d}(s) = C_l^{(d-1)/2}(s) / C_l^{(d-1)/2}(1), except d=1 where
    # the Gegenbauer normalization degenerates (Chebyshev case)
    if d == 1:
        val, _ = legendre_eval(ell, 1, s)
        assert val == pytest.approx(np.cos(ell * np.arccos(s)), abs=1e-9)
        return
    lam = (d - 1) / 2.0
    ref = eval_gegenbauer(ell, lam, s) / eval_gegenbauer(ell, lam, 1.0)
    val, _ = legendre_eval(ell, d, s)
    assert val == pytest.approx(float(ref), rel=1e-9, abs=1e-11)


@given(st.integers(1, 12), st.integers(1, 5), st.floats(-0.999, 0.999))
@settings(max_examples=150, deadline=None)
def test_legendre_derivative_is_analytic(ell, d, s):
    _, q = legendre_eval(ell, d, s)
    h = 1e-6
    lo, _ = legendre_eval(ell, d, s - h)
    hi, _ = legendre_eval(ell, d, s + h)
    fd = (hi - lo) / (2 * h)
    assert q == pytest.approx(fd, rel=5e-5, abs=5e-6)


def test_legendre_value_at_one_is_one():
    for d in (1, 2, 4):
        for ell in range(0, 12):
            val, _ = legendre_eval(ell, d, 1.0)
            assert val == pytest.approx(1.0, abs=1e-12)


def test_vectorized_tables_match_scalar():
    rng = np.random.default_rng(7)
    s = rng.uniform(-1, 1, size=(4, 5))
    t, d = 9, 3
    table = legendre_values(s, t, d)
    ptab, qtab = legendre_values_and_derivs(s, t, d)
    np.testing.assert_allclose(table, ptab, rtol=0, atol=0)
    for ell in (0, 1, 4, 9):
        for idx in ((0, 0), (2, 3), (3, 4)):
            v, q = legendre_eval(ell, d, float(s[idx]))
            assert table[ell][idx] == pytest.approx(v, rel=1e-13, abs=1e-14)
            assert qtab[ell][idx] == pytest.approx(q, rel=1e-13, abs=1e-14)


def test_kernel_diagonal_is_dim_space():
    spec = KernelSpec(t=4, d=2)
    x = np.array([0.0, 0.0, 1.0])
    assert kernel_eval(spec, x, x) == pytest.approx(dim_space(4, 2),
                                                    rel=1e-13)


def test_kernel_gram_is_positive_semidefinite():
    rng = np.random.default_rng(11)
    for d, t in ((2, 6), (3, 4)):
        pts = random_unit(rng, 25, d)
        spec = KernelSpec(t=t, d=d)
        gram = np.array([[kernel_eval(spec, x, y) for y in pts] for x in pts])
        eigs = np.linalg.eigvalsh(gram)
        assert eigs.min() >= -1e-8 * dim_space(t, d)


def test_kernel_reproducing_property_via_quadrature():
    # int k_t(x,.) k_t(y,.) dmu = k_t(x,y); the integrand has degree 2t
    from ndf.mz import product_quadrature

    rng = np.random.default_rng(3)
    t = 4
    spec = KernelSpec(t=t, d=2)
    rule = product_quadrature(2 * t)
    for _ in range(5):
        x, y = random_unit(rng, 2, 2)
        kx = np.array([kernel_eval(spec, x, n) for n in rule.nodes])
        ky = np.array([kernel_eval(spec, y, n) for n in rule.nodes])
        lhs = float(rule.weights @ (kx * ky))
        assert lhs == pytest.approx(kernel_eval(spec, x, y),
                                    rel=1e-11, abs=1e-11)


def test_kernel_grad_matches_finite_differences():
    rng = np.random.default_rng(5)
    spec = KernelSpec(t=5, d=2)
    z, x = random_unit(rng, 2, 2)
    g = kernel_grad(spec, z, x)
    # tangency
    assert abs(g @ x) < 1e-10
    h = 1e-7
    for _ in range(3):
        v = rng.standard_normal(3)
        v -= (v @ x) * x
        v /= np.linalg.norm(v)
        xp = (x + h * v) / np.linalg.norm(x + h * v)
        xm = (x - h * v) / np.linalg.norm(x - h * v)
        fd = (kernel_eval(spec, z, xp) - kernel_eval(spec, z, xm)) / (2 * h)
        assert fd == pytest.approx(float(g @ v), rel=1e-6, abs=1e-6)


def test_kernel_grad_vanishes_at_anchor():
    spec = KernelSpec(t=3, d=2)
    x = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(kernel_grad(spec, x, x), 0.0, atol=1e-14)


def test_degree_dims_layout():
    dims = degree_dims(4, 2)
    assert dims.shape == (5,)
    np.testing.assert_array_equal(dims, [1, 3, 5, 7, 9])


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(t=0, d=2)
    with pytest.raises(ValueError):
        KernelSpec(t=3, d=0)
