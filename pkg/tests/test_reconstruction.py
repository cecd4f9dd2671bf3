from itertools import product

import numpy as np
import pytest
import sympy as sp

from activeflux.grid import BOUNDARY_POINTS, DofField, Grid
from activeflux.reconstruction import (basis_eval, cell_coefficients, compute_coeffs, recon_eval,
                                       recon_gradient, recon_monomial_coeffs)

from oracles import X, Y, cell_average_exact

GAUSS = (np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)]), np.array([5 / 9, 8 / 9, 5 / 9]))


def cell_mean(coeffs):
    pts, wts = GAUSS
    total = 0.0
    for (a, wa), (b, wb) in product(zip(pts, wts), zip(pts, wts)):
        total = total + wa * wb * recon_eval(coeffs, a, b)
    return total / 4


def test_basis_examples():
    assert basis_eval(1, -1, -1) == 1.0
    assert basis_eval(9, 0, 0) == 1.0
    assert basis_eval(4, 1, 0) == 1.0
    eta = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(basis_eval(4, -1, eta), 0.0)


@pytest.mark.parametrize("m", [0, 10, -1])
def test_basis_index_checked(m):
    with pytest.raises(ValueError):
        basis_eval(m, 0.0, 0.0)


@pytest.mark.parametrize("m", range(1, 10))
def test_basis_kronecker(m):
    for k, (xi, eta) in enumerate(BOUNDARY_POINTS, start=1):
        expected = 1.0 if m == k else 0.0
        assert basis_eval(m, xi, eta) == expected


def test_basis_partition_of_unity():
    xi, eta = np.meshgrid(np.linspace(-1, 1, 9), np.linspace(-1, 1, 9))
    total = sum(basis_eval(m, xi, eta) for m in range(1, 9))
    np.testing.assert_allclose(total, 1.0, atol=1e-14)


def test_constant_data_has_no_bubble():
    c = compute_coeffs(1.0, np.ones(8))
    assert c[8] == 0.0
    xi, eta = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    np.testing.assert_allclose(recon_eval(c, xi, eta), 1.0, atol=1e-14)


def test_unit_average_zero_boundary():
    c = compute_coeffs(1.0, np.zeros(8))
    assert c[8] == 9 / 4


def test_monomials_of_bubble():
    c = np.zeros(9)
    c[8] = 1.0
    a = recon_monomial_coeffs(c)
    expected = np.zeros((3, 3))
    expected[2, 2], expected[2, 0], expected[0, 2], expected[0, 0] = 1, -1, -1, 1
    np.testing.assert_array_equal(a, expected)
    np.testing.assert_array_equal(recon_monomial_coeffs(np.zeros(9)), 0.0)


def test_monomial_coeffs_shape_checked():
    with pytest.raises(ValueError):
        recon_monomial_coeffs(np.zeros(8))


@pytest.mark.parametrize("seed", range(5))
def test_interpolation_and_conservation(seed):
    rng = np.random.default_rng(seed)
    qbar = rng.standard_normal()
    q = rng.standard_normal(8)
    c = compute_coeffs(qbar, q)
    for m, (xi, eta) in enumerate(BOUNDARY_POINTS):
        assert recon_eval(c, xi, eta) == pytest.approx(q[m], rel=1e-13, abs=1e-13)
    assert cell_mean(c) == pytest.approx(qbar, rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("seed", range(3))
def test_biquadratic_reproduction(seed):
    rng = np.random.default_rng(100 + seed)
    a = rng.standard_normal((3, 3))
    expr = sum(a[k, l] * X**k * Y**l for k in range(3) for l in range(3))
    f = sp.lambdify((X, Y), expr, "numpy")
    qbar = cell_average_exact(expr, -1, 1, -1, 1)
    q = [f(xi, eta) for xi, eta in BOUNDARY_POINTS]
    np.testing.assert_allclose(recon_monomial_coeffs(compute_coeffs(qbar, q)), a, atol=1e-13)


def test_cross_edge_continuity():
    rng = np.random.default_rng(7)
    g = Grid(4, 4, 0.3, 0.7)
    f = DofField.from_stacked(g, rng.standard_normal((4, 3, 4, 4)))
    C = cell_coefficients(f)
    s = rng.uniform(-1, 1, 10)
    # right edge of cell (1, 2) against left edge of cell (2, 2)
    np.testing.assert_allclose(recon_eval(C[:, :, 1, 2], 1.0, s), recon_eval(C[:, :, 2, 2], -1.0, s),
                               rtol=1e-13, atol=1e-13)
    # top edge of cell (1, 2) against bottom edge of cell (1, 3)
    np.testing.assert_allclose(recon_eval(C[:, :, 1, 2], s, 1.0), recon_eval(C[:, :, 1, 3], s, -1.0),
                               rtol=1e-13, atol=1e-13)


def test_gradient_matches_difference_quotient():
    rng = np.random.default_rng(3)
    c = rng.standard_normal(9)
    h = 1e-6
    gx, gy = recon_gradient(c, 0.3, -0.4)
    assert gx == pytest.approx((recon_eval(c, 0.3 + h, -0.4) - recon_eval(c, 0.3 - h, -0.4)) / (2 * h), rel=1e-7)
    assert gy == pytest.approx((recon_eval(c, 0.3, -0.4 + h) - recon_eval(c, 0.3, -0.4 - h)) / (2 * h), rel=1e-7)
