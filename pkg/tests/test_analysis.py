import csv
import math

import numpy as np
import pytest

from activeflux import analysis as an
from activeflux.errors import DegenerateModeError
from activeflux.grid import DofField, Grid
from activeflux.solver import TimeStepper

GRID = Grid(8, 8, 0.1, 0.13)
DMIN = 0.1


def _random_wavenumbers(n, seed, grid=GRID):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield (float(rng.uniform(0.05, 2 * math.pi - 0.05) / grid.dx),
               float(rng.uniform(0.05, 2 * math.pi - 0.05) / grid.dy))


def test_symbol_matches_physical_step():
    st = TimeStepper(GRID)
    mx, my = 1, 2
    A = an.assemble_symbol(st, 2 * math.pi * mx / (8 * GRID.dx), 2 * math.pi * my / (8 * GRID.dy))
    rng = np.random.default_rng(0)
    for _ in range(3):
        q = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        f = an.mode_field(GRID, q, mx, my)
        np.testing.assert_allclose(st.step(f).stacked(), an.mode_field(GRID, A @ q, mx, my).stacked(),
                                   atol=1e-11)


def test_symbol_zero_wavenumber_keeps_constants():
    A = an.assemble_symbol(TimeStepper(GRID), 0.0, 0.0)
    const = np.tile([0.3, -1.0, 2.0], 4).astype(complex)
    np.testing.assert_allclose(A @ const, const, atol=1e-14)
    assert an.kernel_dimension(A) >= 3


def test_symbol_metadata():
    st = TimeStepper(GRID, 0.3)
    A = an.assemble_symbol(st, 1.0, 2.0)
    assert A.matrix.shape == (12, 12)
    assert (A.dt, A.kx, A.ky, A.dx, A.dy, A.c) == (st.dt, 1.0, 2.0, 0.1, 0.13, 1.0)
    assert A.tx == pytest.approx(np.exp(0.1j))


@pytest.mark.parametrize("kx, ky", list(_random_wavenumbers(50, 1)))
def test_det_vanishes(kx, ky):
    assert an.stationarity_defect(an.assemble_symbol(TimeStepper(GRID), kx, ky)) <= 1e-10


def test_stationary_mode_degenerate_at_unit_factors():
    np.testing.assert_array_equal(an.stationary_mode(1.0, 1.0, 0.1, 0.2), 0.0)


@pytest.mark.parametrize("seed", range(5))
def test_stationary_mode_structure(seed):
    rng = np.random.default_rng(seed)
    tx, ty = np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
    dx, dy = rng.uniform(0.1, 1.0, 2)
    q = an.stationary_mode(tx, ty, dx, dy, phase="cell")
    assert np.all(q[0::3] == 0)
    uN, vN = q[10], q[11]
    assert abs(uN * (tx - 1) * (ty + 1) / dx + vN * (tx + 1) * (ty - 1) / dy) <= 1e-13
    u, v = q[1], q[2]
    avg = (u * (1 + 4 * ty + ty**2) / ty * (tx - 1) * (tx + 1) / (dx * tx)
           + v * (1 + 4 * tx + tx**2) / tx * (ty - 1) * (ty + 1) / (dy * ty))
    assert abs(avg) <= 1e-12
    uEH, vEH, uEV, vEV = q[4], q[5], q[7], q[8]
    assert abs(uEV * (tx - 1) / (dx * tx) + vEH * (ty - 1) / (dy * ty)) <= 1e-13
    mixed = (uEH * (1 + 6 * ty + ty**2) / ty * (tx - 1) / dx
             + vEV * (1 + 6 * tx + tx**2) / tx * (ty - 1) / dy)
    assert abs(mixed) <= 1e-12


def _sample_cases(n, seed):
    nus = (0.1, 0.45, 0.99)
    for k, (kx, ky) in enumerate(_random_wavenumbers(n, seed)):
        yield kx, ky, nus[k % 3]


@pytest.mark.parametrize("kx, ky, nu", list(_sample_cases(50, 2)))
def test_stationary_mode_is_null_vector(kx, ky, nu):
    st = TimeStepper(GRID, nu)
    A = an.assemble_symbol(st, kx, ky)
    tx, ty = an.phase_factors(kx, ky, GRID.dx, GRID.dy)
    q = an.stationary_mode(tx, ty, GRID.dx, GRID.dy)
    assert np.linalg.norm(A @ q - q) <= 1e-11 * np.linalg.norm(q)


def test_cell_phase_needs_conversion():
    """Without the ownership conversion the amplitudes are not stationary."""
    kx, ky = 7.0, 11.0
    A = an.assemble_symbol(TimeStepper(GRID), kx, ky)
    tx, ty = an.phase_factors(kx, ky, GRID.dx, GRID.dy)
    q = an.stationary_mode(tx, ty, GRID.dx, GRID.dy, phase="cell")
    assert np.linalg.norm(A @ q - q) > 1e-3 * np.linalg.norm(q)
    np.testing.assert_allclose(an.to_storage_phase(q, tx, ty),
                               an.stationary_mode(tx, ty, GRID.dx, GRID.dy))


def test_unknown_phase_convention():
    with pytest.raises(ValueError):
        an.stationary_mode(1j, 1j, 1.0, 1.0, phase="other")


def test_synthesize_zero_mode_rejected():
    with pytest.raises(DegenerateModeError):
        an.synthesize_mode(Grid(6, 6, 1.0, 1.0), 0, 0)


@pytest.mark.parametrize("mode", [(1, 2), (3, 0), (5, 7)])
def test_synthesized_mode_properties(mode):
    g = Grid(16, 16, 0.05, 0.07)
    f = an.synthesize_mode(g, *mode)
    assert f.norm() == pytest.approx(1.0)
    for name in ("avg", "node", "ev", "eh"):
        np.testing.assert_array_equal(getattr(f, name)[0], 0.0)
    div = an.reconstruction_divergence(f)
    assert np.abs(div).max() * 0.05 <= 1e-12
    out = TimeStepper(g).step(f)
    assert np.abs(out.stacked() - f.stacked()).max() <= 1e-12 * f.norm()


@pytest.mark.parametrize("kx, ky", list(_random_wavenumbers(10, 3)))
def test_kernel_dimension_generic(kx, ky):
    assert an.kernel_dimension(an.assemble_symbol(TimeStepper(GRID), kx, ky)) == 1


def test_kernel_dimension_axis_mode_reported(capsys):
    dims = [an.kernel_dimension(an.assemble_symbol(TimeStepper(GRID), kx, 0.0))
            for kx in (3.0, 17.0, 40.0)]
    with capsys.disabled():
        print(f"\nkernel dimension on k_y = 0 modes: {dims}")
    assert all(d >= 1 for d in dims)


def test_divergences_vanish_on_stationary_mode():
    g = Grid(16, 12, 0.05, 0.07)
    f = an.synthesize_mode(g, 3, 5)
    for name, res in an.discrete_divergences(f).items():
        assert np.abs(res).max() * 0.05 <= 1e-12 * f.norm(), name


def test_divergences_of_constant_velocity():
    g = Grid(6, 6, 0.2, 0.3)
    f = DofField.constant(g, [1.0, 2.0, -3.0])
    for res in an.discrete_divergences(f).values():
        np.testing.assert_array_equal(res, 0.0)


def test_divergences_of_random_field_nonzero():
    rng = np.random.default_rng(9)
    g = Grid(6, 6, 0.2, 0.3)
    f = DofField.from_stacked(g, rng.standard_normal((4, 3, 6, 6)))
    for res in an.discrete_divergences(f).values():
        assert np.abs(res).max() > 1e-3


def test_vorticity_first_order_fit():
    order, res = an.vorticity_first_order_check(TimeStepper(GRID), 13.0, 21.0)
    assert 1.8 <= order <= 2.2
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.15)


def test_vorticity_vector_vanishes_at_zero_wavenumber():
    np.testing.assert_array_equal(an.vorticity_first_order(1.0, 1.0, 0.1, 0.2), 0.0)


def test_vorticity_vector_is_left_null_to_first_order():
    """The edge vorticity annihilates the O(dt) part of A - I; the
    literal index placement (p on horizontal edges, u on vertical edges) does not."""
    st = TimeStepper(GRID)
    kx, ky = 13.0, 21.0
    tx, ty = an.phase_factors(kx, ky, GRID.dx, GRID.dy)
    small = [an.assemble_symbol(st, kx, ky, fr * GRID.dt_max).matrix - np.eye(12)
             for fr in (1e-3, 5e-4)]
    A1 = (4 * small[1] - small[0]) / (1e-3 * GRID.dt_max)  # Richardson: first-order term
    w = an.vorticity_first_order(tx, ty, GRID.dx, GRID.dy)
    assert np.linalg.norm(w @ A1) <= 1e-6 * np.linalg.norm(w) * np.linalg.norm(A1)
    literal = np.zeros(12, complex)
    literal[3] = -(ty - 1) / (GRID.dy * ty)
    literal[7] = (tx - 1) / (GRID.dx * tx)
    assert np.linalg.norm(literal @ A1) > 1e-2 * np.linalg.norm(literal) * np.linalg.norm(A1)


def test_spectral_radius_bounded():
    st = TimeStepper(GRID, 0.99)
    radii = [an.spectral_radius(an.assemble_symbol(st, kx, ky)) for kx, ky in _random_wavenumbers(20, 4)]
    assert max(radii) <= 1 + 1e-10


def test_sweep_csv(tmp_path):
    rows = an.symbol_sweep(TimeStepper(GRID), 3, 2)
    assert len(rows) == 6
    path = tmp_path / "sweep.csv"
    an.write_sweep_csv(rows, path)
    with open(path) as fh:
        table = list(csv.reader(fh))
    assert table[0] == ["k_x", "k_y", "dt", "det_scaled", "kernel_dim", "spectral_radius"]
    assert float(table[3][0]) == rows[2][0]
