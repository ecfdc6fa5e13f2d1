import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emfdtd import (FieldSet, GridSpec, MaterialMap, ParameterError,
                    courant_dt, divergence_h, field_energy, step_e, step_h)
from emfdtd.constants import C0, EPS0, MU0

SQRT3 = math.sqrt(3.0)


class TestCourantDt:
    def test_full_cfl(self):
        assert courant_dt(0.125, 1.0) == pytest.approx(0.125 / (C0 * SQRT3), rel=1e-12)

    def test_scaled_cfl(self):
        assert courant_dt(0.125, 0.99) == pytest.approx(0.99 * 0.125 / (C0 * SQRT3), rel=1e-12)

    def test_small_cell(self):
        assert courant_dt(0.05, 1.0) == pytest.approx(0.05 / (C0 * SQRT3), rel=1e-12)

    @pytest.mark.parametrize("delta,cfl", [(0.0, 1.0), (-1.0, 0.5), (0.1, 0.0), (0.1, 1.01)])
    def test_rejects_bad_arguments(self, delta, cfl):
        with pytest.raises(ParameterError):
            courant_dt(delta, cfl)

    @given(st.floats(1e-4, 10.0), st.floats(1e-3, 1.0))
    def test_bound_property(self, delta, cfl):
        dt = courant_dt(delta, cfl)
        assert dt * C0 * SQRT3 <= cfl * delta * (1 + 1e-12)


class TestGridSpec:
    def test_cfl_above_one_rejected(self):
        dt = courant_dt(0.1, 1.0) * 1.01
        with pytest.raises(ParameterError):
            GridSpec(10, 10, 10, 0.1, dt, 100)

    def test_too_few_cells_rejected(self):
        with pytest.raises(ParameterError):
            GridSpec(3, 10, 10, 0.1, courant_dt(0.1, 0.5), 10)


class TestPaintBlock:
    def test_zero_volume_box_changes_nothing(self):
        mat = MaterialMap(8, 8, 8, 0.5)
        before = [a.copy() for a in mat.eps]
        mat.paint_block((1.0, 1.0, 1.0), (1.0, 2.0, 2.0), 5.0, 0.1)
        assert all(np.array_equal(a, b) for a, b in zip(mat.eps, before))

    def test_soil_halfspace_edges_below_top(self):
        # 10 x 5 x 7 m volume at 0.125 m, soil below z = 4 m; boxes are
        # half-open per axis, so edges centered on an upper face stay out
        mat = MaterialMap(80, 40, 56, 0.125)
        mat.paint_block((0, 0, 0), (10, 5, 4), 16.381, 0.002684)
        k_top = int(4 / 0.125)
        assert np.all(mat.eps[0][:, :-1, :k_top] == pytest.approx(16.381 * EPS0))
        assert np.all(mat.eps[0][:, :, k_top:] == pytest.approx(EPS0))
        assert np.all(mat.sigma[0][:, :-1, :k_top] == 0.002684)
        # Ez edges (midpoint at half z) below the surface
        assert np.all(mat.eps[2][:-1, :-1, :k_top] == pytest.approx(16.381 * EPS0))
        assert np.all(mat.eps[2][:, :, k_top:] == pytest.approx(EPS0))

    def test_last_writer_wins_on_overlap(self):
        mat = MaterialMap(8, 8, 8, 0.5)
        mat.paint_block((0, 0, 0), (4, 4, 4), 4.0, 0.1)
        mat.paint_block((0, 0, 0), (4, 4, 2), 9.0, 0.2)
        assert mat.eps[0][0, 1, 1] == pytest.approx(9.0 * EPS0)
        assert mat.sigma[0][0, 1, 1] == 0.2
        assert mat.eps[0][0, 1, 5] == pytest.approx(4.0 * EPS0)

    def test_box_outside_volume_rejected(self):
        mat = MaterialMap(8, 8, 8, 0.5)
        with pytest.raises(ParameterError):
            mat.paint_block((0, 0, 0), (5.0, 1.0, 1.0), 2.0, 0.0)

    def test_unknown_debye_name_rejected(self):
        mat = MaterialMap(8, 8, 8, 0.5)
        with pytest.raises(ParameterError, match="deb9"):
            mat.paint_block((0, 0, 0), (1, 1, 1), 2.0, 0.0, "deb9")


def _vacuum(n=8, delta=1.0):
    spec = GridSpec(n, n, n, delta, 1e-9, 10)
    return spec, MaterialMap(n, n, n, delta), FieldSet.zeros(spec)


class TestStepE:
    def test_zero_h_zero_sigma_leaves_e(self, rng):
        spec, mat, f = _vacuum()
        f.ex[:] = rng.standard_normal(f.ex.shape)
        before = f.ex.copy()
        step_e(f, mat, 1e-9)
        assert np.array_equal(f.ex, before)

    def test_single_hz_curl_increment(self):
        spec, mat, f = _vacuum()
        f.hz[4, 4, 4] = 1.0
        step_e(f, mat, 1e-9)
        expected = 1e-9 / EPS0  # (dt/eps) * dHz/dy with unit cell
        assert f.ex[4, 4, 4] == pytest.approx(expected, rel=1e-12)
        assert f.ex[4, 5, 4] == pytest.approx(-expected, rel=1e-12)
        assert expected == pytest.approx(112.94, rel=1e-4)

    def test_semi_implicit_decay_factor(self):
        spec, mat, f = _vacuum()
        sigma = 0.02
        mat.paint_block((0, 0, 0), (8, 8, 8), 1.0, sigma)
        f.ex[:, 1:-1, 1:-1] = 1.0
        dt = 1e-9
        step_e(f, mat, dt)
        a = sigma * dt / (2 * EPS0)
        assert f.ex[3, 3, 3] == pytest.approx((1 - a) / (1 + a), rel=1e-12)


class TestStepH:
    def test_zero_e_leaves_h(self, rng):
        spec, mat, f = _vacuum()
        f.hx[:] = rng.standard_normal(f.hx.shape)
        before = f.hx.copy()
        step_h(f, mat, 1e-9)
        assert np.array_equal(f.hx, before)

    def test_single_ey_step_increment(self):
        spec, mat, f = _vacuum()
        f.ey[4, 4, 5:] = 1.0  # unit step along z
        step_h(f, mat, 1e-9)
        expected = 1e-9 / MU0
        assert f.hx[4, 4, 4] == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(7.9577e-4, rel=1e-4)

    def test_uniform_e_has_zero_curl(self):
        spec, mat, f = _vacuum()
        f.ex[:] = 5.0
        f.ey[:] = -2.0
        f.ez[:] = 1.0
        step_h(f, mat, 1e-9)
        for c in range(3):
            assert np.all(f.h(c) == 0.0)


def _div_free_fields(n, delta, rng):
    """Random fields with discretely divergence-free H (curl of a random
    potential) and tangential-E-clean walls."""
    spec = GridSpec(n, n, n, delta, courant_dt(delta, 0.99), 10)
    mat = MaterialMap(n, n, n, delta)
    f = FieldSet.zeros(spec)
    pot = FieldSet.zeros(spec)
    pot.ex[:] = rng.standard_normal(pot.ex.shape)
    pot.ey[:] = rng.standard_normal(pot.ey.shape)
    pot.ez[:] = rng.standard_normal(pot.ez.shape)
    step_h(pot, mat, MU0 * delta)  # H = curl(potential), scale irrelevant
    f.hx, f.hy, f.hz = pot.hx, pot.hy, pot.hz
    for arr, c in ((f.ex, 0), (f.ey, 1), (f.ez, 2)):
        arr[:] = rng.standard_normal(arr.shape) * 0.01
    f.ex[:, [0, -1], :] = 0.0; f.ex[:, :, [0, -1]] = 0.0
    f.ey[[0, -1], :, :] = 0.0; f.ey[:, :, [0, -1]] = 0.0
    f.ez[[0, -1], :, :] = 0.0; f.ez[:, [0, -1], :] = 0.0
    return spec, mat, f


class TestConservation:
    def test_div_h_conserved(self, rng):
        spec, mat, f = _div_free_fields(12, 0.1, rng)
        for _ in range(300):
            step_h(f, mat, spec.dt)
            step_e(f, mat, spec.dt)
        h_scale = max(np.abs(f.h(c)).max() for c in range(3))
        assert np.abs(divergence_h(f, 0.1)).max() * 0.1 / h_scale < 1e-12

    def test_energy_bounded_short(self, rng):
        # Q = sum(eps E(n)^2)/2 + sum(mu H(n-1/2) H(n+1/2))/2 is conserved
        # exactly by the lossless leapfrog
        spec, mat, f = _div_free_fields(12, 0.1, rng)
        energies = []
        for _ in range(500):
            h_before = FieldSet(f.ex, f.ey, f.ez, f.hx.copy(), f.hy.copy(), f.hz.copy())
            step_h(f, mat, spec.dt)
            energies.append(field_energy(f, h_before, f, mat))
            step_e(f, mat, spec.dt)
        energies = np.array(energies)
        assert np.abs(energies - energies[0]).max() / abs(energies[0]) < 1e-9
