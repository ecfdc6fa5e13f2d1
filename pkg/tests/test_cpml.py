import math

import numpy as np
import pytest

from emfdtd import (CpmlParams, CpmlRegion, FieldSet, GridSpec, MaterialMap,
                    ParameterError, Probe, Simulation, Source, Waveform,
                    courant_dt, cpml_profiles)
from emfdtd.constants import ETA0


class TestProfiles:
    def test_depth_must_be_whole_cells(self):
        with pytest.raises(ParameterError):
            CpmlParams(depth_m=1.03).cells(0.1)

    def test_minimum_four_cells(self):
        with pytest.raises(ParameterError):
            CpmlParams(depth_m=0.2).cells(0.1)

    def test_kappa_one_everywhere_when_unstretched(self):
        tables = cpml_profiles(CpmlParams(depth_m=1.0, kappa_max=1.0), 0.1, 1e-10)
        assert np.all(tables.node[1] == 1.0)
        assert np.all(tables.half[1] == 1.0)

    def test_interface_has_zero_sigma_and_c(self):
        tables = cpml_profiles(CpmlParams(depth_m=1.0, alpha_max=0.05), 0.1, 1e-10)
        sigma, kappa, alpha, b, c = tables.node
        assert sigma[0] == 0.0
        assert c[0] == 0.0

    def test_wall_sigma_matches_grading(self):
        m = 3.0
        params = CpmlParams(depth_m=1.0, sigma_factor=1.3, poly_order=m)
        tables = cpml_profiles(params, 0.1, 1e-10)
        sigma_opt = 0.8 * (m + 1) / (ETA0 * 0.1)
        assert tables.node[0][-1] == pytest.approx(1.3 * sigma_opt, rel=1e-12)

    def test_kappa_grading_midpoint(self):
        params = CpmlParams(depth_m=1.0, kappa_max=5.0, poly_order=2.0)
        tables = cpml_profiles(params, 0.1, 1e-10)
        d = 0.5
        assert tables.node[1][5] == pytest.approx(1 + 4.0 * d**2, rel=1e-12)


class TestPsiRecursion:
    def test_zero_fields_stay_exactly_zero(self):
        spec = GridSpec(20, 20, 20, 0.1, courant_dt(0.1, 0.99), 10)
        mat = MaterialMap(20, 20, 20, 0.1)
        sim = Simulation(spec, mat, cpml=CpmlParams(depth_m=0.5))
        for _ in range(20):
            sim.step()
        for c in range(3):
            assert np.all(sim.fields.e(c) == 0.0)
            assert np.all(sim.fields.h(c) == 0.0)

    def test_psi_decays_geometrically_with_zero_fields(self):
        spec = GridSpec(20, 20, 20, 0.1, courant_dt(0.1, 0.99), 10)
        mat = MaterialMap(20, 20, 20, 0.1)
        sim = Simulation(spec, mat, cpml=CpmlParams(depth_m=0.5, alpha_max=0.05))
        slab = sim.region.state.e_slabs[0]
        slab.psi[:] = 1.0
        sim.step()
        assert np.allclose(slab.psi, np.broadcast_to(slab.b, slab.psi.shape))
        sim.step()
        assert np.allclose(slab.psi, np.broadcast_to(slab.b**2, slab.psi.shape))

    def test_degenerate_profile_equals_plain_update(self, rng):
        # sigma = 0 (sigma_factor -> 0 limit via tiny value), alpha = 0,
        # kappa = 1: the layer must not alter the update at all
        n = 16
        spec = GridSpec(n, n, n, 0.1, courant_dt(0.1, 0.99), 10)

        def build(cp):
            mat = MaterialMap(n, n, n, 0.1)
            sim = Simulation(spec, mat, cpml=cp)
            sim.fields.ex[:] = init
            return sim

        init = rng.standard_normal((n, n + 1, n + 1))
        init[:, [0, -1], :] = 0.0
        init[:, :, [0, -1]] = 0.0
        degenerate = CpmlParams(depth_m=0.5, kappa_max=1.0, sigma_factor=1e-300,
                                alpha_max=0.0)
        sim_a = build(degenerate)
        sim_b = build(None)
        for _ in range(15):
            sim_a.step()
            sim_b.step()
        for c in range(3):
            np.testing.assert_allclose(sim_a.fields.e(c), sim_b.fields.e(c),
                                       rtol=0, atol=1e-18)


def gaussian_derivative_samples(n, dt, sigma_t, t0):
    t = np.arange(n) * dt
    return tuple(-(t - t0) / sigma_t**2 * np.exp(-0.5 * ((t - t0) / sigma_t) ** 2))


class TestAbsorption:
    def test_late_time_decay_with_compact_source(self):
        delta = 0.1
        dt = courant_dt(delta, 0.99)
        steps = 2500
        spec = GridSpec(30, 30, 30, delta, dt, steps)
        mat = MaterialMap(30, 30, 30, delta)
        sig = 6 * delta / 3e8
        wf = Waveform(kind="sampled", sample_dt=dt,
                      samples=gaussian_derivative_samples(4000, dt, sig, 5 * sig))
        src = Source(kind="current", span=((1.5, 1.5, 1.5), (1.5, 1.5, 1.6)),
                     r_internal=0.0, waveform=wf)
        probe = Probe(kind="voltage", span=((1.7, 1.5, 1.5), (1.7, 1.5, 1.6)), name="v")
        sim = Simulation(spec, mat, cpml=CpmlParams(depth_m=1.0, alpha_max=0.008),
                         sources=(src,), probes=(probe,), record_every=1)
        rec = sim.run()
        v = rec[:, 1]
        peak = np.abs(v).max()
        tail = np.abs(v[-200:]).max()
        assert tail < 1e-4 * peak
