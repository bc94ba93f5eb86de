"""Electrostatic loading, tangent consistency, capacitance, lumped pull-in.

The rigid parallel-plate results F = eps0 A V^2 / (2 d^2) and
C = eps0 A / d serve as closed-form oracles; the Newton tangent is checked
against central finite differences.
"""

import math

import numpy as np
import pytest

from flexmem.beam import build_mesh
from flexmem.electrostatics import (EPS0, Footprint, capacitance,
                                    capacitance_report, electrostatic_forces,
                                    electrostatic_tangent, line_footprint,
                                    loads_and_tangent, pull_in_lumped,
                                    state_footprints)
from flexmem.errors import GapCollapse

from conftest import single_electrode_config


@pytest.fixture(scope="module")
def plate():
    cfg = single_electrode_config(100e-6, 300e-6, gap=3e-6, t_d=0.0)
    mesh = build_mesh(cfg, 40)
    return cfg, mesh


class TestForces:
    def test_zero_voltage_zero_load(self, plate):
        cfg, mesh = plate
        load = electrostatic_forces(cfg, mesh, np.zeros(mesh.n_dofs),
                                    ("E1",), 0.0)
        assert np.all(load.forces == 0.0)

    def test_rigid_plate_total_force(self, plate):
        cfg, mesh = plate
        V, d = 5.0, 3e-6
        load = electrostatic_forces(cfg, mesh, np.zeros(mesh.n_dofs),
                                    ("E1",), V)
        A = 200e-6 * 320e-6
        exact = EPS0 * A * V**2 / (2 * d**2)
        total = -load.forces[0::2].sum()
        assert abs(total - exact) / exact < 1e-10

    def test_forces_point_toward_electrode(self, plate):
        cfg, mesh = plate
        load = electrostatic_forces(cfg, mesh, np.zeros(mesh.n_dofs),
                                    ("E1",), 5.0)
        assert load.forces[0::2].sum() < 0.0

    def test_voltage_squared_scaling(self, plate):
        cfg, mesh = plate
        w = np.zeros(mesh.n_dofs)
        f1 = electrostatic_forces(cfg, mesh, w, ("E1",), 5.0).forces
        f2 = electrostatic_forces(cfg, mesh, w, ("E1",), 10.0).forces
        assert np.allclose(f2, 4.0 * f1, rtol=1e-13)

    def test_closer_gap_larger_force(self, plate):
        cfg, mesh = plate
        w = np.zeros(mesh.n_dofs)
        f_far = electrostatic_forces(cfg, mesh, w, ("E1",), 5.0).forces
        w_close = w.copy()
        w_close[0::2] = -1e-6
        f_close = electrostatic_forces(cfg, mesh, w_close, ("E1",), 5.0).forces
        assert -f_close[0::2].sum() > -f_far[0::2].sum()

    def test_gap_collapse_raises(self, plate):
        cfg, mesh = plate
        w = np.zeros(mesh.n_dofs)
        w[0::2] = -2.9999e-6
        with pytest.raises(GapCollapse):
            electrostatic_forces(cfg, mesh, w, ("E1",), 5.0)

    def test_fringing_strictly_increases_force(self, plate):
        cfg, mesh = plate
        w = np.zeros(mesh.n_dofs)
        f0 = electrostatic_forces(cfg, mesh, w, ("E1",), 5.0).forces
        f1 = electrostatic_forces(cfg, mesh, w, ("E1",), 5.0,
                                  fringing=True).forces
        assert -f1[0::2].sum() > -f0[0::2].sum()


class TestTangent:
    def test_matches_finite_differences(self, plate):
        cfg, mesh = plate
        rng = np.random.default_rng(0)
        w = 1e-7 * rng.standard_normal(mesh.n_dofs)
        w[1::2] *= 1e-2
        fps = state_footprints(cfg, ("E1",))
        _, dF = loads_and_tangent(cfg, mesh, w, fps, 5.0)
        h = 1e-12
        dF_fd = np.zeros_like(dF)
        for j in range(mesh.n_dofs):
            e = np.zeros(mesh.n_dofs)
            e[j] = h
            Fp, _ = loads_and_tangent(cfg, mesh, w + e, fps, 5.0)
            Fm, _ = loads_and_tangent(cfg, mesh, w - e, fps, 5.0)
            dF_fd[:, j] = (Fp - Fm) / (2 * h)
        err = np.linalg.norm(dF - dF_fd) / np.linalg.norm(dF_fd)
        assert err < 1e-6

    def test_consistency_over_random_states(self, plate):
        cfg, mesh = plate
        rng = np.random.default_rng(3)
        fps = state_footprints(cfg, ("E1",))
        h = 1e-12
        for _ in range(10):
            w = 2e-7 * rng.standard_normal(mesh.n_dofs)
            w[1::2] *= 1e-2
            _, dF = loads_and_tangent(cfg, mesh, w, fps, 5.0)
            cols = rng.integers(0, mesh.n_dofs, size=8)
            for j in cols:
                e = np.zeros(mesh.n_dofs)
                e[j] = h
                Fp, _ = loads_and_tangent(cfg, mesh, w + e, fps, 5.0)
                Fm, _ = loads_and_tangent(cfg, mesh, w - e, fps, 5.0)
                col_fd = (Fp - Fm) / (2 * h)
                denom = np.linalg.norm(col_fd)
                if denom > 0:
                    assert np.linalg.norm(dF[:, j] - col_fd) / denom < 1e-5

    def test_zero_voltage_zero_operator(self, plate):
        cfg, mesh = plate
        dK = electrostatic_tangent(cfg, mesh, np.zeros(mesh.n_dofs),
                                   ("E1",), 0.0)
        assert np.all(dK == 0.0)

    def test_softening_sign(self, plate):
        cfg, mesh = plate
        rng = np.random.default_rng(1)
        w = 1e-7 * rng.standard_normal(mesh.n_dofs)
        dK = electrostatic_tangent(cfg, mesh, w, ("E1",), 5.0)
        for _ in range(5):
            u = rng.standard_normal(mesh.n_dofs)
            assert u @ dK @ u <= 1e-20


class TestCapacitance:
    def test_nitride_only_patch(self):
        """Flat membrane seated on 100 nm nitride over 60 um x 100 um."""
        cfg = single_electrode_config(100e-6, 200e-6, gap=1e-6, t_d=100e-9,
                                      width=60e-6)
        mesh = build_mesh(cfg, 40)
        fp = Footprint(100e-6, 200e-6, 0.0, 100e-9, 7.5, 1.0)
        C = capacitance(cfg, mesh, np.zeros(mesh.n_dofs), fp)
        A = 60e-6 * 100e-6
        exact = EPS0 * 7.5 * A / 100e-9
        assert abs(C - exact) / exact < 0.005
        assert abs(exact - 3.98e-12) / 3.98e-12 < 0.01

    def test_pure_air_gap(self, plate):
        cfg, mesh = plate
        fp = Footprint(100e-6, 300e-6, 3e-6, 0.0, 7.5, 1.0)
        C = capacitance(cfg, mesh, np.zeros(mesh.n_dofs), fp)
        A = 200e-6 * 320e-6
        assert abs(C - EPS0 * A / 3e-6) / (EPS0 * A / 3e-6) < 1e-10

    def test_monotone_decreasing_in_gap(self, plate):
        cfg, mesh = plate
        w = np.zeros(mesh.n_dofs)
        caps = [capacitance(cfg, mesh, w,
                            Footprint(100e-6, 300e-6, g, 0.0, 7.5, 1.0))
                for g in (1e-6, 2e-6, 4e-6)]
        assert caps[0] > caps[1] > caps[2]

    def test_lifted_membrane_over_line(self, default_cfg):
        """Membrane 4 um above a 3 um line gap: C ~ eps0 A / 7 um."""
        import dataclasses
        line = default_cfg.lines[0]
        contacts = tuple(dataclasses.replace(c, clearance=3e-6)
                         if c.kind == "line" else c
                         for c in default_cfg.contacts)
        cfg = dataclasses.replace(default_cfg, contacts=contacts)
        mesh = build_mesh(cfg)
        w = np.zeros(mesh.n_dofs)
        w[0::2] = 4e-6
        C = capacitance(cfg, mesh, w, line_footprint(cfg, 0))
        from flexmem.device import width_at
        from scipy.integrate import quad
        A, _ = quad(lambda x: width_at(cfg.profile, x), line.x_start,
                    line.x_end)
        exact = EPS0 * A / 7.0e-6
        assert abs(C - exact) / exact < 0.10

    def test_collapse_raises(self, plate):
        cfg, mesh = plate
        w = np.zeros(mesh.n_dofs)
        w[0::2] = -3.5e-6
        fp = Footprint(100e-6, 300e-6, 3e-6, 0.0, 7.5, 1.0)
        with pytest.raises(GapCollapse):
            capacitance(cfg, mesh, w, fp)

    def test_report_totals(self, default_cfg):
        mesh = build_mesh(default_cfg)
        rep = capacitance_report(default_cfg, mesh, np.zeros(mesh.n_dofs))
        assert set(rep.per_electrode) == {"E1", "E2", "E3", "E4"}
        assert len(rep.per_line) == 2
        assert all(c > 0 for c in rep.per_electrode.values())
        total = sum(rep.per_electrode.values()) + sum(rep.per_line)
        assert abs(rep.total - total) < 1e-18


class TestPullInLumped:
    def test_closed_form_and_bisection_oracle(self):
        """V_pi from the formula matches a 1-DOF force-balance bisection."""
        k, A, g = 10.0, 1e-7, 3e-6
        v_pi, w_pi = pull_in_lumped(k, A, g)

        def has_equilibrium(V):
            # stable root of k x = eps0 A V^2 / (2 (g - x)^2) below g/3
            xs = np.linspace(0.0, g / 3.0, 20001)
            return np.any(k * xs >= EPS0 * A * V**2 / (2 * (g - xs)**2))

        lo, hi = 0.1, 50.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if has_equilibrium(mid):
                lo = mid
            else:
                hi = mid
        assert abs(v_pi - lo) / lo < 1e-3
        assert v_pi == pytest.approx(9.5054, rel=1e-3)

    def test_travel_is_one_third_gap(self):
        _, w_pi = pull_in_lumped(5.0, 2e-8, 3e-6)
        assert w_pi == 3e-6 / 3.0

    def test_gap_scaling_three_halves(self):
        v1, _ = pull_in_lumped(10.0, 1e-7, 1e-6)
        v4, _ = pull_in_lumped(10.0, 1e-7, 4e-6)
        assert v4 / v1 == pytest.approx(8.0, rel=1e-12)
