"""Beam FEM against analytic Euler-Bernoulli oracles.

Benchmarks:
  cantilever tip load:     w_tip = P L^3 / (3 EI)
  simply supported, UDL:   w_mid = 5 q L^4 / (384 EI)
  cantilever root stress:  sigma = 6 P L / (b t^2)
"""

import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

from flexmem import device as dv
from flexmem.beam import (assemble_mass, assemble_stiffness, build_mesh,
                          consistent_load, null_space_check, recover_stress)
from flexmem.errors import MeshError

from conftest import bare_config, pin_dofs


def solve_cantilever_tip(cfg, n, P=1e-6):
    mesh = build_mesh(cfg, n)
    K = assemble_stiffness(cfg, mesh)
    F = np.zeros(mesh.n_dofs)
    F[-2] = -P
    Kr, free = pin_dofs(K, [0, 1])
    w = np.zeros(mesh.n_dofs)
    w[free] = np.linalg.solve(Kr, F[free])
    return mesh, w


class TestMesh:
    def test_default_count_and_endpoints(self, default_cfg):
        mesh = build_mesh(default_cfg, 60)
        assert mesh.n_nodes == 61
        assert mesh.node_x[0] == 0.0
        assert mesh.node_x[-1] == 600e-6

    def test_feature_snap(self, default_cfg):
        mesh = build_mesh(default_cfg, 60)
        for p in default_cfg.pillars:
            assert np.min(np.abs(mesh.node_x - p.position)) < 1e-15

    def test_uniform_profile_equal_elements(self):
        cfg = bare_config(n_elements=10)
        mesh = build_mesh(cfg, 10)
        lengths = mesh.element_lengths
        assert np.allclose(lengths, 600e-6 / 10, rtol=1e-15)

    def test_close_features_rejected(self, default_cfg):
        pillars = list(default_cfg.pillars)
        pillars[0] = dv.Pillar(position=pillars[1].position + 5e-10)
        cfg = dataclasses.replace(default_cfg, pillars=tuple(pillars))
        with pytest.raises(MeshError):
            build_mesh(cfg, 60)


class TestStiffness:
    def test_symmetry_exact(self, default_cfg):
        mesh = build_mesh(default_cfg, 60)
        K = assemble_stiffness(default_cfg, mesh)
        assert np.array_equal(K, K.T)

    def test_cantilever_tip_deflection(self, beam_props):
        cfg = bare_config(40)
        mesh, w = solve_cantilever_tip(cfg, 40)
        P, L, EI = 1e-6, beam_props["L"], beam_props["EI"]
        exact = -P * L**3 / (3 * EI)
        assert abs(w[-2] - exact) / abs(exact) < 1e-3

    def test_simply_supported_udl(self, beam_props):
        cfg = bare_config(40)
        mesh = build_mesh(cfg, 40)
        K = assemble_stiffness(cfg, mesh)
        q = 1.0
        F = consistent_load(mesh, -q)
        Kr, free = pin_dofs(K, [0, mesh.n_dofs - 2])
        w = np.zeros(mesh.n_dofs)
        w[free] = np.linalg.solve(Kr, F[free])
        L, EI = beam_props["L"], beam_props["EI"]
        mid = w[2 * mesh.node_at(L / 2)]
        exact = -5 * q * L**4 / (384 * EI)
        assert abs(mid - exact) / abs(exact) < 1e-3

    def test_rayleigh_quotients_nonnegative(self, default_cfg):
        mesh = build_mesh(default_cfg, 40)
        K = assemble_stiffness(default_cfg, mesh)
        rng = np.random.default_rng(42)
        for _ in range(10):
            u = rng.standard_normal(mesh.n_dofs)
            assert u @ K @ u >= -1e-6 * np.abs(u @ K @ u)

    def test_tapered_convergence_rate(self):
        """Tip-deflection error drops at least 4x from 20 to 40 elements.

        Uniform sections are nodally exact, so the rate is measured on a
        linearly tapered width with a unit-load quadrature oracle.
        """
        L, t, E = 600e-6, 2e-6, 78e9
        b0, b1 = 320e-6, 120e-6

        def width(x):
            return b0 + (b1 - b0) * x / L

        # element matrices with the true taper sampled at midpoints, as the
        # assembler does for piecewise profiles
        from flexmem.beam import element_stiffness

        def tip_error(n):
            xs = np.linspace(0.0, L, n + 1)
            ndof = 2 * (n + 1)
            K = np.zeros((ndof, ndof))
            for e in range(n):
                le = xs[e + 1] - xs[e]
                EI = E * width(0.5 * (xs[e] + xs[e + 1])) * t**3 / 12.0
                ke = element_stiffness(EI, le)
                dofs = [2 * e, 2 * e + 1, 2 * e + 2, 2 * e + 3]
                K[np.ix_(dofs, dofs)] += ke
            P = 1e-6
            F = np.zeros(ndof)
            F[-2] = -P
            free = np.arange(2, ndof)
            w = np.zeros(ndof)
            w[free] = np.linalg.solve(K[np.ix_(free, free)], F[free])
            # unit-load theorem oracle: delta = int M m / EI dx
            exact, _ = quad(lambda x: (P * (L - x)) * (L - x)
                            / (E * width(x) * t**3 / 12.0), 0.0, L, limit=200)
            return abs(-w[-2] - exact) / exact

        e20, e40 = tip_error(20), tip_error(40)
        assert e40 < e20 / 4.0

    def test_mirror_profile_transforms_stiffness(self, default_cfg):
        mesh = build_mesh(default_cfg, 120)
        K = assemble_stiffness(default_cfg, mesh)
        mcfg = dv.mirror_config(default_cfg)
        mmesh = build_mesh(mcfg, 120)
        assert np.allclose(mmesh.node_x,
                           default_cfg.profile.length - mesh.node_x[::-1],
                           atol=1e-18)
        Km = assemble_stiffness(mcfg, mmesh)
        n = mesh.n_nodes
        # permutation reversing nodes with rotation sign flip
        P = np.zeros((2 * n, 2 * n))
        for i in range(n):
            P[2 * i, 2 * (n - 1 - i)] = 1.0
            P[2 * i + 1, 2 * (n - 1 - i) + 1] = -1.0
        Kt = P @ Km @ P.T
        assert np.allclose(Kt, K, rtol=1e-12, atol=1e-12 * K.diagonal().max())


class TestMass:
    def test_rigid_translation_total_mass(self, default_cfg):
        mesh = build_mesh(default_cfg, 60)
        M = assemble_mass(default_cfg, mesh)
        u = np.zeros(mesh.n_dofs)
        u[0::2] = 1.0
        rho, t = default_cfg.material.density, default_cfg.profile.thickness
        exact = rho * t * sum(s.width * (s.x_end - s.x_start)
                              for s in default_cfg.profile.segments)
        assert abs(u @ M @ u - exact) / exact < 1e-12

    def test_positive_definite(self, default_cfg):
        mesh = build_mesh(default_cfg, 60)
        M = assemble_mass(default_cfg, mesh)
        np.linalg.cholesky(M)  # raises if not SPD

    def test_mass_linear_in_thickness(self):
        cfg1 = bare_config(thickness=2e-6)
        cfg2 = bare_config(thickness=4e-6)
        mesh = build_mesh(cfg1, 20)
        M1 = assemble_mass(cfg1, mesh)
        M2 = assemble_mass(cfg2, build_mesh(cfg2, 20))
        assert np.allclose(M2, 2 * M1, rtol=1e-14)


class TestStress:
    def test_zero_field_zero_stress(self, default_cfg):
        mesh = build_mesh(default_cfg, 40)
        sigma = recover_stress(default_cfg, mesh, np.zeros(mesh.n_dofs))
        assert np.all(sigma == 0.0)

    def test_cantilever_root_stress(self, beam_props):
        cfg = bare_config(40)
        mesh, w = solve_cantilever_tip(cfg, 40)
        sigma = recover_stress(cfg, mesh, w)
        P, L = 1e-6, beam_props["L"]
        b, t = beam_props["b"], beam_props["t"]
        exact = 6 * P * L / (b * t**2)
        assert abs(sigma[0] - exact) / exact < 0.02

    def test_stress_linear_in_deflection(self, default_cfg):
        mesh = build_mesh(default_cfg, 40)
        rng = np.random.default_rng(7)
        w = 1e-6 * rng.standard_normal(mesh.n_dofs)
        s1 = recover_stress(default_cfg, mesh, w)
        s2 = recover_stress(default_cfg, mesh, 2 * w)
        assert np.allclose(s2, 2 * s1, rtol=1e-13)


class TestNullSpace:
    def test_free_free_two_rigid_modes(self, default_cfg):
        mesh = build_mesh(default_cfg, 40)
        K = assemble_stiffness(default_cfg, mesh)
        assert null_space_check(K) == 2

    def test_pinning_removes_modes(self, default_cfg):
        mesh = build_mesh(default_cfg, 40)
        K = assemble_stiffness(default_cfg, mesh)
        kmax = K.diagonal().max()

        def pinned(K, dofs):
            Kp = K.copy()
            for d in dofs:
                Kp[d, :] = 0.0
                Kp[:, d] = 0.0
                Kp[d, d] = kmax
            return Kp

        assert null_space_check(pinned(K, [0])) == 1
        assert null_space_check(pinned(K, [0, mesh.n_dofs - 2])) == 0
