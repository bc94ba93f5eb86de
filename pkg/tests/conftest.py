import numpy as np
import pytest

from flexmem import device as dv


def bare_config(n_elements=40, length=600e-6, thickness=2e-6, width=320e-6,
                E=78e9, rho=19300.0):
    """Uniform beam with no pillars/electrodes/contacts (oracle tests)."""
    mat = dv.MaterialProps(youngs_modulus=E, poisson_ratio=0.44, density=rho,
                           thermal_expansion=14.2e-6,
                           dielectric_rel_permittivity=7.5,
                           conductivity=4.1e7)
    prof = dv.MembraneProfile(length, thickness,
                              (dv.Segment(0.0, length, width),))
    states = dv.ActuationStateMap(odd=("E1", "E3"), even=("E2", "E4"))
    return dv.DeviceConfig(material=mat, profile=prof, pillars=(),
                           electrodes=(), contacts=(), states=states,
                           solver=dv.SolverSettings(n_elements=n_elements))


def single_electrode_config(x_start=100e-6, x_end=300e-6, gap=3e-6,
                            t_d=0.0, n_elements=40, **kw):
    cfg = bare_config(n_elements=n_elements, **kw)
    el = dv.Electrode("E1", x_start, x_end, gap, t_d)
    states = dv.ActuationStateMap(odd=("E1",), even=("E2", "E4"))
    import dataclasses
    return dataclasses.replace(cfg, electrodes=(el,), states=states)


@pytest.fixture(scope="session")
def default_cfg():
    return dv.default_config()


@pytest.fixture(scope="session")
def beam_props():
    cfg = bare_config()
    E = cfg.material.youngs_modulus
    b = cfg.profile.segments[0].width
    t = cfg.profile.thickness
    L = cfg.profile.length
    return dict(E=E, b=b, t=t, L=L, EI=E * b * t**3 / 12.0,
                rhoA=cfg.material.density * b * t)


def pin_dofs(K, dofs):
    """Rows/cols removed; returns (reduced matrix, free index array)."""
    free = np.setdiff1d(np.arange(K.shape[0]), dofs)
    return K[np.ix_(free, free)], free
