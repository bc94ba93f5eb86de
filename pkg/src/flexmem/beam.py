"""Euler-Bernoulli beam discretization with Hermite cubic elements.

Two DOFs per node: deflection w (m, positive up) and rotation theta (rad).
Per-element EI and rhoA are sampled at the element midpoint; the mesh snaps
to every width-segment, pillar, electrode and contact boundary so midpoint
sampling is exact within each element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceConfig, width_at
from .errors import MeshError

# 3-point Gauss rule on [0, 1]
GAUSS_XI = np.array([0.5 - np.sqrt(3.0 / 5.0) / 2.0, 0.5,
                     0.5 + np.sqrt(3.0 / 5.0) / 2.0])
GAUSS_W = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass(frozen=True)
class Mesh:
    node_x: np.ndarray          # strictly increasing abscissae
    elements: np.ndarray        # (n_el, 2) node index pairs

    @property
    def n_nodes(self) -> int:
        return len(self.node_x)

    @property
    def n_dofs(self) -> int:
        return 2 * len(self.node_x)

    @property
    def element_lengths(self) -> np.ndarray:
        return self.node_x[self.elements[:, 1]] - self.node_x[self.elements[:, 0]]

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.node_x[self.elements[:, 0]]
                      + self.node_x[self.elements[:, 1]])

    def element_dofs(self, e: int) -> np.ndarray:
        i, j = self.elements[e]
        return np.array([2 * i, 2 * i + 1, 2 * j, 2 * j + 1])

    def node_at(self, x: float, tol: float = 1e-12) -> int:
        idx = int(np.argmin(np.abs(self.node_x - x)))
        if abs(self.node_x[idx] - x) > tol:
            raise MeshError(f"no node at x = {x!r}")
        return idx

    def nodes_in(self, x_start: float, x_end: float) -> np.ndarray:
        tol = 1e-12
        mask = (self.node_x >= x_start - tol) & (self.node_x <= x_end + tol)
        return np.nonzero(mask)[0]

    def elements_in(self, x_start: float, x_end: float) -> np.ndarray:
        mid = self.midpoints
        return np.nonzero((mid > x_start) & (mid < x_end))[0]


def feature_abscissae(cfg: DeviceConfig) -> list[float]:
    feats = {0.0, cfg.profile.length}
    for s in cfg.profile.segments:
        feats.add(s.x_start)
        feats.add(s.x_end)
    for p in cfg.pillars:
        feats.add(p.position)
    for e in cfg.electrodes:
        feats.add(e.x_start)
        feats.add(e.x_end)
    for c in cfg.contacts:
        feats.add(c.x_start)
        feats.add(c.x_end)
    return sorted(feats)


def build_mesh(cfg: DeviceConfig, n_elements: int | None = None) -> Mesh:
    """Mesh with nodes at every feature abscissa and ~n_elements elements.

    Filler nodes are spread by repeatedly splitting the currently largest
    pieces, so element lengths stay as uniform as the features allow. The
    requested count is met exactly unless the features alone exceed it.
    """
    if n_elements is None:
        n_elements = cfg.solver.n_elements
    if n_elements < 10:
        raise MeshError("n_elements must be >= 10")
    feats = feature_abscissae(cfg)
    gaps = np.diff(feats)
    if np.any(gaps < 1e-9):
        i = int(np.argmax(gaps < 1e-9))
        raise MeshError(f"feature abscissae {feats[i]!r} and {feats[i+1]!r} "
                        "closer than 1e-9 m")
    m = len(gaps)
    counts = np.ones(m, dtype=int)
    remaining = n_elements - m
    while remaining > 0:
        pieces = gaps / counts
        top = pieces.max()
        cand = np.nonzero(pieces >= top * (1.0 - 1e-12))[0]
        if len(cand) <= remaining:
            counts[cand] += 1
            remaining -= len(cand)
        else:
            counts[cand[:remaining]] += 1
            remaining = 0
    nodes = [feats[0]]
    for i in range(m):
        xs = np.linspace(feats[i], feats[i + 1], counts[i] + 1)
        nodes.extend(xs[1:])
    node_x = np.asarray(nodes)
    n = len(node_x) - 1
    elements = np.column_stack([np.arange(n), np.arange(1, n + 1)])
    return Mesh(node_x=node_x, elements=elements)


# ---------------------------------------------------------------------------
# element matrices and shape functions

def element_stiffness(EI: float, l: float) -> np.ndarray:
    l2 = l * l
    return (EI / l**3) * np.array([
        [12.0, 6.0 * l, -12.0, 6.0 * l],
        [6.0 * l, 4.0 * l2, -6.0 * l, 2.0 * l2],
        [-12.0, -6.0 * l, 12.0, -6.0 * l],
        [6.0 * l, 2.0 * l2, -6.0 * l, 4.0 * l2]])


def element_mass(rhoA: float, l: float) -> np.ndarray:
    l2 = l * l
    return (rhoA * l / 420.0) * np.array([
        [156.0, 22.0 * l, 54.0, -13.0 * l],
        [22.0 * l, 4.0 * l2, 13.0 * l, -3.0 * l2],
        [54.0, 13.0 * l, 156.0, -22.0 * l],
        [-13.0 * l, -3.0 * l2, -22.0 * l, 4.0 * l2]])


def shape_functions(xi: float, l: float) -> np.ndarray:
    """Hermite cubics on xi in [0, 1] for an element of length l."""
    return np.array([
        1.0 - 3.0 * xi**2 + 2.0 * xi**3,
        l * (xi - 2.0 * xi**2 + xi**3),
        3.0 * xi**2 - 2.0 * xi**3,
        l * (-xi**2 + xi**3)])


def shape_second_derivatives(xi: float, l: float) -> np.ndarray:
    """d2N/dx2 at xi for an element of length l."""
    return np.array([
        (-6.0 + 12.0 * xi) / l**2,
        (-4.0 + 6.0 * xi) / l,
        (6.0 - 12.0 * xi) / l**2,
        (-2.0 + 6.0 * xi) / l])


# ---------------------------------------------------------------------------
# assembly

def _section_properties(cfg: DeviceConfig, mesh: Mesh):
    t = cfg.profile.thickness
    widths = np.array([width_at(cfg.profile, x) for x in mesh.midpoints])
    EI = cfg.material.youngs_modulus * widths * t**3 / 12.0
    rhoA = cfg.material.density * widths * t
    return widths, EI, rhoA


def assemble_stiffness(cfg: DeviceConfig, mesh: Mesh) -> np.ndarray:
    _, EI, _ = _section_properties(cfg, mesh)
    K = np.zeros((mesh.n_dofs, mesh.n_dofs))
    lengths = mesh.element_lengths
    for e in range(len(mesh.elements)):
        ke = element_stiffness(EI[e], lengths[e])
        dofs = mesh.element_dofs(e)
        K[np.ix_(dofs, dofs)] += ke
    return K


def assemble_mass(cfg: DeviceConfig, mesh: Mesh) -> np.ndarray:
    _, _, rhoA = _section_properties(cfg, mesh)
    M = np.zeros((mesh.n_dofs, mesh.n_dofs))
    lengths = mesh.element_lengths
    for e in range(len(mesh.elements)):
        me = element_mass(rhoA[e], lengths[e])
        dofs = mesh.element_dofs(e)
        M[np.ix_(dofs, dofs)] += me
    return M


def consistent_load(mesh: Mesh, q) -> np.ndarray:
    """Consistent nodal loads for a line load q(x) [N/m]; q may be scalar."""
    qf = q if callable(q) else (lambda x, _q=q: _q)
    F = np.zeros(mesh.n_dofs)
    lengths = mesh.element_lengths
    x0 = mesh.node_x[mesh.elements[:, 0]]
    for e in range(len(mesh.elements)):
        l = lengths[e]
        fe = np.zeros(4)
        for xi, wgt in zip(GAUSS_XI, GAUSS_W):
            fe += wgt * l * qf(x0[e] + xi * l) * shape_functions(xi, l)
        F[mesh.element_dofs(e)] += fe
    return F


def recover_stress(cfg: DeviceConfig, mesh: Mesh, w: np.ndarray) -> np.ndarray:
    """Per-element max bending stress sigma = E (t/2) |w''| at the midpoint."""
    if len(w) != mesh.n_dofs:
        raise ValueError(f"deflection field must have {mesh.n_dofs} entries")
    E = cfg.material.youngs_modulus
    t = cfg.profile.thickness
    lengths = mesh.element_lengths
    sigma = np.zeros(len(mesh.elements))
    for e in range(len(mesh.elements)):
        dofs = mesh.element_dofs(e)
        d2 = shape_second_derivatives(0.5, lengths[e])
        sigma[e] = E * (t / 2.0) * abs(d2 @ w[dofs])
    return sigma


def null_space_check(K: np.ndarray, rtol: float = 1e-6) -> int:
    """Number of near-zero stiffness eigenvalues (rigid modes).

    Deflection and rotation DOFs carry different units, so the matrix is
    Jacobi-scaled to a uniform diagonal before thresholding; the count of
    zero eigenvalues is invariant under that congruence.
    """
    dmax = K.diagonal().max()
    d = K.diagonal().copy()
    d[d <= 0.0] = dmax
    scale = np.sqrt(dmax / d)
    Ks = K * np.outer(scale, scale)
    evals = np.linalg.eigvalsh(Ks)
    return int(np.count_nonzero(np.abs(evals) < rtol * dmax))
