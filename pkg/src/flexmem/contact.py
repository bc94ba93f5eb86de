"""Unilateral penalty contact: pillars and lines from below, stops from
above, plus the dielectric surface of every electrode (the membrane bottoms
out on the nitride there). Line contacts can adhere with a constant-force
stiction model using a 50/100 nm engage/release hysteresis band.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beam import Mesh, assemble_stiffness
from .device import DeviceConfig, width_at

FROM_BELOW = 1
FROM_ABOVE = -1

ENGAGE_GAP = 50e-9    # adhesion engages below this gap
RELEASE_GAP = 100e-9  # and lets go above this one
CONTACT_NEAR = 50e-9  # "in contact" band for extent reporting

# Penalty base in N/m per node. Scaling the stiffness-matrix diagonal
# instead makes the wall stiffness grow like 1/element^3 and leaves Newton
# no usable exploration room on fine meshes; a fixed base keeps penetration
# under a nanometre for mN-scale contact loads at the default scale of 1e3.
PENALTY_BASE = 1e4


@dataclass(frozen=True)
class ContactEntry:
    node: int
    x: float
    kind: str              # pillar | line | stop | electrode
    target_index: int
    clearance: float
    direction: int         # FROM_BELOW or FROM_ABOVE
    trib_length: float     # tributary footprint length of the node
    adhesion_force: float  # N, lines only


@dataclass(frozen=True)
class ContactSet:
    entries: tuple[ContactEntry, ...]
    penalty: float         # N/m per node
    n_dofs: int
    regularization: float  # weak bilateral spring at pillar/stop nodes

    def by_kind(self, kind: str) -> tuple[ContactEntry, ...]:
        return tuple(e for e in self.entries if e.kind == kind)

    def groups(self):
        keys = sorted({(e.kind, e.target_index) for e in self.entries})
        return [(k, tuple(e for e in self.entries
                          if (e.kind, e.target_index) == k)) for k in keys]


@dataclass
class GroupResult:
    kind: str
    target_index: int
    nodes: np.ndarray
    normal_forces: np.ndarray   # >= 0, per node
    gaps: np.ndarray            # signed gap to the target (>= -penetration)
    total_force: float
    max_penetration: float
    contact_extent: float       # footprint length within CONTACT_NEAR
    adhesion_total: float


@dataclass
class ContactResult:
    groups: list[GroupResult]
    max_penetration: float

    def group(self, kind: str, index: int = 0) -> GroupResult:
        for g in self.groups:
            if g.kind == kind and g.target_index == index:
                return g
        raise KeyError((kind, index))


@dataclass
class ContactForces:
    forces: np.ndarray        # residual contribution (nodal, n_dofs)
    tangent_diag: np.ndarray  # diagonal tangent contribution (n_dofs)
    result: ContactResult
    engaged: np.ndarray       # adhesion state per entry (bool)


def _tributary(mesh: Mesh, nodes, x_start, x_end):
    xs = mesh.node_x
    trib = np.zeros(len(nodes))
    for k, i in enumerate(nodes):
        left = x_start if i == 0 else max(x_start, 0.5 * (xs[i - 1] + xs[i]))
        right = x_end if i == mesh.n_nodes - 1 else min(x_end, 0.5 * (xs[i] + xs[i + 1]))
        trib[k] = max(0.0, right - left)
    return trib


def build_contact_set(cfg: DeviceConfig, mesh: Mesh,
                      K: np.ndarray | None = None,
                      reg_coeff: float = 1e-9) -> ContactSet:
    """One entry per node inside each target footprint.

    Penalty stiffness is penalty_scale x PENALTY_BASE per node. Pillar and
    stop nodes also get a weak bilateral spring (reg_coeff x max diag K)
    that removes the rigid-body singularity of the free membrane during
    lift-off.
    """
    if K is None:
        K = assemble_stiffness(cfg, mesh)
    kmax = float(K.diagonal().max())
    penalty = cfg.solver.penalty_scale * PENALTY_BASE
    entries = []
    for i, p in enumerate(cfg.pillars):
        node = mesh.node_at(p.position)
        entries.append(ContactEntry(node, p.position, "pillar", i, 0.0,
                                    FROM_BELOW, 0.0, 0.0))
    line_idx = stop_idx = 0
    for c in cfg.contacts:
        nodes = mesh.nodes_in(c.x_start, c.x_end)
        trib = _tributary(mesh, nodes, c.x_start, c.x_end)
        if c.kind == "line":
            for node, tl in zip(nodes, trib):
                fa = c.adhesion_pressure * width_at(cfg.profile,
                                                    mesh.node_x[node]) * tl
                entries.append(ContactEntry(int(node), mesh.node_x[node],
                                            "line", line_idx, c.clearance,
                                            FROM_BELOW, tl, fa))
            line_idx += 1
        else:
            for node, tl in zip(nodes, trib):
                entries.append(ContactEntry(int(node), mesh.node_x[node],
                                            "stop", stop_idx, c.clearance,
                                            FROM_ABOVE, tl, 0.0))
            stop_idx += 1
    for i, e in enumerate(cfg.electrodes):
        nodes = mesh.nodes_in(e.x_start, e.x_end)
        trib = _tributary(mesh, nodes, e.x_start, e.x_end)
        for node, tl in zip(nodes, trib):
            entries.append(ContactEntry(int(node), mesh.node_x[node],
                                        "electrode", i, e.gap,
                                        FROM_BELOW, tl, 0.0))
    return ContactSet(entries=tuple(entries), penalty=penalty,
                      n_dofs=mesh.n_dofs, regularization=reg_coeff * kmax)


def contact_forces(cset: ContactSet, w: np.ndarray,
                   engaged: np.ndarray | None = None) -> ContactForces:
    """Penalty forces, diagonal tangent and diagnostics for a deflection field.

    from_below targets push up when w < -clearance; from_above targets push
    down when w > clearance. Adhesion applies a constant downward force at
    line nodes flagged engaged; the returned engagement state applies the
    50/100 nm hysteresis to the current gaps.
    """
    n_entries = len(cset.entries)
    if engaged is None:
        engaged = np.zeros(n_entries, dtype=bool)
    new_engaged = engaged.copy()
    forces = np.zeros(cset.n_dofs)
    ktan = np.zeros(cset.n_dofs)
    gaps = np.zeros(n_entries)
    normal = np.zeros(n_entries)
    for k, e in enumerate(cset.entries):
        dof = 2 * e.node
        wn = w[dof]
        if e.direction == FROM_BELOW:
            gap = e.clearance + wn
        else:
            gap = e.clearance - wn
        gaps[k] = gap
        if gap < 0.0:
            f = cset.penalty * (-gap)
            normal[k] = f
            forces[dof] += e.direction * f
            ktan[dof] += cset.penalty
        if e.kind == "line" and e.adhesion_force > 0.0:
            # force uses the frozen input state; the hysteresis update is
            # reported back for the caller's outer fixed-point loop
            if gap < ENGAGE_GAP:
                new_engaged[k] = True
            elif gap > RELEASE_GAP:
                new_engaged[k] = False
            if engaged[k]:
                forces[dof] -= e.adhesion_force
        if e.kind in ("pillar", "stop") and cset.regularization > 0.0:
            forces[dof] -= cset.regularization * wn
            ktan[dof] += cset.regularization

    groups = []
    max_pen = 0.0
    for (kind, idx), members in _group_slices(cset):
        sel = np.array(members)
        g = gaps[sel]
        f = normal[sel]
        pen = float(max(0.0, -g.min())) if len(g) else 0.0
        max_pen = max(max_pen, pen)
        extent = sum(cset.entries[m].trib_length for m in members
                     if gaps[m] < CONTACT_NEAR)
        adh = sum(cset.entries[m].adhesion_force for m in members
                  if new_engaged[m])
        groups.append(GroupResult(
            kind=kind, target_index=idx,
            nodes=np.array([cset.entries[m].node for m in members]),
            normal_forces=f, gaps=g, total_force=float(f.sum()),
            max_penetration=pen, contact_extent=float(extent),
            adhesion_total=float(adh)))
    result = ContactResult(groups=groups, max_penetration=max_pen)
    return ContactForces(forces=forces, tangent_diag=ktan, result=result,
                         engaged=new_engaged)


def _group_slices(cset: ContactSet):
    order: dict[tuple, list[int]] = {}
    for k, e in enumerate(cset.entries):
        order.setdefault((e.kind, e.target_index), []).append(k)
    return sorted(order.items())


def total_contact_force(result: ContactResult, kind: str) -> float:
    """Sum of nodal normal forces over all targets of one kind."""
    return sum(g.total_force for g in result.groups if g.kind == kind)
