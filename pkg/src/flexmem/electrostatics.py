"""Gap-dependent electrostatic loading, tangent, capacitance and the
lumped pull-in oracle.

The meshed air volume of a full 3-D model is replaced by local
parallel-plate physics: pressure p(x) = eps0 b(x) V^2 / (2 d(x)^2) with the
dielectric handled as a series air gap t_d/eps_r. Forces always pull the
membrane toward the energized surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beam import GAUSS_W, GAUSS_XI, Mesh, shape_functions
from .device import DeviceConfig, width_at
from .errors import GapCollapse

EPS0 = 8.854187817e-12  # F/m

GAP_FLOOR = 1e-9  # below this the parallel-plate model is meaningless


@dataclass(frozen=True)
class Footprint:
    """An energized or capacitive surface along the beam axis."""
    x_start: float
    x_end: float
    gap: float                   # air gap at rest
    dielectric_thickness: float
    eps_r: float                 # dielectric relative permittivity
    sign: float = 1.0            # +1 below the membrane, -1 above
    label: str = ""

    @property
    def series_gap(self) -> float:
        if self.dielectric_thickness == 0.0:
            return 0.0
        return self.dielectric_thickness / self.eps_r


def electrode_footprint(cfg: DeviceConfig, eid: str) -> Footprint:
    e = cfg.electrode(eid)
    return Footprint(e.x_start, e.x_end, e.gap, e.dielectric_thickness,
                     cfg.material.dielectric_rel_permittivity, 1.0, eid)


def line_footprint(cfg: DeviceConfig, index: int = 0) -> Footprint:
    """Capacitive footprint of the index-th line contact.

    The line carries the same PECVD nitride as the electrodes, so its
    dielectric thickness is taken from the electrode layer.
    """
    line = cfg.lines[index]
    t_d = cfg.electrodes[0].dielectric_thickness if cfg.electrodes else 100e-9
    return Footprint(line.x_start, line.x_end, line.clearance, t_d,
                     cfg.material.dielectric_rel_permittivity, 1.0,
                     f"line{index}")


def _subtract_intervals(span, holes):
    """Remove a list of (a, b) holes from the (x0, x1) span."""
    pieces = [span]
    for a, b in holes:
        nxt = []
        for x0, x1 in pieces:
            if b <= x0 or a >= x1:
                nxt.append((x0, x1))
                continue
            if a > x0:
                nxt.append((x0, a))
            if b < x1:
                nxt.append((b, x1))
        pieces = nxt
    return [p for p in pieces if p[1] - p[0] > 1e-12]


def state_footprints(cfg: DeviceConfig, active_ids,
                     include_lines: bool = False,
                     shadow_lines: bool = True):
    """Energized footprints for a set of electrode ids.

    Where a line contact crosses an electrode footprint the line metal
    shadows the electrode field, so the overlap is removed from the
    electrode. The lines themselves are DC-floating (series capacitance
    through the stub) and are only energized on request, e.g. for the RF
    self-actuation check.
    """
    holes = [(ln.x_start, ln.x_end) for ln in cfg.lines] if shadow_lines else []
    fps = []
    for eid in active_ids:
        fp = electrode_footprint(cfg, eid)
        for x0, x1 in _subtract_intervals((fp.x_start, fp.x_end), holes):
            fps.append(Footprint(x0, x1, fp.gap, fp.dielectric_thickness,
                                 fp.eps_r, 1.0, fp.label))
    if include_lines:
        for i in range(len(cfg.lines)):
            fps.append(line_footprint(cfg, i))
    return fps


@dataclass
class ElectrostaticLoad:
    forces: np.ndarray           # consistent nodal loads (N, N*m)
    active: tuple[str, ...]
    voltage: float


def _element_spans(mesh: Mesh, footprints):
    """Element indices per footprint (mesh nodes snap to footprint edges)."""
    return [mesh.elements_in(fp.x_start, fp.x_end) for fp in footprints]


def loads_and_tangent(cfg: DeviceConfig, mesh: Mesh, w: np.ndarray,
                      footprints, V: float, fringing: bool = False,
                      clamp: bool = False):
    """Nodal loads and their w-derivative for a set of energized footprints.

    Returns (F, dF_dw); the Newton tangent correction is -dF_dw. With
    clamp=True the effective gap is floored instead of raising GapCollapse,
    which keeps intermediate Newton iterates evaluable.
    """
    n = mesh.n_dofs
    F = np.zeros(n)
    dF = np.zeros((n, n))
    if V == 0.0 or not footprints:
        return F, dF
    lengths = mesh.element_lengths
    x0 = mesh.node_x[mesh.elements[:, 0]]
    half_eps_v2 = 0.5 * EPS0 * V * V
    for fp, elems in zip(footprints, _element_spans(mesh, footprints)):
        s = fp.series_gap
        for e in elems:
            l = lengths[e]
            dofs = mesh.element_dofs(e)
            we = w[dofs]
            b = width_at(cfg.profile, x0[e] + 0.5 * l)
            for xi, wgt in zip(GAUSS_XI, GAUSS_W):
                N = shape_functions(xi, l)
                d = fp.gap + fp.sign * (N @ we) + s
                if d <= GAP_FLOOR:
                    if not clamp:
                        raise GapCollapse(
                            f"effective gap {d:.3e} m under {fp.label or 'footprint'}"
                            f" at x = {x0[e] + xi * l:.6e}")
                    d = GAP_FLOOR
                p = half_eps_v2 * b / d**2          # magnitude, N/m
                dp_dw = -2.0 * half_eps_v2 * b / d**3 * fp.sign
                if fringing:
                    m = 1.0 + 0.65 * d / b
                    dp_dw = dp_dw * m + p * (0.65 / b) * fp.sign
                    p = p * m
                scale = wgt * l
                F[dofs] += scale * (-fp.sign * p) * N
                dF[np.ix_(dofs, dofs)] += scale * (-fp.sign * dp_dw) * np.outer(N, N)
    return F, dF


def field_energy(cfg: DeviceConfig, mesh: Mesh, w: np.ndarray, footprints,
                 V: float, fringing: bool = False,
                 clamp: bool = False) -> float:
    """Electrostatic potential energy (attractive: decreases as gaps close).

    The gradient of this functional is minus the nodal load vector, with the
    same gap clamping as loads_and_tangent so energy line searches stay
    consistent with the forces.
    """
    if V == 0.0 or not footprints:
        return 0.0
    lengths = mesh.element_lengths
    x0 = mesh.node_x[mesh.elements[:, 0]]
    half_eps_v2 = 0.5 * EPS0 * V * V
    U = 0.0
    for fp, elems in zip(footprints, _element_spans(mesh, footprints)):
        s = fp.series_gap
        for e in elems:
            l = lengths[e]
            dofs = mesh.element_dofs(e)
            we = w[dofs]
            b = width_at(cfg.profile, x0[e] + 0.5 * l)

            def u_of(d):
                u = -half_eps_v2 * b / d
                if fringing:
                    u += 0.65 * half_eps_v2 * math.log(d)
                return u

            def up_of(d):
                up = half_eps_v2 * b / d**2
                if fringing:
                    up += 0.65 * half_eps_v2 / d
                return up

            for xi, wgt in zip(GAUSS_XI, GAUSS_W):
                d = fp.gap + fp.sign * (shape_functions(xi, l) @ w[dofs]) + s
                if d <= GAP_FLOOR:
                    if not clamp:
                        raise GapCollapse(
                            f"effective gap {d:.3e} m under "
                            f"{fp.label or 'footprint'}")
                    u = u_of(GAP_FLOOR) + up_of(GAP_FLOOR) * (d - GAP_FLOOR)
                else:
                    u = u_of(d)
                U += wgt * l * u
    return U


def electrostatic_forces(cfg: DeviceConfig, mesh: Mesh, w: np.ndarray,
                         active, V: float, include_lines: bool = False,
                         fringing: bool = False) -> ElectrostaticLoad:
    fps = state_footprints(cfg, active, include_lines)
    F, _ = loads_and_tangent(cfg, mesh, w, fps, V, fringing=fringing)
    return ElectrostaticLoad(forces=F, active=tuple(active), voltage=V)


def electrostatic_tangent(cfg: DeviceConfig, mesh: Mesh, w: np.ndarray,
                          active, V: float, include_lines: bool = False,
                          fringing: bool = False) -> np.ndarray:
    """Stiffness correction dK = -dF/dw; negative semidefinite (softening)."""
    fps = state_footprints(cfg, active, include_lines)
    _, dF = loads_and_tangent(cfg, mesh, w, fps, V, fringing=fringing)
    return -dF


def capacitance(cfg: DeviceConfig, mesh: Mesh, w: np.ndarray,
                footprint: Footprint) -> float:
    """Gauss-quadrature parallel-plate capacitance over a footprint."""
    lengths = mesh.element_lengths
    x0 = mesh.node_x[mesh.elements[:, 0]]
    s = footprint.series_gap
    C = 0.0
    for e in mesh.elements_in(footprint.x_start, footprint.x_end):
        l = lengths[e]
        we = w[mesh.element_dofs(e)]
        b = width_at(cfg.profile, x0[e] + 0.5 * l)
        for xi, wgt in zip(GAUSS_XI, GAUSS_W):
            d = footprint.gap + footprint.sign * (shape_functions(xi, l) @ we) + s
            if d <= 0.0:
                raise GapCollapse(
                    f"non-positive effective gap under {footprint.label or 'footprint'}")
            C += wgt * l * EPS0 * b / d
    return C


def pull_in_lumped(k: float, A: float, g: float) -> tuple[float, float]:
    """Classical 1-DOF pull-in: V_pi = sqrt(8 k g^3 / (27 eps0 A)), w_pi = g/3."""
    v_pi = math.sqrt(8.0 * k * g**3 / (27.0 * EPS0 * A))
    return v_pi, g / 3.0


@dataclass(frozen=True)
class CapacitanceReport:
    per_electrode: dict[str, float]
    per_line: tuple[float, ...]
    total: float


def capacitance_report(cfg: DeviceConfig, mesh: Mesh,
                       w: np.ndarray) -> CapacitanceReport:
    """Membrane capacitance to every electrode and line contact.

    Electrode footprints exclude zones shadowed by a crossing line.
    """
    holes = [(ln.x_start, ln.x_end) for ln in cfg.lines]
    per_e = {}
    for e in cfg.electrodes:
        c = 0.0
        fp = electrode_footprint(cfg, e.id)
        for x0, x1 in _subtract_intervals((fp.x_start, fp.x_end), holes):
            piece = Footprint(x0, x1, fp.gap, fp.dielectric_thickness,
                              fp.eps_r, 1.0, fp.label)
            c += capacitance(cfg, mesh, w, piece)
        per_e[e.id] = c
    per_line = tuple(capacitance(cfg, mesh, w, line_footprint(cfg, i))
                     for i in range(len(cfg.lines)))
    total = sum(per_e.values()) + sum(per_line)
    return CapacitanceReport(per_electrode=per_e, per_line=per_line,
                             total=total)
