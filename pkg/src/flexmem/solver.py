"""Nonlinear statics with voltage continuation, pull-in search, modal
analysis, Newmark transients, thermal clearance and self-actuation margin.

Statics solves K w = F_es(w) + F_contact(w) by Newton iteration with the
electrostatic softening tangent and penalty contact stiffness, ramping the
voltage from zero in adaptive steps. Snap-through events (the membrane
dropping onto a line or an electrode surface) are crossed by capped full
Newton steps; a converged state is only accepted if every effective gap is
physically open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import device
from .beam import Mesh, assemble_mass, assemble_stiffness, build_mesh, recover_stress
from .contact import ContactResult, ContactSet, build_contact_set, contact_forces
from .device import DeviceConfig, electrodes_for
from .electrostatics import (CapacitanceReport, GAP_FLOOR, capacitance_report,
                             field_energy, loads_and_tangent,
                             state_footprints)
from .errors import NoPullInFound, PullInEncountered, TransientDiverged

NEWTON_MAX_ITER = 400
STEP_CAP = 0.5e-6          # max |dw| per Newton iterate, m
CONTINUATION_FLOOR = 1e-3  # V


@dataclass
class ModelContext:
    """Mesh and assembled operators reused across solves of one config."""
    cfg: DeviceConfig
    mesh: Mesh
    K: np.ndarray
    cset: ContactSet

    _M: np.ndarray | None = None

    @property
    def M(self) -> np.ndarray:
        if self._M is None:
            self._M = assemble_mass(self.cfg, self.mesh)
        return self._M


def build_context(cfg: DeviceConfig, n_elements: int | None = None) -> ModelContext:
    mesh = build_mesh(cfg, n_elements)
    K = assemble_stiffness(cfg, mesh)
    cset = build_contact_set(cfg, mesh, K)
    return ModelContext(cfg=cfg, mesh=mesh, K=K, cset=cset)


@dataclass
class SeatingEvent:
    voltage: float
    force: float
    extent: float


@dataclass
class StaticSolution:
    state: str
    voltage: float
    w: np.ndarray
    converged: bool
    newton_iterations: int
    residual_norm: float
    contact: ContactResult
    capacitances: CapacitanceReport
    stress: np.ndarray
    max_down_deflection: float
    max_up_deflection: float
    mesh: Mesh
    adhesion_engaged: np.ndarray
    collapsed: bool                       # membrane seated on an electrode
    seating: dict[int, SeatingEvent]      # per line index, first full seating

    @property
    def w_nodes(self) -> np.ndarray:
        return self.w[0::2]


class _StepFailed(Exception):
    pass


def _newton(ctx: ModelContext, footprints, V, w, engaged, newton_tol,
            fringing):
    """Damped Newton at fixed voltage; returns (w, iterations, |R|).

    The residual is the gradient of the total potential, so when plain
    Newton stalls (limit cycling around a fold) a Levenberg-Marquardt shift
    turns the iteration into gradient flow, which descends onto the seated
    branch when a contact catches it.
    """
    K = ctx.K
    n = ctx.mesh.n_dofs
    kscale = float(K.diagonal().max())
    adhesion_scale = sum(e.adhesion_force for k, e in enumerate(ctx.cset.entries)
                         if engaged[k])
    eps = np.finfo(float).eps

    def contact_potential(w):
        en = 0.0
        for k, e in enumerate(ctx.cset.entries):
            wn = w[2 * e.node]
            gap = e.clearance + e.direction * wn
            if gap < 0.0:
                en += 0.5 * ctx.cset.penalty * gap * gap
            if e.kind in ("pillar", "stop"):
                en += 0.5 * ctx.cset.regularization * wn * wn
            if engaged[k]:
                en += e.adhesion_force * wn
        return en

    def evaluate(w):
        F_es, dF_es = loads_and_tangent(ctx.cfg, ctx.mesh, w, footprints, V,
                                        fringing=fringing, clamp=True)
        cf = contact_forces(ctx.cset, w, engaged)
        R = K @ w - F_es - cf.forces
        pot = (0.5 * w @ (K @ w) + contact_potential(w)
               + field_energy(ctx.cfg, ctx.mesh, w, footprints, V,
                              fringing=fringing, clamp=True))
        return R, dF_es, cf, np.linalg.norm(F_es), pot

    # Marquardt damping is applied relative to the stiffness diagonal so
    # deflection (N/m) and rotation (N*m/rad) DOFs stay in their own units;
    # a permanent small shift keeps the nearly free rigid rotation from
    # producing exploding raw Newton steps. The shift only biases the
    # iteration path, never a converged state.
    diagK = np.maximum(K.diagonal().copy(), 1e-12 * kscale)
    lam_min = 0.0
    lam = lam_min
    l_char = float(np.mean(ctx.mesh.element_lengths))
    cap_scale = np.ones(n)
    cap_scale[1::2] = l_char          # rotations capped at STEP_CAP/l_char
    R, dF_es, cf, fes_norm, pot = evaluate(w)
    rnorm = np.linalg.norm(R)
    best = rnorm
    stagnant = 0
    for it in range(NEWTON_MAX_ITER):
        scale = max(fes_norm, adhesion_scale, 1e-12)
        if not np.isfinite(rnorm):
            raise _StepFailed(f"residual not finite at iteration {it}")
        if rnorm < newton_tol * scale:
            return w, it, rnorm
        if stagnant >= 15 and rnorm < 1e-4 * scale:
            # round-off bound: the residual stopped improving four orders
            # of magnitude below the load scale
            return w, it, rnorm
        J = K - dF_es
        J[np.arange(n), np.arange(n)] += cf.tangent_diag + lam * diagK
        R_mod = R.copy()
        try:
            dw = np.linalg.solve(J, -R_mod)
        except np.linalg.LinAlgError:
            lam = max(10.0 * lam, 1e-6)
            continue
        # primal-dual active-set anticipation: when the trial step would run
        # a node through a contact wall whose spring is not yet in J, add
        # the spring (with its pre-gap offset) and re-solve, so the step
        # lands on the wall instead of deep inside it
        anticipated: set[int] = set()
        for _ in range(6):
            new = []
            for e in ctx.cset.entries:
                dof = 2 * e.node
                if dof in anticipated:
                    continue
                gap_now = e.clearance + e.direction * w[dof]
                if gap_now >= 0.0 and gap_now + e.direction * dw[dof] < 0.0:
                    new.append((dof, e.direction, gap_now))
            if not new:
                break
            for dof, direction, gap_now in new:
                anticipated.add(dof)
                J[dof, dof] += ctx.cset.penalty
                R_mod[dof] += direction * ctx.cset.penalty * gap_now
            try:
                dw = np.linalg.solve(J, -R_mod)
            except np.linalg.LinAlgError:
                break
        peak = np.abs(dw * cap_scale).max() if n else 0.0
        if peak > STEP_CAP:
            dw *= STEP_CAP / peak
        w_try = w + dw
        R_try, dF_try, cf_try, fes_try, pot_try = evaluate(w_try)
        r_try = np.linalg.norm(R_try)
        # the residual is the gradient of the total potential; an Armijo
        # test on the energy lets the iteration march through saddle points
        # downhill instead of stalling at fold ghosts
        slope = float(R @ dw)
        armijo = pot_try <= pot + 1e-4 * min(slope, 0.0) + 1e-14 * abs(pot)
        if np.isfinite(pot_try) and (armijo or r_try <= 0.99 * rnorm):
            w, R, dF_es, cf = w_try, R_try, dF_try, cf_try
            rnorm, fes_norm, pot = r_try, fes_try, pot_try
            lam = max(lam / 2.5, lam_min)
        else:
            lam = max(10.0 * lam, 1e-6)
            if lam > 1e10:
                raise _StepFailed("damping exhausted without descent")
        if rnorm < 0.98 * best:
            best = rnorm
            stagnant = 0
        else:
            stagnant += 1
    raise _StepFailed(f"no convergence in {NEWTON_MAX_ITER} iterations")


def _jump_fold(ctx, footprints, V, w, engaged, settle):
    """Try to cross a fold by seeding Newton along the softest tangent
    direction (the buckling-like mode that goes singular at the limit
    point). The seed sign follows the unbalanced force so the jump lands in
    the basin the load actually pushes toward. Returns the settled state or
    None when no nearby branch exists.
    """
    F_es, dF_es = loads_and_tangent(ctx.cfg, ctx.mesh, w, footprints, V,
                                    clamp=True)
    cf = contact_forces(ctx.cset, w, engaged)
    n = ctx.mesh.n_dofs
    R = ctx.K @ w - F_es - cf.forces
    J = ctx.K - dF_es
    J[np.arange(n), np.arange(n)] += cf.tangent_diag
    evals, evecs = np.linalg.eigh(J)
    phi = evecs[:, 0]
    peak = np.abs(phi[0::2]).max()
    if peak == 0.0:
        return None
    phi = phi / peak
    lead = -float(R @ phi)
    signs = (1.0, -1.0) if (lead >= 0.0) else (-1.0, 1.0)
    for step in (0.05e-6, 0.1e-6, 0.25e-6, 0.5e-6, 1.0e-6, 2.0e-6):
        for sign in signs:
            try:
                w_new, eng_new, cf_new, rnorm = settle(V, w + sign * step * phi,
                                                       engaged.copy())
            except _StepFailed:
                continue
            return w_new, eng_new, cf_new, rnorm
    return None


def _min_effective_gap(ctx: ModelContext, footprints, w):
    """Smallest effective electrostatic gap over all energized footprints."""
    from .beam import GAUSS_XI, shape_functions
    mesh = ctx.mesh
    lengths = mesh.element_lengths
    x0 = mesh.node_x[mesh.elements[:, 0]]
    dmin = math.inf
    for fp in footprints:
        s = fp.series_gap
        for e in mesh.elements_in(fp.x_start, fp.x_end):
            l = lengths[e]
            we = w[mesh.element_dofs(e)]
            for xi in GAUSS_XI:
                d = fp.gap + fp.sign * (shape_functions(xi, l) @ we) + s
                dmin = min(dmin, d)
    return dmin


def solve_static(cfg: DeviceConfig, state: str, V: float, *,
                 ctx: ModelContext | None = None,
                 w0: np.ndarray | None = None,
                 engaged0: np.ndarray | None = None,
                 fringing: bool = False,
                 energize_lines: bool = False) -> StaticSolution:
    """Equilibrium at one (state, voltage) via voltage continuation from 0.

    Starting fields w0/engaged0 allow hysteresis studies (stiction, restore).
    The line contacts sit behind the stub's series capacitance, so they are
    DC-floating and carry no actuation load unless energize_lines is set
    (used by the RF self-actuation check). Raises PullInEncountered when the
    continuation step underflows without reaching V; the exception carries
    the last stable solution.
    """
    if V < 0.0:
        raise ValueError("V must be >= 0")
    if ctx is None:
        ctx = build_context(cfg)
    active = [eid for eid in electrodes_for(cfg.states, state)
              if any(e.id == eid for e in cfg.electrodes)]
    footprints = state_footprints(cfg, active, include_lines=energize_lines)
    tol = cfg.solver.newton_tol

    w = np.zeros(ctx.mesh.n_dofs) if w0 is None else w0.copy()
    engaged = (np.zeros(len(ctx.cset.entries), dtype=bool)
               if engaged0 is None else engaged0.copy())
    seating: dict[int, SeatingEvent] = {}
    total_iters = 0

    line_lengths = {i: ln.x_end - ln.x_start for i, ln in enumerate(cfg.lines)}

    def settle(voltage, w_in, engaged_in):
        """Newton plus adhesion fixed point at one voltage."""
        nonlocal total_iters
        w_cur, eng = w_in, engaged_in
        for _ in range(10):
            w_cur, iters, rnorm = _newton(ctx, footprints, voltage, w_cur,
                                          eng, tol, fringing)
            total_iters += iters
            cf = contact_forces(ctx.cset, w_cur, eng)
            if np.array_equal(cf.engaged, eng):
                if _min_effective_gap(ctx, footprints, w_cur) <= GAP_FLOOR:
                    raise _StepFailed("effective gap collapsed")
                return w_cur, eng, cf, rnorm
            eng = cf.engaged
        raise _StepFailed("adhesion state did not settle")

    w, engaged, cf, rnorm = settle(0.0, w, engaged)
    v_cur = 0.0
    last_good = (w.copy(), engaged.copy(), cf, rnorm)

    def record_events(voltage, cf):
        for g in cf.result.groups:
            if g.kind == "line" and g.target_index not in seating:
                full = g.contact_extent >= line_lengths[g.target_index] - 1e-9
                if full and g.total_force > 0.0:
                    seating[g.target_index] = SeatingEvent(
                        voltage, g.total_force, g.contact_extent)

    record_events(0.0, cf)
    if V > 0.0:
        # keep the ramp path consistent across target voltages: start at
        # V/10 as for small targets but never coarser than 0.5 V per step
        dv = min(V / 10.0, 0.5)
        while v_cur < V - 1e-12:
            v_try = min(v_cur + dv, V)
            try:
                w_new, eng_new, cf_new, rnorm = settle(v_try, w, engaged)
            except _StepFailed:
                dv *= 0.5
                # once the step is already small this is a fold, not a bad
                # step size: try to jump onto the adjacent branch
                if dv < max(CONTINUATION_FLOOR, 0.02 * V):
                    jumped = _jump_fold(ctx, footprints, v_try, w, engaged,
                                        settle)
                    if jumped is not None:
                        w, engaged, cf, rnorm = jumped
                        v_cur = v_try
                        dv = max(min((V - v_cur) / 10.0, 0.5),
                                 CONTINUATION_FLOOR)
                        record_events(v_cur, cf)
                        last_good = (w.copy(), engaged.copy(), cf, rnorm)
                        continue
                if dv < CONTINUATION_FLOOR:
                    sol = _finalize(cfg, ctx, state, v_cur, *last_good,
                                    total_iters, seating)
                    raise PullInEncountered(v_try, sol)
                continue
            w, engaged, cf = w_new, eng_new, cf_new
            v_cur = v_try
            record_events(v_cur, cf)
            last_good = (w.copy(), engaged.copy(), cf, rnorm)

    return _finalize(cfg, ctx, state, v_cur, w, engaged, cf, rnorm,
                     total_iters, seating)


COLLAPSE_GAP = 100e-9  # electrode proximity that counts as slapped down


def _finalize(cfg, ctx, state, V, w, engaged, cf, rnorm, iters, seating):
    wn = w[0::2]
    collapsed = any(g.kind == "electrode" and
                    (g.total_force > 0.0 or g.gaps.min() < COLLAPSE_GAP)
                    for g in cf.result.groups)
    return StaticSolution(
        state=state, voltage=V, w=w.copy(), converged=True,
        newton_iterations=iters, residual_norm=float(rnorm),
        contact=cf.result,
        capacitances=capacitance_report(cfg, ctx.mesh, w),
        stress=recover_stress(cfg, ctx.mesh, w),
        max_down_deflection=float(max(0.0, -wn.min())),
        max_up_deflection=float(max(0.0, wn.max())),
        mesh=ctx.mesh, adhesion_engaged=engaged.copy(),
        collapsed=collapsed, seating=dict(seating))


# ---------------------------------------------------------------------------
# pull-in

@dataclass
class PullInResult:
    state: str
    v_pull_in: float
    resolution: float
    last_stable: StaticSolution


def _is_collapsed(cfg, ctx, state, V) -> tuple[bool, StaticSolution | None]:
    try:
        sol = solve_static(cfg, state, V, ctx=ctx)
    except PullInEncountered as exc:
        return True, exc.last_stable
    return sol.collapsed, sol


def solve_pull_in(cfg: DeviceConfig, state: str, *,
                  ctx: ModelContext | None = None,
                  v_max: float = 200.0,
                  resolution: float = 0.01) -> PullInResult:
    """Bracket the collapse voltage by doubling from 1 V, then bisect.

    "Collapse" means the converged solution rests on an electrode dielectric
    (or the continuation itself fails). Seating a line contact is normal
    switch operation, not collapse.
    """
    if ctx is None:
        ctx = build_context(cfg)
    lo, lo_sol = 0.0, None
    v = 1.0
    while v <= v_max:
        coll, sol = _is_collapsed(cfg, ctx, state, v)
        if coll:
            break
        lo, lo_sol = v, sol
        v *= 2.0
    else:
        raise NoPullInFound(f"no collapse below {v_max} V in state {state!r}")
    hi = v
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        coll, sol = _is_collapsed(cfg, ctx, state, mid)
        if coll:
            hi = mid
        else:
            lo, lo_sol = mid, sol
    if lo_sol is None:
        _, lo_sol = _is_collapsed(cfg, ctx, state, lo)
    return PullInResult(state=state, v_pull_in=0.5 * (lo + hi),
                        resolution=resolution, last_stable=lo_sol)


# ---------------------------------------------------------------------------
# modal analysis

@dataclass
class ModalResult:
    frequencies: np.ndarray      # Hz, ascending
    shapes: np.ndarray           # (n_dofs, n_modes), mass-normalized
    support: str


def solve_modal(cfg: DeviceConfig, n_modes: int = 5, *,
                ctx: ModelContext | None = None) -> ModalResult:
    """Small-vibration modes about rest with pillars as bilateral pins.

    The rest contact at the pillars is closed but unloaded, so the
    linearization pins the deflection DOF at each pillar node.
    """
    if n_modes > 10:
        raise ValueError("n_modes must be <= 10")
    if ctx is None:
        ctx = build_context(cfg)
    mesh = ctx.mesh
    pinned = [2 * mesh.node_at(p.position) for p in cfg.pillars]
    free = np.setdiff1d(np.arange(mesh.n_dofs), pinned)
    K = ctx.K[np.ix_(free, free)]
    M = ctx.M[np.ix_(free, free)]
    evals, evecs = scipy.linalg.eigh(K, M)
    order = np.argsort(evals)
    n = min(n_modes, len(order))
    freqs = np.sqrt(np.clip(evals[order[:n]], 0.0, None)) / (2.0 * math.pi)
    shapes = np.zeros((mesh.n_dofs, n))
    shapes[free, :] = evecs[:, order[:n]]
    return ModalResult(frequencies=freqs, shapes=shapes,
                       support="pillars-pinned")


# ---------------------------------------------------------------------------
# transient

@dataclass
class TransientResult:
    time: np.ndarray
    deflection: np.ndarray        # (n_steps + 1, n_dofs)
    line_force: np.ndarray        # total line contact force history
    energy: np.ndarray            # kinetic + elastic + penalty energy
    switching_time: float | None

    @property
    def w_min(self) -> np.ndarray:
        return self.deflection[:, 0::2].min(axis=1)

    @property
    def w_max(self) -> np.ndarray:
        return self.deflection[:, 0::2].max(axis=1)


SWITCH_FORCE = 1e-6    # N
SWITCH_STREAK = 3      # consecutive steps


def _contact_energy(cset: ContactSet, w: np.ndarray) -> float:
    en = 0.0
    for e in cset.entries:
        wn = w[2 * e.node]
        gap = e.clearance + e.direction * wn
        if gap < 0.0:
            en += 0.5 * cset.penalty * gap * gap
        if e.kind in ("pillar", "stop"):
            en += 0.5 * cset.regularization * wn * wn
    return en


def solve_transient(cfg: DeviceConfig, state: str, V: float,
                    t_end: float, dt: float, *,
                    ctx: ModelContext | None = None,
                    damping_ratio: float | None = None,
                    w0: np.ndarray | None = None,
                    v0: np.ndarray | None = None,
                    fringing: bool = False) -> TransientResult:
    """Newmark average-acceleration transient with the voltage stepped on
    at t = 0 and Rayleigh damping fitted at f1 and 3 f1."""
    if t_end > 10e-3:
        raise ValueError("t_end must be <= 10 ms")
    if ctx is None:
        ctx = build_context(cfg)
    zeta = cfg.solver.damping_ratio if damping_ratio is None else damping_ratio
    f1 = solve_modal(cfg, 1, ctx=ctx).frequencies[0]
    if dt > 1.0 / (40.0 * f1):
        raise ValueError(f"dt must be <= 1/(40 f1) = {1.0 / (40.0 * f1):.3e} s")
    w1 = 2.0 * math.pi * f1
    w2 = 3.0 * w1
    a_ray = zeta * 2.0 * w1 * w2 / (w1 + w2)
    b_ray = zeta * 2.0 / (w1 + w2)

    K, M = ctx.K, ctx.M
    C = a_ray * M + b_ray * K
    n = ctx.mesh.n_dofs
    active = [eid for eid in electrodes_for(cfg.states, state)
              if any(e.id == eid for e in cfg.electrodes)]
    footprints = state_footprints(cfg, active)
    engaged = np.zeros(len(ctx.cset.entries), dtype=bool)

    beta, gamma = 0.25, 0.5
    a0 = 1.0 / (beta * dt * dt)
    a1 = gamma / (beta * dt)
    a2 = 1.0 / (beta * dt)
    a3 = 1.0 / (2.0 * beta) - 1.0
    a4 = gamma / beta - 1.0
    a5 = dt / 2.0 * (gamma / beta - 2.0)

    u = np.zeros(n) if w0 is None else w0.copy()
    v = np.zeros(n) if v0 is None else v0.copy()
    F0, _ = loads_and_tangent(cfg, ctx.mesh, u, footprints, V, fringing, clamp=True)
    cf0 = contact_forces(ctx.cset, u, engaged)
    acc = np.linalg.solve(M, F0 + cf0.forces - C @ v - K @ u)

    n_steps = int(round(t_end / dt))
    time = np.linspace(0.0, n_steps * dt, n_steps + 1)
    defl = np.zeros((n_steps + 1, n))
    line_force = np.zeros(n_steps + 1)
    energy = np.zeros(n_steps + 1)

    def measure(i, u, v, cf):
        defl[i] = u
        line_force[i] = sum(g.total_force for g in cf.result.groups
                            if g.kind == "line")
        energy[i] = (0.5 * v @ (M @ v) + 0.5 * u @ (K @ u)
                     + _contact_energy(ctx.cset, u))

    measure(0, u, v, cf0)
    kscale = float(K.diagonal().max())
    streak = 0
    switching_time = None
    for step in range(1, n_steps + 1):
        t = step * dt
        rhs_inertia = M @ (a0 * u + a2 * v + a3 * acc)
        rhs_damping = C @ (a1 * u + a4 * v + a5 * acc)
        u_new = u.copy()
        ok = False
        for it in range(NEWTON_MAX_ITER):
            F_es, dF_es = loads_and_tangent(cfg, ctx.mesh, u_new, footprints,
                                            V, fringing, clamp=True)
            cf = contact_forces(ctx.cset, u_new, engaged)
            R = (M @ (a0 * u_new) - rhs_inertia
                 + C @ (a1 * u_new) - rhs_damping
                 + K @ u_new - F_es - cf.forces)
            scale = max(np.linalg.norm(F_es), kscale * np.abs(u_new).max(), 1e-9)
            if np.linalg.norm(R) < cfg.solver.newton_tol * scale + 1e-18:
                ok = True
                break
            J = a0 * M + a1 * C + K - dF_es
            J[np.arange(n), np.arange(n)] += cf.tangent_diag
            du = np.linalg.solve(J, -R)
            peak = np.abs(du[0::2]).max()
            if peak > STEP_CAP:
                du *= STEP_CAP / peak
            u_new = u_new + du
        if not ok:
            raise TransientDiverged(t)
        acc_new = a0 * (u_new - u) - a2 * v - a3 * acc
        v = v + dt * ((1.0 - gamma) * acc + gamma * acc_new)
        u, acc = u_new, acc_new
        engaged = cf.engaged
        measure(step, u, v, cf)
        if line_force[step] >= SWITCH_FORCE:
            streak += 1
            if streak >= SWITCH_STREAK and switching_time is None:
                switching_time = time[step - SWITCH_STREAK + 1]
        else:
            streak = 0
    return TransientResult(time=time, deflection=defl, line_force=line_force,
                           energy=energy, switching_time=switching_time)


# ---------------------------------------------------------------------------
# thermal clearance

@dataclass
class ThermalCheckResult:
    delta_T: float
    max_inplane_expansion: float
    clearance: float
    contact_predicted: bool
    delta_T_at_contact: float


def thermal_check(cfg: DeviceConfig, delta_T: float) -> ThermalCheckResult:
    """Free in-plane expansion about the central pillar versus the stop gap.

    The membrane is free to expand, so no thermal stress develops; contact
    with a stop unit is predicted purely from the expansion of the longest
    lever arm against the stop clearance.
    """
    if delta_T < 0.0:
        raise ValueError("delta_T must be >= 0")
    alpha = cfg.material.thermal_expansion
    half = cfg.profile.length / 2.0
    stops = cfg.stops
    if not stops:
        return ThermalCheckResult(delta_T, 0.0, math.inf, False, math.inf)
    lever = max(max(abs(c.x_start - half), abs(c.x_end - half)) for c in stops)
    clearance = min(c.clearance for c in stops)
    expansion = alpha * delta_T * lever
    dt_contact = clearance / (alpha * lever) if lever > 0.0 else math.inf
    return ThermalCheckResult(
        delta_T=delta_T, max_inplane_expansion=expansion, clearance=clearance,
        contact_predicted=expansion >= clearance,
        delta_T_at_contact=dt_contact)


# ---------------------------------------------------------------------------
# RF self-actuation

def self_actuation_margin(cfg: DeviceConfig, rf_power: float,
                          z0: float = 50.0, *,
                          ctx: ModelContext | None = None):
    """Static deflection under the RF-equivalent voltage on the lines at rest.

    Returns (deflection, margin); margin is clearance/|deflection| of the
    governing line, infinite for zero power.
    """
    if rf_power < 0.0:
        raise ValueError("rf_power must be >= 0")
    if rf_power == 0.0:
        return 0.0, math.inf
    v_eq = math.sqrt(2.0 * rf_power * z0)
    sol = solve_static(cfg, device.REST, v_eq, ctx=ctx, energize_lines=True)
    margin = math.inf
    deflection = 0.0
    for i, ln in enumerate(cfg.lines):
        nodes = sol.mesh.nodes_in(ln.x_start, ln.x_end)
        dip = float(max(0.0, -sol.w[2 * nodes].min()))
        deflection = max(deflection, dip)
        if dip > 0.0:
            margin = min(margin, ln.clearance / dip)
    return deflection, margin
