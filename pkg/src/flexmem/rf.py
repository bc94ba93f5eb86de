"""Circuit model of the 24 GHz SPDT: microstrip synthesis (Hammerstad-
Jensen closed forms), ABCD two-port algebra, radial-stub virtual ground,
quarter-wave transformer, nodal 3-port solve, S-parameter metrics and
Touchstone/CSV export.

The two switch branches are capacitive shunts: membrane up gives a small
series capacitance (branch passes), membrane slapped on the line nitride
gives a large one (branch blocked through the stub's virtual ground).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import DeviceConfig, EVEN, ODD
from .electrostatics import capacitance, line_footprint
from .errors import GridError, SingularNetwork

C0 = 299792458.0
MU0 = 4.0e-7 * math.pi
ETA0 = 376.73031346177066


# ---------------------------------------------------------------------------
# microstrip synthesis

@dataclass(frozen=True)
class MicrostripParams:
    width: float
    substrate_height: float
    substrate_eps_r: float
    conductor_thickness: float
    z0: float
    eps_eff: float
    alpha_c: float   # Np/m, conductor loss
    alpha_d: float   # Np/m, dielectric loss


def hammerstad_jensen_z0(width: float, height: float, eps_r: float):
    """Quasi-static z0 and eps_eff from the Hammerstad-Jensen closed forms."""
    u = width / height
    a = 1.0 + math.log((u**4 + (u / 52.0)**2) / (u**4 + 0.432)) / 49.0 \
        + math.log(1.0 + (u / 18.1)**3) / 18.7
    b = 0.564 * ((eps_r - 0.9) / (eps_r + 3.0))**0.053
    eps_eff = 0.5 * (eps_r + 1.0) + 0.5 * (eps_r - 1.0) * (1.0 + 10.0 / u)**(-a * b)
    fu = 6.0 + (2.0 * math.pi - 6.0) * math.exp(-((30.666 / u)**0.7528))
    z0_air = ETA0 / (2.0 * math.pi) * math.log(fu / u + math.sqrt(1.0 + (2.0 / u)**2))
    return z0_air / math.sqrt(eps_eff), eps_eff


def microstrip_synthesize(width: float, height: float, eps_r: float,
                          thickness: float, f: float,
                          conductivity: float = 4.1e7,
                          tan_delta: float = 1e-3) -> MicrostripParams:
    """Line parameters at one frequency.

    Conductor loss uses the skin-effect surface resistance over the strip
    width; dielectric loss uses the filling-factor form of the loss tangent.
    """
    z0, eps_eff = hammerstad_jensen_z0(width, height, eps_r)
    rs = math.sqrt(math.pi * f * MU0 / conductivity)
    alpha_c = rs / (z0 * width)
    if eps_r > 1.0:
        k0 = 2.0 * math.pi * f / C0
        alpha_d = (k0 * eps_r * (eps_eff - 1.0) * tan_delta
                   / (2.0 * math.sqrt(eps_eff) * (eps_r - 1.0)))
    else:
        alpha_d = 0.0
    return MicrostripParams(width=width, substrate_height=height,
                            substrate_eps_r=eps_r,
                            conductor_thickness=thickness,
                            z0=z0, eps_eff=eps_eff,
                            alpha_c=alpha_c, alpha_d=alpha_d)


# ---------------------------------------------------------------------------
# two-port chain matrices

@dataclass
class TwoPortABCD:
    frequencies: np.ndarray      # Hz
    m: np.ndarray                # (F, 2, 2) complex

    @property
    def det(self) -> np.ndarray:
        return (self.m[:, 0, 0] * self.m[:, 1, 1]
                - self.m[:, 0, 1] * self.m[:, 1, 0])


def _as_freq_array(f) -> np.ndarray:
    return np.atleast_1d(np.asarray(f, dtype=float))


def abcd_line(z0: float, eps_eff: float, alpha: float, length: float,
              f) -> TwoPortABCD:
    """Lossy transmission line, gamma = alpha + j 2 pi f sqrt(eps_eff)/c0."""
    if length < 0.0:
        raise ValueError("length must be >= 0")
    freqs = _as_freq_array(f)
    gamma = alpha + 1j * 2.0 * math.pi * freqs * math.sqrt(eps_eff) / C0
    gl = gamma * length
    m = np.empty((len(freqs), 2, 2), dtype=complex)
    m[:, 0, 0] = np.cosh(gl)
    m[:, 0, 1] = z0 * np.sinh(gl)
    m[:, 1, 0] = np.sinh(gl) / z0
    m[:, 1, 1] = np.cosh(gl)
    return TwoPortABCD(freqs, m)


def abcd_shunt(y, f) -> TwoPortABCD:
    freqs = _as_freq_array(f)
    yv = np.broadcast_to(np.asarray(y, dtype=complex), freqs.shape)
    m = np.zeros((len(freqs), 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 1, 0] = yv
    return TwoPortABCD(freqs, m)


def abcd_series(z, f) -> TwoPortABCD:
    freqs = _as_freq_array(f)
    zv = np.broadcast_to(np.asarray(z, dtype=complex), freqs.shape)
    m = np.zeros((len(freqs), 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 0, 1] = zv
    return TwoPortABCD(freqs, m)


def cascade(elements) -> TwoPortABCD:
    """Ordered chain product, input side first."""
    elements = list(elements)
    if not elements:
        raise ValueError("cascade of zero elements")
    freqs = elements[0].frequencies
    for el in elements[1:]:
        if len(el.frequencies) != len(freqs) or not np.allclose(
                el.frequencies, freqs, rtol=0.0, atol=0.0):
            raise GridError("frequency grids differ between cascade elements")
    m = elements[0].m
    for el in elements[1:]:
        m = m @ el.m
    return TwoPortABCD(freqs, m)


def abcd_to_s(abcd: TwoPortABCD, z0: float = 50.0) -> np.ndarray:
    """Chain matrix to S-matrix for a real reference impedance."""
    A = abcd.m[:, 0, 0]
    B = abcd.m[:, 0, 1]
    C = abcd.m[:, 1, 0]
    D = abcd.m[:, 1, 1]
    den = A + B / z0 + C * z0 + D
    s = np.empty_like(abcd.m)
    s[:, 0, 0] = (A + B / z0 - C * z0 - D) / den
    s[:, 0, 1] = 2.0 * (A * D - B * C) / den
    s[:, 1, 0] = 2.0 / den
    s[:, 1, 1] = (-A + B / z0 - C * z0 + D) / den
    return s


def terminated_input_impedance(abcd: TwoPortABCD, z_load) -> np.ndarray:
    """Z_in = (A Z_L + B) / (C Z_L + D)."""
    A = abcd.m[:, 0, 0]
    B = abcd.m[:, 0, 1]
    C = abcd.m[:, 1, 0]
    D = abcd.m[:, 1, 1]
    return (A * z_load + B) / (C * z_load + D)


# ---------------------------------------------------------------------------
# stub and branch model

def stub_impedance(z_stub: float, f0: float, f) -> np.ndarray:
    """Open-stub equivalent of the radial stub: Z = -j z cot(theta),
    theta(f) = (pi/2) f/f0, so Z(f0) ~ 0 (virtual ground)."""
    freqs = _as_freq_array(f)
    theta = 0.5 * math.pi * freqs / f0
    return -1j * z_stub / np.tan(theta)


@dataclass(frozen=True)
class SwitchBranchModel:
    c_up: float
    c_down: float
    stub_z0: float
    f0: float
    quarter_wave_length: float
    output_line_length: float

    def shunt_admittance(self, state: str, f) -> np.ndarray:
        """Admittance of [C_state in series with the stub] to ground."""
        freqs = _as_freq_array(f)
        c = {"up": self.c_up, "down": self.c_down}[state]
        z_c = 1.0 / (1j * 2.0 * math.pi * freqs * c)
        return 1.0 / (z_c + stub_impedance(self.stub_z0, self.f0, freqs))


def switch_capacitances(mech_up, mech_down, cfg: DeviceConfig,
                        line_index: int = 0) -> tuple[float, float]:
    """Line capacitance in the released and slapped mechanical states."""
    fp = line_footprint(cfg, line_index)
    c_up = capacitance(cfg, mech_up.mesh, mech_up.w, fp)
    c_down = capacitance(cfg, mech_down.mesh, mech_down.w, fp)
    return c_up, c_down


# ---------------------------------------------------------------------------
# network assembly and S-parameter solve

@dataclass
class Network:
    """Nodal description: two-port stamps between nodes plus shunts."""
    ports: list[str]
    twoports: list[tuple[str, str, object]]   # (node_a, node_b, fn(f)->TwoPortABCD)
    shunts: list[tuple[str, object]]          # (node, fn(f)->Y array)
    z0: float = 50.0

    def nodes(self) -> list[str]:
        names = list(self.ports)
        for a, b, _ in self.twoports:
            for n in (a, b):
                if n not in names:
                    names.append(n)
        for n, _ in self.shunts:
            if n not in names:
                names.append(n)
        return names


@dataclass
class SParameters:
    frequencies: np.ndarray
    s: np.ndarray                # (F, N, N) complex
    z0: float = 50.0


def solve_sparams(network: Network, frequencies) -> SParameters:
    """Assemble the nodal admittance per frequency, eliminate internal nodes
    by a Schur complement and convert to S with z0-referenced ports."""
    freqs = _as_freq_array(frequencies)
    if np.any(freqs <= 0.0) or np.any(np.diff(freqs) <= 0.0):
        raise ValueError("frequencies must be positive ascending")
    names = network.nodes()
    index = {n: i for i, n in enumerate(names)}
    N = len(names)
    F = len(freqs)
    Y = np.zeros((F, N, N), dtype=complex)
    for a, b, fn in network.twoports:
        tp = fn(freqs)
        A = tp.m[:, 0, 0]
        B = tp.m[:, 0, 1]
        C = tp.m[:, 1, 0]
        D = tp.m[:, 1, 1]
        ia, ib = index[a], index[b]
        Y[:, ia, ia] += D / B
        Y[:, ia, ib] += (B * C - A * D) / B
        Y[:, ib, ia] += -1.0 / B
        Y[:, ib, ib] += A / B
    for n, fn in network.shunts:
        Y[:, index[n], index[n]] += np.broadcast_to(
            np.asarray(fn(freqs), dtype=complex), freqs.shape)

    np_ports = len(network.ports)
    pidx = np.arange(np_ports)
    iidx = np.arange(np_ports, N)
    Ypp = Y[np.ix_(np.arange(F), pidx, pidx)]
    if len(iidx):
        Ypi = Y[np.ix_(np.arange(F), pidx, iidx)]
        Yip = Y[np.ix_(np.arange(F), iidx, pidx)]
        Yii = Y[np.ix_(np.arange(F), iidx, iidx)]
        try:
            Yp = Ypp - Ypi @ np.linalg.solve(Yii, Yip)
        except np.linalg.LinAlgError:
            for k in range(F):
                try:
                    np.linalg.solve(Yii[k], Yip[k])
                except np.linalg.LinAlgError:
                    raise SingularNetwork(freqs[k]) from None
            raise
    else:
        Yp = Ypp
    eye = np.eye(np_ports)
    s = np.linalg.solve(
        np.broadcast_to(eye, Yp.shape) + network.z0 * Yp,
        np.broadcast_to(eye, Yp.shape) - network.z0 * Yp)
    # (I + z0 Y)^-1 (I - z0 Y) equals (I - z0 Y)(I + z0 Y)^-1 here since the
    # two factors commute
    return SParameters(frequencies=freqs, s=s, z0=network.z0)


@dataclass
class Spdt:
    network: Network
    branch_a: SwitchBranchModel
    branch_b: SwitchBranchModel
    state_a: str
    state_b: str
    line: MicrostripParams
    path_length: float           # input line + quarter wave + output line


def build_spdt(cfg: DeviceConfig, branch_a_state: str, branch_b_state: str,
               c_up: float | None = None, c_down: float | None = None,
               mech_solutions=None) -> Spdt:
    """Three-port SPDT: input line into an ideal T junction, then per branch
    a quarter-wave line, the capacitive shunt (switch capacitance in series
    with the stub's virtual ground) and the output line.

    Switch capacitances may be given directly; otherwise they come from the
    two coupled-field solutions (odd and even actuation at the configured
    voltage), via ``mech_solutions=(mech_up, mech_down)``.
    """
    for s in (branch_a_state, branch_b_state):
        if s not in ("up", "down"):
            raise ValueError(f"branch state must be 'up' or 'down', got {s!r}")
    rf = cfg.rf
    if c_up is None or c_down is None:
        if mech_solutions is None:
            from .solver import solve_static
            mech_up = solve_static(cfg, ODD, rf.actuation_voltage)
            mech_down = solve_static(cfg, EVEN, rf.actuation_voltage)
        else:
            mech_up, mech_down = mech_solutions
        c_up, c_down = switch_capacitances(mech_up, mech_down, cfg)
    line = microstrip_synthesize(rf.line_width, rf.substrate_height,
                                 rf.substrate_eps_r, rf.conductor_thickness,
                                 rf.f0, conductivity=cfg.material.conductivity,
                                 tan_delta=rf.loss_tangent)
    lam_quarter = C0 / (rf.f0 * math.sqrt(line.eps_eff)) / 4.0
    branch = SwitchBranchModel(c_up=c_up, c_down=c_down, stub_z0=rf.stub_z0,
                               f0=rf.f0, quarter_wave_length=lam_quarter,
                               output_line_length=rf.output_line_length)
    alpha = line.alpha_c + line.alpha_d

    def seg(length):
        return lambda f, L=length: abcd_line(line.z0, line.eps_eff, alpha, L, f)

    twoports = [("P1", "J", seg(rf.input_line_length)),
                ("J", "A", seg(lam_quarter)),
                ("A", "P2", seg(rf.output_line_length)),
                ("J", "B", seg(lam_quarter)),
                ("B", "P3", seg(rf.output_line_length))]
    shunts = [("A", lambda f: branch.shunt_admittance(branch_a_state, f)),
              ("B", lambda f: branch.shunt_admittance(branch_b_state, f))]
    network = Network(ports=["P1", "P2", "P3"], twoports=twoports,
                      shunts=shunts, z0=rf.system_z0)
    return Spdt(network=network, branch_a=branch, branch_b=branch,
                state_a=branch_a_state, state_b=branch_b_state, line=line,
                path_length=rf.input_line_length + lam_quarter
                + rf.output_line_length)


# ---------------------------------------------------------------------------
# metrics and export

def db(x) -> np.ndarray:
    return -20.0 * np.log10(np.maximum(np.abs(x), 1e-300))


def metrics(sp: SParameters, on_port: int = 2, off_port: int = 3,
            path_length: float | None = None) -> dict[str, np.ndarray]:
    """dB quantities over the frequency grid.

    Ports are 1-based: 1 is the input. Insertion loss normalized to a 2 mm
    path is reported separately when the physical path length is known.
    """
    s = sp.s
    out = {
        "frequency_hz": sp.frequencies,
        "return_loss_db": db(s[:, 0, 0]),
        "insertion_loss_db": db(s[:, on_port - 1, 0]),
        "isolation_input_off_db": db(s[:, off_port - 1, 0]),
        "isolation_output_output_db": db(s[:, off_port - 1, on_port - 1]),
    }
    if path_length is not None:
        out["insertion_loss_per_2mm_db"] = (out["insertion_loss_db"]
                                            * 2e-3 / path_length)
    return out


def metrics_at(sp: SParameters, f0: float, **kwargs) -> dict[str, float]:
    """Metrics row at the grid point nearest f0 (no interpolation)."""
    table = metrics(sp, **kwargs)
    i = int(np.argmin(np.abs(sp.frequencies - f0)))
    return {k: float(v[i]) for k, v in table.items()}


def touchstone(sp: SParameters) -> str:
    """Touchstone v1 text, `# HZ S MA R <z0>`, one frequency per line.

    Two-port data uses the standard S11 S21 S12 S22 column order; larger
    networks are written row-major.
    """
    n = sp.s.shape[1]
    lines = [f"# HZ S MA R {sp.z0:g}"]
    if n == 2:
        order = [(0, 0), (1, 0), (0, 1), (1, 1)]
    else:
        order = [(i, j) for i in range(n) for j in range(n)]
    for k, f in enumerate(sp.frequencies):
        parts = [f"{f:.10g}"]
        for i, j in order:
            v = sp.s[k, i, j]
            parts.append(f"{abs(v):.12e}")
            parts.append(f"{math.degrees(math.atan2(v.imag, v.real)):.12e}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def sparams_csv(sp: SParameters) -> str:
    """CSV export: freq_hz, re_s11, im_s11, ... row-major over ports."""
    n = sp.s.shape[1]
    header = ["freq_hz"]
    for i in range(n):
        for j in range(n):
            header.append(f"re_s{i + 1}{j + 1}")
            header.append(f"im_s{i + 1}{j + 1}")
    rows = [",".join(header)]
    for k, f in enumerate(sp.frequencies):
        parts = [f"{f:.10g}"]
        for i in range(n):
            for j in range(n):
                parts.append(f"{sp.s[k, i, j].real:.12e}")
                parts.append(f"{sp.s[k, i, j].imag:.12e}")
        rows.append(",".join(parts))
    return "\n".join(rows) + "\n"
