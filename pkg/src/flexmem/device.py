"""Device parameterization: geometry, materials, actuation states, config I/O.

All quantities are SI base units (m, Pa, kg/m^3, V, Hz). The membrane is a
variable-width beam resting on three pillars; electrodes, line contacts and
mechanical stops are footprints along the beam axis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources

from .errors import DomainError, InvalidConfig, InvalidDocument

ELECTRODE_IDS = ("E1", "E2", "E3", "E4")

REST = "rest"
ODD = "odd"
EVEN = "even"
RESTORE = "restore"
STATES = (REST, ODD, EVEN, RESTORE)


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


@dataclass(frozen=True)
class MaterialProps:
    youngs_modulus: float        # Pa
    poisson_ratio: float
    density: float               # kg/m^3
    thermal_expansion: float     # 1/K
    dielectric_rel_permittivity: float  # nitride layer
    conductivity: float          # S/m, conductor loss in the RF model


@dataclass(frozen=True)
class Segment:
    x_start: float
    x_end: float
    width: float


@dataclass(frozen=True)
class MembraneProfile:
    length: float
    thickness: float
    segments: tuple[Segment, ...]


@dataclass(frozen=True)
class Pillar:
    position: float
    anti_stick_layer: float = 0.0  # informational only


@dataclass(frozen=True)
class Electrode:
    id: str
    x_start: float
    x_end: float
    gap: float                   # air gap at rest
    dielectric_thickness: float  # nitride on the electrode


@dataclass(frozen=True)
class ContactTarget:
    kind: str                    # "line" or "stop"
    x_start: float
    x_end: float
    clearance: float             # line: gap below membrane; stop: gap above
    adhesion_pressure: float = 0.0  # lines only


@dataclass(frozen=True)
class ActuationStateMap:
    odd: tuple[str, ...]
    even: tuple[str, ...]
    restore: tuple[str, ...] = ("E1", "E4")


@dataclass(frozen=True)
class SolverSettings:
    n_elements: int = 120
    newton_tol: float = 1e-8
    penalty_scale: float = 1e3
    damping_ratio: float = 0.1


@dataclass(frozen=True)
class RfSettings:
    line_width: float = 60e-6
    substrate_height: float = 75e-6
    substrate_eps_r: float = 11.9
    loss_tangent: float = 1e-3
    conductor_thickness: float = 1e-6
    f0: float = 24e9
    freq_start: float = 18e9
    freq_stop: float = 30e9
    freq_points: int = 121
    stub_z0: float = 30.0
    input_line_length: float = 1e-3
    output_line_length: float = 1e-3
    actuation_voltage: float = 7.5
    system_z0: float = 50.0


@dataclass(frozen=True)
class DeviceConfig:
    material: MaterialProps
    profile: MembraneProfile
    pillars: tuple[Pillar, ...]
    electrodes: tuple[Electrode, ...]
    contacts: tuple[ContactTarget, ...]
    states: ActuationStateMap
    solver: SolverSettings = field(default_factory=SolverSettings)
    rf: RfSettings = field(default_factory=RfSettings)

    def electrode(self, eid: str) -> Electrode:
        for e in self.electrodes:
            if e.id == eid:
                return e
        raise KeyError(eid)

    @property
    def lines(self) -> tuple[ContactTarget, ...]:
        return tuple(c for c in self.contacts if c.kind == "line")

    @property
    def stops(self) -> tuple[ContactTarget, ...]:
        return tuple(c for c in self.contacts if c.kind == "stop")


# ---------------------------------------------------------------------------
# geometry queries

def width_at(profile: MembraneProfile, x: float) -> float:
    """Membrane width at abscissa x; at a joint the right segment wins."""
    L = profile.length
    if x < 0.0 or x > L:
        raise DomainError(f"x = {x!r} outside [0, {L!r}]")
    if x == L:
        return profile.segments[-1].width
    for seg in profile.segments:
        if seg.x_start <= x < seg.x_end:
            return seg.width
    # only reachable on non-contiguous (invalid) profiles
    raise DomainError(f"x = {x!r} not covered by any segment")


def electrodes_for(states: ActuationStateMap, state: str) -> tuple[str, ...]:
    """Energized electrode ids for one of the four states, sorted by id."""
    if state == REST:
        ids = ()
    elif state == ODD:
        ids = states.odd
    elif state == EVEN:
        ids = states.even
    elif state == RESTORE:
        ids = states.restore
    else:
        raise ValueError(f"unknown state {state!r}")
    return tuple(sorted(ids))


# ---------------------------------------------------------------------------
# validation

def _positive(value, path, out, strict=True):
    ok = value > 0 if strict else value >= 0
    if not ok:
        word = "positive" if strict else "non-negative"
        out.append(Violation(path, f"must be {word}, got {value!r}"))


def validate(cfg: DeviceConfig) -> list[Violation]:
    """Check every config invariant; returns all violations (empty = valid)."""
    v: list[Violation] = []
    m = cfg.material
    _positive(m.youngs_modulus, "material.youngs_modulus", v)
    _positive(m.density, "material.density", v)
    _positive(m.thermal_expansion, "material.thermal_expansion", v)
    _positive(m.dielectric_rel_permittivity, "material.dielectric_rel_permittivity", v)
    _positive(m.conductivity, "material.conductivity", v)
    if not 0.0 < m.poisson_ratio < 0.5:
        v.append(Violation("material.poisson_ratio",
                           f"must lie in (0, 0.5), got {m.poisson_ratio!r}"))

    p = cfg.profile
    L = p.length
    _positive(L, "profile.length", v)
    _positive(p.thickness, "profile.thickness", v)
    if not p.segments:
        v.append(Violation("profile.segments", "at least one segment required"))
    else:
        if p.segments[0].x_start != 0.0:
            v.append(Violation("profile.segments[0].x_start", "must be 0"))
        if p.segments[-1].x_end != L:
            v.append(Violation(f"profile.segments[{len(p.segments)-1}].x_end",
                               f"must equal length {L!r}"))
        prev_end = None
        for i, seg in enumerate(p.segments):
            path = f"profile.segments[{i}]"
            if seg.x_start >= seg.x_end:
                v.append(Violation(path, "x_start must be < x_end"))
            _positive(seg.width, path + ".width", v)
            if prev_end is not None and seg.x_start != prev_end:
                v.append(Violation(path + ".x_start",
                                   f"gap or overlap at {prev_end!r}"))
            prev_end = seg.x_end

    if len(cfg.pillars) != 3:
        v.append(Violation("pillars", f"expected 3, got {len(cfg.pillars)}"))
    seen = set()
    for i, pil in enumerate(cfg.pillars):
        if not 0.0 < pil.position < L:
            v.append(Violation(f"pillars[{i}].position",
                               f"must lie strictly inside (0, {L!r})"))
        if pil.position in seen:
            v.append(Violation(f"pillars[{i}].position", "duplicate position"))
        seen.add(pil.position)

    ids = [e.id for e in cfg.electrodes]
    if len(set(ids)) != len(ids):
        v.append(Violation("electrodes", f"duplicate ids {ids}"))
    for i, e in enumerate(cfg.electrodes):
        path = f"electrodes[{i}]"
        if e.id not in ELECTRODE_IDS:
            v.append(Violation(path + ".id", f"unknown id {e.id!r}"))
        if e.x_start >= e.x_end:
            v.append(Violation(path, "x_start must be < x_end"))
        if e.x_start < 0.0 or e.x_end > L:
            v.append(Violation(path, "footprint outside membrane"))
        _positive(e.gap, path + ".gap", v)
        _positive(e.dielectric_thickness, path + ".dielectric_thickness", v,
                  strict=False)
    by_id = sorted(cfg.electrodes, key=lambda e: e.id)
    for a, b in zip(by_id, by_id[1:]):
        if a.x_end > b.x_start:
            v.append(Violation("electrodes",
                               f"{a.id} and {b.id} overlap or are out of order"))

    for i, c in enumerate(cfg.contacts):
        path = f"contacts[{i}]"
        if c.kind not in ("line", "stop"):
            v.append(Violation(path + ".kind", f"unknown kind {c.kind!r}"))
        if c.x_start >= c.x_end:
            v.append(Violation(path, "x_start must be < x_end"))
        if c.x_start < 0.0 or c.x_end > L:
            v.append(Violation(path, "footprint outside membrane"))
        _positive(c.clearance, path + ".clearance", v)
        if c.adhesion_pressure < 0.0:
            v.append(Violation(path + ".adhesion_pressure", "must be >= 0"))
        if c.kind == "stop" and c.adhesion_pressure != 0.0:
            v.append(Violation(path + ".adhesion_pressure", "stops cannot adhere"))

    st = cfg.states
    odd, even = set(st.odd), set(st.even)
    known = set(ids)
    for name, group in (("odd", odd), ("even", even)):
        if len(group) != 2:
            v.append(Violation(f"states.{name}", "must name exactly 2 electrodes"))
        missing = group - known
        if missing:
            v.append(Violation(f"states.{name}", f"unknown electrodes {sorted(missing)}"))
    if odd & even:
        v.append(Violation("states", f"odd and even overlap: {sorted(odd & even)}"))
    if (odd | even) != set(ELECTRODE_IDS):
        v.append(Violation("states", "odd and even must partition {E1..E4}"))
    if set(st.restore) != {"E1", "E4"}:
        v.append(Violation("states.restore", "must be exactly {E1, E4}"))

    s = cfg.solver
    if s.n_elements < 10:
        v.append(Violation("solver.n_elements", "must be >= 10"))
    _positive(s.newton_tol, "solver.newton_tol", v)
    _positive(s.penalty_scale, "solver.penalty_scale", v)
    _positive(s.damping_ratio, "solver.damping_ratio", v, strict=False)

    r = cfg.rf
    _positive(r.line_width, "rf.line_width", v)
    _positive(r.substrate_height, "rf.substrate_height", v)
    if r.substrate_eps_r < 1.0:
        v.append(Violation("rf.substrate_eps_r", "must be >= 1"))
    _positive(r.loss_tangent, "rf.loss_tangent", v, strict=False)
    _positive(r.f0, "rf.f0", v)
    if not 0.0 < r.freq_start < r.freq_stop:
        v.append(Violation("rf.freq_start", "need 0 < freq_start < freq_stop"))
    if r.freq_points < 2:
        v.append(Violation("rf.freq_points", "must be >= 2"))
    _positive(r.stub_z0, "rf.stub_z0", v)
    _positive(r.system_z0, "rf.system_z0", v)
    return v


# ---------------------------------------------------------------------------
# JSON I/O (strict schema: unknown keys are errors)

_MATERIAL_KEYS = {"youngs_modulus", "poisson_ratio", "density",
                  "thermal_expansion", "dielectric_rel_permittivity",
                  "conductivity"}
_SEGMENT_KEYS = {"x_start", "x_end", "width"}
_PROFILE_KEYS = {"length", "thickness", "segments"}
_PILLAR_KEYS = {"position", "anti_stick_layer"}
_ELECTRODE_KEYS = {"id", "x_start", "x_end", "gap", "dielectric_thickness"}
_CONTACT_KEYS = {"kind", "x_start", "x_end", "clearance", "adhesion_pressure"}
_STATE_KEYS = {"odd", "even", "restore"}
_SOLVER_KEYS = {"n_elements", "newton_tol", "penalty_scale", "damping_ratio"}
_RF_KEYS = {"line_width", "substrate_height", "substrate_eps_r", "loss_tangent",
            "conductor_thickness", "f0", "freq_start", "freq_stop",
            "freq_points", "stub_z0", "input_line_length",
            "output_line_length", "actuation_voltage", "system_z0"}
_TOP_KEYS = {"material", "profile", "pillars", "electrodes", "contacts",
             "states", "solver", "rf"}


def _require_mapping(obj, path):
    if not isinstance(obj, dict):
        raise InvalidDocument("expected an object", path)


def _check_keys(obj, allowed, path):
    _require_mapping(obj, path)
    unknown = set(obj) - allowed
    if unknown:
        raise InvalidDocument(f"unknown key {sorted(unknown)[0]!r}", path)


def _number(obj, key, path, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise InvalidDocument("missing required key", f"{path}.{key}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise InvalidDocument(f"expected a number, got {val!r}", f"{path}.{key}")
    return float(val)


def _integer(obj, key, path, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise InvalidDocument("missing required key", f"{path}.{key}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise InvalidDocument(f"expected an integer, got {val!r}", f"{path}.{key}")
    return val


def _string(obj, key, path):
    if key not in obj:
        raise InvalidDocument("missing required key", f"{path}.{key}")
    val = obj[key]
    if not isinstance(val, str):
        raise InvalidDocument(f"expected a string, got {val!r}", f"{path}.{key}")
    return val


def _string_list(obj, key, path):
    if key not in obj:
        raise InvalidDocument("missing required key", f"{path}.{key}")
    val = obj[key]
    if not isinstance(val, list) or not all(isinstance(s, str) for s in val):
        raise InvalidDocument("expected a list of strings", f"{path}.{key}")
    return tuple(val)


def config_from_dict(doc: dict) -> DeviceConfig:
    """Build and validate a DeviceConfig from a parsed JSON document."""
    _check_keys(doc, _TOP_KEYS, "<root>")
    for key in ("material", "profile", "pillars", "electrodes", "contacts",
                "states"):
        if key not in doc:
            raise InvalidDocument("missing required section", key)

    mat = doc["material"]
    _check_keys(mat, _MATERIAL_KEYS, "material")
    material = MaterialProps(
        youngs_modulus=_number(mat, "youngs_modulus", "material"),
        poisson_ratio=_number(mat, "poisson_ratio", "material"),
        density=_number(mat, "density", "material"),
        thermal_expansion=_number(mat, "thermal_expansion", "material"),
        dielectric_rel_permittivity=_number(mat, "dielectric_rel_permittivity",
                                            "material"),
        conductivity=_number(mat, "conductivity", "material"),
    )

    prof = doc["profile"]
    _check_keys(prof, _PROFILE_KEYS, "profile")
    raw_segments = prof.get("segments")
    if not isinstance(raw_segments, list):
        raise InvalidDocument("expected a list", "profile.segments")
    segments = []
    for i, raw in enumerate(raw_segments):
        path = f"profile.segments[{i}]"
        _check_keys(raw, _SEGMENT_KEYS, path)
        segments.append(Segment(x_start=_number(raw, "x_start", path),
                                x_end=_number(raw, "x_end", path),
                                width=_number(raw, "width", path)))
    profile = MembraneProfile(length=_number(prof, "length", "profile"),
                              thickness=_number(prof, "thickness", "profile"),
                              segments=tuple(segments))

    if not isinstance(doc["pillars"], list):
        raise InvalidDocument("expected a list", "pillars")
    pillars = []
    for i, raw in enumerate(doc["pillars"]):
        path = f"pillars[{i}]"
        _check_keys(raw, _PILLAR_KEYS, path)
        pillars.append(Pillar(position=_number(raw, "position", path),
                              anti_stick_layer=_number(raw, "anti_stick_layer",
                                                       path, default=0.0)))

    if not isinstance(doc["electrodes"], list):
        raise InvalidDocument("expected a list", "electrodes")
    electrodes = []
    for i, raw in enumerate(doc["electrodes"]):
        path = f"electrodes[{i}]"
        _check_keys(raw, _ELECTRODE_KEYS, path)
        electrodes.append(Electrode(
            id=_string(raw, "id", path),
            x_start=_number(raw, "x_start", path),
            x_end=_number(raw, "x_end", path),
            gap=_number(raw, "gap", path),
            dielectric_thickness=_number(raw, "dielectric_thickness", path),
        ))

    if not isinstance(doc["contacts"], list):
        raise InvalidDocument("expected a list", "contacts")
    contacts = []
    for i, raw in enumerate(doc["contacts"]):
        path = f"contacts[{i}]"
        _check_keys(raw, _CONTACT_KEYS, path)
        contacts.append(ContactTarget(
            kind=_string(raw, "kind", path),
            x_start=_number(raw, "x_start", path),
            x_end=_number(raw, "x_end", path),
            clearance=_number(raw, "clearance", path),
            adhesion_pressure=_number(raw, "adhesion_pressure", path,
                                      default=0.0),
        ))

    st = doc["states"]
    _check_keys(st, _STATE_KEYS, "states")
    states = ActuationStateMap(
        odd=_string_list(st, "odd", "states"),
        even=_string_list(st, "even", "states"),
        restore=_string_list(st, "restore", "states") if "restore" in st
        else ("E1", "E4"),
    )

    sol = doc.get("solver", {})
    _check_keys(sol, _SOLVER_KEYS, "solver")
    defaults = SolverSettings()
    solver = SolverSettings(
        n_elements=_integer(sol, "n_elements", "solver", defaults.n_elements),
        newton_tol=_number(sol, "newton_tol", "solver", defaults.newton_tol),
        penalty_scale=_number(sol, "penalty_scale", "solver",
                              defaults.penalty_scale),
        damping_ratio=_number(sol, "damping_ratio", "solver",
                              defaults.damping_ratio),
    )

    rf_doc = doc.get("rf", {})
    _check_keys(rf_doc, _RF_KEYS, "rf")
    rd = RfSettings()
    rf = RfSettings(
        line_width=_number(rf_doc, "line_width", "rf", rd.line_width),
        substrate_height=_number(rf_doc, "substrate_height", "rf",
                                 rd.substrate_height),
        substrate_eps_r=_number(rf_doc, "substrate_eps_r", "rf",
                                rd.substrate_eps_r),
        loss_tangent=_number(rf_doc, "loss_tangent", "rf", rd.loss_tangent),
        conductor_thickness=_number(rf_doc, "conductor_thickness", "rf",
                                    rd.conductor_thickness),
        f0=_number(rf_doc, "f0", "rf", rd.f0),
        freq_start=_number(rf_doc, "freq_start", "rf", rd.freq_start),
        freq_stop=_number(rf_doc, "freq_stop", "rf", rd.freq_stop),
        freq_points=_integer(rf_doc, "freq_points", "rf", rd.freq_points),
        stub_z0=_number(rf_doc, "stub_z0", "rf", rd.stub_z0),
        input_line_length=_number(rf_doc, "input_line_length", "rf",
                                  rd.input_line_length),
        output_line_length=_number(rf_doc, "output_line_length", "rf",
                                   rd.output_line_length),
        actuation_voltage=_number(rf_doc, "actuation_voltage", "rf",
                                  rd.actuation_voltage),
        system_z0=_number(rf_doc, "system_z0", "rf", rd.system_z0),
    )

    cfg = DeviceConfig(material=material, profile=profile,
                       pillars=tuple(pillars), electrodes=tuple(electrodes),
                       contacts=tuple(contacts), states=states,
                       solver=solver, rf=rf)
    violations = validate(cfg)
    if violations:
        raise InvalidConfig(violations)
    return cfg


def load_config(text: str) -> DeviceConfig:
    """Parse a JSON config document; raises InvalidDocument / InvalidConfig."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDocument(f"not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def config_to_dict(cfg: DeviceConfig) -> dict:
    return {
        "material": {
            "youngs_modulus": cfg.material.youngs_modulus,
            "poisson_ratio": cfg.material.poisson_ratio,
            "density": cfg.material.density,
            "thermal_expansion": cfg.material.thermal_expansion,
            "dielectric_rel_permittivity": cfg.material.dielectric_rel_permittivity,
            "conductivity": cfg.material.conductivity,
        },
        "profile": {
            "length": cfg.profile.length,
            "thickness": cfg.profile.thickness,
            "segments": [{"x_start": s.x_start, "x_end": s.x_end,
                          "width": s.width} for s in cfg.profile.segments],
        },
        "pillars": [{"position": p.position,
                     "anti_stick_layer": p.anti_stick_layer}
                    for p in cfg.pillars],
        "electrodes": [{"id": e.id, "x_start": e.x_start, "x_end": e.x_end,
                        "gap": e.gap,
                        "dielectric_thickness": e.dielectric_thickness}
                       for e in cfg.electrodes],
        "contacts": [{"kind": c.kind, "x_start": c.x_start, "x_end": c.x_end,
                      "clearance": c.clearance,
                      "adhesion_pressure": c.adhesion_pressure}
                     for c in cfg.contacts],
        "states": {"odd": list(cfg.states.odd), "even": list(cfg.states.even),
                   "restore": list(cfg.states.restore)},
        "solver": {"n_elements": cfg.solver.n_elements,
                   "newton_tol": cfg.solver.newton_tol,
                   "penalty_scale": cfg.solver.penalty_scale,
                   "damping_ratio": cfg.solver.damping_ratio},
        "rf": {"line_width": cfg.rf.line_width,
               "substrate_height": cfg.rf.substrate_height,
               "substrate_eps_r": cfg.rf.substrate_eps_r,
               "loss_tangent": cfg.rf.loss_tangent,
               "conductor_thickness": cfg.rf.conductor_thickness,
               "f0": cfg.rf.f0,
               "freq_start": cfg.rf.freq_start,
               "freq_stop": cfg.rf.freq_stop,
               "freq_points": cfg.rf.freq_points,
               "stub_z0": cfg.rf.stub_z0,
               "input_line_length": cfg.rf.input_line_length,
               "output_line_length": cfg.rf.output_line_length,
               "actuation_voltage": cfg.rf.actuation_voltage,
               "system_z0": cfg.rf.system_z0},
    }


def serialize(cfg: DeviceConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"


def default_config_path() -> str:
    """Filesystem path of the shipped calibrated default config."""
    return str(resources.files("flexmem").joinpath("data/device_default.json"))


def default_config() -> DeviceConfig:
    text = resources.files("flexmem").joinpath(
        "data/device_default.json").read_text()
    return load_config(text)


# ---------------------------------------------------------------------------
# config transforms

def nominal_width(profile: MembraneProfile) -> float:
    """Body width, defined as the width at mid-span."""
    return width_at(profile, profile.length / 2.0)


def arm_segments(profile: MembraneProfile) -> tuple[int, ...]:
    """Indices of segments narrower than the body (the correlation arms)."""
    w0 = nominal_width(profile)
    return tuple(i for i, s in enumerate(profile.segments) if s.width < w0)


def wing_segments(profile: MembraneProfile) -> tuple[int, ...]:
    """Indices of segments wider than the body (the balancing wings)."""
    w0 = nominal_width(profile)
    return tuple(i for i, s in enumerate(profile.segments) if s.width > w0)


def _with_widths(cfg: DeviceConfig, indices, width) -> DeviceConfig:
    segs = list(cfg.profile.segments)
    for i in indices:
        segs[i] = replace(segs[i], width=width)
    return replace(cfg, profile=replace(cfg.profile, segments=tuple(segs)))


def remove_arms(cfg: DeviceConfig) -> DeviceConfig:
    """Widen every arm segment to the body width ("without arms" variant)."""
    return _with_widths(cfg, arm_segments(cfg.profile),
                        nominal_width(cfg.profile))


def remove_wings(cfg: DeviceConfig) -> DeviceConfig:
    """Narrow every wing segment to the body width ("without wings" variant)."""
    return _with_widths(cfg, wing_segments(cfg.profile),
                        nominal_width(cfg.profile))


def mirror_config(cfg: DeviceConfig) -> DeviceConfig:
    """Reflect the device about x = L/2.

    Electrode ids are reassigned left-to-right, which swaps the odd and even
    actuation groups and leaves rest/restore invariant.
    """
    L = cfg.profile.length

    def flip(a, b):
        return L - b, L - a

    segs = []
    for s in reversed(cfg.profile.segments):
        x0, x1 = flip(s.x_start, s.x_end)
        segs.append(Segment(x0, x1, s.width))
    profile = replace(cfg.profile, segments=tuple(segs))

    pillars = tuple(sorted((replace(p, position=L - p.position)
                            for p in cfg.pillars), key=lambda p: p.position))

    id_map = {}
    electrodes = []
    mirrored = sorted(cfg.electrodes, key=lambda e: L - e.x_end)
    for new_id, e in zip(ELECTRODE_IDS, mirrored):
        x0, x1 = flip(e.x_start, e.x_end)
        id_map[e.id] = new_id
        electrodes.append(replace(e, id=new_id, x_start=x0, x_end=x1))

    contacts = []
    for c in sorted(cfg.contacts, key=lambda c: (c.kind, L - c.x_end)):
        x0, x1 = flip(c.x_start, c.x_end)
        contacts.append(replace(c, x_start=x0, x_end=x1))

    states = ActuationStateMap(
        odd=tuple(sorted(id_map[e] for e in cfg.states.odd)),
        even=tuple(sorted(id_map[e] for e in cfg.states.even)),
        restore=tuple(sorted(id_map[e] for e in cfg.states.restore)),
    )
    return replace(cfg, profile=profile, pillars=pillars,
                   electrodes=tuple(electrodes), contacts=tuple(contacts),
                   states=states)
