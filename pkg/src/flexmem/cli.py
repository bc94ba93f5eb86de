"""Batch front end: run analyses from a config file, emit CSV / Touchstone /
JSON summaries and optional SVG plots, and drive parameter sweeps.

Exit codes: 0 success, 1 invalid config or arguments, 2 solver failure
(including unexpected pull-in), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, device
from .device import config_from_dict, load_config
from .errors import (FlexmemError, InvalidConfig, InvalidDocument,
                     NoPullInFound, PullInEncountered, TransientDiverged)
from .plots import line_plot
from .rf import build_spdt, metrics, metrics_at, solve_sparams, sparams_csv, touchstone
from .solver import (build_context, solve_modal, solve_pull_in, solve_static,
                     solve_transient, thermal_check)

log = logging.getLogger("flexmem")

STATES = {"rest": device.REST, "odd": device.ODD, "even": device.EVEN,
          "restore": device.RESTORE}


def _fnum(x: float) -> str:
    return f"{x:.12e}"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if o in (float("inf"), float("-inf")):
        return str(o)
    raise TypeError(type(o))


def _write(path: str, text: str):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IoFailure(str(exc)) from exc


class _IoFailure(Exception):
    pass


def parse_value(text: str):
    """Parse an override value: JSON literal, falling back to string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(doc: dict, path: str, value):
    """Set a dotted path like profile.thickness or electrodes[0].gap."""
    tokens = []
    for part in path.split("."):
        while "[" in part:
            head, rest = part.split("[", 1)
            idx, part = rest.split("]", 1)
            if head:
                tokens.append(head)
            tokens.append(int(idx))
        if part:
            tokens.append(part)
    obj = doc
    for tok in tokens[:-1]:
        try:
            obj = obj[tok]
        except (KeyError, IndexError, TypeError) as exc:
            raise InvalidDocument(f"override path does not resolve: {exc}",
                                  path) from exc
    last = tokens[-1]
    if isinstance(obj, dict) and last not in obj:
        raise InvalidDocument("override path names an unknown key", path)
    try:
        obj[last] = value
    except (IndexError, TypeError) as exc:
        raise InvalidDocument(f"override path does not resolve: {exc}",
                              path) from exc


def load_with_overrides(config_path: str, overrides):
    try:
        with open(config_path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise _IoFailure(f"cannot read config: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InvalidDocument(f"not valid JSON: {exc}") from exc
    for path, value in overrides:
        apply_override(doc, path, value)
    return config_from_dict(doc), raw


def write_manifest(out_dir: str, args, config_raw: str):
    digest = hashlib.sha256(config_raw.encode()).hexdigest()
    manifest = {
        "command": args.command,
        "config": os.path.abspath(args.config),
        "config_sha256": digest,
        "overrides": {k: v for k, v in args.overrides},
        "out": os.path.abspath(args.out),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tool_version": __version__,
    }
    _write(os.path.join(out_dir, "manifest.json"),
           json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def write_summary(out_dir: str, payload: dict):
    _write(os.path.join(out_dir, "summary.json"),
           json.dumps(payload, indent=2, sort_keys=True,
                      default=_json_default) + "\n")


# ---------------------------------------------------------------------------
# analyses

def _static_summary(sol):
    return {
        "state": sol.state,
        "voltage": sol.voltage,
        "converged": sol.converged,
        "newton_iterations": sol.newton_iterations,
        "residual_norm": sol.residual_norm,
        "max_down_deflection_m": sol.max_down_deflection,
        "max_up_deflection_m": sol.max_up_deflection,
        "collapsed_on_electrode": sol.collapsed,
        "max_stress_pa": float(sol.stress.max()),
        "line_contact_forces_n": [g.total_force for g in sol.contact.groups
                                  if g.kind == "line"],
        "line_contact_extents_m": [g.contact_extent for g in sol.contact.groups
                                   if g.kind == "line"],
        "pillar_forces_n": [g.total_force for g in sol.contact.groups
                            if g.kind == "pillar"],
        "capacitance_per_electrode_f": sol.capacitances.per_electrode,
        "capacitance_per_line_f": list(sol.capacitances.per_line),
        "first_full_seating": {str(k): {"voltage": v.voltage, "force_n": v.force}
                               for k, v in sol.seating.items()},
    }


def cmd_static(cfg, args, out_dir):
    sol = solve_static(cfg, STATES[args.state], args.voltage)
    rows = ["x_m,w_m,theta_rad"]
    for i, x in enumerate(sol.mesh.node_x):
        rows.append(f"{_fnum(x)},{_fnum(sol.w[2 * i])},{_fnum(sol.w[2 * i + 1])}")
    _write(os.path.join(out_dir, "deflection.csv"), "\n".join(rows) + "\n")
    if args.plot:
        svg = line_plot([("", list(sol.mesh.node_x), list(sol.w[0::2]))],
                        "x (m)", "w (m)", f"{args.state} at {args.voltage} V")
        _write(os.path.join(out_dir, "deflection.svg"), svg)
    return _static_summary(sol)


def cmd_pullin(cfg, args, out_dir):
    res = solve_pull_in(cfg, STATES[args.state])
    return {
        "state": args.state,
        "v_pull_in": res.v_pull_in,
        "resolution": res.resolution,
        "last_stable_voltage": res.last_stable.voltage,
        "last_stable_max_down_m": res.last_stable.max_down_deflection,
    }


def cmd_modal(cfg, args, out_dir):
    res = solve_modal(cfg, args.n)
    rows = ["mode,frequency_hz"]
    for i, f in enumerate(res.frequencies):
        rows.append(f"{i + 1},{_fnum(f)}")
    _write(os.path.join(out_dir, "modes.csv"), "\n".join(rows) + "\n")
    ctx = build_context(cfg)
    shape_rows = ["x_m" + "".join(f",mode{i + 1}_w" for i in
                                  range(len(res.frequencies)))]
    for i, x in enumerate(ctx.mesh.node_x):
        cells = [_fnum(x)] + [_fnum(res.shapes[2 * i, k])
                              for k in range(len(res.frequencies))]
        shape_rows.append(",".join(cells))
    _write(os.path.join(out_dir, "shapes.csv"), "\n".join(shape_rows) + "\n")
    return {"frequencies_hz": list(res.frequencies), "support": res.support}


def cmd_transient(cfg, args, out_dir):
    res = solve_transient(cfg, STATES[args.state], args.voltage,
                          args.t_end, args.dt)
    rows = ["t_s,w_min_m,w_max_m,line_force_n,energy_j"]
    wmin, wmax = res.w_min, res.w_max
    for k, t in enumerate(res.time):
        rows.append(",".join([_fnum(t), _fnum(wmin[k]), _fnum(wmax[k]),
                              _fnum(res.line_force[k]), _fnum(res.energy[k])]))
    _write(os.path.join(out_dir, "history.csv"), "\n".join(rows) + "\n")
    return {"state": args.state, "voltage": args.voltage,
            "switching_time_s": res.switching_time,
            "final_line_force_n": float(res.line_force[-1])}


def cmd_thermal(cfg, args, out_dir):
    res = thermal_check(cfg, args.delta_t)
    return {
        "delta_T_k": res.delta_T,
        "max_inplane_expansion_m": res.max_inplane_expansion,
        "clearance_m": res.clearance,
        "contact_predicted": res.contact_predicted,
        "delta_T_at_contact_k": res.delta_T_at_contact,
    }


def cmd_rf(cfg, args, out_dir):
    spdt = build_spdt(cfg, args.branch_a, args.branch_b)
    f0, f1, n = (args.freq_start or cfg.rf.freq_start,
                 args.freq_stop or cfg.rf.freq_stop,
                 args.freq_points or cfg.rf.freq_points)
    freqs = np.linspace(f0, f1, n)
    sp = solve_sparams(spdt.network, freqs)
    _write(os.path.join(out_dir, "spdt.s3p"), touchstone(sp))
    _write(os.path.join(out_dir, "sparams.csv"), sparams_csv(sp))
    on_port, off_port = (2, 3) if args.branch_a == "up" else (3, 2)
    table = metrics(sp, on_port=on_port, off_port=off_port,
                    path_length=spdt.path_length)
    keys = sorted(k for k in table if k != "frequency_hz")
    rows = ["frequency_hz," + ",".join(keys)]
    for i, f in enumerate(sp.frequencies):
        rows.append(",".join([_fnum(f)] + [_fnum(table[k][i]) for k in keys]))
    _write(os.path.join(out_dir, "metrics.csv"), "\n".join(rows) + "\n")
    if args.plot:
        series = [(lbl, list(sp.frequencies), list(-20 * np.log10(
            np.maximum(np.abs(sp.s[:, i, j]), 1e-300))))
            for lbl, i, j in (("|S11| (dB)", 0, 0), ("|S21| (dB)", 1, 0),
                              ("|S31| (dB)", 2, 0))]
        series = [(lbl, xs, [-v for v in ys]) for lbl, xs, ys in series]
        _write(os.path.join(out_dir, "sparams.svg"),
               line_plot(series, "f (Hz)", "|S| (dB)", "SPDT S-parameters"))
    at_f0 = metrics_at(sp, cfg.rf.f0, on_port=on_port, off_port=off_port,
                       path_length=spdt.path_length)
    return {
        "branch_a": args.branch_a, "branch_b": args.branch_b,
        "c_up_f": spdt.branch_a.c_up, "c_down_f": spdt.branch_a.c_down,
        "line_z0_ohm": spdt.line.z0, "line_eps_eff": spdt.line.eps_eff,
        "quarter_wave_m": spdt.branch_a.quarter_wave_length,
        "path_length_m": spdt.path_length,
        "metrics_at_f0": at_f0,
    }


SWEEP_ANALYSES = ("static", "modal", "pullin", "thermal")


def _sweep_point(raw_doc, path, value, args):
    doc = json.loads(raw_doc)
    apply_override(doc, path, value)
    for p, v in args.overrides:
        apply_override(doc, p, v)
    cfg = config_from_dict(doc)
    if args.analysis == "static":
        sol = solve_static(cfg, STATES[args.state], args.voltage)
        return {"max_down_deflection_m": sol.max_down_deflection,
                "max_up_deflection_m": sol.max_up_deflection,
                "max_deflection_m": max(sol.max_down_deflection,
                                        sol.max_up_deflection),
                "max_stress_pa": float(sol.stress.max())}
    if args.analysis == "modal":
        res = solve_modal(cfg, args.n)
        return {f"f{i + 1}_hz": f for i, f in enumerate(res.frequencies)}
    if args.analysis == "pullin":
        res = solve_pull_in(cfg, STATES[args.state])
        return {"v_pull_in": res.v_pull_in}
    res = thermal_check(cfg, args.delta_t)
    return {"delta_T_at_contact_k": res.delta_T_at_contact}


def cmd_sweep(cfg, args, out_dir, raw_doc):
    values = [parse_value(v) for v in args.values.split(",")]
    if not values:
        raise InvalidDocument("sweep needs at least one value", "values")

    def point(v):
        try:
            return _sweep_point(raw_doc, args.param, v, args), None
        except FlexmemError as exc:
            return None, f"{type(exc).__name__}: {exc}"

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(point, values))
    else:
        results = [point(v) for v in values]

    keys: list[str] = []
    for row, _err in results:
        if row:
            for k in row:
                if k not in keys:
                    keys.append(k)
    rows = [args.param + ",status," + ",".join(keys)]
    failed = False
    for v, (row, err) in zip(values, results):
        if row is None:
            failed = True
            rows.append(f"{v},failed," + ",".join([""] * len(keys)))
        else:
            rows.append(f"{v},ok," + ",".join(_fnum(row.get(k, float("nan")))
                                              for k in keys))
    _write(os.path.join(out_dir, "sweep.csv"), "\n".join(rows) + "\n")
    if args.plot and keys:
        xs = [float(v) for v, (row, _) in zip(values, results) if row]
        ys = [row[keys[0]] for row, _ in results if row]
        if xs:
            _write(os.path.join(out_dir, "sweep.svg"),
                   line_plot([("", xs, ys)], args.param, keys[0], "sweep"))
    summary = {"param": args.param, "values": values, "analysis": args.analysis,
               "rows_ok": sum(1 for r, _ in results if r),
               "rows_failed": sum(1 for r, _ in results if r is None),
               "errors": [e for _, e in results if e]}
    return summary, failed


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flexmem",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True)
        p.add_argument("--out", default="./out")
        p.add_argument("--set", dest="set_args", action="append", default=[],
                       metavar="PATH=VALUE")
        p.add_argument("--plot", action="store_true")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("static", help="nonlinear static solve")
    common(p)
    p.add_argument("--state", choices=sorted(STATES), default="odd")
    p.add_argument("--voltage", type=float, default=7.5)

    p = sub.add_parser("pullin", help="pull-in voltage search")
    common(p)
    p.add_argument("--state", choices=sorted(STATES), default="odd")

    p = sub.add_parser("modal", help="small-vibration modes")
    common(p)
    p.add_argument("--n", type=int, default=5)

    p = sub.add_parser("transient", help="Newmark transient")
    common(p)
    p.add_argument("--state", choices=sorted(STATES), default="odd")
    p.add_argument("--voltage", type=float, default=7.5)
    p.add_argument("--t-end", dest="t_end", type=float, default=1e-3)
    p.add_argument("--dt", type=float, default=1e-6)

    p = sub.add_parser("thermal", help="thermal clearance check")
    common(p)
    p.add_argument("--delta-t", dest="delta_t", type=float, default=100.0)

    p = sub.add_parser("rf", help="SPDT S-parameters")
    common(p)
    p.add_argument("--branch-a", choices=("up", "down"), default="up")
    p.add_argument("--branch-b", choices=("up", "down"), default="down")
    p.add_argument("--freq-start", type=float, default=None)
    p.add_argument("--freq-stop", type=float, default=None)
    p.add_argument("--freq-points", type=int, default=None)

    p = sub.add_parser("sweep", help="parameter sweep")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated values")
    p.add_argument("--analysis", choices=SWEEP_ANALYSES, default="static")
    p.add_argument("--state", choices=sorted(STATES), default="odd")
    p.add_argument("--voltage", type=float, default=7.5)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--delta-t", dest="delta_t", type=float, default=100.0)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO,
               "debug": logging.DEBUG}.get(
            os.environ.get("FLEXMEM_LOG", "error"), logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    args.overrides = []
    for item in args.set_args:
        if "=" not in item:
            print(f"flexmem: bad --set {item!r} (need PATH=VALUE)",
                  file=sys.stderr)
            return 1
        path, _, value = item.partition("=")
        args.overrides.append((path, parse_value(value)))

    try:
        cfg, raw = load_with_overrides(args.config, args.overrides)
    except (InvalidDocument, InvalidConfig) as exc:
        print(f"flexmem: invalid config: {exc}", file=sys.stderr)
        return 1
    except _IoFailure as exc:
        print(f"flexmem: {exc}", file=sys.stderr)
        return 3

    try:
        os.makedirs(args.out, exist_ok=True)
        write_manifest(args.out, args, raw)
        failed = False
        if args.command == "static":
            summary = cmd_static(cfg, args, args.out)
        elif args.command == "pullin":
            summary = cmd_pullin(cfg, args, args.out)
        elif args.command == "modal":
            summary = cmd_modal(cfg, args, args.out)
        elif args.command == "transient":
            summary = cmd_transient(cfg, args, args.out)
        elif args.command == "thermal":
            summary = cmd_thermal(cfg, args, args.out)
        elif args.command == "rf":
            summary = cmd_rf(cfg, args, args.out)
        else:
            summary, failed = cmd_sweep(cfg, args, args.out, raw)
        write_summary(args.out, summary)
        return 2 if failed else 0
    except (PullInEncountered, NoPullInFound, TransientDiverged) as exc:
        print(f"flexmem: solver: {exc}", file=sys.stderr)
        return 2
    except _IoFailure as exc:
        print(f"flexmem: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"flexmem: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
