"""Configuration-driven command-line entry point.

Usage::

    ceqsim <command> --config run.json [--out DIR] [--seed N] [--workers N]

Commands: spectrum | reduce | rabi | highfreq | lifetime-sweep |
dephasing | fgr.  The config file is strict JSON; unknown keys are
rejected.  Frequencies may be given as plain numbers (Hz) or as strings
of the form ``"2pi*1.5e9"`` (the explicit angular notation); both are
converted to angular units once at parse time.

Every run writes, next to its CSV results, a ``manifest.json`` echoing
the fully resolved configuration (defaults included), the toolkit
version, wall time and a sha256 checksum per output file, plus a
``summary.txt``.  Sweep commands derive one seed per grid point from
the master seed and the point's grid coordinates, and aggregate rows in
grid order, so output bytes are independent of the worker count.

Exit codes: 0 success; 2 configuration/validation error (no outputs);
3 numerical or fit error (partial results plus an ``errors.json``
sidecar are preserved).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .errors import CeqsimError, ValidationError
from .circuit import CircuitSpec, diagonalize_fluxonium
from .drive import DriveSpec, high_frequency_average, resonant_rabi
from .fgr import FgrSpec, run_relaxation
from .noise import NoiseParams, lifetime_sweep_rows, simulate_dephasing
from .reduction import SpinModel, build_spin_hamiltonian, extract_spin_params, logical_subspace

__all__ = ["main"]

_TWO_PI = 2 * math.pi
_COMMANDS = ("spectrum", "reduce", "rabi", "highfreq", "lifetime-sweep", "dephasing", "fgr")


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def parse_frequency(value) -> float:
    """Hz number or '2pi*<x>' string -> angular frequency.

    Both notations denote the same physical frequency: a plain number f
    is f Hz = 2*pi*f rad/s, and the string '2pi*f' writes the angular
    value explicitly.
    """
    if isinstance(value, str):
        text = value.strip().lower().replace(" ", "")
        if not text.startswith("2pi*"):
            raise ValidationError(f"frequency string must look like '2pi*<number>', got {value!r}")
        try:
            return _TWO_PI * float(text[4:])
        except ValueError:
            raise ValidationError(f"cannot parse frequency {value!r}") from None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return _TWO_PI * float(value)
    raise ValidationError(f"frequency must be a number (Hz) or '2pi*<x>' string, got {value!r}")


def format_frequency(angular: float) -> str:
    """Inverse of parse_frequency, for echoing resolved configs."""
    return f"2pi*{angular / _TWO_PI!r}"


_REQUIRED = object()


class _Field:
    def __init__(self, default=_REQUIRED, kind=None, freq=False):
        self.default = default
        self.kind = kind  # optional callable: validate/convert
        self.freq = freq


def _as_number(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{name} must be a number")
    return float(v)


def _as_int(v, name):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(f"{name} must be an integer")
    return v


def _as_bool(v, name):
    if not isinstance(v, bool):
        raise ValidationError(f"{name} must be true or false")
    return v


def _as_number_list(v, name):
    if not isinstance(v, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        raise ValidationError(f"{name} must be a list of numbers")
    return [float(x) for x in v]


def _resolve(params: dict, schema: dict[str, _Field], where: str) -> dict:
    if not isinstance(params, dict):
        raise ValidationError(f"{where} must be an object")
    unknown = set(params) - set(schema)
    if unknown:
        raise ValidationError(f"unknown {where} field(s): {', '.join(sorted(unknown))}")
    out = {}
    for name, field in schema.items():
        if name in params:
            value = params[name]
        elif field.default is _REQUIRED:
            raise ValidationError(f"missing required {where} field: {name}")
        else:
            value = field.default
        if value is not None:
            if field.freq:
                value = parse_frequency(value)
            elif field.kind is not None:
                value = field.kind(value, name)
        out[name] = value
    return out


_CIRCUIT_FIELDS = {
    "E_C": _Field(freq=True),
    "E_J": _Field(freq=True),
    "E_L": _Field(freq=True),
    "gamma": _Field(default=1.0, kind=_as_number),
    "L": _Field(default=2, kind=_as_int),
    "grid_points": _Field(default=2001, kind=_as_int),
    "grid_halfwidth": _Field(default=4 * math.pi, kind=_as_number),
    "levels_kept": _Field(default=6, kind=_as_int),
}

_SCHEMAS: dict[str, dict[str, _Field]] = {
    "spectrum": {
        **_CIRCUIT_FIELDS,
        "flux": _Field(default=math.pi, kind=_as_number),
        "charge_offsets": _Field(kind=_as_number_list),
        "levels": _Field(default=8, kind=_as_int),
        "coupled": _Field(default=False, kind=_as_bool),
    },
    "reduce": {
        **_CIRCUIT_FIELDS,
        "flux_offsets": _Field(default=None, kind=_as_number_list),
    },
    "rabi": {
        "kappa": _Field(freq=True),
        "J": _Field(freq=True),
        "h_over_omega0": _Field(default=20.0, kind=_as_number),
        "L": _Field(default=2, kind=_as_int),
        "alpha_values": _Field(kind=_as_number_list),
        "n_periods": _Field(default=4.0, kind=_as_number),
    },
    "highfreq": {
        **_CIRCUIT_FIELDS,
        "alpha_values": _Field(kind=_as_number_list),
        "omega_over_kappa": _Field(default=20.0, kind=_as_number),
        "duration": _Field(default=None, kind=_as_number),
    },
    "lifetime-sweep": {
        "L": _Field(default=2, kind=_as_int),
        "J": _Field(freq=True),
        "T1_s": _Field(kind=_as_number),
        "Tphi_values_s": _Field(kind=_as_number_list),
        "kT_eff": _Field(freq=True),
        "gamma_z_s": _Field(default=0.0, kind=_as_number),
        "kappa_min": _Field(default=None, freq=True),
        "kappa_max": _Field(default=None, freq=True),
        "n_kappa": _Field(default=40, kind=_as_int),
        "h_over_omega0": _Field(default=10.0, kind=_as_number),
    },
    "dephasing": {
        "L": _Field(default=2, kind=_as_int),
        "grid": _Field(),  # list of {amplitude, omega_ac[, common_mode]}
        "n_realizations": _Field(default=200, kind=_as_int),
        "duration": _Field(default=30.0, kind=_as_number),
        "f_min": _Field(default=1e-4, kind=_as_number),
        "f_max": _Field(default=200.0, kind=_as_number),
    },
    "fgr": {
        "coupling_values": _Field(kind=_as_number_list),
        "kappa_values": _Field(default=[0.3], kind=_as_number_list),
        "J": _Field(default=1.0, kind=_as_number),
        "h_over_omega0": _Field(default=10.0, kind=_as_number),
        "bath_dim": _Field(default=1024, kind=_as_int),
        "bandwidth": _Field(default=10.0, kind=_as_number),
        "channel": _Field(default="y"),
        "driven": _Field(default=False, kind=_as_bool),
        "alpha_bar": _Field(default=0.8, kind=_as_number),
        "n_realizations": _Field(default=20, kind=_as_int),
        "fit_window": _Field(default=None, kind=_as_number_list),
        "time_step": _Field(default=0.02, kind=_as_number),
    },
}

_DEPHASING_POINT = {
    "amplitude": _Field(kind=_as_number),
    "omega_ac": _Field(kind=_as_number),
    "common_mode": _Field(default=False, kind=_as_bool),
}

_FREQ_ECHO = {
    name for schema in _SCHEMAS.values() for name, f in schema.items() if f.freq
}


def load_config(path: str, command: str, args) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")

    top_schema = {
        "command": _Field(default=command),
        "parameters": _Field(),
        "output_dir": _Field(default="."),
        "master_seed": _Field(default=0, kind=_as_int),
        "workers": _Field(default=None, kind=_as_int),
    }
    top = _resolve(raw, top_schema, "config")
    if top["command"] != command:
        raise ValidationError(
            f"config is for command {top['command']!r}, invoked as {command!r}"
        )
    params = _resolve(top["parameters"], _SCHEMAS[command], command)

    if command == "dephasing":
        if not isinstance(params["grid"], list):
            raise ValidationError("dephasing grid must be a list of objects")
        params["grid"] = [
            _resolve(pt, _DEPHASING_POINT, "dephasing grid point") for pt in params["grid"]
        ]
    if command == "fgr" and params["channel"] not in ("x", "y", "z"):
        raise ValidationError("fgr channel must be one of x, y, z")
    if command == "fgr" and params["fit_window"] is not None and len(params["fit_window"]) != 2:
        raise ValidationError("fit_window must be [t_start, t_end]")

    # CLI flags override top-level scalars
    output_dir = args.out if args.out is not None else top["output_dir"]
    seed = args.seed if args.seed is not None else top["master_seed"]
    workers = args.workers
    if workers is None:
        workers = top["workers"]
    if workers is None:
        env = os.environ.get("CEQSIM_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise ValidationError("workers must be >= 1")

    return {
        "command": command,
        "parameters": params,
        "output_dir": output_dir,
        "master_seed": seed,
        "workers": workers,
    }


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, np.integer):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, columns, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _echo_config(config: dict) -> dict:
    """Resolved config in re-parseable form (frequencies as '2pi*x')."""
    params = {}
    for name, value in config["parameters"].items():
        if name in _FREQ_ECHO and value is not None:
            params[name] = format_frequency(value)
        else:
            params[name] = value
    return {
        "command": config["command"],
        "parameters": params,
        "output_dir": config["output_dir"],
        "master_seed": config["master_seed"],
        "workers": config["workers"],
    }


def _point_seed(master_seed: int, *coords: int) -> int:
    return int(np.random.SeedSequence((master_seed, *coords)).generate_state(1)[0])


def _run_grid(tasks, worker, n_workers: int):
    """Run worker(task) over the grid; results in task order.

    Each result slot is ("ok", rows) or ("error", message).  Failures do
    not stop the remaining points.
    """

    if n_workers == 1 or len(tasks) == 1:
        return [_safe_call(worker, t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(_safe_call, worker, t) for t in tasks]
        return [f.result() for f in futures]


def _safe_call(worker, task):
    try:
        return ("ok", worker(task))
    except CeqsimError as exc:
        return ("error", f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# Command implementations: each returns (csv outputs, summary lines, errors)
# Module-level point workers keep the process pool picklable.
# ---------------------------------------------------------------------------


def _circuit_spec(p: dict, fluxes=None, charge_offsets=0.0) -> CircuitSpec:
    return CircuitSpec(
        E_C=p["E_C"],
        E_J=p["E_J"],
        E_L=p["E_L"],
        gamma=p["gamma"],
        fluxes=fluxes if fluxes is not None else math.pi,
        charge_offsets=charge_offsets,
        L=p["L"],
        grid_points=p["grid_points"],
        grid_halfwidth=p["grid_halfwidth"],
        levels_kept=p["levels_kept"],
    )


def _spectrum_point(task):
    p, offset = task
    spec = _circuit_spec(p, fluxes=p["flux"], charge_offsets=offset)
    if p["coupled"]:
        from .circuit import coupled_circuit_details

        energies = coupled_circuit_details(spec).energies[: p["levels"]]
    else:
        energies = diagonalize_fluxonium(spec, 0, k=p["levels"]).energies
    return [
        {"charge_offset": float(offset), "level": i, "energy_rad_s": float(e)}
        for i, e in enumerate(energies)
    ]


def _cmd_spectrum(config):
    p = config["parameters"]
    offsets = p["charge_offsets"]
    if not offsets:
        raise ValidationError("charge_offsets is empty: nothing to sweep")
    tasks = [(p, off) for off in offsets]
    results = _run_grid(tasks, _spectrum_point, config["workers"])
    return _collect(
        results,
        [f"charge_offset={off}" for off in offsets],
        "spectrum.csv",
        ("charge_offset", "level", "energy_rad_s"),
        lambda rows: [f"{len(rows)} levels over {len(offsets)} charge offsets"],
    )


def _cmd_reduce(config):
    p = config["parameters"]
    o = p["flux_offsets"]
    fluxes = math.pi if o is None else [math.pi + d for d in o]
    spec = _circuit_spec(p, fluxes=fluxes)
    model = extract_spin_params(spec)
    rows = [
        {
            "L": model.L,
            "kappa_rad_s": model.kappa,
            "J_rad_s": model.J,
            "h_rad_s": model.h,
            "omega0_rad_s": model.Omega0,
            "omega0_over_kappa2_J": model.Omega0 / (model.kappa ** 2 / model.J),
        }
    ]
    columns = tuple(rows[0])
    summary = [
        f"kappa = {model.kappa:.6g}, J = {model.J:.6g}, h = {model.h:.6g}, "
        f"Omega0 = {model.Omega0:.6g} (angular)"
    ]
    return {"reduce.csv": (columns, rows)}, summary, []


def _measured_omega0(kappa: float, J: float, L: int) -> float:
    probe = SpinModel(kappa=kappa, J=J, h=0.0, Omega0=kappa ** 2 / J, L=L,
                      coupling_sign=+1 if L == 2 else -1)
    H = build_spin_hamiltonian(probe)
    return logical_subspace(H, probe).splitting / 2


def _rabi_point(task):
    p, alpha = task
    omega0 = _measured_omega0(p["kappa"], p["J"], p["L"])
    model = SpinModel(
        kappa=p["kappa"],
        J=p["J"],
        h=p["h_over_omega0"] * omega0,
        Omega0=omega0,
        L=p["L"],
        coupling_sign=+1 if p["L"] == 2 else -1,
    )
    res = resonant_rabi(model, alpha, n_periods=p["n_periods"])
    from .drive import bessel_rate_factor

    return [
        {
            "alpha_bar": float(alpha),
            "omega0": model.Omega0,
            "rabi_rate": res.rabi_rate,
            "rate_over_half_omega0": res.rabi_rate / (model.Omega0 / 2),
            "bessel_prediction": abs(bessel_rate_factor(alpha)),
            "contrast": res.contrast,
            "fit_residual": res.fit_residual,
        }
    ]


def _cmd_rabi(config):
    p = config["parameters"]
    alphas = p["alpha_values"]
    if not alphas:
        raise ValidationError("alpha_values is empty: nothing to sweep")
    tasks = [(p, a) for a in alphas]
    results = _run_grid(tasks, _rabi_point, config["workers"])
    return _collect(
        results,
        [f"alpha_bar={a}" for a in alphas],
        "rabi.csv",
        (
            "alpha_bar",
            "omega0",
            "rabi_rate",
            "rate_over_half_omega0",
            "bessel_prediction",
            "contrast",
            "fit_residual",
        ),
        lambda rows: [f"{len(rows)} drive amplitudes swept"],
    )


def _highfreq_point(task):
    p, alpha = task
    spec = _circuit_spec(p)
    kappa = diagonalize_fluxonium(spec, 0, k=4).kappa
    drive = DriveSpec(
        alpha_bar=alpha, drive_omega=p["omega_over_kappa"] * kappa, mode="high_frequency"
    )
    times, pops, prediction = high_frequency_average(spec, drive, duration=p["duration"])
    return [
        {"time_s": float(t), "pop_1z": float(q), "prediction": float(pr)}
        for t, q, pr in zip(times, pops, prediction)
    ]


def _cmd_highfreq(config):
    p = config["parameters"]
    alphas = p["alpha_values"]
    if not alphas:
        raise ValidationError("alpha_values is empty: nothing to sweep")
    tasks = [(p, a) for a in alphas]
    results = _run_grid(tasks, _highfreq_point, config["workers"])
    outputs, errors = {}, []
    columns = ("time_s", "pop_1z", "prediction")
    for alpha, (status, payload) in zip(alphas, results):
        name = f"highfreq_alpha_{_fmt(float(alpha)).replace('.', 'p')}.csv"
        if status == "ok":
            outputs[name] = (columns, payload)
        else:
            errors.append({"point": f"alpha_bar={alpha}", "error": payload})
    summary = [f"{len(outputs)} trace file(s); {len(errors)} failed point(s)"]
    return outputs, summary, errors


def _cmd_lifetime_sweep(config):
    p = config["parameters"]
    if not p["Tphi_values_s"]:
        raise ValidationError("Tphi_values_s is empty: nothing to sweep")
    J = p["J"]
    lo = p["kappa_min"] if p["kappa_min"] is not None else J / 1000
    hi = p["kappa_max"] if p["kappa_max"] is not None else J / 2
    if not (0 < lo < hi < J):
        raise ValidationError("require 0 < kappa_min < kappa_max < J")
    kappas = np.geomspace(lo, hi, p["n_kappa"])
    base = NoiseParams(
        gamma_y_s=1.0 / p["T1_s"],
        T_phi=p["Tphi_values_s"][0],
        kT_eff=p["kT_eff"],
        gamma_z_s=p["gamma_z_s"],
        L=p["L"],
    )
    rows = lifetime_sweep_rows(base, J, kappas, p["Tphi_values_s"])
    columns = (
        "L",
        "J_rad_s",
        "kappa_rad_s",
        "T1_s",
        "Tphi_s",
        "kTeff_rad_s",
        "gamma_th",
        "gamma_z_le",
        "gamma_y_le",
        "gamma_z_1f",
        "T_L_s",
        "kappa_opt_flag",
    )
    best = max(r["T_L_s"] for r in rows)
    summary = [
        f"{len(rows)} (kappa, T_phi) points; best T_L = {best:.4g} s",
    ]
    return {"lifetime_sweep.csv": (columns, rows)}, summary, []


def _dephasing_point(task):
    p, point, seed = task
    res = simulate_dephasing(
        L=p["L"],
        amplitude=point["amplitude"],
        omega_ac=point["omega_ac"],
        n_realizations=p["n_realizations"],
        seed=seed,
        duration=p["duration"],
        f_min=p["f_min"],
        f_max=p["f_max"],
        common_mode=point["common_mode"],
    )
    return [
        {
            "L": p["L"],
            "amplitude": point["amplitude"],
            "omega_ac": point["omega_ac"],
            "common_mode": int(point["common_mode"]),
            "gamma": res.gamma,
            "T_phi": res.T_phi,
            "c_fit": res.c_fit,
            "ramsey_residual": res.ramsey_residual,
            "envelope_residual": res.envelope_residual,
        }
    ]


def _cmd_dephasing(config):
    p = config["parameters"]
    grid = p["grid"]
    if not grid:
        raise ValidationError("dephasing grid is empty: nothing to sweep")
    tasks = [
        (p, point, _point_seed(config["master_seed"], i)) for i, point in enumerate(grid)
    ]
    results = _run_grid(tasks, _dephasing_point, config["workers"])
    return _collect(
        results,
        [f"amplitude={pt['amplitude']}, omega_ac={pt['omega_ac']}" for pt in grid],
        "dephasing.csv",
        (
            "L",
            "amplitude",
            "omega_ac",
            "common_mode",
            "gamma",
            "T_phi",
            "c_fit",
            "ramsey_residual",
            "envelope_residual",
        ),
        lambda rows: [f"{len(rows)} dephasing points"],
    )


def _fgr_point(task):
    p, g, kappa, seed = task
    spec = FgrSpec(
        coupling_g=g,
        kappa=kappa,
        J=p["J"],
        h_over_omega0=p["h_over_omega0"],
        bath_dim=p["bath_dim"],
        bandwidth=p["bandwidth"],
        channel=p["channel"],
        driven=p["driven"],
        alpha_bar=p["alpha_bar"],
        n_realizations=p["n_realizations"],
        seed=seed,
        fit_window=tuple(p["fit_window"]) if p["fit_window"] is not None else None,
        time_step=p["time_step"],
    )
    res = run_relaxation(spec)
    return [
        {
            "driven": int(p["driven"]),
            "channel": p["channel"],
            "coupling_g": float(g),
            "kappa": float(kappa),
            "J": p["J"],
            "bath_dim": p["bath_dim"],
            "raw_rate": res.raw_rate,
            "rate_stderr": res.rate_stderr,
            "m_squared": res.m_squared,
            "matrix_element_sq": res.matrix_element_sq,
            "fgr_constant": res.fgr_constant,
        }
    ]


def _cmd_fgr(config):
    p = config["parameters"]
    if not p["coupling_values"] or not p["kappa_values"]:
        raise ValidationError("coupling_values/kappa_values is empty: nothing to sweep")
    tasks, labels = [], []
    for ik, kappa in enumerate(p["kappa_values"]):
        for ig, g in enumerate(p["coupling_values"]):
            tasks.append((p, g, kappa, _point_seed(config["master_seed"], ik, ig)))
            labels.append(f"kappa={kappa}, coupling_g={g}")
    results = _run_grid(tasks, _fgr_point, config["workers"])
    return _collect(
        results,
        labels,
        "fgr.csv",
        (
            "driven",
            "channel",
            "coupling_g",
            "kappa",
            "J",
            "bath_dim",
            "raw_rate",
            "rate_stderr",
            "m_squared",
            "matrix_element_sq",
            "fgr_constant",
        ),
        lambda rows: [f"{len(rows)} FGR points"],
    )


def _collect(results, labels, csv_name, columns, summarize):
    """Aggregate per-point results (already grid-ordered) into one CSV."""
    rows, errors = [], []
    for label, (status, payload) in zip(labels, results):
        if status == "ok":
            rows.extend(payload)
        else:
            errors.append({"point": label, "error": payload})
    outputs = {csv_name: (columns, rows)} if rows else {}
    summary = summarize(rows) + [f"{len(errors)} failed point(s)"]
    return outputs, summary, errors


_RUNNERS = {
    "spectrum": _cmd_spectrum,
    "reduce": _cmd_reduce,
    "rabi": _cmd_rabi,
    "highfreq": _cmd_highfreq,
    "lifetime-sweep": _cmd_lifetime_sweep,
    "dephasing": _cmd_dephasing,
    "fgr": _cmd_fgr,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def run(config: dict) -> int:
    """Execute a resolved config; write artifacts; return the exit code."""
    start = time.monotonic()
    outputs, summary, errors = _RUNNERS[config["command"]](config)

    out_dir = config["output_dir"]
    os.makedirs(out_dir, exist_ok=True)
    checksums = {}
    for name, (columns, rows) in outputs.items():
        path = os.path.join(out_dir, name)
        write_csv(path, columns, rows)
        checksums[name] = _sha256(path)

    manifest = {
        "config": _echo_config(config),
        "version": __version__,
        "wall_time_s": round(time.monotonic() - start, 3),
        "outputs": checksums,
        "n_errors": len(errors),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    lines = [f"command: {config['command']}", *summary]
    lines += [f"wrote {name} ({checksums[name][:12]})" for name in outputs]
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        print(line)

    if errors:
        with open(os.path.join(out_dir, "errors.json"), "w") as fh:
            json.dump(errors, fh, indent=2)
            fh.write("\n")
        print(f"{len(errors)} point(s) failed; see errors.json", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ceqsim",
        description="Cold-echo-qubit simulation toolkit (config-driven runs).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel workers (overrides config and CEQSIM_WORKERS)")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.command, args)
        return run(config)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except CeqsimError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
