"""CSV contract validation and figure rendering.

Each CSV header produced by the ceqsim CLI is a stable contract; every
contract has exactly one accepted plot kind.  All physics stays upstream:
this module only reads columns, applies axis transforms, and draws.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ceqplot"

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import LogNorm  # noqa: E402


class PlotError(Exception):
    """Raised for unusable inputs: bad headers, empty CSVs, wrong kind."""


@dataclass(frozen=True)
class Contract:
    producer: str  # CLI command whose output carries this header
    kind: str  # the one plot kind that accepts it
    columns: tuple[str, ...]


CONTRACTS = (
    Contract("spectrum", "curve", ("charge_offset", "level", "energy_rad_s")),
    Contract(
        "reduce",
        "scatter",
        ("L", "kappa_rad_s", "J_rad_s", "h_rad_s", "omega0_rad_s",
         "omega0_over_kappa2_J"),
    ),
    Contract(
        "rabi",
        "curve",
        ("alpha_bar", "omega0", "rabi_rate", "rate_over_half_omega0",
         "bessel_prediction", "contrast", "fit_residual"),
    ),
    Contract("highfreq", "traces", ("time_s", "pop_1z", "prediction")),
    Contract(
        "lifetime-sweep",
        "heatmap",
        ("L", "J_rad_s", "kappa_rad_s", "T1_s", "Tphi_s", "kTeff_rad_s",
         "gamma_th", "gamma_z_le", "gamma_y_le", "gamma_z_1f", "T_L_s",
         "kappa_opt_flag"),
    ),
    Contract(
        "dephasing",
        "scatter",
        ("L", "amplitude", "omega_ac", "common_mode", "gamma", "T_phi",
         "c_fit", "ramsey_residual", "envelope_residual"),
    ),
    Contract(
        "fgr",
        "scatter",
        ("driven", "channel", "coupling_g", "kappa", "J", "bath_dim",
         "raw_rate", "rate_stderr", "m_squared", "matrix_element_sq",
         "fgr_constant"),
    ),
)

_BY_COLUMNS = {c.columns: c for c in CONTRACTS}

KINDS = ("heatmap", "traces", "curve", "scatter")


def load_table(path: str, kind: str):
    """Read a CSV, validate its header against the contracts, return
    (contract, dict of float columns).  Non-numeric columns stay strings."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise PlotError(f"{path}: empty file, nothing to plot")
    header = tuple(rows[0])
    contract = _BY_COLUMNS.get(header)
    if contract is None:
        expected = ", ".join(
            f"'{c.producer}' -> {c.kind}" for c in CONTRACTS if c.kind == kind
        )
        raise PlotError(
            f"{path}: header does not match any documented contract for kind "
            f"{kind!r}; accepted producing commands: {expected}"
        )
    if contract.kind != kind:
        raise PlotError(
            f"{path}: this CSV comes from the {contract.producer!r} command "
            f"and renders as {contract.kind!r}, not {kind!r}"
        )
    body = rows[1:]
    if not body:
        raise PlotError(f"{path}: no data rows, nothing to plot")
    cols = {}
    for i, name in enumerate(header):
        raw = [r[i] for r in body]
        try:
            cols[name] = np.array([float(v) for v in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return contract, cols


def _save(fig, out_path: str):
    # fixed metadata so identical input bytes give identical output bytes
    kw = {}
    if out_path.endswith(".svg"):
        kw["metadata"] = {"Date": None}
    elif out_path.endswith(".png"):
        kw["metadata"] = {"Software": "ceqplot"}
    fig.savefig(out_path, **kw)
    plt.close(fig)


def _render_heatmap(tables, out_path):
    _, cols, _ = tables[0]
    kappas = np.unique(cols["kappa_rad_s"])
    tphis = np.unique(cols["Tphi_s"])
    grid = np.full((len(tphis), len(kappas)), np.nan)
    for k, t, tl in zip(cols["kappa_rad_s"], cols["Tphi_s"], cols["T_L_s"]):
        grid[np.searchsorted(tphis, t), np.searchsorted(kappas, k)] = tl
    fig, ax = plt.subplots(figsize=(5, 4))
    mesh = ax.pcolormesh(
        kappas, tphis, grid, norm=LogNorm(), shading="auto", cmap="viridis"
    )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\kappa$ (rad/s)")
    ax.set_ylabel(r"$T_\phi$ (s)")
    fig.colorbar(mesh, ax=ax, label=r"$T_L$ (s)")
    fig.tight_layout()
    _save(fig, out_path)


def _render_traces(tables, out_path):
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, (label, cols, _) in enumerate(tables):
        t = cols["time_s"]
        thin = max(1, len(t) // 200)
        ax.plot(
            t[::thin], cols["pop_1z"][::thin], ".", ms=3,
            color=f"C{i}", label=label,
        )
        ax.plot(t, cols["prediction"], "-", lw=1, color=f"C{i}")
    ax.set_xlabel("time (1/J)")
    ax.set_ylabel(r"$P_\uparrow$")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_path)


def _render_curve(tables, out_path):
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, cols, contract in tables:
        if contract.producer == "rabi":
            order = np.argsort(cols["alpha_bar"])
            ax.plot(
                cols["alpha_bar"][order], cols["bessel_prediction"][order],
                "-", lw=1, label=f"{label} prediction",
            )
            ax.plot(
                cols["alpha_bar"][order], cols["rate_over_half_omega0"][order],
                "o", ms=4, label=label,
            )
            ax.set_xlabel(r"$\bar\alpha$")
            ax.set_ylabel(r"$\Omega_{AC} / (\Omega_0/2)$")
        else:  # spectrum
            for level in np.unique(cols["level"]):
                sel = cols["level"] == level
                order = np.argsort(cols["charge_offset"][sel])
                ax.plot(
                    cols["charge_offset"][sel][order],
                    cols["energy_rad_s"][sel][order],
                    "-o", ms=3, label=f"{label} level {int(level)}",
                )
            ax.set_xlabel("charge offset")
            ax.set_ylabel("energy (rad/s)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_path)


def _render_scatter(tables, out_path):
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, cols, contract in tables:
        if contract.producer == "fgr":
            ax.errorbar(
                cols["raw_rate"], cols["fgr_constant"],
                yerr=cols["rate_stderr"] / np.maximum(cols["raw_rate"], 1e-300)
                * cols["fgr_constant"],
                fmt="o", ms=4, label=label,
            )
            ax.set_xscale("log")
            ax.axhline(1.0, color="0.6", lw=0.8, zorder=0)
            ax.set_xlabel("raw rate (J units)")
            ax.set_ylabel("FGR constant")
        elif contract.producer == "dephasing":
            ax.plot(cols["omega_ac"], cols["c_fit"], "o", ms=5, label=label)
            ax.set_xlabel(r"$\Omega_{AC}$")
            ax.set_ylabel(r"fitted $c$")
        else:  # reduce
            ax.plot(cols["kappa_rad_s"], cols["omega0_rad_s"], "o", ms=5,
                    label=label)
            ax.set_xlabel(r"$\kappa$ (rad/s)")
            ax.set_ylabel(r"$\Omega_0$ (rad/s)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_path)


_RENDERERS = {
    "heatmap": _render_heatmap,
    "traces": _render_traces,
    "curve": _render_curve,
    "scatter": _render_scatter,
}


def render(kind: str, input_csvs, output_image: str):
    """Validate every input against the ``kind`` contract and draw."""
    if kind not in KINDS:
        raise PlotError(f"unknown plot kind {kind!r}; choose from {KINDS}")
    if not input_csvs:
        raise PlotError("at least one input CSV is required")
    loaded = []
    for path in input_csvs:
        contract, cols = load_table(path, kind)
        label = path.rsplit("/", 1)[-1].removesuffix(".csv")
        loaded.append((label, cols, contract))
    _RENDERERS[kind](loaded, output_image)
