"""Closed-system Fermi-golden-rule relaxation experiment.

An L = 2 dimer (units J = 1) is coupled to a purpose-built structureless
bath: eigenvalues drawn i.i.d. from a box of width W (default 10) and
eigenvectors taken from an independent GUE matrix with shuffled columns,
so the spectrum is flat and the eigenstates carry no structure.  The
interaction is H_int = g (M1 s1y + M2 s2y) with independent random
Hermitian couplers normalized to mean-square entry 1/N.

The joint state is stored as a (4, N) array; the Schrodinger equation
is integrated with fixed-step RK4 using the structured matvec

    H psi = H_sys psi + psi H_B^T + g sum_c (Y_c psi) M_c^T,

in the bath eigenbasis where H_B is diagonal.  P1(t) is sampled
stroboscopically once per period of the logical splitting and fit to a
line; the decay rate normalized by the golden-rule prediction

    rate * W / (2 pi g^2 m^2 sum_c |<1_L| Y_c |0_L>|^2)

is the FGR constant, which should sit near 1 across the weak-coupling
regime.

Driven runs add the resonant Peierls rotation on qubit 1 and measure
the stroboscopic survival probability of the two drive-period Floquet
eigenstates of the decoupled (g = 0) dimer, averaging their decay
rates.  Each Floquet state is an equal-weight superposition of the
logical doublet, so at zero temperature its relaxation rate is expected
to be half the undriven rate (only the excited component decays).
Initializing exact Floquet states rather than |1_L> keeps the
observable monotone: |1_L> itself Rabi-flops coherently, which leaves
no clean linear decay to fit at these simulation scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import (
    ChannelUnsupportedError,
    FitError,
    ValidationError,
)
from .numerics import HermitianOperator, fit_linear_decay
from .reduction import PAULI_X, PAULI_Y, PAULI_Z, pauli_on

__all__ = [
    "FgrSpec",
    "FgrResult",
    "build_bath",
    "build_coupler",
    "run_relaxation",
    "fgr_sweep",
]

_CHANNEL_PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}


@dataclass(frozen=True)
class FgrSpec:
    coupling_g: float
    kappa: float = 0.3
    J: float = 1.0
    h_over_omega0: float = 10.0
    bath_dim: int = 1024
    bandwidth: float = 10.0
    channel: str = "y"
    driven: bool = False
    alpha_bar: float = 0.8
    drive_omega: float | None = None  # None: measured logical splitting
    n_realizations: int = 20
    seed: int = 0
    fit_window: tuple[float, float] | None = None
    time_step: float = 0.02

    def __post_init__(self):
        if self.bath_dim < 256:
            raise ValidationError("bath_dim must be >= 256")
        if self.bandwidth <= 0:
            raise ValidationError("bandwidth must be positive")
        if self.coupling_g < 0:
            raise ValidationError("coupling_g must be non-negative")
        if self.channel not in _CHANNEL_PAULI:
            raise ValidationError("channel must be one of x, y, z")
        if not (0 < self.kappa < self.J):
            raise ValidationError("require 0 < kappa < J")
        if self.n_realizations < 1:
            raise ValidationError("n_realizations must be >= 1")


@dataclass(frozen=True)
class FgrResult:
    raw_rate: float
    rate_stderr: float
    fgr_constant: float
    m_squared: float
    matrix_element_sq: float

    def __post_init__(self):
        if self.fgr_constant < 0:
            raise ValidationError("fgr_constant must be positive")


# ---------------------------------------------------------------------------
# Dimer and bath construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Dimer:
    drive_x: np.ndarray  # -kappa s1x (the rotated term)
    drive_y: np.ndarray  # -kappa s1y
    rest: np.ndarray  # everything except qubit 1's transverse term
    static: np.ndarray  # full undriven Hamiltonian
    zero_L: np.ndarray
    one_L: np.ndarray
    splitting: float
    omega0: float


def _build_dimer(kappa: float, J: float, h_over_omega0: float) -> _Dimer:
    sx1, sx2 = pauli_on(PAULI_X, 0, 2), pauli_on(PAULI_X, 1, 2)
    sz1, sz2 = pauli_on(PAULI_Z, 0, 2), pauli_on(PAULI_Z, 1, 2)
    sy1 = pauli_on(PAULI_Y, 0, 2)
    h_sym = -kappa * (sx1 + sx2) + J * (sz1 @ sz2)
    ev_sym = eigh(h_sym, eigvals_only=True)
    omega0 = (ev_sym[1] - ev_sym[0]) / 2
    h = h_over_omega0 * omega0
    rest = -kappa * sx2 - (h / 4) * sz1 + (h / 4) * sz2 + J * (sz1 @ sz2)
    static = rest - kappa * sx1
    evals, evecs = eigh(static)
    return _Dimer(
        drive_x=-kappa * sx1,
        drive_y=-kappa * sy1,
        rest=rest,
        static=static,
        zero_L=evecs[:, 0],
        one_L=evecs[:, 1],
        splitting=float(evals[1] - evals[0]),
        omega0=float(omega0),
    )


def _random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """GUE matrix normalized to mean-square entry 1/n."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / math.sqrt(4 * n)


def build_bath(spec: FgrSpec, realization: int = 0):
    """Flat-spectrum random bath; returns (H_B, eigenvalues, eigenvectors).

    Eigenvalues: i.i.d. uniform on [-W/2, W/2], sorted.  Eigenvectors:
    eigenbasis of an independent GUE matrix, columns shuffled.
    Deterministic per (seed, realization).
    """
    rng = np.random.default_rng((spec.seed, realization, 0))
    evals = np.sort(rng.uniform(-spec.bandwidth / 2, spec.bandwidth / 2, spec.bath_dim))
    _, vecs = eigh(_random_hermitian(spec.bath_dim, rng))
    vecs = vecs[:, rng.permutation(spec.bath_dim)]
    hb = (vecs * evals) @ vecs.conj().T
    hb = (hb + hb.conj().T) / 2
    return HermitianOperator(hb), evals, vecs


def build_coupler(spec: FgrSpec, realization: int = 0, which: int = 1) -> HermitianOperator:
    """Random Hermitian coupler M_which for the given realization."""
    rng = np.random.default_rng((spec.seed, realization, which))
    return HermitianOperator(_random_hermitian(spec.bath_dim, rng))


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------


def _floquet_states(dimer: _Dimer, alpha: float, omega_d: float, dt: float = 0.005):
    """Drive-period Floquet eigenstates of the decoupled driven dimer.

    Returns the two eigenvectors of the one-period propagator with the
    largest weight on the logical doublet.
    """
    period = 2 * math.pi / omega_d
    n = max(1, int(round(period / dt)))
    step = period / n

    def h_at(t):
        phase = alpha * math.sin(omega_d * t)
        return math.cos(phase) * dimer.drive_x + math.sin(phase) * dimer.drive_y + dimer.rest

    u = np.eye(4, dtype=complex)
    t = 0.0
    for _ in range(n):
        k1 = -1j * (h_at(t) @ u)
        k2 = -1j * (h_at(t + step / 2) @ (u + step / 2 * k1))
        k3 = -1j * (h_at(t + step / 2) @ (u + step / 2 * k2))
        k4 = -1j * (h_at(t + step) @ (u + step * k3))
        u = u + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += step
    _, vecs = np.linalg.eig(u)
    weights = [
        abs(np.vdot(dimer.zero_L, vecs[:, i])) ** 2
        + abs(np.vdot(dimer.one_L, vecs[:, i])) ** 2
        for i in range(4)
    ]
    idx = np.argsort(weights)[-2:]
    return [vecs[:, i] / np.linalg.norm(vecs[:, i]) for i in idx]


def _evolve_survival(
    spec: FgrSpec,
    dimer: _Dimer,
    evals_b: np.ndarray,
    m1: np.ndarray,
    m2: np.ndarray,
    psi_sys: np.ndarray,
    t_end: float,
    drive: bool,
):
    """Stroboscopic survival probability of ``psi_sys`` (x) |bath ground>.

    Works in the bath eigenbasis: H_B is diagonal (evals_b) and the bath
    ground state is the first basis vector.  Returns (times, survival)
    sampled once per period of the stroboscopic clock (the drive period,
    which for undriven runs equals the logical-splitting period).
    """
    y1 = pauli_on(_CHANNEL_PAULI[spec.channel], 0, 2)
    y2 = pauli_on(_CHANNEL_PAULI[spec.channel], 1, 2)
    g = spec.coupling_g
    omega_d = spec.drive_omega if spec.drive_omega is not None else dimer.splitting
    alpha = spec.alpha_bar

    period = 2 * math.pi / omega_d
    n_per = max(1, int(round(period / spec.time_step)))
    dt = period / n_per
    n_steps = int(round(t_end / dt))
    # driven runs sample stroboscopically (per drive period) so the
    # coherent Rabi evolution drops out; undriven runs sample densely
    sample_every = n_per if drive else max(1, int(round(0.25 / dt)))

    m1t = m1.T.copy()
    m2t = m2.T.copy()
    eb = evals_b[None, :]

    p = np.zeros((4, spec.bath_dim), dtype=complex)
    p[:, 0] = psi_sys

    if drive:
        def sys_at(t):
            phase = alpha * math.sin(omega_d * t)
            return math.cos(phase) * dimer.drive_x + math.sin(phase) * dimer.drive_y + dimer.rest
    else:
        static = dimer.static

        def sys_at(t):
            return static

    def mv(pp, t):
        out = sys_at(t) @ pp + pp * eb
        if g:
            out = out + g * ((y1 @ pp) @ m1t) + g * ((y2 @ pp) @ m2t)
        return out

    times, surv = [], []
    t = 0.0
    for i in range(n_steps):
        if i % sample_every == 0:
            amp = psi_sys.conj() @ p
            times.append(t)
            surv.append(float(np.vdot(amp, amp).real))
        k1 = -1j * mv(p, t)
        k2 = -1j * mv(p + dt / 2 * k1, t + dt / 2)
        k3 = -1j * mv(p + dt / 2 * k2, t + dt / 2)
        k4 = -1j * mv(p + dt * k3, t + dt)
        p = p + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        p /= np.linalg.norm(p)
        t += dt
    return np.asarray(times), np.asarray(surv)


def _check_diagonal_drift(
    spec: FgrSpec,
    dimer: _Dimer,
    psi_sys: np.ndarray,
    m1: np.ndarray,
    m2: np.ndarray,
    window: float,
):
    """Coherent diagonal coupling drifts the stroboscopic phase.

    To first order in g the initial product state picks up a coherent
    phase at rate g * sum_c [M_c]_00 <Y_c> on top of its energy; when
    the accumulated drift over the fit window exceeds 10% of a cycle,
    P1(t) stops being a clean decay and the channel is rejected.  The
    y channel is immune: <psi| s_y |psi> vanishes identically for the
    real eigenvectors of the dimer.
    """
    y1 = pauli_on(_CHANNEL_PAULI[spec.channel], 0, 2)
    y2 = pauli_on(_CHANNEL_PAULI[spec.channel], 1, 2)
    diag = (
        m1[0, 0].real * np.vdot(psi_sys, y1 @ psi_sys).real
        + m2[0, 0].real * np.vdot(psi_sys, y2 @ psi_sys).real
    )
    drift = abs(spec.coupling_g * diag) * window
    if drift > 0.1 * 2 * math.pi:
        raise ChannelUnsupportedError(
            f"channel {spec.channel!r}: coherent diagonal drift of "
            f"{drift / (2 * math.pi):.2f} cycles over the fit window; only the "
            "y channel is supported quantitatively"
        )


def _fit_window(spec: FgrSpec, dimer: _Dimer, probe_rate: float | None):
    if spec.fit_window is not None:
        return spec.fit_window
    period = 2 * math.pi / dimer.splitting
    t_max = 200 * period
    if probe_rate and probe_rate > 0:
        t_max = min(t_max, 0.10 / probe_rate)
    return (0.0, t_max)


def run_relaxation(spec: FgrSpec) -> FgrResult:
    """Disorder-averaged stroboscopic decay rate and FGR constant."""
    dimer = _build_dimer(spec.kappa, spec.J, spec.h_over_omega0)
    y1 = pauli_on(_CHANNEL_PAULI[spec.channel], 0, 2)
    y2 = pauli_on(_CHANNEL_PAULI[spec.channel], 1, 2)
    me_sq = (
        abs(np.vdot(dimer.zero_L, y1 @ dimer.one_L)) ** 2
        + abs(np.vdot(dimer.zero_L, y2 @ dimer.one_L)) ** 2
    )

    if spec.driven:
        omega_d = spec.drive_omega if spec.drive_omega is not None else dimer.splitting
        initial_states = _floquet_states(dimer, spec.alpha_bar, omega_d)
    else:
        initial_states = [dimer.one_L]

    # quick golden-rule guess to size the adaptive window
    guess = 2 * math.pi * spec.coupling_g ** 2 * me_sq / spec.bandwidth
    t0, t1 = _fit_window(spec, dimer, guess if guess > 0 else None)

    per_real_rates, m_squares = [], []
    mean_traces = [None] * len(initial_states)
    times_sel = None
    for k in range(spec.n_realizations):
        _, evals_b, vecs = build_bath(spec, k)
        # rotate couplers into the bath eigenbasis so H_B is diagonal
        # (evals_b ascending, so index 0 is the bath ground state)
        m1 = build_coupler(spec, k, 1).entries
        m2 = build_coupler(spec, k, 2).entries
        m1 = vecs.conj().T @ m1 @ vecs
        m2 = vecs.conj().T @ m2 @ vecs
        m_squares.append(float(np.sum(np.abs(m1[:, 0]) ** 2)))

        run_rates = []
        for j, psi_sys in enumerate(initial_states):
            psi_sys = np.asarray(psi_sys, complex)
            if not spec.driven:
                _check_diagonal_drift(spec, dimer, psi_sys, m1, m2, t1 - t0)
            times, surv = _evolve_survival(
                spec, dimer, evals_b, m1, m2, psi_sys, t1, spec.driven,
            )
            sel = (times >= t0) & (times <= t1)
            if not sel.any():
                raise ValidationError("fit window contains no samples")
            times_sel = times[sel]
            trace = surv[sel]
            mean_traces[j] = trace if mean_traces[j] is None else mean_traces[j] + trace
            run_rates.append(fit_linear_decay(times_sel, trace)[0])
        per_real_rates.append(float(np.mean(run_rates)))

    # Disorder-averaged traces carry the golden-rule decay; individual
    # realizations at desk-scale bath sizes fluctuate strongly with the
    # local level structure, so decay-quality gates apply to the mean.
    # (For a linear fit, the slope of the mean trace equals the mean of
    # per-realization slopes; the spread of those slopes is the stderr.)
    fit_rates = []
    for j, acc in enumerate(mean_traces):
        trace = acc / spec.n_realizations
        decay = 1.0 - trace.min()
        if spec.coupling_g == 0 or decay < 1e-10:
            fit_rates.append(0.0)
            continue
        if decay > 0.20:
            raise ValidationError(
                f"total decay {decay:.2f} over the fit window exceeds the "
                "20% weak-coupling bound; reduce coupling_g or the window"
            )
        rate, quad_frac = fit_linear_decay(times_sel, trace)
        # gate only decays deep enough for curvature to mean nonlinearity
        # rather than residual disorder wiggle
        if quad_frac > 0.20 and decay > 0.02:
            raise FitError(
                f"nonlinear decay: quadratic term is {quad_frac:.2f} of linear",
                trace=(times_sel, trace),
            )
        fit_rates.append(rate)

    rates = np.asarray(per_real_rates)
    raw = float(np.mean(fit_rates))
    stderr = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else 0.0
    m_sq = float(np.mean(m_squares))
    if spec.coupling_g == 0:
        constant = 0.0
    else:
        constant = raw * spec.bandwidth / (
            2 * math.pi * spec.coupling_g ** 2 * m_sq * me_sq
        )
    return FgrResult(
        raw_rate=raw,
        rate_stderr=stderr,
        fgr_constant=constant,
        m_squared=m_sq,
        matrix_element_sq=float(me_sq),
    )


def fgr_sweep(base: FgrSpec, coupling_values, kappa_values):
    """Grid of run_relaxation results; rows match the CSV contract."""
    from dataclasses import replace

    rows = []
    for ik, kappa in enumerate(kappa_values):
        for ig, g in enumerate(coupling_values):
            spec = replace(
                base,
                coupling_g=float(g),
                kappa=float(kappa),
                seed=int(
                    np.random.SeedSequence((base.seed, ik, ig)).generate_state(1)[0]
                ),
            )
            res = run_relaxation(spec)
            rows.append(
                {
                    "driven": int(spec.driven),
                    "channel": spec.channel,
                    "coupling_g": float(g),
                    "kappa": float(kappa),
                    "J": spec.J,
                    "bath_dim": spec.bath_dim,
                    "raw_rate": res.raw_rate,
                    "rate_stderr": res.rate_stderr,
                    "m_squared": res.m_squared,
                    "matrix_element_sq": res.matrix_element_sq,
                    "fgr_constant": res.fgr_constant,
                }
            )
    return rows
