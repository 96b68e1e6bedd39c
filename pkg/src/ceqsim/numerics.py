"""Dense complex Hermitian linear algebra and time propagation.

All energies and frequencies are angular (rad/s) with hbar = 1.  Dense
storage throughout: the largest problems in the toolkit (joint
system-bath states, phase grids) fit comfortably in memory.

Propagation of time-dependent Hamiltonians uses a fixed-step classical
4th-order Runge-Kutta integrator with per-step renormalization.  The
step defaults to 1/200 of the fastest declared period, which is both
deterministic and easy to convergence-test (see
:func:`propagation_convergence`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import ValidationError, NumericalError, FitError

__all__ = [
    "HermitianOperator",
    "StateVector",
    "TimeDependentOperator",
    "eigendecompose",
    "propagate_static",
    "propagate_timedep",
    "propagate_timedep_sampled",
    "propagation_convergence",
    "fit_sin_squared",
    "fit_linear_decay",
    "fit_cosine",
]

_HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class HermitianOperator:
    """A dense Hermitian matrix in angular-frequency units."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] < 2:
            raise ValidationError("operator dimension must be >= 2")
        scale = np.linalg.norm(m)
        if scale > 0 and np.linalg.norm(m - m.conj().T) > _HERMITICITY_RTOL * scale:
            raise ValidationError("operator is not Hermitian to 1e-12 relative norm")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class StateVector:
    """A normalized complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("state vector must be nonzero")
        if abs(n - 1.0) > 1e-10:
            v = v / n
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class TimeDependentOperator:
    """H(t) = sum_k c_k(t) * H_k with scalar coefficient functions c_k.

    ``max_frequency`` declares the fastest angular frequency present in
    the coefficients; it sets the default integrator step.
    """

    terms: Sequence[tuple[HermitianOperator, Callable[[float], float]]]
    max_frequency: float

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("time-dependent operator needs at least one term")
        dims = {op.dim for op, _ in self.terms}
        if len(dims) != 1:
            raise ValidationError("all terms must share one dimension")
        if self.max_frequency <= 0:
            raise ValidationError("max_frequency must be positive")

    @property
    def dim(self) -> int:
        return self.terms[0][0].dim

    def at(self, t: float) -> np.ndarray:
        """Evaluate H(t) as a plain array."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for op, coeff in self.terms:
            out += coeff(t) * op.entries
        return out


def eigendecompose(op: HermitianOperator, k: int | None = None):
    """Full Hermitian eigendecomposition, lowest ``k`` pairs returned.

    Returns (eigenvalues ascending, eigenvectors as orthonormal columns).
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(np.asarray(op))
    if k is None:
        k = op.dim
    if not 1 <= k <= op.dim:
        raise ValidationError(f"k={k} out of range for dim {op.dim}")
    try:
        evals, evecs = scipy.linalg.eigh(op.entries)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    scale = max(np.linalg.norm(op.entries), 1.0)
    resid = np.linalg.norm(op.entries @ evecs[:, :k] - evecs[:, :k] * evals[:k])
    if resid > 1e-9 * scale * np.sqrt(k):
        raise NumericalError(f"eigenpair residual {resid:.3e} exceeds tolerance")
    return evals[:k], evecs[:, :k]


def propagate_static(state: StateVector, op: HermitianOperator, t: float) -> StateVector:
    """exp(-i H t)|psi> via eigendecomposition."""
    if state.dim != op.dim:
        raise ValidationError(f"dimension mismatch {state.dim} vs {op.dim}")
    if t == 0:
        return state
    evals, evecs = eigendecompose(op)
    coeffs = evecs.conj().T @ state.amplitudes
    out = evecs @ (np.exp(-1j * evals * t) * coeffs)
    return StateVector(out)


def _rk4_step(h_at: Callable[[float], np.ndarray], psi: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = -1j * (h_at(t) @ psi)
    k2 = -1j * (h_at(t + dt / 2) @ (psi + dt / 2 * k1))
    k3 = -1j * (h_at(t + dt / 2) @ (psi + dt / 2 * k2))
    k4 = -1j * (h_at(t + dt) @ (psi + dt * k3))
    psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi / np.linalg.norm(psi)


def default_step(max_frequency: float) -> float:
    """1/200 of the fastest period."""
    return 2 * np.pi / max_frequency / 200.0


def propagate_timedep(
    state: StateVector,
    op: TimeDependentOperator,
    t0: float,
    t1: float,
    dt: float | None = None,
) -> StateVector:
    """Fixed-step RK4 propagation from t0 to t1 with renormalization."""
    if state.dim != op.dim:
        raise ValidationError(f"dimension mismatch {state.dim} vs {op.dim}")
    if dt is None:
        dt = default_step(op.max_frequency)
    if dt > 2 * np.pi / op.max_frequency / 50:
        raise ValidationError("dt exceeds 1/50 of the shortest declared period")
    span = t1 - t0
    if span == 0:
        return state
    n = max(1, int(round(abs(span) / dt)))
    step = span / n
    psi = state.amplitudes.copy()
    t = t0
    for _ in range(n):
        psi = _rk4_step(op.at, psi, t, step)
        t += step
    return StateVector(psi)


def propagate_timedep_sampled(
    state: StateVector,
    op: TimeDependentOperator,
    t1: float,
    dt: float,
    sample_every: int,
    observable: Callable[[np.ndarray], float],
):
    """Propagate from t=0 recording ``observable(psi)`` every ``sample_every`` steps.

    Returns (sample times, observable values, final StateVector).  The
    step is adjusted so that samples land exactly on multiples of
    ``sample_every * dt`` (important for stroboscopic protocols).
    """
    if state.dim != op.dim:
        raise ValidationError(f"dimension mismatch {state.dim} vs {op.dim}")
    n = max(1, int(round(t1 / dt)))
    psi = state.amplitudes.copy()
    times, values = [], []
    t = 0.0
    for i in range(n):
        if i % sample_every == 0:
            times.append(t)
            values.append(observable(psi))
        psi = _rk4_step(op.at, psi, t, dt)
        t += dt
    return np.asarray(times), np.asarray(values), StateVector(psi)


def propagation_convergence(
    state: StateVector, op: TimeDependentOperator, t0: float, t1: float, dt: float
) -> float:
    """Norm difference between propagation at dt and dt/2 (convergence check)."""
    a = propagate_timedep(state, op, t0, t1, dt)
    b = propagate_timedep(state, op, t0, t1, dt / 2)
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


# ---------------------------------------------------------------------------
# Fit helpers shared by the dynamics modules
# ---------------------------------------------------------------------------

def _fft_frequency_seed(t: np.ndarray, y: np.ndarray) -> float:
    yc = y - y.mean()
    spec = np.abs(np.fft.rfft(yc))
    freqs = np.fft.rfftfreq(len(t), t[1] - t[0]) * 2 * np.pi
    if len(spec) < 2:
        return 0.0
    return float(freqs[int(np.argmax(spec[1:])) + 1])


def fit_sin_squared(t: np.ndarray, y: np.ndarray):
    """Least-squares fit of y = A sin^2(W t / 2 + p) + B, FFT-seeded.

    Returns (W, A, residual_rms).  W is the angular frequency of the
    underlying population oscillation (the sin^2 argument advances at
    W/2, so the population itself oscillates at W).
    """
    from scipy.optimize import curve_fit

    t = np.asarray(t, float)
    y = np.asarray(y, float)
    w0 = _fft_frequency_seed(t, y)
    if w0 == 0.0:
        return 0.0, 0.0, float(np.std(y))

    def model(tt, a, w, p, b):
        return a * np.sin(w * tt / 2 + p) ** 2 + b

    amp0 = float(y.max() - y.min())
    best = None
    for seed_w in (w0, w0 / 2, 2 * w0):
        try:
            popt, _ = curve_fit(
                model, t, y, p0=[amp0, seed_w, 0.0, float(y.min())], maxfev=20000
            )
        except RuntimeError:
            continue
        resid = float(np.sqrt(np.mean((model(t, *popt) - y) ** 2)))
        if best is None or resid < best[1]:
            best = (popt, resid)
    if best is None:
        raise FitError("sin^2 fit failed to converge", trace=(t, y))
    popt, resid = best
    return abs(float(popt[1])), abs(float(popt[0])), resid


def fit_cosine(t: np.ndarray, y: np.ndarray, decay: bool = False):
    """Fit y = A cos(W t + p) + B, optionally with exp(-G t) envelope.

    Returns (W, A, G, residual_rms); G is zero for the undamped model.
    """
    from scipy.optimize import curve_fit

    t = np.asarray(t, float)
    y = np.asarray(y, float)
    w0 = _fft_frequency_seed(t, y)
    amp0 = float((y.max() - y.min()) / 2) or 1.0
    if decay:
        def model(tt, a, w, p, g, b):
            return a * np.cos(w * tt + p) * np.exp(-g * tt) + b
        p0 = [amp0, w0, 0.0, 0.0, float(y.mean())]
    else:
        def model(tt, a, w, p, b):
            return a * np.cos(w * tt + p) + b
        p0 = [amp0, w0, 0.0, float(y.mean())]
    try:
        popt, _ = curve_fit(model, t, y, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"cosine fit failed: {exc}", trace=(t, y)) from exc
    resid = float(np.sqrt(np.mean((model(t, *popt) - y) ** 2)))
    g = abs(float(popt[3])) if decay else 0.0
    return abs(float(popt[1])), abs(float(popt[0])), g, resid


def fit_linear_decay(t: np.ndarray, y: np.ndarray):
    """Linear fit y = y0 - rate * t; returns (rate, quadratic_fraction).

    ``quadratic_fraction`` measures curvature: the magnitude of the
    quadratic term of a 2nd-order fit relative to the linear term over
    the window, used to reject non-linear decay.
    """
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    if len(t) < 3:
        raise ValidationError("need at least 3 samples for a decay fit")
    lin = np.polyfit(t, y, 1)
    quad = np.polyfit(t, y, 2)
    span = t[-1] - t[0]
    lin_term = abs(quad[1] * span)
    quad_term = abs(quad[0] * span ** 2)
    frac = quad_term / lin_term if lin_term > 0 else np.inf
    return -float(lin[0]), float(frac)
