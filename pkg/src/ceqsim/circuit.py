"""Phase-basis fluxonium circuit Hamiltonians.

A single fluxonium with shunt inductive energy E_Ls, external flux Phi
and charge offset n_g = Q_ext/2e is discretized on a uniform phase grid:

    H = 4 E_C (-i d/dphi + n_g)^2 - E_J cos(phi + Phi) + (E_Ls/2) phi^2

The charge offset enters as a Peierls phase exp(+/- i n_g dphi) on the
off-diagonal hopping, which keeps the matrix exactly Hermitian and the
spectrum exactly gauge-invariant under static n_g.

Coupled circuits (L = 2 shared inductor, L = 3 ring) are assembled in a
truncated product basis of single-fluxonium eigenstates with the phi_i
phi_j inductive coupling added as a dense matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import eig_banded, eigh_tridiagonal

from .errors import ValidationError, DegeneracyError
from .numerics import HermitianOperator, StateVector

__all__ = [
    "CircuitSpec",
    "FluxoniumSpectrum",
    "CoupledCircuit",
    "build_single_fluxonium",
    "diagonalize_fluxonium",
    "build_coupled_circuit",
    "coupled_circuit_details",
    "well_states",
]


def _per_qubit(value, L: int, name: str) -> tuple[float, ...]:
    """Broadcast a scalar to L values or validate a length-L sequence."""
    if np.isscalar(value):
        return tuple(float(value) for _ in range(L))
    vals = tuple(float(v) for v in value)
    if len(vals) != L:
        raise ValidationError(f"{name} must be scalar or length {L}, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class CircuitSpec:
    """Physical circuit parameters plus discretization controls.

    Energies are angular frequencies (rad/s equivalent; any consistent
    unit works since only ratios and absolute scales propagate).
    E_C/E_J/E_L may be scalars (identical fluxonia, the default) or
    per-qubit sequences.
    """

    E_C: float | Sequence[float]
    E_J: float | Sequence[float]
    E_L: float | Sequence[float]
    gamma: float = 1.0
    fluxes: Sequence[float] | float = np.pi
    charge_offsets: Sequence[float] | float = 0.0
    L: int = 2
    grid_points: int = 2001
    grid_halfwidth: float = 4 * np.pi
    levels_kept: int = 6

    def __post_init__(self):
        if self.L not in (2, 3):
            raise ValidationError("L must be 2 or 3")
        for name in ("E_C", "E_J", "E_L", "fluxes", "charge_offsets"):
            object.__setattr__(self, name, _per_qubit(getattr(self, name), self.L, name))
        for ec, ej, el in zip(self.E_C, self.E_J, self.E_L):
            # E_J = 0 is allowed as the exactly-harmonic special case
            if not (ej > ec > 0 or (ej == 0 and ec > 0)) or el <= 0:
                raise ValidationError("require E_J > E_C > 0 (or E_J = 0) and E_L > 0")
            if 0 < ej / el < 10:
                warnings.warn(
                    f"E_J/E_L = {ej / el:.2f} < 10: double-well regime is marginal",
                    stacklevel=2,
                )
        if self.L == 2 and not (0 < self.gamma <= 1):
            raise ValidationError("gamma must lie in (0, 1] for L = 2")
        if self.grid_points % 2 == 0 or self.grid_points < 501:
            raise ValidationError("grid_points must be odd and >= 501")
        if self.grid_halfwidth <= 0:
            raise ValidationError("grid_halfwidth must be positive")
        if self.levels_kept < 4:
            raise ValidationError("levels_kept < 4: doublet physics needs well states plus leakage levels")

    @property
    def E_Ls(self) -> tuple[float, ...]:
        """Single-fluxonium inductive energy seen by each qubit."""
        if self.L == 2:
            f = (1 + self.gamma) / (2 * (2 + self.gamma))
        else:
            f = 2.0
        return tuple(el * f for el in self.E_L)

    def coupling_strength(self) -> float:
        """Magnitude of the inductive phi_i phi_j coupling coefficient."""
        if self.L == 2:
            return self.E_L[0] / (2 + self.gamma)
        return self.E_L[0]

    def phi_grid(self) -> np.ndarray:
        return np.linspace(-self.grid_halfwidth, self.grid_halfwidth, self.grid_points)


@dataclass(frozen=True)
class FluxoniumSpectrum:
    """Single-fluxonium spectrum on the phase grid."""

    energies: np.ndarray
    states: np.ndarray  # columns are eigenvectors on the grid
    grid: np.ndarray
    well_minima: tuple[float, float]
    E_Ls: float
    flux: float

    @property
    def kappa(self) -> float:
        """Half the doublet splitting (tunneling amplitude)."""
        return float(self.energies[1] - self.energies[0]) / 2


def _single_fluxonium_bands(spec: CircuitSpec, qubit_index: int):
    """Return (diagonal, off-diagonal hopping) of the grid Hamiltonian."""
    ec = spec.E_C[qubit_index]
    ej = spec.E_J[qubit_index]
    els = spec.E_Ls[qubit_index]
    flux = spec.fluxes[qubit_index]
    ng = spec.charge_offsets[qubit_index]
    x = spec.phi_grid()
    d = x[1] - x[0]

    phi_m = np.pi - els / ej if ej > 0 else 0.0
    zp_width = (8 * ec / ej) ** 0.25 if ej > 0 else (4 * ec / els) ** 0.25
    if abs(phi_m) + 3 * zp_width > spec.grid_halfwidth:
        raise ValidationError(
            "phase grid too small: wells plus 3 zero-point widths exceed halfwidth"
        )

    V = -ej * np.cos(x + flux) + 0.5 * els * x * x
    diag = V + 8 * ec / d ** 2
    hop = -4 * ec / d ** 2 * np.exp(1j * ng * d)
    return x, d, diag, hop


def build_single_fluxonium(spec: CircuitSpec, qubit_index: int = 0) -> HermitianOperator:
    """Finite-difference grid Hamiltonian with Peierls-phase charge offset."""
    x, d, diag, hop = _single_fluxonium_bands(spec, qubit_index)
    n = len(x)
    m = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    m[idx, idx] = diag[:-1]
    m[n - 1, n - 1] = diag[-1]
    m[idx, idx + 1] = hop
    m[idx + 1, idx] = np.conj(hop)
    return HermitianOperator(m)


def diagonalize_fluxonium(spec: CircuitSpec, qubit_index: int = 0, k: int | None = None) -> FluxoniumSpectrum:
    """Diagonalize a single fluxonium efficiently (banded solver)."""
    x, d, diag, hop = _single_fluxonium_bands(spec, qubit_index)
    k = k if k is not None else max(spec.levels_kept, 8)
    if spec.charge_offsets[qubit_index] == 0.0:
        evals, evecs = eigh_tridiagonal(
            diag, np.full(len(x) - 1, hop.real), select="i", select_range=(0, k - 1)
        )
    else:
        bands = np.zeros((2, len(x)), dtype=complex)
        bands[0] = diag
        bands[1, :-1] = np.conj(hop)
        evals, evecs = eig_banded(
            bands, lower=True, select="i", select_range=(0, k - 1)
        )
    # numerically locate the potential minima in each half-plane
    ej = spec.E_J[qubit_index]
    els = spec.E_Ls[qubit_index]
    flux = spec.fluxes[qubit_index]
    V = -ej * np.cos(x + flux) + 0.5 * els * x * x
    left = x < 0
    minima = (float(x[left][np.argmin(V[left])]), float(x[~left][np.argmin(V[~left])]))
    return FluxoniumSpectrum(
        energies=evals,
        states=evecs,
        grid=x,
        well_minima=minima,
        E_Ls=els,
        flux=flux,
    )


def well_states(spectrum: FluxoniumSpectrum) -> tuple[StateVector, StateVector]:
    """Left/right well-localized recombinations of the lowest doublet."""
    if abs((spectrum.flux % (2 * np.pi)) - np.pi) > 0.2:
        raise ValidationError("well states require flux within 0.2 rad of pi")
    e = spectrum.energies
    doublet = e[1] - e[0]
    if len(e) >= 3 and (e[2] - e[1]) < 5 * doublet:
        raise DegeneracyError(
            "doublet not separated from third level by 5x its own splitting"
        )
    g, s1 = spectrum.states[:, 0], spectrum.states[:, 1]
    plus = (g + s1) / np.sqrt(2)
    minus = (g - s1) / np.sqrt(2)
    mean_plus = float(plus @ (spectrum.grid * plus))
    if mean_plus < 0:
        left_vec, right_vec = plus, minus
    else:
        left_vec, right_vec = minus, plus
    return StateVector(left_vec), StateVector(right_vec)


def _central_sector(states: np.ndarray, grid: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Indices of levels with majority weight in the central flux sector.

    With gamma = 1 the L = 2 inductive form is flat along the
    antisymmetric phase direction, so outer wells near +/-3 pi host
    near-degenerate intruder levels.  Only the central sector
    (|phi| < 2 pi) participates in the logical doublet, so single-qubit
    levels living outside it are dropped before building the product
    basis.
    """
    central = np.abs(grid) < 2 * np.pi
    weights = np.sum(np.abs(states[central, :]) ** 2, axis=0)
    return np.where(weights > threshold)[0]


@dataclass(frozen=True)
class CoupledCircuit:
    """Truncated product-basis representation of the coupled circuit."""

    hamiltonian: HermitianOperator
    single_spectra: tuple[FluxoniumSpectrum, ...]
    kept_levels: tuple[np.ndarray, ...]
    phi_ops: tuple[np.ndarray, ...]  # per-qubit phi in its truncated basis
    p_ops: tuple[np.ndarray, ...]  # per-qubit momentum in its truncated basis
    energies: tuple[np.ndarray, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(k) for k in self.kept_levels)

    def embed(self, op: np.ndarray, qubit_index: int) -> np.ndarray:
        """Lift a single-qubit operator into the product basis."""
        mats = [np.eye(d, dtype=complex) for d in self.dims]
        mats[qubit_index] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out


def coupled_circuit_details(spec: CircuitSpec, coupling_scale: float = 1.0) -> CoupledCircuit:
    """Build the coupled circuit, retaining per-qubit operator structure.

    ``coupling_scale`` multiplies the inductive coupling (0 recovers the
    decoupled product spectrum, useful as an oracle).
    """
    spectra = []
    kept = []
    for q in range(spec.L):
        # diagonalize generously, then keep levels_kept central-sector levels
        sp = diagonalize_fluxonium(spec, q, k=spec.levels_kept + 8)
        sector = _central_sector(sp.states, sp.grid)
        if len(sector) < spec.levels_kept:
            sector = np.arange(sp.states.shape[1])
        keep = sector[: spec.levels_kept]
        spectra.append(sp)
        kept.append(keep)

    phi_ops, p_ops, energies = [], [], []
    for q, (sp, keep) in enumerate(zip(spectra, kept)):
        U = sp.states[:, keep]
        x = sp.grid
        d = x[1] - x[0]
        phi_ops.append((U.T.conj() * x) @ U)
        # central-difference momentum -i d/dphi in the truncated basis
        dU = np.zeros_like(U)
        dU[1:-1] = (U[2:] - U[:-2]) / (2 * d)
        p = -1j * (U.T.conj() @ dU)
        p_ops.append((p + p.conj().T) / 2)
        energies.append(sp.energies[keep])

    dims = [len(k) for k in kept]
    total = int(np.prod(dims))
    H = np.zeros((total, total), dtype=complex)
    cc = CoupledCircuit(
        hamiltonian=HermitianOperator(np.eye(total)),  # placeholder, rebuilt below
        single_spectra=tuple(spectra),
        kept_levels=tuple(np.asarray(k) for k in kept),
        phi_ops=tuple(phi_ops),
        p_ops=tuple(p_ops),
        energies=tuple(energies),
    )
    for q in range(spec.L):
        H += cc.embed(np.diag(energies[q].astype(complex)), q)
    g = spec.coupling_strength() * coupling_scale
    if spec.L == 2:
        H += g * (cc.embed(phi_ops[0], 0) @ cc.embed(phi_ops[1], 1))
    else:
        for q in range(3):
            r = (q + 1) % 3
            H += -g * (cc.embed(phi_ops[q], q) @ cc.embed(phi_ops[r], r))
    H = (H + H.conj().T) / 2
    object.__setattr__(cc, "hamiltonian", HermitianOperator(H))
    return cc


def build_coupled_circuit(spec: CircuitSpec) -> HermitianOperator:
    """Coupled-circuit Hamiltonian in the truncated product basis."""
    return coupled_circuit_details(spec).hamiltonian
