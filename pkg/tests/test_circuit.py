"""Tests for the circuit module: fluxonium grids, wells, coupled circuits."""

import numpy as np
import pytest

from ceqsim.circuit import (
    CircuitSpec,
    build_coupled_circuit,
    build_single_fluxonium,
    coupled_circuit_details,
    diagonalize_fluxonium,
    well_states,
)
from ceqsim.errors import ValidationError
from ceqsim.numerics import eigendecompose


def spec(E_C=1.0, E_J=15.0, E_L=0.75, **kw):
    return CircuitSpec(E_C=E_C, E_J=E_J, E_L=E_L, **kw)


class TestSingleFluxonium:
    def test_harmonic_limit(self):
        s = CircuitSpec(E_C=1.0, E_J=0.0, E_L=6.0)
        sp = diagonalize_fluxonium(s, k=5)
        spacing = np.diff(sp.energies)
        expected = np.sqrt(8 * s.E_C[0] * s.E_Ls[0])
        assert np.all(np.abs(spacing - expected) / expected < 0.005)

    def test_gauge_invariance(self):
        base = None
        for ng in (0.0, 0.25, 0.5, 1.0):
            s = spec(charge_offsets=ng, grid_points=1501)
            evals, _ = eigendecompose(build_single_fluxonium(s), k=6)
            if base is None:
                base = evals
            else:
                scale = np.max(np.abs(base))
                assert np.max(np.abs(evals - base)) <= 1e-8 * scale

    def test_well_minima_location(self):
        s = spec()
        sp = diagonalize_fluxonium(s)
        expected = np.pi - sp.E_Ls / s.E_J[0]
        assert abs(abs(sp.well_minima[1]) - expected) / expected < 0.02
        assert abs(abs(sp.well_minima[0]) - expected) / expected < 0.02

    def test_grid_too_small_rejected(self):
        with pytest.raises(ValidationError):
            diagonalize_fluxonium(spec(grid_halfwidth=2.0))

    def test_ej_el_ratio_warning(self):
        with pytest.warns(UserWarning):
            spec(E_J=5.0, E_L=1.0)


class TestWellStates:
    def test_symmetric_point_parity(self):
        sp = diagonalize_fluxonium(spec())
        left, right = well_states(sp)
        xl = float(np.real(np.vdot(left.amplitudes, sp.grid * left.amplitudes)))
        xr = float(np.real(np.vdot(right.amplitudes, sp.grid * right.amplitudes)))
        assert xl < 0 < xr
        assert abs(abs(xl) - abs(xr)) < 1e-6

    def test_right_well_position(self):
        s = spec()
        sp = diagonalize_fluxonium(s)
        _, right = well_states(sp)
        xr = float(np.real(np.vdot(right.amplitudes, sp.grid * right.amplitudes)))
        expected = np.pi - sp.E_Ls / s.E_J[0]
        assert abs(xr - expected) / expected < 0.02

    def test_overlap_small(self):
        sp = diagonalize_fluxonium(spec(E_C=1.0, E_J=10.0, E_L=0.5))
        left, right = well_states(sp)
        assert abs(np.vdot(left.amplitudes, right.amplitudes)) < 1e-3

    def test_flux_far_from_pi_rejected(self):
        sp = diagonalize_fluxonium(spec(fluxes=np.pi + 0.5))
        with pytest.raises(ValidationError):
            well_states(sp)


class TestCoupledCircuit:
    def test_zero_coupling_is_product_spectrum(self):
        s = spec()
        cc = coupled_circuit_details(s, coupling_scale=0.0)
        evals, _ = eigendecompose(cc.hamiltonian, k=6)
        sums = np.sort(
            np.add.outer(cc.energies[0], cc.energies[1]).ravel()
        )[:6]
        scale = max(abs(sums[-1]), 1.0)
        assert np.max(np.abs(evals - sums)) <= 1e-9 * scale

    def test_l2_doublet_pattern(self):
        s = spec()
        evals, _ = eigendecompose(build_coupled_circuit(s), k=4)
        e = evals - evals.mean()
        # four lowest levels at -J +/- Omega0, +J -/+ Omega0
        J = (e[2] + e[3] - e[0] - e[1]) / 4
        omega0 = (e[1] - e[0]) / 2
        assert J > 0 and omega0 > 0
        pattern = np.array([-J - omega0, -J + omega0, J - omega0, J + omega0])
        # higher-order corrections distort the upper doublet slightly
        assert np.max(np.abs(e - pattern)) < 0.15 * J

    def test_l3_ferromagnetic_doublet(self):
        s = CircuitSpec(E_C=1.0, E_J=15.0, E_L=0.4, L=3, levels_kept=4)
        cc = coupled_circuit_details(s)
        evals, evecs = eigendecompose(cc.hamiltonian, k=2)
        # ferromagnetic doublet: all three phases aligned, so the
        # two-qubit phi correlators of both lowest states are positive
        for i in range(2):
            v = evecs[:, i]
            corr = np.vdot(
                v, cc.embed(cc.phi_ops[0], 0) @ cc.embed(cc.phi_ops[1], 1) @ v
            ).real
            assert corr > 0

    def test_levels_kept_minimum(self):
        with pytest.raises(ValidationError):
            spec(levels_kept=3)


class TestProperties:
    def test_wkb_trend(self):
        ratios = np.array([5.0, 10.0, 17.0, 26.0, 40.0])
        logs = []
        with np.errstate(all="ignore"):
            for r in ratios:
                s = CircuitSpec(E_C=1.0, E_J=r, E_L=r / 20.0)
                logs.append(np.log(2 * diagonalize_fluxonium(s).kappa))
        x = np.sqrt(ratios)
        slope, intercept = np.polyfit(x, logs, 1)
        pred = slope * x + intercept
        ss_res = np.sum((np.array(logs) - pred) ** 2)
        ss_tot = np.sum((np.array(logs) - np.mean(logs)) ** 2)
        assert slope < 0
        assert 1 - ss_res / ss_tot >= 0.98

    def test_grid_convergence(self):
        # the 3-point stencil is O(d^2): the 1e-6 doubling criterion is
        # met once the grid is fine enough (halving d per doubling)
        a = diagonalize_fluxonium(spec(grid_points=16001), k=6).energies
        b = diagonalize_fluxonium(spec(grid_points=32001), k=6).energies
        scale = np.max(np.abs(b))
        assert np.max(np.abs(a - b)) <= 1e-6 * scale
