"""Tests for the numerics module: eigensolver, propagators, fit helpers."""

import numpy as np
import pytest

from ceqsim.errors import ValidationError
from ceqsim.numerics import (
    HermitianOperator,
    StateVector,
    TimeDependentOperator,
    eigendecompose,
    fit_linear_decay,
    fit_sin_squared,
    propagate_static,
    propagate_timedep,
    propagation_convergence,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return HermitianOperator((a + a.conj().T) / 2)


class TestEigendecompose:
    def test_identity(self):
        evals, evecs = eigendecompose(HermitianOperator(np.eye(3)), k=2)
        assert np.allclose(evals, [1.0, 1.0])
        assert np.allclose(evecs.conj().T @ evecs, np.eye(2), atol=1e-12)

    def test_pauli_z(self):
        evals, _ = eigendecompose(HermitianOperator(PAULI_Z), k=2)
        assert np.allclose(evals, [-1.0, 1.0])

    def test_random_residuals(self):
        op = random_hermitian(50, seed=1)
        evals, evecs = eigendecompose(op)
        scale = np.linalg.norm(op.entries)
        for i in range(50):
            r = np.linalg.norm(op.entries @ evecs[:, i] - evals[i] * evecs[:, i])
            assert r <= 1e-9 * scale
        assert np.all(np.diff(evals) >= 0)

    def test_trace_equals_eigenvalue_sum(self):
        op = random_hermitian(40, seed=2)
        evals, _ = eigendecompose(op)
        tr = np.trace(op.entries).real
        assert abs(evals.sum() - tr) <= 1e-9 * abs(tr)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            HermitianOperator(np.array([[0, 1], [2, 0]], dtype=complex))

    def test_k_out_of_range(self):
        with pytest.raises(ValidationError):
            eigendecompose(HermitianOperator(np.eye(3)), k=4)


class TestPropagateStatic:
    def test_t_zero_identity(self):
        psi = StateVector(np.array([0.6, 0.8j]))
        out = propagate_static(psi, HermitianOperator(PAULI_X), 0.0)
        assert out is psi

    def test_eigenstate_phase(self):
        psi = StateVector(np.array([1.0, 0.0]))  # eigenstate of sz, eigenvalue +1
        out = propagate_static(psi, HermitianOperator(PAULI_Z), 0.7)
        assert np.allclose(out.amplitudes, np.exp(-1j * 0.7) * psi.amplitudes)

    def test_pauli_x_pi_pulse(self):
        kappa = 0.31
        psi = StateVector(np.array([1.0, 0.0]))
        out = propagate_static(psi, HermitianOperator(kappa * PAULI_X), np.pi / (2 * kappa))
        assert abs(abs(out.amplitudes[1]) - 1.0) < 1e-10

    def test_norm_and_energy_preserved(self):
        op = random_hermitian(20, seed=3)
        rng = np.random.default_rng(4)
        psi = StateVector(rng.normal(size=20) + 1j * rng.normal(size=20))
        out = propagate_static(psi, op, 2.3)
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-10
        e0 = np.vdot(psi.amplitudes, op.entries @ psi.amplitudes).real
        e1 = np.vdot(out.amplitudes, op.entries @ out.amplitudes).real
        assert abs(e1 - e0) <= 1e-9 * abs(e0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            propagate_static(StateVector(np.ones(3)), HermitianOperator(PAULI_X), 1.0)


def constant_op(matrix, max_frequency=5.0):
    return TimeDependentOperator(
        terms=[(HermitianOperator(matrix), lambda t: 1.0)], max_frequency=max_frequency
    )


class TestPropagateTimedep:
    def test_constant_matches_static(self):
        op = random_hermitian(8, seed=5)
        rng = np.random.default_rng(6)
        psi = StateVector(rng.normal(size=8) + 1j * rng.normal(size=8))
        tmax = 3.0
        a = propagate_static(psi, op, tmax)
        b = propagate_timedep(psi, constant_op(op.entries, max_frequency=20.0), 0.0, tmax)
        assert np.linalg.norm(a.amplitudes - b.amplitudes) < 1e-8

    def test_zero_hamiltonian(self):
        psi = StateVector(np.array([0.6, 0.8]))
        op = constant_op(np.zeros((2, 2)))
        out = propagate_timedep(psi, op, 0.0, 1.0)
        assert np.linalg.norm(out.amplitudes - psi.amplitudes) < 1e-10

    def test_resonant_rwa_rabi(self):
        # H = (w0/2) sz + A cos(w0 t) sx drives Rabi flopping at A/2.
        w0, amp = 6.0, 0.12
        op = TimeDependentOperator(
            terms=[
                (HermitianOperator(0.5 * w0 * PAULI_Z), lambda t: 1.0),
                (HermitianOperator(amp * PAULI_X), lambda t: np.cos(w0 * t)),
            ],
            max_frequency=w0,
        )
        psi = StateVector(np.array([1.0, 0.0]))
        t_pi = np.pi / (amp / 2) / 2  # half a Rabi period: full inversion
        out = propagate_timedep(psi, op, 0.0, t_pi)
        p1 = abs(out.amplitudes[1]) ** 2
        assert p1 > 1 - 0.02  # analytic half-amplitude rule within 2%

    def test_dt_too_large_rejected(self):
        op = constant_op(PAULI_Z, max_frequency=10.0)
        with pytest.raises(ValidationError):
            propagate_timedep(StateVector(np.array([1.0, 0.0])), op, 0.0, 1.0, dt=1.0)

    def test_time_reversal(self):
        op = TimeDependentOperator(
            terms=[(HermitianOperator(PAULI_X), lambda t: np.cos(2.0 * t))],
            max_frequency=4.0,
        )
        psi = StateVector(np.array([0.8, 0.6j]))
        fwd = propagate_timedep(psi, op, 0.0, 2.0)
        back = propagate_timedep(fwd, op, 2.0, 0.0)
        assert np.linalg.norm(back.amplitudes - psi.amplitudes) < 1e-8

    def test_convergence_under_halving(self):
        op = TimeDependentOperator(
            terms=[(HermitianOperator(PAULI_X), lambda t: np.sin(3.0 * t))],
            max_frequency=6.0,
        )
        psi = StateVector(np.array([1.0, 0.0]))
        delta = propagation_convergence(psi, op, 0.0, 4.0, dt=2 * np.pi / 6.0 / 200)
        assert delta <= 1e-6


class TestFitHelpers:
    def test_sin_squared_recovery(self):
        t = np.linspace(0, 30, 1200)
        w_true = 1.7
        y = 0.9 * np.sin(w_true * t / 2 + 0.3) ** 2 + 0.05
        w, amp, resid = fit_sin_squared(t, y)
        assert abs(w - w_true) / w_true < 1e-6
        assert abs(amp - 0.9) < 1e-6
        assert resid < 1e-9

    def test_linear_decay_recovery(self):
        t = np.linspace(0, 10, 200)
        rate, quad = fit_linear_decay(t, 1.0 - 0.004 * t)
        assert abs(rate - 0.004) < 1e-12
        assert quad < 1e-8

    def test_linear_decay_flags_curvature(self):
        t = np.linspace(0, 10, 200)
        _, quad = fit_linear_decay(t, 1.0 - 0.004 * t - 0.004 * t**2)
        assert quad > 0.5
