"""Tests for the fgr module: random bath, couplers, relaxation rates."""

import numpy as np
import pytest
from scipy.stats import chisquare

from ceqsim.errors import ChannelUnsupportedError, ValidationError
from ceqsim.fgr import FgrSpec, FgrResult, build_bath, build_coupler, run_relaxation


def spec(**kw):
    base = dict(coupling_g=0.05, bath_dim=256, n_realizations=6, seed=3,
                fit_window=(8.0, 48.0))
    base.update(kw)
    return FgrSpec(**base)


class TestValidation:
    def test_bath_dim_floor(self):
        with pytest.raises(ValidationError):
            spec(bath_dim=128)

    def test_kappa_must_be_below_j(self):
        with pytest.raises(ValidationError):
            spec(kappa=1.5, J=1.0)

    def test_bad_channel(self):
        with pytest.raises(ValidationError):
            spec(channel="w")

    def test_negative_constant_rejected(self):
        with pytest.raises(ValidationError):
            FgrResult(1e-4, 1e-5, -0.5, 1.0, 1.0)


class TestBath:
    def test_bounded_support_and_hermiticity(self):
        s = spec(bath_dim=512, bandwidth=10.0)
        hb, evals, vecs = build_bath(s, realization=2)
        assert evals.min() >= -5.0 and evals.max() <= 5.0
        assert np.all(np.diff(evals) >= 0)
        assert np.allclose(hb.entries, hb.entries.conj().T)
        # reconstruct spectrum from the dense matrix
        back = np.linalg.eigvalsh(hb.entries)
        assert np.allclose(back, evals, atol=1e-8)

    def test_determinism_and_realization_independence(self):
        s = spec(bath_dim=256)
        _, e1, _ = build_bath(s, realization=0)
        _, e2, _ = build_bath(s, realization=0)
        _, e3, _ = build_bath(s, realization=1)
        assert np.array_equal(e1, e2)
        assert not np.array_equal(e1, e3)

    def test_flat_level_density(self):
        s = spec(bath_dim=2048, bandwidth=10.0)
        _, evals, _ = build_bath(s, realization=0)
        counts, _ = np.histogram(evals, bins=10, range=(-5.0, 5.0))
        _, p = chisquare(counts)
        assert p > 1e-3


class TestCouplers:
    def test_hermitian_and_normalized(self):
        s = spec(bath_dim=512)
        m = build_coupler(s, realization=0, which=1).entries
        assert np.allclose(m, m.conj().T)
        # GUE normalization: mean-square entry 1/N, so tr(M^2)/N -> 1
        assert abs(np.trace(m @ m).real / 512 - 1.0) < 0.1

    def test_m1_m2_independent(self):
        s = spec(bath_dim=512)
        m1 = build_coupler(s, realization=0, which=1).entries
        m2 = build_coupler(s, realization=0, which=2).entries
        # normalized Frobenius overlap of independent GUE matrices is
        # O(1/N); 3 sigma bound
        rho = np.trace(m1 @ m2).real / np.sqrt(
            np.trace(m1 @ m1).real * np.trace(m2 @ m2).real
        )
        assert abs(rho) < 3.0 / 512


class TestRelaxation:
    def test_determinism(self):
        a = run_relaxation(spec())
        b = run_relaxation(spec())
        assert a.raw_rate == b.raw_rate
        assert a.fgr_constant == b.fgr_constant

    def test_small_scale_constant(self):
        res = run_relaxation(spec())
        assert res.raw_rate > 0
        assert 0.5 < res.fgr_constant < 2.0
        assert res.rate_stderr < res.raw_rate

    def test_rate_scales_with_g_squared(self):
        r1 = run_relaxation(spec(coupling_g=0.03, n_realizations=10))
        r2 = run_relaxation(spec(coupling_g=0.06, n_realizations=10))
        ratio = r2.raw_rate / r1.raw_rate
        assert 4.0 * 0.7 < ratio < 4.0 * 1.3

    def test_z_channel_unsupported(self):
        # default (long) fit window: the first-order diagonal drift
        # dominates and the channel must be refused, not mis-fit
        with pytest.raises(ChannelUnsupportedError):
            run_relaxation(spec(channel="z", fit_window=None))

    def test_driven_runs(self):
        res = run_relaxation(spec(driven=True, coupling_g=0.06))
        assert res.raw_rate > 0
        assert res.fgr_constant > 0
