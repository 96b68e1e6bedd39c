"""Frontend acceptance: every CSV contract renders to its one plot kind."""

import subprocess
import sys

import pytest

from ceqplot import PlotError, render
from ceqplot.core import CONTRACTS

# minimal but structurally faithful fixture rows per producing command
FIXTURES = {
    "spectrum": [
        "charge_offset,level,energy_rad_s",
        "0.0,0,-22.25", "0.0,1,-21.64", "0.5,0,-22.25", "0.5,1,-21.64",
    ],
    "reduce": [
        "L,kappa_rad_s,J_rad_s,h_rad_s,omega0_rad_s,omega0_over_kappa2_J",
        "2,0.6,10.2,0.013,0.032,0.92",
        "2,0.3,10.2,0.013,0.0085,0.95",
    ],
    "rabi": [
        "alpha_bar,omega0,rabi_rate,rate_over_half_omega0,bessel_prediction,"
        "contrast,fit_residual",
        "0.5,0.01,0.0024,0.48,0.484,0.99,0.004",
        "1.0,0.01,0.0044,0.88,0.880,0.99,0.006",
        "1.84,0.01,0.0058,1.16,1.164,0.98,0.008",
    ],
    "highfreq": [
        "time_s,pop_1z,prediction",
        "0.0,0.0,0.0", "0.5,0.22,0.21", "1.0,0.69,0.68", "1.5,0.97,0.96",
    ],
    "lifetime-sweep": [
        "L,J_rad_s,kappa_rad_s,T1_s,Tphi_s,kTeff_rad_s,gamma_th,gamma_z_le,"
        "gamma_y_le,gamma_z_1f,T_L_s,kappa_opt_flag",
        "2,9.4e9,9.4e6,3.15e-4,4e-6,3.1e9,1.5e4,0,0.006,4.4e6,2.2e-7,0",
        "2,9.4e9,9.4e7,3.15e-4,4e-6,3.1e9,1.5e3,0,0.06,4.4e5,2.3e-6,1",
        "2,9.4e9,9.4e6,3.15e-4,8e-6,3.1e9,1.5e4,0,0.006,1.1e6,8.9e-7,0",
        "2,9.4e9,9.4e7,3.15e-4,8e-6,3.1e9,1.5e3,0,0.06,1.1e5,9.1e-6,1",
    ],
    "dephasing": [
        "L,amplitude,omega_ac,common_mode,gamma,T_phi,c_fit,ramsey_residual,"
        "envelope_residual",
        "2,0.8,8.0,0,0.35,0.41,4.2,0.023,0.069",
        "2,0.8,16.0,0,0.18,0.41,4.5,0.021,0.054",
    ],
    "fgr": [
        "driven,channel,coupling_g,kappa,J,bath_dim,raw_rate,rate_stderr,"
        "m_squared,matrix_element_sq,fgr_constant",
        "0,y,0.015,0.3,1.0,384,2.0e-5,3e-6,1.03,0.15,0.95",
        "0,y,0.05,0.3,1.0,384,2.2e-4,3e-5,1.01,0.15,0.93",
        "0,y,0.22,0.3,1.0,384,3.7e-3,4e-4,0.99,0.15,0.79",
    ],
}

KIND_OF = {c.producer: c.kind for c in CONTRACTS}


def write_fixture(tmp_path, producer, name=None):
    path = tmp_path / f"{name or producer}.csv"
    path.write_text("\n".join(FIXTURES[producer]) + "\n")
    return path


class TestRoundTrip:
    @pytest.mark.parametrize("producer", sorted(FIXTURES))
    def test_contract_renders(self, tmp_path, producer):
        csv_path = write_fixture(tmp_path, producer)
        out = tmp_path / f"{producer}.svg"
        render(KIND_OF[producer], [str(csv_path)], str(out))
        assert out.exists() and out.stat().st_size > 0

    def test_every_contract_has_one_kind(self):
        producers = [c.producer for c in CONTRACTS]
        assert len(producers) == len(set(producers))
        assert all(c.kind in ("heatmap", "traces", "curve", "scatter")
                   for c in CONTRACTS)

    def test_multi_csv_traces(self, tmp_path):
        paths = [str(write_fixture(tmp_path, "highfreq", f"hf_{i}"))
                 for i in range(3)]
        out = tmp_path / "traces.svg"
        render("traces", paths, str(out))
        assert out.stat().st_size > 0


class TestValidation:
    def test_header_mismatch_names_producer(self, tmp_path):
        csv_path = write_fixture(tmp_path, "rabi")
        with pytest.raises(PlotError, match="heatmap"):
            render("heatmap", [str(csv_path)], str(tmp_path / "x.svg"))
        assert not (tmp_path / "x.svg").exists()

    def test_wrong_kind_for_known_contract(self, tmp_path):
        csv_path = write_fixture(tmp_path, "rabi")
        with pytest.raises(PlotError, match="rabi"):
            render("scatter", [str(csv_path)], str(tmp_path / "x.svg"))

    def test_unknown_header_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(PlotError, match="curve"):
            render("curve", [str(bad)], str(tmp_path / "x.svg"))

    def test_empty_csv_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(PlotError, match="empty"):
            render("curve", [str(empty)], str(tmp_path / "x.svg"))
        assert not (tmp_path / "x.svg").exists()

    def test_header_only_rejected(self, tmp_path):
        hdr = tmp_path / "hdr.csv"
        hdr.write_text(FIXTURES["rabi"][0] + "\n")
        with pytest.raises(PlotError, match="no data rows"):
            render("curve", [str(hdr)], str(tmp_path / "x.svg"))


class TestDeterminism:
    @pytest.mark.parametrize("producer", ["lifetime-sweep", "highfreq"])
    def test_identical_bytes(self, tmp_path, producer):
        csv_path = write_fixture(tmp_path, producer)
        out1 = tmp_path / "a.svg"
        out2 = tmp_path / "b.svg"
        render(KIND_OF[producer], [str(csv_path)], str(out1))
        render(KIND_OF[producer], [str(csv_path)], str(out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestCommandLine:
    def test_cli_render_and_errors(self, tmp_path):
        csv_path = write_fixture(tmp_path, "rabi")
        out = tmp_path / "rabi.svg"
        ok = subprocess.run(
            [sys.executable, "-m", "ceqplot.cli", "curve", "--in",
             str(csv_path), "--out", str(out)],
            capture_output=True, text=True,
        )
        assert ok.returncode == 0 and out.exists()
        bad = subprocess.run(
            [sys.executable, "-m", "ceqplot.cli", "heatmap", "--in",
             str(csv_path), "--out", str(tmp_path / "no.svg")],
            capture_output=True, text=True,
        )
        assert bad.returncode == 2
        assert "rabi" in bad.stderr and "curve" in bad.stderr
