"""Command-line entry points, file outputs, exit codes, determinism."""

import json
import math
import os
import subprocess
import sys

import pytest

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def run_cli(*args, cwd=None, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "thermopress", *args],
        capture_output=True, text=True, cwd=cwd, env=env,
    )


# ---------------------------------------------------------------------------
# pressure


def test_pressure_golden_mean(tmp_path):
    r = run_cli("pressure", "--builtin", "golden-mean", "--T-max", "30",
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    value = float(r.stdout.strip())
    assert value == pytest.approx(math.log(GOLDEN), abs=1e-9)
    assert f"{value:.6f}" == "0.481212"
    rep = json.loads((tmp_path / "transfer.json").read_text())
    assert rep["method"] == "transfer"
    assert rep["value"] == pytest.approx(math.log(GOLDEN), abs=1e-9)
    for name in ("periodic_orbits.csv", "bowen.csv"):
        lines = (tmp_path / name).read_text().splitlines()
        assert lines[0] == "T,estimate"
        assert len(lines) == 31
        # finite-T estimates approach the transfer value
        last = float(lines[-1].split(",")[1])
        assert last == pytest.approx(value, abs=0.05)


def test_pressure_full2(tmp_path):
    r = run_cli("pressure", "--builtin", "full2", "--out", str(tmp_path))
    assert r.returncode == 0
    assert f"{float(r.stdout.strip()):.6f}" == "0.693147"


def test_pressure_from_input_file(tmp_path):
    src = tmp_path / "golden.txt"
    src.write_text("2\n0 0 0.0 0.0\n0 1 1.0 0.0\n1 0 0.0 0.0\n")
    r = run_cli("pressure", "--input", str(src), "--out", str(tmp_path))
    assert r.returncode == 0
    assert float(r.stdout.strip()) == pytest.approx(math.log(GOLDEN), abs=1e-9)


def test_pressure_malformed_input(tmp_path):
    src = tmp_path / "bad.txt"
    src.write_text("2\n0 0 0.0 0.0\n0 1 1.0\n1 0 0.0 0.0\n")
    r = run_cli("pressure", "--input", str(src), "--out", str(tmp_path))
    assert r.returncode == 2
    assert "line 3" in r.stderr


def test_pressure_zero_mass_exit_code(tmp_path):
    # two-state swap has no odd-length cycles, so the periodic route has
    # nothing to sum at T = 5
    src = tmp_path / "swap.txt"
    src.write_text("2\n0 1 0.0 0.0\n1 0 0.0 0.0\n")
    r = run_cli("pressure", "--input", str(src), "--T-max", "5",
                "--out", str(tmp_path))
    assert r.returncode == 3
    assert "length 5" in r.stderr


def test_pressure_requires_one_source(tmp_path):
    r = run_cli("pressure", "--out", str(tmp_path))
    assert r.returncode == 2
    r = run_cli("pressure", "--builtin", "full2", "--input", "x.txt",
                "--out", str(tmp_path))
    assert r.returncode == 2


def test_unknown_builtin(tmp_path):
    r = run_cli("pressure", "--builtin", "nope", "--out", str(tmp_path))
    assert r.returncode == 2
    assert "full2" in r.stderr  # the message lists the known names


# ---------------------------------------------------------------------------
# thermo


def test_thermo_full2_converges(tmp_path):
    r = run_cli("thermo", "--builtin", "full2", "--beta-max", "30",
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip() == "verdict true"
    verify = json.loads((tmp_path / "verify.json").read_text())
    assert verify["verdict"] is True
    assert verify["failed_check"] is None
    assert verify["final_gap"] <= 1e-6
    assert verify["convergence"]["averages_converged"] is True
    lines = (tmp_path / "thermo_curve.csv").read_text().splitlines()
    assert lines[0].startswith("beta,")
    assert len(lines) == 62  # header + 61 schedule points


def test_thermo_zero_beta_max_reports_gap(tmp_path):
    r = run_cli("thermo", "--builtin", "full2", "--beta-max", "0",
                "--out", str(tmp_path))
    assert r.returncode == 0
    assert r.stdout.strip() == "verdict false"
    verify = json.loads((tmp_path / "verify.json").read_text())
    assert verify["failed_check"] == "limit-gap"


def test_thermo_rejects_negative_damping(tmp_path):
    src = tmp_path / "neg.txt"
    src.write_text("2\n0 0 -0.5 0.0\n0 1 1.0 0.0\n1 0 1.0 0.0\n")
    r = run_cli("thermo", "--input", str(src), "--out", str(tmp_path))
    assert r.returncode == 2
    assert "nonnegative" in r.stderr


# ---------------------------------------------------------------------------
# catmap


def test_catmap_below_threshold(tmp_path):
    r = run_cli("catmap", "--refine", "4", "--beta-max", "50",
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    out = r.stdout.splitlines()
    assert out[0] == "regime below-threshold"
    star = float(out[1].split()[1])
    assert star == pytest.approx(0.505049, abs=1e-4)
    rep = json.loads((tmp_path / "catmap_report.json").read_text())
    lam = 2.0 * math.log(GOLDEN)
    assert rep["pressure_on_undamped"] == pytest.approx(-lam / 2, abs=1e-6)
    assert rep["pressure_undamped"] == pytest.approx(lam / 2, abs=1e-6)
    assert rep["decays"] is True


def test_catmap_above_threshold(tmp_path):
    r = run_cli("catmap", "--refine", "0", "--beta-max", "10",
                "--out", str(tmp_path))
    assert r.returncode == 0
    out = r.stdout.splitlines()
    assert out[0] == "regime above-threshold"
    assert out[1] == "beta_star none"
    rep = json.loads((tmp_path / "catmap_report.json").read_text())
    assert len(rep["undamped_edges"]) == 8


def test_catmap_requires_beta_max(tmp_path):
    r = run_cli("catmap", "--refine", "4", "--out", str(tmp_path))
    assert r.returncode == 2


def test_catmap_scale_flags_exclusive(tmp_path):
    r = run_cli("catmap", "--refine", "2", "--epsilon", "0.25",
                "--beta-max", "10", "--out", str(tmp_path))
    assert r.returncode == 2


def test_catmap_epsilon_form(tmp_path):
    r = run_cli("catmap", "--epsilon", "0.25", "--beta-max", "5",
                "--out", str(tmp_path))
    assert r.returncode == 0
    rep = json.loads((tmp_path / "catmap_report.json").read_text())
    assert rep["refinement_order"] == 2
    assert rep["n_states"] == 21


# ---------------------------------------------------------------------------
# wave


def test_wave_constant_damping(tmp_path):
    r = run_cli("wave", "--profile", "const:0.5", "--n", "256",
                "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    lines = {ln.split()[0]: float(ln.split()[1])
             for ln in r.stdout.splitlines()}
    assert lines["spectrum_gap"] == pytest.approx(0.5, abs=1e-6)
    assert lines["fitted_rate"] == pytest.approx(1.0, rel=0.05)
    spec = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert spec[0] == "re_tau,im_tau"
    assert len(spec) == 513
    summary = json.loads((tmp_path / "wave_summary.json").read_text())
    assert summary["two_gap"] == pytest.approx(1.0, abs=1e-6)
    assert summary["n_grid"] == 256
    energy_lines = (tmp_path / "energy.csv").read_text().splitlines()
    assert energy_lines[0] == "t,E"


def test_wave_undamped_rate_zero(tmp_path):
    r = run_cli("wave", "--profile", "const:0", "--n", "128",
                "--out", str(tmp_path))
    assert r.returncode == 0
    rate = float(r.stdout.splitlines()[0].split()[1])
    assert abs(rate) <= 1e-3


def test_wave_cfl_violation(tmp_path):
    r = run_cli("wave", "--profile", "const:0.5", "--n", "64",
                "--dt", "0.2", "--out", str(tmp_path))
    assert r.returncode == 2
    assert "step bound" in r.stderr


def test_wave_bad_profile(tmp_path):
    r = run_cli("wave", "--profile", "tent:1", "--out", str(tmp_path))
    assert r.returncode == 2


# ---------------------------------------------------------------------------
# determinism


def test_wave_outputs_bit_identical(tmp_path):
    d1 = tmp_path / "r1"
    d2 = tmp_path / "r2"
    for d in (d1, d2):
        d.mkdir()
        r = run_cli("wave", "--profile", "bump:3.14,1.0,0.5", "--n", "64",
                    "--t-end", "10", "--out", str(d))
        assert r.returncode == 0
    for name in ("spectrum.csv", "energy.csv", "wave_summary.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_wave_seed_changes_data_not_spectrum(tmp_path):
    d1 = tmp_path / "s0"
    d2 = tmp_path / "s1"
    for d, seed in ((d1, "0"), (d2, "1")):
        d.mkdir()
        r = run_cli("wave", "--profile", "const:0.3", "--n", "64",
                    "--t-end", "10", "--seed", seed, "--out", str(d))
        assert r.returncode == 0
    assert (d1 / "spectrum.csv").read_bytes() == (d2 / "spectrum.csv").read_bytes()
    assert (d1 / "energy.csv").read_bytes() != (d2 / "energy.csv").read_bytes()


def test_thermo_identical_across_thread_counts(tmp_path):
    d1 = tmp_path / "t1"
    d2 = tmp_path / "t4"
    for d, threads in ((d1, "1"), (d2, "4")):
        d.mkdir()
        r = run_cli("thermo", "--builtin", "golden-mean", "--beta-max", "20",
                    "--out", str(d),
                    env_extra={"THERMOPRESS_THREADS": threads})
        assert r.returncode == 0
    for name in ("thermo_curve.csv", "verify.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_no_subcommand_is_usage_error():
    r = run_cli()
    assert r.returncode == 2
