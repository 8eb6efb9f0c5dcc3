import csv
import json
import math

import pytest

from cyclewalk import classical_reference
from cyclewalk.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _rows(text):
    return list(csv.DictReader(text.splitlines()))


def test_simulate_shape_and_normalization(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    code, _, _ = _run(capsys, "simulate", "--nodes", "7", "--decoherence", "0.5",
                      "--steps", "100", "--method", "fourier",
                      "--initial-coin", "up", "--output", str(out))
    assert code == 0
    rows = _rows(out.read_text())
    assert len(rows) == 7 * 101
    sums = {}
    for row in rows:
        assert row["method"] == "fourier"
        sums.setdefault(int(row["t"]), 0.0)
        sums[int(row["t"])] += float(row["p"])
    assert all(abs(s - 1.0) <= 1e-10 for s in sums.values())


def test_simulate_direct_full_dephasing_matches_chain(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    code, _, _ = _run(capsys, "simulate", "--nodes", "5", "--decoherence", "1.0",
                      "--steps", "3", "--method", "direct", "--output", str(out))
    assert code == 0
    rows = _rows(out.read_text())
    for row in rows:
        expect = classical_reference(5, int(row["t"])).probs[int(row["x"])]
        assert abs(float(row["p"]) - expect) <= 1e-12


def test_simulate_zero_steps_single_mass_row(capsys):
    code, out, _ = _run(capsys, "simulate", "--nodes", "4", "--decoherence", "0",
                        "--steps", "0")
    assert code == 0
    rows = _rows(out)
    nonzero = [r for r in rows if abs(float(r["p"])) > 1e-12]
    assert len(nonzero) == 1
    assert (nonzero[0]["t"], nonzero[0]["x"]) == ("0", "0")
    assert float(nonzero[0]["p"]) == pytest.approx(1.0, abs=1e-12)


def test_simulate_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = _run(capsys, "simulate", "--nodes", "6", "--decoherence", "0.3",
                          "--steps", "40", "--initial-coin", "balanced",
                          "--output", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_rejects_unknown_method(capsys):
    code, _, err = _run(capsys, "simulate", "--nodes", "5", "--decoherence", "0.5",
                        "--steps", "5", "--method", "magic")
    assert code == 2
    assert "method" in err


def test_simulate_missing_required_flag(capsys):
    code, _, err = _run(capsys, "simulate", "--nodes", "5", "--steps", "5")
    assert code == 2
    assert "decoherence" in err


def test_spectrum_counts_and_summary(tmp_path, capsys):
    out, summary = tmp_path / "spec.csv", tmp_path / "spec.json"
    code, _, _ = _run(capsys, "spectrum", "--nodes", "6", "--decoherence", "0.5",
                      "--output", str(out), "--summary", str(summary))
    assert code == 0
    rows = _rows(out.read_text())
    assert len(rows) == 36
    counts = {}
    for row in rows:
        counts[row["classification"]] = counts.get(row["classification"], 0) + 1
    assert counts == {"diagonal-pair": 6, "antipodal-pair": 6, "generic": 24}
    report = json.loads(summary.read_text())
    assert report["radius_within_unit_disk"] is True
    assert report["generic_radius_below_one"] is True
    assert report["persistent_eigenvalue_placement_ok"] is True
    assert report["max_radius_generic"] < 1.0


def test_spectrum_odd_cycle_has_no_antipodal_pairs(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    code, _, err = _run(capsys, "spectrum", "--nodes", "7", "--decoherence", "0.3",
                        "--output", str(out))
    assert code == 0
    rows = _rows(out.read_text())
    assert sum(r["classification"] == "antipodal-pair" for r in rows) == 0
    summary = json.loads(err)
    assert summary["count_antipodal"] == 0


def test_mixing_json_schema_and_bound(tmp_path, capsys):
    out = tmp_path / "mix.json"
    code, _, _ = _run(capsys, "mixing", "--nodes", "9", "--decoherence", "0.2",
                      "--epsilon", "0.05", "--horizon", "4000",
                      "--trace-stride", "500", "--output", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert set(report) == {"epsilon", "horizon", "converged", "mixing_time",
                           "bound", "tv_trace"}
    assert report["converged"] is True
    assert isinstance(report["mixing_time"], int)
    assert report["bound"]["tau"] == report["mixing_time"]
    assert report["bound"]["value"] > 0
    # stride thins the trace but keeps the final point
    assert len(report["tv_trace"]) == math.ceil(4000 / 500) + 1
    assert report["tv_trace"][-1][0] == 4000


def test_mixing_bound_not_available_for_down_coin(tmp_path, capsys):
    out = tmp_path / "mix.json"
    code, _, _ = _run(capsys, "mixing", "--nodes", "9", "--decoherence", "0.2",
                      "--epsilon", "0.05", "--horizon", "2000",
                      "--initial-coin", "down", "--output", str(out))
    assert code == 0
    assert json.loads(out.read_text())["bound"] is None


def test_mixing_bound_required_on_even_cycle_is_usage_error(capsys):
    code, _, err = _run(capsys, "mixing", "--nodes", "8", "--decoherence", "0.5",
                        "--epsilon", "0.05", "--bound", "require")
    assert code == 2
    assert "even" in err


def test_mixing_coherent_even_cycle_instantaneous_does_not_converge(tmp_path, capsys):
    out = tmp_path / "mix.json"
    code, _, _ = _run(capsys, "mixing", "--nodes", "8", "--decoherence", "0",
                      "--epsilon", "0.001", "--target", "instantaneous",
                      "--horizon", "2000", "--output", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["converged"] is False
    assert report["mixing_time"] is None


def test_mixing_coherent_odd_cycle_averaged_converges(tmp_path, capsys):
    out = tmp_path / "mix.json"
    code, _, _ = _run(capsys, "mixing", "--nodes", "9", "--decoherence", "0",
                      "--epsilon", "0.05", "--target", "averaged",
                      "--horizon", "4000", "--output", str(out))
    assert code == 0
    assert json.loads(out.read_text())["converged"] is True


def test_verify_subset_and_exit_code(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code, _, _ = _run(capsys, "verify", "--quick", "--check", "unitality",
                      "--check", "closedform", "--output", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert [c["name"] for c in report["checks"]] == ["unitality", "closedform"]
    assert report["all_passed"] is True


def test_verify_unknown_check_is_usage_error(capsys):
    code, _, err = _run(capsys, "verify", "--check", "nonsense")
    assert code == 2
    assert "unknown checks" in err


def test_verify_threaded_sweep_matches_serial(monkeypatch):
    from cyclewalk.verify import run_checks

    names = ["unitality", "geosum", "contraction"]
    serial = run_checks(names=names, profile="quick", threads=1)
    threaded = run_checks(names=names, profile="quick", threads=3)
    assert serial == threaded
    monkeypatch.setenv("CYCLEWALK_THREADS", "2")
    via_env = run_checks(names=names, profile="quick")
    assert via_env == serial


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("# walk setup\nnodes=5\ndecoherence=1.0\nsteps=2\nmethod=direct\n")
    out = tmp_path / "sim.csv"
    code, _, _ = _run(capsys, "simulate", "--config", str(config),
                      "--steps", "3", "--output", str(out))
    assert code == 0
    rows = _rows(out.read_text())
    assert max(int(r["t"]) for r in rows) == 3  # flag wins over file
    bad = tmp_path / "bad.cfg"
    bad.write_text("nodes=5\nwheels=4\n")
    code, _, err = _run(capsys, "simulate", "--config", str(bad), "--steps", "1",
                        "--decoherence", "0")
    assert code == 2
    assert "wheels" in err


def test_initial_coin_quadruple_renormalizes_with_warning(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    code, _, err = _run(capsys, "simulate", "--nodes", "5", "--decoherence", "0.5",
                        "--steps", "2", "--initial-coin", "2,0,0,0",
                        "--output", str(out))
    assert code == 0
    assert "renormalizing" in err
    reference = tmp_path / "ref.csv"
    code, _, err = _run(capsys, "simulate", "--nodes", "5", "--decoherence", "0.5",
                        "--steps", "2", "--initial-coin", "up",
                        "--output", str(reference))
    assert code == 0
    assert "renormalizing" not in err
    assert out.read_bytes() == reference.read_bytes()


def test_manifest_contents(tmp_path, capsys):
    out, manifest = tmp_path / "sim.csv", tmp_path / "manifest.json"
    code, _, _ = _run(capsys, "simulate", "--nodes", "4", "--decoherence", "0.1",
                      "--steps", "1", "--output", str(out),
                      "--manifest", str(manifest))
    assert code == 0
    data = json.loads(manifest.read_text())
    assert data["command"] == "simulate"
    assert data["deterministic"] is True
    assert data["rng"] == "none"
    assert data["outputs"] == [str(out)]
    assert "timestamp" in data and "version" in data


def test_version_and_help_paths(capsys):
    assert _run(capsys, "--version")[0] == 0
    assert _run(capsys, "--help")[0] == 0
    assert main([]) == 2  # missing subcommand
    capsys.readouterr()
