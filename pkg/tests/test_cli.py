"""End-to-end tests for the command line front end.

Each test drives `main` in process with a config written to a temp
directory, then checks exit codes, printed key=value lines and the emitted
JSON/CSV artifacts against the fixture values established in the unit
tests (two-cell region constants, the frozen admission outcome, the
one-secondary throughput optimum)."""

import json

import numpy as np
import pytest

from underlaypc import ConfigError
from underlaypc.cli import main, parse_values
from underlaypc.experiments import CSV_COLUMNS, SUMMARY_COLUMNS

DB_HALF = float(10.0 * np.log10(0.5))

T2_INI = f"""[network]
num_pbs = 2
num_pu = 2
gain_0 = 1.0 0.5
gain_1 = 0.5 1.0
noise = 0.1
p_max = 1.0
serving = 0 1
target_sinr_db = {DB_HALF!r}
"""

T2X_INI = f"""[network]
num_pbs = 2
num_sbs = 1
num_pu = 2
num_su = 2
gain_0 = 1.0 0.5 10.0 0.3
gain_1 = 0.5 1.0 0.3 10.0
gain_2 = 0.1 0.1 1.0 1.0
noise = 0.1
p_max = 1.0
serving = 0 1 2 2
target_sinr_db = {DB_HALF!r}
"""

ONE_SU_INI = f"""[network]
num_pbs = 1
num_sbs = 1
num_pu = 1
num_su = 1
gain_0 = 1.0 4.0
gain_1 = 0.2 1.0
noise = 0.1
p_max = 1.0
serving = 0 1
target_sinr_db = {DB_HALF!r} -10.0
"""

SCENARIO_INI = """[scenario]
kind = four-cell-a
num_pu = 2
num_su = 2
snapshots = 2
seed = 1
alphas = 0.5
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def printed(capsys) -> dict:
    """key=value lines from stdout."""
    out = {}
    for line in capsys.readouterr().out.splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key] = value
    return out


# ---------------------------------------------------------------------------
# sweep-value parsing


def test_parse_values_explicit():
    assert parse_values(["0.5", "1", "2"]) == (0.5, 1.0, 2.0)


def test_parse_values_range_with_step():
    vals = parse_values(["0.2..2.0", "step", "0.2"])
    assert len(vals) == 10
    assert vals == pytest.approx(np.arange(1, 11) * 0.2)


def test_parse_values_range_default_step():
    assert parse_values(["1..5"]) == (1.0, 2.0, 3.0, 4.0, 5.0)


def test_parse_values_integer_mode():
    assert parse_values(["2..6", "step", "2"], integer=True) == (2, 4, 6)
    with pytest.raises(ConfigError):
        parse_values(["0.5", "1"], integer=True)


@pytest.mark.parametrize("tokens", [
    ["0.2..2.0", "by", "0.2"],
    ["0.2..2.0", "step"],
    ["2.0..0.2", "step", "0.2"],
    ["0.2..2.0", "step", "0"],
])
def test_parse_values_rejects_bad_ranges(tokens):
    with pytest.raises(ConfigError):
        parse_values(tokens)


# ---------------------------------------------------------------------------
# fcir


def test_fcir_document_two_cell(tmp_path, capsys):
    cfg = write(tmp_path, "t2.ini", T2_INI)
    out = tmp_path / "out"
    assert main(["fcir", "--config", cfg, "--out", str(out),
                 "--alpha", "0.8", "1.0"]) == 0
    assert capsys.readouterr().out.strip().endswith("fcir.json")
    doc = json.loads((out / "fcir.json").read_text())
    assert np.array(doc["a"]) == pytest.approx(
        np.array([[1.6, 0.4], [0.4, 1.6]]), rel=1e-9)
    assert doc["c"] == pytest.approx([2.8, 2.8], rel=1e-9)
    assert doc["titl"] == pytest.approx([1.9, 1.9], rel=1e-9)
    assert doc["itl0"] == pytest.approx([1.75, 1.75], rel=1e-9)
    assert doc["alphas"] == [0.8, 1.0]
    assert set(doc["boxes"]) == {"0.8", "1.0"}
    assert doc["boxes"]["0.8"] == pytest.approx([1.4, 1.4], rel=1e-9)
    # two sampled face lines a_m @ (x, y) = c_m spanning x in [0, c/a0]
    faces = doc["boundaries"]
    assert [f["station"] for f in faces] == [0, 1]
    for m, face in enumerate(faces):
        pts = np.array(face["points"])
        assert pts.shape == (101, 2)
        a, c = np.array(doc["a"])[m], doc["c"][m]
        assert pts @ a == pytest.approx(np.full(101, c), rel=1e-9)
        assert pts[0, 0] == 0.0
        assert pts[-1, 1] == pytest.approx(0.0, abs=1e-12)
        assert pts[-1, 0] == pytest.approx(c / a[0], rel=1e-12)


def test_fcir_defaults_to_config_alphas(tmp_path):
    cfg = write(tmp_path, "scenario.ini", SCENARIO_INI)
    out = tmp_path / "out"
    assert main(["fcir", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "fcir.json").read_text())
    assert doc["alphas"] == [0.5]
    assert set(doc["boxes"]) == {"0.5"}


def test_fcir_single_station_has_no_boundaries(tmp_path):
    ini = ("[network]\nnum_pbs = 1\nnum_pu = 1\ngain_0 = 1.0\nnoise = 0.1\n"
           f"p_max = 1.0\nserving = 0\ntarget_sinr_db = {DB_HALF!r}\n")
    cfg = write(tmp_path, "one.ini", ini)
    out = tmp_path / "out"
    assert main(["fcir", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "fcir.json").read_text())
    assert "boundaries" not in doc
    assert doc["itl0"] == pytest.approx([1.9], rel=1e-9)


def test_fcir_empty_cell_gives_axis_parallel_face(tmp_path):
    # both users in cell 0: cell 1 is unconstrained, so the document keeps
    # one face, a vertical line at the cell-0 limit 2.7 / 3
    ini = ("[network]\nnum_pbs = 2\nnum_pu = 2\ngain_0 = 1.0 1.0\n"
           "gain_1 = 0.5 0.5\nnoise = 0.1\np_max = 1.0\nserving = 0 0\n"
           f"target_sinr_db = {DB_HALF!r}\n")
    cfg = write(tmp_path, "lopsided.ini", ini)
    out = tmp_path / "out"
    assert main(["fcir", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads((out / "fcir.json").read_text())
    assert doc["c"][1] is None
    assert doc["itl0"] == pytest.approx([0.9, None], rel=1e-9)
    faces = doc["boundaries"]
    assert len(faces) == 1 and faces[0]["station"] == 0
    pts = np.array(faces[0]["points"])
    assert np.all(np.isfinite(pts))
    assert pts[:, 0] == pytest.approx(np.full(101, 0.9), rel=1e-9)
    assert pts[0, 1] == 0.0
    assert pts[-1, 1] == pytest.approx(0.9, rel=1e-9)


def test_fcir_output_is_byte_stable(tmp_path):
    cfg = write(tmp_path, "t2.ini", T2_INI)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    assert main(["fcir", "--config", cfg, "--out", str(a_dir)]) == 0
    assert main(["fcir", "--config", cfg, "--out", str(b_dir)]) == 0
    assert (a_dir / "fcir.json").read_bytes() == (b_dir / "fcir.json").read_bytes()


# ---------------------------------------------------------------------------
# jpac


def test_jpac_command_reports_frozen_outcome(tmp_path, capsys):
    cfg = write(tmp_path, "t2x.ini", T2X_INI)
    assert main(["jpac", "--config", cfg]) == 0
    got = printed(capsys)
    assert got["algorithm"] == "jpac"
    assert got["admitted"] == "1"
    assert float(got["pu_outage"]) == 0.0
    assert float(got["su_outage"]) == 0.5
    assert got["removals"] == "2:2"
    assert float(got["throughput_nats"]) == pytest.approx(np.log1p(0.5),
                                                          rel=1e-9)


def test_jpac_box_command_with_loose_alpha(tmp_path, capsys):
    cfg = write(tmp_path, "t2x.ini", T2X_INI)
    assert main(["jpac", "--config", cfg, "--algorithm", "jpac-box",
                 "--alpha", "10"]) == 0
    got = printed(capsys)
    assert got["admitted"] == "2"
    assert float(got["pu_outage"]) == 1.0
    assert float(got["su_outage"]) == 0.0
    assert got["removals"] == ""


# ---------------------------------------------------------------------------
# throughput


def test_throughput_command_with_trace(tmp_path, capsys):
    cfg = write(tmp_path, "one_su.ini", ONE_SU_INI)
    out = tmp_path / "out"
    assert main(["throughput", "--config", cfg, "--out", str(out)]) == 0
    got = printed(capsys)
    assert got["algorithm"] == "gp-poly"
    assert got["converged"] == "True"
    gamma_star = (1.9 / 4.0) / 0.3
    assert float(got["objective_nats"]) == pytest.approx(np.log1p(gamma_star),
                                                         rel=1e-6)
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0] == "outer_iteration,objective_nats"
    assert len(lines) - 1 == int(got["outer_iterations"])
    objectives = [float(line.split(",")[1]) for line in lines[1:]]
    assert objectives == sorted(objectives)
    assert objectives[-1] == float(got["objective_nats"])


def test_throughput_box_command(tmp_path, capsys):
    cfg = write(tmp_path, "one_su.ini", ONE_SU_INI)
    assert main(["throughput", "--config", cfg, "--algorithm", "gp-box",
                 "--alpha", "0.5"]) == 0
    got = printed(capsys)
    # half the limit caps the secondary at 0.95 / 4; the primary answers
    # with 0.5 * (0.1 + 0.95)
    gamma_star = (0.95 / 4.0) / (0.2 * 0.525 + 0.1)
    assert float(got["objective_nats"]) == pytest.approx(np.log1p(gamma_star),
                                                         rel=1e-6)


# ---------------------------------------------------------------------------
# sweep


def test_sweep_command_writes_csvs(tmp_path, capsys):
    cfg = write(tmp_path, "scenario.ini", SCENARIO_INI)
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out),
                 "--su-range", "1", "2", "--algorithm", "jpac", "jpac-box",
                 "--jobs", "1"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    # 2 values x 2 snapshots x 2 algorithms
    assert len(lines) - 1 == 8
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0] == ",".join(SUMMARY_COLUMNS)
    assert len(summary) - 1 == 4
    printed_paths = capsys.readouterr().out.splitlines()
    assert printed_paths == [str(out / "sweep.csv"), str(out / "summary.csv")]


def test_sweep_alpha_range_and_snapshot_override(tmp_path):
    cfg = write(tmp_path, "scenario.ini", SCENARIO_INI)
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out),
                 "--alpha", "0.5..1.0", "step", "0.5",
                 "--algorithm", "jpac-box", "--snapshots", "1",
                 "--jobs", "1"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) - 1 == 2
    assert [line.split(",")[3] for line in lines[1:]] == ["0.5", "1.0"]


def test_sweep_outputs_are_byte_stable(tmp_path):
    cfg = write(tmp_path, "scenario.ini", SCENARIO_INI)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    argv = ["sweep", "--config", cfg, "--su-range", "2",
            "--algorithm", "jpac", "--jobs", "1"]
    assert main(argv + ["--out", str(a_dir)]) == 0
    assert main(argv + ["--out", str(b_dir)]) == 0
    assert (a_dir / "sweep.csv").read_bytes() == (b_dir / "sweep.csv").read_bytes()
    assert (a_dir / "summary.csv").read_bytes() \
        == (b_dir / "summary.csv").read_bytes()


def test_sweep_seed_override_changes_snapshots(tmp_path):
    cfg = write(tmp_path, "scenario.ini", SCENARIO_INI)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    argv = ["sweep", "--config", cfg, "--su-range", "2",
            "--algorithm", "jpac", "--jobs", "1"]
    assert main(argv + ["--out", str(a_dir)]) == 0
    assert main(argv + ["--out", str(b_dir), "--seed", "777"]) == 0
    assert (a_dir / "sweep.csv").read_bytes() != (b_dir / "sweep.csv").read_bytes()


# ---------------------------------------------------------------------------
# exit codes


def test_missing_config_exits_2(tmp_path, capsys):
    assert main(["jpac", "--config", str(tmp_path / "nope.ini")]) == 2
    assert "config error" in capsys.readouterr().err


def test_sweep_axis_conflicts_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, "scenario.ini", SCENARIO_INI)
    assert main(["sweep", "--config", cfg, "--alpha", "1",
                 "--su-range", "2"]) == 2
    assert main(["sweep", "--config", cfg]) == 2
    capsys.readouterr()


def test_sweep_on_explicit_network_exits_2(tmp_path, capsys):
    cfg = write(tmp_path, "t2.ini", T2_INI)
    assert main(["sweep", "--config", cfg, "--su-range", "1"]) == 2
    capsys.readouterr()


def test_missing_required_argument_exits_2(tmp_path, capsys):
    assert main(["jpac"]) == 2
    capsys.readouterr()


def test_runtime_failure_exits_1(tmp_path, capsys):
    # an overloaded primary tier has no protection region to report
    ini = ("[network]\nnum_pbs = 2\nnum_pu = 2\ngain_0 = 1.0 0.5\n"
           "gain_1 = 0.5 1.0\nnoise = 0.1\np_max = 1.0\nserving = 0 1\n"
           "target_sinr_db = 20.0\n")
    cfg = write(tmp_path, "overload.ini", ini)
    assert main(["fcir", "--config", cfg]) == 1
    assert "PrimaryInfeasible" in capsys.readouterr().err
    assert main(["jpac", "--config", cfg]) == 1
    capsys.readouterr()
