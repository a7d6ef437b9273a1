import importlib.resources
import io
import json
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

from cvgauss import cli
from cvgauss import states as st


def run_cli(argv):
    out = io.StringIO()
    err = io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue(), err.getvalue()


def data_path(name):
    return str(importlib.resources.files("cvgauss").joinpath("data", name))


@pytest.fixture
def tms_file(tmp_path):
    path = tmp_path / "tms.json"
    code, _, _ = run_cli(["make", "tms", "--r", "0.5", "--out", str(path)])
    assert code == 0
    return str(path)


def test_packaged_vacuum_negativity():
    code, out, _ = run_cli(["negativity", data_path("vacuum_two_mode.json")])
    assert code == 0
    assert out.strip() == "0.000000"


def test_packaged_pair_negativity():
    code, out, _ = run_cli(["negativity", data_path("tms_r0.5.json")])
    assert code == 0
    assert abs(float(out) - 1.442695) <= 1e-3


def test_validate_reports_witness_and_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 1, "gamma": [[0.5, 0.0], [0.0, 0.5]]}))
    code, out, _ = run_cli(["validate", str(path)])
    assert code == 2
    assert "-0.500000" in out
    assert "valid\tno" in out


def test_validate_good_state(tms_file):
    code, out, _ = run_cli(["validate", tms_file])
    assert code == 0
    assert "valid\tyes" in out


def test_state_file_round_trip(tmp_path, tms_file):
    state, part = cli.load_state(tms_file)
    again = tmp_path / "copy.json"
    cli.save_state(str(again), state, part)
    state2, part2 = cli.load_state(str(again))
    assert np.array_equal(state.cov, state2.cov)
    assert np.array_equal(state.disp, state2.disp)
    assert part.labels == part2.labels


def test_unphysical_state_as_input_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 1, "gamma": [[0.5, 0.0], [0.0, 0.5]]}))
    code, _, err = run_cli(["negativity", str(path), "--partition", "A"])
    assert code == 2
    assert "uncertainty" in err


def test_malformed_json_exits_1(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    code, _, err = run_cli(["validate", str(path)])
    assert code == 1


def test_wrong_shape_exits_1(tmp_path):
    path = tmp_path / "shape.json"
    path.write_text(json.dumps({"n": 2, "gamma": [[1.0, 0.0], [0.0, 1.0]]}))
    code, _, _ = run_cli(["validate", str(path)])
    assert code == 1


def test_usage_error_exits_1():
    code, _, _ = run_cli(["no-such-command"])
    assert code == 1


def test_schmidt_pure(tms_file):
    code, out, _ = run_cli(["schmidt", tms_file])
    assert code == 0
    assert abs(float(out.split("\t")[1]) - 0.5) <= 1e-9


def test_schmidt_mixed_exits_3(tmp_path):
    path = tmp_path / "thermal.json"
    run_cli(["make", "thermal", "--nu", "2.0", "--modes", "2", "--out", str(path)])
    code, _, err = run_cli(["schmidt", str(path)])
    assert code == 3
    assert "pure" in err


def test_separability_with_witness(tmp_path):
    state_path = tmp_path / "vac.json"
    run_cli(["make", "vacuum", "--modes", "2", "--out", str(state_path)])
    wa = tmp_path / "a.json"
    wb = tmp_path / "b.json"
    wa.write_text(json.dumps({"gamma": [[1.0, 0.0], [0.0, 1.0]]}))
    wb.write_text(json.dumps({"gamma": [[1.0, 0.0], [0.0, 1.0]]}))
    code, out, _ = run_cli(["separability", str(state_path), "--witness", str(wa), str(wb)])
    assert code == 0
    assert "verdict\tPPT" in out
    assert "witness_verified\tyes" in out


def test_separability_pair_state(tms_file):
    code, out, _ = run_cli(["separability", tms_file])
    assert code == 0
    assert "NPT_Entangled" in out
    assert "conclusive\tyes" in out


def test_convert_glocc(tmp_path):
    r = tmp_path / "r.vec"
    rp = tmp_path / "rp.vec"
    r.write_text("2.0 1.0\n")
    rp.write_text("1.5 0.5\n")
    code, out, _ = run_cli(["convert", "--glocc", str(r), str(rp)])
    assert code == 0 and "yes" in out
    rp.write_text("1.5 1.2\n")
    code, out, _ = run_cli(["convert", "--glocc", str(r), str(rp)])
    assert code == 0 and "no" in out


def test_convert_locc(tmp_path):
    a = tmp_path / "a.vec"
    ap = tmp_path / "ap.vec"
    a.write_text("0.5 0.5\n")
    ap.write_text("1.0 0.0\n")
    code, out, _ = run_cli(["convert", "--locc", str(a), str(ap)])
    assert code == 0 and "yes" in out


def test_channel_apply_attenuation(tmp_path, tms_file):
    out_path = tmp_path / "lossy.json"
    code, _, _ = run_cli(["channel", "apply", tms_file, "--attenuation", "0.8", "--out", str(out_path)])
    assert code == 0
    code, out, _ = run_cli(["negativity", str(out_path)])
    assert code == 0
    assert 0.0 < float(out) < 1.4427


def test_channel_apply_from_file(tmp_path, tms_file):
    spec = {
        "A": np.eye(4).tolist(),
        "G": np.zeros((4, 4)).tolist(),
    }
    ch_path = tmp_path / "channel.json"
    ch_path.write_text(json.dumps(spec))
    out_path = tmp_path / "out.json"
    code, _, _ = run_cli(["channel", "apply", tms_file, "--file", str(ch_path), "--out", str(out_path)])
    assert code == 0
    state, _ = cli.load_state(str(out_path))
    assert np.allclose(state.cov, st.two_mode_squeezed_cov(0.5))


def test_measure_homodyne(tmp_path, tms_file):
    out_path = tmp_path / "after.json"
    code, _, _ = run_cli(["measure", tms_file, "--mode", "1", "--homodyne", "X", "--out", str(out_path)])
    assert code == 0
    state, _ = cli.load_state(str(out_path))
    c2 = np.cosh(1.0)
    assert np.allclose(state.cov, np.diag([1.0 / c2, c2]), atol=1e-10)


def test_measure_vacuum(tmp_path, tms_file):
    out_path = tmp_path / "after.json"
    code, out, _ = run_cli(["measure", tms_file, "--mode", "1", "--vacuum", "--out", str(out_path)])
    assert code == 0
    prob = float(out.splitlines()[0].split("\t")[1])
    assert prob == pytest.approx(1.0 / np.cosh(0.5) ** 2, abs=1e-6)


def test_distill_nogo_deterministic(tms_file):
    argv = ["distill", "nogo", tms_file, "--trials", "40", "--seed", "9"]
    code1, out1, _ = run_cli(argv)
    code2, out2, _ = run_cli(argv)
    assert code1 == code2 == 0
    assert out1 == out2
    gain = float(dict(line.split("\t") for line in out1.splitlines())["max_gain"])
    assert gain <= 1e-9


def test_distill_pipeline_table_and_plot(tmp_path):
    fig = tmp_path / "trace.png"
    code, out, err = run_cli(
        ["distill", "pipeline", "--r", "0.3", "--V", "0.9", "--iters", "1", "--cutoff", "10", "--plot", str(fig)]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == [
        "iteration",
        "log_negativity",
        "p_success",
        "p_cumulative",
        "gaussianity_distance",
        "tail_mass",
    ]
    assert len(lines) == 3
    assert fig.exists() and fig.stat().st_size > 1000


def test_passive_commands(tmp_path):
    path = tmp_path / "sq.json"
    gamma = np.diag([np.exp(1.0), np.exp(-1.0), np.exp(1.0), np.exp(-1.0)])
    path.write_text(json.dumps({"n": 2, "gamma": gamma.tolist(), "partition": "AB"}))
    code, out, _ = run_cli(["passive", "max", str(path)])
    assert code == 0
    assert float(out) == pytest.approx(np.log2(np.e), abs=1e-6)
    code, out, _ = run_cli(["passive", "optimize", str(path), "--restarts", "3", "--seed", "1"])
    assert code == 0
    table = dict(line.split("\t") for line in out.splitlines())
    assert float(table["achieved"]) == pytest.approx(float(table["bound"]), abs=1e-3)


def test_demo_continuity_rows_and_plot(tmp_path):
    fig = tmp_path / "continuity.png"
    code, out, _ = run_cli(["demo", "continuity", "--kmax", "100000", "--plot", str(fig)])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("k\t")
    rows = [line.split("\t") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == [10, 100, 1000, 10000, 100000]
    distances = [float(r[1]) for r in rows]
    energies = [float(r[3]) for r in rows]
    assert all(a > b for a, b in zip(distances, distances[1:]))
    assert all(a < b for a, b in zip(energies, energies[1:]))
    assert fig.exists() and fig.stat().st_size > 1000


def test_env_var_seed_matches_explicit(tms_file, monkeypatch):
    monkeypatch.setenv("CVGAUSS_SEED", "17")
    parser_default = cli.build_parser()
    args = parser_default.parse_args(["distill", "nogo", tms_file, "--trials", "5"])
    assert args.seed == 17
