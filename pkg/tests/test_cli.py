import json
import subprocess
import sys

import pytest

from misobc.cli import main, parse_snr_grid


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_usage(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code, capsys.readouterr().err


def test_dof_output(capsys):
    code, out, _ = run(["dof", "--m", "2", "--k", "3", "--alpha", "0.5", "--b", "0.5"], capsys)
    assert code == 0
    assert out.splitlines() == ["TP (0.375, 0.375, 0.5)", "PP (0.5, 0.5, 0.5)",
                                "strict gain: users 1,2"]


def test_dof_no_gain(capsys):
    _, out, _ = run(["dof", "--alpha", "0"], capsys)
    assert out.splitlines()[-1] == "no strict gain"


@pytest.mark.parametrize("argv,flag", [
    (["dof", "--b", "1.5"], "--b"),
    (["dof", "--alpha", "-0.1"], "--alpha"),
    (["dof", "--m", "3", "--k", "3"], "--k"),
    (["sweep", "--trials", "0"], "--trials"),
    (["sweep", "--snr", "10:5:1"], "--snr"),
    (["sweep", "--snr", "-10:0:5"], "--snr"),
    (["region", "--format", "pdf"], "--format"),
    (["region", "--m", "6", "--k", "7"], "--m"),
    (["certify"], "--point"),
    (["certify", "--point", "1,1"], "--point"),
    (["certify", "--point", "1,0,0", "--subset", "3"], "--subset"),
])
def test_validation_exit_2(argv, flag, capsys):
    code, err = run_usage(argv, capsys)
    assert code == 2 and flag in err


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 0.0, "b": 0.5}))
    _, out, _ = run(["dof", "--config", str(cfg)], capsys)
    assert out.splitlines()[-1] == "no strict gain"
    _, out, _ = run(["dof", "--config", str(cfg), "--alpha", "0.5"], capsys)
    assert out.splitlines()[-1] == "strict gain: users 1,2"


def test_dof_json(tmp_path, capsys):
    run(["dof", "--out", str(tmp_path), "--format", "json"], capsys)
    data = json.loads((tmp_path / "dof.json").read_text())
    assert data["pp"] == [0.5, 0.5, 0.5] and data["strict_gain_users"] == [1, 2]


def test_region_files_and_determinism(tmp_path, capsys):
    argv = ["region", "--m", "2", "--k", "3", "--alpha", "0.5", "--format", "csv,json,svg"]
    run(argv + ["--out", str(tmp_path / "a")], capsys)
    run(argv + ["--out", str(tmp_path / "b")], capsys)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["region.json", "region.svg", "region_halfspaces.csv", "region_vertices.csv",
                     "tp_halfspaces.csv", "tp_vertices.csv"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    verts = (tmp_path / "a" / "region_vertices.csv").read_text().splitlines()
    assert {"A,0.5,0.5,0.5", "B,1,0.5,0", "C,0.5,1,0"} <= set(verts)
    data = json.loads((tmp_path / "a" / "region.json").read_text())
    assert data["named_vertices"]["A"] == [0.5, 0.5, 0.5]
    assert [0.5, 0.5, 0.5] not in data["tp_vertices"]


def test_region_svg_needs_k3(tmp_path, capsys):
    code, _, err = run(["region", "--k", "4", "--format", "svg", "--out", str(tmp_path)], capsys)
    assert code == 1 and "k = 3" in err


def test_sweep_fig3_rows(tmp_path, capsys):
    code, _, _ = run(["sweep", "--fig3", "--alpha", "0.5", "--b", "0.5", "--offsets", "-10,-20",
                      "--snr", "5:35:5", "--trials", "200", "--seed", "7",
                      "--out", str(tmp_path), "--format", "csv,svg,json"], capsys)
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == ("snr_db,scheme,offset_db,rate_u1,rate_u2,rate_u3,sum_rate_kalpha,"
                        "stderr,p0,calibrated")
    assert len(lines) == 1 + 2 * 2 * 7
    assert (tmp_path / "sweep.svg").exists()
    assert len(json.loads((tmp_path / "sweep.json").read_text())["rows"]) == 28


def test_sweep_seed_from_env(monkeypatch, capsys):
    argv = ["sweep", "--scheme", "tp", "--snr", "10:20:10", "--offsets", "0", "--trials", "50"]
    monkeypatch.setenv("MISOBC_SEED", "3")
    _, env_out, _ = run(argv, capsys)
    _, flag_out, _ = run(argv + ["--seed", "3"], capsys)
    _, other, _ = run(argv + ["--seed", "4"], capsys)
    assert env_out == flag_out != other
    assert len(env_out.splitlines()) == 3


def test_certify_vertex(capsys):
    code, out, _ = run(["certify", "--point", "0.5,0.5,0.5"], capsys)
    assert code == 0 and "beta = 0.5" in out and "common shares = (0, 0)" in out


def test_certify_subset_json(capsys):
    _, out, _ = run(["certify", "--point", "1,0.5,0", "--subset", "1,2", "--format", "json"], capsys)
    cert = json.loads(out)["certificate"]
    assert cert["beta"] == 1.0 and cert["common_shares"] == [0.5, 0.0]


def test_certify_outside(capsys):
    code, _, err = run(["certify", "--point", "1,1,0", "--alpha", "0.5"], capsys)
    assert code == 1 and "S={1,2}" in err


def test_certify_decomposition(capsys):
    _, out, _ = run(["certify", "--point", "0.75,0.5,0.25"], capsys)
    assert "weight 0.5 x A (0.5, 0.5, 0.5)" in out
    assert "weight 0.5 x B (1, 0.5, 0)" in out


def test_certify_bad_subset_is_runtime_error(capsys):
    code, _, err = run(["certify", "--point", "0.5,0.5,0.5", "--subset", "1", "--alpha", "0.5"], capsys)
    assert code == 0
    code, _, err = run(["certify", "--point", "0.1,0.1,0.1", "--subset", "1,2"], capsys)
    assert code == 1 and "not tight" in err


def test_snr_grid():
    assert parse_snr_grid("5:35:5") == [5, 10, 15, 20, 25, 30, 35]
    assert parse_snr_grid("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1.0]
    assert parse_snr_grid("10,20") == [10, 20]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "misobc.cli", "dof"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("TP (")
