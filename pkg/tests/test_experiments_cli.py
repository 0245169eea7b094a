import csv
import io
import subprocess
import sys

import pytest

from streamcut.cli import main
from streamcut.experiments import ECHO_FIELDS, ExperimentConfig, run_experiment
from streamcut.formats import read_edge_list, read_stream

SMALL_RUNS = {
    "gap": ["--n", "8", "--trials", "5"],
    "cycles": ["--n", "500", "--alpha", "0.5", "--trials", "200"],
    "ordering": ["--n", "60", "--alpha", "0.1", "--trials", "10"],
    "fourier": ["--n", "6", "--trials", "10"],
    "advantage": ["--trials", "300"],
    "bhh": ["--n", "24", "--t", "2,3", "--trials", "20"],
    "iid": ["--n", "200", "--alpha", "0.1,0.2", "--trials", "20"],
    "stream": ["--n", "12", "--alg", "edge-count"],
}


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("command", sorted(SMALL_RUNS))
def test_command_csv_is_deterministic_and_echoes_config(command, tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"{command}-{i}.csv"
        code = main([command, "--seed", "3", "--out", str(path), *SMALL_RUNS[command]])
        assert code in (0, 1)
        outs.append(path.read_text())
    assert outs[0] == outs[1]
    rows = _rows(outs[0])
    assert rows
    assert list(rows[0])[: len(ECHO_FIELDS)] == ECHO_FIELDS
    assert all(r["command"] == command and r["seed"] == "3" for r in rows)


def test_different_seeds_change_output():
    a = run_experiment(ExperimentConfig("bhh", n=24, t=(2,), trials=5, seed=1)).to_csv()
    b = run_experiment(ExperimentConfig("bhh", n=24, t=(2,), trials=5, seed=2)).to_csv()
    assert a != b


def test_gen_writes_identical_files_for_same_seed(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["gen", "--n", "20", "--seed", "9", "--out", str(first)]) == 0
    assert main(["gen", "--n", "20", "--seed", "9", "--out", str(second)]) == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert {"instance-yes.txt", "instance-no.txt", "stream-yes-canonical.txt", "stream-no-uniform.txt"} <= set(names)
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()
    G = read_edge_list(first / "instance-yes.txt")
    s = read_stream(first / "stream-yes-canonical.txt")
    assert G.n == s.n == 20 and len(s) >= G.m


def test_stream_command_reads_a_file(tmp_path, capsys):
    assert main(["gen", "--n", "10", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    code = main(["stream", "--input", str(tmp_path / "stream-no-uniform.txt"), "--alg", "edge-count"])
    rows = _rows(capsys.readouterr().out)
    assert code == 0 and len(rows) == 1 and rows[0]["within_bounds"] == "1"


def test_bad_input_exits_with_two(capsys):
    assert main(["bhh", "--n", "-3"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["stream", "--input", "/nonexistent/stream.txt"]) == 2


def test_unknown_command_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2


def test_failed_contract_exits_with_one(capsys):
    # too few cycle trials at tiny alpha: the 30% contract cannot be met
    code = main(["cycles", "--n", "2000", "--alpha", "0.05", "--trials", "1"])
    err = capsys.readouterr().err
    assert code in (0, 1)
    assert (code == 1) == ("contract failed" in err)


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "streamcut.cli", "bhh", "--n", "12", "--t", "2", "--trials", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith(",".join(ECHO_FIELDS))
