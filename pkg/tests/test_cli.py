import csv
import subprocess
import sys
from pathlib import Path

import pytest

from gfkmc.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

HYDROGEN = """\
[run]
schema = 1
mode = atom
seed = 3
[system]
trial = hydrogenic
z = 1
[paths]
stepsize = 1/30
total_time = 2
record_every = 15
n_paths = 64
[observables]
list = {obs}
"""

BAD_TRIAL = """\
spin = udu
3 1.2 1.2 0.3 1.0 2.0 -7.0
1 0 0 0 0 0 0
"""


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _tree(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_atom_run_writes_tables(tmp_path):
    cfg = _write(tmp_path, HYDROGEN.format(obs="r_i, r_i^2"))
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    rows = _read(tmp_path / "o" / "properties.csv")
    assert rows[0] == ["time", "source", "energy", "energy_err", "r_i", "r_i_err", "r_i^2", "r_i^2_err"]
    assert len(rows) == 1 + 4
    for r in rows[1:]:
        assert float(r[2]) == pytest.approx(-0.5, abs=1e-12)
        assert float(r[3]) == pytest.approx(0.0, abs=1e-12)
    summary = {r[0]: r for r in _read(tmp_path / "o" / "summary.csv")[1:]}
    assert summary["e0"][3] == "trial"
    assert "E_inf" not in summary  # zero errors: no weighted fit
    table = (tmp_path / "o" / "properties_table.txt").read_text().splitlines()
    assert table[0].split() == ["t", "E", "r_i", "r_i^2"]


def test_energy_only_atom_run(tmp_path):
    cfg = _write(tmp_path, HYDROGEN.format(obs=""))
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    assert _read(tmp_path / "properties.csv")[0] == ["time", "source", "energy", "energy_err"]
    assert (tmp_path / "properties_table.txt").read_text().split("\n")[0].split() == ["t", "E"]


def test_outputs_independent_of_workers_and_repeat(tmp_path):
    cfg = _write(tmp_path, HYDROGEN.format(obs="r_i"))
    for tag, w in (("a", "1"), ("b", "2"), ("c", "1")):
        assert main(["--config", str(cfg), "--workers", w, "--out-dir", str(tmp_path / tag)]) == 0
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b") == _tree(tmp_path / "c")


def test_seed_override_changes_thermo_output(tmp_path):
    cfg = _write(tmp_path, "[run]\nschema = 1\nmode = thermo\nseed = 1\n"
                           "[thermo]\ntemperature = 2\nn_paths = 500\n")
    main(["--config", str(cfg), "--out-dir", str(tmp_path / "a")])
    main(["--config", str(cfg), "--out-dir", str(tmp_path / "b"), "--seed", "2"])
    main(["--config", str(cfg), "--out-dir", str(tmp_path / "c"), "--seed", "1"])
    a, b, c = (_tree(tmp_path / t) for t in "abc")
    assert a == c and a != b
    header = _read(tmp_path / "a" / "thermo.csv")[0]
    assert header[:3] == ["temperature", "beta", "quantity"]


def test_thermo_plot_files(tmp_path):
    cfg = _write(tmp_path, "[run]\nschema = 1\nmode = thermo\nseed = 1\n"
                           "[thermo]\ntemperature = 1\nn_paths = 500\nbins = 20\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path), "--emit-plots"]) == 0
    assert len(_read(tmp_path / "density.csv")) == 1 + 2 * 20
    assert len(_read(tmp_path / "trace_T1.csv")) == 1 + 30


@pytest.mark.parametrize("temps,h,rows", [("0.125, 1", "1/30", {"0.125": 240, "1": 30}),
                                          ("2", "0.5", {"2": 1})])
def test_trace_mode_row_counts(tmp_path, temps, h, rows):
    cfg = _write(tmp_path, f"[run]\nschema = 1\nmode = trace\nseed = 7\n"
                           f"[thermo]\ntemperatures = {temps}\nstepsize = {h}\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    for T, n in rows.items():
        assert len(_read(tmp_path / f"trace_T{T}.csv")) == 1 + n


def test_sweep_mode_with_reference(tmp_path):
    (tmp_path / "ref.csv").write_text("temperature,value\n2,2.42\n")
    cfg = _write(tmp_path, "[run]\nschema = 1\nmode = sweep\nseed = 2\n"
                           "[thermo]\ntemperatures = 2, 1\nn_oscillators = 10\nn_paths = 400\n"
                           "[output]\nreference = ref.csv\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    body = (tmp_path / "o" / "sweep.csv").read_text()
    assert "2.42" in body


@pytest.mark.parametrize("text", [
    "[run]\nschema = 2\nmode = thermo\n[thermo]\ntemperature = 1\n",
    "[run]\nschema = 1\nmode = thermo\n[thermo]\ntemperature = 1\ncolour = red\n",
    "[run]\nschema = 1\nmode = thermo\n[extras]\na = 1\n",
    "[run]\nschema = 1\nmode = fly\n",
    "[run]\nschema = 1\nmode = thermo\n[thermo]\ntemperature = warm\n",
    "[run]\nschema = 1\nmode = atom\n[system]\ntrial = missing.txt\n",
    "[run]\nschema = 1\nmode = atom\n[system]\ntrial = hydrogenic\n"
    "[paths]\nstepsize = 0.3\ntotal_time = 1\n",
    "not an ini file",
    "[run]\nschema = 1\nmode = thermo\n[thermo]\ntemperature = 1\nkernel = lattice\n",
])
def test_bad_configs_exit_2(tmp_path, text, capsys):
    cfg = _write(tmp_path, text)
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
    assert "gfkmc: error:" in capsys.readouterr().err


def test_argument_errors_exit_2(tmp_path):
    assert main([]) == 2
    assert main(["--config", "x.ini", "--seed", "-1"]) == 2
    assert main(["--config", str(tmp_path / "absent.ini")]) == 2


def test_degenerate_weights_exit_3(tmp_path):
    (tmp_path / "bad.txt").write_text(BAD_TRIAL)
    cfg = _write(tmp_path, "[run]\nschema = 1\nmode = atom\nseed = 1\n[system]\ntrial = bad.txt\n"
                           "[paths]\nstepsize = 1/30\ntotal_time = 10\nrecord_every = 150\nn_paths = 24\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 3


def test_unwritable_output_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = _write(tmp_path, HYDROGEN.format(obs=""))
    assert main(["--config", str(cfg), "--out-dir", str(blocker / "sub")]) == 4
    assert main(["--config", str(cfg), "--out-dir", str(blocker)]) == 4


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, HYDROGEN.format(obs=""))
    res = subprocess.run([sys.executable, "-m", "gfkmc", "--config", str(cfg), "--out-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "summary.csv" in res.stdout


@pytest.mark.parametrize("name", ["thermo_T2.ini", "trace.ini", "atom_hydrogen.ini"])
def test_shipped_configs_run(tmp_path, name):
    assert main(["--config", str(CONFIGS / name), "--out-dir", str(tmp_path)]) == 0
