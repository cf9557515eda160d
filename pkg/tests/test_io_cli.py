import csv
import json
import struct

import numpy as np
import pytest

from conftest import gaussian, smooth_random
from gzk.cli import EXIT_FAIL, EXIT_GUARD, EXIT_INVALID, EXIT_OK, main, sweep
from gzk.experiments import parse_config
from gzk.grid import Field, forward, make_grid
from gzk.io import field_from_bytes, field_to_bytes, load_field, load_trajectory, save_field, save_trajectory
from gzk.norms import Trajectory
from gzk.report import NormReport


def test_field_round_trip(tmp_path, rng):
    g = make_grid(16, 32, 3.5, 7.25)
    for f in (smooth_random(g, rng, cplx=True), forward(gaussian(g, sigma=0.5))):
        save_field(f, tmp_path / "f.gzkf")
        back = load_field(tmp_path / "f.gzkf")
        assert back.grid == f.grid and back.kind == f.kind
        assert np.array_equal(back.values, f.values)


def test_field_layout():
    g = make_grid(8, 16, 1.0, 2.0)
    v = np.arange(g.nx * g.ny).reshape(g.shape).astype(complex)
    buf = field_to_bytes(Field(g, v, "spectral"))
    assert buf[:4] == b"GZKF"
    assert struct.unpack_from("<HBBIIdd", buf, 4) == (1, 1, 0, 8, 16, 1.0, 2.0)
    assert len(buf) == 32 + 16 * 128
    # row-major with x slow: entry (0, 1) comes second
    assert struct.unpack_from("<dd", buf, 32 + 16) == (1.0, 0.0)
    with pytest.raises(ValueError):
        field_from_bytes(b"XXXX" + buf[4:])
    with pytest.raises(ValueError):
        field_from_bytes(buf[:-16])


def test_trajectory_checkpoint(tmp_path, rng):
    g = make_grid(8, 8, 2, 2)
    data = rng.standard_normal((3,) + g.shape)
    traj = Trajectory(g, [0.0, 0.5, 1.0], data)
    man = save_trajectory(traj, tmp_path / "ck", "abc123")
    m = json.loads(man.read_text())
    assert m["times"] == [0.0, 0.5, 1.0] and m["config_hash"] == "abc123" and len(m["fields"]) == 3
    back, h = load_trajectory(tmp_path / "ck")
    assert h == "abc123" and np.array_equal(np.asarray(back.data).real, data)


def test_report_round_trips():
    rep = NormReport({"a@t=0.1": 1.25, "b": 1e-300, "c": float("inf")}, {"t": 0.5, "grid": [8, 8]}, {"c"})
    for back in (NormReport.from_text(rep.to_text()), NormReport.from_json(rep.to_json())):
        assert back.values == rep.values and back.meta == rep.meta and back.flagged == {"c"}
    with pytest.raises(ValueError):
        NormReport({"c": float("nan")})


def test_config_parsing_and_hash():
    a = parse_config("[grid]\nnx = 64\n")
    b = parse_config("[grid]\nnx=64\n[weights]\nr1 = 0.5\n")
    assert a.hash() == b.hash() and len(a.hash()) == 12
    assert parse_config("[grid]\nnx = 128\n").hash() != a.hash()
    with pytest.raises(ValueError):
        parse_config("[weights]\nr1 = 1.2\n")


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


SMALL = "[grid]\nnx = 64\nny = 64\nlx = 20\nly = 20\n[run]\ntimes = 0.1\n"


def _table(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_cli_commutator_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "c.ini", SMALL)
    out = tmp_path / "out"
    assert main(["commutator", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    rows = _table(out / "commutator.table.csv")
    h = parse_config(SMALL, overrides={"experiment.name": "commutator"}).hash()
    assert rows[0][0] == "config_hash" and all(r[0] == h for r in rows[1:])
    text = (out / "commutator.report.txt").read_text()
    assert NormReport.from_text(text)["residual_x@t=0.1"] < 1e-4
    first = (out / "commutator.table.csv").read_bytes()
    main(["commutator", "--config", str(cfg), "--out", str(out)])
    assert (out / "commutator.table.csv").read_bytes() == first


def test_cli_exit_codes(tmp_path):
    bad = _write(tmp_path, "bad.ini", "[weights]\nr1 = 1.2\n")
    assert main(["commutator", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["commutator", "--config", str(tmp_path / "missing.ini")]) == EXIT_INVALID
    wide = _write(tmp_path, "w.ini", SMALL + "[data]\nsigma = 5\n")
    assert main(["commutator", "--config", str(wide), "--out", str(tmp_path)]) == EXIT_GUARD
    strict = _write(tmp_path, "s.ini", SMALL.replace("[run]\n", "[run]\ntolerance = 1e-30\n"))
    assert main(["commutator", "--config", str(strict), "--out", str(tmp_path)]) == EXIT_FAIL
    assert main(["commutator", "--config", str(strict), "--out", str(tmp_path), "--seed", "-1"]) == EXIT_INVALID


def test_cli_zero_data_persistence(tmp_path):
    cfg = _write(tmp_path, "z.ini", SMALL + "[data]\nkind = zero\n[solver]\nsteps = 4\n")
    out = tmp_path / "o"
    assert main(["persistence", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    rows = _table(out / "persistence.table.csv")[1:]
    assert rows and all(float(x) == 0.0 for r in rows for x in r[2:])


def test_sweep_table(monkeypatch):
    monkeypatch.setenv("GZK_THREADS", "2")
    cols, rows, status = sweep(SMALL, "[sweep]\nt = 0.1, 0.2\nresolution = 64, 128\n")
    assert status == EXIT_OK
    assert "param:t" in cols and "param:resolution" in cols
    body = [r for r in rows if r[0] == "row"]
    assert len(body) == 8 and all(r[1] for r in body)
    fits = [r[cols.index("fit")] for r in rows if r[0] == "summary"]
    assert any(f.startswith("slope_phi_norm") for f in fits)
    with pytest.raises(ValueError):
        sweep(SMALL, "[other]\nt = 1\n")


def test_single_point_sweep_equals_run():
    from gzk.experiments import run_experiment

    cols, rows, status = sweep(SMALL, "[sweep]\nt = 0.1\n")
    run = run_experiment(parse_config(SMALL))
    body = [r for r in rows if r[0] == "row"]
    start = cols.index("param:t") + 1
    assert status == EXIT_OK and [r[start:-1] for r in body] == run.rows


def test_sweep_flags_failed_rows():
    cols, rows, status = sweep(SMALL, "[sweep]\nr1 = 0.5, 1.2\n")
    assert status == EXIT_INVALID
    st = {r[cols.index("param:r1")]: r[cols.index("status")] for r in rows if r[0] == "row"}
    assert st["0.5"] == EXIT_OK and st["1.2"] == EXIT_INVALID
    bad = [r for r in rows if r[0] == "row" and r[cols.index("param:r1")] == "1.2"][0]
    assert "r in (0,1)" in bad[cols.index("message")]
