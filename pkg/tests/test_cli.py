import json

import pytest

from simplexmoments.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert "truncated octahedron\td=3\tvertices=24 *" in out


def test_even_moment(capsys):
    assert run(capsys, "even-moment", "T2", "-k", "2")[:2] == (0, "1/72\n")
    assert run(capsys, "even-moment", "tesseract", "-k", "2")[0] == 0


def test_even_moment_rejects_odd_order(capsys):
    code, _, err = run(capsys, "even-moment", "T3", "-k", "1")
    assert code == 2 and "odd-moment T3 -k 1" in err


def test_capacity_hint(capsys):
    code, _, err = run(capsys, "even-moment", "C4", "-k", "6", "--max-work", "100")
    assert code == 2 and "--max-work" in err


def test_unknown_solid(capsys):
    code, _, err = run(capsys, "configs", "dodecahedron")
    assert code == 2 and err.startswith("error:")


def test_configs_json(capsys):
    code, out, _ = run(capsys, "configs", "O3", "--json")
    assert code == 0
    assert [c["w_C"] for c in json.loads(out)] == [6, 12, 4]


def test_configs_table_shows_notes(capsys):
    code, out, _ = run(capsys, "configs", "T3")
    assert code == 0 and "note:" in out and "total weight 7" in out


def test_genealogy_to_file(capsys, tmp_path):
    target = tmp_path / "o3.dot"
    code, out, _ = run(capsys, "genealogy", "O3", "--dot", str(target))
    assert code == 0 and "3 configurations" in out
    assert target.read_text().startswith("digraph O3 {")


def test_export_and_reload(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "C3")
    path = tmp_path / "cube.json"
    path.write_text(out)
    assert run(capsys, "even-moment", str(path), "-k", "2")[1] == "1/2592\n"


def test_odd_moment_with_reference(capsys):
    code, out, _ = run(capsys, "odd-moment", "T2", "-k", "1", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["total"] == pytest.approx(1 / 12, rel=1e-9)
    assert doc["reference"] == "1/12"


def test_odd_moment_single_configuration(capsys):
    code, out, _ = run(capsys, "odd-moment", "T3", "-k", "1", "--config", "I")
    assert code == 0 and out.startswith("I ") and "reference" not in out
    code, _, err = run(capsys, "odd-moment", "T3", "-k", "1", "--config", "IX")
    assert code == 2 and "known: I, II" in err


def test_odd_moment_telemetry(capsys):
    code, _, err = run(capsys, "odd-moment", "T2", "-k", "3", "--telemetry")
    assert code == 0
    assert all(json.loads(line) for line in err.splitlines())


def test_odd_moment_real_order_refused_in_three_dimensions(capsys):
    code, _, err = run(capsys, "odd-moment", "T3", "-k", "0.5")
    assert code == 2 and "d <= 2" in err


def test_mc(capsys):
    code, out, _ = run(capsys, "mc", "T2", "-n", "2", "-k", "2", "-N", "20000", "--seed", "1", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["N"] == 20000 and doc["seed"] == 1
    assert run(capsys, "mc", "T2", "-n", "2", "-k", "2", "-N", "10")[0] == 2


def test_efron(capsys):
    code, out, _ = run(capsys, "efron", "C3", "-n", "4", "-N", "20000")
    assert code == 0 and out.startswith("mean ")


def test_ball(capsys):
    assert run(capsys, "ball", "-d", "3", "-k", "1")[1] == "9/715\n"
    # Sylvester's disc constant 35/(48 pi^2)
    code, out, _ = run(capsys, "ball", "-d", "2", "-k", "1")
    assert code == 0 and float(out) == pytest.approx(0.0738800297, rel=1e-9)


def test_verify_csv_to_file(capsys, tmp_path):
    target = tmp_path / "mc.csv"
    code, _, _ = run(capsys, "verify", "mc-small", "--format", "csv", "-o", str(target))
    assert code == 0
    assert target.read_text().splitlines()[0].startswith("name,quantity,value")


def test_verify_breach_exits_one(capsys):
    code, out, err = run(capsys, "verify", "configs")
    assert code == 1 and "outside tolerance" in err
    assert json.loads(out)


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "nope")[0] == 2


def test_thread_variable(capsys, monkeypatch):
    monkeypatch.setenv("SIMPLEXMOMENTS_THREADS", "1")
    assert run(capsys, "even-moment", "T2", "-k", "2")[0] == 0
    monkeypatch.setenv("SIMPLEXMOMENTS_THREADS", "many")
    assert run(capsys, "even-moment", "T2", "-k", "2")[0] == 2
