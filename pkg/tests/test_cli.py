import pytest

from abelcycles.cli import fmt, main, parse_config_text, read_table_csv
from abelcycles.detection import default_grid, detection_curve
from abelcycles.hamiltonian import SystemParams


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_singular(capsys):
    code, out, _ = run(capsys, "singular", "--a", "0.3333333333", "--b", "0.5")
    assert code == 0
    assert "C1, 1.732051, 0, saddle, 3.000000" in out.splitlines()
    assert out.count("center") == 5 and out.count("saddle") == 4


def test_singular_bad_params(capsys):
    assert run(capsys, "singular", "--a", "0.5", "--b", "0.3")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "table")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--h", "2")
    assert code == 0 and "Gamma1,Gamma2" in out and "heteroclinic" in out


def test_table_gamma2(tmp_path, capsys):
    path = tmp_path / "t2.csv"
    assert run(capsys, "--n", "10", "table", "--family", "2", "--out", str(path))[0] == 0
    text = path.read_bytes().decode()
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == "h,cu,cv,area"
    h, cu, cv, _ = map(float, lines[2].split(","))
    assert h == 0.01
    assert (cu, cv) == pytest.approx((-0.001875, -0.001876), abs=5e-6)


def test_table_rho_omega_units(capsys):
    code, out, _ = run(capsys, "curve", "--family", "4", "--paper-scale", "--n", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "h,cu_rho,cv_omega"
    h, cu, cv = map(float, lines[-1].split(","))
    assert h == 8.2 and cu == pytest.approx(1.6041, abs=1e-4)


def test_table_out_of_range(capsys):
    code, _, err = run(capsys, "table", "--family", "3", "--h-start", "1.5", "--h-end", "2.5", "--step", "0.5")
    assert code == 2 and "(2, 3)" in err


def test_csv_round_trip(tmp_path, capsys):
    path = tmp_path / "t.csv"
    run(capsys, "table", "--family", "3", "--out", str(path))
    rows = read_table_csv(path.read_text())
    p = SystemParams()
    curve = detection_curve(3, default_grid(3, p), p)
    assert [(r[0], r[1], r[2]) for r in rows] == [(s.h, s.cu, s.cv) for s in curve.samples]


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(-0.0) == "0"
    assert fmt(2.0) == "2"
    x = 1 / 3
    assert float(fmt(x)) == x


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# model\na = 0.25\nb = 0.5  # saddle at 2\n")
    code, out, _ = run(capsys, "--config", str(cfg), "singular")
    assert code == 0 and "C1, 2, 0, saddle, 4.000000" in out
    code, out, _ = run(capsys, "--config", str(cfg), "singular", "--a", "0.3333333333")
    assert "C1, 1.732051, 0" in out


def test_config_errors():
    with pytest.raises(Exception):
        parse_config_text("a 0.3\n")
    with pytest.raises(Exception):
        parse_config_text("colour = 3\n")
    assert parse_config_text("n = 10\n\n# x\n") == {"n": 10}


def test_bands(tmp_path, capsys):
    path = tmp_path / "bands.txt"
    assert run(capsys, "bands", "--out", str(path))[0] == 0
    blocks = [b for b in path.read_text().split("\n\n") if b.strip()]
    totals = [int(line.split(": ")[1]) for b in blocks for line in b.splitlines() if line.startswith("total")]
    i = totals.index(4)
    assert totals[i + 1] == 5
    thirteen = next(b for b in blocks if "total: 13" in b)
    assert "Gamma4: 2x4" in thirteen and "Gamma3: 2x2" in thirteen and "Gamma1: 1x1" in thirteen


def test_bands_degenerate(capsys):
    assert run(capsys, "--u", "0", "--v", "0", "bands")[0] == 4


def test_distribution(capsys):
    code, out, _ = run(capsys, "distribution", "--lambda", "289.5")
    assert code == 0 and "total: 13" in out


def test_verify(capsys):
    lam = "-0.37325981627337074"  # lambda_1(0.5) at degree 4, default u and v
    code, out, _ = run(capsys, "--n", "4", "verify", "--lambda", lam, "--family", "1")
    assert code == 0 and "result: verified" in out
    code, out, _ = run(capsys, "verify", "--lambda", "1e6")
    assert code == 0 and "no findings" in out
    code, _, err = run(capsys, "verify", "--lambda", "1", "--epsilon", "0")
    assert code == 2 and "degenerate" in err


def test_abelian(capsys):
    code, out, _ = run(capsys, "abelian", "--family", "1", "--h", "0.5", "--lambda", "0")
    assert code == 0 and float(out) > 0
    assert run(capsys, "abelian", "--family", "3", "--h", "0.5", "--lambda", "0")[0] == 2
