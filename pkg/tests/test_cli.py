import json
import subprocess
import sys
from io import StringIO

import jsonschema
import numpy as np
import pytest

from coulomb_extremes import io
from coulomb_extremes.cli import main


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _kv(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


def test_edges_gauss(capsys):
    code, out, _ = _run(["edges", "--potential", "gauss"], capsys)
    assert code == 0
    kv = _kv(out)
    assert float(kv["a_minus"]) == 0.0 and float(kv["a_plus"]) == pytest.approx(1.0, abs=1e-12)
    assert kv["topology"] == "Disk"


def test_edges_annulus_json(capsys):
    code, out, _ = _run(["edges", "--potential", "halfquadlin:-1", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, io.load_schema())
    assert doc["a_minus"] == pytest.approx(1.0, abs=1e-10)
    assert doc["a_plus"] == pytest.approx(2.0, abs=1e-10)
    assert doc["f_minus"] == pytest.approx(1.0, abs=1e-10)
    assert doc["topology"] == "Annulus"


def test_edges_quadlin_disk(capsys):
    code, out, _ = _run(["edges", "--potential", "quadlin:1"], capsys)
    assert code == 0 and _kv(out)["topology"] == "Disk"


@pytest.mark.parametrize("args", [
    ["edges", "--potential", "poly:0,0,0"],
    ["edges", "--potential", "nonsense"],
    ["cdf", "--potential", "gauss", "--N", "2"],
    ["cdf", "--potential", "gauss", "--N", "100", "--edge", "inner"],
    ["cdf", "--potential", "gauss", "--N", "10", "--points", "1"],
])
def test_bad_input_exit_code(args, capsys):
    code, _, err = _run(args, capsys)
    assert code == 2
    assert err


def test_small_n_with_raw_y(capsys):
    code, out, _ = _run(["cdf", "--potential", "gauss", "--N", "2", "--raw-y",
                         "--ymin", "0", "--ymax", "1", "--points", "2"], capsys)
    assert code == 0
    t = io.read_csv(StringIO(out))
    assert t.column("F_exact")[-1] == pytest.approx(0.5136057837197515, rel=1e-14)


def test_cdf_with_asymptotics_roundtrip(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, _, _ = _run(["cdf", "--potential", "gauss", "--N", "1000", "--points", "31",
                       "--with-asymptotics", "--out", str(path)], capsys)
    assert code == 0
    text = path.read_text()
    t = io.read_csv(open(path))
    assert t.columns == ["Y", "y", "F_exact", "F_gumbel", "F_phi"]
    assert t.meta["N"] == "1000" and t.meta["potential"] == "gauss"
    assert "version" in t.meta
    buf = StringIO()
    io.write_csv(t, buf)
    assert buf.getvalue() == text
    F = t.column("F_exact")
    assert np.all(np.diff(F) >= 0)


def test_cdf_json_schema(capsys):
    code, out, _ = _run(["cdf", "--potential", "cubic:0.3333333333", "--N", "30", "--points", "5",
                         "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, io.load_schema())
    assert doc["meta"]["method"] == "quadrature"


def test_inner_cdf_command(capsys):
    code, out, _ = _run(["cdf", "--potential", "halfquadlin:-1", "--N", "60", "--edge", "inner",
                         "--points", "5"], capsys)
    assert code == 0
    t = io.read_csv(StringIO(out))
    assert np.all(np.diff(t.column("F_exact")) >= 0)  # in Y, the inner CDF increases


def test_tail_only_labeled(capsys):
    code, out, _ = _run(["cdf", "--potential", "gauss", "--N", "500", "--points", "3",
                         "--tail-only", "50"], capsys)
    t = io.read_csv(StringIO(out))
    assert t.meta["approximate"] == "true" and t.meta["tail_only"] == "50"


def test_compare_reports(capsys):
    code, out, err = _run(["compare", "--potential", "gauss", "--N", "100", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, io.load_schema())
    s = doc["summary"]
    assert s["exact_vs_gumbel"]["sup"] > s["exact_vs_phi"]["sup"]
    assert "exact_vs_phi" in err


def test_sample_kostlan_compare(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, stdout, _ = _run(["sample", "--potential", "gauss", "--N", "200", "--m", "1000",
                            "--method", "kostlan", "--compare", "--out", str(out)], capsys)
    assert code == 0
    ks = float(stdout.strip().split()[-1])
    assert ks < 0.06
    assert (tmp_path / "s.ecdf.csv").exists()


def test_sample_deterministic(tmp_path, capsys):
    args = ["sample", "--seed", "7", "--stream", "0", "--potential", "cubic:0.3333333333",
            "--N", "30", "--m", "200", "--method", "invcdf"]
    for name in ("a", "b"):
        assert _run(args + ["--out", str(tmp_path / f"{name}.csv")], capsys)[0] == 0
    for suffix in (".csv", ".ecdf.csv"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


def test_sample_metropolis_histogram(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _, _ = _run(["sample", "--potential", "quadlin:-1", "--N", "20", "--method", "metropolis",
                       "--sweeps", "100", "--burn-in", "50", "--thin", "10", "--out", str(out)], capsys)
    assert code == 0
    hist = io.read_csv(open(tmp_path / "m.hist.csv"))
    assert hist.columns == ["r_lo", "r_hi", "mass"]
    assert hist.column("mass").sum() == pytest.approx(1.0)


def test_kostlan_requires_gauss(capsys):
    code, _, err = _run(["sample", "--potential", "cubic:1", "--N", "10", "--method", "kostlan",
                         "--out", "-"], capsys)
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "coulomb_extremes", "edges", "--potential", "gauss"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "topology=Disk" in res.stdout
