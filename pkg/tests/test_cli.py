import csv
import io
import json

from conftest import MIXTURE_ORIGIN
from wigtomo.cli import main
from wigtomo.io import DISTANCE_HEADER, read_coefficients, read_dataset, read_grid, read_table, sidecar_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    header, row = csv.reader(io.StringIO(text))
    return dict(zip(header, row))


def test_generate_vacuum(tmp_path, capsys):
    out = tmp_path / "vac.csv"
    code, text, _ = run(capsys, "generate", "--state", "vacuum", "--J", 10, "--seed", 1, "--out", out)
    assert code == 0 and "10 samples" in text
    assert len(out.read_text().splitlines()) == 11
    meta = json.loads(sidecar_path(out).read_text())
    assert meta["J"] == 10 and meta["seed"] == 1 and meta["source"] == "fock_mixture:0=1.0"


def test_generate_twice_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "generate", "--state", "thermal:nbar=1", "--J", "1e3", "--seed", 5, "--out", path)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert read_dataset(a).J == 1000


def test_generate_rejects_bad_spec(tmp_path, capsys):
    code, _, err = run(capsys, "generate", "--state", "thermal:nbar=x", "--J", 10, "--out", tmp_path / "x.csv")
    assert code == 2 and "cannot parse state spec" in err
    assert run(capsys, "generate", "--state", "vacuum", "--J", 0, "--out", tmp_path / "x.csv")[0] == 2


def test_reconstruct_mixture_pse(tmp_path, capsys):
    data = tmp_path / "mix.csv"
    run(capsys, "generate", "--state", "mixture", "--J", "3.2e5", "--seed", 7, "--out", data)
    out = tmp_path / "w.csv"
    args = ["reconstruct", "--data", data, "--algo", "pse", "--N", 8, "--M", 30, "--L", "auto", "--grid", "-1:1:3", "--out", out]
    code, text, _ = run(capsys, *args)
    assert code == 0 and "W(0,0)" in text
    grid, meta = read_grid(out)
    node = grid.node(0.0, 0.0)
    assert abs(grid.w[node] - MIXTURE_ORIGIN) < 3 * grid.sigma[node]
    assert meta["algorithm"] == "pse(N=8,M=30,L=auto)" and meta["J"] == 320_000
    table, _ = read_coefficients(tmp_path / "w_coefficients.csv")
    assert (table.N, table.M, table.J) == (8, 30, 320_000)
    first = out.read_bytes()
    assert run(capsys, *args)[0] == 0
    assert out.read_bytes() == first


def test_reconstruct_fbp_and_negative_grid_values(tmp_path, capsys):
    data = tmp_path / "d.csv"
    run(capsys, "generate", "--state", "mixture", "--J", 500, "--out", data)
    out = tmp_path / "f.csv"
    assert run(capsys, "reconstruct", "--data", data, "--algo", "fbp", "--kc", 8, "--grid", "-2:2:5", "--out", out)[0] == 0
    grid, _ = read_grid(out)
    assert grid.w.shape == (5, 5)
    code, _, err = run(capsys, "reconstruct", "--data", data, "--algo", "fbp", "--kc", 0, "--out", out)
    assert code == 2 and "k_c" in err
    assert run(capsys, "reconstruct", "--data", data, "--algo", "fbp", "--kc", -1, "--out", out)[0] == 2
    assert run(capsys, "reconstruct", "--data", data, "--algo", "wavelet", "--out", out)[0] == 2
    assert run(capsys, "reconstruct", "--data", data, "--grid", "1:2", "--out", out)[0] == 2


def test_reconstruct_missing_or_mismatched_data(tmp_path, capsys):
    out = tmp_path / "o.csv"
    assert run(capsys, "reconstruct", "--data", tmp_path / "none.csv", "--out", out)[0] == 3
    data = tmp_path / "d.csv"
    run(capsys, "generate", "--state", "vacuum", "--J", 20, "--out", data)
    code, _, err = run(capsys, "reconstruct", "--data", data, "--scheme", "half", "--out", out)
    assert code == 3 and "declares" in err


def test_error_direct_on_two_points(tmp_path, capsys):
    data = tmp_path / "two.csv"
    data.write_text("theta,x\n0.2,0.1\n2.0,-0.4\n")
    for algo in ("fbp", "pse"):
        code, text, _ = run(capsys, "error", "--mode", "direct", "--data", data, "--algo", algo, "--M", 4)
        assert code == 0
        fields = report(text)
        assert fields["mode"] == "direct" and fields["J"] == "2"
        assert fields["sigma"] not in ("nan", "inf")


def test_error_mc_report_columns(tmp_path, capsys):
    out = tmp_path / "err.csv"
    args = ["error", "--mode", "mc", "--state", "thermal", "--J", "1e4", "--K", 100, "--algo", "pse", "--M", 20, "--out", out]
    code, text, _ = run(capsys, *args)
    assert code == 0
    fields = report(text)
    assert float(fields["mc_sigma"]) > 0 and float(fields["mean_reported_sigma"]) > 0
    assert fields["K"] == "100"
    rows = read_table(out, list(fields))
    assert len(rows) == 1


def test_error_mode_requirements(tmp_path, capsys):
    data = tmp_path / "d.csv"
    run(capsys, "generate", "--state", "vacuum", "--J", 200, "--out", data)
    code, _, err = run(capsys, "error", "--mode", "bootstrap", "--data", data, "--K", 1)
    assert code == 2 and "K" in err
    assert run(capsys, "error", "--mode", "bootstrap", "--data", data, "--K", 5, "--algo", "fbp")[0] == 0
    assert run(capsys, "error", "--mode", "mc", "--data", data)[0] == 2
    assert run(capsys, "error", "--mode", "direct")[0] == 2
    code, text, _ = run(capsys, "error", "--data", data, "--algo", "fbp", "--point", "-0.5,0.25")
    assert code == 0 and (report(text)["q"], report(text)["p"]) == ("-0.5", "0.25")


def test_distance_table_shape(tmp_path, capsys):
    out = tmp_path / "dist.csv"
    args = ["distance", "--state", "thermal", "--algo", "pse,fbp", "--N", 4, "--M", 10, "--J", "200,400,800"]
    args += ["--replicas", 10, "--h", 0.5, "--out", out]
    code, text, _ = run(capsys, *args)
    assert code == 0 and len(text.splitlines()) == 6
    rows = read_table(out, DISTANCE_HEADER)
    assert [r[0] for r in rows] == ["pse(N=4,M=10,L=auto)"] * 3 + ["fbp(k_c=8)"] * 3
    assert all(int(r[2]) == 10 for r in rows)
    first = out.read_bytes()
    run(capsys, *args)
    assert out.read_bytes() == first
    assert run(capsys, "distance", "--state", "thermal", "--J", "400,200", "--out", out)[0] == 2
    assert run(capsys, "distance", "--state", "thermal", "--K", 1, "--out", out)[0] == 2


def test_identity_check_passes(capsys):
    code, text, _ = run(capsys, "identity-check")
    assert code == 0
    assert len(text.splitlines()) == 6 and all(line.startswith("PASS") for line in text.splitlines())


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "generate", "--state", "vacuum")[0] == 2
    assert run(capsys, "--version")[0] == 0
