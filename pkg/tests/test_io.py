import json

import numpy as np
import pytest

from wigtomo.analysis import distance_study
from wigtomo.fbp import FbpConfig, fbp_grid
from wigtomo.grid import GridSpec
from wigtomo.io import (
    DISTANCE_HEADER,
    FormatError,
    atomic_write_text,
    read_coefficients,
    read_dataset,
    read_grid,
    read_table,
    sidecar_path,
    write_coefficients,
    write_dataset,
    write_distance_curves,
    write_grid,
)
from wigtomo.pse import PseConfig, estimate_coefficients, pse_grid, pse_origin, pse_origin_sigma
from wigtomo.sampling import sample_dataset


@pytest.fixture
def dataset(mixture):
    return sample_dataset(mixture, 500, seed=17)


def test_dataset_round_trip_is_lossless(tmp_path, dataset):
    path = tmp_path / "d.csv"
    write_dataset(path, dataset, state_spec="mixture")
    back = read_dataset(path)
    assert back.same_values(dataset)
    assert back.seed == 17 and back.source == "mixture"
    meta = json.loads(sidecar_path(path).read_text())
    assert meta["format_version"] == 1 and meta["kind"] == "dataset" and "units" in meta


def test_writes_are_byte_deterministic(tmp_path, dataset):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_dataset(a, dataset)
    write_dataset(b, dataset)
    assert a.read_bytes() == b.read_bytes()
    assert sidecar_path(a).read_bytes() == sidecar_path(b).read_bytes()


def test_bare_csv_is_external_data(tmp_path):
    path = tmp_path / "ext.csv"
    path.write_text("theta,x\n0.5,0.1\n3.0,-0.2\n")
    d = read_dataset(path)
    assert d.source == "external" and d.J == 2 and d.theta_scheme == "uniform_full_circle"
    assert read_dataset(path, theta_scheme="uniform_half_circle").theta_scheme == "uniform_half_circle"


@pytest.mark.parametrize(
    "body",
    [
        "x,theta\n0.1,0.5\n",  # wrong header
        "theta,x\n0.5\n",  # short row
        "theta,x\n0.5,abc\n",  # non-numeric
        "theta,x\n",  # no rows
        "theta,x\n9.0,0.1\n",  # phase outside [0, 2 pi)
    ],
)
def test_malformed_datasets_rejected(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(FormatError):
        read_dataset(path)


def test_sidecar_checks(tmp_path, dataset):
    path = tmp_path / "d.csv"
    write_dataset(path, dataset)
    side = sidecar_path(path)
    meta = json.loads(side.read_text())
    for change in ({"format_version": 2}, {"kind": "grid"}, {"J": 499}):
        side.write_text(json.dumps({**meta, **change}))
        with pytest.raises(FormatError):
            read_dataset(path)
    side.write_text("{not json")
    with pytest.raises(FormatError):
        read_dataset(path)
    side.write_text(json.dumps(meta))
    with pytest.raises(FormatError):
        read_dataset(path, theta_scheme="uniform_half_circle")


def test_missing_file_is_format_error(tmp_path):
    with pytest.raises(FormatError):
        read_dataset(tmp_path / "nope.csv")
    with pytest.raises(FormatError):
        read_grid(tmp_path / "nope.csv")


def test_grid_round_trip(tmp_path, dataset):
    spec = GridSpec.parse("-2:2:9")
    g = fbp_grid(dataset, FbpConfig(8.0), spec)
    path = tmp_path / "g.csv"
    write_grid(path, g, meta={"algorithm": "fbp(k_c=8)"})
    back, meta = read_grid(path)
    assert back.spec == spec and meta["algorithm"] == "fbp(k_c=8)"
    np.testing.assert_array_equal(back.w, g.w)
    np.testing.assert_array_equal(back.sigma, g.sigma)


def test_grid_with_nan_sigma_and_flags(tmp_path, dataset):
    t = estimate_coefficients(dataset, PseConfig(2, 6, 2.0))
    g = pse_grid(t, GridSpec.parse("-3:3:7"))
    path = tmp_path / "g.csv"
    write_grid(path, g)
    back, _ = read_grid(path)
    np.testing.assert_array_equal(back.flags, g.flags)
    np.testing.assert_array_equal(np.isnan(back.sigma), np.isnan(g.sigma))
    lines = path.read_text().splitlines()
    assert lines[0] == "q,p,w,sigma,flags"
    assert len(lines) == 50


def test_grid_row_count_checked(tmp_path, dataset):
    g = fbp_grid(dataset, FbpConfig(8.0), GridSpec.parse("-1:1:3"))
    path = tmp_path / "g.csv"
    write_grid(path, g)
    path.write_text("\n".join(path.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(FormatError):
        read_grid(path)


def test_coefficient_round_trip_keeps_error_propagation(tmp_path, mixture):
    data = sample_dataset(mixture, 3000, seed=2)
    t = estimate_coefficients(data, PseConfig(3, 8))
    path = tmp_path / "c.csv"
    write_coefficients(path, t)
    back, meta = read_coefficients(path)
    np.testing.assert_array_equal(back.w, t.w)
    assert back.L == t.L and back.L_auto and back.excluded == t.excluded
    assert pse_origin(back) == pse_origin(t)
    assert pse_origin_sigma(back) == pytest.approx(pse_origin_sigma(t), rel=1e-12)
    np.testing.assert_allclose(back.variance(), t.variance(), rtol=1e-9)
    assert pse_origin_sigma(back.truncated(M=4)) == pytest.approx(pse_origin_sigma(t.truncated(M=4)), rel=1e-12)


def test_coefficient_rectangle_checked(tmp_path, mixture):
    t = estimate_coefficients(sample_dataset(mixture, 300, seed=1), PseConfig(1, 2))
    path = tmp_path / "c.csv"
    write_coefficients(path, t)
    lines = path.read_text().splitlines()
    lines[1], lines[2] = lines[2], lines[1]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(FormatError):
        read_coefficients(path)


def test_distance_curves_table(tmp_path):
    curves = distance_study("thermal", [PseConfig(2, 4), FbpConfig(8.0)], [200, 400], 2, h=0.5)
    path = tmp_path / "dist.csv"
    write_distance_curves(path, curves)
    rows = read_table(path, DISTANCE_HEADER)
    assert [r[0] for r in rows] == ["pse(N=2,M=4,L=auto)"] * 2 + ["fbp(k_c=8)"] * 2
    assert [int(r[1]) for r in rows] == [200, 400, 200, 400]
    assert float(rows[0][3]) == curves[0].rows[0].mean_d_L2
    meta = json.loads(sidecar_path(path).read_text())
    assert meta["kind"] == "distance" and meta["h"] == 0.5


def test_atomic_write_leaves_no_temporaries(tmp_path):
    path = tmp_path / "out.txt"
    atomic_write_text(path, "one\n")
    atomic_write_text(path, "two\n")
    assert path.read_text() == "two\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
