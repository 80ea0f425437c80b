"""Plain-CSV file formats with JSON sidecars, written atomically.

Every CSV ``name.csv`` has a sidecar ``name.json`` holding ``format_version``,
a ``kind`` tag and the metadata needed to re-derive the run.  Floats are
written with 17 significant digits so reading back is lossless.
"""

import csv
import io as _io
import json
import math
import os
from pathlib import Path
import tempfile

import numpy as np

from .grid import GridSpec, PhaseSpaceGrid
from .pse import CoefficientTable, PseConfig
from .sampling import QuadratureDataset

__all__ = [
    "FORMAT_VERSION",
    "FormatError",
    "UNITS",
    "sidecar_path",
    "atomic_write_text",
    "write_dataset",
    "read_dataset",
    "write_grid",
    "read_grid",
    "write_coefficients",
    "read_coefficients",
    "write_distance_curves",
    "read_table",
    "write_table",
]

FORMAT_VERSION = 1
UNITS = "theta in radians; x, q, p in natural quadrature units (vacuum variance 1/2)"

DATASET_HEADER = ["theta", "x"]
GRID_HEADER = ["q", "p", "w", "sigma", "flags"]
COEFF_HEADER = ["n", "m", "re", "im", "var"]
DISTANCE_HEADER = ["algorithm", "J", "replicas", "mean_d_L2", "se_d_L2", "mean_d_F", "se_d_F"]


class FormatError(ValueError):
    """A file is missing, malformed or has an unsupported format version."""


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "" if math.isnan(v) else f"{v:.17g}"


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def atomic_write_text(path, text):
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def _write_pair(path, header, rows, meta):
    path = Path(path)
    meta = {"format_version": FORMAT_VERSION, "units": UNITS, **meta}
    atomic_write_text(path, _csv_text(header, rows))
    atomic_write_text(sidecar_path(path), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _read_meta(path, kind, required=True):
    side = sidecar_path(path)
    if not side.exists():
        if required:
            raise FormatError(f"missing metadata sidecar {side}")
        return None
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{side}: invalid JSON ({exc})") from None
    if meta.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"{side}: unsupported format_version {meta.get('format_version')!r}")
    if meta.get("kind") != kind:
        raise FormatError(f"{side}: expected kind {kind!r}, found {meta.get('kind')!r}")
    return meta


def read_table(path, header):
    """Rows of a CSV file with the given header, as lists of strings."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    if not rows or [c.strip() for c in rows[0]] != header:
        raise FormatError(f"{path}: expected header {','.join(header)!r}")
    body = rows[1:]
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise FormatError(f"{path}:{i}: expected {len(header)} fields, found {len(row)}")
    return body


def write_table(path, header, rows, meta):
    """Generic CSV plus sidecar (``meta`` must contain ``kind``)."""
    _write_pair(path, header, rows, meta)


def _floats(path, column, name):
    try:
        return np.array([float(v) if v != "" else math.nan for v in column], dtype=float)
    except ValueError:
        raise FormatError(f"{path}: non-numeric value in column {name!r}") from None


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------

def write_dataset(path, data, state_spec=None):
    meta = {
        "kind": "dataset",
        "J": data.J,
        "seed": data.seed,
        "theta_scheme": data.theta_scheme,
        "source": state_spec if state_spec is not None else data.source,
    }
    _write_pair(path, DATASET_HEADER, zip(data.theta, data.x), meta)


def read_dataset(path, theta_scheme=None):
    """Load a dataset; without a sidecar the file is treated as external data.

    ``theta_scheme`` overrides the scheme of a bare CSV; if both a sidecar and
    an override are present they must agree.
    """
    meta = _read_meta(path, "dataset", required=False)
    body = read_table(path, DATASET_HEADER)
    if not body:
        raise FormatError(f"{path}: dataset has no rows")
    cols = list(zip(*body))
    theta = _floats(path, cols[0], "theta")
    x = _floats(path, cols[1], "x")
    if meta is None:
        scheme = theta_scheme or "uniform_full_circle"
        seed, source = None, "external"
    else:
        scheme = meta.get("theta_scheme")
        if theta_scheme is not None and theta_scheme != scheme:
            raise FormatError(f"{path}: file declares {scheme!r}, requested {theta_scheme!r}")
        if meta.get("J") != x.size:
            raise FormatError(f"{path}: metadata J={meta.get('J')} but {x.size} rows")
        seed, source = meta.get("seed"), meta.get("source", "external")
    try:
        return QuadratureDataset(x, theta, theta_scheme=scheme, seed=seed, source=str(source))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

def write_grid(path, grid, meta=None):
    Q, P = grid.spec.mesh()
    rows = zip(Q.ravel(), P.ravel(), grid.w.ravel(), grid.sigma.ravel(), grid.flags.ravel().astype(int))
    _write_pair(path, GRID_HEADER, rows, {"kind": "grid", "grid": grid.spec.to_dict(), **(meta or {})})


def read_grid(path):
    meta = _read_meta(path, "grid")
    body = read_table(path, GRID_HEADER)
    try:
        spec = GridSpec(**meta["grid"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: bad grid metadata ({exc})") from None
    if len(body) != spec.size:
        raise FormatError(f"{path}: {len(body)} rows but the grid has {spec.size} nodes")
    cols = list(zip(*body))
    shape = (spec.n_q, spec.n_p)
    w = _floats(path, cols[2], "w").reshape(shape)
    sigma = _floats(path, cols[3], "sigma").reshape(shape)
    flags = _floats(path, cols[4], "flags").astype(np.int8).reshape(shape)
    return PhaseSpaceGrid(spec, w, sigma, flags), meta


# ---------------------------------------------------------------------------
# PSE coefficient tables
# ---------------------------------------------------------------------------

def write_coefficients(path, table, meta=None):
    var = table.variance()
    rows = (
        (n, m, table.w[n, m].real, table.w[n, m].imag, var[n, m])
        for n in range(table.N + 1)
        for m in range(table.M + 1)
    )
    info = {
        "kind": "coefficients",
        "L": table.L,
        "L_auto": table.L_auto,
        "N": table.N,
        "M": table.M,
        "J": table.J,
        "excluded": table.excluded,
        "n0_sum": table.n0_sum.tolist(),
        "n0_cross": table.n0_cross.tolist(),
        "n0_shift": table.n0_shift.tolist(),
        **(meta or {}),
    }
    _write_pair(path, COEFF_HEADER, rows, info)


def read_coefficients(path):
    """Rebuild a :class:`CoefficientTable` (including origin-error accumulators)."""
    meta = _read_meta(path, "coefficients")
    body = read_table(path, COEFF_HEADER)
    try:
        N, M, J = int(meta["N"]), int(meta["M"]), int(meta["J"])
        cfg = PseConfig(N=N, M=M, L=float(meta["L"]))
        n0_sum = np.array(meta["n0_sum"], dtype=float)
        n0_cross = np.array(meta["n0_cross"], dtype=float)
        n0_shift = np.array(meta["n0_shift"], dtype=float)
        if n0_sum.shape != (M + 1,) or n0_shift.shape != (M + 1,) or n0_cross.shape != (M + 1, M + 1):
            raise ValueError("accumulator shapes do not match M")
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: bad coefficient metadata ({exc})") from None
    if len(body) != (N + 1) * (M + 1):
        raise FormatError(f"{path}: expected {(N + 1) * (M + 1)} rows, found {len(body)}")
    cols = list(zip(*body))
    n = _floats(path, cols[0], "n").astype(int)
    m = _floats(path, cols[1], "m").astype(int)
    if np.any(n != np.repeat(np.arange(N + 1), M + 1)) or np.any(m != np.tile(np.arange(M + 1), N + 1)):
        raise FormatError(f"{path}: (n, m) rows do not form the complete rectangle")
    shape = (N + 1, M + 1)
    w = (_floats(path, cols[2], "re") + 1j * _floats(path, cols[3], "im")).reshape(shape)
    var = _floats(path, cols[4], "var").reshape(shape)
    sum_abs2 = J * (var * (J - 1) + np.abs(w) ** 2)
    return (
        CoefficientTable(
            config=cfg,
            w=w,
            J=J,
            excluded=int(meta.get("excluded", 0)),
            sum_abs2=sum_abs2,
            n0_sum=n0_sum,
            n0_cross=n0_cross,
            n0_shift=n0_shift,
            L_auto=bool(meta.get("L_auto", False)),
        ),
        meta,
    )


# ---------------------------------------------------------------------------
# Distance curves
# ---------------------------------------------------------------------------

def write_distance_curves(path, curves, meta=None):
    rows = [
        (c.label, r.J, r.replicas, r.mean_d_L2, r.se_d_L2, r.mean_d_F, r.se_d_F)
        for c in curves
        for r in c.rows
    ]
    first = curves[0]
    info = {
        "kind": "distance",
        "target": first.target.to_string(),
        "R": first.R,
        "h": first.h,
        "n_max": first.n_max,
        "master_seed": first.master_seed,
        "truncation_error": first.truncation_error,
        "algorithms": [c.label for c in curves],
        **(meta or {}),
    }
    _write_pair(path, DISTANCE_HEADER, rows, info)
