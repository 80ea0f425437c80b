"""Replica error studies, state distances and density-matrix extraction."""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .fbp import FbpConfig, fbp_grid, fbp_point
from .grid import GridSpec, PhaseSpaceGrid
from .pse import PseConfig, estimate_coefficients, pse_grid, pse_point
from .sampling import bootstrap_resample, mix_seed, sample_dataset
from .specfun import laguerre_functions
from .states import FockStateModel, StateSpec, make_state, wigner_of_state

__all__ = [
    "McStudyResult",
    "DistanceRow",
    "DistanceCurve",
    "L2Result",
    "settings_label",
    "reconstruct_point",
    "reconstruct_grid",
    "mc_study",
    "bootstrap_study",
    "l2_distance",
    "frobenius_distance",
    "density_from_wigner",
    "distance_study",
    "DEFAULT_DISTANCE_R",
    "DEFAULT_DISTANCE_H",
    "STUDY_GRID_H",
    "STUDY_N_MAX",
]

DEFAULT_DISTANCE_R = 6.0
DEFAULT_DISTANCE_H = 0.02
# replica studies run FBP at every node, so they use a coarser grid
STUDY_GRID_H = 0.1
STUDY_N_MAX = 12
MAX_EXTRACTION_N = 32


def settings_label(settings):
    if isinstance(settings, FbpConfig):
        return f"fbp(k_c={settings.k_c:g})"
    if isinstance(settings, PseConfig):
        L = "auto" if settings.L is None else f"{settings.L:g}"
        return f"pse(N={settings.N},M={settings.M},L={L})"
    raise TypeError(f"unknown reconstruction settings {settings!r}")


def reconstruct_point(data, settings, q=0.0, p=0.0):
    """:class:`PointEstimate` at ``(q, p)`` for FBP or PSE settings."""
    if isinstance(settings, FbpConfig):
        return fbp_point(data, settings, q, p)
    if isinstance(settings, PseConfig):
        return pse_point(estimate_coefficients(data, settings), q, p)
    raise TypeError(f"unknown reconstruction settings {settings!r}")


def reconstruct_grid(data, settings, grid, with_sigma=True):
    """:class:`PhaseSpaceGrid` for FBP or PSE settings."""
    if isinstance(settings, FbpConfig):
        return fbp_grid(data, settings, grid, with_sigma=with_sigma)
    if isinstance(settings, PseConfig):
        return pse_grid(estimate_coefficients(data, settings), grid)
    raise TypeError(f"unknown reconstruction settings {settings!r}")


# ---------------------------------------------------------------------------
# Replica studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class McStudyResult:
    """Spread of point estimates over ``K`` replicas.

    ``mc_sigma`` is the population standard deviation (divisor ``K``) of
    the replica values; ``mean_reported_sigma`` averages each replica's
    own error estimate.
    """

    point: tuple
    K: int
    mean_value: float
    mc_sigma: float
    mean_reported_sigma: float
    per_replica: tuple
    settings: object = None
    J: int = 0

    def __post_init__(self):
        if self.K != len(self.per_replica) or self.K < 2:
            raise ValueError("a study needs K >= 2 replicas")

    @property
    def values(self):
        return np.array([e.value for e in self.per_replica])

    @property
    def sigmas(self):
        return np.array([e.sigma for e in self.per_replica])


def _summarize(point, estimates, settings, J):
    values = np.array([e.value for e in estimates])
    sigmas = np.array([e.sigma for e in estimates])
    return McStudyResult(
        point=(float(point[0]), float(point[1])),
        K=len(estimates),
        mean_value=float(values.mean()),
        mc_sigma=float(values.std()),
        mean_reported_sigma=float(sigmas.mean()),
        per_replica=tuple(estimates),
        settings=settings,
        J=J,
    )


def _replica_seeds(K, master_seed, seeds):
    if seeds is None:
        return [mix_seed(master_seed, r) for r in range(K)]
    seeds = [int(s) for s in seeds]
    if len(seeds) != K:
        raise ValueError(f"expected {K} replica seeds, got {len(seeds)}")
    return seeds


def mc_study(state, J, K, settings, point=(0.0, 0.0), master_seed=0, scheme="uniform_full_circle", seeds=None):
    """Monte Carlo error study from ``K`` independent synthetic datasets.

    Replica ``r`` is sampled with seed ``mix_seed(master_seed, r)`` unless
    ``seeds`` overrides the list.
    """
    if K < 2 or J < 2:
        raise ValueError("mc_study needs K >= 2 and J >= 2")
    q, p = point
    estimates = []
    for seed in _replica_seeds(K, master_seed, seeds):
        data = sample_dataset(state, J, scheme=scheme, seed=seed)
        estimates.append(reconstruct_point(data, settings, q, p))
    return _summarize(point, estimates, settings, J)


def bootstrap_study(data, K, settings, point=(0.0, 0.0), master_seed=0, seeds=None):
    """Bootstrap error study: ``K`` resamples with replacement of one dataset."""
    if K < 2:
        raise ValueError("bootstrap_study needs K >= 2")
    q, p = point
    estimates = []
    for seed in _replica_seeds(K, master_seed, seeds):
        estimates.append(reconstruct_point(bootstrap_resample(data, seed), settings, q, p))
    return _summarize(point, estimates, settings, data.J)


# ---------------------------------------------------------------------------
# Distances and density-matrix extraction
# ---------------------------------------------------------------------------

class L2Result(NamedTuple):
    distance: float
    R: float
    h: float


def _values_on(W, spec):
    """Wigner values on ``spec`` from a grid (must match) or a vectorised callable."""
    if isinstance(W, PhaseSpaceGrid):
        if W.spec != spec:
            raise ValueError(f"grid {W.spec} does not match the integration grid {spec}")
        values = np.asarray(W.w, dtype=float)
    elif callable(W):
        Q, P = spec.mesh()
        values = np.asarray(W(Q, P), dtype=float)
        if values.shape != Q.shape:
            raise ValueError("Wigner evaluator returned the wrong shape")
    else:
        raise TypeError("expected a PhaseSpaceGrid or a callable W(q, p)")
    if not np.all(np.isfinite(values)):
        raise ValueError("Wigner values contain non-finite entries")
    return values


def _integration_grid(W_inputs, R, h):
    spec = GridSpec.square(R, h)
    for W in W_inputs:
        if isinstance(W, PhaseSpaceGrid) and W.spec != spec:
            raise ValueError(f"grid {W.spec} does not match the integration grid {spec}")
    return spec


def l2_distance(W_a, W_b, R=DEFAULT_DISTANCE_R, h=DEFAULT_DISTANCE_H):
    """``sqrt(integral (W_a - W_b)^2 dq dp)`` by a Riemann sum over ``[-R, R]^2``.

    Each argument is either a :class:`PhaseSpaceGrid` on ``GridSpec.square(R, h)``
    or a vectorised callable ``W(q, p)``.
    """
    spec = _integration_grid((W_a, W_b), R, h)
    diff = _values_on(W_a, spec) - _values_on(W_b, spec)
    return L2Result(math.sqrt(float(np.sum(diff * diff)) * h * h), float(R), float(h))


def frobenius_distance(rho_a, rho_b):
    """Frobenius norm of ``rho_a - rho_b``; the smaller matrix is zero-padded."""
    a = np.asarray(getattr(rho_a, "rho", rho_a), dtype=complex)
    b = np.asarray(getattr(rho_b, "rho", rho_b), dtype=complex)
    n = max(a.shape[0], b.shape[0])
    pa = np.zeros((n, n), dtype=complex)
    pb = np.zeros((n, n), dtype=complex)
    pa[: a.shape[0], : a.shape[1]] = a
    pb[: b.shape[0], : b.shape[1]] = b
    return float(np.linalg.norm(pa - pb))


def _extract_many(values, n_max, spec):
    """Kernel overlaps ``2 pi h^2 sum W conj(K_mn)`` for a stack of real grids.

    ``values`` has shape ``(k, n_q, n_p)``; returns ``(k, n_max+1, n_max+1)``.
    The kernel is built one off-diagonal at a time, so memory stays at
    ``O((n_max+1) * nodes)`` however large ``n_max`` is.
    """
    Q, P = spec.mesh()
    x = (2.0 * (Q * Q + P * P)).ravel()
    phi = np.arctan2(P, Q).ravel()
    hq, hp = spec.steps
    flat = values.reshape(values.shape[0], -1)
    rho = np.zeros((values.shape[0], n_max + 1, n_max + 1), dtype=complex)
    signs = (-1.0) ** np.arange(n_max + 1)
    for d in range(n_max + 1):
        f = laguerre_functions(n_max - d, d, x) * signs[: n_max + 1 - d, None] / np.pi
        # conj(K_{n+d,n}) = f_n e^{+i d phi}
        kern = f * np.exp(1j * d * phi) if d else f
        block = 2.0 * np.pi * hq * hp * (flat @ kern.T)
        idx = np.arange(n_max + 1 - d)
        rho[:, idx + d, idx] = block
        if d:
            rho[:, idx, idx + d] = block.conj()
    return rho


def density_from_wigner(W, n_max=STUDY_N_MAX, R=DEFAULT_DISTANCE_R, h=DEFAULT_DISTANCE_H):
    """Fock-basis density matrix of a (reconstructed) Wigner function.

    ``rho_mn = 2 pi integral W conj(K_mn)`` by a Riemann sum, with ``K_mn``
    the Wigner function of ``|m><n|``.  The result is Hermitian by
    construction but its trace is not forced to 1; it is returned unvalidated
    with the trace available as ``.trace``.
    """
    if not 0 <= n_max <= MAX_EXTRACTION_N:
        raise ValueError(f"n_max must be between 0 and {MAX_EXTRACTION_N}")
    spec = _integration_grid((W,), R, h)
    values = _values_on(W, spec)
    rho = _extract_many(values[None], n_max, spec)[0]
    return FockStateModel(rho, label="extracted", validate=False)


@dataclass(frozen=True, eq=False)
class DistanceRow:
    J: int
    replicas: int
    mean_d_L2: float
    se_d_L2: float
    mean_d_F: float
    se_d_F: float
    d_L2: np.ndarray
    d_F: np.ndarray


@dataclass(frozen=True, eq=False)
class DistanceCurve:
    """Mean distances to the target per sample size for one algorithm.

    ``truncation_error`` is the Frobenius distance between the exact target
    and the matrix extracted from its exact Wigner function, i.e. the floor
    set by ``n_max`` and the grid.
    """

    target: StateSpec
    settings: object
    rows: tuple
    R: float
    h: float
    n_max: int
    truncation_error: float
    master_seed: int = 0

    def __post_init__(self):
        Js = [row.J for row in self.rows]
        if any(b <= a for a, b in zip(Js, Js[1:])):
            raise ValueError("J must be strictly increasing across rows")
        if any(row.replicas < 2 for row in self.rows):
            raise ValueError("each row needs at least two replicas")

    @property
    def label(self):
        return settings_label(self.settings)


def _row(J, d_l2, d_f):
    n = d_l2.size
    return DistanceRow(
        J=int(J),
        replicas=n,
        mean_d_L2=float(d_l2.mean()),
        se_d_L2=float(d_l2.std(ddof=1) / math.sqrt(n)),
        mean_d_F=float(d_f.mean()),
        se_d_F=float(d_f.std(ddof=1) / math.sqrt(n)),
        d_L2=d_l2,
        d_F=d_f,
    )


def distance_study(
    target,
    settings_list,
    J_list,
    replicas,
    master_seed=0,
    R=DEFAULT_DISTANCE_R,
    h=STUDY_GRID_H,
    n_max=STUDY_N_MAX,
    scheme="uniform_full_circle",
    seeds=None,
):
    """Average ``d_L2`` and ``d_F`` to the target over replica reconstructions.

    At each ``J`` every algorithm sees the same replica datasets (seed
    ``mix_seed(s_r, J)`` with ``s_r = mix_seed(master_seed, r)`` or the
    override ``seeds[r]``), so per-replica distances can be compared pairwise.

    Returns
    -------
    list of DistanceCurve
        One curve per entry of ``settings_list``.
    """
    if replicas < 2:
        raise ValueError("distance_study needs at least two replicas")
    if isinstance(target, str):
        target = StateSpec.parse(target)
    state = make_state(target)
    spec = GridSpec.square(R, h)
    Q, P = spec.mesh()
    exact = wigner_of_state(state, Q, P)
    floor = frobenius_distance(state, _extract_many(exact[None], n_max, spec)[0])
    base = _replica_seeds(replicas, master_seed, seeds)
    J_list = [int(J) for J in J_list]

    rows = [[] for _ in settings_list]
    for J in J_list:
        values = np.empty((len(settings_list), replicas) + exact.shape)
        for r, s in enumerate(base):
            data = sample_dataset(state, J, scheme=scheme, seed=mix_seed(s, J))
            for a, settings in enumerate(settings_list):
                values[a, r] = reconstruct_grid(data, settings, spec, with_sigma=False).w
        for a in range(len(settings_list)):
            diff = values[a] - exact
            d_l2 = np.sqrt(np.sum(diff * diff, axis=(1, 2)) * h * h)
            extracted = _extract_many(values[a], n_max, spec)
            d_f = np.array([frobenius_distance(state, m) for m in extracted])
            rows[a].append(_row(J, d_l2, d_f))
    return [
        DistanceCurve(target, settings, tuple(r), float(R), float(h), int(n_max), floor, int(master_seed))
        for settings, r in zip(settings_list, rows)
    ]
