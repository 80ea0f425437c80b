"""Polynomial series expansion (Zernike / Chebyshev) tomography.

The Wigner function on a disk of radius ``L`` is expanded as::

    W(r, phi) = sum_{n=-N..N} sum_{m=0..M} w_n^m R^{|n|}_{|n|+2m}(r/L) e^{i n phi} / L

and the Radon transform maps each Zernike term onto a weighted Chebyshev-U
polynomial of ``x/L``.  Orthogonality of ``U_s`` then gives an unbiased Monte
Carlo estimator for phases drawn uniformly over the full circle::

    w_n^m = (n + 2m + 1) / (pi L) * (1/J) sum_j U_{n+2m}(x_j/L) exp(-i n theta_j)

Half-circle data need no separate treatment: the mirrored sample
``(-x_j, theta_j + pi)`` contributes exactly the same summand, because
``U_s(-u) = (-1)^s U_s(u)`` and ``s - n`` is even.
"""

from dataclasses import dataclass, replace
import logging
import math
from typing import NamedTuple

import numpy as np

from ._accum import CompensatedSum
from .fbp import PointEstimate
from .grid import FLAG_OUT_OF_DISK, GridSpec, PhaseSpaceGrid
from .specfun import chebyshev_u_all, zernike_radial_all

__all__ = [
    "PseConfig",
    "CoefficientTable",
    "TruncationChoice",
    "estimate_coefficients",
    "pse_evaluate",
    "pse_origin",
    "pse_origin_sigma",
    "pse_point",
    "select_truncation",
    "pse_grid",
]

logger = logging.getLogger(__name__)

MAX_COEFFICIENTS = 10**6
EXCLUSION_WARNING = 1e-3
_CHUNK = 1 << 14


@dataclass(frozen=True)
class PseConfig:
    """Disk radius ``L`` (``None`` picks ``max |x_j|``) and cutoffs ``N``, ``M``."""

    N: int = 8
    M: int = 30
    L: float | None = None

    def __post_init__(self):
        for name in ("N", "M"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.L is not None and not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"disk radius L must be positive and finite, got {self.L!r}")
        if (self.N + 1) * (self.M + 1) > MAX_COEFFICIENTS:
            raise ValueError("coefficient budget (N+1)(M+1) exceeds 10^6")


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Estimated coefficients ``w[n, m]`` for ``0 <= n <= N``, ``0 <= m <= M``.

    Negative ``n`` follow from ``w_{-n}^m = conj(w_n^m)``.  Besides the
    estimates the table keeps the per-sample second moments needed for
    error propagation: ``sum_abs2[n, m]`` is the sum of ``|y_j|^2`` of each
    coefficient's summand, and ``n0_sum`` / ``n0_cross`` hold the sums and
    cross products of the real ``n = 0`` summands taken about ``n0_shift``
    (the first included sample), which keeps the covariance free of
    cancellation when the spread is small.
    """

    config: PseConfig
    w: np.ndarray
    J: int
    excluded: int
    sum_abs2: np.ndarray
    n0_sum: np.ndarray
    n0_cross: np.ndarray
    n0_shift: np.ndarray
    L_auto: bool = False

    @property
    def L(self):
        return self.config.L

    @property
    def N(self):
        return self.config.N

    @property
    def M(self):
        return self.config.M

    @property
    def included(self):
        return self.J - self.excluded

    def variance(self):
        """Estimated variance of each ``w[n, m]`` (real plus imaginary parts)."""
        if self.J < 2:
            raise ValueError("variance needs J >= 2")
        v = self.sum_abs2 / self.J - np.abs(self.w) ** 2
        return np.maximum(v, 0.0) / (self.J - 1)

    def ab(self):
        """Real cosine/sine coefficients ``a[n, m]``, ``b[n, m]``.

        ``a_0 = w_0`` and, for ``n >= 1``, ``w_n = (a_n - i b_n) / 2`` so
        that the real series reads ``sum R (a cos(n phi) + b sin(n phi))``.
        """
        a = 2.0 * self.w.real
        b = -2.0 * self.w.imag
        a[0] = self.w[0].real
        b[0] = 0.0
        return a, b

    def truncated(self, N=None, M=None):
        """Table restricted to smaller cutoffs, reusing the accumulators."""
        N = self.N if N is None else N
        M = self.M if M is None else M
        if N > self.N or M > self.M:
            raise ValueError("cannot truncate to larger cutoffs")
        return replace(
            self,
            config=replace(self.config, N=N, M=M),
            w=self.w[: N + 1, : M + 1],
            sum_abs2=self.sum_abs2[: N + 1, : M + 1],
            n0_sum=self.n0_sum[: M + 1],
            n0_cross=self.n0_cross[: M + 1, : M + 1],
            n0_shift=self.n0_shift[: M + 1],
        )


def estimate_coefficients(data, cfg):
    """Estimate the expansion coefficients from homodyne samples in one pass.

    Parameters
    ----------
    data : QuadratureDataset
        At least two samples.
    cfg : PseConfig
        Cutoffs and disk radius; ``cfg.L = None`` uses ``max |x_j|`` so
        nothing is excluded.

    Returns
    -------
    CoefficientTable
        Samples with ``|x_j| > L`` contribute nothing but still count in
        ``J``; their number is recorded in ``excluded``.
    """
    if data.J < 2:
        raise ValueError("coefficient estimation needs J >= 2")
    L_auto = cfg.L is None
    L = float(np.max(np.abs(data.x))) if L_auto else float(cfg.L)
    if not L > 0:
        raise ValueError("all samples are at x = 0; cannot choose a disk radius")
    cfg = replace(cfg, L=L)
    N, M = cfg.N, cfg.M
    smax = N + 2 * M

    inside = np.abs(data.x) <= L
    included = int(inside.sum())
    excluded = data.J - included
    if included == 0:
        raise ValueError(f"disk radius L={L} excludes every sample")
    if excluded > EXCLUSION_WARNING * data.J:
        logger.warning("disk radius L=%g excludes %d of %d samples", L, excluded, data.J)
    xs = data.x[inside] / L
    ths = data.theta[inside]

    sums = CompensatedSum((N + 1, M + 1), complex)
    sq = CompensatedSum((N + 1, M + 1))
    cross = CompensatedSum((M + 1, M + 1))
    dev_sum = CompensatedSum(M + 1)
    shift = chebyshev_u_all(2 * M, xs[:1])[::2, 0]
    for start in range(0, xs.size, _CHUNK):
        u = xs[start : start + _CHUNK]
        th = ths[start : start + _CHUNK]
        U = chebyshev_u_all(smax, u)
        part = np.empty((N + 1, M + 1), dtype=complex)
        part_sq = np.empty((N + 1, M + 1))
        for n in range(N + 1):
            Un = U[n : n + 2 * M + 1 : 2]
            part[n] = Un @ np.exp(-1j * n * th) if n else Un.sum(axis=1)
            part_sq[n] = np.einsum("mj,mj->m", Un, Un)
        D = U[0 : 2 * M + 1 : 2] - shift[:, None]
        sums.add(part)
        sq.add(part_sq)
        dev_sum.add(D.sum(axis=1))
        cross.add(D @ D.T)
    # excluded samples have a zero summand, i.e. a deviation of -shift
    dev_sum.add(-excluded * shift)
    cross.add(excluded * np.outer(shift, shift))

    s = np.arange(N + 1)[:, None] + 2 * np.arange(M + 1)[None, :]
    c = (s + 1) / (np.pi * L)
    w = c * sums.value / data.J
    w[0] = w[0].real
    c0 = c[0]
    return CoefficientTable(
        config=cfg,
        w=w,
        J=data.J,
        excluded=excluded,
        sum_abs2=c * c * sq.value,
        n0_sum=c0 * dev_sum.value,
        n0_cross=np.outer(c0, c0) * cross.value,
        n0_shift=c0 * shift,
        L_auto=L_auto,
    )


def pse_evaluate(table, q, p, return_flags=False):
    """Evaluate the truncated real series at ``(q, p)``.

    Points with ``sqrt(q^2 + p^2) > L`` get 0 and, when ``return_flags`` is
    set, ``FLAG_OUT_OF_DISK`` in the returned flag array.
    """
    scalar = np.ndim(q) == 0 and np.ndim(p) == 0
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise ValueError("evaluation points must be finite")
    L = table.L
    r = np.hypot(q, p) / L
    inside = r <= 1.0
    out = np.zeros(q.shape)
    ri = r[inside]
    phi = np.arctan2(p[inside], q[inside])
    total = np.zeros(ri.shape)
    for n in range(table.N + 1):
        R = zernike_radial_all(n, table.M, ri)
        radial = np.tensordot(table.w[n], R, axes=1)
        if n == 0:
            total += radial.real
        else:
            total += 2.0 * (radial * np.exp(1j * n * phi)).real
    out[inside] = total / L
    flags = np.where(inside, 0, FLAG_OUT_OF_DISK).astype(np.int8)
    if scalar:
        out, flags = float(out), int(flags)
    return (out, flags) if return_flags else out


def pse_origin(table):
    """``W'(0, 0) = sum_m (-1)^m a_0^m / L``."""
    signs = (-1.0) ** np.arange(table.M + 1)
    return float(np.dot(signs, table.w[0].real) / table.L)


def pse_origin_sigma(table):
    """Standard error of :func:`pse_origin` from the ``n = 0`` covariances.

    ``sigma^2 = s^T C s / ((J - 1) L^2)`` with ``s_m = (-1)^m`` and ``C`` the
    population covariance of the per-sample ``a_0^m`` summands; this is the
    exact variance of a linear combination, no linearisation involved.
    """
    J = table.J
    if J < 2:
        raise ValueError("sigma needs J >= 2")
    mean = table.n0_sum / J
    cov = table.n0_cross / J - np.outer(mean, mean)
    signs = (-1.0) ** np.arange(table.M + 1)
    var = float(signs @ cov @ signs)
    return math.sqrt(max(var, 0.0) / ((J - 1) * table.L**2))


def pse_point(table, q, p):
    """:class:`PointEstimate` at ``(q, p)``; ``sigma`` is only known at the origin."""
    value = pse_evaluate(table, q, p)
    sigma = pse_origin_sigma(table) if (q == 0 and p == 0) else float("nan")
    return PointEstimate(float(value), sigma, table.J)


class TruncationChoice(NamedTuple):
    M: int
    table: CoefficientTable
    converged: bool


def select_truncation(data, cfg_max):
    """Smallest radial cutoff whose last coefficient drops below the origin error.

    Coefficients are estimated once up to ``cfg_max.M``; for each trial
    ``M`` the accumulators are sliced, so the data are never rescanned.
    Returns ``(M, table, converged)`` where ``table`` is the full table at
    ``cfg_max``; if no ``M`` qualifies, ``M = cfg_max.M`` and
    ``converged`` is False.
    """
    if cfg_max.M < 1:
        raise ValueError("truncation search needs cfg_max.M >= 1")
    table = estimate_coefficients(data, cfg_max)
    for M in range(1, cfg_max.M + 1):
        sub = table.truncated(N=0, M=M)
        if abs(sub.w[0, M]) < pse_origin_sigma(sub):
            return TruncationChoice(M, table, True)
    return TruncationChoice(cfg_max.M, table, False)


def pse_grid(table, grid):
    """Evaluate the series on every node of ``grid``.

    Standard errors are filled in only at the origin node, if the grid has one.
    """
    if isinstance(grid, str):
        grid = GridSpec.parse(grid)
    Q, P = grid.mesh()
    w, flags = pse_evaluate(table, Q, P, return_flags=True)
    sigma = np.full(w.shape, np.nan)
    out = PhaseSpaceGrid(grid, w, sigma, flags)
    node = out.node(0.0, 0.0)
    if node is not None:
        sigma[node] = pse_origin_sigma(table)
    return out
