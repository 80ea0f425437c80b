"""Seeded synthetic homodyne data and bootstrap resampling.

Every random stream is a Philox (counter-based) generator keyed by a 64-bit
seed, so a dataset is fully determined by ``(state, J, scheme, seed)``.
Replica ``r`` of a study driven by ``master_seed`` uses ``mix_seed(master_seed, r)``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import logging
import math
from typing import NamedTuple

import numpy as np

from .states import marginal_of_state

__all__ = [
    "QuadraturePoint",
    "QuadratureDataset",
    "THETA_SCHEMES",
    "SamplingError",
    "mix_seed",
    "make_rng",
    "sample_dataset",
    "bootstrap_resample",
    "sampler_envelope",
]

logger = logging.getLogger(__name__)

THETA_SCHEMES = {"uniform_full_circle": 2.0 * math.pi, "uniform_half_circle": math.pi}
TAIL_MASS = 1e-8
ENVELOPE_SAFETY = 1.1
MIN_ACCEPTANCE = 0.01
_MAX_BATCH = 1 << 18


class SamplingError(RuntimeError):
    """Raised when rejection sampling is mis-sized for the requested state."""


class QuadraturePoint(NamedTuple):
    x: float
    theta: float


@dataclass(frozen=True, eq=False)
class QuadratureDataset:
    """Ordered homodyne samples ``(x_j, theta_j)`` with provenance.

    ``theta`` is in radians in ``[0, 2 pi)`` and ``x`` in natural quadrature
    units (vacuum variance 1/2).
    """

    x: np.ndarray
    theta: np.ndarray
    theta_scheme: str = "uniform_full_circle"
    seed: int | None = None
    source: str = "external"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.array(self.x, dtype=float).ravel()
        theta = np.array(self.theta, dtype=float).ravel()
        if x.shape != theta.shape:
            raise ValueError("x and theta must have the same length")
        if x.size < 1:
            raise ValueError("a dataset needs at least one point")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(theta))):
            raise ValueError("dataset contains non-finite values")
        if np.any(theta < 0.0) or np.any(theta >= 2.0 * math.pi):
            raise ValueError("theta values must lie in [0, 2 pi)")
        if self.theta_scheme not in THETA_SCHEMES:
            raise ValueError(f"unknown theta scheme {self.theta_scheme!r}")
        x.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "theta", theta)

    @property
    def J(self):
        return self.x.size

    def __len__(self):
        return self.x.size

    def points(self):
        for xv, tv in zip(self.x, self.theta):
            yield QuadraturePoint(float(xv), float(tv))

    def same_values(self, other):
        return np.array_equal(self.x, other.x) and np.array_equal(self.theta, other.theta)


def mix_seed(master_seed, index):
    """Derive the seed of replica ``index`` from ``master_seed``.

    The mix is numpy's ``SeedSequence([master_seed, index])`` hashed to one
    64-bit word, a documented and platform-independent function.
    """
    words = np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)
    return int(words[0])


def make_rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@lru_cache(maxsize=64)
def sampler_envelope(state, n_theta=64, dx=0.005):
    """Proposal half-width and density ceiling for rejection sampling.

    Returns ``(x_max, envelope)`` where the mass of every tabulated
    ``theta``-slice outside ``[-x_max, x_max]`` is below ``TAIL_MASS`` and
    ``envelope`` is ``ENVELOPE_SAFETY`` times the largest tabulated density.
    """
    n_half = math.ceil((math.sqrt(2.0 * state.dim + 1.0) + 8.0) / dx)
    xs = dx * np.arange(-n_half, n_half + 1)
    # p(-x, theta + pi) = p(x, theta): half a turn of angles covers the circle
    thetas = np.linspace(0.0, math.pi, n_theta, endpoint=False)
    tab = marginal_of_state(state, xs[None, :], thetas[:, None])
    seg = 0.5 * (tab[:, 1:] + tab[:, :-1]) * dx
    left = np.concatenate([np.zeros((n_theta, 1)), np.cumsum(seg, axis=1)], axis=1)
    right = left[:, -1:] - left
    # outside mass for symmetric cut at xs[i] (i in upper half): left(-x) + right(x)
    mid = n_half
    outside = left[:, mid::-1] + right[:, mid:]
    worst = outside.max(axis=0)
    idx = np.nonzero(worst < TAIL_MASS)[0]
    if idx.size == 0:
        raise SamplingError("could not bound the marginal support; state too wide")
    x_max = float(xs[mid + idx[0]])
    envelope = ENVELOPE_SAFETY * float(tab.max())
    return x_max, envelope


def sample_dataset(state, J, scheme="uniform_full_circle", seed=0):
    """Draw ``J`` homodyne samples from ``state`` by rejection sampling.

    Candidates ``(theta, x, u)`` are drawn uniformly over the phase range,
    ``[-x_max, x_max]`` and ``[0, envelope]``; a candidate is kept when
    ``u < p(x, theta)``.  Accepted phases are uniform up to the excluded
    tail mass, and each accepted ``x`` follows ``p(., theta)``.

    Parameters
    ----------
    state : FockStateModel
    J : int
        Number of samples, at least 1.
    scheme : {"uniform_full_circle", "uniform_half_circle"}
        Phase range ``[0, 2 pi)`` or ``[0, pi)``.
    seed : int
        64-bit seed; identical arguments give bit-identical datasets.

    Raises
    ------
    SamplingError
        If the acceptance rate falls below 1 %.
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be at least 1")
    if scheme not in THETA_SCHEMES:
        raise ValueError(f"unknown theta scheme {scheme!r}")
    span = THETA_SCHEMES[scheme]
    x_max, env = sampler_envelope(state)
    expected = 1.0 / (2.0 * x_max * env)
    if expected < MIN_ACCEPTANCE:
        raise SamplingError(f"expected acceptance {expected:.3%} is below {MIN_ACCEPTANCE:.0%}")

    rng = make_rng(seed)
    xs, ths = [], []
    have = tried = 0
    while have < J:
        need = J - have
        batch = min(_MAX_BATCH, int(need / expected * 1.1) + 256)
        theta = rng.random(batch) * span
        x = (2.0 * rng.random(batch) - 1.0) * x_max
        u = rng.random(batch) * env
        keep = u < marginal_of_state(state, x, theta)
        tried += batch
        xs.append(x[keep][:need])
        ths.append(theta[keep][:need])
        have += min(int(keep.sum()), need)
        if tried > 20 * 1024 and have / tried < MIN_ACCEPTANCE:
            raise SamplingError(f"acceptance rate {have / tried:.3%} is below {MIN_ACCEPTANCE:.0%}")
    logger.debug("sampled %d points, acceptance %.3f", J, have / tried)
    theta = np.concatenate(ths)
    theta[theta >= 2.0 * math.pi] = 0.0
    return QuadratureDataset(
        np.concatenate(xs), theta, theta_scheme=scheme, seed=int(seed), source=state.label or "state"
    )


def bootstrap_resample(data, seed):
    """Draw ``J`` points with replacement from ``data`` (deterministic in ``seed``)."""
    rng = make_rng(seed)
    idx = rng.integers(0, data.J, size=data.J)
    return QuadratureDataset(
        data.x[idx],
        data.theta[idx],
        theta_scheme=data.theta_scheme,
        seed=int(seed),
        source=f"bootstrap({data.source})",
    )
