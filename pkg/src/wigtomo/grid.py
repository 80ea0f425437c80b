"""Rectangular phase-space grids shared by both reconstruction algorithms."""

from dataclasses import dataclass
import math

import numpy as np

__all__ = ["GridSpec", "PhaseSpaceGrid", "FLAG_OUT_OF_DISK"]

FLAG_OUT_OF_DISK = 1


@dataclass(frozen=True)
class GridSpec:
    """Cartesian node grid ``q_min..q_max`` (``n_q`` nodes) by ``p_min..p_max`` (``n_p`` nodes)."""

    q_min: float
    q_max: float
    n_q: int
    p_min: float
    p_max: float
    n_p: int

    def __post_init__(self):
        for name in ("n_q", "n_p"):
            n = getattr(self, name)
            if int(n) != n or n < 1:
                raise ValueError(f"{name} must be a positive integer")
            object.__setattr__(self, name, int(n))
        for lo, hi, n in ((self.q_min, self.q_max, self.n_q), (self.p_min, self.p_max, self.n_p)):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("grid bounds must be finite")
            if n == 1 and lo != hi:
                raise ValueError("a single-node axis needs equal bounds")
            if n > 1 and not hi > lo:
                raise ValueError("grid upper bound must exceed lower bound")

    @classmethod
    def square(cls, R, h):
        """Nodes ``-R, -R+h, ..., R`` on both axes."""
        if not (R > 0 and h > 0):
            raise ValueError("R and h must be positive")
        n = int(round(2.0 * R / h)) + 1
        if abs((n - 1) * h - 2.0 * R) > 1e-9 * R:
            raise ValueError(f"2R = {2 * R} is not a multiple of h = {h}")
        return cls(-R, R, n, -R, R, n)

    @classmethod
    def point(cls, q, p):
        return cls(q, q, 1, p, p, 1)

    @classmethod
    def parse(cls, text):
        """Parse ``lo:hi:n`` (both axes) or ``qlo:qhi:nq,plo:phi:np``."""
        parts = text.split(",")
        if len(parts) not in (1, 2):
            raise ValueError(f"malformed grid spec {text!r}")
        axes = []
        for part in parts:
            fields = part.split(":")
            if len(fields) != 3:
                raise ValueError(f"malformed grid axis {part!r}; expected lo:hi:n")
            try:
                axes.append((float(fields[0]), float(fields[1]), int(fields[2])))
            except ValueError:
                raise ValueError(f"malformed grid axis {part!r}") from None
        if len(axes) == 1:
            axes.append(axes[0])
        return cls(*axes[0], *axes[1])

    def axes(self):
        return np.linspace(self.q_min, self.q_max, self.n_q), np.linspace(self.p_min, self.p_max, self.n_p)

    def mesh(self):
        q, p = self.axes()
        return np.meshgrid(q, p, indexing="ij")

    @property
    def steps(self):
        hq = (self.q_max - self.q_min) / (self.n_q - 1) if self.n_q > 1 else 1.0
        hp = (self.p_max - self.p_min) / (self.n_p - 1) if self.n_p > 1 else 1.0
        return hq, hp

    @property
    def size(self):
        return self.n_q * self.n_p

    def to_dict(self):
        return {k: getattr(self, k) for k in ("q_min", "q_max", "n_q", "p_min", "p_max", "n_p")}


@dataclass(frozen=True, eq=False)
class PhaseSpaceGrid:
    """Sampled Wigner values on a :class:`GridSpec`.

    Arrays have shape ``(n_q, n_p)``; ``sigma`` is NaN where no standard
    error was computed and ``flags`` carries ``FLAG_OUT_OF_DISK`` for nodes
    outside a series-expansion disk.
    """

    spec: GridSpec
    w: np.ndarray
    sigma: np.ndarray
    flags: np.ndarray

    def __post_init__(self):
        shape = (self.spec.n_q, self.spec.n_p)
        for name in ("w", "sigma", "flags"):
            if np.shape(getattr(self, name)) != shape:
                raise ValueError(f"{name} has shape {np.shape(getattr(self, name))}, expected {shape}")

    @property
    def q(self):
        return self.spec.axes()[0]

    @property
    def p(self):
        return self.spec.axes()[1]

    def integral(self):
        """Riemann sum of ``w`` over the node cells."""
        hq, hp = self.spec.steps
        return float(self.w.sum() * hq * hp)

    def node(self, q, p):
        """Index of the node at ``(q, p)`` or ``None`` if there is none."""
        qa, pa = self.spec.axes()
        iq = np.nonzero(np.isclose(qa, q, rtol=0, atol=1e-12))[0]
        ip = np.nonzero(np.isclose(pa, p, rtol=0, atol=1e-12))[0]
        if iq.size == 0 or ip.size == 0:
            return None
        return int(iq[0]), int(ip[0])
