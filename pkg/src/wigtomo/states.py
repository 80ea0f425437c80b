"""Truncated Fock-basis state models and their phase-space representations.

Conventions
-----------
Quadratures are ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))``,
so the vacuum marginal has variance 1/2.  The Wigner function integrates to
one, which puts the vacuum origin value at ``1/pi``.  The homodyne
observable at phase ``theta`` is ``x cos(theta) + p sin(theta)`` and the
marginal is its Radon projection::

    p(x, theta) = sum_{m,n} rho_mn exp(-i (m - n) theta) psi_m(x) psi_n(x)

A squeezed vacuum with ``r > 0`` has its minimum variance ``exp(-2r)/2`` at
``theta = 0``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize

from .specfun import HERMITE_MAX_ARG, hermite_functions, laguerre_functions

__all__ = [
    "StateSpec",
    "FockStateModel",
    "BUNDLED_STATES",
    "TAIL_TOLERANCE",
    "MAX_DIM",
    "make_state",
    "wigner_of_state",
    "wigner_origin_parity",
    "marginal_of_state",
    "radon_numeric",
    "wigner_kernel_bank",
    "mean_photon_number",
]

TAIL_TOLERANCE = 1e-9
MAX_DIM = 128
_LONG_DIM = 600
_CHUNK = 1 << 16

KINDS = ("fock_mixture", "thermal", "squeezed_vacuum", "photon_subtracted_squeezed", "cat_odd")
_PARAM_KEYS = {
    "thermal": ("nbar",),
    "squeezed_vacuum": ("r",),
    "photon_subtracted_squeezed": ("r",),
    "cat_odd": ("nbar",),
}


class TruncationError(ValueError):
    """Raised when a state cannot be truncated within the dimension cap."""


@dataclass(frozen=True)
class StateSpec:
    """Description of a target state.

    ``params`` holds ``{photon_number: weight}`` for ``fock_mixture``,
    ``nbar`` for ``thermal`` and ``cat_odd`` (target mean photon number) and
    ``r`` (squeezing parameter) for the two squeezed kinds.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "fock_mixture":
            weights = {int(k): float(v) for k, v in self.params.items()}
            if not weights:
                raise ValueError("fock_mixture needs at least one weight")
            if any(k < 0 for k in weights) or any(w < 0 for w in weights.values()):
                raise ValueError("fock_mixture photon numbers and weights must be non-negative")
            if abs(sum(weights.values()) - 1.0) > 1e-12:
                raise ValueError(f"fock_mixture weights sum to {sum(weights.values())!r}, not 1")
            object.__setattr__(self, "params", dict(sorted(weights.items())))
            return
        keys = _PARAM_KEYS[self.kind]
        if set(self.params) != set(keys):
            raise ValueError(f"{self.kind} takes parameters {keys}, got {tuple(self.params)}")
        params = {k: float(v) for k, v in self.params.items()}
        if not all(math.isfinite(v) for v in params.values()):
            raise ValueError("state parameters must be finite")
        if self.kind in ("thermal", "cat_odd") and params["nbar"] <= 0:
            raise ValueError(f"{self.kind} requires nbar > 0")
        if self.kind == "photon_subtracted_squeezed" and params["r"] == 0:
            raise ValueError("photon subtraction from the vacuum is undefined (r = 0)")
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, text):
        """Parse ``kind[:key=value,...]`` or one of the bundled state names."""
        text = text.strip()
        if text in BUNDLED_STATES:
            return BUNDLED_STATES[text]
        if text == "vacuum":
            return cls("fock_mixture", {0: 1.0})
        kind, _, rest = text.partition(":")
        params = {}
        if rest:
            for item in rest.split(","):
                key, sep, value = item.partition("=")
                if not sep:
                    raise ValueError(f"malformed state parameter {item!r} in {text!r}")
                try:
                    params[key.strip()] = float(value)
                except ValueError:
                    raise ValueError(f"state parameter {key!r} is not a number: {value!r}") from None
        return cls(kind.strip(), params)

    def to_string(self):
        body = ",".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.kind}:{body}"

    def to_dict(self):
        return {"kind": self.kind, "params": {str(k): v for k, v in self.params.items()}}


@dataclass(frozen=True, eq=False)
class FockStateModel:
    """Truncated density matrix ``rho[m, n] = <m|rho|n>``.

    ``ket`` is kept for pure states so marginals cost O(dim) per point.
    The arrays are made read-only on construction.  ``validate=False``
    skips the unit-trace and positivity checks, for matrices estimated
    from noisy data.
    """

    rho: np.ndarray
    label: str = ""
    ket: np.ndarray | None = None
    validate: bool = True

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix has non-finite entries")
        rho = 0.5 * (rho + rho.conj().T)
        if self.validate:
            if abs(np.trace(rho).real - 1.0) > 1e-9:
                raise ValueError(f"density matrix trace {np.trace(rho).real!r} differs from 1")
            if np.linalg.eigvalsh(rho).min() < -1e-9:
                raise ValueError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if self.ket is not None:
            ket = np.array(self.ket, dtype=complex)
            ket.setflags(write=False)
            object.__setattr__(self, "ket", ket)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.rho).real)

    @property
    def is_diagonal(self):
        return not np.any(self.rho - np.diag(np.diag(self.rho)))

    @classmethod
    def from_ket(cls, ket, label=""):
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()), label, ket)


# ---------------------------------------------------------------------------
# State construction
# ---------------------------------------------------------------------------

def _cut_dim(probs):
    """Smallest dimension whose discarded tail of ``probs`` is below tolerance."""
    tail = np.cumsum(probs[::-1])[::-1]  # tail[D] = sum_{n >= D} probs[n]
    ok = np.nonzero(tail < TAIL_TOLERANCE)[0]
    ok = ok[ok >= 1]
    if ok.size == 0 or ok[0] > MAX_DIM:
        achieved = tail[MAX_DIM] if MAX_DIM < tail.size else float("nan")
        raise TruncationError(
            f"state needs more than {MAX_DIM} Fock levels; tail mass at the cap is {achieved:.3e}"
        )
    return int(ok[0])


def _squeezed_ket(r, size):
    c = np.zeros(size)
    k = np.arange(size // 2 + size % 2)
    t = math.tanh(abs(r))
    with np.errstate(divide="ignore"):
        logmag = (
            0.5 * np.array([math.lgamma(2 * kk + 1) for kk in k])
            - k * math.log(2.0)
            - np.array([math.lgamma(kk + 1) for kk in k])
            + k * (math.log(t) if t > 0 else -np.inf)
            - 0.5 * math.log(math.cosh(r))
        )
    mag = np.exp(logmag)
    if t == 0:
        mag[0] = 1.0
    sign = (-np.sign(r)) ** k
    c[2 * k] = sign * mag
    return c


def _odd_cat_alpha(nbar):
    # mean photon number of the odd cat is |alpha|^2 coth(|alpha|^2) > 1
    if nbar <= 1.0:
        raise ValueError("an odd cat state has mean photon number > 1")
    f = lambda a2: a2 / math.tanh(a2) - nbar
    a2 = optimize.bisect(f, 1e-12, nbar + 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.sqrt(a2)


def _pure_from_long(c, label):
    probs = np.abs(c) ** 2
    probs = probs / probs.sum()
    dim = _cut_dim(probs)
    return FockStateModel.from_ket(c[:dim], label)


def make_state(spec):
    """Build the truncated density matrix for ``spec``.

    The Fock dimension is the smallest one whose discarded tail carries less
    than ``TAIL_TOLERANCE`` probability (capped at ``MAX_DIM``); the kept
    block is renormalised to unit trace.
    """
    if isinstance(spec, str):
        spec = StateSpec.parse(spec)
    label = spec.to_string()
    kind, prm = spec.kind, spec.params
    if kind == "fock_mixture":
        dim = max(prm) + 1
        if dim > MAX_DIM:
            raise TruncationError(f"photon number {dim - 1} exceeds the cap {MAX_DIM - 1}")
        rho = np.zeros((dim, dim))
        for n, w in prm.items():
            rho[n, n] = w
        ket = None
        nonzero = [n for n, w in prm.items() if w > 0]
        if len(nonzero) == 1:
            ket = np.zeros(dim)
            ket[nonzero[0]] = 1.0
        return FockStateModel(rho, label, ket)
    if kind == "thermal":
        nbar = prm["nbar"]
        ratio = nbar / (1.0 + nbar)
        probs = (1.0 - ratio) * ratio ** np.arange(_LONG_DIM * 4)
        dim = _cut_dim(probs)
        p = probs[:dim] / probs[:dim].sum()
        return FockStateModel(np.diag(p), label)
    if kind == "squeezed_vacuum":
        return _pure_from_long(_squeezed_ket(prm["r"], _LONG_DIM), label)
    if kind == "photon_subtracted_squeezed":
        c = _squeezed_ket(prm["r"], _LONG_DIM + 1)
        sub = np.sqrt(np.arange(1, _LONG_DIM + 1)) * c[1:]
        return _pure_from_long(sub, label)
    if kind == "cat_odd":
        alpha = _odd_cat_alpha(prm["nbar"])
        n = np.arange(_LONG_DIM)
        logmag = n * math.log(alpha) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
        c = np.where(n % 2 == 1, np.exp(logmag - logmag.max()), 0.0)
        return _pure_from_long(c, label)
    raise ValueError(f"unknown state kind {kind!r}")


BUNDLED_STATES = {
    "mixture": StateSpec("fock_mixture", {0: 0.2, 1: 0.8}),
    "thermal": StateSpec("thermal", {"nbar": 1.0}),
    "squeezed": StateSpec("squeezed_vacuum", {"r": 0.5}),
    "photon_subtracted": StateSpec("photon_subtracted_squeezed", {"r": 0.3}),
    "cat": StateSpec("cat_odd", {"nbar": 3.0}),
}


def mean_photon_number(state):
    return float(np.dot(np.arange(state.dim), np.diag(state.rho).real))


# ---------------------------------------------------------------------------
# Phase-space evaluators
# ---------------------------------------------------------------------------

def _chunked(func, *arrays):
    """Evaluate ``func`` over broadcast arrays in flat chunks."""
    arrays = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in arrays])
    shape = arrays[0].shape
    flat = [a.ravel() for a in arrays]
    out = np.empty(flat[0].size)
    for start in range(0, out.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = func(*[a[sl] for a in flat])
    return out.reshape(shape)


def _wigner_flat(rho, q, p):
    dim = rho.shape[0]
    x = 2.0 * (q * q + p * p)
    phi = np.arctan2(p, q)
    total = np.zeros_like(q)
    sign = (-1.0) ** np.arange(dim)
    for d in range(dim):
        coef = sign[: dim - d] * np.diagonal(rho, -d)  # rho[n+d, n]
        if not np.any(coef):
            continue
        f = laguerre_functions(dim - 1 - d, d, x)
        s = np.tensordot(coef, f, axes=1)
        if d == 0:
            total += s.real
        else:
            total += 2.0 * (s * np.exp(-1j * d * phi)).real
    return total / np.pi


def wigner_of_state(state, q, p):
    """Wigner function ``W(q, p)`` of a truncated state (vectorised)."""
    scalar = np.ndim(q) == 0 and np.ndim(p) == 0
    out = _chunked(lambda a, b: _wigner_flat(state.rho, a, b), q, p)
    return float(out) if scalar else out


def wigner_kernel_bank(nmax, q, p):
    """Wigner functions of the operators ``|m><n|`` for ``m, n <= nmax``.

    Returns a complex array of shape ``(nmax+1, nmax+1) + q.shape`` with
    ``bank[m, n] = W_{|m><n|}(q, p)`` so that ``W_rho = sum rho_mn bank[m, n]``
    and ``rho_mn = 2 pi  integral W_rho conj(bank[m, n])``.
    """
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    x = 2.0 * (q * q + p * p)
    phi = np.arctan2(p, q)
    bank = np.zeros((nmax + 1, nmax + 1) + q.shape, dtype=complex)
    for d in range(nmax + 1):
        f = laguerre_functions(nmax - d, d, x)
        phase = np.exp(-1j * d * phi) / np.pi
        for n in range(nmax + 1 - d):
            k = (-1.0) ** n * f[n] * phase
            bank[n + d, n] = k
            if d:
                bank[n, n + d] = k.conj()
    return bank


def wigner_origin_parity(state):
    """Origin value ``(1/pi) sum_n (-1)^n rho_nn`` of the unit-normalised Wigner function."""
    diag = np.diag(state.rho).real
    return float(np.dot((-1.0) ** np.arange(state.dim), diag) / np.pi)


def _marginal_flat(state, x, theta):
    out = np.zeros_like(x)
    inside = np.abs(x) <= HERMITE_MAX_ARG
    if not np.any(inside):
        return out
    xi, ti = x[inside], theta[inside]
    psi = hermite_functions(state.dim - 1, xi)
    if state.is_diagonal:
        val = np.tensordot(np.diag(state.rho).real, psi * psi, axes=1)
    else:
        m = np.arange(state.dim)[:, None]
        phi = psi * np.exp(-1j * m * ti[None, :])
        if state.ket is not None:
            val = np.abs(np.tensordot(state.ket, phi, axes=1)) ** 2
        else:
            val = np.einsum("mj,mj->j", phi, state.rho @ phi.conj()).real
    out[inside] = np.where(val < 0.0, 0.0, val)
    return out


def marginal_of_state(state, x, theta):
    """Homodyne marginal density ``p(x, theta)``; vectorised, clamped at zero."""
    scalar = np.ndim(x) == 0 and np.ndim(theta) == 0
    theta = np.mod(np.asarray(theta, dtype=float), 2.0 * np.pi)
    out = _chunked(lambda a, b: _marginal_flat(state, a, b), x, theta)
    return float(out) if scalar else out


def radon_numeric(state, x, theta, half_width=8.0, step=0.01):
    """Line integral of the Wigner function along ``q cos(theta) + p sin(theta) = x``.

    Trapezoid rule over ``t in [-half_width, half_width]``; the integrand is
    smooth and Gaussian-decaying, so the rule converges spectrally.
    """
    t = np.arange(-half_width, half_width + 0.5 * step, step)
    c, s = math.cos(theta), math.sin(theta)
    w = wigner_of_state(state, x * c - t * s, x * s + t * c)
    return float(np.trapezoid(w, t))
