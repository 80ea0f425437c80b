"""Orthogonal special functions evaluated by stable recurrences.

All evaluators accept scalars or numpy arrays for the real argument and
return a float for scalar input, an ndarray otherwise.  The ``*_closed_form``
functions are slow exact references used by the identity suite and tests.
"""

from fractions import Fraction
import math

import numpy as np

__all__ = [
    "chebyshev_u",
    "chebyshev_u_all",
    "zernike_radial",
    "zernike_radial_all",
    "bessel_j",
    "hermite_function",
    "hermite_functions",
    "laguerre_assoc",
    "laguerre_functions",
    "chebyshev_u_closed_form",
    "zernike_radial_closed_form",
    "bessel_j_series",
]

BESSEL_MAX_ORDER = 64
BESSEL_MAX_ARG = 100.0
HERMITE_MAX_ORDER = 128
HERMITE_MAX_ARG = 40.0


def _as_output(value, scalar):
    return float(value) if scalar else value


def _check_degree(s, name="s"):
    if int(s) != s or s < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {s!r}")
    return int(s)


# ---------------------------------------------------------------------------
# Chebyshev polynomials of the second kind
# ---------------------------------------------------------------------------

def chebyshev_u_all(smax, x):
    """Return ``U_0(x) ... U_smax(x)`` stacked along a new leading axis."""
    smax = _check_degree(smax, "smax")
    x = np.asarray(x, dtype=float)
    out = np.empty((smax + 1,) + x.shape)
    out[0] = 1.0
    if smax >= 1:
        out[1] = 2.0 * x
    for s in range(1, smax):
        out[s + 1] = 2.0 * x * out[s] - out[s - 1]
    return out


def chebyshev_u(s, x):
    """Chebyshev polynomial of the second kind ``U_s(x)``.

    Uses the three-term recurrence ``U_{s+1} = 2x U_s - U_{s-1}`` seeded
    with ``U_0 = 1`` and ``U_1 = 2x``.  Arguments outside ``[-1, 1]`` are
    evaluated by the same recurrence.
    """
    s = _check_degree(s)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if s == 0:
        return _as_output(prev, scalar)
    cur = 2.0 * x
    for _ in range(1, s):
        prev, cur = cur, 2.0 * x * cur - prev
    return _as_output(cur, scalar)


# ---------------------------------------------------------------------------
# Zernike radial polynomials
# ---------------------------------------------------------------------------

def _check_zernike(s, n):
    s = _check_degree(s)
    if int(n) != n:
        raise ValueError(f"angular order must be an integer, got {n!r}")
    t = abs(int(n))
    if s < t:
        raise ValueError(f"Zernike degree s={s} is smaller than |n|={t}")
    if (s - t) % 2:
        raise ValueError(f"Zernike degree s={s} and |n|={t} differ by an odd number")
    return s, t


def _check_unit_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < 0.0) or np.any(r > 1.0 + 1e-12):
        raise ValueError("Zernike radius must lie in [0, 1]")
    return r


def zernike_radial_all(n, mmax, r):
    """Return ``R^n_{n+2m}(r)`` for ``m = 0..mmax`` along a new leading axis.

    Seeded with ``R^n_n = r^n`` and advanced with the Prata recurrence.
    """
    t = abs(int(n))
    mmax = _check_degree(mmax, "mmax")
    r = _check_unit_radius(r)
    r2 = r * r
    out = np.empty((mmax + 1,) + r.shape)
    out[0] = r**t
    for m in range(mmax):
        s = t + 2 * m
        a = (t + m) ** 2 / s if s > 0 else 0.0
        b = (m + 1) ** 2 / (s + 2)
        pref = (s + 2) / ((m + 1) * (t + m + 1))
        term = ((s + 1) * r2 - a - b) * out[m]
        if m > 0:
            term = term - m * (t + m) / s * out[m - 1]
        out[m + 1] = pref * term
    return out


def zernike_radial(s, n, r):
    """Zernike radial polynomial ``R_s^{|n|}(r)`` on the unit disk.

    Parameters
    ----------
    s : int
        Radial degree, ``s >= |n|`` with ``s - |n|`` even.
    n : int
        Angular order; only ``|n|`` matters since ``R_s^{-n} = R_s^{n}``.
    r : float or array_like
        Radius in ``[0, 1]``.

    Raises
    ------
    ValueError
        If ``(s, n)`` is outside the Zernike family or ``r`` leaves the disk.
        An invalid pair is an indexing error, never silently zero.
    """
    s, t = _check_zernike(s, n)
    scalar = np.ndim(r) == 0
    vals = zernike_radial_all(t, (s - t) // 2, r)[-1]
    return _as_output(vals, scalar)


# ---------------------------------------------------------------------------
# Bessel functions of the first kind
# ---------------------------------------------------------------------------

def _bessel_series(n, x):
    # sum_k (-1)^k (x/2)^(2k+n) / (k! (n+k)!) ; x > 0
    half = 0.5 * x
    if half == 0.0:  # x/2 underflowed; J_n(x) ~ (x/2)^n / n! is zero for n >= 1
        return 1.0 if n == 0 else 0.0
    term = math.exp(n * math.log(half) - math.lgamma(n + 1))
    total = term
    q = half * half
    k = 0
    while True:
        k += 1
        term *= -q / (k * (n + k))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > q:
            break
    return total


def _bessel_miller(n, x):
    # Backward recurrence normalised by J_0 + 2 sum_k J_2k = 1; x > 0
    top = max(n, int(x)) + 20 + int(math.sqrt(40.0 * max(n, int(x) + 1)))
    top += top % 2
    jp1, j = 0.0, 1.0e-30
    norm = 0.0
    result = 0.0
    for k in range(top, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1, j = j, jm1
        # j now holds the unnormalised J_{k-1}
        if k - 1 == n:
            result = j
        if k - 1 > 0 and (k - 1) % 2 == 0:
            norm += 2.0 * j
        if abs(j) > 1e250:
            j *= 1e-250
            jp1 *= 1e-250
            norm *= 1e-250
            result *= 1e-250
    norm += j
    return result / norm


def _bessel_scalar(n, x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    sign = 1.0
    if x < 0.0:
        x = -x
        sign = -1.0 if n % 2 else 1.0
    if x <= max(5.0, 0.5 * n):
        return sign * _bessel_series(n, x)
    return sign * _bessel_miller(n, x)


def bessel_j(n, x):
    """Bessel function of the first kind ``J_n(x)``.

    Power series for ``|x| <= max(5, n/2)`` and Miller's normalised backward
    recurrence beyond that; absolute accuracy is better than ``1e-10`` over
    ``0 <= n <= 64``, ``|x| <= 100``.
    """
    n = _check_degree(n, "n")
    if n > BESSEL_MAX_ORDER:
        raise ValueError(f"Bessel order {n} exceeds supported maximum {BESSEL_MAX_ORDER}")
    scalar = np.ndim(x) == 0
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(np.abs(xa) > BESSEL_MAX_ARG):
        raise ValueError(f"Bessel argument must satisfy |x| <= {BESSEL_MAX_ARG}")
    if scalar:
        return _bessel_scalar(n, float(xa))
    flat = np.array([_bessel_scalar(n, float(v)) for v in xa.ravel()])
    return flat.reshape(xa.shape)


def bessel_j_series(n, x, terms=400):
    """Reference ``J_n(x)`` from the power series in exact rational arithmetic.

    Only for modest ``|x|``; used as an independent oracle.
    """
    xq = Fraction(x)
    half = xq / 2
    total = Fraction(0)
    term = half**n / math.factorial(n)
    for k in range(terms):
        total += term
        term = -term * half * half / ((k + 1) * (n + k + 1))
        # past the peak the terms shrink monotonically; 1e-30 is far below rounding
        if k > abs(x) and abs(term) < Fraction(1, 10**30):
            break
    return float(total)


# ---------------------------------------------------------------------------
# Hermite functions (oscillator eigenfunctions, vacuum variance 1/2)
# ---------------------------------------------------------------------------

def _check_hermite(nmax, x):
    nmax = _check_degree(nmax, "n")
    if nmax > HERMITE_MAX_ORDER:
        raise ValueError(f"Hermite order {nmax} exceeds {HERMITE_MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > HERMITE_MAX_ARG):
        raise ValueError(f"Hermite argument must satisfy |x| <= {HERMITE_MAX_ARG}")
    return nmax, x


def hermite_functions(nmax, x):
    """Return ``psi_0(x) ... psi_nmax(x)`` stacked along a new leading axis."""
    nmax, x = _check_hermite(nmax, x)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, nmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_function(n, x):
    """Normalised oscillator eigenfunction ``psi_n(x)`` with ``x = (a + a^dag)/sqrt(2)``."""
    scalar = np.ndim(x) == 0
    n, x = _check_hermite(n, x)
    prev = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if n == 0:
        return _as_output(prev, scalar)
    cur = math.sqrt(2.0) * x * prev
    for k in range(1, n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return _as_output(cur, scalar)


# ---------------------------------------------------------------------------
# Associated Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre_assoc(n, k, x):
    """Associated Laguerre polynomial ``L_n^{(k)}(x)`` by upward recurrence."""
    n = _check_degree(n, "n")
    k = _check_degree(k, "k")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return _as_output(prev, scalar)
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return _as_output(cur, scalar)


def laguerre_functions(nmax, d, x):
    """Normalised Laguerre functions used by the Fock-basis Wigner kernel.

    Returns ``f_n(x) = sqrt(n!/(n+d)!) x^{d/2} e^{-x/2} L_n^{(d)}(x)`` for
    ``n = 0..nmax`` stacked on a leading axis.  The normalised recurrence
    keeps every intermediate of order one, so high ``n`` and ``d`` neither
    overflow nor underflow prematurely.
    """
    nmax = _check_degree(nmax, "nmax")
    d = _check_degree(d, "d")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    if d == 0:
        out[0] = np.exp(-0.5 * x)
    else:
        out[0] = np.where(x > 0.0, np.exp(0.5 * d * logx - 0.5 * x - 0.5 * math.lgamma(d + 1)), 0.0)
    if nmax >= 1:
        out[1] = (1.0 + d - x) * out[0] / math.sqrt(1.0 + d)
    for j in range(1, nmax):
        out[j + 1] = ((2 * j + 1 + d - x) * out[j] - math.sqrt(j * (j + d)) * out[j - 1]) / math.sqrt(
            (j + 1) * (j + 1 + d)
        )
    return out


# ---------------------------------------------------------------------------
# Exact closed forms (oracles)
# ---------------------------------------------------------------------------

def _exact_power_sum(coeffs, x):
    """Evaluate ``sum_k c_k x^{e_k}`` exactly; ``coeffs`` is [(c, e), ...]."""
    xq = Fraction(x)
    return float(sum(Fraction(c) * xq**e for c, e in coeffs))


def chebyshev_u_closed_form(s, x):
    """``U_s(x) = sum_k (-1)^k C(s-k, k) (2x)^{s-2k}`` in exact arithmetic."""
    s = _check_degree(s)
    coeffs = [((-1) ** k * math.comb(s - k, k) * 2 ** (s - 2 * k), s - 2 * k) for k in range(s // 2 + 1)]
    return _exact_power_sum(coeffs, x)


def zernike_radial_closed_form(s, n, r):
    """Factorial-sum Zernike radial polynomial with exact integer factorials."""
    s, t = _check_zernike(s, n)
    f = math.factorial
    coeffs = [
        ((-1) ** k * Fraction(f(s - k), f(k) * f((s + t) // 2 - k) * f((s - t) // 2 - k)), s - 2 * k)
        for k in range((s - t) // 2 + 1)
    ]
    return _exact_power_sum(coeffs, r)
