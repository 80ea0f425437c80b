"""Numerical checks of the orthogonality and transform identities the
series-expansion method rests on.

Each check integrates with a quadrature rule that is independent of the
recurrences under test (Gauss-Legendre or Gauss-Chebyshev-U nodes from
numpy/scipy) and compares against the closed-form right-hand side.
"""

from dataclasses import dataclass
import math
import time

import numpy as np
from scipy.special import roots_chebyu

from .specfun import (
    bessel_j,
    chebyshev_u,
    chebyshev_u_closed_form,
    zernike_radial,
    zernike_radial_closed_form,
)

__all__ = [
    "IdentityCheck",
    "zernike_orthogonality",
    "chebyshev_u_orthogonality",
    "radon_of_zernike",
    "bessel_zernike",
    "recurrence_vs_closed_form",
    "zernike_endpoint",
    "run_identity_suite",
]

TIGHT = 1e-10
LOOSE = 1e-8


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    max_error: float
    tolerance: float
    cases: int
    seconds: float

    @property
    def passed(self):
        return self.max_error <= self.tolerance

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: max error {self.max_error:.3e} (tol {self.tolerance:.0e}, {self.cases} cases)"


def _valid_pairs(smax):
    return [(s, n) for s in range(smax + 1) for n in range(s % 2, s + 1, 2)]


def _timed(name, tol, func):
    t0 = time.perf_counter()
    err, cases = func()
    return IdentityCheck(name, float(err), tol, cases, time.perf_counter() - t0)


def zernike_orthogonality(smax=20, tol=LOOSE):
    """``int_0^1 R_s^n R_t^n r dr = delta_st / (2 (s + 1))``."""

    def run():
        # integrand is a polynomial of degree <= 2 smax + 1 in r
        t, w = np.polynomial.legendre.leggauss(smax + 2)
        r = 0.5 * (t + 1.0)
        w = 0.5 * w
        err, cases = 0.0, 0
        for n in range(smax + 1):
            degrees = list(range(n, smax + 1, 2))
            R = np.array([zernike_radial(s, n, r) for s in degrees])
            gram = (R * w * r) @ R.T
            expect = np.diag([1.0 / (2 * (s + 1)) for s in degrees])
            err = max(err, np.abs(gram - expect).max())
            cases += gram.size
        return err, cases

    return _timed("zernike orthogonality", tol, run)


def chebyshev_u_orthogonality(smax=30, tol=LOOSE):
    """``int_{-1}^1 U_s U_t sqrt(1 - x^2) dx = (pi/2) delta_st``, Gauss-Chebyshev-U nodes."""

    def run():
        x, w = roots_chebyu(smax + 1)
        U = np.array([chebyshev_u(s, x) for s in range(smax + 1)])
        gram = (U * w) @ U.T
        return np.abs(gram - 0.5 * math.pi * np.eye(smax + 1)).max(), gram.size

    return _timed("chebyshev-U orthogonality", tol, run)


def _probes(count=12):
    # deterministic spread of (x, theta) inside the open strip
    k = np.arange(count)
    x = np.cos(math.pi * (k + 0.5) / count) * 0.97
    theta = (2.0 * math.pi * 0.618033988749895 * k) % (2.0 * math.pi)
    return x, theta


def radon_of_zernike(smax=12, tol=LOOSE, probes=12):
    """Line integral of ``R_s^n(r) e^{i n phi}`` along ``q cos(theta) + p sin(theta) = x``
    equals ``2/(s+1) sqrt(1 - x^2) U_s(x) e^{i n theta}``.

    The chord inside the unit disk is parametrised by arc length and
    integrated with Gauss-Legendre nodes; the integrand is a polynomial of
    degree ``s`` in the chord parameter, so the rule is exact up to rounding.
    """

    def run():
        t, w = np.polynomial.legendre.leggauss(smax + 4)
        xs, thetas = _probes(probes)
        err, cases = 0.0, 0
        for x, theta in zip(xs, thetas):
            half = math.sqrt(1.0 - x * x)
            u = half * t
            q = x * math.cos(theta) - u * math.sin(theta)
            p = x * math.sin(theta) + u * math.cos(theta)
            r = np.minimum(np.hypot(q, p), 1.0)
            phi = np.arctan2(p, q)
            for s, n in _valid_pairs(smax):
                for sn in {n, -n}:
                    line = half * np.sum(w * zernike_radial(s, n, r) * np.exp(1j * sn * phi))
                    expect = 2.0 / (s + 1) * half * chebyshev_u(s, x) * np.exp(1j * sn * theta)
                    err = max(err, abs(line - expect))
                    cases += 1
        return err, cases

    return _timed("radon of zernike", tol, run)


def bessel_zernike(pairs=((0, 0), (2, 0), (3, 1), (4, 2)), ks=(0.5, 2.0, 10.0), tol=LOOSE):
    """``int_0^1 R_m^n(r) J_n(k r) r dr = (-1)^{(m-n)/2} J_{m+1}(k) / k``."""

    def run():
        t, w = np.polynomial.legendre.leggauss(80)
        r = 0.5 * (t + 1.0)
        w = 0.5 * w
        err, cases = 0.0, 0
        for m, n in pairs:
            R = zernike_radial(m, n, r)
            for k in ks:
                lhs = np.sum(w * R * bessel_j(n, k * r) * r)
                rhs = (-1.0) ** ((m - n) // 2) * bessel_j(m + 1, k) / k
                err = max(err, abs(lhs - rhs))
                cases += 1
        return err, cases

    return _timed("bessel-zernike transform", tol, run)


def recurrence_vs_closed_form(smax=20, tol=TIGHT):
    """Recurrence values of ``U_s`` and ``R_s^n`` against exact rational sums."""

    def run():
        grid = [i / 10 for i in range(11)]
        err, cases = 0.0, 0
        for s, n in _valid_pairs(smax):
            for r in grid:
                err = max(err, abs(zernike_radial(s, n, r) - zernike_radial_closed_form(s, n, r)))
                cases += 1
        for s in range(smax + 1):
            for x in np.linspace(-1.0, 1.0, 21):
                err = max(err, abs(chebyshev_u(s, x) - chebyshev_u_closed_form(s, x)))
                cases += 1
        return err, cases

    return _timed("recurrence vs closed form", tol, run)


def zernike_endpoint(smax=20, tol=TIGHT):
    """``R_s^n(1) = 1`` for every valid pair."""

    def run():
        vals = np.array([zernike_radial(s, n, 1.0) for s, n in _valid_pairs(smax)])
        return np.abs(vals - 1.0).max(), vals.size

    return _timed("zernike endpoint", tol, run)


def run_identity_suite():
    """Run every check and return the list of :class:`IdentityCheck` results."""
    return [
        zernike_orthogonality(),
        chebyshev_u_orthogonality(),
        radon_of_zernike(),
        bessel_zernike(),
        recurrence_vs_closed_form(),
        zernike_endpoint(),
    ]
