"""Acceptance criteria 1-10 at their stated tolerances.

Each test records a one-line PASS/FAIL verdict (collected in the terminal
summary) and then asserts it.  Run directly with
``python tests/test_acceptance.py`` or through pytest.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy import special, stats

from conftest import ACCEPTANCE_LINES, MIXTURE_ORIGIN, THERMAL_ORIGIN
from wigtomo.analysis import bootstrap_study, density_from_wigner, distance_study, mc_study, reconstruct_grid
from wigtomo.fbp import FbpConfig, fbp_point
from wigtomo.grid import GridSpec
from wigtomo.identities import run_identity_suite
from wigtomo.pse import PseConfig, estimate_coefficients, pse_origin, pse_origin_sigma
from wigtomo.sampling import mix_seed, sample_dataset
from wigtomo.states import (
    BUNDLED_STATES,
    marginal_of_state,
    radon_numeric,
    wigner_of_state,
    wigner_origin_parity,
)

SEEDS = 20
FBP = FbpConfig(8.0)
PSE = PseConfig(N=8, M=30)


def verdict(number, passed, detail, seconds, limit):
    ok = bool(passed) and seconds < limit
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail} [{seconds:.1f} s, limit {limit:g} s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_01_identity_suite():
    t0 = time.perf_counter()
    results = run_identity_suite()
    worst = ", ".join(f"{r.name} {r.max_error:.1e}" for r in results)
    ok = verdict(1, all(r.passed for r in results), f"identity suite ({worst})", time.perf_counter() - t0, 10)
    assert ok


def test_criterion_02_convention_lock(bundled):
    t0 = time.perf_counter()
    xs = np.linspace(-3.0, 3.0, 5)
    thetas = (0.0, 0.9, 2.3, 4.4)
    radon_err = max(
        abs(radon_numeric(s, x, th) - marginal_of_state(s, x, th)) for s in bundled.values() for x in xs for th in thetas
    )
    parity_err = max(abs(wigner_of_state(s, 0.0, 0.0) - wigner_origin_parity(s)) for s in bundled.values())
    ok = verdict(
        2,
        radon_err < 1e-6 and parity_err < 1e-9,
        f"radon vs marginal {radon_err:.1e} (tol 1e-6), origin vs parity {parity_err:.1e} (tol 1e-9)",
        time.perf_counter() - t0,
        30,
    )
    assert ok


def origin_medians(state, J_list, master):
    """20-seed medians of W(0,0) and its reported sigma for both algorithms."""
    out = {"fbp": [], "pse": []}
    for J in J_list:
        vals = {"fbp": [], "pse": []}
        for k in range(SEEDS):
            data = sample_dataset(state, J, seed=mix_seed(mix_seed(master, k), J))
            est = fbp_point(data, FBP, 0.0, 0.0)
            vals["fbp"].append((est.value, est.sigma))
            table = estimate_coefficients(data, PSE)
            vals["pse"].append((pse_origin(table), pse_origin_sigma(table)))
        for name, v in vals.items():
            arr = np.array(v)
            out[name].append((J, float(np.median(arr[:, 0])), float(np.median(arr[:, 1]))))
    return out


def check_origin_reproduction(number, state, target, master):
    t0 = time.perf_counter()
    meds = origin_medians(state, [5_000, 20_000, 80_000, 320_000], master)
    ok, parts = True, []
    for name, rows in meds.items():
        within = all(abs(w - target) <= 3 * s for _, w, s in rows)
        sig = [s for _, _, s in rows]
        shrinking = all(b < a for a, b in zip(sig, sig[1:]))
        ok &= within and shrinking
        worst = max(abs(w - target) / s for _, w, s in rows)
        parts.append(f"{name} max |W-target|/sigma {worst:.2f}, sigma {sig[0]:.4f}->{sig[-1]:.4f}")
    return verdict(number, ok, f"target {target:.5f}; " + "; ".join(parts), time.perf_counter() - t0, 300)


def test_criterion_03_mixture_origin(mixture):
    assert check_origin_reproduction(3, mixture, MIXTURE_ORIGIN, 3003)


def test_criterion_04_thermal_origin(thermal):
    assert check_origin_reproduction(4, thermal, THERMAL_ORIGIN, 4004)


def test_criterion_05_error_estimators(mixture):
    t0 = time.perf_counter()
    J, K = 100_000, 100
    algos = {"fbp": FbpConfig(7.0), "pse": PseConfig(N=8, M=30)}
    data = sample_dataset(mixture, J, seed=5005)
    ok, parts = True, []
    for name, cfg in algos.items():
        mc = mc_study(mixture, J, K, cfg, master_seed=5105)
        r_mc = mc.mc_sigma / mc.mean_reported_sigma
        boot = bootstrap_study(data, K, cfg, master_seed=5205)
        if name == "fbp":
            direct = fbp_point(data, cfg, 0.0, 0.0).sigma
        else:
            direct = pse_origin_sigma(estimate_coefficients(data, cfg))
        r_boot = boot.mc_sigma / direct
        ok &= abs(r_mc - 1) <= 0.3 and abs(r_boot - 1) <= 0.3
        parts.append(f"{name} mc/direct {r_mc:.3f}, bootstrap/direct {r_boot:.3f}")
    assert verdict(5, ok, "; ".join(parts) + " (tol 30%)", time.perf_counter() - t0, 600)


def test_criterion_06_inverse_root_law(thermal):
    t0 = time.perf_counter()
    Js = np.array([1_000, 10_000, 100_000])
    # a fixed disk keeps the estimator itself unchanged across J
    algos = {"fbp": FBP, "pse": PseConfig(N=8, M=30, L=7.0)}
    sig = {name: [] for name in algos}
    for J in Js:
        per = {name: [] for name in algos}
        for k in range(SEEDS):
            data = sample_dataset(thermal, int(J), seed=mix_seed(mix_seed(6006, k), int(J)))
            per["fbp"].append(fbp_point(data, algos["fbp"], 0.0, 0.0).sigma)
            per["pse"].append(pse_origin_sigma(estimate_coefficients(data, algos["pse"])))
        for name in algos:
            sig[name].append(np.mean(per[name]))
    ok, parts = True, []
    for name in algos:
        slope = np.polyfit(np.log(Js), np.log(sig[name]), 1)[0]
        ok &= abs(slope + 0.5) <= 0.05
        parts.append(f"{name} slope {slope:.4f}")
    assert verdict(6, ok, "; ".join(parts) + " (target -0.5 +- 0.05)", time.perf_counter() - t0, 300)


def coefficient_oracle(state, N, M, L, n_x, n_theta):
    """Expected coefficients by Gauss-Legendre in x and the trapezoid rule in theta."""
    u, wu = np.polynomial.legendre.leggauss(n_x)
    x = L * u
    theta = np.arange(n_theta) * (2 * math.pi / n_theta)
    p = marginal_of_state(state, x[None, :], theta[:, None])
    w = np.empty((N + 1, M + 1), dtype=complex)
    for n in range(N + 1):
        phase = np.exp(-1j * n * theta)
        for m in range(M + 1):
            s = n + 2 * m
            inner = (p * special.eval_chebyu(s, u)[None, :]) @ (wu * L)
            w[n, m] = (s + 1) / (math.pi * L) * np.mean(phase * inner)
    return w


def test_criterion_07_coefficient_oracle(thermal):
    t0 = time.perf_counter()
    N, M, L, J = 4, 6, 6.0, 100_000
    cfg = PseConfig(N=N, M=M, L=L)
    tables = [estimate_coefficients(sample_dataset(thermal, J, seed=mix_seed(7007, k)), cfg) for k in range(SEEDS)]
    mean = np.mean([t.w for t in tables], axis=0)
    var_mean = np.mean([t.variance() for t in tables], axis=0) / SEEDS
    oracle = coefficient_oracle(thermal, N, M, L, 160, 64)
    oracle_err = np.abs(oracle - coefficient_oracle(thermal, N, M, L, 320, 128))
    se = np.sqrt(var_mean + oracle_err**2)
    z = np.abs(mean - oracle) / se
    detail = f"{z.size} coefficients, max |mean-oracle|/SE {z.max():.2f} (tol 3), oracle error {oracle_err.max():.1e}"
    assert verdict(7, np.all(z <= 3), detail, time.perf_counter() - t0, 300)


def test_criterion_08_distance_ordering():
    t0 = time.perf_counter()
    Js = [5_000, 20_000, 80_000]
    ok, parts, trends = True, [], 0
    for name in ("thermal", "mixture"):
        pse, fbp = distance_study(BUNDLED_STATES[name], [PSE, FBP], Js, 100, master_seed=8008)
        for curve in (pse, fbp):
            for metric in ("mean_d_L2", "mean_d_F"):
                v = [getattr(r, metric) for r in curve.rows]
                dec = all(b < a for a, b in zip(v, v[1:]))
                ok &= dec
                trends += dec
                if not dec:
                    parts.append(f"{name} {curve.label} {metric} not decreasing {np.round(v, 4).tolist()}")
        last_p, last_f = pse.rows[-1], fbp.rows[-1]
        for metric in ("d_L2", "d_F"):
            a, b = getattr(last_p, metric), getattr(last_f, metric)
            pval = stats.ttest_rel(a, b, alternative="less").pvalue
            better = pval < 0.05
            ok &= better
            parts.append(f"{name} {metric} at J=8e4 pse {a.mean():.4f} vs fbp {b.mean():.4f} (p={pval:.2g})")
    parts.insert(0, f"{trends}/8 mean distance curves strictly decreasing in J")
    assert verdict(8, ok, "; ".join(parts), time.perf_counter() - t0, 1800)


def test_criterion_09_round_trip(bundled):
    t0 = time.perf_counter()
    worst = {}
    for name, s in bundled.items():
        n_max = min(32, s.dim + 3)
        rho = density_from_wigner(lambda q, p, s=s: wigner_of_state(s, q, p), n_max=n_max).rho
        ref = np.zeros_like(rho)
        k = min(s.dim, n_max + 1)
        ref[:k, :k] = s.rho[:k, :k]
        worst[name] = float(np.abs(rho - ref).max())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (tol 1e-4)"
    assert verdict(9, max(worst.values()) <= 1e-4, detail, time.perf_counter() - t0, 120)


def test_criterion_10_normalisation(vacuum):
    t0 = time.perf_counter()
    data = sample_dataset(vacuum, 100_000, seed=10010)
    spec = GridSpec.square(6.0, 0.1)
    totals = {name: reconstruct_grid(data, cfg, spec, with_sigma=False).integral() for name, cfg in (("fbp", FBP), ("pse", PSE))}
    ok = all(abs(v - 1) <= 0.02 for v in totals.values())
    detail = ", ".join(f"{k} integral {v:.4f}" for k, v in totals.items()) + " (tol 2%)"
    assert verdict(10, ok, detail, time.perf_counter() - t0, 60)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
