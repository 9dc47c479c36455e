"""Acceptance battery.

One test per criterion; each prints a single verdict line so the whole
battery reads as a ten-line report under ``pytest -s tests/test_acceptance.py``.
"""

import cmath
import math
import os
import subprocess
import sys
import time

import numpy as np
import scipy.special as sp

from abprop.model import FieldParams, PolarPoint, apply_hamiltonian
from abprop.numerics import PolarGrid, integrate_adaptive
from abprop.propagator import (
    KernelQuery,
    kernel_closed,
    kernel_covering,
    kernel_partial_wave,
    mehler_kernel,
)
from abprop.specfun import SeriesControl, bessel_i, bessel_j, laguerre, poisson_laguerre_rhs
from abprop.spectrum import (
    ModeIndex,
    SpectralCoefficients,
    WaveFunction,
    eigenfunction,
    eigenvalue,
    gram_matrix,
    norm_sq,
    reconstruct_on_grid,
)
from abprop.evolve import (
    AdmissiblePair,
    apply_propagator,
    diffractive_bound_scan,
    dispersive_scan,
    evolve_spectral,
    lp_norm,
    strichartz_norm,
)


def _verdict(num, label, ok, detail):
    line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    print(line)
    assert ok, line


def test_criterion_01_gram_orthonormality():
    t0 = time.time()
    worst_off, worst_diag = 0.0, 0.0
    for alpha in (0.25, 0.5, 0.8):
        for b0 in (0.5, 1.0, 2.0):
            params = FieldParams(alpha, b0)
            gram, modes = gram_matrix(params, 5, 5)
            diag = np.real(np.diag(gram))
            ref = np.array([norm_sq(m, params) for m in modes])
            worst_diag = max(worst_diag, float(np.max(np.abs(diag - ref) / ref)))
            off = gram - np.diag(np.diag(gram))
            scale = np.sqrt(np.outer(diag, diag))
            worst_off = max(worst_off, float(np.max(np.abs(off) / scale)))
    elapsed = time.time() - t0
    ok = worst_off < 1e-8 and worst_diag < 1e-10 and elapsed < 30.0
    _verdict(1, "Gram matrix orthogonality",
             ok, f"off-diag {worst_off:.2e}, diag {worst_diag:.2e}, {elapsed:.1f} s")


def _residual(mode, params, n):
    radii = np.linspace(0.05, 6.0, n)
    g = np.array(
        [eigenfunction(mode, params, PolarPoint(r, 0.0)) for r in radii],
        dtype=complex,
    )
    lam = eigenvalue(mode, params)
    hg = apply_hamiltonian(g, mode.k, params, radii)
    return float(np.max(np.abs(hg - lam * g[2:-2])) / np.max(np.abs(g)))


def test_criterion_02_eigen_residual_order():
    params = FieldParams(0.25, 1.3)
    min_order = math.inf
    for k, m in ((0, 0), (1, 0), (-1, 1), (2, 2), (-2, 0), (0, 3), (3, 1), (-3, 2), (1, 2)):
        mode = ModeIndex(k, m)
        coarse = _residual(mode, params, 801)
        fine = _residual(mode, params, 1601)
        min_order = min(min_order, math.log2(coarse / fine))
    ok = min_order >= 1.9
    _verdict(2, "eigen-residual decay order", ok, f"min order {min_order:.2f} over 9 modes")


def test_criterion_03_special_function_identities():
    rng = np.random.default_rng(7)
    ctl = SeriesControl(4000, 1e-9)
    worst_watson = 0.0
    for _ in range(10):
        nu = float(rng.uniform(0.0, 2.0))
        a, b = rng.uniform(0.2, 3.0, size=2)

        def f(ts):
            return np.array(
                [
                    math.exp(-t * t)
                    * bessel_j(nu, a * t, ctl)
                    * bessel_j(nu, b * t, ctl)
                    * t
                    for t in np.atleast_1d(ts)
                ]
            )

        t_hi = min(7.0, 15.0 / max(a, b))
        lhs, _ = integrate_adaptive(f, 0.0, t_hi, tol=1e-11)
        rhs = 0.5 * math.exp(-(a * a + b * b) / 4.0) * sp.iv(nu, a * b / 2.0)
        worst_watson = max(worst_watson, abs(lhs - rhs))

    worst_pl = 0.0
    for _ in range(6):
        c = complex(rng.uniform(0.3, 1.5), rng.uniform(-1.2, 1.2))
        a, b = rng.uniform(0.2, 2.5, size=2)
        nu = float(rng.uniform(0.0, 2.0))
        closed = poisson_laguerre_rhs(c, a, b, nu)
        q = np.exp(-c)
        series = sum(
            math.exp(math.lgamma(mm + 1.0) - math.lgamma(mm + nu + 1.0))
            * laguerre(mm, nu, a)
            * laguerre(mm, nu, b)
            * q**mm
            for mm in range(260)
        )
        worst_pl = max(worst_pl, abs(series - closed) / max(1.0, abs(closed)))

    worst_bessel = 0.0
    for _ in range(40):
        nu = float(rng.uniform(0.0, 3.0))
        z = float(rng.uniform(0.5, 20.0)) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        a = bessel_i(nu, z, method="series")
        b = bessel_i(nu, z, method="integral")
        worst_bessel = max(worst_bessel, abs(a - b) / max(1.0, abs(a)))

    ok = worst_watson < 1e-8 and worst_pl < 1e-10 and worst_bessel < 1e-8
    _verdict(3, "special-function identities", ok,
             f"watson {worst_watson:.2e}, poisson-laguerre {worst_pl:.2e}, "
             f"bessel dual-path {worst_bessel:.2e}")


def test_criterion_04_three_way_kernel_battery():
    rng = np.random.default_rng(41)
    t0 = time.time()
    b0 = 1.0
    worst = 0.0
    n_queries = 0
    for alpha in (0.25, 0.5, 0.8):
        params = FieldParams(alpha, b0)
        for t in (0.2, 0.7, 1.2):
            scale = b0 / (4.0 * math.pi * abs(math.sin(t * b0)))
            for r1 in (0.5, 1.0, 2.0):
                for r2 in (0.5, 1.0, 2.0):
                    q = KernelQuery(
                        t,
                        PolarPoint(r1, float(rng.uniform(-math.pi, math.pi))),
                        PolarPoint(r2, float(rng.uniform(-math.pi, math.pi))),
                    )
                    vals = [
                        fn(q, params).value
                        for fn in (kernel_closed, kernel_partial_wave, kernel_covering)
                    ]
                    dev = max(
                        abs(vals[i] - vals[j]) for i in range(3) for j in range(i + 1, 3)
                    )
                    worst = max(worst, dev / scale)
                    n_queries += 1
    elapsed = time.time() - t0
    ok = worst < 1e-4 and n_queries == 81 and elapsed < 120.0
    _verdict(4, "three-way kernel agreement", ok,
             f"max scaled dev {worst:.2e} over {n_queries} queries, {elapsed:.1f} s")


def test_criterion_05_mehler_limit():
    rng = np.random.default_rng(3)
    params = FieldParams(1e-6, 1.0)
    worst = 0.0
    for _ in range(10):
        t = float(rng.uniform(0.2, 1.3))
        x = PolarPoint(float(rng.uniform(0.4, 2.0)), float(rng.uniform(-math.pi, math.pi)))
        y = PolarPoint(float(rng.uniform(0.4, 2.0)), float(rng.uniform(-math.pi, math.pi)))
        kc = kernel_closed(KernelQuery(t, x, y), params).value
        km = mehler_kernel(t, x, y, 1.0)
        worst = max(worst, abs(kc - km) / abs(km))
    ok = worst < 1e-4
    _verdict(5, "small-flux Mehler consistency", ok, f"max rel dev {worst:.2e} over 10 queries")


def test_criterion_06_dispersive_decay():
    params = FieldParams(0.5, 1.0)
    grid = PolarGrid(1.0, 96, 144, nu=0.0, r_max=3.5)
    rr = np.meshgrid(grid.r, grid.theta, indexing="ij")[0]
    f = WaveFunction(grid=grid, values=np.exp(-(rr**2)).astype(complex))
    times = (0.2, 0.5, 0.9, 1.3, 2.0, 2.8)
    base = np.array(dispersive_scan(f, times, params).ratios)
    shifted = np.array(
        dispersive_scan(f, tuple(t + math.pi for t in times), params).ratios
    )
    spread = float(np.max(base) / np.min(base))
    period_gap = float(np.max(np.maximum(base / shifted, shifted / base)))
    ok = (
        np.all(np.isfinite(base))
        and np.all(np.isfinite(shifted))
        and spread <= 10.0
        and period_gap <= 10.0
    )
    _verdict(6, "dispersive decay envelope", ok,
             f"ratio spread {spread:.2f}, period gap {period_gap:.2f}")


def _trapezoid_bound(alpha, theta, n=400001):
    s_max = math.log(1e12) / min(alpha, 1.0 - alpha) + 5.0
    s = np.linspace(0.0, s_max, n)
    num = np.abs(np.cosh((1.0 - alpha) * s) + np.exp(-1j * theta) * np.cosh(alpha * s))
    den = 2.0 * np.sinh(s / 2.0) ** 2 + 2.0 * math.cos(theta / 2.0) ** 2
    return float(np.trapezoid(num / den, s))


def test_criterion_07_diffractive_bound():
    params = FieldParams(0.25, 1.0)
    grid = np.linspace(-0.98 * math.pi, 0.98 * math.pi, 100)
    sup = diffractive_bound_scan(params, grid)
    worst_spot = 0.0
    for theta in (0.3, -1.2, 2.5, -2.9, 1.7):
        v = diffractive_bound_scan(params, [theta])
        worst_spot = max(worst_spot, abs(v - _trapezoid_bound(0.25, theta)))
    ok = math.isfinite(sup) and sup > 0.0 and worst_spot < 1e-6
    _verdict(7, "diffractive integrand bound", ok,
             f"sup {sup:.6f} over 100 angles, trapezoid dev {worst_spot:.2e}")


def _prepared_coeffs(params):
    table = np.zeros((5, 3), dtype=complex)
    table[2, 0] = 0.8
    table[3, 0] = 0.5 + 0.2j
    table[1, 1] = 0.3j
    return SpectralCoefficients(params=params, k_max=2, m_max=2, table=table)


def test_criterion_08_unitarity_and_group_law():
    rng = np.random.default_rng(5)
    params = FieldParams(0.25, 1.0)
    table = rng.normal(size=(7, 5)) + 1j * rng.normal(size=(7, 5))
    c0 = SpectralCoefficients(params=params, k_max=3, m_max=4, table=table)
    power_drift = abs(evolve_spectral(c0, 0.9).power() - c0.power()) / c0.power()

    grid = PolarGrid(1.0, 64, 144, nu=0.0, r_max=5.8)
    rr, tt = np.meshgrid(grid.r, grid.theta, indexing="ij")
    xx, yy = rr * np.cos(tt), rr * np.sin(tt)
    f = WaveFunction(grid=grid, values=np.exp(-((xx - 2.0) ** 2 + yy**2)).astype(complex))
    u = apply_propagator(f, 0.5, "partial_wave", grid, params)
    m0 = lp_norm(f, 2) ** 2
    mass_drift = abs(lp_norm(u, 2) ** 2 - m0) / m0

    half = FieldParams(0.5, 1.0)
    grid8 = PolarGrid(1.0, 128, 144, nu=0.5, r_max=8.0)
    coeffs = _prepared_coeffs(half)
    g = reconstruct_on_grid(coeffs, grid8)
    u_spec = reconstruct_on_grid(evolve_spectral(coeffs, 1.3), grid8)
    u_kern = apply_propagator(g, 1.3, "partial_wave", grid8, half)
    route_dev = float(
        np.max(np.abs(u_spec.values - u_kern.values)) / np.max(np.abs(u_spec.values))
    )

    ok = power_drift < 2e-15 and mass_drift < 1e-4 and route_dev < 1e-5
    _verdict(8, "unitarity and route agreement", ok,
             f"phase-power drift {power_drift:.1e}, mass drift {mass_drift:.1e}, "
             f"spectral-vs-kernel {route_dev:.1e}")


def test_criterion_09_strichartz_sanity():
    params = FieldParams(0.5, 1.0)
    grid = PolarGrid(1.0, 96, 64, nu=0.5, r_max=7.0)
    f = reconstruct_on_grid(_prepared_coeffs(params), grid)
    t_end = math.pi / 4.0
    s44 = strichartz_norm(f, AdmissiblePair(4, 4), t_end, 12, params)
    doubled = WaveFunction(grid=grid, values=2.0 * f.values)
    s44_doubled = strichartz_norm(doubled, AdmissiblePair(4, 4), t_end, 12, params)
    homog = abs(s44_doubled - 2.0 * s44) / (2.0 * s44)
    s_inf = strichartz_norm(f, AdmissiblePair(math.inf, 2), t_end, 12, params)
    l2 = lp_norm(f, 2)
    endpoint = abs(s_inf - l2) / l2
    ok = math.isfinite(s44) and s44 > 0.0 and homog < 1e-14 and endpoint < 1e-12
    _verdict(9, "Strichartz norm sanity", ok,
             f"(4,4) = {s44:.8f}, homogeneity dev {homog:.1e}, "
             f"(inf,2) vs l2 dev {endpoint:.1e}")


def test_criterion_10_deterministic_verify(tmp_path):
    out = str(tmp_path / "verify_run")
    cmd = [sys.executable, "-m", "abprop.cli", "verify", "--out", out, "--no-figures"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    blobs = {}
    for name in sorted(os.listdir(out)):
        with open(os.path.join(out, name), "rb") as fh:
            blobs[name] = fh.read()
    second = subprocess.run(cmd, capture_output=True, text=True)
    identical = all(
        open(os.path.join(out, name), "rb").read() == blob
        for name, blob in blobs.items()
    )
    ok = first.returncode == 0 and second.returncode == 0 and identical
    _verdict(10, "deterministic verification run", ok,
             f"exit codes {first.returncode}/{second.returncode}, "
             f"{len(blobs)} files byte-identical: {identical}")
